//! Monte Carlo campaigns over SNR, oversampling and design-parameter grids.

mod csv_io;
mod presets;

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use csv_io::{emit_csv, read_csv, read_csv_from, write_csv, write_meta, RunMeta, CSV_HEADER};
pub use presets::{preset, preset_figures, Scale, PRESET_NAMES};

use crate::config::{noise_var_from_snr_db, Modulation, SystemConfig};
use crate::detection::{run_block_detection, TrialRecord};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};
use crate::metrics::{self, power_consumption, PowerModel};
use crate::quantization::QuantizedStatistics;
use crate::reduction::{
    bfs_block, design_reduction, exhaustive_selection, rgs_block, uniform_init, Design,
    RatioTraceProblem, SubmatrixPartition, EXHAUSTIVE_MAX_M, EXHAUSTIVE_MAX_N,
};
use crate::signal_model::{draw_realization, trial_rng, OversampledModel, Realization};

/// Receiver configuration compared in a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Symbol-rate sampling, `M = M' = 1`, no reduction.
    Nyquist,
    /// Uniform oversampling at the processing rate, `M = M'`, no reduction.
    Uniform,
    /// Initial quasi-uniform sampling pattern at `(M, M')`.
    InitialPattern,
    Gevd,
    SlBfs,
    SlRgs,
    SimplifiedBfs,
    SimplifiedRgs,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Nyquist,
        Method::Uniform,
        Method::InitialPattern,
        Method::Gevd,
        Method::SlBfs,
        Method::SlRgs,
        Method::SimplifiedBfs,
        Method::SimplifiedRgs,
    ];

    /// Sampling rates `(M, M')` used for a sweep point at `(m_init, m_proc)`.
    pub fn rates(&self, m_init: usize, m_proc: usize) -> (usize, usize) {
        match self {
            Method::Nyquist => (1, 1),
            Method::Uniform => (m_proc, m_proc),
            _ => (m_init, m_proc),
        }
    }

    pub fn design(&self) -> Design {
        match self {
            Method::Nyquist | Method::Uniform => Design::Identity,
            Method::InitialPattern => Design::UniformInit,
            Method::Gevd => Design::Gevd,
            Method::SlBfs => Design::SlBfs,
            Method::SlRgs => Design::SlRgs,
            Method::SimplifiedBfs => Design::SimplifiedBfs,
            Method::SimplifiedRgs => Design::SimplifiedRgs,
        }
    }

    pub fn uses_partition(&self) -> bool {
        matches!(
            self,
            Method::SlBfs | Method::SlRgs | Method::SimplifiedBfs | Method::SimplifiedRgs
        )
    }

    pub fn uses_search_range(&self) -> bool {
        matches!(self, Method::SlRgs | Method::SimplifiedRgs)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Nyquist => "nyquist",
            Method::Uniform => "uniform",
            Method::InitialPattern => "initial-pattern",
            Method::Gevd => "gevd",
            Method::SlBfs => "sl-bfs",
            Method::SlRgs => "sl-rgs",
            Method::SimplifiedBfs => "simplified-bfs",
            Method::SimplifiedRgs => "simplified-rgs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Quantity a campaign evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Sum-rate lower bound of the whole block.
    SumRate,
    /// Windowed detection: NMSE, SER and analytic MSE.
    Mse,
    /// Gap to the best found objective after each row update of the
    /// restricted greedy search.
    Convergence,
    /// Receiver power over oversampling factors and resolutions.
    Power,
}

/// Sweep axes. Empty `n_submatrices` or `search_range` lists fall back to
/// the system configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sweep {
    pub snr_db: Vec<f64>,
    pub m_init: Vec<usize>,
    pub algorithms: Vec<Method>,
    pub n_submatrices: Vec<usize>,
    pub search_range: Vec<usize>,
    pub bits: Vec<u32>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            snr_db: vec![10.0],
            m_init: vec![3],
            algorithms: vec![Method::SlRgs],
            n_submatrices: Vec::new(),
            search_range: Vec::new(),
            bits: Vec::new(),
        }
    }
}

/// A named campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: String,
    pub criterion: Criterion,
    #[serde(default = "default_modulation")]
    pub modulation: Modulation,
    pub n_realizations: usize,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub power: PowerModel,
}

fn default_modulation() -> Modulation {
    Modulation::Qpsk
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: "<spec>".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse {
            path: "<spec>".into(),
            message: e.to_string(),
        })
    }

    /// SHA-256 of the canonical JSON form of the spec.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Grid points in output order, without duplicates.
    pub fn points(&self) -> Vec<GridPoint> {
        let sw = &self.sweep;
        let ks = if sw.n_submatrices.is_empty() {
            vec![self.system.n_submatrices]
        } else {
            sw.n_submatrices.clone()
        };
        let betas = if sw.search_range.is_empty() {
            vec![self.system.search_range]
        } else {
            sw.search_range.clone()
        };
        let mut out: Vec<GridPoint> = Vec::new();
        for &snr_db in &sw.snr_db {
            for &m in &sw.m_init {
                for &k in &ks {
                    for &beta in &betas {
                        for &method in &sw.algorithms {
                            let (m_init, m_proc) = method.rates(m, self.system.m_proc);
                            let p = GridPoint {
                                method,
                                m_init,
                                m_proc,
                                k_sub: method.uses_partition().then_some(k),
                                beta: method.uses_search_range().then_some(beta),
                                snr_db,
                            };
                            if !out.contains(&p) {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Checks axes and every grid point before any trial runs.
    pub fn validate(&self) -> Result<()> {
        if self.criterion == Criterion::Power {
            if self.sweep.m_init.is_empty() || self.sweep.bits.is_empty() {
                return Err(Error::Config(
                    "power sweep needs m_init and bits axes".into(),
                ));
            }
            if self.sweep.bits.contains(&0) {
                return Err(Error::Config("bits must be at least 1".into()));
            }
            return Ok(());
        }
        if self.sweep.snr_db.is_empty()
            || self.sweep.m_init.is_empty()
            || self.sweep.algorithms.is_empty()
        {
            return Err(Error::Config(
                "snr_db, m_init and algorithms axes must be non-empty".into(),
            ));
        }
        if self.n_realizations == 0 {
            return Err(Error::Config("n_realizations must be positive".into()));
        }
        for p in self.points() {
            let cfg = p.config(&self.system);
            cfg.validate()?;
            let n_sym = match self.criterion {
                Criterion::SumRate | Criterion::Convergence => cfg.block_len,
                _ => {
                    cfg.validate_windows()?;
                    cfg.window_len
                }
            };
            if p.method.uses_partition() || self.criterion == Criterion::Convergence {
                cfg.validate_partition(n_sym)?;
            }
        }
        Ok(())
    }
}

/// One cell of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub method: Method,
    pub m_init: usize,
    pub m_proc: usize,
    pub k_sub: Option<usize>,
    pub beta: Option<usize>,
    pub snr_db: f64,
}

impl GridPoint {
    pub fn config(&self, base: &SystemConfig) -> SystemConfig {
        SystemConfig {
            m_init: self.m_init,
            m_proc: self.m_proc,
            noise_var: noise_var_from_snr_db(base.n_users, self.snr_db),
            n_submatrices: self.k_sub.unwrap_or(base.n_submatrices),
            search_range: self.beta.unwrap_or(base.search_range),
            ..base.clone()
        }
    }
}

/// One aggregated output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub algorithm: String,
    pub m_init: usize,
    pub m_proc: usize,
    pub k_sub: Option<usize>,
    pub beta: Option<usize>,
    pub snr_db: Option<f64>,
    pub bits: Option<u32>,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub n_trials: usize,
    pub seed: u64,
    /// Mean pattern-design operations per trial.
    pub flops: u64,
}

/// Per-trial result of one grid point.
#[derive(Debug, Clone)]
enum Sample {
    Rate(f64),
    Detection(TrialRecord),
    Gaps(Vec<f64>),
}

/// Gap trace of the restricted greedy search on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// `reference - s_r` for `r = 0..=rows`, where `s_0` is the initial
    /// pattern.
    pub gaps: Vec<f64>,
    pub reference: f64,
    /// Whether the reference is the exhaustive optimum.
    pub exact: bool,
}

/// Runs the restricted greedy search on every block of `part` from the
/// blocks of `init` and records its gap to a reference objective. The
/// reference is the exhaustive optimum when the block is small enough and
/// otherwise the best of full-range greedy, backward selection and the
/// search itself.
pub fn convergence_traces(
    part: &SubmatrixPartition<'_>,
    init: &[usize],
    beta: usize,
) -> Result<Vec<ConvergenceTrace>> {
    (0..part.n_blocks)
        .map(|k| {
            let obj = |s: &[usize]| part.block_objective(k, s);
            let local = part.local_pattern(k, init)?;
            let run = rgs_block(obj, &local, part.block_cols, beta, None)?;
            let (reference, exact) =
                if part.block_cols <= EXHAUSTIVE_MAX_N && part.block_rows <= EXHAUSTIVE_MAX_M {
                    (
                        exhaustive_selection(obj, part.block_cols, part.block_rows)?.1,
                        true,
                    )
                } else {
                    let wide =
                        rgs_block(obj, &local, part.block_cols, part.block_cols, None)?.objective();
                    let bfs = obj(&bfs_block(obj, part.block_cols, part.block_rows)?)
                        .unwrap_or(f64::NEG_INFINITY);
                    (wide.max(bfs).max(run.objective()), false)
                };
            Ok(ConvergenceTrace {
                gaps: run.history.iter().map(|s| reference - s).collect(),
                reference,
                exact,
            })
        })
        .collect()
}

fn block_stats(
    cfg: &SystemConfig,
    real: &Realization,
    n_symbols: usize,
) -> Result<QuantizedStatistics> {
    let model = OversampledModel::build(cfg, &real.h_flat, &real.delays, n_symbols)?;
    QuantizedStatistics::compute(&model, cfg.noise_var)
}

fn run_trial(
    spec: &ExperimentSpec,
    points: &[GridPoint],
    trial: u64,
) -> Result<Vec<(Sample, u64)>> {
    let seed = spec.system.rng_seed;
    let mut cache: HashMap<(usize, u64), QuantizedStatistics> = HashMap::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let cfg = p.config(&spec.system);
        let real = draw_realization(&cfg, spec.modulation, &mut trial_rng(seed, trial));
        let (sample, counter) = flops::measure(|| -> Result<Sample> {
            match spec.criterion {
                Criterion::SumRate => {
                    let key = (cfg.m_init, p.snr_db.to_bits());
                    let stats = match cache.entry(key) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(block_stats(&cfg, &real, cfg.block_len)?),
                    };
                    let problem = RatioTraceProblem::from_stats(
                        stats,
                        cfg.m_proc * cfg.block_len * cfg.n_rx,
                    )?;
                    let delta = design_reduction(&cfg, &problem, p.method.design())?;
                    Ok(Sample::Rate(metrics::sum_rate_lb(
                        stats,
                        &delta,
                        cfg.block_len,
                    )?))
                }
                Criterion::Mse => Ok(Sample::Detection(run_block_detection(
                    &cfg,
                    &real,
                    p.method.design(),
                    trial,
                )?)),
                Criterion::Convergence => {
                    let stats = block_stats(&cfg, &real, cfg.block_len)?;
                    let problem = RatioTraceProblem::from_stats(
                        &stats,
                        cfg.m_proc * cfg.block_len * cfg.n_rx,
                    )?;
                    let part = SubmatrixPartition::new(&problem, cfg.n_submatrices)?;
                    let init = uniform_init(&cfg, &problem)?;
                    let sel = init.selection().expect("initial pattern is a selection");
                    let traces = flops::in_phase(Phase::PatternDesign, || {
                        convergence_traces(&part, sel, cfg.search_range)
                    })?;
                    let len = traces[0].gaps.len();
                    let gaps = (0..len)
                        .map(|r| {
                            traces.iter().map(|t| t.gaps[r]).sum::<f64>() / traces.len() as f64
                        })
                        .collect();
                    Ok(Sample::Gaps(gaps))
                }
                Criterion::Power => unreachable!("power campaigns run no trials"),
            }
        });
        out.push((sample?, counter.phase(Phase::PatternDesign).total()));
    }
    Ok(out)
}

fn row(
    spec: &ExperimentSpec,
    p: &GridPoint,
    metric: String,
    est: metrics::Estimate,
    flops: u64,
) -> ResultRow {
    ResultRow {
        scenario: spec.scenario.clone(),
        algorithm: p.method.name().to_string(),
        m_init: p.m_init,
        m_proc: p.m_proc,
        k_sub: p.k_sub,
        beta: p.beta,
        snr_db: Some(p.snr_db),
        bits: None,
        metric,
        value: est.value,
        stderr: est.stderr,
        n_trials: est.n,
        seed: spec.system.rng_seed,
        flops,
    }
}

fn power_rows(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &m in &spec.sweep.m_init {
        for &bits in &spec.sweep.bits {
            rows.push(ResultRow {
                scenario: spec.scenario.clone(),
                algorithm: "power-model".into(),
                m_init: m,
                m_proc: m,
                k_sub: None,
                beta: None,
                snr_db: None,
                bits: Some(bits),
                metric: "power_w".into(),
                value: power_consumption(&spec.power, m, spec.system.n_rx, bits)?,
                stderr: 0.0,
                n_trials: 0,
                seed: spec.system.rng_seed,
                flops: 0,
            });
        }
    }
    Ok(rows)
}

/// Aggregates per-trial samples of one grid point. `samples` is indexed by
/// trial, so the summation order does not depend on scheduling.
fn aggregate(
    spec: &ExperimentSpec,
    p: &GridPoint,
    samples: &[(Sample, u64)],
) -> Result<Vec<ResultRow>> {
    let n = samples.len();
    let flops = samples.iter().map(|(_, f)| f).sum::<u64>() / n.max(1) as u64;
    let mut rows = Vec::new();
    match &samples[0].0 {
        Sample::Rate(_) => {
            let v: Vec<f64> = samples
                .iter()
                .map(|(s, _)| {
                    if let Sample::Rate(r) = s {
                        *r
                    } else {
                        f64::NAN
                    }
                })
                .collect();
            rows.push(row(
                spec,
                p,
                "sum_rate".into(),
                metrics::mean_stderr(&v)?,
                flops,
            ));
        }
        Sample::Detection(_) => {
            let recs: Vec<TrialRecord> = samples
                .iter()
                .filter_map(|(s, _)| {
                    if let Sample::Detection(r) = s {
                        Some(r.clone())
                    } else {
                        None
                    }
                })
                .collect();
            rows.push(row(spec, p, "nmse".into(), metrics::nmse(&recs)?, flops));
            if spec.modulation == Modulation::Qpsk {
                let v: Vec<f64> = recs
                    .iter()
                    .map(|r| r.symbol_errors as f64 / r.symbols as f64)
                    .collect();
                rows.push(row(spec, p, "ser".into(), metrics::mean_stderr(&v)?, flops));
            }
            let v: Vec<f64> = recs
                .iter()
                .map(|r| r.analytic_mse / r.symbols as f64)
                .collect();
            rows.push(row(
                spec,
                p,
                "analytic_mse".into(),
                metrics::mean_stderr(&v)?,
                flops,
            ));
        }
        Sample::Gaps(g0) => {
            for r in 0..g0.len() {
                let v: Vec<f64> = samples
                    .iter()
                    .map(|(s, _)| {
                        if let Sample::Gaps(g) = s {
                            g[r]
                        } else {
                            f64::NAN
                        }
                    })
                    .collect();
                rows.push(row(
                    spec,
                    p,
                    format!("gap_row_{r:03}"),
                    metrics::mean_stderr(&v)?,
                    flops,
                ));
            }
        }
    }
    Ok(rows)
}

/// Runs every trial of every grid point and aggregates the results.
///
/// Trial `t` draws from stream `t` of the root seed, so all grid points
/// see the same channels, delays and symbols. Trials run on the current
/// rayon pool and merge in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    if spec.criterion == Criterion::Power {
        return power_rows(spec);
    }
    let points = spec.points();
    let per_trial: Vec<Vec<(Sample, u64)>> = (0..spec.n_realizations as u64)
        .into_par_iter()
        .map(|t| run_trial(spec, &points, t))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let samples: Vec<(Sample, u64)> = per_trial.iter().map(|t| t[i].clone()).collect();
        rows.extend(aggregate(spec, p, &samples)?);
    }
    Ok(rows)
}
