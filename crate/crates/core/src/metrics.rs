//! Sum-rate bound, error statistics, operation-count reports and the
//! receiver power model.

use serde::{Deserialize, Serialize};

use crate::detection::TrialRecord;
use crate::error::{Error, Result};
use crate::flops::{FlopCounter, OpCount, Phase};
use crate::linalg::{self, c, hermitize, CMat};
use crate::quantization::QuantizedStatistics;
use crate::reduction::ReductionMatrix;

const LOADING: f64 = 1e-10;

fn load(x: &CMat) -> CMat {
    let n = x.nrows();
    let eps = LOADING * x.trace().re.abs().max(f64::MIN_POSITIVE) / n as f64;
    let mut out = x.clone();
    for i in 0..n {
        out[(i, i)] += c(eps, 0.0);
    }
    out
}

fn log_det_loaded(x: &CMat) -> Result<(f64, bool)> {
    if let Some(v) = linalg::log_det_hpd(x) {
        return Ok((v, false));
    }
    log::warn!("reduced covariance is singular, loading the diagonal");
    linalg::log_det_hpd(&load(x))
        .map(|v| (v, true))
        .ok_or(Error::NotPositiveDefinite(linalg::min_eigenvalue(x)))
}

/// Lower bound on the sum rate in bits per channel use for one
/// realization: `(1/N) log2 det(Δ C_yQ Δᴴ (Δ C_n' Δᴴ)⁻¹)`.
pub fn sum_rate_lb(
    stats: &QuantizedStatistics,
    delta: &ReductionMatrix,
    n_symbols: usize,
) -> Result<f64> {
    if delta.n_cols != stats.dim() {
        return Err(Error::Dimension(format!(
            "reduction has {} columns, statistics have dimension {}",
            delta.n_cols,
            stats.dim()
        )));
    }
    if n_symbols == 0 {
        return Err(Error::Config("n_symbols must be positive".into()));
    }
    let mut num = delta.project(&stats.c_yq);
    let mut den = delta.project(&stats.c_nprime);
    hermitize(&mut num);
    hermitize(&mut den);
    let (a, _) = log_det_loaded(&num)?;
    let (b, _) = log_det_loaded(&den)?;
    let v = (a - b) / std::f64::consts::LN_2 / n_symbols as f64;
    if !v.is_finite() {
        return Err(Error::Domain(format!("sum-rate bound is {v}")));
    }
    Ok(v)
}

/// Receiver power parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Automatic gain control power per converter, W.
    pub p_agc: f64,
    /// ADC figure of merit, J per conversion step.
    pub fom_w: f64,
    /// Nyquist sampling rate, Hz.
    pub f_nyquist: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            p_agc: 2e-3,
            fom_w: 200e-15,
            f_nyquist: 1e8,
        }
    }
}

/// `P = 2 N_r (c P_AGC + FOM M f_Nyq 2^b)` with `c = 0` for one bit and
/// `c = 1` otherwise.
pub fn power_consumption(pm: &PowerModel, m: usize, n_rx: usize, bits: u32) -> Result<f64> {
    if bits == 0 || bits > 32 {
        return Err(Error::Domain(format!("bits {bits} must lie in 1..=32")));
    }
    let agc = if bits == 1 { 0.0 } else { pm.p_agc };
    let adc = pm.fom_w * m as f64 * pm.f_nyquist * 2f64.powi(bits as i32);
    Ok(2.0 * n_rx as f64 * (agc + adc))
}

/// A proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval at confidence given by the normal quantile `z`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> Result<Proportion> {
    if trials == 0 {
        return Err(Error::Empty("proportion"));
    }
    if successes > trials {
        return Err(Error::Domain(format!(
            "{successes} successes out of {trials}"
        )));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok(Proportion {
        successes,
        trials,
        value: p,
        lo,
        hi,
    })
}

/// Mean with standard error and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn lo(&self) -> f64 {
        self.value - Z_95 * self.stderr
    }

    pub fn hi(&self) -> f64 {
        self.value + Z_95 * self.stderr
    }
}

/// Sample mean and standard error of the mean, summed in input order.
pub fn mean_stderr(values: &[f64]) -> Result<Estimate> {
    let n = values.len();
    if n == 0 {
        return Err(Error::Empty("sample"));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        value: mean,
        stderr,
        n,
    })
}

/// Symbol error rate over all records.
pub fn ser(records: &[TrialRecord]) -> Result<Proportion> {
    let errors = records.iter().map(|r| r.symbol_errors).sum();
    let symbols = records.iter().map(|r| r.symbols).sum();
    wilson(errors, symbols, Z_95)
}

/// `NMSE = Σ‖x - x̃‖² / Σ‖x‖²`; the standard error comes from the delta
/// method on the per-trial ratio of sums.
pub fn nmse(records: &[TrialRecord]) -> Result<Estimate> {
    if records.is_empty() {
        return Err(Error::Empty("trial records"));
    }
    let n = records.len() as f64;
    let e: Vec<f64> = records.iter().map(|r| r.sq_error).collect();
    let s: Vec<f64> = records.iter().map(|r| r.signal_energy).collect();
    let me = e.iter().sum::<f64>() / n;
    let ms = s.iter().sum::<f64>() / n;
    if !(ms > 0.0) {
        return Err(Error::Domain("transmitted energy is zero".into()));
    }
    let ratio = me / ms;
    let stderr = if records.len() > 1 {
        let var = e
            .iter()
            .zip(&s)
            .map(|(a, b)| (a - ratio * b).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt() / ms
    } else {
        0.0
    };
    Ok(Estimate {
        value: ratio,
        stderr,
        n: records.len(),
    })
}

/// One line of an operation-count report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlopRow {
    pub label: String,
    pub phase: Phase,
    pub mults: u64,
    pub adds: u64,
}

/// Per-phase operation counts of labelled runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlopReport {
    pub rows: Vec<FlopRow>,
}

impl FlopReport {
    pub fn count(&self, label: &str, phase: Phase) -> OpCount {
        self.rows
            .iter()
            .filter(|r| r.label == label && r.phase == phase)
            .fold(OpCount::default(), |acc, r| OpCount {
                mults: acc.mults + r.mults,
                adds: acc.adds + r.adds,
            })
    }

    /// Total operations of `num` over those of `den` in `phase`.
    pub fn ratio(&self, num: &str, den: &str, phase: Phase) -> Option<f64> {
        let d = self.count(den, phase).total();
        (d > 0).then(|| self.count(num, phase).total() as f64 / d as f64)
    }
}

pub fn flop_report<'a>(runs: impl IntoIterator<Item = (&'a str, &'a FlopCounter)>) -> FlopReport {
    let mut rows = Vec::new();
    for (label, counter) in runs {
        for (phase, op) in counter.phases() {
            rows.push(FlopRow {
                label: label.to_string(),
                phase,
                mults: op.mults,
                adds: op.adds,
            });
        }
    }
    FlopReport { rows }
}
