//! Sliding-window LRA-MMSE detection.

use num_complex::Complex64;
use rand::Rng;

use crate::config::{Modulation, SystemConfig};
use crate::error::{Error, Result};
use crate::flops::{self, FlopCounter, Phase};
use crate::linalg::{self, c, hermitize, CMat, CVec};
use crate::quantization::{quantize_1bit, window_stats, QuantizedStatistics};
use crate::reduction::{design_reduction, Design, RatioTraceProblem, ReductionMatrix};
use crate::signal_model::{
    complex_gaussian, draw_symbols, simulate_rx, OversampledModel, Realization,
};

/// Relative diagonal loading used when the reduced covariance is singular.
pub const LOADING: f64 = 1e-10;

/// LRA-MMSE filter for one window.
#[derive(Debug, Clone)]
pub struct WindowDetector {
    pub delta: ReductionMatrix,
    /// `M' l N_r x l N_t` filter.
    pub w: CMat,
    pub stats: QuantizedStatistics,
    /// Set when diagonal loading was needed to solve for `w`.
    pub loaded: bool,
}

impl WindowDetector {
    /// Analytic MSE `E‖x - x̃‖²` of this filter over one window.
    pub fn analytic_mse(&self) -> f64 {
        filter_mse(&self.stats, &self.delta, &self.w)
    }

    /// Soft symbols for one quantized window.
    pub fn detect(&self, yq_win: &CVec) -> CVec {
        detect_window(&self.w, &self.delta, yq_win)
    }
}

fn load(r: &CMat) -> CMat {
    let n = r.nrows();
    let eps = LOADING * r.trace().re.abs().max(f64::MIN_POSITIVE) / n as f64;
    let mut out = r.clone();
    for i in 0..n {
        out[(i, i)] += c(eps, 0.0);
    }
    out
}

/// `W = (Δ C_yQ Δᴴ)⁻¹ Δ C_yQx`.
pub fn design_lra_mmse(
    stats: &QuantizedStatistics,
    delta: &ReductionMatrix,
) -> Result<WindowDetector> {
    if delta.n_cols != stats.dim() {
        return Err(Error::Dimension(format!(
            "reduction has {} columns, statistics have dimension {}",
            delta.n_cols,
            stats.dim()
        )));
    }
    let (w, loaded) = flops::in_phase(Phase::Detection, || {
        let mut r = delta.project(&stats.c_yq);
        hermitize(&mut r);
        let p = delta.reduce_rows(&stats.c_yqx);
        match linalg::solve_hpd(&r, &p) {
            Some(w) => Ok((w, false)),
            None => {
                log::warn!("reduced quantized covariance is singular, loading the diagonal");
                linalg::solve_hpd(&load(&r), &p)
                    .map(|w| (w, true))
                    .ok_or(Error::NotPositiveDefinite(linalg::min_eigenvalue(&r)))
            }
        }
    })?;
    Ok(WindowDetector {
        delta: delta.clone(),
        w,
        stats: stats.clone(),
        loaded,
    })
}

/// `x̃ = Wᴴ Δ y_Q`.
pub fn detect_window(w: &CMat, delta: &ReductionMatrix, yq_win: &CVec) -> CVec {
    let r = flops::in_phase(Phase::ReductionApply, || delta.apply(yq_win));
    flops::in_phase(Phase::Detection, || {
        flops::matmul(w.ncols(), w.nrows(), 1);
        w.ad_mul(&r)
    })
}

/// `E‖x - Wᴴ Δ y_Q‖² = Tr(I) - 2 Re Tr(Wᴴ Δ C_yQx) + Tr(Wᴴ Δ C_yQ Δᴴ W)`
/// for unit-power symbols.
pub fn filter_mse(stats: &QuantizedStatistics, delta: &ReductionMatrix, w: &CMat) -> f64 {
    let r = delta.project(&stats.c_yq);
    let p = delta.reduce_rows(&stats.c_yqx);
    let cross = w.ad_mul(&p).trace().re;
    let quad = w.ad_mul(&(&r * w)).trace().re;
    p.ncols() as f64 - 2.0 * cross + quad
}

/// Minimum MSE `l N_t - Tr(Pᴴ (Δ C_yQ Δᴴ)⁻¹ P)` with `P = Δ C_yQx`.
pub fn mmse_value(stats: &QuantizedStatistics, delta: &ReductionMatrix) -> Result<f64> {
    let det = design_lra_mmse(stats, delta)?;
    let p = delta.reduce_rows(&stats.c_yqx);
    Ok(p.ncols() as f64 - p.ad_mul(&det.w).trace().re)
}

/// Matched filter `W = Δ C_yQx`.
pub fn matched_filter(stats: &QuantizedStatistics, delta: &ReductionMatrix) -> CMat {
    delta.reduce_rows(&stats.c_yqx)
}

/// Nearest QPSK point, component-wise sign; zero maps to the positive side.
pub fn slice_qpsk(x: &CVec) -> CVec {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    x.map(|v| {
        c(
            if v.re >= 0.0 { a } else { -a },
            if v.im >= 0.0 { a } else { -a },
        )
    })
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a.re >= 0.0) == (b.re >= 0.0) && (a.im >= 0.0) == (b.im >= 0.0)
}

/// Outcome of detecting one block.
#[derive(Debug, Clone, Default)]
pub struct TrialRecord {
    pub trial: u64,
    pub symbols: u64,
    pub symbol_errors: u64,
    /// `‖x - x̃‖²` summed over the block.
    pub sq_error: f64,
    /// `‖x‖²` summed over the block.
    pub signal_energy: f64,
    /// Analytic window MSE times the number of windows.
    pub analytic_mse: f64,
    pub windows: usize,
    pub loaded: bool,
    pub flops: FlopCounter,
}

/// Designs the reduction and the filter for the windowed model of a
/// realization. Statistics and `Δ` are computed once per realization.
pub fn design_window_detector(
    cfg: &SystemConfig,
    real: &Realization,
    design: Design,
) -> Result<WindowDetector> {
    let model = OversampledModel::build(cfg, &real.h_flat, &real.delays, cfg.window_len)?;
    let stats = window_stats(&model, cfg.noise_var)?;
    let rows = cfg.m_proc * cfg.window_len * cfg.n_rx;
    let problem = RatioTraceProblem::from_stats(&stats, rows)?;
    let delta = design_reduction(cfg, &problem, design)?;
    design_lra_mmse(&stats, &delta)
}

/// Detects one block: simulate the received block, quantize, then reduce,
/// filter and slice each window of `window_len` symbols.
pub fn run_block_detection(
    cfg: &SystemConfig,
    real: &Realization,
    design: Design,
    trial: u64,
) -> Result<TrialRecord> {
    cfg.validate_windows()?;
    let mut rec = TrialRecord {
        trial,
        ..Default::default()
    };
    let (res, counter) = flops::measure(|| -> Result<()> {
        let det = design_window_detector(cfg, real, design)?;
        let block = OversampledModel::build(cfg, &real.h_flat, &real.delays, cfg.block_len)?;
        let y = simulate_rx(&block, &real.tx.x, &real.w)?;
        let yq = quantize_1bit(&y);
        let (n, l, m) = (cfg.block_len, cfg.window_len, cfg.m_init);
        let n_t = cfg.n_users;
        let mse = det.analytic_mse();
        let qpsk = real.tx.modulation == Modulation::Qpsk;
        for s0 in (0..n).step_by(l) {
            let rows: Vec<usize> = (0..cfg.n_rx)
                .flat_map(|a| (0..m * l).map(move |i| a * m * n + s0 * m + i))
                .collect();
            let cols: Vec<usize> = (0..n_t)
                .flat_map(|t| (0..l).map(move |s| t * n + s0 + s))
                .collect();
            let x_hat = det.detect(&linalg::gather_vec(&yq, &rows));
            let x = linalg::gather_vec(&real.tx.x, &cols);
            if qpsk {
                let hard = slice_qpsk(&x_hat);
                rec.symbol_errors += hard
                    .iter()
                    .zip(x.iter())
                    .filter(|(h, t)| !same_point(**h, **t))
                    .count() as u64;
            }
            rec.symbols += x.len() as u64;
            rec.sq_error += (&x - &x_hat).norm_squared();
            rec.signal_energy += x.norm_squared();
            rec.analytic_mse += mse;
            rec.windows += 1;
        }
        rec.loaded = det.loaded;
        Ok(())
    });
    res?;
    rec.flops = counter;
    Ok(rec)
}

/// Squared errors `‖x - x̃‖²` of `n_draws` isolated windows simulated from
/// the window model itself, so the statistics hold exactly.
pub fn simulate_window_errors(
    model: &OversampledModel,
    det: &WindowDetector,
    noise_var: f64,
    modulation: Modulation,
    n_draws: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let n_noise = det.stats.dim() * 3;
    (0..n_draws)
        .map(|_| {
            let x = draw_symbols(rng, model.h.ncols(), modulation).x;
            let w = CVec::from_fn(n_noise, |_, _| complex_gaussian(rng, noise_var));
            let yq = quantize_1bit(&simulate_rx(model, &x, &w)?);
            Ok((&x - det.detect(&yq)).norm_squared())
        })
        .collect()
}
