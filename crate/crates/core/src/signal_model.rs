//! Oversampled uplink model: pulse shapes, Toeplitz filter matrices, the
//! equivalent channel and random realizations.
//!
//! Sample ordering follows the block layout used everywhere else in the
//! crate: symbols are stacked user-major (`x[t * N + s]` is symbol `s` of
//! user `t`) and received samples antenna-major (`y[a * M * N + i]` is
//! sample `i` of antenna `a`).

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{Modulation, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, RMat};

/// Unit-energy root-raised-cosine impulse response.
///
/// The removable singularities at `t = 0` and `t = ±T / (4β)` are replaced
/// by their limits.
pub fn rrc(t: f64, period: f64, rolloff: f64) -> f64 {
    let x = t / period;
    let b = rolloff;
    let norm = 1.0 / period.sqrt();
    if x.abs() < 1e-12 {
        return norm * (1.0 - b + 4.0 * b / PI);
    }
    if b > 0.0 && (x.abs() - 1.0 / (4.0 * b)).abs() < 1e-10 {
        let a = PI / (4.0 * b);
        return norm * b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * x * (1.0 - b)).sin() + 4.0 * b * x * (PI * x * (1.0 + b)).cos();
    let den = PI * x * (1.0 - (4.0 * b * x).powi(2));
    norm * num / den
}

/// Raised-cosine pulse, the convolution of two matched unit-energy RRC
/// pulses; `raised_cosine(0) = 1`.
pub fn raised_cosine(t: f64, period: f64, rolloff: f64) -> f64 {
    let x = t / period;
    let b = rolloff;
    let sinc = |v: f64| {
        if v.abs() < 1e-15 {
            1.0
        } else {
            (PI * v).sin() / (PI * v)
        }
    };
    if b > 0.0 && (x.abs() - 1.0 / (2.0 * b)).abs() < 1e-10 {
        return PI / 4.0 * sinc(1.0 / (2.0 * b));
    }
    sinc(x) * (PI * b * x).cos() / (1.0 - (2.0 * b * x).powi(2))
}

/// Sampled RRC filter, symmetric around its centre tap.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    taps: Vec<f64>,
    spacing: f64,
    period: f64,
    rolloff: f64,
    scale: f64,
}

impl PulseShape {
    /// Tap table `m(t_k)` for `t_k = (k - (n-1)/2) * spacing`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    /// Continuous-time response with the same normalization as the taps.
    pub fn value_at(&self, t: f64) -> f64 {
        self.scale * rrc(t, self.period, self.rolloff)
    }

    /// Sum of squared taps times the spacing.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|v| v * v).sum::<f64>() * self.spacing
    }

    /// Cascade of this pulse with its matched counterpart at continuous
    /// time `t`.
    pub fn matched_response(&self, t: f64) -> f64 {
        raised_cosine(t, self.period, self.rolloff)
    }
}

/// RRC tap table at rate `M / T` with `n_taps` taps, normalized to unit
/// energy.
pub fn build_rrc(cfg: &SystemConfig, n_taps: usize) -> Result<PulseShape> {
    build_rrc_at(cfg.symbol_period, cfg.rolloff, cfg.m_init, n_taps)
}

pub fn build_rrc_at(period: f64, rolloff: f64, m: usize, n_taps: usize) -> Result<PulseShape> {
    if n_taps.is_multiple_of(2) {
        return Err(Error::Config(format!("tap count {n_taps} must be odd")));
    }
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::Config(format!("rolloff {rolloff} outside [0, 1]")));
    }
    let spacing = period / m as f64;
    let half = (n_taps / 2) as f64;
    let raw: Vec<f64> = (0..n_taps)
        .map(|k| rrc((k as f64 - half) * spacing, period, rolloff))
        .collect();
    let energy = raw.iter().map(|v| v * v).sum::<f64>() * spacing;
    let scale = 1.0 / energy.sqrt();
    let taps = raw.into_iter().map(|v| v * scale).collect();
    Ok(PulseShape {
        taps,
        spacing,
        period,
        rolloff,
        scale,
    })
}

/// Receive-filter pulse spanning `[-N T, N T]` (`2 M N + 1` taps).
pub fn receive_pulse(cfg: &SystemConfig, n_symbols: usize) -> Result<PulseShape> {
    build_rrc(cfg, 2 * cfg.m_init * n_symbols + 1)
}

/// Noise-shaping Toeplitz matrix (`M N x 3 M N`).
///
/// Row `r` holds the receive-filter taps starting at column `r`, so the
/// first row is `m(-NT), m(-NT + T/M), ..., m(NT), 0, ...`. Taps are scaled
/// by `sqrt(T / M)`, which gives every row unit norm: the filtered noise
/// then has per-sample variance `σ²`.
pub fn build_g(cfg: &SystemConfig, pulse: &PulseShape, n_symbols: usize) -> Result<RMat> {
    let mn = cfg.m_init * n_symbols;
    if pulse.len() != 2 * mn + 1 {
        return Err(Error::Dimension(format!(
            "receive pulse has {} taps, need {}",
            pulse.len(),
            2 * mn + 1
        )));
    }
    let w = pulse.spacing().sqrt();
    let mut g = RMat::zeros(mn, 3 * mn);
    for r in 0..mn {
        for (k, tap) in pulse.taps().iter().enumerate() {
            g[(r, r + k)] = tap * w;
        }
    }
    Ok(g)
}

/// Per-user Toeplitz matrix `Z(i, j) = z(delay + (j - i) T / M)`.
pub fn build_z(
    cfg: &SystemConfig,
    pulse: &PulseShape,
    delay: f64,
    n_symbols: usize,
) -> Result<RMat> {
    if delay.abs() > cfg.delay_dist_halfwidth * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "delay {delay} outside [-{h}, {h}]",
            h = cfg.delay_dist_halfwidth
        )));
    }
    let mn = cfg.m_init * n_symbols;
    let dt = cfg.sample_spacing();
    // one evaluation per diagonal
    let diag: Vec<f64> = (0..2 * mn - 1)
        .map(|d| pulse.matched_response(delay + (d as f64 - (mn - 1) as f64) * dt))
        .collect();
    Ok(RMat::from_fn(mn, mn, |i, j| diag[j + mn - 1 - i]))
}

/// Oversampling selector `u = [0, ..., 0, 1]ᵀ` of length `M`.
pub fn oversampling_selector(m: usize) -> DVector<f64> {
    let mut u = DVector::zeros(m);
    u[m - 1] = 1.0;
    u
}

/// Equivalent channel `(H' ⊗ I_MN) blkdiag(Z_1..Z_Nt) (I_{N Nt} ⊗ u)`.
///
/// Entry `(a M N + i, t N + s)` equals `H'(a, t) Z_t(i, s M + M - 1)`.
pub fn build_equivalent_channel(
    m: usize,
    n_symbols: usize,
    h_flat: &CMat,
    z_list: &[RMat],
) -> Result<CMat> {
    let (n_rx, n_users) = h_flat.shape();
    let mn = m * n_symbols;
    if z_list.len() != n_users {
        return Err(Error::Dimension(format!(
            "{} Z matrices for {n_users} users",
            z_list.len()
        )));
    }
    if let Some(z) = z_list.iter().find(|z| z.shape() != (mn, mn)) {
        return Err(Error::Dimension(format!(
            "Z is {:?}, expected {mn}x{mn}",
            z.shape()
        )));
    }
    let mut h = CMat::zeros(mn * n_rx, n_symbols * n_users);
    for a in 0..n_rx {
        for (t, z) in z_list.iter().enumerate() {
            let gain = h_flat[(a, t)];
            for s in 0..n_symbols {
                let col = s * m + m - 1;
                for i in 0..mn {
                    h[(a * mn + i, t * n_symbols + s)] = gain * z[(i, col)];
                }
            }
        }
    }
    Ok(h)
}

/// Deterministic parts of the oversampled model for one channel draw.
#[derive(Debug, Clone)]
pub struct OversampledModel {
    pub h: CMat,
    pub g: RMat,
    pub z_list: Vec<RMat>,
    pub u: DVector<f64>,
    pub h_flat: CMat,
    pub delays: Vec<f64>,
    pub m: usize,
    pub n_symbols: usize,
}

impl OversampledModel {
    /// Model over `n_symbols` symbols at the initial rate `cfg.m_init`.
    /// Pass `cfg.window_len` for the per-window model.
    pub fn build(
        cfg: &SystemConfig,
        h_flat: &CMat,
        delays: &[f64],
        n_symbols: usize,
    ) -> Result<Self> {
        if h_flat.shape() != (cfg.n_rx, cfg.n_users) {
            return Err(Error::Dimension(format!(
                "flat channel is {:?}, expected {}x{}",
                h_flat.shape(),
                cfg.n_rx,
                cfg.n_users
            )));
        }
        if delays.len() != cfg.n_users {
            return Err(Error::Dimension(format!(
                "{} delays for {} users",
                delays.len(),
                cfg.n_users
            )));
        }
        let pulse = receive_pulse(cfg, n_symbols)?;
        let g = build_g(cfg, &pulse, n_symbols)?;
        let z_list = delays
            .iter()
            .map(|&d| build_z(cfg, &pulse, d, n_symbols))
            .collect::<Result<Vec<_>>>()?;
        let h = build_equivalent_channel(cfg.m_init, n_symbols, h_flat, &z_list)?;
        Ok(Self {
            h,
            g,
            z_list,
            u: oversampling_selector(cfg.m_init),
            h_flat: h_flat.clone(),
            delays: delays.to_vec(),
            m: cfg.m_init,
            n_symbols,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.h_flat.nrows()
    }

    pub fn n_users(&self) -> usize {
        self.h_flat.ncols()
    }

    /// Samples per antenna, `M N`.
    pub fn samples_per_antenna(&self) -> usize {
        self.m * self.n_symbols
    }

    /// `G Gᵀ`, the per-antenna filtered-noise correlation.
    pub fn noise_shape(&self) -> RMat {
        &self.g * self.g.transpose()
    }
}

/// Transmit symbols of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct TxBlock {
    pub x: CVec,
    pub modulation: Modulation,
}

/// Random draws for one trial.
#[derive(Debug, Clone)]
pub struct Realization {
    pub h_flat: CMat,
    pub delays: Vec<f64>,
    pub tx: TxBlock,
    /// Unfiltered noise, `3 M N N_r` entries.
    pub w: CVec,
}

/// RNG for trial `trial` of a campaign rooted at `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Circular complex Gaussian with total variance `var`.
pub fn complex_gaussian(rng: &mut impl Rng, var: f64) -> num_complex::Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(s * re, s * im)
}

/// Unit-energy QPSK point for a two-bit label (Gray mapped: bit 0 drives
/// the real sign, bit 1 the imaginary sign).
pub fn qpsk_symbol(bits: u8) -> num_complex::Complex64 {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    c(
        if bits & 1 == 0 { a } else { -a },
        if bits & 2 == 0 { a } else { -a },
    )
}

/// Draws the symbols of one block.
pub fn draw_symbols(rng: &mut impl Rng, n: usize, modulation: Modulation) -> TxBlock {
    let x = match modulation {
        Modulation::Qpsk => CVec::from_fn(n, |_, _| qpsk_symbol(rng.gen_range(0..4))),
        Modulation::Gaussian => CVec::from_fn(n, |_, _| complex_gaussian(rng, 1.0)),
    };
    TxBlock { x, modulation }
}

/// Draws channel, delays, symbols and noise, in that order.
///
/// The flat channel has unit-variance Rayleigh entries, delays are uniform
/// on `[-h, h]` with `h = delay_dist_halfwidth`, and the noise vector holds
/// `3 M N` unfiltered samples per antenna with variance `noise_var`.
pub fn draw_realization(
    cfg: &SystemConfig,
    modulation: Modulation,
    rng: &mut impl Rng,
) -> Realization {
    let h_flat = CMat::from_fn(cfg.n_rx, cfg.n_users, |_, _| complex_gaussian(rng, 1.0));
    let hw = cfg.delay_dist_halfwidth;
    let delays = (0..cfg.n_users)
        .map(|_| {
            if hw > 0.0 {
                rng.gen_range(-hw..=hw)
            } else {
                0.0
            }
        })
        .collect();
    let tx = draw_symbols(rng, cfg.block_len * cfg.n_users, modulation);
    let n_noise = 3 * cfg.m_init * cfg.block_len * cfg.n_rx;
    let w = CVec::from_fn(n_noise, |_, _| complex_gaussian(rng, cfg.noise_var));
    Realization {
        h_flat,
        delays,
        tx,
        w,
    }
}

/// Filtered noise `(I_{N_r} ⊗ G) w`.
pub fn filter_noise(g: &RMat, w: &CVec, n_rx: usize) -> Result<CVec> {
    let (rows, cols) = g.shape();
    if w.len() != cols * n_rx {
        return Err(Error::Dimension(format!(
            "noise has {} entries, expected {}",
            w.len(),
            cols * n_rx
        )));
    }
    let mut n = CVec::zeros(rows * n_rx);
    for a in 0..n_rx {
        for r in 0..rows {
            let mut acc = c(0.0, 0.0);
            // row r is supported on columns r..=r + cols - rows
            let lo = r;
            let hi = (r + cols - rows + 1).min(cols);
            for k in lo..hi {
                acc += w[a * cols + k] * g[(r, k)];
            }
            n[a * rows + r] = acc;
        }
    }
    Ok(n)
}

/// `y = H x + (I_{N_r} ⊗ G) w`.
pub fn simulate_rx(model: &OversampledModel, x: &CVec, w: &CVec) -> Result<CVec> {
    if x.len() != model.h.ncols() {
        return Err(Error::Dimension(format!(
            "x has {} entries, expected {}",
            x.len(),
            model.h.ncols()
        )));
    }
    let noise = filter_noise(&model.g, w, model.n_rx())?;
    Ok(&model.h * x + noise)
}
