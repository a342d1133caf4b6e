//! 1-bit quantization and the second-order statistics of the quantized
//! signal (Bussgang gain, arcsin law, effective noise).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flops;
use crate::linalg::{c, complexify, hermitize, mul_adj, CMat, CVec, RMat};
use crate::signal_model::OversampledModel;

/// Arguments of the arcsin law may overshoot unit magnitude by this much
/// before being treated as a conditioning failure.
pub const ASIN_TOLERANCE: f64 = 1e-8;

/// Sign quantizer applied separately to the real and imaginary parts, with
/// outputs in `{±1/√2}`. Zero maps to the positive level.
pub fn quantize_1bit(y: &CVec) -> CVec {
    let s = |v: f64| {
        if v >= 0.0 {
            FRAC_1_SQRT_2
        } else {
            -FRAC_1_SQRT_2
        }
    };
    y.map(|v| c(s(v.re), s(v.im)))
}

/// Received-signal covariance `H Hᴴ + σ² (I_{N_r} ⊗ G Gᵀ)`.
pub fn cov_received(model: &OversampledModel, noise_var: f64) -> CMat {
    let mut cy = mul_adj(&model.h, &model.h);
    let cn = noise_cov(model, noise_var);
    cy += cn;
    hermitize(&mut cy);
    cy
}

/// Filtered-noise covariance `σ² (I_{N_r} ⊗ G Gᵀ)`.
pub fn noise_cov(model: &OversampledModel, noise_var: f64) -> CMat {
    let ggt: RMat = model.noise_shape() * noise_var;
    crate::linalg::kron_identity(model.n_rx(), &complexify(&ggt))
}

/// Diagonal Bussgang quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Bussgang {
    /// `diag(C_y)^{-1/2}`.
    pub k_norm: DVector<f64>,
    /// Diagonal of `A = √(2/π) K`.
    pub gain: DVector<f64>,
}

/// Bussgang gain of the 1-bit quantizer for input covariance `cy`.
///
/// Because `C_{y_Q y} = √(2/π) K C_y`, the operator `C_{y_Q y} C_y⁻¹`
/// reduces to the diagonal `√(2/π) K` and no inverse is formed.
pub fn bussgang(cy: &CMat) -> Result<Bussgang> {
    let n = cy.nrows();
    let mut k = DVector::zeros(n);
    for i in 0..n {
        let d = cy[(i, i)].re;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::DegenerateSignal { index: i, value: d });
        }
        k[i] = 1.0 / d.sqrt();
    }
    let gain = &k * (2.0 / PI).sqrt();
    Ok(Bussgang { k_norm: k, gain })
}

fn clamp_unit(v: f64, row: usize, col: usize) -> Result<f64> {
    if v.abs() > 1.0 + ASIN_TOLERANCE || !v.is_finite() {
        return Err(Error::Conditioning { row, col, value: v });
    }
    Ok(v.clamp(-1.0, 1.0))
}

/// Arcsin law: `(2/π) (asin(K C_yᴿ K) + j asin(K C_yᴵ K))`.
pub fn arcsin_cov(cy: &CMat) -> Result<CMat> {
    let b = bussgang(cy)?;
    let k = &b.k_norm;
    let n = cy.nrows();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = c(1.0, 0.0);
        for j in (i + 1)..n {
            let v = cy[(i, j)] * (k[i] * k[j]);
            let re = clamp_unit(v.re, i, j)?.asin();
            let im = clamp_unit(v.im, i, j)?.asin();
            let q = Complex64::new(re, im) * (2.0 / PI);
            out[(i, j)] = q;
            out[(j, i)] = q.conj();
        }
    }
    Ok(out)
}

/// `D X D` for a real diagonal `D`.
pub fn scale_both(x: &CMat, d: &DVector<f64>) -> CMat {
    flops::record((x.len() * 2) as u64, 0);
    CMat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * (d[i] * d[j]))
}

/// `D X` for a real diagonal `D`.
pub fn scale_rows(x: &CMat, d: &DVector<f64>) -> CMat {
    flops::record(x.len() as u64, 0);
    CMat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * d[i])
}

/// Distortion covariance `C_{n_q} = C_{y_Q} - A C_y Aᴴ`.
pub fn distortion_cov(cyq: &CMat, cy: &CMat, gain: &DVector<f64>) -> CMat {
    let mut cnq = cyq - scale_both(cy, gain);
    hermitize(&mut cnq);
    cnq
}

/// Effective noise covariance `C_{n'} = A C_n Aᴴ + C_{n_q}`.
pub fn effective_noise_cov(cnq: &CMat, cn: &CMat, gain: &DVector<f64>) -> CMat {
    let mut out = scale_both(cn, gain) + cnq;
    hermitize(&mut out);
    out
}

/// Second-order statistics of the quantized received signal for one
/// channel realization.
#[derive(Debug, Clone)]
pub struct QuantizedStatistics {
    pub c_y: CMat,
    pub k_norm: DVector<f64>,
    /// Diagonal of the Bussgang operator `A`.
    pub a_diag: DVector<f64>,
    pub c_yq: CMat,
    pub c_nq: CMat,
    pub c_nprime: CMat,
    /// Cross-covariance between quantized samples and symbols, `A H`.
    pub c_yqx: CMat,
}

impl QuantizedStatistics {
    /// Computes every statistic for `model` at noise variance `noise_var`.
    pub fn compute(model: &OversampledModel, noise_var: f64) -> Result<Self> {
        flops::in_phase(flops::Phase::Statistics, || {
            let c_n = noise_cov(model, noise_var);
            let mut c_y = mul_adj(&model.h, &model.h) + &c_n;
            hermitize(&mut c_y);
            Self::from_parts(&model.h, c_y, &c_n)
        })
    }

    /// Statistics from an explicit channel, received covariance and noise
    /// covariance.
    pub fn from_parts(h: &CMat, c_y: CMat, c_n: &CMat) -> Result<Self> {
        if c_y.nrows() != h.nrows() || c_n.shape() != c_y.shape() {
            return Err(Error::Dimension(format!(
                "channel has {} rows, C_y is {:?}, C_n is {:?}",
                h.nrows(),
                c_y.shape(),
                c_n.shape()
            )));
        }
        let b = bussgang(&c_y)?;
        let c_yq = arcsin_cov(&c_y)?;
        let c_nq = distortion_cov(&c_yq, &c_y, &b.gain);
        let c_nprime = effective_noise_cov(&c_nq, c_n, &b.gain);
        let c_yqx = scale_rows(h, &b.gain);
        Ok(Self {
            c_y,
            k_norm: b.k_norm,
            a_diag: b.gain,
            c_yq,
            c_nq,
            c_nprime,
            c_yqx,
        })
    }

    /// Signal part `C_{y_Q} - C_{n'}`, equal to `(2/π) K H Hᴴ K`.
    pub fn signal_cov(&self) -> CMat {
        let mut s = &self.c_yq - &self.c_nprime;
        hermitize(&mut s);
        s
    }

    pub fn dim(&self) -> usize {
        self.c_y.nrows()
    }
}

/// Statistics for one window of `window_len` symbols; `h_win` is the
/// equivalent channel of the window model.
pub fn window_stats(
    window_model: &OversampledModel,
    noise_var: f64,
) -> Result<QuantizedStatistics> {
    QuantizedStatistics::compute(window_model, noise_var)
}
