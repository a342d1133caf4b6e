//! Uniform and quasi-uniform initial sampling patterns.

use super::{Algorithm, RatioTraceProblem, ReductionMatrix};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Positions of the selected samples inside one Nyquist interval of `m`
/// samples when keeping `m_proc` of them.
///
/// The first sample of the interval is always kept. With `m_proc = 2` the
/// second one sits at `alpha` (default `ceil(m / m_proc)`); in general the
/// `q`-th one sits at `ceil(q m / m_proc)`, or `q alpha` when `alpha` is
/// given. When `m_proc` divides `m` all choices give the uniform pattern.
pub fn pattern_offsets(m: usize, m_proc: usize, alpha: Option<usize>) -> Result<Vec<usize>> {
    if m_proc == 0 || m_proc > m {
        return Err(Error::Config(format!(
            "cannot keep {m_proc} of {m} samples"
        )));
    }
    let offsets: Vec<usize> = (0..m_proc)
        .map(|q| match alpha {
            Some(a) => q * a,
            None => (q * m).div_ceil(m_proc),
        })
        .collect();
    for w in offsets.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::PatternCollision(w[1]));
        }
    }
    if let Some(&last) = offsets.last() {
        if last >= m {
            return Err(Error::PatternCollision(last));
        }
    }
    Ok(offsets)
}

/// Per-Nyquist-interval indicator, e.g. `[1, 0, 1, 0]` for `m = 4`,
/// `m_proc = 2`.
pub fn nyquist_pattern(m: usize, m_proc: usize, alpha: Option<usize>) -> Result<Vec<u8>> {
    let mut p = vec![0u8; m];
    for o in pattern_offsets(m, m_proc, alpha)? {
        p[o] = 1;
    }
    Ok(p)
}

/// Column selected by each of `rows` rows: row `r` picks
/// `m * floor(r / m_proc) + offset(r mod m_proc)`.
pub fn initial_pattern_columns(
    m: usize,
    m_proc: usize,
    alpha: Option<usize>,
    rows: usize,
) -> Result<Vec<usize>> {
    let offsets = pattern_offsets(m, m_proc, alpha)?;
    Ok((0..rows)
        .map(|r| m * (r / m_proc) + offsets[r % m_proc])
        .collect())
}

/// Initial selector with `m_rows` rows over `n` samples at the rates of
/// `cfg`.
pub fn initial_pattern(cfg: &SystemConfig, n: usize, m_rows: usize) -> Result<Vec<usize>> {
    if m_rows > n {
        return Err(Error::Config(format!("{m_rows} rows exceed {n} columns")));
    }
    let cols = initial_pattern_columns(cfg.m_init, cfg.m_proc, cfg.pattern_alpha, m_rows)?;
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::PatternCollision(bad));
    }
    Ok(cols)
}

/// Initial pattern as a reduction matrix for `problem`.
pub fn uniform_init(cfg: &SystemConfig, problem: &RatioTraceProblem) -> Result<ReductionMatrix> {
    let cols = initial_pattern(cfg, problem.dim(), problem.target_rows)?;
    ReductionMatrix::from_selection(cols, problem, Algorithm::UniformInit)
}
