//! Design of the dimension-reduction matrix `Δ`.
//!
//! Every design maximizes the ratio trace `Tr(Δ C_A Δᴴ (Δ C_B Δᴴ)⁻¹)`,
//! either over dense complex `Δ` ([`solve_gevd`]) or over sample selectors
//! with a single one per row (the submatrix-level searches and the
//! exhaustive oracle).

mod bfs;
mod exhaustive;
mod gevd;
mod pattern;
mod rgs;
mod simplified;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use bfs::{bfs_block, solve_slbfs};
pub use exhaustive::{exhaustive_selection, solve_exhaustive, EXHAUSTIVE_MAX_M, EXHAUSTIVE_MAX_N};
pub use gevd::{generalized_eig, solve_gevd, GeneralizedEig};
pub use pattern::{
    initial_pattern, initial_pattern_columns, nyquist_pattern, pattern_offsets, uniform_init,
};
pub use rgs::{rgs_block, solve_slrgs, RgsOutcome};
pub use simplified::{solve_simplified, SimplifiedOutcome, Variant};

use crate::error::{Error, Result};
use crate::flops;
use crate::linalg::{self, hermitize, CMat, CVec};

/// Design algorithm that produced a reduction matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gevd,
    SlBfs,
    SlRgs,
    SimplifiedBfs,
    SimplifiedRgs,
    Exhaustive,
    UniformInit,
    Identity,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::Gevd => "gevd",
            Algorithm::SlBfs => "sl-bfs",
            Algorithm::SlRgs => "sl-rgs",
            Algorithm::SimplifiedBfs => "simplified-bfs",
            Algorithm::SimplifiedRgs => "simplified-rgs",
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::UniformInit => "uniform-init",
            Algorithm::Identity => "identity",
        };
        f.write_str(s)
    }
}

/// `max Tr(Δ C_A Δᴴ (Δ C_B Δᴴ)⁻¹)` over `Δ` with `target_rows` rows.
#[derive(Debug, Clone)]
pub struct RatioTraceProblem {
    pub c_a: CMat,
    pub c_b: CMat,
    pub target_rows: usize,
}

impl RatioTraceProblem {
    /// Builds a problem, symmetrizing both matrices.
    pub fn new(mut c_a: CMat, mut c_b: CMat, target_rows: usize) -> Result<Self> {
        let n = c_a.nrows();
        if c_a.shape() != (n, n) || c_b.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "C_A is {:?} and C_B is {:?}",
                c_a.shape(),
                c_b.shape()
            )));
        }
        if target_rows == 0 || target_rows > n {
            return Err(Error::Config(format!(
                "target_rows {target_rows} must lie in 1..={n}"
            )));
        }
        hermitize(&mut c_a);
        hermitize(&mut c_b);
        Ok(Self {
            c_a,
            c_b,
            target_rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.c_a.nrows()
    }

    /// Objective of a row selection; `None` if the reduced `C_B` is
    /// singular.
    pub fn selection_objective(&self, idx: &[usize]) -> Option<f64> {
        selection_objective(idx, &self.c_a, &self.c_b)
    }

    /// Same problem with both matrices scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = linalg::c(s, 0.0);
        Self {
            c_a: &self.c_a * f,
            c_b: &self.c_b * f,
            target_rows: self.target_rows,
        }
    }
}

/// Concrete form of a reduction matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Reduction {
    /// Dense complex `m x n` matrix.
    Dense(CMat),
    /// Row `r` selects input sample `idx[r]`.
    Selection(Vec<usize>),
}

/// A reduction matrix together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMatrix {
    pub reduction: Reduction,
    pub n_cols: usize,
    pub objective: f64,
    pub algorithm: Algorithm,
}

impl ReductionMatrix {
    /// Selector over `n` samples, with the objective evaluated on `problem`.
    pub fn from_selection(
        idx: Vec<usize>,
        problem: &RatioTraceProblem,
        algorithm: Algorithm,
    ) -> Result<Self> {
        validate_selection(&idx, problem.dim())?;
        let objective = flops::in_phase(flops::Phase::Evaluation, || {
            problem.selection_objective(&idx)
        })
        .ok_or(Error::DegenerateSelection)?;
        Ok(Self {
            reduction: Reduction::Selection(idx),
            n_cols: problem.dim(),
            objective,
            algorithm,
        })
    }

    /// The `n x n` identity, i.e. no reduction.
    pub fn identity(n: usize) -> Self {
        Self {
            reduction: Reduction::Selection((0..n).collect()),
            n_cols: n,
            objective: f64::NAN,
            algorithm: Algorithm::Identity,
        }
    }

    pub fn rows(&self) -> usize {
        match &self.reduction {
            Reduction::Dense(d) => d.nrows(),
            Reduction::Selection(idx) => idx.len(),
        }
    }

    pub fn is_sparse_binary(&self) -> bool {
        matches!(self.reduction, Reduction::Selection(_))
    }

    pub fn selection(&self) -> Option<&[usize]> {
        match &self.reduction {
            Reduction::Selection(idx) => Some(idx),
            Reduction::Dense(_) => None,
        }
    }

    pub fn to_dense(&self) -> CMat {
        match &self.reduction {
            Reduction::Dense(d) => d.clone(),
            Reduction::Selection(idx) => {
                let mut d = CMat::zeros(idx.len(), self.n_cols);
                for (r, &col) in idx.iter().enumerate() {
                    d[(r, col)] = linalg::c(1.0, 0.0);
                }
                d
            }
        }
    }

    /// `Δ v`. Selections gather without arithmetic.
    pub fn apply(&self, v: &CVec) -> CVec {
        match &self.reduction {
            Reduction::Dense(d) => linalg::mul_vec(d, v),
            Reduction::Selection(idx) => linalg::gather_vec(v, idx),
        }
    }

    /// `Δ C Δᴴ`.
    pub fn project(&self, c: &CMat) -> CMat {
        match &self.reduction {
            Reduction::Dense(d) => linalg::mul_adj(&linalg::mul(d, c), d),
            Reduction::Selection(idx) => linalg::gather(c, idx),
        }
    }

    /// `Δ X`.
    pub fn reduce_rows(&self, x: &CMat) -> CMat {
        match &self.reduction {
            Reduction::Dense(d) => linalg::mul(d, x),
            Reduction::Selection(idx) => linalg::gather_rows(x, idx),
        }
    }

    /// Re-evaluates the objective on `problem`.
    pub fn evaluate(&self, problem: &RatioTraceProblem) -> Result<f64> {
        ratio_trace_objective(&self.reduction, &problem.c_a, &problem.c_b)
    }
}

fn validate_selection(idx: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in idx {
        if i >= n {
            return Err(Error::Dimension(format!(
                "selected column {i} out of range 0..{n}"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::PatternCollision(i));
        }
    }
    Ok(())
}

/// `Tr(Δ C_A Δᴴ (Δ C_B Δᴴ)⁻¹)` for a selector, by gathering principal
/// submatrices.
pub fn selection_objective(idx: &[usize], c_a: &CMat, c_b: &CMat) -> Option<f64> {
    let a = linalg::gather(c_a, idx);
    let b = linalg::gather(c_b, idx);
    linalg::trace_ratio(&a, &b)
}

/// `Tr(Δ C_A Δᴴ (Δ C_B Δᴴ)⁻¹)`.
pub fn ratio_trace_objective(delta: &Reduction, c_a: &CMat, c_b: &CMat) -> Result<f64> {
    match delta {
        Reduction::Selection(idx) => {
            selection_objective(idx, c_a, c_b).ok_or(Error::DegenerateSelection)
        }
        Reduction::Dense(d) => {
            let a = linalg::mul_adj(&linalg::mul(d, c_a), d);
            let mut b = linalg::mul_adj(&linalg::mul(d, c_b), d);
            hermitize(&mut b);
            linalg::trace_ratio(&a, &b).ok_or(Error::DegenerateSelection)
        }
    }
}

/// Method used to design a reduction matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    /// Keep every sample (`Δ = I`).
    Identity,
    UniformInit,
    Gevd,
    SlBfs,
    SlRgs,
    SimplifiedBfs,
    SimplifiedRgs,
    Exhaustive,
}

impl Design {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Design::Identity => Algorithm::Identity,
            Design::UniformInit => Algorithm::UniformInit,
            Design::Gevd => Algorithm::Gevd,
            Design::SlBfs => Algorithm::SlBfs,
            Design::SlRgs => Algorithm::SlRgs,
            Design::SimplifiedBfs => Algorithm::SimplifiedBfs,
            Design::SimplifiedRgs => Algorithm::SimplifiedRgs,
            Design::Exhaustive => Algorithm::Exhaustive,
        }
    }
}

/// Designs `Δ` for `problem` with the submatrix count, search range and
/// pattern offset taken from `cfg`.
pub fn design_reduction(
    cfg: &crate::config::SystemConfig,
    problem: &RatioTraceProblem,
    design: Design,
) -> Result<ReductionMatrix> {
    let part = || SubmatrixPartition::new(problem, cfg.n_submatrices);
    match design {
        Design::Identity => {
            if problem.target_rows != problem.dim() {
                return Err(Error::Config(format!(
                    "identity reduction needs m_proc = m_init, got {} of {} rows",
                    problem.target_rows,
                    problem.dim()
                )));
            }
            Ok(ReductionMatrix::identity(problem.dim()))
        }
        Design::UniformInit => uniform_init(cfg, problem),
        Design::Gevd => solve_gevd(problem),
        Design::SlBfs => solve_slbfs(&part()?),
        Design::SlRgs => solve_slrgs(&part()?, &uniform_init(cfg, problem)?, cfg.search_range),
        Design::SimplifiedBfs => {
            Ok(solve_simplified(&part()?, &uniform_init(cfg, problem)?, Variant::Bfs)?.matrix)
        }
        Design::SimplifiedRgs => Ok(solve_simplified(
            &part()?,
            &uniform_init(cfg, problem)?,
            Variant::Rgs {
                beta: cfg.search_range,
            },
        )?
        .matrix),
        Design::Exhaustive => solve_exhaustive(problem),
    }
}

impl RatioTraceProblem {
    /// Ratio-trace problem of the quantized statistics: `C_A = C_{y_Q}`,
    /// `C_B = C_{n'}`, keeping `target_rows` samples.
    pub fn from_stats(
        stats: &crate::quantization::QuantizedStatistics,
        target_rows: usize,
    ) -> Result<Self> {
        Self::new(stats.c_yq.clone(), stats.c_nprime.clone(), target_rows)
    }
}

/// Block-diagonal split of a ratio-trace problem into `k` equal
/// contiguous blocks.
#[derive(Debug, Clone, Copy)]
pub struct SubmatrixPartition<'a> {
    pub problem: &'a RatioTraceProblem,
    pub n_blocks: usize,
    pub block_cols: usize,
    pub block_rows: usize,
}

impl<'a> SubmatrixPartition<'a> {
    pub fn new(problem: &'a RatioTraceProblem, n_blocks: usize) -> Result<Self> {
        let n = problem.dim();
        let m = problem.target_rows;
        if n_blocks == 0 || !n.is_multiple_of(n_blocks) || !m.is_multiple_of(n_blocks) {
            return Err(Error::Config(format!(
                "{n_blocks} submatrices do not split a {m}x{n} reduction evenly"
            )));
        }
        Ok(Self {
            problem,
            n_blocks,
            block_cols: n / n_blocks,
            block_rows: m / n_blocks,
        })
    }

    /// Objective of block `k` for block-local column indices.
    pub fn block_objective(&self, k: usize, local: &[usize]) -> Option<f64> {
        let off = k * self.block_cols;
        let global: Vec<usize> = local.iter().map(|&i| i + off).collect();
        self.problem.selection_objective(&global)
    }

    /// Block-local part of a global selection.
    pub fn local_pattern(&self, k: usize, global: &[usize]) -> Result<Vec<usize>> {
        if global.len() != self.problem.target_rows {
            return Err(Error::Dimension(format!(
                "pattern has {} rows, expected {}",
                global.len(),
                self.problem.target_rows
            )));
        }
        let off = k * self.block_cols;
        global[k * self.block_rows..(k + 1) * self.block_rows]
            .iter()
            .map(|&g| {
                g.checked_sub(off)
                    .filter(|&l| l < self.block_cols)
                    .ok_or_else(|| Error::Config(format!("pattern column {g} leaves block {k}")))
            })
            .collect()
    }

    /// `blkdiag(Δ_1, ..., Δ_K)` as a global selection.
    pub fn assemble(&self, blocks: &[Vec<usize>]) -> Vec<usize> {
        blocks
            .iter()
            .enumerate()
            .flat_map(|(k, b)| b.iter().map(move |&l| l + k * self.block_cols))
            .collect()
    }
}
