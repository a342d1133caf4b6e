use super::{Algorithm, RatioTraceProblem, ReductionMatrix};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};

pub const EXHAUSTIVE_MAX_N: usize = 16;
pub const EXHAUSTIVE_MAX_M: usize = 6;

/// Best `m`-subset of `0..n` (ascending) and its objective. Row order does
/// not affect the objective, so only subsets are enumerated.
pub fn exhaustive_selection(
    objective: impl Fn(&[usize]) -> Option<f64>,
    n: usize,
    m: usize,
) -> Result<(Vec<usize>, f64)> {
    if n > EXHAUSTIVE_MAX_N || m > EXHAUSTIVE_MAX_M {
        return Err(Error::SearchTooLarge { n, m });
    }
    if m == 0 || m > n {
        return Err(Error::Config(format!("cannot select {m} of {n}")));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        if let Some(s) = objective(&idx) {
            if best.as_ref().is_none_or(|(_, b)| s > *b) {
                best = Some((idx.clone(), s));
            }
        }
        // next combination in lexicographic order
        let mut i = m;
        while i > 0 && idx[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for k in i..m {
            idx[k] = idx[k - 1] + 1;
        }
    }
    best.ok_or(Error::DegenerateSelection)
}

/// Globally optimal sample selection by enumeration (small problems only).
pub fn solve_exhaustive(problem: &RatioTraceProblem) -> Result<ReductionMatrix> {
    let (sel, _) = flops::in_phase(Phase::PatternDesign, || {
        exhaustive_selection(
            |s| problem.selection_objective(s),
            problem.dim(),
            problem.target_rows,
        )
    })?;
    ReductionMatrix::from_selection(sel, problem, Algorithm::Exhaustive)
}
