use super::{Algorithm, ReductionMatrix, SubmatrixPartition};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};

/// Result of a restricted greedy search on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct RgsOutcome {
    /// Selected column for each row.
    pub selection: Vec<usize>,
    /// Best objective after each row update; `history[0]` is the objective
    /// of the initial pattern and `history[r]` the value after row `r`.
    pub history: Vec<f64>,
    /// Number of objective evaluations performed.
    pub evaluations: usize,
}

impl RgsOutcome {
    pub fn objective(&self) -> f64 {
        *self
            .history
            .last()
            .expect("history holds the initial objective")
    }
}

/// Restricted greedy search on one block of `n` samples.
///
/// Rows are visited in order. For row `r` the one is moved to each column
/// within `beta` of its current position that no row currently occupies,
/// and the best move is kept if it strictly improves the objective.
/// `initial_objective` may pass in an already known value for `init`.
pub fn rgs_block(
    objective: impl Fn(&[usize]) -> Option<f64>,
    init: &[usize],
    n: usize,
    beta: usize,
    initial_objective: Option<f64>,
) -> Result<RgsOutcome> {
    if init.iter().any(|&j| j >= n) {
        return Err(Error::Dimension(format!(
            "initial pattern leaves the block of {n} samples"
        )));
    }
    let mut evaluations = 0;
    let mut j = init.to_vec();
    let mut s_max = match initial_objective {
        Some(s) => s,
        None => {
            evaluations += 1;
            objective(&j).unwrap_or(f64::NEG_INFINITY)
        }
    };
    let mut history = Vec::with_capacity(j.len() + 1);
    history.push(s_max);
    let mut tmp = j.clone();
    for r in 0..j.len() {
        let jr = j[r];
        let lo = jr.saturating_sub(beta);
        let hi = (jr + beta).min(n - 1);
        let mut best = None;
        for cand in lo..=hi {
            if j.contains(&cand) {
                continue;
            }
            tmp[r] = cand;
            evaluations += 1;
            if let Some(s) = objective(&tmp) {
                if s > s_max {
                    s_max = s;
                    best = Some(cand);
                }
            }
        }
        if let Some(b) = best {
            j[r] = b;
        }
        tmp[r] = j[r];
        history.push(s_max);
    }
    if !s_max.is_finite() {
        return Err(Error::DegenerateSelection);
    }
    Ok(RgsOutcome {
        selection: j,
        history,
        evaluations,
    })
}

/// Submatrix-level restricted greedy search starting from `init`.
pub fn solve_slrgs(
    part: &SubmatrixPartition<'_>,
    init: &ReductionMatrix,
    beta: usize,
) -> Result<ReductionMatrix> {
    let global = init.selection().ok_or_else(|| {
        Error::Config("restricted greedy search needs a sample-selection start".into())
    })?;
    if beta == 0 {
        return Err(Error::Config("search range must be at least 1".into()));
    }
    let blocks = flops::in_phase(Phase::PatternDesign, || {
        (0..part.n_blocks)
            .map(|k| {
                let local = part.local_pattern(k, global)?;
                rgs_block(
                    |sel| part.block_objective(k, sel),
                    &local,
                    part.block_cols,
                    beta,
                    None,
                )
                .map(|o| o.selection)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    ReductionMatrix::from_selection(part.assemble(&blocks), part.problem, Algorithm::SlRgs)
}
