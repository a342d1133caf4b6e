use super::{Algorithm, ReductionMatrix, SubmatrixPartition};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};

/// Backward feature selection on one block: start from all `n` samples
/// and repeatedly drop the row whose removal leaves the largest objective
/// until `keep` rows remain. Ties keep the earliest row; candidates with a
/// singular reduced `C_B` are skipped.
pub fn bfs_block(
    objective: impl Fn(&[usize]) -> Option<f64>,
    n: usize,
    keep: usize,
) -> Result<Vec<usize>> {
    if keep == 0 || keep > n {
        return Err(Error::Config(format!("cannot keep {keep} of {n} rows")));
    }
    let mut current: Vec<usize> = (0..n).collect();
    let mut trial = Vec::with_capacity(n);
    while current.len() > keep {
        let mut best: Option<(usize, f64)> = None;
        for rr in 0..current.len() {
            trial.clear();
            trial.extend(
                current
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != rr)
                    .map(|(_, &v)| v),
            );
            if let Some(s) = objective(&trial) {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((rr, s));
                }
            }
        }
        let (rr, _) = best.ok_or(Error::DegenerateSelection)?;
        current.remove(rr);
    }
    Ok(current)
}

/// Submatrix-level backward feature selection over every block.
pub fn solve_slbfs(part: &SubmatrixPartition<'_>) -> Result<ReductionMatrix> {
    let blocks = flops::in_phase(Phase::PatternDesign, || {
        (0..part.n_blocks)
            .map(|k| {
                bfs_block(
                    |sel| part.block_objective(k, sel),
                    part.block_cols,
                    part.block_rows,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    ReductionMatrix::from_selection(part.assemble(&blocks), part.problem, Algorithm::SlBfs)
}
