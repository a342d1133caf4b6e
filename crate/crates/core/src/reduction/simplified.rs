use super::{bfs_block, rgs_block, Algorithm, ReductionMatrix, SubmatrixPartition};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};

/// Which search the simplified scheme runs on its chosen block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Bfs,
    Rgs { beta: usize },
}

/// Simplified submatrix-level selection and the block it optimized.
#[derive(Debug, Clone)]
pub struct SimplifiedOutcome {
    pub matrix: ReductionMatrix,
    pub chosen_block: usize,
    /// Initial-pattern objective of every block.
    pub block_scores: Vec<f64>,
}

/// Optimizes only the block whose initial pattern scores lowest and
/// replicates its pattern to every block.
pub fn solve_simplified(
    part: &SubmatrixPartition<'_>,
    init: &ReductionMatrix,
    variant: Variant,
) -> Result<SimplifiedOutcome> {
    let global = init
        .selection()
        .ok_or_else(|| Error::Config("simplified search needs a sample-selection start".into()))?;
    let (pattern, chosen_block, block_scores) =
        flops::in_phase(Phase::PatternDesign, || -> Result<_> {
            let locals = (0..part.n_blocks)
                .map(|k| part.local_pattern(k, global))
                .collect::<Result<Vec<_>>>()?;
            let scores: Vec<f64> = locals
                .iter()
                .enumerate()
                .map(|(k, l)| part.block_objective(k, l).unwrap_or(f64::NEG_INFINITY))
                .collect();
            let mut chosen = 0;
            for (k, s) in scores.iter().enumerate() {
                if *s < scores[chosen] {
                    chosen = k;
                }
            }
            let objective = |sel: &[usize]| part.block_objective(chosen, sel);
            let pattern = match variant {
                Variant::Bfs => bfs_block(objective, part.block_cols, part.block_rows)?,
                Variant::Rgs { beta } => {
                    let known = scores[chosen].is_finite().then_some(scores[chosen]);
                    rgs_block(objective, &locals[chosen], part.block_cols, beta, known)?.selection
                }
            };
            Ok((pattern, chosen, scores))
        })?;
    let blocks = vec![pattern; part.n_blocks];
    let algorithm = match variant {
        Variant::Bfs => Algorithm::SimplifiedBfs,
        Variant::Rgs { .. } => Algorithm::SimplifiedRgs,
    };
    let matrix = ReductionMatrix::from_selection(part.assemble(&blocks), part.problem, algorithm)?;
    Ok(SimplifiedOutcome {
        matrix,
        chosen_block,
        block_scores,
    })
}
