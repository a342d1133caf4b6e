use nalgebra::DVector;

use super::{Algorithm, RatioTraceProblem, Reduction, ReductionMatrix};
use crate::error::{Error, Result};
use crate::flops::{self, Phase};
use crate::linalg::{self, c, hermitize, CMat};

/// Eigenvalues of `C_B` below this are diagonally loaded.
const MIN_EIGENVALUE: f64 = 1e-12;

/// Generalized eigenpairs of the Hermitian-definite pencil `(C_A, C_B)`.
#[derive(Debug, Clone)]
pub struct GeneralizedEig {
    /// Eigenvalues in descending order.
    pub values: DVector<f64>,
    /// `C_B`-orthonormal eigenvectors as columns, in the same order.
    pub vectors: CMat,
    /// Whether `C_B` needed diagonal loading.
    pub loaded: bool,
}

/// Solves `C_A δ = λ C_B δ` by whitening with the eigendecomposition of
/// `C_B` and diagonalizing the whitened `C_A`.
pub fn generalized_eig(c_a: &CMat, c_b: &CMat) -> Result<GeneralizedEig> {
    let n = c_b.nrows();
    let eb = linalg::hermitian_eig(c_b);
    let max = eb.values[0].abs().max(f64::MIN_POSITIVE);
    let min = eb.values[n - 1];
    if min < -1e-9 * max {
        return Err(Error::NotPositiveDefinite(min));
    }
    let mut lambda_b = eb.values.clone();
    let loaded = min < MIN_EIGENVALUE;
    if loaded {
        // C_B + εI shares the eigenvectors of C_B
        let eps = 1e-10 * c_b.trace().re / n as f64;
        lambda_b
            .iter_mut()
            .for_each(|v| *v = v.max(0.0) + eps.max(MIN_EIGENVALUE));
    }
    let mut whiten = eb.vectors;
    for (j, mut col) in whiten.column_iter_mut().enumerate() {
        col *= c(1.0 / lambda_b[j].sqrt(), 0.0);
    }
    flops::record((n * n) as u64, 0);
    let mut a = linalg::adj_mul(&whiten, &linalg::mul(c_a, &whiten));
    hermitize(&mut a);
    let ea = linalg::hermitian_eig(&a);
    let vectors = linalg::mul(&whiten, &ea.vectors);
    Ok(GeneralizedEig {
        values: ea.values,
        vectors,
        loaded,
    })
}

/// Dense reduction matrix whose rows are the conjugated generalized
/// eigenvectors of the `target_rows` largest eigenvalues.
pub fn solve_gevd(problem: &RatioTraceProblem) -> Result<ReductionMatrix> {
    flops::in_phase(Phase::PatternDesign, || {
        let m = problem.target_rows;
        let ge = generalized_eig(&problem.c_a, &problem.c_b)?;
        let delta = ge.vectors.columns(0, m).adjoint();
        let objective = ge.values.rows(0, m).sum();
        if ge.loaded {
            log::warn!("GEVD: C_B was diagonally loaded");
        }
        Ok(ReductionMatrix {
            reduction: Reduction::Dense(delta),
            n_cols: problem.dim(),
            objective,
            algorithm: Algorithm::Gevd,
        })
    })
}
