//! Complex dense linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` containers. Hermitian eigendecompositions and
//! large products go through `faer`; factorizations and solves stay in
//! `nalgebra`. Every kernel reports its operation count to [`crate::flops`].

use faer::complex_native::c64;
use faer::{Mat, Side};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::flops;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

/// Products below this size stay in `nalgebra`.
const FAER_MIN_DIM: usize = 48;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Replaces `x` by `(x + xᴴ) / 2`.
pub fn hermitize(x: &mut CMat) {
    let n = x.nrows();
    assert_eq!(n, x.ncols(), "hermitize needs a square matrix");
    for i in 0..n {
        x[(i, i)] = c(x[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (x[(i, j)] + x[(j, i)].conj()) * 0.5;
            x[(i, j)] = v;
            x[(j, i)] = v.conj();
        }
    }
}

fn to_faer(a: &CMat) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let v = a[(i, j)];
        c64::new(v.re, v.im)
    })
}

fn from_faer(a: faer::MatRef<'_, c64>) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let v = a.read(i, j);
        c(v.re, v.im)
    })
}

/// `a * b`.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "mul: inner dimensions differ");
    flops::matmul(a.nrows(), a.ncols(), b.ncols());
    if a.nrows().min(a.ncols()).min(b.ncols()) >= FAER_MIN_DIM {
        let p = to_faer(a) * to_faer(b);
        from_faer(p.as_ref())
    } else {
        a * b
    }
}

/// `a * bᴴ`.
pub fn mul_adj(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols(), "mul_adj: inner dimensions differ");
    flops::matmul(a.nrows(), a.ncols(), b.nrows());
    if a.nrows().min(a.ncols()).min(b.nrows()) >= FAER_MIN_DIM {
        let p = to_faer(a) * to_faer(b).adjoint();
        from_faer(p.as_ref())
    } else {
        a * b.adjoint()
    }
}

/// `aᴴ * b`.
pub fn adj_mul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "adj_mul: inner dimensions differ");
    flops::matmul(a.ncols(), a.nrows(), b.ncols());
    if a.nrows().min(a.ncols()).min(b.ncols()) >= FAER_MIN_DIM {
        let p = to_faer(a).adjoint() * to_faer(b);
        from_faer(p.as_ref())
    } else {
        a.adjoint() * b
    }
}

/// Matrix-vector product.
pub fn mul_vec(a: &CMat, x: &CVec) -> CVec {
    flops::matmul(a.nrows(), a.ncols(), 1);
    a * x
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

/// Hermitian eigendecomposition; only the lower triangle of `a` is read.
pub fn hermitian_eig(a: &CMat) -> HermitianEig {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eig needs a square matrix");
    flops::hermitian_eig(n);
    let evd = to_faer(a).selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    // faer returns ascending order
    let values = DVector::from_fn(n, |i, _| s.read(n - 1 - i).re);
    let vectors = CMat::from_fn(n, n, |i, j| {
        let v = u.read(i, n - 1 - j);
        c(v.re, v.im)
    });
    HermitianEig { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMat) -> f64 {
    let e = hermitian_eig(a);
    e.values[e.values.len() - 1]
}

/// Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(a: &CMat) -> Option<Cholesky<Complex64, Dyn>> {
    flops::cholesky(a.nrows());
    Cholesky::new(a.clone())
}

/// Solves `a x = b` for Hermitian positive-definite `a`.
pub fn solve_hpd(a: &CMat, b: &CMat) -> Option<CMat> {
    let ch = cholesky(a)?;
    flops::chol_solve(a.nrows(), b.ncols());
    let x = ch.solve(b);
    x.iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
        .then_some(x)
}

/// `Tr(b⁻¹ a)` for Hermitian positive-definite `b`.
pub fn trace_ratio(a: &CMat, b: &CMat) -> Option<f64> {
    let x = solve_hpd(b, a)?;
    flops::record(0, x.nrows() as u64);
    let t = x.trace().re;
    t.is_finite().then_some(t)
}

/// Natural log-determinant of a Hermitian positive-definite matrix.
pub fn log_det_hpd(a: &CMat) -> Option<f64> {
    let ch = cholesky(a)?;
    let l = ch.l_dirty();
    let mut s = 0.0;
    for i in 0..a.nrows() {
        let d = l[(i, i)].re;
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        s += d.ln();
    }
    flops::record(a.nrows() as u64, a.nrows() as u64);
    Some(2.0 * s)
}

/// Principal submatrix `a[idx, idx]`.
pub fn gather(a: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// Rows `a[idx, :]`.
pub fn gather_rows(a: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), a.ncols(), |i, j| a[(idx[i], j)])
}

/// Entries `x[idx]`.
pub fn gather_vec(x: &CVec, idx: &[usize]) -> CVec {
    CVec::from_fn(idx.len(), |i, _| x[idx[i]])
}

/// Largest entrywise magnitude.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Promotes a real matrix to complex.
pub fn complexify(a: &RMat) -> CMat {
    a.map(|v| c(v, 0.0))
}

/// Block-diagonal `I_k ⊗ a`.
pub fn kron_identity(k: usize, a: &CMat) -> CMat {
    let (r, s) = a.shape();
    let mut out = CMat::zeros(k * r, k * s);
    for b in 0..k {
        out.view_mut((b * r, b * s), (r, s)).copy_from(a);
    }
    out
}
