//! Dense complex linear-algebra helpers built on nalgebra.
//!
//! Hermitian eigen-decompositions and factorizations are delegated to
//! nalgebra; this module only adds ordering, conditioning checks and the
//! handful of trace identities the estimators need.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex column vector.
pub type CVec<T> = DVector<Complex<T>>;
/// Complex dense matrix.
pub type CMat<T> = DMatrix<Complex<T>>;

/// Returns `(m + m^H) / 2`.
pub fn hermitize<T: Real>(m: &CMat<T>) -> CMat<T> {
    let half = Complex::new(T::of(0.5), T::zero());
    (m + m.adjoint()) * half
}

/// Real part of the trace.
pub fn trace_re<T: Real>(m: &CMat<T>) -> T {
    m.diagonal().iter().fold(T::zero(), |acc, z| acc + z.re)
}

/// `tr(A B)` without forming the product, O(M^2).
pub fn trace_of_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn frobenius_norm<T: Real>(m: &CMat<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

pub fn vec_norm<T: Real>(v: &CVec<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `u^H v`.
pub fn inner<T: Real>(u: &CVec<T>, v: &CVec<T>) -> Complex<T> {
    u.iter()
        .zip(v.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a.conj() * b
        })
}

/// `v v^H`.
pub fn outer<T: Real>(v: &CVec<T>) -> CMat<T> {
    v * v.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix sorted by descending eigenvalue.
///
/// Ties keep the solver's original column order. Returns the eigenvalues and
/// a matrix whose columns are the matching orthonormal eigenvectors.
pub fn hermitian_eigen_desc<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, unsorted.
pub fn hermitian_eigenvalues<T: Real>(m: &CMat<T>) -> Vec<T> {
    hermitize(m).symmetric_eigenvalues().iter().copied().collect()
}

/// Spectral norm of a Hermitian matrix, `max |lambda|`.
pub fn spectral_norm_hermitian<T: Real>(m: &CMat<T>) -> T {
    hermitian_eigenvalues(m)
        .into_iter()
        .fold(T::zero(), |acc, l| acc.max(l.abs()))
}

/// Solves `R z = b` for Hermitian positive-definite `R` via Cholesky.
///
/// Fails when the factorization breaks down or when the smallest pivot is
/// negligible next to the largest diagonal entry, which is how a
/// rank-deficient PSD matrix shows up in floating point.
pub fn solve_hpd<T: Real>(r: &CMat<T>, b: &CVec<T>) -> Result<CVec<T>> {
    check_square(r, b.len())?;
    let chol = Cholesky::new(hermitize(r))
        .ok_or_else(|| Error::Solver("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let mut min_pivot = T::max_value().unwrap_or_else(|| T::of(f64::MAX));
    for i in 0..l.nrows() {
        min_pivot = min_pivot.min(l[(i, i)].re * l[(i, i)].re);
    }
    let max_diag = r
        .diagonal()
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.re.abs()));
    if !(min_pivot > T::pivot_tolerance() * max_diag) {
        return Err(Error::Solver(format!(
            "matrix is numerically singular (pivot ratio {:e})",
            min_pivot / max_diag
        )));
    }
    let z = chol.solve(b);
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    Ok(z)
}

/// Solves `R z = b` by partially pivoted LU; only nonsingularity is required.
pub fn solve_general<T: Real>(r: &CMat<T>, b: &CVec<T>) -> Result<CVec<T>> {
    check_square(r, b.len())?;
    let z = r
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Solver("matrix is singular".into()))?;
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    Ok(z)
}

fn check_square<T: Real>(r: &CMat<T>, n: usize) -> Result<()> {
    if r.nrows() != r.ncols() {
        return Err(Error::Parameter(format!(
            "matrix is {}x{}, expected square",
            r.nrows(),
            r.ncols()
        )));
    }
    if r.nrows() != n {
        return Err(Error::Dimension {
            expected: r.nrows(),
            actual: n,
        });
    }
    Ok(())
}
