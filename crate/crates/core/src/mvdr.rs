//! Minimum-variance distortionless-response weights and the reference
//! beamformers (sample matrix inversion, clairvoyant optimum).

use nalgebra::Cholesky;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_desc, hermitize, inner, solve_general, solve_hpd, trace_re, vec_norm, CMat, CVec};
use crate::scalar::Real;

fn normalize_distortionless<T: Real>(z: CVec<T>, a: &CVec<T>) -> Result<CVec<T>> {
    let q = inner(a, &z);
    if !(q.norm_sqr().sqrt() > T::zero()) || !q.re.is_finite() {
        return Err(Error::Solver(format!(
            "distortionless normalization a^H R^-1 a = {q} is unusable"
        )));
    }
    Ok(z / q)
}

fn check_nonzero<T: Real>(a: &CVec<T>) -> Result<()> {
    if !(vec_norm(a) > T::zero()) {
        return Err(Error::Parameter("steering vector is zero".into()));
    }
    Ok(())
}

/// `w = R^-1 a / (a^H R^-1 a)` for Hermitian positive-definite `R`.
///
/// Uses a Cholesky solve; indefinite or numerically singular `R` is reported
/// as [`Error::Solver`].
pub fn mvdr_weights<T: Real>(r: &CMat<T>, a: &CVec<T>) -> Result<CVec<T>> {
    check_nonzero(a)?;
    let z = solve_hpd(r, a)?;
    normalize_distortionless(z, a)
}

/// Which factorization produced a set of MVDR weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorization {
    Cholesky,
    /// Pivoted LU, used when the Hermitian matrix is nonsingular but indefinite.
    Lu,
}

/// MVDR weights for a Hermitian matrix that is only required to be
/// nonsingular: Cholesky first, pivoted LU when Cholesky rejects the matrix.
pub fn mvdr_weights_nonsingular<T: Real>(
    r: &CMat<T>,
    a: &CVec<T>,
) -> Result<(CVec<T>, Factorization)> {
    match mvdr_weights(r, a) {
        Ok(w) => Ok((w, Factorization::Cholesky)),
        Err(Error::Solver(_)) => {
            let z = solve_general(r, a)?;
            Ok((normalize_distortionless(z, a)?, Factorization::Lu))
        }
        Err(e) => Err(e),
    }
}

/// SMI weights and whether the fallback load was needed.
#[derive(Clone, Debug, PartialEq)]
pub struct SmiSolution<T: Real> {
    pub weights: CVec<T>,
    /// Load actually applied when the requested one left the SCM singular.
    pub fallback_load: Option<T>,
}

/// Relative diagonal load applied when the SCM cannot be inverted.
pub const SMI_FALLBACK_LOAD: f64 = 1e-8;

/// Sample-matrix-inversion beamformer `MVDR(scm + load I, a_presumed)`.
///
/// When the solve fails (for instance with fewer snapshots than sensors) the
/// load is replaced by `1e-8 tr(scm) / M`.
pub fn smi_weights<T: Real>(scm: &CMat<T>, a_presumed: &CVec<T>, diagonal_load: T) -> Result<SmiSolution<T>> {
    let m = scm.nrows();
    let loaded = |load: T| {
        let mut r = scm.clone();
        for k in 0..m {
            r[(k, k)] += Complex::new(load, T::zero());
        }
        r
    };
    match mvdr_weights(&loaded(diagonal_load), a_presumed) {
        Ok(weights) => Ok(SmiSolution {
            weights,
            fallback_load: None,
        }),
        Err(Error::Solver(_)) => {
            let load = T::of(SMI_FALLBACK_LOAD) * trace_re(scm) / T::of_usize(m);
            let weights = mvdr_weights(&loaded(diagonal_load + load), a_presumed)?;
            Ok(SmiSolution {
                weights,
                fallback_load: Some(load),
            })
        }
        Err(e) => Err(e),
    }
}

/// Clairvoyant MVDR weights from the true INC matrix and steering vector.
pub fn optimal_weights<T: Real>(true_inc: &CMat<T>, true_steering: &CVec<T>) -> Result<CVec<T>> {
    mvdr_weights(true_inc, true_steering)
}

/// Steering direction whose MVDR beamformer maximizes
/// `w^H R_s w / w^H R_in w` for a desired covariance of any rank.
///
/// Returns `R_in u` where `u` is the principal generalized eigenvector of
/// the pencil `(R_s, R_in)`. For rank-one `R_s = s a a^H` this is parallel to
/// `a`.
pub fn max_sinr_steering<T: Real>(desired_cov: &CMat<T>, inc: &CMat<T>) -> Result<CVec<T>> {
    let chol = Cholesky::new(hermitize(inc))
        .ok_or_else(|| Error::Solver("INC matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv_rs = l
        .solve_lower_triangular(desired_cov)
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let whitened = l
        .solve_lower_triangular(&linv_rs.adjoint())
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let (_, vecs) = hermitian_eigen_desc(&whitened);
    let u = vecs.column(0).into_owned();
    let w = l
        .adjoint()
        .solve_upper_triangular(&u)
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    Ok(inc * w)
}
