//! Growing-window sample estimators and the oracle-approximating shrinkage
//! recursions applied to them.
//!
//! Two estimators share the same coefficient update:
//!
//! * the sample correlation vector between array data and beamformer output,
//!   shrunk toward its mean entry (`OasVectorState`);
//! * the sample covariance matrix, shrunk toward a scaled identity with the
//!   same trace (`OasMatrixState`).
//!
//! For snapshot index `i` and array size `M`, with `t1` the cross trace and
//! `t2` the squared trace of the shrunk estimate, the next coefficient is
//!
//! ```text
//! rho(i+1) = ((1 - 2/M) t1 + t2) / ((i + 1 - 2/M) t1 + (1 - i/M) t2)
//! ```
//!
//! clamped to `[0, 1]`. The vector branch never forms `diag(d)`; its traces
//! reduce to length-`M` sums.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitize, trace_of_product, trace_re, CMat, CVec};
use crate::scalar::Real;

/// Denominators below this magnitude hold the previous coefficient.
pub const DENOMINATOR_GUARD: f64 = 1e-30;
/// Relative size of an imaginary trace part that is reported as suspicious.
pub const IMAGINARY_TRACE_TOLERANCE: f64 = 1e-8;

/// Counters for numerically irregular coefficient updates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrinkageDiagnostics {
    /// Updates whose raw coefficient fell outside `[0, 1]`.
    pub clamps: usize,
    /// Updates skipped because the denominator vanished.
    pub denominator_guards: usize,
    /// Updates whose cross trace carried a non-negligible imaginary part.
    pub complex_traces: usize,
}

impl ShrinkageDiagnostics {
    pub fn merge(&mut self, other: &Self) {
        self.clamps += other.clamps;
        self.denominator_guards += other.denominator_guards;
        self.complex_traces += other.complex_traces;
    }
}

/// Raw and clamped outcome of one coefficient update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientUpdate<T> {
    pub value: T,
    pub raw: Option<T>,
    pub clamped: bool,
    pub guarded: bool,
}

/// Next shrinkage coefficient from the cross trace `t1` and squared trace `t2`.
pub fn next_coefficient<T: Real>(m: usize, i: usize, t1: T, t2: T, previous: T) -> CoefficientUpdate<T> {
    let m_f = T::of_usize(m);
    let i_f = T::of_usize(i);
    let two_over_m = T::of(2.0) / m_f;
    let num = (T::one() - two_over_m) * t1 + t2;
    let den = (i_f + T::one() - two_over_m) * t1 + (T::one() - i_f / m_f) * t2;
    if !(den.abs() >= T::of(DENOMINATOR_GUARD)) {
        return CoefficientUpdate {
            value: previous,
            raw: None,
            clamped: false,
            guarded: true,
        };
    }
    let raw = num / den;
    let value = raw.max(T::zero()).min(T::one());
    CoefficientUpdate {
        value,
        raw: Some(raw),
        clamped: value != raw,
        guarded: false,
    }
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if !(rho >= T::zero() && rho <= T::one()) {
        return Err(Error::Parameter(format!(
            "shrinkage coefficient must lie in [0, 1], got {rho}"
        )));
    }
    Ok(())
}

/// Shrinkage estimator of the data/output cross-correlation vector.
#[derive(Clone, Debug, PartialEq)]
pub struct OasVectorState<T: Real> {
    /// Running sum of `x(k) y*(k)`.
    pub scv_accum: CVec<T>,
    pub count: usize,
    /// Coefficient applied at the next step.
    pub rho: T,
    /// Latest shrunk estimate.
    pub d_hat: CVec<T>,
    pub diagnostics: ShrinkageDiagnostics,
}

impl<T: Real> OasVectorState<T> {
    pub fn new(num_sensors: usize, rho_init: T) -> Result<Self> {
        if num_sensors == 0 {
            return Err(Error::Parameter("num_sensors must be >= 1".into()));
        }
        check_rho(rho_init)?;
        Ok(Self {
            scv_accum: CVec::zeros(num_sensors),
            count: 0,
            rho: rho_init,
            d_hat: CVec::zeros(num_sensors),
            diagnostics: ShrinkageDiagnostics::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.scv_accum.len()
    }

    /// Accumulates `x y*`.
    pub fn scv_update(&mut self, x: &CVec<T>, y: Complex<T>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        self.scv_accum += x * y.conj();
        self.count += 1;
        Ok(())
    }

    /// Sample correlation vector `(1/i) sum_k x(k) y*(k)`.
    pub fn scv(&self) -> Result<CVec<T>> {
        if self.count == 0 {
            return Err(Error::State("sample correlation vector is empty".into()));
        }
        Ok(&self.scv_accum * Complex::new(T::one() / T::of_usize(self.count), T::zero()))
    }

    /// Shrinks the SCV toward its mean entry with the current coefficient and
    /// advances the coefficient. Returns `(d_hat, rho_next)`.
    pub fn step(&mut self) -> Result<(CVec<T>, T)> {
        let s = self.scv()?;
        let m = self.dim();
        let nu = s.iter().fold(Complex::new(T::zero(), T::zero()), |a, z| a + z)
            / Complex::new(T::of_usize(m), T::zero());
        let rho = self.rho;
        let d_hat = s.map(|sm| nu * rho + sm * (T::one() - rho));

        // tr(D S*) = sum d_m conj(s_m); tr(D) tr(D*) = |sum d_m|^2.
        let cross = d_hat
            .iter()
            .zip(s.iter())
            .fold(Complex::new(T::zero(), T::zero()), |a, (d, sm)| a + d * sm.conj());
        let tr_d = d_hat.iter().fold(Complex::new(T::zero(), T::zero()), |a, d| a + d);
        if cross.im.abs() > T::of(IMAGINARY_TRACE_TOLERANCE) * cross.norm_sqr().sqrt() {
            self.diagnostics.complex_traces += 1;
        }
        let update = next_coefficient(m, self.count, cross.re, tr_d.norm_sqr(), rho);
        self.record(&update);
        self.rho = update.value;
        self.d_hat = d_hat.clone();
        Ok((d_hat, update.value))
    }

    fn record(&mut self, u: &CoefficientUpdate<T>) {
        if u.guarded {
            self.diagnostics.denominator_guards += 1;
        }
        if u.clamped {
            self.diagnostics.clamps += 1;
        }
    }
}

/// Shrinkage estimator of the data covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OasMatrixState<T: Real> {
    /// Running sum of `x(k) x(k)^H`.
    pub scm_accum: CMat<T>,
    pub count: usize,
    pub rho0: T,
    /// Latest shrunk estimate.
    pub r_tilde: CMat<T>,
    pub diagnostics: ShrinkageDiagnostics,
}

impl<T: Real> OasMatrixState<T> {
    pub fn new(num_sensors: usize, rho_init: T) -> Result<Self> {
        if num_sensors == 0 {
            return Err(Error::Parameter("num_sensors must be >= 1".into()));
        }
        check_rho(rho_init)?;
        Ok(Self {
            scm_accum: CMat::zeros(num_sensors, num_sensors),
            count: 0,
            rho0: rho_init,
            r_tilde: CMat::zeros(num_sensors, num_sensors),
            diagnostics: ShrinkageDiagnostics::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.scm_accum.nrows()
    }

    /// Accumulates `x x^H`, keeping the accumulator exactly Hermitian.
    pub fn scm_update(&mut self, x: &CVec<T>) -> Result<()> {
        let m = self.dim();
        if x.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: x.len(),
            });
        }
        for c in 0..m {
            for r in c..m {
                let v = x[r] * x[c].conj();
                self.scm_accum[(r, c)] += v;
                if r != c {
                    self.scm_accum[(c, r)] += v.conj();
                } else {
                    self.scm_accum[(r, c)].im = T::zero();
                }
            }
        }
        self.count += 1;
        Ok(())
    }

    /// Sample covariance matrix `(1/i) sum_k x(k) x(k)^H`.
    pub fn scm(&self) -> Result<CMat<T>> {
        if self.count == 0 {
            return Err(Error::State("sample covariance matrix is empty".into()));
        }
        Ok(&self.scm_accum * Complex::new(T::one() / T::of_usize(self.count), T::zero()))
    }

    /// Shrinks the SCM toward `tr(R)/M I` with the current coefficient and
    /// advances the coefficient. Returns `(r_tilde, rho0_next)`.
    pub fn step(&mut self) -> Result<(CMat<T>, T)> {
        let r_hat = self.scm()?;
        let m = self.dim();
        let nu0 = trace_re(&r_hat) / T::of_usize(m);
        let rho0 = self.rho0;
        let mut r_tilde = &r_hat * Complex::new(T::one() - rho0, T::zero());
        for k in 0..m {
            r_tilde[(k, k)] += Complex::new(rho0 * nu0, T::zero());
        }
        let r_tilde = hermitize(&r_tilde);

        let cross = trace_of_product(&r_tilde, &r_hat);
        if cross.im.abs() > T::of(IMAGINARY_TRACE_TOLERANCE) * cross.norm_sqr().sqrt() {
            self.diagnostics.complex_traces += 1;
        }
        let tr = trace_re(&r_tilde);
        let update = next_coefficient(m, self.count, cross.re, tr * tr, rho0);
        if update.guarded {
            self.diagnostics.denominator_guards += 1;
        }
        if update.clamped {
            self.diagnostics.clamps += 1;
        }
        self.rho0 = update.value;
        self.r_tilde = r_tilde.clone();
        Ok((r_tilde, update.value))
    }
}

/// MSE-optimal coefficient for shrinking draws of a diagonal estimate toward
/// the scaled identity closest to `target`:
///
/// `rho = E||S - F||^2 / (||F - nu I||^2 + E||S - F||^2)`, `nu = tr(F)/M`,
///
/// with the expectation replaced by the average over `draws`. `target` and
/// every draw are the diagonals of `F` and `S`.
pub fn mse_optimal_coefficient<T: Real>(target: &CVec<T>, draws: &[CVec<T>]) -> Result<T> {
    if draws.is_empty() {
        return Err(Error::Parameter("need at least one draw".into()));
    }
    let m = target.len();
    if let Some(bad) = draws.iter().find(|d| d.len() != m) {
        return Err(Error::Dimension {
            expected: m,
            actual: bad.len(),
        });
    }
    let nu = target.iter().fold(Complex::new(T::zero(), T::zero()), |a, z| a + z)
        / Complex::new(T::of_usize(m), T::zero());
    let bias: T = target.iter().fold(T::zero(), |a, f| a + (f - nu).norm_sqr());
    let spread = draws
        .iter()
        .map(|s| (s - target).norm_squared())
        .fold(T::zero(), |a, v| a + v)
        / T::of_usize(draws.len());
    let den = bias + spread;
    if den <= T::zero() {
        return Ok(T::one());
    }
    Ok(spread / den)
}
