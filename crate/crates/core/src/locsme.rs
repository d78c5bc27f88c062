//! Shrinkage-based steering-vector and interference-plus-noise estimation:
//! the per-snapshot robust beamformer.
//!
//! Each snapshot runs one pass of the following pipeline:
//!
//! 1. beamformer output `y(i) = w(i-1)^H x(i)` with `w(0) = 1`;
//! 2. update the sample covariance matrix and the sample correlation vector;
//! 3. shrink the correlation vector to `d(i)` and project it onto the
//!    angular-sector subspace, `a(i) = P d(i) / ||P d(i)||`;
//! 4. shrink the covariance matrix to `R~(i)`;
//! 5. estimate the desired power from `|a^H x|^2`;
//! 6. load `R~` by its spectral norm, subtract the desired covariance and
//!    rescale to spectral norm `2 sigma_n^2`;
//! 7. MVDR weights from the resulting INC estimate and `a(i)`.

use std::collections::VecDeque;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::array_model::Scenario;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_desc, hermitize, inner, outer, spectral_norm_hermitian, vec_norm, CMat, CVec};
use crate::mvdr::{mvdr_weights_nonsingular, Factorization};
use crate::scalar::Real;
use crate::shrinkage::{OasMatrixState, OasVectorState, ShrinkageDiagnostics};

/// Norms below this are treated as zero by the steering and INC estimators.
pub const DEGENERACY_THRESHOLD: f64 = 1e-30;

/// Orthogonal projector onto the span of the `rank` principal eigenvectors of
/// a sector matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionOperator<T: Real> {
    pub matrix: CMat<T>,
    pub rank: usize,
}

impl<T: Real> ProjectionOperator<T> {
    /// Builds `P = U U^H` from the `p` eigenvectors of `c` with the largest
    /// eigenvalues.
    pub fn from_sector(c: &CMat<T>, p: usize) -> Result<Self> {
        let m = c.nrows();
        if c.ncols() != m {
            return Err(Error::Parameter("sector matrix must be square".into()));
        }
        if p < 1 || p > m {
            return Err(Error::Parameter(format!(
                "subspace rank must be in [1, {m}], got {p}"
            )));
        }
        let (_, vecs) = hermitian_eigen_desc(c);
        let u = vecs.columns(0, p);
        let matrix = hermitize(&(u * u.adjoint()));
        Ok(Self { matrix, rank: p })
    }

    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        &self.matrix * v
    }
}

/// Unit-norm steering estimate `P d / ||P d||`.
pub fn estimate_steering<T: Real>(projection: &ProjectionOperator<T>, d_hat: &CVec<T>) -> Result<CVec<T>> {
    if d_hat.len() != projection.matrix.nrows() {
        return Err(Error::Dimension {
            expected: projection.matrix.nrows(),
            actual: d_hat.len(),
        });
    }
    let pd = projection.apply(d_hat);
    let norm = vec_norm(&pd);
    if !(norm >= T::of(DEGENERACY_THRESHOLD)) {
        return Err(Error::DegenerateSteering {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(pd / Complex::new(norm, T::zero()))
}

/// Instantaneous desired-power estimate
/// `(|a^H x|^2 - a^H a sigma_n^2) / |a^H a|^2`, clamped at zero.
pub fn estimate_power<T: Real>(a_hat: &CVec<T>, x: &CVec<T>, noise_power: T) -> T {
    let aa = a_hat.norm_squared();
    if !(aa > T::zero()) {
        return T::zero();
    }
    let num = inner(a_hat, x).norm_sqr() - aa * noise_power;
    (num / (aa * aa)).max(T::zero())
}

/// INC estimate in three steps: `R <- R + ||R||_2 I`, subtract
/// `sigma1 a a^H`, rescale to spectral norm `2 sigma_n^2`.
pub fn build_inc<T: Real>(r_tilde: &CMat<T>, a_hat: &CVec<T>, sigma1_sq_hat: T, noise_power: T) -> Result<CMat<T>> {
    let m = r_tilde.nrows();
    let mut loaded = r_tilde.clone();
    let load = spectral_norm_hermitian(r_tilde);
    for k in 0..m {
        loaded[(k, k)] += Complex::new(load, T::zero());
    }
    let inc = subtract_desired(&loaded, a_hat, sigma1_sq_hat);
    let norm = spectral_norm_hermitian(&inc);
    if !(norm >= T::of(DEGENERACY_THRESHOLD)) {
        return Err(Error::DegenerateMatrix {
            norm: norm.to_f64_lossy(),
        });
    }
    let scale = T::of(2.0) * noise_power / norm;
    Ok(inc * Complex::new(scale, T::zero()))
}

/// `R - sigma1 a a^H`, the INC estimate without loading or rescaling.
pub fn subtract_desired<T: Real>(r: &CMat<T>, a_hat: &CVec<T>, sigma1_sq_hat: T) -> CMat<T> {
    hermitize(&(r - outer(a_hat) * Complex::new(sigma1_sq_hat, T::zero())))
}

/// Knobs of the beamformer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocsmeConfig<T> {
    /// Initial shrinkage coefficient of both recursions. 1 is an exact fixed
    /// point of the updates, so the default sits inside (0, 1).
    pub rho_init: T,
    /// Spectral-norm loading before, and rescaling after, the desired-signal
    /// subtraction. Disabling it leaves `R~ - sigma1 a a^H`.
    pub norm_loading: bool,
    /// Number of most recent instantaneous power estimates averaged (1 = none).
    pub power_window: usize,
}

impl<T: Real> Default for LocsmeConfig<T> {
    fn default() -> Self {
        Self {
            rho_init: T::of(0.5),
            norm_loading: true,
            power_window: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocsmeDiagnostics {
    pub vector_shrinkage: ShrinkageDiagnostics,
    pub matrix_shrinkage: ShrinkageDiagnostics,
    /// Snapshots where the projected correlation vector vanished and the
    /// presumed steering vector was used instead.
    pub steering_fallbacks: usize,
    /// Snapshots whose INC estimate was indefinite and needed an LU solve.
    pub indefinite_solves: usize,
}

/// Per-snapshot intermediate quantities, mostly for inspection and tests.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotTrace<T: Real> {
    pub output: Complex<T>,
    pub d_hat: CVec<T>,
    pub rho_used: T,
    pub rho0_used: T,
    pub r_tilde: CMat<T>,
}

/// Complete beamformer state for one data stream.
#[derive(Clone, Debug)]
pub struct LocsmeBeamformer<T: Real> {
    pub projection: ProjectionOperator<T>,
    pub vec_state: OasVectorState<T>,
    pub mat_state: OasMatrixState<T>,
    pub a_hat: CVec<T>,
    pub sigma1_sq_hat: T,
    pub inc_hat: CMat<T>,
    pub weights: CVec<T>,
    pub noise_power: T,
    presumed_unit: CVec<T>,
    config: LocsmeConfig<T>,
    power_history: VecDeque<T>,
    diagnostics: LocsmeDiagnostics,
}

impl<T: Real> LocsmeBeamformer<T> {
    /// Initial state: empty accumulators, `w(0) = 1`, coefficients at
    /// `config.rho_init`.
    pub fn new(
        projection: ProjectionOperator<T>,
        presumed_steering: &CVec<T>,
        noise_power: T,
        config: LocsmeConfig<T>,
    ) -> Result<Self> {
        let m = projection.matrix.nrows();
        if presumed_steering.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: presumed_steering.len(),
            });
        }
        if !(noise_power > T::zero()) {
            return Err(Error::Parameter("noise power must be > 0".into()));
        }
        if config.power_window == 0 {
            return Err(Error::Parameter("power_window must be >= 1".into()));
        }
        let norm = vec_norm(presumed_steering);
        if !(norm > T::zero()) {
            return Err(Error::Parameter("presumed steering vector is zero".into()));
        }
        let presumed_unit = presumed_steering / Complex::new(norm, T::zero());
        Ok(Self {
            vec_state: OasVectorState::new(m, config.rho_init)?,
            mat_state: OasMatrixState::new(m, config.rho_init)?,
            a_hat: presumed_unit.clone(),
            sigma1_sq_hat: T::zero(),
            inc_hat: CMat::identity(m, m),
            weights: CVec::from_element(m, Complex::new(T::one(), T::zero())),
            noise_power,
            presumed_unit,
            projection,
            power_history: VecDeque::with_capacity(config.power_window),
            config,
            diagnostics: LocsmeDiagnostics::default(),
        })
    }

    /// Builds the sector projector and presumed steering from a scenario.
    pub fn from_scenario(scenario: &Scenario, config: LocsmeConfig<T>) -> Result<Self> {
        scenario.validate()?;
        let c = scenario.sector_matrix::<T>()?;
        let projection = ProjectionOperator::from_sector(&c, scenario.subspace_rank)?;
        Self::new(
            projection,
            &scenario.presumed_steering()?,
            T::of(scenario.noise_power),
            config,
        )
    }

    pub fn num_sensors(&self) -> usize {
        self.weights.len()
    }

    pub fn snapshots_seen(&self) -> usize {
        self.mat_state.count
    }

    pub fn config(&self) -> &LocsmeConfig<T> {
        &self.config
    }

    pub fn diagnostics(&self) -> LocsmeDiagnostics {
        LocsmeDiagnostics {
            vector_shrinkage: self.vec_state.diagnostics,
            matrix_shrinkage: self.mat_state.diagnostics,
            ..self.diagnostics
        }
    }

    /// Processes snapshot `x(i)` and returns the new weights `w(i)`.
    pub fn process(&mut self, x: &CVec<T>) -> Result<&CVec<T>> {
        let index = self.snapshots_seen() + 1;
        self.process_traced(x)
            .map_err(|e| e.at_snapshot(index))?;
        Ok(&self.weights)
    }

    /// As [`process`](Self::process), also returning the intermediate values.
    pub fn process_traced(&mut self, x: &CVec<T>) -> Result<SnapshotTrace<T>> {
        let m = self.num_sensors();
        if x.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: x.len(),
            });
        }
        let output = inner(&self.weights, x);
        self.mat_state.scm_update(x)?;
        self.vec_state.scv_update(x, output)?;

        let rho_used = self.vec_state.rho;
        let (d_hat, _) = self.vec_state.step()?;
        self.a_hat = match estimate_steering(&self.projection, &d_hat) {
            Ok(a) => a,
            Err(Error::DegenerateSteering { .. }) => {
                self.diagnostics.steering_fallbacks += 1;
                self.presumed_unit.clone()
            }
            Err(e) => return Err(e),
        };

        let rho0_used = self.mat_state.rho0;
        let (r_tilde, _) = self.mat_state.step()?;

        let instantaneous = estimate_power(&self.a_hat, x, self.noise_power);
        if self.power_history.len() == self.config.power_window {
            self.power_history.pop_front();
        }
        self.power_history.push_back(instantaneous);
        self.sigma1_sq_hat = self.power_history.iter().fold(T::zero(), |a, &p| a + p)
            / T::of_usize(self.power_history.len());

        self.inc_hat = if self.config.norm_loading {
            build_inc(&r_tilde, &self.a_hat, self.sigma1_sq_hat, self.noise_power)?
        } else {
            subtract_desired(&r_tilde, &self.a_hat, self.sigma1_sq_hat)
        };

        let (w, how) = mvdr_weights_nonsingular(&self.inc_hat, &self.a_hat)?;
        if how == Factorization::Lu {
            self.diagnostics.indefinite_solves += 1;
        }
        self.weights = w;
        Ok(SnapshotTrace {
            output,
            d_hat,
            rho_used,
            rho0_used,
            r_tilde,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{sector_matrix, steering_vector, UlaGeometry};
    use crate::linalg::{frobenius_norm, trace_re};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn geom(m: usize) -> UlaGeometry {
        UlaGeometry::half_wavelength(m).unwrap()
    }

    #[test]
    fn full_rank_projector_is_identity() {
        let cm = sector_matrix::<f64>(&geom(5), 10.0, 5.0, 50).unwrap();
        let p = ProjectionOperator::from_sector(&cm, 5).unwrap();
        assert!(frobenius_norm(&(p.matrix - CMat::identity(5, 5))) < 1e-10);
    }

    #[test]
    fn rank_one_projector() {
        let a = steering_vector::<f64>(&geom(4), 20.0).unwrap();
        let p = ProjectionOperator::from_sector(&outer(&a), 1).unwrap();
        let expect = outer(&a) / c(4.0, 0.0);
        assert!(frobenius_norm(&(&p.matrix - expect)) < 1e-12);
        let v = CVec::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.5)]);
        let pv = p.apply(&v);
        let direct = &a * (inner(&a, &v) / c(4.0, 0.0));
        assert!((pv - direct).norm() < 1e-12);
    }

    #[test]
    fn default_projector_is_idempotent_with_trace_p() {
        let cm = sector_matrix::<f64>(&geom(12), 10.0, 5.0, 200).unwrap();
        let p = ProjectionOperator::from_sector(&cm, 8).unwrap();
        let pm = &p.matrix;
        assert!(frobenius_norm(&(pm * pm - pm)) < 1e-10 * frobenius_norm(pm));
        assert!((trace_re(pm) - 8.0).abs() < 1e-8);
    }

    #[test]
    fn projector_rank_out_of_range() {
        let cm = CMat::<f64>::identity(3, 3);
        assert!(ProjectionOperator::from_sector(&cm, 0).is_err());
        assert!(ProjectionOperator::from_sector(&cm, 4).is_err());
    }

    #[test]
    fn steering_estimate_fixed_by_own_projector() {
        let a = steering_vector::<f64>(&geom(12), 10.0).unwrap();
        let cm = sector_matrix::<f64>(&geom(12), 10.0, 0.0, 2).unwrap();
        let p = ProjectionOperator::from_sector(&cm, 1).unwrap();
        let est = estimate_steering(&p, &a).unwrap();
        let phase = inner(&est, &a) / c(12f64.sqrt(), 0.0);
        // Equal up to the global phase that the eigen-solver leaves on P; P
        // is phase-free so est must equal a / sqrt(M) exactly.
        assert!((phase - c(1.0, 0.0)).norm() < 1e-12);
        assert!((est - &a / c(12f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_correlation_is_degenerate() {
        let e1 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let p = ProjectionOperator::from_sector(&outer(&e1), 1).unwrap();
        let d = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            estimate_steering(&p, &d),
            Err(Error::DegenerateSteering { .. })
        ));
    }

    #[test]
    fn noiseless_power_is_exact() {
        let a = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let s = c(1.5, -2.0);
        let x = &a * s;
        assert!((estimate_power(&a, &x, 0.0) - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_snapshot_power_clamped() {
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let x = CVec::from_vec(vec![c(0.0, 0.0), c(3.0, 1.0)]);
        assert_eq!(estimate_power(&a, &x, 1.0), 0.0);
    }

    #[test]
    fn inc_identity_propagates() {
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = build_inc(&CMat::identity(2, 2), &a, 0.0, 1.0).unwrap();
        assert!(frobenius_norm(&(out - CMat::identity(2, 2) * c(2.0, 0.0))) < 1e-14);
    }

    #[test]
    fn inc_hand_trace() {
        // (a) diag(3,1) + 3 I = diag(6,4); (b) - 2 e1 e1^H = diag(4,4);
        // (c) * 2/4 = diag(2,2).
        let r = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0)]));
        let e1 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = build_inc(&r, &e1, 2.0, 1.0).unwrap();
        assert!(frobenius_norm(&(out - CMat::identity(2, 2) * c(2.0, 0.0))) < 1e-14);
    }

    #[test]
    fn inc_zero_is_degenerate() {
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            build_inc(&CMat::zeros(2, 2), &a, 0.0, 1.0),
            Err(Error::DegenerateMatrix { .. })
        ));
    }

    #[test]
    fn all_zero_snapshot_falls_back_then_fails_on_inc() {
        let s = Scenario::default();
        let mut bf = LocsmeBeamformer::<f64>::from_scenario(&s, LocsmeConfig::default()).unwrap();
        let err = bf.process(&CVec::zeros(12)).unwrap_err();
        assert!(matches!(err, Error::AtSnapshot { snapshot: 1, .. }));
        assert!(matches!(err.root(), Error::DegenerateMatrix { .. }));
        let d = bf.diagnostics();
        assert_eq!(d.steering_fallbacks, 1);
        assert_eq!(d.vector_shrinkage.denominator_guards, 1);
        assert_eq!(bf.vec_state.rho, 0.5);
        assert_eq!(bf.mat_state.rho0, 0.5);
    }
}
