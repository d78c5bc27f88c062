//! Uniform-linear-array model, scenario description and snapshot synthesis.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitize, outer, CMat, CVec};
use crate::scalar::Real;

/// Uniform linear array with `num_sensors` elements spaced `spacing_wavelengths` apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UlaGeometry {
    pub num_sensors: usize,
    pub spacing_wavelengths: f64,
}

impl UlaGeometry {
    pub fn new(num_sensors: usize, spacing_wavelengths: f64) -> Result<Self> {
        let g = Self {
            num_sensors,
            spacing_wavelengths,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn half_wavelength(num_sensors: usize) -> Result<Self> {
        Self::new(num_sensors, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_sensors < 1 {
            return Err(Error::Parameter("num_sensors must be >= 1".into()));
        }
        if !(self.spacing_wavelengths > 0.0 && self.spacing_wavelengths.is_finite()) {
            return Err(Error::Parameter(format!(
                "spacing_wavelengths must be finite and > 0, got {}",
                self.spacing_wavelengths
            )));
        }
        Ok(())
    }
}

/// How scattering-path angles are drawn around their mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AngleDistribution {
    /// Uniform on `[mean - sqrt(3) std, mean + sqrt(3) std]`.
    #[default]
    Uniform,
    Gaussian,
}

impl AngleDistribution {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, mean: f64, std: f64) -> f64 {
        match self {
            AngleDistribution::Uniform => {
                let half_width = 3f64.sqrt() * std;
                mean + half_width * (2.0 * rng.random::<f64>() - 1.0)
            }
            AngleDistribution::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
        }
    }
}

/// Local-scattering parameters shared by the coherent and incoherent models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scattering {
    pub num_paths: usize,
    pub angle_mean_deg: f64,
    pub angle_std_deg: f64,
    pub distribution: AngleDistribution,
}

impl Default for Scattering {
    fn default() -> Self {
        Self {
            num_paths: 4,
            angle_mean_deg: 10.0,
            angle_std_deg: 2.0,
            distribution: AngleDistribution::Uniform,
        }
    }
}

/// Desired-signal steering mismatch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MismatchModel {
    None,
    /// Direct path plus scattered paths with fixed random phases per trial.
    Coherent(Scattering),
    /// Direct path plus scattered paths with i.i.d. complex Gaussian gains per snapshot.
    Incoherent(Scattering),
}

impl MismatchModel {
    pub fn scattering(&self) -> Option<&Scattering> {
        match self {
            MismatchModel::None => None,
            MismatchModel::Coherent(s) | MismatchModel::Incoherent(s) => Some(s),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MismatchModel::None => "none",
            MismatchModel::Coherent(_) => "coherent",
            MismatchModel::Incoherent(_) => "incoherent",
        }
    }
}

/// Variance of each incoherent path gain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IncoherentPower {
    /// Each of the `num_paths + 1` gains has variance `sigma1^2 / (num_paths + 1)`.
    #[default]
    Split,
    /// Each gain has variance `sigma1^2`.
    Unit,
}

/// Ground-truth description of one simulated environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: UlaGeometry,
    pub desired_doa_deg: f64,
    pub interferer_doas_deg: Vec<f64>,
    /// Desired power over per-sensor noise power.
    pub snr_db: f64,
    /// Desired power over each interferer's power.
    pub sir_db: f64,
    pub noise_power: f64,
    pub mismatch: MismatchModel,
    pub incoherent_power: IncoherentPower,
    pub sector_half_width_deg: f64,
    pub sector_grid_points: usize,
    pub subspace_rank: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            geometry: UlaGeometry {
                num_sensors: 12,
                spacing_wavelengths: 0.5,
            },
            desired_doa_deg: 10.0,
            interferer_doas_deg: vec![50.0, 90.0],
            snr_db: 10.0,
            sir_db: 20.0,
            noise_power: 1.0,
            mismatch: MismatchModel::Coherent(Scattering::default()),
            incoherent_power: IncoherentPower::Split,
            sector_half_width_deg: 5.0,
            sector_grid_points: 200,
            subspace_rank: 8,
        }
    }
}

fn check_doa(theta_deg: f64) -> Result<()> {
    if !(theta_deg > -90.0 && theta_deg <= 90.0) {
        return Err(Error::Domain(format!(
            "angle {theta_deg} deg is outside (-90, 90]"
        )));
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        check_doa(self.desired_doa_deg)?;
        for &t in &self.interferer_doas_deg {
            check_doa(t)?;
            if t == self.desired_doa_deg {
                return Err(Error::Parameter(format!(
                    "interferer DoA {t} coincides with the desired DoA"
                )));
            }
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::Parameter("noise_power must be finite and > 0".into()));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::INFINITY {
            return Err(Error::Parameter("snr_db must be a number below +inf".into()));
        }
        if !self.sir_db.is_finite() {
            return Err(Error::Parameter("sir_db must be finite".into()));
        }
        if self.subspace_rank < 1 || self.subspace_rank > self.geometry.num_sensors {
            return Err(Error::Parameter(format!(
                "subspace_rank must be in [1, {}], got {}",
                self.geometry.num_sensors, self.subspace_rank
            )));
        }
        if !(self.sector_half_width_deg >= 0.0 && self.sector_half_width_deg.is_finite()) {
            return Err(Error::Parameter("sector_half_width_deg must be >= 0".into()));
        }
        if self.sector_half_width_deg > 0.0 && self.sector_grid_points < 2 {
            return Err(Error::Parameter("sector_grid_points must be >= 2".into()));
        }
        if let Some(s) = self.mismatch.scattering() {
            if !(s.angle_std_deg >= 0.0 && s.angle_std_deg.is_finite()) {
                return Err(Error::Parameter("angle_std_deg must be >= 0".into()));
            }
            if !s.angle_mean_deg.is_finite() {
                return Err(Error::Parameter("angle_mean_deg must be finite".into()));
            }
        }
        Ok(())
    }

    /// Desired-signal power `sigma_n^2 10^(SNR/10)`.
    pub fn desired_power(&self) -> f64 {
        self.noise_power * 10f64.powf(self.snr_db / 10.0)
    }

    /// Power of every interferer, `sigma_1^2 10^(-SIR/10)`.
    pub fn interferer_power(&self) -> f64 {
        self.desired_power() * 10f64.powf(-self.sir_db / 10.0)
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Self {
            snr_db,
            ..self.clone()
        }
    }

    /// Presumed (unmismatched) desired steering vector.
    pub fn presumed_steering<T: Real>(&self) -> Result<CVec<T>> {
        steering_vector(&self.geometry, self.desired_doa_deg)
    }

    /// Sector matrix around the presumed desired DoA.
    pub fn sector_matrix<T: Real>(&self) -> Result<CMat<T>> {
        sector_matrix(
            &self.geometry,
            self.desired_doa_deg,
            self.sector_half_width_deg,
            self.sector_grid_points,
        )
    }

    /// True interference-plus-noise covariance `sum_k sigma_k^2 a_k a_k^H + sigma_n^2 I`.
    pub fn true_inc<T: Real>(&self) -> Result<CMat<T>> {
        let m = self.geometry.num_sensors;
        let mut r = CMat::<T>::identity(m, m) * Complex::new(T::of(self.noise_power), T::zero());
        let p_int = Complex::new(T::of(self.interferer_power()), T::zero());
        for &theta in &self.interferer_doas_deg {
            let a = steering_vector::<T>(&self.geometry, theta)?;
            r += outer(&a) * p_int;
        }
        Ok(hermitize(&r))
    }
}

fn steering_unchecked<T: Real>(geometry: &UlaGeometry, theta_deg: f64) -> CVec<T> {
    let s = theta_deg.to_radians().sin();
    CVec::from_fn(geometry.num_sensors, |m, _| {
        if m == 0 {
            return Complex::new(T::one(), T::zero());
        }
        let phase = 2.0 * PI * geometry.spacing_wavelengths * m as f64 * s;
        Complex::new(T::of(phase.cos()), T::of(phase.sin()))
    })
}

/// ULA response `a_m = exp(j 2 pi d (m-1) sin theta)`, theta measured from broadside.
pub fn steering_vector<T: Real>(geometry: &UlaGeometry, theta_deg: f64) -> Result<CVec<T>> {
    geometry.validate()?;
    check_doa(theta_deg)?;
    Ok(steering_unchecked(geometry, theta_deg))
}

/// Midpoint-rule quadrature of `a(theta) a(theta)^H` over
/// `[theta1 - theta_e, theta1 + theta_e]`.
///
/// A zero half-width collapses to `a(theta1) a(theta1)^H`.
pub fn sector_matrix<T: Real>(
    geometry: &UlaGeometry,
    theta1_deg: f64,
    theta_e_deg: f64,
    grid_points: usize,
) -> Result<CMat<T>> {
    geometry.validate()?;
    if !(theta_e_deg >= 0.0 && theta_e_deg.is_finite()) {
        return Err(Error::Parameter(format!(
            "sector half-width must be >= 0, got {theta_e_deg}"
        )));
    }
    if theta_e_deg == 0.0 {
        let a = steering_vector::<T>(geometry, theta1_deg)?;
        return Ok(outer(&a));
    }
    if grid_points < 2 {
        return Err(Error::Parameter(format!(
            "sector quadrature needs at least 2 grid points, got {grid_points}"
        )));
    }
    let m = geometry.num_sensors;
    let lo = theta1_deg - theta_e_deg;
    let step = 2.0 * theta_e_deg / grid_points as f64;
    let weight = Complex::new(T::of(step.to_radians()), T::zero());
    let mut c = CMat::<T>::zeros(m, m);
    for g in 0..grid_points {
        let theta = lo + (g as f64 + 0.5) * step;
        let a = steering_unchecked::<T>(geometry, theta);
        c += outer(&a) * weight;
    }
    Ok(hermitize(&c))
}

/// Desired-signal signature fixed for one trial.
#[derive(Clone, Debug, PartialEq)]
pub enum RealizedSteering<T: Real> {
    /// Time-invariant steering vector (no mismatch or coherent scattering).
    Fixed(CVec<T>),
    /// Time-varying signature `sum_k g_k(i) b_k` with i.i.d. zero-mean gains.
    Incoherent {
        /// `paths[0]` is the direct path; the rest are scattered paths.
        paths: Vec<CVec<T>>,
        path_variance: T,
    },
}

impl<T: Real> RealizedSteering<T> {
    /// Covariance of the desired component of one snapshot.
    pub fn desired_covariance(&self, desired_power: f64) -> CMat<T> {
        match self {
            RealizedSteering::Fixed(a) => {
                outer(a) * Complex::new(T::of(desired_power), T::zero())
            }
            RealizedSteering::Incoherent {
                paths,
                path_variance,
            } => {
                let m = paths[0].len();
                let w = Complex::new(*path_variance, T::zero());
                let mut r = CMat::<T>::zeros(m, m);
                for b in paths {
                    r += outer(b) * w;
                }
                hermitize(&r)
            }
        }
    }

    /// Draws the desired component `a_des(i) s_1(i)` of one snapshot.
    pub fn draw_desired<R: Rng + ?Sized>(&self, rng: &mut R, desired_power: f64) -> CVec<T> {
        match self {
            RealizedSteering::Fixed(a) => {
                let s = complex_gaussian::<T, R>(rng, desired_power);
                a * s
            }
            RealizedSteering::Incoherent {
                paths,
                path_variance,
            } => {
                let var = path_variance.to_f64_lossy();
                let mut out = CVec::<T>::zeros(paths[0].len());
                for b in paths {
                    let g = complex_gaussian::<T, R>(rng, var);
                    out += b * g;
                }
                out
            }
        }
    }
}

/// Circular complex Gaussian with variance `var` (`var / 2` per component).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex<T> {
    let scale = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::of(scale * re), T::of(scale * im))
}

/// Coherent local-scattering signature `p + sum_k exp(j phi_k) b(theta_k)` for given draws.
pub fn coherent_signature<T: Real>(
    geometry: &UlaGeometry,
    direct_doa_deg: f64,
    path_angles_deg: &[f64],
    path_phases: &[f64],
) -> Result<CVec<T>> {
    if path_angles_deg.len() != path_phases.len() {
        return Err(Error::Dimension {
            expected: path_angles_deg.len(),
            actual: path_phases.len(),
        });
    }
    let mut a = steering_vector::<T>(geometry, direct_doa_deg)?;
    for (&theta, &phi) in path_angles_deg.iter().zip(path_phases) {
        let b = steering_vector::<T>(geometry, theta)?;
        a += b * Complex::new(T::of(phi.cos()), T::of(phi.sin()));
    }
    Ok(a)
}

fn draw_path_angles<R: Rng + ?Sized>(rng: &mut R, s: &Scattering) -> Result<Vec<f64>> {
    (0..s.num_paths)
        .map(|_| {
            let theta = s.distribution.sample(rng, s.angle_mean_deg, s.angle_std_deg);
            check_doa(theta).map(|_| theta)
        })
        .collect()
}

/// Draws the per-trial mismatch realization for `scenario`.
pub fn realize_mismatch<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
) -> Result<RealizedSteering<T>> {
    let geometry = &scenario.geometry;
    match &scenario.mismatch {
        MismatchModel::None => Ok(RealizedSteering::Fixed(scenario.presumed_steering()?)),
        MismatchModel::Coherent(s) => {
            let angles = draw_path_angles(rng, s)?;
            let phases: Vec<f64> = (0..s.num_paths)
                .map(|_| 2.0 * PI * rng.random::<f64>())
                .collect();
            Ok(RealizedSteering::Fixed(coherent_signature(
                geometry,
                scenario.desired_doa_deg,
                &angles,
                &phases,
            )?))
        }
        MismatchModel::Incoherent(s) => {
            let angles = draw_path_angles(rng, s)?;
            let mut paths = Vec::with_capacity(s.num_paths + 1);
            paths.push(scenario.presumed_steering()?);
            for theta in angles {
                paths.push(steering_vector(geometry, theta)?);
            }
            let sigma1 = scenario.desired_power();
            let var = match scenario.incoherent_power {
                IncoherentPower::Split => sigma1 / (s.num_paths + 1) as f64,
                IncoherentPower::Unit => sigma1,
            };
            Ok(RealizedSteering::Incoherent {
                paths,
                path_variance: T::of(var),
            })
        }
    }
}

/// A block of array snapshots plus the ground truth that produced them.
#[derive(Clone, Debug)]
pub struct SnapshotBatch<T: Real> {
    pub snapshots: Vec<CVec<T>>,
    /// Desired-signal part of each snapshot.
    pub desired_components: Vec<CVec<T>>,
    pub true_desired_cov: CMat<T>,
    pub true_inc: CMat<T>,
    pub realized: RealizedSteering<T>,
}

/// Incremental snapshot source; draws one snapshot at a time.
///
/// Draw order per snapshot: desired component, interferers in scenario order,
/// then sensor noise.
#[derive(Clone, Debug)]
pub struct SnapshotSource<T: Real> {
    realized: RealizedSteering<T>,
    interferers: Vec<CVec<T>>,
    desired_power: f64,
    interferer_power: f64,
    noise_power: f64,
    true_desired_cov: CMat<T>,
    true_inc: CMat<T>,
}

impl<T: Real> SnapshotSource<T> {
    pub fn new(scenario: &Scenario, realized: RealizedSteering<T>) -> Result<Self> {
        scenario.validate()?;
        let interferers = scenario
            .interferer_doas_deg
            .iter()
            .map(|&t| steering_vector(&scenario.geometry, t))
            .collect::<Result<Vec<_>>>()?;
        let desired_power = scenario.desired_power();
        Ok(Self {
            true_desired_cov: realized.desired_covariance(desired_power),
            true_inc: scenario.true_inc()?,
            realized,
            interferers,
            desired_power,
            interferer_power: scenario.interferer_power(),
            noise_power: scenario.noise_power,
        })
    }

    pub fn true_desired_cov(&self) -> &CMat<T> {
        &self.true_desired_cov
    }

    pub fn true_inc(&self) -> &CMat<T> {
        &self.true_inc
    }

    pub fn realized(&self) -> &RealizedSteering<T> {
        &self.realized
    }

    /// Returns `(x(i), desired component of x(i))`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (CVec<T>, CVec<T>) {
        let desired = self.realized.draw_desired(rng, self.desired_power);
        let mut x = desired.clone();
        for a in &self.interferers {
            let s = complex_gaussian::<T, R>(rng, self.interferer_power);
            x += a * s;
        }
        for xm in x.iter_mut() {
            *xm += complex_gaussian::<T, R>(rng, self.noise_power);
        }
        (x, desired)
    }
}

/// Generates `n` snapshots `x(i) = a_des(i) s_1(i) + sum_k a(theta_k) s_k(i) + n(i)`.
pub fn generate_snapshots<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
    realized: &RealizedSteering<T>,
    n: usize,
) -> Result<SnapshotBatch<T>> {
    if n < 1 {
        return Err(Error::Parameter("snapshot count must be >= 1".into()));
    }
    let source = SnapshotSource::new(scenario, realized.clone())?;
    let mut snapshots = Vec::with_capacity(n);
    let mut desired_components = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, d) = source.draw(rng);
        snapshots.push(x);
        desired_components.push(d);
    }
    Ok(SnapshotBatch {
        snapshots,
        desired_components,
        true_desired_cov: source.true_desired_cov,
        true_inc: source.true_inc,
        realized: source.realized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, hermitian_eigenvalues, trace_re};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom(m: usize) -> UlaGeometry {
        UlaGeometry::half_wavelength(m).unwrap()
    }

    #[test]
    fn broadside_is_all_ones() {
        let a = steering_vector::<f64>(&geom(2), 0.0).unwrap();
        assert_eq!(a[0], Complex::new(1.0, 0.0));
        assert_eq!(a[1], Complex::new(1.0, 0.0));
    }

    #[test]
    fn endfire_alternates_sign() {
        let a = steering_vector::<f64>(&geom(3), 90.0).unwrap();
        let expected = [1.0, -1.0, 1.0];
        for (z, e) in a.iter().zip(expected) {
            assert!((z - Complex::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn ten_degrees_matches_scalar_phase() {
        let a = steering_vector::<f64>(&geom(12), 10.0).unwrap();
        // Independent scalar evaluation, sin(10 deg) = 0.17364817766693033.
        let s = 0.173_648_177_666_930_33_f64;
        for m in 0..12 {
            let phase = std::f64::consts::PI * m as f64 * s;
            let expect = Complex::new(phase.cos(), phase.sin());
            assert!((a[m] - expect).norm() < 1e-12, "element {m}");
        }
    }

    #[test]
    fn out_of_range_angles_rejected() {
        assert!(matches!(
            steering_vector::<f64>(&geom(4), 90.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            steering_vector::<f64>(&geom(4), -90.0),
            Err(Error::Domain(_))
        ));
        assert!(steering_vector::<f64>(&geom(4), f64::NAN).is_err());
    }

    #[test]
    fn zero_width_sector_is_rank_one() {
        let g = geom(6);
        let c = sector_matrix::<f64>(&g, 20.0, 0.0, 1).unwrap();
        let a = steering_vector::<f64>(&g, 20.0).unwrap();
        assert!(frobenius_norm(&(c - outer(&a))) < 1e-12);
    }

    #[test]
    fn degenerate_grid_rejected() {
        assert!(matches!(
            sector_matrix::<f64>(&geom(4), 10.0, 5.0, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn default_sector_is_hermitian_psd() {
        let c = sector_matrix::<f64>(&geom(12), 10.0, 5.0, 200).unwrap();
        assert!(trace_re(&c) > 0.0);
        assert_eq!(frobenius_norm(&(&c - c.adjoint())), 0.0);
        let tr = trace_re(&c);
        let min = hermitian_eigenvalues(&c)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-10 * tr);
    }

    #[test]
    fn no_mismatch_realizes_presumed_vector() {
        let s = Scenario {
            mismatch: MismatchModel::None,
            ..Scenario::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = realize_mismatch::<f64, _>(&mut rng, &s).unwrap();
        assert_eq!(r, RealizedSteering::Fixed(s.presumed_steering().unwrap()));
    }

    #[test]
    fn collapsed_coherent_paths_sum_to_five_times_direct() {
        let g = geom(12);
        let a = coherent_signature::<f64>(&g, 10.0, &[10.0; 4], &[0.0; 4]).unwrap();
        let a1 = steering_vector::<f64>(&g, 10.0).unwrap();
        assert!((a - a1 * Complex::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn coherent_signature_energy_averages_five_m() {
        // Oracle: with independent uniform phases the cross terms average out,
        // so E||a||^2 = sum of the component energies = (1 + 4) M.
        let s = Scenario::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 20_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            match realize_mismatch::<f64, _>(&mut rng, &s).unwrap() {
                RealizedSteering::Fixed(a) => acc += a.norm_squared(),
                _ => unreachable!(),
            }
        }
        let mean = acc / draws as f64;
        assert!((mean - 60.0).abs() / 60.0 < 0.03, "mean {mean}");
    }

    #[test]
    fn uniform_angles_have_requested_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 50_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| AngleDistribution::Uniform.sample(&mut rng, 10.0, 2.0))
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 10.0).abs() < 0.05);
        assert!((var.sqrt() - 2.0).abs() < 0.03);
        assert!(xs.iter().all(|x| (x - 10.0).abs() <= 3f64.sqrt() * 2.0));
    }

    #[test]
    fn db_power_arithmetic() {
        let s = Scenario {
            snr_db: 10.0,
            sir_db: 20.0,
            noise_power: 1.0,
            ..Scenario::default()
        };
        assert!((s.desired_power() - 10.0).abs() < 1e-12);
        assert!((s.interferer_power() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn true_inc_has_noise_floor() {
        let s = Scenario {
            mismatch: MismatchModel::None,
            ..Scenario::default()
        };
        let r = s.true_inc::<f64>().unwrap();
        let min = hermitian_eigenvalues(&r)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= s.noise_power - 1e-10);
    }

    #[test]
    fn invalid_scenarios_rejected() {
        let mut s = Scenario::default();
        s.subspace_rank = 13;
        assert!(s.validate().is_err());
        let mut s = Scenario::default();
        s.interferer_doas_deg = vec![10.0];
        assert!(s.validate().is_err());
        let mut s = Scenario::default();
        s.noise_power = 0.0;
        assert!(s.validate().is_err());
    }
}
