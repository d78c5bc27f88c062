//! Monte-Carlo SINR experiments: single trials, sweeps over SNR or snapshot
//! count, and their deterministic aggregation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array_model::{realize_mismatch, RealizedSteering, Scenario, SnapshotSource};
use crate::error::{Error, Result};
use crate::linalg::{inner, CMat, CVec};
use crate::locsme::{LocsmeBeamformer, LocsmeConfig, LocsmeDiagnostics};
use crate::mvdr::{max_sinr_steering, optimal_weights, smi_weights};
use crate::scalar::Real;

/// SINR recorded when the evaluated ratio is not a finite positive number.
pub const SINR_FLOOR_DB: f64 = -300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Optimal,
    Locsme,
    Smi,
}

impl Algorithm {
    /// Canonical column order.
    pub const ALL: [Algorithm; 3] = [Algorithm::Optimal, Algorithm::Locsme, Algorithm::Smi];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Optimal => "optimal",
            Algorithm::Locsme => "locsme",
            Algorithm::Smi => "smi",
        }
    }

    /// Deduplicates and sorts into canonical order.
    pub fn canonical(list: &[Algorithm]) -> Vec<Algorithm> {
        Self::ALL.iter().copied().filter(|a| list.contains(a)).collect()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Algorithm::Optimal),
            "locsme" => Ok(Algorithm::Locsme),
            "smi" => Ok(Algorithm::Smi),
            other => Err(Error::Parameter(format!(
                "unknown algorithm '{other}' (expected optimal, locsme or smi)"
            ))),
        }
    }
}

/// Output SINR in dB, `10 log10(w^H R_s w / w^H R_in w)`.
pub fn output_sinr<T: Real>(w: &CVec<T>, desired_cov: &CMat<T>, true_inc: &CMat<T>) -> Result<f64> {
    let num = inner(w, &(desired_cov * w)).re.to_f64_lossy();
    let den = inner(w, &(true_inc * w)).re.to_f64_lossy();
    let db = 10.0 * (num / den).log10();
    if !db.is_finite() || num <= 0.0 || den <= 0.0 {
        return Err(Error::Evaluation(format!(
            "SINR ratio {num:e} / {den:e} has no finite dB value"
        )));
    }
    Ok(db)
}

/// Closed-form SINR of the clairvoyant MVDR beamformer for a rank-one desired
/// covariance, `10 log10(sigma1^2 a^H R_in^-1 a)`.
pub fn optimal_sinr_closed_form<T: Real>(desired_power: f64, a: &CVec<T>, true_inc: &CMat<T>) -> Result<f64> {
    let z = crate::linalg::solve_hpd(true_inc, a)?;
    let q = inner(a, &z).re.to_f64_lossy();
    Ok(10.0 * (desired_power * q).log10())
}

/// Settings shared by every trial of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSettings<T> {
    pub algorithms: Vec<Algorithm>,
    pub locsme: LocsmeConfig<T>,
    /// Diagonal load added to the SMI sample covariance.
    pub smi_diagonal_load: T,
}

impl<T: Real> Default for TrialSettings<T> {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            locsme: LocsmeConfig::default(),
            smi_diagonal_load: T::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialDiagnostics {
    pub locsme: LocsmeDiagnostics,
    pub smi_fallback_loads: usize,
    pub sinr_floor_hits: usize,
}

impl TrialDiagnostics {
    pub fn merge(&mut self, o: &Self) {
        self.locsme.vector_shrinkage.merge(&o.locsme.vector_shrinkage);
        self.locsme.matrix_shrinkage.merge(&o.locsme.matrix_shrinkage);
        self.locsme.steering_fallbacks += o.locsme.steering_fallbacks;
        self.locsme.indefinite_solves += o.locsme.indefinite_solves;
        self.smi_fallback_loads += o.smi_fallback_loads;
        self.sinr_floor_hits += o.sinr_floor_hits;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub scenario_digest: String,
    /// Output SINR (dB) after each snapshot, per algorithm.
    pub per_snapshot_sinr_db: BTreeMap<Algorithm, Vec<f64>>,
    pub diagnostics: TrialDiagnostics,
}

impl TrialResult {
    pub fn terminal(&self, alg: Algorithm) -> Option<f64> {
        self.per_snapshot_sinr_db.get(&alg).and_then(|v| v.last().copied())
    }
}

/// FNV-1a digest of the scenario's JSON form.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let text = serde_json::to_string(scenario).expect("scenario serializes");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed from `(master_seed, axis index, trial index)`.
pub fn derive_seed(master_seed: u64, axis_index: usize, trial_index: usize) -> u64 {
    let z = splitmix64(master_seed);
    let z = splitmix64(z ^ axis_index as u64);
    splitmix64(z ^ (trial_index as u64).wrapping_mul(0xd6e8_feb8_6659_fd93))
}

fn record_sinr<T: Real>(
    w: &CVec<T>,
    rs: &CMat<T>,
    rin: &CMat<T>,
    diag: &mut TrialDiagnostics,
) -> f64 {
    match output_sinr(w, rs, rin) {
        Ok(v) => v,
        Err(_) => {
            diag.sinr_floor_hits += 1;
            SINR_FLOOR_DB
        }
    }
}

/// Runs one trial: realizes the mismatch, streams `n_snapshots` snapshots
/// through every requested beamformer and records the output SINR after each
/// snapshot. Deterministic in `(scenario, seed, settings)`.
pub fn run_trial<T: Real>(
    scenario: &Scenario,
    seed: u64,
    n_snapshots: usize,
    settings: &TrialSettings<T>,
) -> Result<TrialResult> {
    if n_snapshots < 1 {
        return Err(Error::Parameter("n_snapshots must be >= 1".into()));
    }
    scenario.validate()?;
    let algorithms = Algorithm::canonical(&settings.algorithms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = realize_mismatch::<T, _>(&mut rng, scenario)?;
    let source = SnapshotSource::new(scenario, realized)?;
    let rs = source.true_desired_cov().clone();
    let rin = source.true_inc().clone();
    let presumed = scenario.presumed_steering::<T>()?;
    let m = scenario.geometry.num_sensors;

    let mut diag = TrialDiagnostics::default();
    let mut series: BTreeMap<Algorithm, Vec<f64>> = algorithms
        .iter()
        .map(|&a| (a, Vec::with_capacity(n_snapshots)))
        .collect();

    let optimal_sinr = if algorithms.contains(&Algorithm::Optimal) {
        let a_eff = match source.realized() {
            RealizedSteering::Fixed(a) => a.clone(),
            RealizedSteering::Incoherent { .. } => max_sinr_steering(&rs, &rin)?,
        };
        let w = optimal_weights(&rin, &a_eff)?;
        Some(record_sinr(&w, &rs, &rin, &mut diag))
    } else {
        None
    };
    let mut locsme = if algorithms.contains(&Algorithm::Locsme) {
        Some(LocsmeBeamformer::<T>::new(
            crate::locsme::ProjectionOperator::from_sector(
                &scenario.sector_matrix::<T>()?,
                scenario.subspace_rank,
            )?,
            &presumed,
            T::of(scenario.noise_power),
            settings.locsme.clone(),
        )?)
    } else {
        None
    };
    let mut scm_accum = CMat::<T>::zeros(m, m);

    for i in 1..=n_snapshots {
        let (x, _) = source.draw(&mut rng);
        if let Some(v) = optimal_sinr {
            series.get_mut(&Algorithm::Optimal).unwrap().push(v);
        }
        if let Some(bf) = locsme.as_mut() {
            let w = bf.process(&x)?;
            let v = record_sinr(w, &rs, &rin, &mut diag);
            series.get_mut(&Algorithm::Locsme).unwrap().push(v);
        }
        if algorithms.contains(&Algorithm::Smi) {
            scm_accum += &x * x.adjoint();
            let scm = crate::linalg::hermitize(&scm_accum)
                * Complex::new(T::one() / T::of_usize(i), T::zero());
            let sol = smi_weights(&scm, &presumed, settings.smi_diagonal_load)
                .map_err(|e| e.at_snapshot(i))?;
            if sol.fallback_load.is_some() {
                diag.smi_fallback_loads += 1;
            }
            let v = record_sinr(&sol.weights, &rs, &rin, &mut diag);
            series.get_mut(&Algorithm::Smi).unwrap().push(v);
        }
    }
    if let Some(bf) = &locsme {
        diag.locsme = bf.diagnostics();
    }
    Ok(TrialResult {
        seed,
        scenario_digest: scenario_digest(scenario),
        per_snapshot_sinr_db: series,
        diagnostics: diag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Trajectory over snapshot index at the scenario's SNR.
    Snapshots,
    /// Terminal SINR as the desired-signal SNR varies.
    SnrDb,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::Snapshots => "snapshots",
            SweepAxis::SnrDb => "snr_db",
        }
    }
}

/// A cell of the sweep that could not be computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub axis_index: usize,
    pub message: String,
}

/// Mean output SINR over trials (linear average expressed in dB), indexed by
/// the sweep axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinrCurve {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// `None` marks a cell whose trials failed.
    pub mean_sinr_db: BTreeMap<Algorithm, Vec<Option<f64>>>,
    pub std_sinr_db: BTreeMap<Algorithm, Vec<Option<f64>>>,
    pub num_trials: usize,
    pub errors: Vec<CellError>,
    pub diagnostics: TrialDiagnostics,
}

impl SinrCurve {
    pub fn mean(&self, alg: Algorithm) -> Option<&[Option<f64>]> {
        self.mean_sinr_db.get(&alg).map(Vec::as_slice)
    }
}

/// Sweep request.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub n_trials: usize,
    /// Snapshots per trial for the SNR axis; the snapshot axis runs to its
    /// largest value.
    pub n_snapshots: usize,
    pub master_seed: u64,
}

/// Mean SINR in dB (linear average, then dB) and the standard deviation of
/// the per-trial dB values.
pub fn aggregate_sinr_db(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let linear = xs.iter().map(|db| 10f64.powf(db / 10.0)).sum::<f64>() / n;
    let mean_db = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean_db).powi(2)).sum::<f64>() / n;
    (10.0 * linear.log10(), var.sqrt())
}

/// Runs every trial of a sweep and averages per cell.
///
/// Trials are executed on the current rayon pool; results are reduced in
/// trial order so the curve does not depend on scheduling.
pub fn sweep<T: Real>(template: &Scenario, spec: &SweepSpec, settings: &TrialSettings<T>) -> Result<SinrCurve> {
    if spec.values.is_empty() {
        return Err(Error::Parameter("sweep values must be non-empty".into()));
    }
    if spec.values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter("sweep values must be strictly increasing".into()));
    }
    if spec.n_trials < 1 {
        return Err(Error::Parameter("n_trials must be >= 1".into()));
    }
    template.validate()?;
    let algorithms = Algorithm::canonical(&settings.algorithms);
    let nv = spec.values.len();

    // One cell per SNR value, or a single cell holding the whole trajectory.
    let (cells, snapshot_indices): (Vec<(Scenario, usize)>, Vec<usize>) = match spec.axis {
        SweepAxis::SnrDb => {
            if spec.n_snapshots < 1 {
                return Err(Error::Parameter("n_snapshots must be >= 1".into()));
            }
            (
                spec.values
                    .iter()
                    .map(|&v| (template.with_snr_db(v), spec.n_snapshots))
                    .collect(),
                vec![spec.n_snapshots],
            )
        }
        SweepAxis::Snapshots => {
            let idx = spec
                .values
                .iter()
                .map(|&v| {
                    if v >= 1.0 && v.fract() == 0.0 && v.is_finite() {
                        Ok(v as usize)
                    } else {
                        Err(Error::Parameter(format!(
                            "snapshot axis values must be positive integers, got {v}"
                        )))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let last = *idx.last().unwrap();
            (vec![(template.clone(), last)], idx)
        }
    };

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.n_trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<TrialResult>> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (scenario, n) = &cells[c];
            run_trial::<T>(scenario, derive_seed(spec.master_seed, c, t), *n, settings)
                .map_err(|e| e.at_trial(t))
        })
        .collect();

    let mut mean_sinr_db: BTreeMap<Algorithm, Vec<Option<f64>>> =
        algorithms.iter().map(|&a| (a, vec![None; nv])).collect();
    let mut std_sinr_db = mean_sinr_db.clone();
    let mut errors = Vec::new();
    let mut diagnostics = TrialDiagnostics::default();

    for (c, chunk) in results.chunks(spec.n_trials).enumerate() {
        if let Some(err) = chunk.iter().find_map(|r| r.as_ref().err()) {
            let message = err.to_string();
            match spec.axis {
                SweepAxis::SnrDb => errors.push(CellError { axis_index: c, message }),
                SweepAxis::Snapshots => errors.extend((0..nv).map(|k| CellError {
                    axis_index: k,
                    message: message.clone(),
                })),
            }
            continue;
        }
        let trials: Vec<&TrialResult> = chunk.iter().map(|r| r.as_ref().unwrap()).collect();
        for t in &trials {
            diagnostics.merge(&t.diagnostics);
        }
        for &alg in &algorithms {
            let positions: Vec<(usize, usize)> = match spec.axis {
                SweepAxis::SnrDb => vec![(c, snapshot_indices[0] - 1)],
                SweepAxis::Snapshots => snapshot_indices
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| (k, s - 1))
                    .collect(),
            };
            for (k, s) in positions {
                let xs: Vec<f64> = trials
                    .iter()
                    .map(|t| t.per_snapshot_sinr_db[&alg][s])
                    .collect();
                let (m, sd) = aggregate_sinr_db(&xs);
                mean_sinr_db.get_mut(&alg).unwrap()[k] = Some(m);
                std_sinr_db.get_mut(&alg).unwrap()[k] = Some(sd);
            }
        }
    }

    Ok(SinrCurve {
        axis: spec.axis,
        axis_values: spec.values.clone(),
        algorithms,
        mean_sinr_db,
        std_sinr_db,
        num_trials: spec.n_trials,
        errors,
        diagnostics,
    })
}

/// Runs `n_trials` independent trials of one scenario in parallel.
pub fn run_trials<T: Real>(
    scenario: &Scenario,
    n_trials: usize,
    n_snapshots: usize,
    master_seed: u64,
    settings: &TrialSettings<T>,
) -> Result<Vec<TrialResult>> {
    if n_trials < 1 {
        return Err(Error::Parameter("n_trials must be >= 1".into()));
    }
    (0..n_trials)
        .into_par_iter()
        .map(|t| {
            run_trial::<T>(scenario, derive_seed(master_seed, 0, t), n_snapshots, settings)
                .map_err(|e| e.at_trial(t))
        })
        .collect()
}
