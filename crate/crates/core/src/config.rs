//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! [scenario]
//! num_sensors = 12
//! spacing_wavelengths = 0.5
//! desired_doa_deg = 10.0
//! interferer_doas_deg = [50.0, 90.0]
//! snr_db = 10.0
//! sir_db = 20.0
//! noise_power = 1.0
//! sector_half_width_deg = 5.0
//! sector_grid_points = 200
//! subspace_rank = 8
//!
//! [mismatch]
//! kind = "coherent"          # none | coherent | incoherent
//! num_paths = 4
//! angle_mean_deg = 10.0
//! angle_std_deg = 2.0
//! incoherent_power = "split" # split | unit
//!
//! [run]
//! algorithms = ["optimal", "locsme", "smi"]
//! n_trials = 100
//! n_snapshots = 50
//! master_seed = 1
//! workers = 0                # 0 = all cores
//!
//! [sweep]                    # optional
//! axis = "snr_db"            # snr_db | snapshots
//! values = [-10.0, -5.0, 0.0]
//!
//! [output]
//! path = "curve.csv"         # optional, stdout when absent
//! format = "csv"             # csv | json
//!
//! [variant]
//! norm_loading = true
//! rho_init = 0.5
//! angle_dist = "uniform"     # uniform | gaussian
//! power_window = 1
//! smi_diagonal_load = 0.0
//! ```
//!
//! Every key is optional. Environment variables named
//! `LOCSME_<TABLE>__<KEY>` (for example `LOCSME_SCENARIO__SNR_DB=0`) override
//! the document; their values use TOML value syntax, and bare words are read
//! as strings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::array_model::{AngleDistribution, IncoherentPower, MismatchModel, Scattering, Scenario, UlaGeometry};
use crate::harness::{Algorithm, SweepAxis, SweepSpec, TrialSettings};
use crate::locsme::LocsmeConfig;
use crate::scalar::Real;

/// Prefix of environment-variable overrides.
pub const ENV_PREFIX: &str = "LOCSME_";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub num_sensors: usize,
    pub spacing_wavelengths: f64,
    pub desired_doa_deg: f64,
    pub interferer_doas_deg: Vec<f64>,
    pub snr_db: f64,
    pub sir_db: f64,
    pub noise_power: f64,
    pub sector_half_width_deg: f64,
    pub sector_grid_points: usize,
    pub subspace_rank: usize,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = Scenario::default();
        Self {
            num_sensors: s.geometry.num_sensors,
            spacing_wavelengths: s.geometry.spacing_wavelengths,
            desired_doa_deg: s.desired_doa_deg,
            interferer_doas_deg: s.interferer_doas_deg,
            snr_db: s.snr_db,
            sir_db: s.sir_db,
            noise_power: s.noise_power,
            sector_half_width_deg: s.sector_half_width_deg,
            sector_grid_points: s.sector_grid_points,
            subspace_rank: s.subspace_rank,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MismatchKind {
    None,
    #[default]
    Coherent,
    Incoherent,
}

impl std::str::FromStr for MismatchKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(MismatchKind::None),
            "coherent" => Ok(MismatchKind::Coherent),
            "incoherent" => Ok(MismatchKind::Incoherent),
            other => Err(format!("unknown mismatch '{other}' (none|coherent|incoherent)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MismatchSection {
    pub kind: MismatchKind,
    pub num_paths: usize,
    pub angle_mean_deg: f64,
    pub angle_std_deg: f64,
    pub incoherent_power: IncoherentPower,
}

impl Default for MismatchSection {
    fn default() -> Self {
        let s = Scattering::default();
        Self {
            kind: MismatchKind::Coherent,
            num_paths: s.num_paths,
            angle_mean_deg: s.angle_mean_deg,
            angle_std_deg: s.angle_std_deg,
            incoherent_power: IncoherentPower::Split,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub algorithms: Vec<Algorithm>,
    pub n_trials: usize,
    pub n_snapshots: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            n_trials: 100,
            n_snapshots: 50,
            master_seed: 1,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    #[serde(default)]
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantSection {
    pub norm_loading: bool,
    pub rho_init: f64,
    pub angle_dist: AngleDistribution,
    pub power_window: usize,
    pub smi_diagonal_load: f64,
}

impl Default for VariantSection {
    fn default() -> Self {
        Self {
            norm_loading: true,
            rho_init: 0.5,
            angle_dist: AngleDistribution::Uniform,
            power_window: 1,
            smi_diagonal_load: 0.0,
        }
    }
}

/// Complete, validated experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub mismatch: MismatchSection,
    pub run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub output: OutputSection,
    pub variant: VariantSection,
}

/// One invalid field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<FieldError>),
    #[error("environment override {var}: {message}")]
    Env { var: String, message: String },
}

impl ConfigError {
    /// Paths of the invalid fields, for validation errors.
    pub fn field_paths(&self) -> Vec<&str> {
        match self {
            ConfigError::Validation(v) => v.iter().map(|e| e.path.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

fn parse_error(text: &str, e: &toml::de::Error) -> ConfigError {
    let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
    ConfigError::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

/// Parses and validates a configuration document, ignoring the environment.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_env(text, std::iter::empty())
}

/// Parses a document, applies `LOCSME_<TABLE>__<KEY>` overrides from `vars`,
/// then validates.
pub fn parse_config_with_env<I>(text: &str, vars: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut table: toml::Table = text.parse().map_err(|e| parse_error(text, &e))?;
    apply_env_overrides(&mut table, vars)?;
    let cfg: RunConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| match e.span() {
            Some(_) => parse_error(text, &e),
            None => ConfigError::Parse {
                line: 0,
                column: 0,
                message: e.message().to_string(),
            },
        })?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_env_overrides<I>(table: &mut toml::Table, vars: I) -> Result<(), ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut vars: Vec<(String, String)> = vars
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    vars.sort();
    for (var, raw) in vars {
        let rest = var[ENV_PREFIX.len()..].to_string();
        let Some((section, key)) = rest.split_once("__") else {
            return Err(ConfigError::Env {
                var,
                message: "expected LOCSME_<TABLE>__<KEY>".into(),
            });
        };
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.clone()));
        let entry = table
            .entry(section.to_ascii_lowercase())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        match entry {
            toml::Value::Table(t) => {
                t.insert(key.to_ascii_lowercase(), value);
            }
            _ => {
                return Err(ConfigError::Env {
                    var,
                    message: format!("'{}' is not a table", section.to_ascii_lowercase()),
                })
            }
        }
    }
    Ok(())
}

fn check(errors: &mut Vec<FieldError>, ok: bool, path: &str, message: impl Into<String>) {
    if !ok {
        errors.push(FieldError {
            path: path.to_string(),
            message: message.into(),
        });
    }
}

fn doa_ok(t: f64) -> bool {
    t > -90.0 && t <= 90.0
}

impl RunConfig {
    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut e = Vec::new();
        let s = &self.scenario;
        check(&mut e, s.num_sensors >= 1, "scenario.num_sensors", format!("must be >= 1, got {}", s.num_sensors));
        check(
            &mut e,
            s.spacing_wavelengths > 0.0 && s.spacing_wavelengths.is_finite(),
            "scenario.spacing_wavelengths",
            format!("must be finite and > 0, got {}", s.spacing_wavelengths),
        );
        check(&mut e, doa_ok(s.desired_doa_deg), "scenario.desired_doa_deg", format!("must lie in (-90, 90], got {}", s.desired_doa_deg));
        for (k, &t) in s.interferer_doas_deg.iter().enumerate() {
            let path = format!("scenario.interferer_doas_deg[{k}]");
            check(&mut e, doa_ok(t), &path, format!("must lie in (-90, 90], got {t}"));
            check(&mut e, t != s.desired_doa_deg, &path, "must differ from desired_doa_deg");
        }
        check(&mut e, !s.snr_db.is_nan() && s.snr_db < f64::INFINITY, "scenario.snr_db", "must be a number below +inf");
        check(&mut e, s.sir_db.is_finite(), "scenario.sir_db", "must be finite");
        check(&mut e, s.noise_power > 0.0 && s.noise_power.is_finite(), "scenario.noise_power", format!("must be finite and > 0, got {}", s.noise_power));
        check(
            &mut e,
            s.sector_half_width_deg >= 0.0 && s.sector_half_width_deg.is_finite(),
            "scenario.sector_half_width_deg",
            format!("must be >= 0, got {}", s.sector_half_width_deg),
        );
        check(
            &mut e,
            s.sector_half_width_deg == 0.0 || s.sector_grid_points >= 2,
            "scenario.sector_grid_points",
            format!("must be >= 2, got {}", s.sector_grid_points),
        );
        check(
            &mut e,
            s.subspace_rank >= 1 && s.subspace_rank <= s.num_sensors.max(1),
            "scenario.subspace_rank",
            format!("must lie in [1, num_sensors = {}], got {}", s.num_sensors, s.subspace_rank),
        );
        let m = &self.mismatch;
        check(&mut e, m.angle_std_deg >= 0.0 && m.angle_std_deg.is_finite(), "mismatch.angle_std_deg", format!("must be >= 0, got {}", m.angle_std_deg));
        if m.kind != MismatchKind::None {
            // Draws are kept within 3 std-widths of the mean.
            let spread = 3f64.sqrt().max(if self.variant.angle_dist == AngleDistribution::Gaussian { 6.0 } else { 0.0 }) * m.angle_std_deg;
            check(
                &mut e,
                doa_ok(m.angle_mean_deg - spread) && doa_ok(m.angle_mean_deg + spread),
                "mismatch.angle_mean_deg",
                format!("scattering angles around {} deg must stay within (-90, 90]", m.angle_mean_deg),
            );
        }
        let r = &self.run;
        check(&mut e, !r.algorithms.is_empty(), "run.algorithms", "must name at least one of optimal, locsme, smi");
        check(&mut e, r.n_trials >= 1, "run.n_trials", format!("must be >= 1, got {}", r.n_trials));
        check(&mut e, r.n_snapshots >= 1, "run.n_snapshots", format!("must be >= 1, got {}", r.n_snapshots));
        if let Some(sw) = &self.sweep {
            check(
                &mut e,
                sw.values.windows(2).all(|w| w[0] < w[1]),
                "sweep.values",
                "must be strictly increasing",
            );
            check(&mut e, sw.values.iter().all(|v| v.is_finite()), "sweep.values", "must be finite");
            if sw.axis == SweepAxis::Snapshots {
                check(
                    &mut e,
                    sw.values.iter().all(|&v| v >= 1.0 && v.fract() == 0.0),
                    "sweep.values",
                    "snapshot indices must be positive integers",
                );
            }
        }
        let v = &self.variant;
        check(&mut e, (0.0..=1.0).contains(&v.rho_init), "variant.rho_init", format!("must lie in [0, 1], got {}", v.rho_init));
        check(&mut e, v.power_window >= 1, "variant.power_window", "must be >= 1");
        check(
            &mut e,
            v.smi_diagonal_load >= 0.0 && v.smi_diagonal_load.is_finite(),
            "variant.smi_diagonal_load",
            format!("must be finite and >= 0, got {}", v.smi_diagonal_load),
        );
        if e.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(e))
        }
    }

    /// Serializes back to a TOML document that parses to the same value.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn to_scenario(&self) -> Scenario {
        let s = &self.scenario;
        let scattering = Scattering {
            num_paths: self.mismatch.num_paths,
            angle_mean_deg: self.mismatch.angle_mean_deg,
            angle_std_deg: self.mismatch.angle_std_deg,
            distribution: self.variant.angle_dist,
        };
        Scenario {
            geometry: UlaGeometry {
                num_sensors: s.num_sensors,
                spacing_wavelengths: s.spacing_wavelengths,
            },
            desired_doa_deg: s.desired_doa_deg,
            interferer_doas_deg: s.interferer_doas_deg.clone(),
            snr_db: s.snr_db,
            sir_db: s.sir_db,
            noise_power: s.noise_power,
            mismatch: match self.mismatch.kind {
                MismatchKind::None => MismatchModel::None,
                MismatchKind::Coherent => MismatchModel::Coherent(scattering),
                MismatchKind::Incoherent => MismatchModel::Incoherent(scattering),
            },
            incoherent_power: self.mismatch.incoherent_power,
            sector_half_width_deg: s.sector_half_width_deg,
            sector_grid_points: s.sector_grid_points,
            subspace_rank: s.subspace_rank,
        }
    }

    pub fn trial_settings<T: Real>(&self) -> TrialSettings<T> {
        TrialSettings {
            algorithms: Algorithm::canonical(&self.run.algorithms),
            locsme: LocsmeConfig {
                rho_init: T::of(self.variant.rho_init),
                norm_loading: self.variant.norm_loading,
                power_window: self.variant.power_window,
            },
            smi_diagonal_load: T::of(self.variant.smi_diagonal_load),
        }
    }

    /// Sweep over `axis`; values come from `[sweep]` when it names the same
    /// axis, otherwise from the defaults (SNR -10..30 dB step 5, or every
    /// snapshot index up to `run.n_snapshots`).
    pub fn sweep_spec(&self, axis: SweepAxis) -> SweepSpec {
        let values = match &self.sweep {
            Some(sw) if sw.axis == axis && !sw.values.is_empty() => sw.values.clone(),
            _ => match axis {
                SweepAxis::SnrDb => (0..9).map(|k| -10.0 + 5.0 * k as f64).collect(),
                SweepAxis::Snapshots => (1..=self.run.n_snapshots).map(|k| k as f64).collect(),
            },
        };
        SweepSpec {
            axis,
            values,
            n_trials: self.run.n_trials,
            n_snapshots: self.run.n_snapshots,
            master_seed: self.run.master_seed,
        }
    }
}
