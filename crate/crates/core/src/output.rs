//! CSV and JSON emission for curves and per-trial results.
//!
//! Floating-point values are written with 9 significant digits in the style
//! of C's `%.9g`; missing cells are empty in CSV and `null` in JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::harness::{Algorithm, CellError, SinrCurve, SweepAxis, TrialDiagnostics, TrialResult};

/// Formats `x` like `printf("%.9g", x)`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn round9(x: f64) -> f64 {
    format_sig9(x).parse().unwrap_or(x)
}

fn cell(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

/// Header: axis column, one column per algorithm in canonical order, `num_trials`.
pub fn curve_to_csv(curve: &SinrCurve) -> String {
    let mut out = String::new();
    out.push_str(curve.axis.column_name());
    for a in &curve.algorithms {
        out.push(',');
        out.push_str(a.name());
    }
    out.push_str(",num_trials\n");
    for (k, &v) in curve.axis_values.iter().enumerate() {
        out.push_str(&format_sig9(v));
        for a in &curve.algorithms {
            out.push(',');
            out.push_str(&cell(curve.mean_sinr_db[a][k]));
        }
        let _ = writeln!(out, ",{}", curve.num_trials);
    }
    out
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    axis: SweepAxis,
    axis_values: Vec<f64>,
    algorithms: &'a [Algorithm],
    mean_sinr_db: std::collections::BTreeMap<Algorithm, Vec<Option<f64>>>,
    std_sinr_db: std::collections::BTreeMap<Algorithm, Vec<Option<f64>>>,
    num_trials: usize,
    errors: &'a [CellError],
    diagnostics: &'a TrialDiagnostics,
}

fn round_series(
    m: &std::collections::BTreeMap<Algorithm, Vec<Option<f64>>>,
) -> std::collections::BTreeMap<Algorithm, Vec<Option<f64>>> {
    m.iter()
        .map(|(k, v)| (*k, v.iter().map(|x| x.map(round9)).collect()))
        .collect()
}

pub fn curve_to_json(curve: &SinrCurve) -> String {
    let doc = CurveDoc {
        axis: curve.axis,
        axis_values: curve.axis_values.iter().copied().map(round9).collect(),
        algorithms: &curve.algorithms,
        mean_sinr_db: round_series(&curve.mean_sinr_db),
        std_sinr_db: round_series(&curve.std_sinr_db),
        num_trials: curve.num_trials,
        errors: &curve.errors,
        diagnostics: &curve.diagnostics,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("curve serializes");
    s.push('\n');
    s
}

/// One row per trial: `trial,seed,<algorithm...>` with terminal SINR in dB.
pub fn trials_to_csv(trials: &[TrialResult], algorithms: &[Algorithm]) -> String {
    let mut out = String::from("trial,seed");
    for a in algorithms {
        out.push(',');
        out.push_str(a.name());
    }
    out.push('\n');
    for (k, t) in trials.iter().enumerate() {
        let _ = write!(out, "{k},{}", t.seed);
        for a in algorithms {
            out.push(',');
            out.push_str(&cell(t.terminal(*a)));
        }
        out.push('\n');
    }
    out
}

pub fn trials_to_json(trials: &[TrialResult]) -> String {
    let rounded: Vec<TrialResult> = trials
        .iter()
        .map(|t| TrialResult {
            per_snapshot_sinr_db: t
                .per_snapshot_sinr_db
                .iter()
                .map(|(k, v)| (*k, v.iter().copied().map(round9).collect()))
                .collect(),
            ..t.clone()
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rounded).expect("trials serialize");
    s.push('\n');
    s
}
