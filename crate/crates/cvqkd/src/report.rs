//! Machine-readable emission of rate data.
//!
//! CSV is the plotting interface and must be byte-reproducible: floats
//! are printed in scientific notation with 12 significant digits, `.` as
//! the decimal separator and `\n` line endings. The key-rate column is
//! recomputed from the rounded mutual-information and Holevo columns, so
//! K = β·i_ab − s_be holds for the values a consumer actually parses
//! back.
//!
//! JSON mirrors the same nine fields per point, plus metadata recording
//! the version, the conventions in effect and the truncation policy.

use serde::Serialize;
use serde_json::json;

use crate::analysis::{AlphaOptimum, ProtocolComparison, SweepResult};
use crate::fock::Truncation;
use crate::keyrate::{Conventions, RatePoint};

/// Exact column set of every sweep artifact.
pub const CSV_HEADER: &str =
    "distance_km,transmissivity,excess_noise,alpha,v_a,z,i_ab_bits,s_be_bits,key_rate_bits";

/// Fixed float formatting: 12 significant digits, scientific.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// One CSV row. The emitted key rate is β·i_ab − s_be evaluated on the
/// rounded columns.
pub fn csv_row(p: &RatePoint) -> String {
    let i_ab = format_float(p.i_ab);
    let s_be = format_float(p.s_be);
    let i_back: f64 = i_ab.parse().expect("formatted float");
    let s_back: f64 = s_be.parse().expect("formatted float");
    let key = p.detection.reconciliation_efficiency() * i_back - s_back;
    [
        format_float(p.distance_km().unwrap_or(f64::NAN)),
        format_float(p.channel.transmissivity()),
        format_float(p.channel.excess_noise()),
        format_float(p.alpha),
        format_float(p.v_a),
        format_float(p.z),
        i_ab,
        s_be,
        format_float(key),
    ]
    .join(",")
}

/// Header plus one row per point, `\n` separated and terminated.
pub fn points_csv<'a>(points: impl IntoIterator<Item = &'a RatePoint>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&csv_row(p));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(result: &SweepResult) -> String {
    points_csv(result.all_points())
}

/// Comparison artifact: all PASCS rows, then all coherent rows, on the
/// shared grid. Rows of the two protocols are told apart by the alpha
/// column.
pub fn comparison_csv(report: &ProtocolComparison) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in report.pascs.all_points().chain(report.coherent.all_points()) {
        out.push_str(&csv_row(p));
        out.push('\n');
    }
    out
}

/// Where the active truncation policy came from.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationSource {
    Default,
    Environment,
}

/// Run-level metadata echoed into every JSON artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub sign_convention: &'static str,
    pub mutual_information_convention: &'static str,
    pub truncation: Truncation,
    pub truncation_source: TruncationSource,
}

impl Metadata {
    pub fn new(
        conventions: Conventions,
        truncation: Truncation,
        source: TruncationSource,
    ) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION"),
            sign_convention: conventions.noise_sign.label(),
            mutual_information_convention: conventions.mutual_information.label(),
            truncation,
            truncation_source: source,
        }
    }
}

#[derive(Debug, Serialize)]
struct JsonPoint {
    distance_km: f64,
    transmissivity: f64,
    excess_noise: f64,
    alpha: f64,
    v_a: f64,
    z: f64,
    i_ab_bits: f64,
    s_be_bits: f64,
    key_rate_bits: f64,
}

impl From<&RatePoint> for JsonPoint {
    fn from(p: &RatePoint) -> Self {
        JsonPoint {
            distance_km: p.distance_km().unwrap_or(f64::NAN),
            transmissivity: p.channel.transmissivity(),
            excess_noise: p.channel.excess_noise(),
            alpha: p.alpha,
            v_a: p.v_a,
            z: p.z,
            i_ab_bits: p.i_ab,
            s_be_bits: p.s_be,
            key_rate_bits: p.key_rate,
        }
    }
}

fn curve_json(curve: &crate::analysis::SweepCurve) -> serde_json::Value {
    json!({
        "excess_noise": curve.excess_noise,
        "cutoff_positive_km": curve.cutoff_positive_km,
        "cutoff_kmin_km": curve.cutoff_kmin_km,
        "diagnostic": curve.diagnostic,
        "points": curve.points.iter().map(|p| serde_json::to_value(JsonPoint::from(p)).unwrap()).collect::<Vec<_>>(),
    })
}

pub fn points_json(points: &[RatePoint], meta: &Metadata) -> String {
    let value = json!({
        "metadata": meta,
        "points": points.iter().map(|p| serde_json::to_value(JsonPoint::from(p)).unwrap()).collect::<Vec<_>>(),
    });
    pretty(value)
}

pub fn sweep_json(result: &SweepResult, meta: &Metadata) -> String {
    let value = json!({
        "metadata": meta,
        "curves": result.curves.iter().map(curve_json).collect::<Vec<_>>(),
    });
    pretty(value)
}

pub fn comparison_json(report: &ProtocolComparison, meta: &Metadata) -> String {
    let value = json!({
        "metadata": meta,
        "pascs": {
            "alpha": report.pascs.spec.alpha,
            "curves": report.pascs.curves.iter().map(curve_json).collect::<Vec<_>>(),
        },
        "coherent": {
            "alpha": report.coherent.spec.alpha,
            "curves": report.coherent.curves.iter().map(curve_json).collect::<Vec<_>>(),
        },
        "dominance": {
            "pascs_dominates_everywhere": report.pascs_dominates_everywhere,
            "cutoff_gaps": report.cutoff_gaps,
        },
    });
    pretty(value)
}

pub fn optimum_json(opt: &AlphaOptimum, meta: &Metadata) -> String {
    let value = json!({
        "metadata": meta,
        "alpha_opt": opt.alpha,
        "key_rate_bits": opt.key_rate,
    });
    pretty(value)
}

/// Optimizer result as CSV.
pub fn optimum_csv(opt: &AlphaOptimum) -> String {
    format!(
        "alpha_opt,key_rate_bits\n{},{}\n",
        format_float(opt.alpha),
        format_float(opt.key_rate)
    )
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}
