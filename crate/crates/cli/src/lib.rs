//! Serializable reports for the `unitsum` command line tool.

use serde::{Deserialize, Serialize};
use unitsum_core::catalog::Expected;
use unitsum_core::expansion::{DugMethod, FieldCertification, FieldContext, UnitSumCertificate};
use unitsum_core::geometry::{CoveringCheck, CoveringVerdict, Criterion};
use unitsum_core::lattice::CriticalSet;
use unitsum_core::numerics::EmbeddingChoice;
use unitsum_core::rewriting::RewriteTrace;
use unitsum_core::ring::Coords;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: Coords,
    pub borderline: bool,
    /// Digit values `s_{-1}, ..., s_{-B}`.
    pub digits: Vec<Coords>,
    pub depth: usize,
    pub unit_depth: usize,
    /// Integer digits in base `eps_tilde`, squared fields only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unit_digits: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub schema: u32,
    pub field: String,
    pub w: u32,
    pub criterion: Criterion,
    pub embedding: EmbeddingChoice,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub dug: bool,
    pub dug_method: DugMethod,
    pub omega_bound: u32,
    pub covering: CoveringVerdict,
    pub critical_points: Vec<PointReport>,
    pub failures: Vec<Coords>,
    pub borderline_points: usize,
    pub precision_bits: usize,
    pub elapsed_ms: u64,
}

impl FieldReport {
    pub fn new(ctx: &FieldContext, cert: &FieldCertification, crit: &CriticalSet, elapsed_ms: u64) -> Self {
        let critical_points = cert
            .reports
            .iter()
            .map(|r| PointReport {
                point: r.point.serializable(),
                borderline: crit.points.iter().any(|p| p.point == r.point && p.borderline),
                digits: r.digits.iter().map(|&d| ctx.alphabet.elements[d].serializable()).collect(),
                depth: r.depth,
                unit_depth: r.unit_depth,
                unit_digits: r.unit_digits.clone(),
            })
            .collect();
        FieldReport {
            schema: SCHEMA,
            field: cert.id.clone(),
            w: cert.w,
            criterion: cert.criterion,
            embedding: cert.embedding,
            c: cert.critical_count,
            b: cert.max_depth,
            dug: cert.dug,
            dug_method: cert.dug_method,
            omega_bound: cert.omega_bound,
            covering: cert.verdict.clone(),
            critical_points,
            failures: cert.failures.iter().map(|f| f.serializable()).collect(),
            borderline_points: cert.borderline_points,
            precision_bits: ctx.emb.precision_bits,
            elapsed_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub coefficient: u32,
    /// `zeta^m`, or `None` when the factor is not a root of unity.
    pub root_index: Option<u32>,
    pub factor: Coords,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: u32,
    pub field: String,
    pub alpha: Coords,
    pub unit_base: Coords,
    pub w_bound: u32,
    pub terms: Vec<TermReport>,
    pub verified: bool,
}

impl CertificateReport {
    pub fn new(field: &str, cert: &UnitSumCertificate, verified: bool) -> Self {
        CertificateReport {
            schema: SCHEMA,
            field: field.to_string(),
            alpha: cert.target.serializable(),
            unit_base: cert.unit_base.serializable(),
            w_bound: cert.w_bound,
            terms: cert
                .terms
                .iter()
                .map(|t| TermReport {
                    coefficient: t.coefficient,
                    root_index: t.root_index,
                    factor: t.unit.element.serializable(),
                    exponent: t.unit.shift,
                })
                .collect(),
            verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointsReport {
    pub schema: u32,
    pub field: String,
    pub w: u32,
    pub contains_zero: bool,
    pub box_bounds: [i64; 4],
    pub scanned: u64,
    pub points: Vec<(Coords, bool)>,
}

impl CriticalPointsReport {
    pub fn new(field: &str, w: u32, crit: &CriticalSet) -> Self {
        CriticalPointsReport {
            schema: SCHEMA,
            field: field.to_string(),
            w,
            contains_zero: crit.contains_zero,
            box_bounds: crit.box_bounds,
            scanned: u64::try_from(crit.scanned).unwrap_or(u64::MAX),
            points: crit.points.iter().map(|p| (p.point.serializable(), p.borderline)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub rule: String,
    pub position: i64,
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteReport {
    pub schema: u32,
    pub input: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<StepReport>>,
}

impl RewriteReport {
    pub fn new(trace: &RewriteTrace, with_steps: bool) -> Self {
        RewriteReport {
            schema: SCHEMA,
            input: trace.initial.to_string(),
            output: trace.final_word.to_string(),
            trace: with_steps.then(|| {
                trace
                    .steps
                    .iter()
                    .map(|s| StepReport { rule: s.rule.name().to_string(), position: s.position, sign: s.sign })
                    .collect()
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub field: String,
    pub table: u8,
    pub expected: Expected,
    pub w: u32,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub matches: bool,
}

impl TableRow {
    pub fn new(field: &str, table: u8, expected: Expected, cert: &FieldCertification) -> Self {
        let b_ok = match expected.b {
            Some(b) => cert.max_depth == Some(b),
            None => cert.critical_count == 0,
        };
        TableRow {
            field: field.to_string(),
            table,
            expected,
            w: cert.w,
            c: cert.critical_count,
            b: cert.max_depth,
            matches: cert.w == expected.w && cert.critical_count == expected.c && b_ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub schema: u32,
    pub rows: Vec<TableRow>,
    pub matched: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub schema: u32,
    pub field: String,
    pub w: u32,
    pub verdict: CoveringVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<CoveringCheck>,
}

/// Serializes with keys in sorted order.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&v)
}
