//! The bundled field list with verified complex-Pisot units.
//!
//! The data file `data/catalog.json` is an array of records:
//! `id`, `name`, `minpoly` (5 ascending integers), `integral_basis`
//! (`denominator`, 4 numerator `rows` over the power basis), `mu`, `marker`
//! (`none` | `dagger` | `double_dagger`), `table` (2, 3, 5 or null),
//! `expected` (`w`, `c`, `b` or null), `zeta` and `unit` (coordinates over
//! the integral basis), `squared_base`, `embedding` (`pair`, `conjugate`),
//! `printed_unit` (the published three-decimal value of the unit, table 5 only) and
//! `source`. Entries with a null `unit` are listed for reference only.

use dashu_int::IBig;
use serde::{Deserialize, Serialize};

use crate::numerics::{
    classify_pisot, to_c64, EmbeddingChoice, EmbeddingData, NumericsError, PisotVerdict, C64,
    DEFAULT_PRECISION_BITS,
};
use crate::ring::{IntegralBasis, MinimalPolynomial, Order, OrderElement, RingError};

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

/// Per-component tolerance for the printed unit values.
pub const PRINTED_TOLERANCE: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog entry {id}: {reason}")]
    Entry { id: String, reason: String },
    #[error("unknown field id {0:?}")]
    UnknownField(String),
    #[error("no complex Pisot unit with coordinates bounded by {0}")]
    UnitNotFound(i64),
    #[error("catalog data is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    None,
    Dagger,
    DoubleDagger,
}

impl Marker {
    /// Upper bound on the unit sum height implied by the marker.
    pub fn omega_bound(self) -> u32 {
        match self {
            Marker::None => 1,
            Marker::Dagger => 2,
            Marker::DoubleDagger => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub w: u32,
    pub c: usize,
    pub b: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub denominator: i64,
    pub rows: [[i64; 4]; 4],
}

/// One record of the data file, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub id: String,
    pub name: String,
    pub minpoly: [i64; 5],
    pub integral_basis: BasisRecord,
    pub mu: u32,
    pub marker: Marker,
    pub table: Option<u8>,
    pub expected: Option<Expected>,
    pub zeta: [i64; 4],
    pub unit: Option<[i64; 4]>,
    pub squared_base: bool,
    pub embedding: Option<EmbeddingChoice>,
    pub printed_unit: Option<[f64; 2]>,
    pub source: String,
}

pub fn records() -> Result<Vec<CatalogRecord>, CatalogError> {
    serde_json::from_str(CATALOG_JSON).map_err(|e| CatalogError::Malformed(e.to_string()))
}

#[derive(Clone, Debug)]
pub struct FieldDescriptor {
    pub id: String,
    pub name: String,
    pub min_poly: MinimalPolynomial,
    pub basis: IntegralBasis,
    pub mu: u32,
    pub zeta: OrderElement,
    pub marker: Marker,
    pub table: Option<u8>,
    pub expected: Option<Expected>,
    pub printed_unit: Option<C64>,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct UnitData {
    /// `eps`, or `eps_tilde` when `is_squared_base`.
    pub unit: OrderElement,
    pub is_squared_base: bool,
    pub embedding: EmbeddingData,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub descriptor: FieldDescriptor,
    pub order: Order,
    pub unit: Option<UnitData>,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.descriptor.id
    }

    /// Expansion base: the unit, or its square for squared-base entries.
    pub fn base(&self) -> Option<OrderElement> {
        let u = self.unit.as_ref()?;
        if u.is_squared_base {
            self.order.mul(&u.unit, &u.unit).ok()
        } else {
            Some(u.unit.clone())
        }
    }

    pub fn from_record(rec: &CatalogRecord, prec: usize) -> Result<Self, CatalogError> {
        let report = verify_catalog_entry(rec, prec);
        if let Some(bad) = report.checks.iter().find(|c| !c.ok) {
            return Err(CatalogError::Entry { id: rec.id.clone(), reason: format!("{}: {}", bad.name, bad.detail) });
        }
        let err = |reason: String| CatalogError::Entry { id: rec.id.clone(), reason };
        let min_poly = MinimalPolynomial::from_i64(rec.minpoly).map_err(|e| err(e.to_string()))?;
        let basis = IntegralBasis::from_i64(rec.integral_basis.denominator, rec.integral_basis.rows);
        let order = Order::new(min_poly.clone(), basis.clone()).map_err(|e| err(e.to_string()))?;
        let unit = match (&rec.unit, &rec.embedding) {
            (Some(u), Some(choice)) => Some(UnitData {
                unit: order.from_i64(*u),
                is_squared_base: rec.squared_base,
                embedding: EmbeddingData::new(&order, prec, *choice).map_err(|e| err(e.to_string()))?,
            }),
            _ => None,
        };
        let descriptor = FieldDescriptor {
            id: rec.id.clone(),
            name: rec.name.clone(),
            min_poly,
            basis,
            mu: rec.mu,
            zeta: order.from_i64(rec.zeta),
            marker: rec.marker,
            table: rec.table,
            expected: rec.expected,
            printed_unit: rec.printed_unit.map(|[re, im]| C64::new(re, im)),
            source: rec.source.clone(),
        };
        Ok(CatalogEntry { descriptor, order, unit })
    }
}

pub fn load_catalog() -> Result<Vec<CatalogEntry>, CatalogError> {
    load_catalog_with_precision(DEFAULT_PRECISION_BITS)
}

pub fn load_catalog_with_precision(prec: usize) -> Result<Vec<CatalogEntry>, CatalogError> {
    records()?.iter().map(|r| CatalogEntry::from_record(r, prec)).collect()
}

pub fn catalog_entry(id: &str, prec: usize) -> Result<CatalogEntry, CatalogError> {
    let rec = records()?
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| CatalogError::UnknownField(id.to_string()))?;
    CatalogEntry::from_record(&rec, prec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    fn push(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), ok, detail: detail.into() });
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Re-derives every invariant of a record and reports each check.
pub fn verify_catalog_entry(rec: &CatalogRecord, prec: usize) -> VerificationReport {
    let mut rep = VerificationReport { id: rec.id.clone(), checks: Vec::new() };
    let poly = match MinimalPolynomial::from_i64(rec.minpoly) {
        Ok(p) => {
            rep.push("irreducible", true, p.to_string());
            p
        }
        Err(e) => {
            rep.push("irreducible", false, e.to_string());
            return rep;
        }
    };
    let basis = IntegralBasis::from_i64(rec.integral_basis.denominator, rec.integral_basis.rows);
    let order = match Order::new(poly, basis) {
        Ok(o) => {
            rep.push("order", true, format!("discriminant {}", o.discriminant()));
            o
        }
        Err(e) => {
            rep.push("order", false, e.to_string());
            return rep;
        }
    };
    let mu = rec.mu;
    let zeta = order.from_i64(rec.zeta);
    let one = order.one();
    let neg_one = one.neg();
    let zeta_ok = mu % 2 == 0
        && order.power(&zeta, mu as u64).map(|p| p == one).unwrap_or(false)
        && order.power(&zeta, (mu / 2) as u64).map(|p| p == neg_one).unwrap_or(false)
        && prime_factors(mu)
            .iter()
            .all(|p| order.power(&zeta, (mu / p) as u64).map(|x| x != one).unwrap_or(false));
    rep.push("root_of_unity", zeta_ok, format!("zeta of order {mu}"));

    let (unit, choice) = match (&rec.unit, &rec.embedding) {
        (Some(u), Some(c)) => (order.from_i64(*u), *c),
        (None, _) => {
            rep.push("reference_only", true, "no unit stored");
            return rep;
        }
        (Some(_), None) => {
            rep.push("embedding", false, "unit without embedding choice");
            return rep;
        }
    };
    match order.norm(&unit) {
        Ok(n) => {
            let ok = n == IBig::ONE || n == IBig::NEG_ONE;
            rep.push("unit", ok, if ok { format!("norm {n}") } else { format!("|norm| != 1 (norm {n})") });
        }
        Err(e) => rep.push("unit", false, e.to_string()),
    }
    let emb = match EmbeddingData::new(&order, prec, choice) {
        Ok(e) => e,
        Err(e) => {
            rep.push("embedding", false, e.to_string());
            return rep;
        }
    };
    let base = if rec.squared_base { order.mul(&unit, &unit).unwrap() } else { unit.clone() };
    if base.is_zero() {
        rep.push("pisot", false, "zero base");
    } else {
        match classify_pisot(&order, &base, &emb) {
            Ok(c) => rep.push(
                "pisot",
                c.verdict == PisotVerdict::ComplexPisot,
                format!("{:?}: main {:.6}, other {:.6}", c.verdict, c.modulus_main, c.moduli_others[0]),
            ),
            Err(e) => rep.push("pisot", false, e.to_string()),
        }
    }
    if mu > 2 {
        let z = to_c64(&emb.embed_main(&zeta));
        let target = C64::from_polar(1.0, std::f64::consts::TAU / mu as f64);
        let ok = (z - target).norm() < 1e-12;
        rep.push("zeta_embedding", ok, format!("sigma(zeta) = {:.6}{:+.6}i", z.re, z.im));
    }
    if let Some([re, im]) = rec.printed_unit {
        let v = to_c64(&emb.embed_main(&unit));
        let ok = (v.re - re).abs() <= PRINTED_TOLERANCE && (v.im - im).abs() <= PRINTED_TOLERANCE;
        rep.push(
            "printed_unit",
            ok,
            format!("computed {:.6}{:+.6}i vs printed {re}{im:+}i", v.re, v.im),
        );
    }
    rep
}

#[derive(Clone, Debug)]
pub struct PisotUnit {
    pub unit: OrderElement,
    pub choice: EmbeddingChoice,
    pub modulus: f64,
}

/// Exhaustive search for a complex-Pisot unit of minimal main modulus.
///
/// Ties are broken by preferring `preferred_pair`, then a positive real part
/// in the main embedding, then the smaller coordinate 1-norm, then the
/// lexicographically smaller coordinates.
pub fn find_pisot_unit(
    order: &Order,
    emb: &EmbeddingData,
    coord_bound: i64,
    preferred_pair: Option<usize>,
) -> Result<PisotUnit, CatalogError> {
    if coord_bound < 1 {
        return Err(CatalogError::UnitNotFound(coord_bound));
    }
    let b = coord_bound;
    let ups = [emb.pairs[0].0, emb.pairs[1].0];
    let mut cands: Vec<(f64, usize, [i64; 4], f64)> = Vec::new();
    for c0 in -b..=b {
        for c1 in -b..=b {
            for c2 in -b..=b {
                for c3 in -b..=b {
                    let c = [c0, c1, c2, c3];
                    let z0 = emb.embed_small(&c, ups[0]);
                    let z1 = emb.embed_small(&c, ups[1]);
                    let (m0, m1) = (z0.norm(), z1.norm());
                    if ((m0 * m1) - 1.0).abs() > 1e-6 {
                        continue;
                    }
                    for (p, (main, other, z)) in [(m0, m1, z0), (m1, m0, z1)].into_iter().enumerate() {
                        if main > 1.0 + 1e-9 && other < 1.0 - 1e-9 {
                            cands.push((main, p, c, z.re));
                        }
                    }
                }
            }
        }
    }
    cands.retain(|(_, _, c, _)| order.is_unit(&order.from_i64(*c)).unwrap_or(false));
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(CatalogError::UnitNotFound(coord_bound));
    }
    let mut ties: Vec<_> = cands.into_iter().filter(|c| c.0 <= best * (1.0 + 1e-9)).collect();
    ties.sort_by_key(|(_, p, c, re)| {
        (
            Some(*p) != preferred_pair,
            *re <= 0.0,
            c.iter().map(|x| x.abs()).sum::<i64>(),
            *c,
        )
    });
    let (modulus, pair, coords, _) = ties[0];
    let unit = order.from_i64(coords);
    let choice = EmbeddingChoice { pair, conjugate: false };
    let class = classify_pisot(order, &unit, &emb.with_choice(choice))?;
    if class.verdict != PisotVerdict::ComplexPisot {
        return Err(CatalogError::UnitNotFound(coord_bound));
    }
    Ok(PisotUnit { unit, choice, modulus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_parses() {
        let r = records().unwrap();
        assert!(r.iter().any(|e| e.id == "q-zeta8"));
    }

    #[test]
    fn tampered_unit_fails_verification() {
        let mut rec = records().unwrap().into_iter().find(|r| r.id == "x4-x+1").unwrap();
        rec.unit = Some([0, 2, 0, 0]);
        let rep = verify_catalog_entry(&rec, 128);
        let unit = rep.checks.iter().find(|c| c.name == "unit").unwrap();
        assert!(!unit.ok);
        assert!(unit.detail.contains("|norm| != 1"));
        assert!(CatalogEntry::from_record(&rec, 128).is_err());
    }

    #[test]
    fn bound_zero_finds_nothing() {
        let e = catalog_entry("x4-x+1", 128).unwrap();
        let emb = &e.unit.as_ref().unwrap().embedding;
        assert!(matches!(find_pisot_unit(&e.order, emb, 0, None), Err(CatalogError::UnitNotFound(0))));
    }
}
