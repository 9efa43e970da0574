//! Greedy digit expansion, critical-point representations and unit-sum certificates.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use dashu_int::IBig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogEntry, Marker};
use crate::geometry::{criterion_verdict, minimal_w, CoveringVerdict, Criterion, GeometryError, Region};
use crate::lattice::{enumerate_critical_points, CriticalSet, DigitAlphabet, LatticeError};
use crate::numerics::{cabs, csub, margin, real, real_f64, to_c64, to_f64, EmbeddingChoice, EmbeddingData, NumericsError};
use crate::ring::{LaurentElement, Order, OrderElement, RingError, SmallArith};

pub const DEFAULT_DELTA: f64 = 1e-6;
pub const DELTA_RETRIES: u32 = 10;
/// Default search depth, counted in powers of the catalog unit.
pub const DEFAULT_MAX_DEPTH: usize = 12;
const MAX_AMPLIFICATION: u32 = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum ExpansionError {
    #[error("field {0} has no catalog unit")]
    NoUnit(String),
    #[error("critical set incomplete or delta too large: beta = {0}")]
    CriticalSetIncomplete(String),
    #[error("covering violated numerically at digit {0}")]
    CoveringViolated(usize),
    #[error("no representation of {beta} within depth {max_depth}")]
    NoRepresentation { beta: String, max_depth: usize },
    #[error("certificate for {0} does not verify")]
    CertificateInvalid(String),
    #[error("coordinates exceed i64 during search")]
    Overflow,
    #[error("amplification exponent exceeds {MAX_AMPLIFICATION}")]
    Amplification,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Everything the expansion needs for one field: embedding, base, alphabet, region.
#[derive(Debug)]
pub struct FieldContext {
    pub entry: CatalogEntry,
    pub emb: EmbeddingData,
    /// 0 for the catalog embedding, 1 for the alternate one.
    pub embedding_index: usize,
    pub criterion: Criterion,
    pub verdict: CoveringVerdict,
    pub w: u32,
    /// `eps`, or `eps_tilde` for squared-base fields, Pisot in `emb`.
    pub unit: OrderElement,
    /// The expansion base `eps`.
    pub base: OrderElement,
    pub base_inv: OrderElement,
    pub squared: bool,
    pub alphabet: DigitAlphabet,
    pub region: Region,
    critical: OnceLock<CriticalSet>,
}

impl FieldContext {
    /// Uses the minimal `w` over both embeddings.
    pub fn new(entry: &CatalogEntry) -> Result<Self, ExpansionError> {
        let (unit, emb) = Self::unit_data(entry)?;
        let prec = emb.precision_bits;
        let crit = Criterion::for_mu(entry.descriptor.mu)?;
        let alt_choice = emb.chosen.alternate();
        let alt = emb.with_choice(alt_choice);
        let alt_unit = entry.order.inverse(&unit)?;
        let candidates = [emb.embed_main(&unit), alt.embed_main(&alt_unit)];
        let best = minimal_w(&candidates, crit, prec)?;
        Self::build(entry, best.w, best.embedding_index)
    }

    /// Fixed `w` and embedding (0 = catalog, 1 = alternate).
    pub fn with_w(entry: &CatalogEntry, w: u32, embedding_index: usize) -> Result<Self, ExpansionError> {
        Self::build(entry, w, embedding_index)
    }

    fn unit_data(entry: &CatalogEntry) -> Result<(OrderElement, EmbeddingData), ExpansionError> {
        let u = entry.unit.as_ref().ok_or_else(|| ExpansionError::NoUnit(entry.id().to_string()))?;
        Ok((u.unit.clone(), u.embedding.clone()))
    }

    fn build(entry: &CatalogEntry, w: u32, embedding_index: usize) -> Result<Self, ExpansionError> {
        let order = &entry.order;
        let (mut unit, mut emb) = Self::unit_data(entry)?;
        if embedding_index == 1 {
            emb = emb.with_choice(emb.chosen.alternate());
            unit = order.inverse(&unit)?;
        }
        let prec = emb.precision_bits;
        let squared = entry.unit.as_ref().is_some_and(|u| u.is_squared_base);
        let mu = entry.descriptor.mu;
        let criterion = Criterion::for_mu(mu)?;
        let eps_main = emb.embed_main(&unit);
        let verdict = criterion_verdict(criterion, &eps_main, w, prec)?;
        let region = criterion.region(&eps_main, prec)?;
        let base = if squared { order.mul(&unit, &unit)? } else { unit.clone() };
        let base_inv = order.inverse(&base)?;
        let alphabet = if squared {
            DigitAlphabet::affine_pair(order, &unit, w, &emb)?
        } else {
            DigitAlphabet::roots_of_unity(order, &entry.descriptor.zeta, mu, w, &emb)?
        };
        Ok(FieldContext {
            entry: entry.clone(),
            emb,
            embedding_index,
            criterion,
            verdict,
            w,
            unit,
            base,
            base_inv,
            squared,
            alphabet,
            region,
            critical: OnceLock::new(),
        })
    }

    pub fn order(&self) -> &Order {
        &self.entry.order
    }

    pub fn id(&self) -> &str {
        self.entry.id()
    }

    pub fn choice(&self) -> EmbeddingChoice {
        self.emb.chosen
    }

    /// The enumerated critical set, computed on first use.
    pub fn critical_set(&self) -> Result<&CriticalSet, ExpansionError> {
        if let Some(c) = self.critical.get() {
            return Ok(c);
        }
        let c = enumerate_critical_points(self.order(), &self.emb, &self.base, &self.alphabet, &self.region, 0.0)?;
        Ok(self.critical.get_or_init(|| c))
    }

    /// The critical set with the conjugate bound inflated by `slack`.
    pub fn critical_set_with_slack(&self, slack: f64) -> Result<CriticalSet, ExpansionError> {
        Ok(enumerate_critical_points(self.order(), &self.emb, &self.base, &self.alphabet, &self.region, slack)?)
    }
}

/// `alpha eps^N = beta + sum_{i=0..n} c_i eps^i`.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub amplification: u32,
    /// Alphabet indices `c_n, ..., c_0`.
    pub digits: Vec<usize>,
    pub beta: OrderElement,
    pub delta: f64,
}

impl ExpansionResult {
    /// Exact check of the defining identity.
    pub fn verify(&self, ctx: &FieldContext, alpha: &OrderElement) -> Result<bool, ExpansionError> {
        let o = ctx.order();
        let lhs = o.mul(alpha, &o.power(&ctx.base, self.amplification as u64)?)?;
        let mut acc = o.zero();
        for &d in &self.digits {
            acc = o.add(&o.mul(&acc, &ctx.base)?, &ctx.alphabet.elements[d])?;
        }
        Ok(lhs == o.add(&acc, &self.beta)?)
    }
}

/// `point = sum_{i=1..B} s_{-i} eps^{-i}`.
#[derive(Clone, Debug)]
pub struct CriticalPointReport {
    pub point: OrderElement,
    /// Alphabet indices `s_{-1}, ..., s_{-B}`.
    pub digits: Vec<usize>,
    pub depth: usize,
    /// Depth in powers of the catalog unit; equals `depth` unless squared.
    pub unit_depth: usize,
    /// Integer digits `e_1..e_D` in base `eps_tilde` for squared fields.
    pub unit_digits: Vec<i64>,
}

impl CriticalPointReport {
    pub fn verify(&self, ctx: &FieldContext) -> Result<bool, ExpansionError> {
        let o = ctx.order();
        let lhs = o.mul(&self.point, &o.power(&ctx.base, self.depth as u64)?)?;
        let mut acc = o.zero();
        for &d in &self.digits {
            acc = o.add(&o.mul(&acc, &ctx.base)?, &ctx.alphabet.elements[d])?;
        }
        Ok(lhs == acc)
    }
}

/// One term `coefficient * unit`, with `unit = factor * u^exponent`.
#[derive(Clone, Debug)]
pub struct UnitTerm {
    pub unit: LaurentElement,
    pub coefficient: u32,
    /// `m` when `factor = zeta^m`.
    pub root_index: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct UnitSumCertificate {
    pub target: OrderElement,
    /// `u` above: `eps`, or `eps_tilde` for squared fields.
    pub unit_base: OrderElement,
    pub terms: Vec<UnitTerm>,
    pub w_bound: u32,
}

impl UnitSumCertificate {
    pub fn max_coefficient(&self) -> u32 {
        self.terms.iter().map(|t| t.coefficient).max().unwrap_or(0)
    }

    /// Exact sum, distinctness, unit and coefficient-range checks.
    pub fn verify(&self, order: &Order) -> Result<bool, ExpansionError> {
        if self.terms.iter().any(|t| t.coefficient == 0 || t.coefficient > self.w_bound) {
            return Ok(false);
        }
        if !self.terms.iter().all(|t| order.is_unit(&t.unit.element).unwrap_or(false)) {
            return Ok(false);
        }
        let lo = self.terms.iter().map(|t| t.unit.shift).min().unwrap_or(0).min(0);
        let hi = self.terms.iter().map(|t| t.unit.shift).max().unwrap_or(0).max(0);
        let mut powers = vec![order.one()];
        for _ in lo..hi {
            let next = order.mul(powers.last().unwrap(), &self.unit_base)?;
            powers.push(next);
        }
        let mut seen = BTreeSet::new();
        let mut acc = order.zero();
        for t in &self.terms {
            let v = order.mul(&t.unit.element, &powers[(t.unit.shift - lo) as usize])?;
            if !seen.insert(v.clone()) {
                return Ok(false);
            }
            acc = order.add(&acc, &v.scale(&IBig::from(t.coefficient)))?;
        }
        let target = order.mul(&self.target, &powers[(-lo) as usize])?;
        Ok(acc == target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DugMethod {
    /// `w = 1` and every critical point has a representation.
    Expansion,
    /// Sparse signed-digit rewriting in base `eps_tilde`.
    Rewriting,
    None,
}

#[derive(Clone, Debug)]
pub struct FieldCertification {
    pub id: String,
    pub w: u32,
    pub criterion: Criterion,
    pub embedding: EmbeddingChoice,
    pub critical_count: usize,
    /// Largest minimal depth, in powers of the catalog unit.
    pub max_depth: Option<usize>,
    pub dug: bool,
    pub dug_method: DugMethod,
    pub omega_bound: u32,
    pub reports: Vec<CriticalPointReport>,
    /// Critical points without a representation.
    pub failures: Vec<OrderElement>,
    pub verdict: CoveringVerdict,
    pub borderline_points: usize,
}

impl FieldCertification {
    pub fn marker_consistent(&self, marker: Marker) -> bool {
        self.omega_bound <= marker.omega_bound()
    }
}

struct DepthSearch<'a> {
    sa: &'a SmallArith,
    emb: &'a EmbeddingData,
    base: [i64; 4],
    digits: &'a [[i64; 4]],
    /// Bound on `|r|` in the main embedding.
    main_bound: f64,
    conj_bound: f64,
    base_other: f64,
}

impl DepthSearch<'_> {
    fn other_bound(&self, rem: usize) -> f64 {
        let s: f64 = (1..=rem).map(|k| self.base_other.powi(-(k as i32))).sum();
        self.conj_bound * s
    }

    fn step(&self, r: &[i64; 4], s: &[i64; 4]) -> Result<[i64; 4], ExpansionError> {
        let rb = self.sa.mul(r, &self.base).ok_or(ExpansionError::Overflow)?;
        SmallArith::sub(&rb, s).ok_or(ExpansionError::Overflow)
    }

    /// Lexicographically first digit string of minimal length reaching 0.
    fn run(&self, start: [i64; 4], max_depth: usize) -> Result<Option<Vec<usize>>, ExpansionError> {
        let (mi, oi) = (self.emb.main_index(), self.emb.other_index());
        let slack = |b: f64| b * (1.0 + 1e-7) + 1e-9;
        let main_bound = slack(self.main_bound);
        for d in 1..=max_depth {
            let mut levels: Vec<HashSet<[i64; 4]>> = vec![HashSet::from([start])];
            for j in 0..d {
                let rem = d - j - 1;
                let ob = slack(self.other_bound(rem));
                let mut next = HashSet::new();
                for r in &levels[j] {
                    for s in self.digits {
                        let t = self.step(r, s)?;
                        if rem == 0 {
                            if t == [0; 4] {
                                next.insert(t);
                            }
                            continue;
                        }
                        if self.emb.embed_small(&t, mi).norm() > main_bound
                            || self.emb.embed_small(&t, oi).norm() > ob
                        {
                            continue;
                        }
                        next.insert(t);
                    }
                }
                if next.is_empty() {
                    break;
                }
                levels.push(next);
            }
            if levels.len() == d + 1 {
                return self.reconstruct(start, &levels).map(Some);
            }
        }
        Ok(None)
    }

    fn reconstruct(&self, start: [i64; 4], levels: &[HashSet<[i64; 4]>]) -> Result<Vec<usize>, ExpansionError> {
        let d = levels.len() - 1;
        let mut good: Vec<HashSet<[i64; 4]>> = vec![HashSet::new(); d + 1];
        good[d].insert([0; 4]);
        for j in (0..d).rev() {
            let mut g = HashSet::new();
            for r in &levels[j] {
                for s in self.digits {
                    if good[j + 1].contains(&self.step(r, s)?) {
                        g.insert(*r);
                        break;
                    }
                }
            }
            good[j] = g;
        }
        let mut out = Vec::with_capacity(d);
        let mut r = start;
        for j in 0..d {
            let mut chosen = None;
            for (k, s) in self.digits.iter().enumerate() {
                let t = self.step(&r, s)?;
                if good[j + 1].contains(&t) {
                    chosen = Some((k, t));
                    break;
                }
            }
            let (k, t) = chosen.expect("good sets guarantee a continuation");
            out.push(k);
            r = t;
        }
        Ok(out)
    }
}

/// Minimal-depth representation of a critical point, lexicographic tie-break.
pub fn represent_critical_point(
    ctx: &FieldContext,
    beta: &OrderElement,
    max_depth: usize,
) -> Result<CriticalPointReport, ExpansionError> {
    let order = ctx.order();
    let sa = order.small_arith().ok_or(ExpansionError::Overflow)?;
    let start = beta.to_i64().ok_or(ExpansionError::Overflow)?;
    let emb = &ctx.emb;
    let none = || ExpansionError::NoRepresentation { beta: beta.to_string(), max_depth };
    if beta.is_zero() {
        return Ok(CriticalPointReport { point: beta.clone(), digits: vec![], depth: 0, unit_depth: 0, unit_digits: vec![] });
    }
    if !ctx.squared {
        let base_main = cabs(&emb.embed_main(&ctx.base));
        let one = real(1, emb.precision_bits);
        let [c1, c2] = ctx.alphabet.conj_bounds_f64();
        let search = DepthSearch {
            sa: &sa,
            emb,
            base: ctx.base.to_i64().ok_or(ExpansionError::Overflow)?,
            digits: &ctx.alphabet.small,
            main_bound: c1 / to_f64(&(&base_main - &one)),
            conj_bound: c2,
            base_other: to_f64(&cabs(&emb.embed_other(&ctx.base))),
        };
        let digits = search.run(start, max_depth)?.ok_or_else(none)?;
        let d = digits.len();
        return Ok(CriticalPointReport { point: beta.clone(), digits, depth: d, unit_depth: d, unit_digits: vec![] });
    }
    let w = ctx.w as i64;
    let one = order.one().to_i64().ok_or(ExpansionError::Overflow)?;
    let ints: Vec<[i64; 4]> = (-w..=w).map(|e| one.map(|x| x * e)).collect();
    let unit_main = to_f64(&cabs(&emb.embed_main(&ctx.unit)));
    let search = DepthSearch {
        sa: &sa,
        emb,
        base: ctx.unit.to_i64().ok_or(ExpansionError::Overflow)?,
        digits: &ints,
        main_bound: w as f64 / (unit_main - 1.0),
        conj_bound: w as f64,
        base_other: to_f64(&cabs(&emb.embed_other(&ctx.unit))),
    };
    let idx = search.run(start, 2 * max_depth)?.ok_or_else(none)?;
    let e: Vec<i64> = idx.iter().map(|&k| k as i64 - w).collect();
    let u = ctx.unit.to_i64().ok_or(ExpansionError::Overflow)?;
    let mut digits = Vec::new();
    for k in 0..e.len().div_ceil(2) {
        let d1 = e[2 * k];
        let d0 = e.get(2 * k + 1).copied().unwrap_or(0);
        let c: [i64; 4] = std::array::from_fn(|j| d0 * one[j] + d1 * u[j]);
        digits.push(ctx.alphabet.index_of(&c).expect("affine digits lie in the alphabet"));
    }
    Ok(CriticalPointReport { point: beta.clone(), depth: digits.len(), digits, unit_depth: e.len(), unit_digits: e })
}

/// One greedy pass with a fixed `delta`.
pub fn greedy_expand(ctx: &FieldContext, alpha: &OrderElement, delta: f64) -> Result<ExpansionResult, ExpansionError> {
    let order = ctx.order();
    let emb = &ctx.emb;
    let prec = emb.precision_bits;
    if alpha.is_zero() {
        return Ok(ExpansionResult { amplification: 0, digits: vec![], beta: alpha.clone(), delta });
    }
    let d = real_f64(delta, prec);
    let base_other = cabs(&emb.embed_other(&ctx.base));
    let mut m = cabs(&emb.embed_other(alpha));
    let mut n_amp = 0u32;
    while m >= d {
        m = &m * &base_other;
        n_amp += 1;
        if n_amp > MAX_AMPLIFICATION {
            return Err(ExpansionError::Amplification);
        }
    }
    let a = order.mul(alpha, &order.power(&ctx.base, n_amp as u64)?)?;
    let limit = real(1, prec) + margin(prec);
    // z = a eps^{-(n+1)} with n minimal
    let mut z = a.clone();
    let mut n: i64 = -1;
    while ctx.region.gauge(&emb.embed_main(&z)) > limit {
        z = order.mul(&z, &ctx.base_inv)?;
        n += 1;
    }
    let mut digits = Vec::new();
    let beta = if n < 0 {
        a
    } else {
        let mut y = order.mul(&z, &ctx.base)?;
        let mut k = n;
        loop {
            let yc = emb.embed_main(&y);
            let y64 = to_c64(&yc);
            let mut cand: Vec<(f64, usize)> = ctx
                .alphabet
                .images_main_f64
                .iter()
                .enumerate()
                .filter(|(_, s)| ctx.region.gauge_f64(y64 - **s) <= 1.0 + 1e-6)
                .map(|(i, s)| ((y64 - s).norm(), i))
                .collect();
            cand.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let pick = cand
                .into_iter()
                .map(|(_, i)| i)
                .find(|&i| ctx.region.gauge(&csub(&yc, &ctx.alphabet.images_main[i])) <= limit)
                .ok_or(ExpansionError::CoveringViolated(k as usize))?;
            digits.push(pick);
            let r = order.sub(&y, &ctx.alphabet.elements[pick])?;
            if k == 0 {
                break r;
            }
            y = order.mul(&r, &ctx.base)?;
            k -= 1;
        }
    };
    let res = ExpansionResult { amplification: n_amp, digits, beta, delta };
    if !res.verify(ctx, alpha)? {
        return Err(ExpansionError::CertificateInvalid(alpha.to_string()));
    }
    if !ctx.critical_set()?.contains(&res.beta) {
        return Err(ExpansionError::CriticalSetIncomplete(res.beta.to_string()));
    }
    Ok(res)
}

/// [`greedy_expand`] starting at [`DEFAULT_DELTA`], halving on an incomplete critical set.
pub fn greedy_expand_with_retry(ctx: &FieldContext, alpha: &OrderElement) -> Result<ExpansionResult, ExpansionError> {
    greedy_expand_from(ctx, alpha, DEFAULT_DELTA)
}

pub fn greedy_expand_from(ctx: &FieldContext, alpha: &OrderElement, delta: f64) -> Result<ExpansionResult, ExpansionError> {
    let mut delta = delta;
    let mut last = None;
    for _ in 0..=DELTA_RETRIES {
        match greedy_expand(ctx, alpha, delta) {
            Err(e @ ExpansionError::CriticalSetIncomplete(_)) => last = Some(e),
            other => return other,
        }
        delta /= 2.0;
    }
    Err(last.expect("at least one attempt"))
}

fn root_power(order: &Order, zeta: &OrderElement, mu: u32) -> Result<Vec<OrderElement>, ExpansionError> {
    let mut out = vec![order.one()];
    for _ in 1..mu {
        out.push(order.mul(out.last().unwrap(), zeta)?);
    }
    Ok(out)
}

/// `alpha = zeta^m u^e` for some `|e| <= 16`, when `alpha` is a unit.
fn unit_shortcut(ctx: &FieldContext, alpha: &OrderElement) -> Result<Option<UnitTerm>, ExpansionError> {
    let order = ctx.order();
    if !order.is_unit(alpha)? {
        return Ok(None);
    }
    let mu = ctx.entry.descriptor.mu;
    let roots = root_power(order, &ctx.entry.descriptor.zeta, mu)?;
    let u_inv = order.inverse(&ctx.unit)?;
    let (mut up, mut down) = (alpha.clone(), alpha.clone());
    for e in 0..=16i64 {
        for (cand, exp) in [(&up, e), (&down, -e)] {
            if let Some(m) = roots.iter().position(|r| r == cand) {
                return Ok(Some(UnitTerm {
                    unit: LaurentElement::new(roots[m].clone(), exp),
                    coefficient: 1,
                    root_index: Some(m as u32),
                }));
            }
        }
        up = order.mul(&up, &u_inv)?;
        down = order.mul(&down, &ctx.unit)?;
    }
    Ok(Some(UnitTerm { unit: LaurentElement::new(alpha.clone(), 0), coefficient: 1, root_index: None }))
}

fn push_digit_terms(
    ctx: &FieldContext,
    roots: &[OrderElement],
    digit: usize,
    exponent: i64,
    terms: &mut Vec<UnitTerm>,
) {
    let dec = &ctx.alphabet.decompositions[digit];
    let mu = ctx.entry.descriptor.mu as usize;
    if ctx.squared {
        // d_0 at eps_tilde^{2e}, d_1 at eps_tilde^{2e+1}
        for (d, shift) in [(dec[0], 2 * exponent), (dec[1], 2 * exponent + 1)] {
            if d != 0 {
                let sign = if d > 0 { 0 } else { 1 };
                terms.push(UnitTerm {
                    unit: LaurentElement::new(roots[sign].clone(), shift),
                    coefficient: d.unsigned_abs() as u32,
                    root_index: Some(sign as u32),
                });
            }
        }
    } else {
        for (i, &d) in dec.iter().enumerate() {
            if d != 0 {
                let m = (i + 1) % mu;
                terms.push(UnitTerm {
                    unit: LaurentElement::new(roots[m].clone(), exponent),
                    coefficient: d as u32,
                    root_index: Some(m as u32),
                });
            }
        }
    }
}

/// Writes `alpha` as a sum of distinct units with coefficients at most `w`.
pub fn unit_sum_representation(
    ctx: &FieldContext,
    alpha: &OrderElement,
    max_depth: usize,
) -> Result<UnitSumCertificate, ExpansionError> {
    unit_sum_representation_with_delta(ctx, alpha, max_depth, DEFAULT_DELTA)
}

pub fn unit_sum_representation_with_delta(
    ctx: &FieldContext,
    alpha: &OrderElement,
    max_depth: usize,
    delta: f64,
) -> Result<UnitSumCertificate, ExpansionError> {
    let order = ctx.order();
    let mut cert = UnitSumCertificate { target: alpha.clone(), unit_base: ctx.unit.clone(), terms: vec![], w_bound: ctx.w };
    if alpha.is_zero() {
        return Ok(cert);
    }
    if let Some(t) = unit_shortcut(ctx, alpha)? {
        cert.terms.push(t);
        return Ok(cert);
    }
    let mu = if ctx.squared { 2 } else { ctx.entry.descriptor.mu };
    let roots = if ctx.squared {
        vec![order.one(), order.one().neg()]
    } else {
        root_power(order, &ctx.entry.descriptor.zeta, mu)?
    };
    let exp = greedy_expand_from(ctx, alpha, delta)?;
    let n_amp = exp.amplification as i64;
    let top = exp.digits.len() as i64 - 1;
    for (i, &d) in exp.digits.iter().enumerate() {
        push_digit_terms(ctx, &roots, d, top - i as i64 - n_amp, &mut cert.terms);
    }
    if !exp.beta.is_zero() {
        let rep = represent_critical_point(ctx, &exp.beta, max_depth)?;
        if ctx.squared {
            for (j, &e) in rep.unit_digits.iter().enumerate() {
                if e != 0 {
                    let sign = usize::from(e < 0);
                    cert.terms.push(UnitTerm {
                        unit: LaurentElement::new(roots[sign].clone(), -(j as i64) - 1 - 2 * n_amp),
                        coefficient: e.unsigned_abs() as u32,
                        root_index: Some(sign as u32),
                    });
                }
            }
        } else {
            for (j, &d) in rep.digits.iter().enumerate() {
                push_digit_terms(ctx, &roots, d, -(j as i64) - 1 - n_amp, &mut cert.terms);
            }
        }
    }
    cert.terms.sort_by(|a, b| (a.unit.shift, a.root_index).cmp(&(b.unit.shift, b.root_index)));
    if !cert.verify(order)? {
        return Err(ExpansionError::CertificateInvalid(alpha.to_string()));
    }
    Ok(cert)
}

/// Field-level `(w, C, B)` and the resulting bound on the unit sum height.
pub fn certify_field(ctx: &FieldContext, max_depth: usize) -> Result<FieldCertification, ExpansionError> {
    let crit = ctx.critical_set()?;
    let results: Vec<Result<CriticalPointReport, ExpansionError>> =
        crit.points.par_iter().map(|p| represent_critical_point(ctx, &p.point, max_depth)).collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (p, r) in crit.points.iter().zip(results) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(ExpansionError::NoRepresentation { .. }) => failures.push(p.point.clone()),
            Err(e) => return Err(e),
        }
    }
    let max_depth_found = if failures.is_empty() { Some(reports.iter().map(|r| r.unit_depth).max().unwrap_or(0)) } else { None };
    let mut dug_method = DugMethod::None;
    if ctx.w == 1 && failures.is_empty() {
        dug_method = DugMethod::Expansion;
    } else if failures.is_empty() && crate::rewriting::applies_to(ctx) {
        dug_method = DugMethod::Rewriting;
    }
    let dug = dug_method != DugMethod::None;
    Ok(FieldCertification {
        id: ctx.id().to_string(),
        w: ctx.w,
        criterion: ctx.criterion,
        embedding: ctx.choice(),
        critical_count: crit.count(),
        max_depth: max_depth_found,
        dug,
        dug_method,
        omega_bound: if dug { 1 } else { ctx.w },
        borderline_points: crit.points.iter().filter(|p| p.borderline).count(),
        reports,
        failures,
        verdict: ctx.verdict.clone(),
    })
}
