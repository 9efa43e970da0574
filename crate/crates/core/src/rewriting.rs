//! Signed-digit rewriting in base `gamma` with `gamma^4 = gamma - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use dashu_int::IBig;
use serde::{Deserialize, Serialize};

use crate::expansion::FieldContext;
use crate::ring::{LaurentElement, MinimalPolynomial, Order, OrderElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("word violates sparse condition ({condition}) at index {index}")]
    NotSparse { condition: &'static str, index: i64 },
    #[error("no table row matches the neighborhood {0}")]
    NoTableRow(String),
    #[error("rewriting did not terminate within {0} steps")]
    NoTermination(usize),
    #[error("rule {0} is not divisible by X^4-X+1")]
    NotDivisible(&'static str),
    #[error("value changed while rewriting")]
    ValueChanged,
}

/// Finite word `v_k ... v_l` stored as position to nonzero digit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    digits: BTreeMap<i64, i64>,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    /// Digits most significant first, the last one at position `shift`.
    pub fn from_digits(msd_first: &[i64], shift: i64) -> Self {
        let mut w = Word::new();
        for (k, &d) in msd_first.iter().rev().enumerate() {
            w.set(shift + k as i64, d);
        }
        w
    }

    pub fn get(&self, pos: i64) -> i64 {
        self.digits.get(&pos).copied().unwrap_or(0)
    }

    pub fn set(&mut self, pos: i64, d: i64) {
        if d == 0 {
            self.digits.remove(&pos);
        } else {
            self.digits.insert(pos, d);
        }
    }

    pub fn add_at(&mut self, pos: i64, d: i64) {
        let v = self.get(pos) + d;
        self.set(pos, v);
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn low(&self) -> Option<i64> {
        self.digits.keys().next().copied()
    }

    pub fn high(&self) -> Option<i64> {
        self.digits.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.digits.iter().map(|(&p, &d)| (p, d))
    }

    pub fn neg(&self) -> Word {
        Word { digits: self.digits.iter().map(|(&p, &d)| (p, -d)).collect() }
    }

    /// Digits most significant first and the lowest position.
    pub fn to_digits(&self) -> (Vec<i64>, i64) {
        match (self.low(), self.high()) {
            (Some(l), Some(h)) => ((l..=h).rev().map(|p| self.get(p)).collect(), l),
            _ => (vec![], 0),
        }
    }

    /// Part at positions `>= pos` and part below.
    pub fn split_at(&self, pos: i64) -> (Word, Word) {
        let mut hi = Word::new();
        let mut lo = Word::new();
        for (p, d) in self.iter() {
            if p >= pos {
                hi.set(p, d);
            } else {
                lo.set(p, d);
            }
        }
        (hi, lo)
    }

    pub fn merged(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for (p, d) in other.iter() {
            w.add_at(p, d);
        }
        w
    }

    /// `sum v_n gamma^n` as a Laurent element over `order` in base `gamma`.
    pub fn value(&self, order: &Order) -> Result<LaurentElement, RingError> {
        let g = order.gamma()?;
        let Some(l) = self.low() else {
            return Ok(LaurentElement::new(order.zero(), 0));
        };
        let mut acc = order.zero();
        for p in (l..=self.high().unwrap()).rev() {
            acc = order.add(&order.mul(&acc, &g)?, &order.integer(&IBig::from(self.get(p))))?;
        }
        Ok(LaurentElement::new(acc, l))
    }

    pub fn max_abs_digit(&self) -> i64 {
        self.digits.values().map(|d| d.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (d, l) = self.to_digits();
        if d.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        write!(f, "{}@{}", s.join(","), l)
    }
}

impl FromStr for Word {
    type Err = RewriteError;

    /// `"1,0,0,-1,1@0"`, most significant digit first.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RewriteError::Parse(s.to_string());
        let (body, shift) = match s.trim().split_once('@') {
            Some((b, sh)) => (b, sh.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s.trim(), 0),
        };
        let digits = body
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::from_digits(&digits, shift))
    }
}

/// Words of value 0 used for rewriting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteRule {
    W1,
    W2,
    W3,
    W4,
}

impl RewriteRule {
    pub const ALL: [RewriteRule; 4] = [RewriteRule::W1, RewriteRule::W2, RewriteRule::W3, RewriteRule::W4];

    pub fn name(self) -> &'static str {
        match self {
            RewriteRule::W1 => "w1",
            RewriteRule::W2 => "w2",
            RewriteRule::W3 => "w3",
            RewriteRule::W4 => "w4",
        }
    }

    /// `(exponent, coefficient)` pairs.
    pub fn terms(self) -> &'static [(i64, i64)] {
        match self {
            RewriteRule::W1 => &[(4, 1), (1, -1), (0, 1)],
            RewriteRule::W2 => &[(13, 1), (6, 3), (0, 1)],
            RewriteRule::W3 => &[(10, 1), (6, 1), (3, 1), (1, -1), (0, 1)],
            RewriteRule::W4 => &[(7, 1), (6, 1), (5, 1), (0, 1)],
        }
    }

    pub fn pattern(self) -> Word {
        let mut w = Word::new();
        for &(e, c) in self.terms() {
            w.set(e, c);
        }
        w
    }

    fn coefficient(self, rel: i64) -> i64 {
        self.terms().iter().find(|t| t.0 == rel).map_or(0, |t| t.1)
    }
}

pub fn weight(v: &Word) -> u64 {
    v.iter().map(|(_, d)| d.unsigned_abs()).sum()
}

/// `u + sign * shift(pattern, position)`.
pub fn apply_rule(u: &Word, rule: RewriteRule, position: i64, sign: i64) -> Word {
    let mut w = u.clone();
    for &(e, c) in rule.terms() {
        w.add_at(position + e, sign * c);
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    pub position: i64,
    pub sign: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub initial: Word,
    pub steps: Vec<RewriteStep>,
    pub final_word: Word,
}

impl RewriteTrace {
    pub fn replay(&self) -> Word {
        self.steps.iter().fold(self.initial.clone(), |w, s| apply_rule(&w, s.rule, s.position, s.sign))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseViolation {
    pub condition: &'static str,
    pub index: i64,
}

/// First violated condition, by lowest index then condition number.
pub fn check_sparse_conditions(v: &Word) -> Option<SparseViolation> {
    let sg = |x: i64| x.signum();
    for (i, vi) in v.iter() {
        let viol = |c: &'static str| Some(SparseViolation { condition: c, index: i });
        if vi.abs() > 2 {
            return viol("i");
        }
        if [1, 2, 4].iter().any(|&m| sg(v.get(i + m)) * sg(vi) > 0) {
            return viol("ii");
        }
        if [1, 3].iter().any(|&m| sg(v.get(i + m)) * sg(vi) < 0) {
            return viol("iii");
        }
        if sg(v.get(i + 2)) * sg(vi) < 0 && (v.get(i + 4) != 0 || v.get(i + 5) != 0) {
            return viol("iv");
        }
        if sg(v.get(i + 3)) * sg(vi) > 0 && v.get(i + 6) != 0 {
            return viol("v");
        }
    }
    None
}

/// Rule, its position and the reduced digit for one sparsification case.
fn case_step(v: &Word, i: i64, case: char) -> Option<RewriteStep> {
    let vi = v.get(i);
    let s = |m: i64| v.get(i + m).signum() * vi.signum();
    let (rule, position) = match case {
        'a' if vi.abs() >= 3 => (RewriteRule::W2, i - 6),
        'b' if s(1) < 0 => (RewriteRule::W1, i),
        'c' if s(3) < 0 => (RewriteRule::W1, i - 1),
        'd' if s(4) > 0 => (RewriteRule::W1, i),
        'e' if s(2) < 0 && s(5) < 0 => (RewriteRule::W3, i - 1),
        'f' if s(3) > 0 && s(6) > 0 => (RewriteRule::W3, i),
        'g' if s(1) > 0 => (RewriteRule::W4, i - 6),
        'h' if s(2) > 0 => (RewriteRule::W4, i - 5),
        _ => return None,
    };
    let sign = -vi.signum() * rule.coefficient(i - position).signum();
    Some(RewriteStep { rule, position, sign })
}

/// The first weight-reducing case application, lowest index first; failing
/// that, the first weight-neutral application of (g) or (h).
fn next_sparsify_step(v: &Word) -> Option<RewriteStep> {
    let w0 = weight(v);
    let mut neutral = None;
    for (i, _) in v.iter() {
        for case in ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'] {
            let Some(step) = case_step(v, i, case) else { continue };
            let w1 = weight(&apply_rule(v, step.rule, step.position, step.sign));
            if w1 < w0 {
                return Some(step);
            }
            if w1 == w0 && neutral.is_none() {
                neutral = Some(step.clone());
            }
            let fallback = match case {
                'g' => case_step(v, i - 1, 'b'),
                'h' => case_step(v, i, 'b'),
                _ => None,
            };
            if let Some(b) = fallback {
                if weight(&apply_rule(v, b.rule, b.position, b.sign)) < w0 {
                    return Some(b);
                }
            }
        }
    }
    neutral
}

/// Rewriting by cases (a)-(h) until the sparse conditions hold.
pub fn sparsify(u: &Word) -> Result<(Word, RewriteTrace), RewriteError> {
    let w = weight(u) as usize;
    let guard = 10 * w * w + 100;
    let mut v = u.clone();
    let mut steps = Vec::new();
    while let Some(step) = next_sparsify_step(&v) {
        if steps.len() >= guard {
            return Err(RewriteError::NoTermination(guard));
        }
        v = apply_rule(&v, step.rule, step.position, step.sign);
        steps.push(step);
    }
    if let Some(viol) = check_sparse_conditions(&v) {
        return Err(RewriteError::NotSparse { condition: viol.condition, index: viol.index });
    }
    Ok((v.clone(), RewriteTrace { initial: u.clone(), steps, final_word: v }))
}

type Row = (&'static [Option<i64>], &'static [Option<i64>]);

const fn d(x: i64) -> Option<i64> {
    Some(x)
}
const ANY: Option<i64> = None;

/// Windows from `i+4` down to `i-1`.
const TABLE_DELTA6: &[Row] = &[
    (&[d(0), d(0), d(-1), d(0), d(2), d(0)], &[d(-1), d(0), d(-1), d(1), d(1), d(0)]),
    (&[d(0), d(1), d(0), d(0), d(2), d(0)], &[d(-1), d(1), d(0), d(1), d(1), d(0)]),
    (&[d(0), d(0), d(0), d(0), d(2), d(0)], &[d(-1), d(0), d(0), d(1), d(1), d(0)]),
    (&[d(-1), d(0), d(0), d(0), d(2), d(0)], &[d(-1), d(1), d(0), d(0), d(1), d(1)]),
];

/// Windows from `i+6` down to `i-1`.
const TABLE_DELTA5: &[Row] = &[
    (&[ANY, d(1), d(0), d(0), d(0), d(0), d(2), d(0)], &[ANY, d(1), d(-1), d(0), d(0), d(1), d(1), d(0)]),
    (&[ANY, d(1), d(1), d(0), d(0), d(0), d(2), d(0)], &[ANY, d(1), d(0), d(0), d(0), d(1), d(1), d(0)]),
    (&[ANY, d(-1), d(0), d(0), d(0), d(0), d(2), d(0)], &[ANY, d(-1), d(-1), d(0), d(0), d(1), d(1), d(0)]),
    (&[ANY, d(-1), d(-1), d(0), d(0), d(0), d(2), d(0)], &[ANY, d(-1), d(-1), d(1), d(0), d(0), d(1), d(1)]),
    (&[ANY, d(-1), d(0), d(1), d(0), d(0), d(2), d(0)], &[ANY, d(-1), d(-1), d(1), d(0), d(1), d(1), d(0)]),
    (&[d(0), d(-1), d(-1), d(1), d(0), d(0), d(2), d(0)], &[d(1), d(-1), d(-1), d(1), d(1), d(0), d(1), d(1)]),
];

/// Windows from `i+4` down to `i-1`.
const TABLE_DELTA4: &[Row] = &[
    (&[d(-1), d(0), d(0), d(0), d(2), d(0)], &[d(-1), d(1), d(0), d(0), d(1), d(1)]),
    (&[d(-1), d(-1), d(0), d(0), d(2), d(0)], &[d(-1), d(0), d(0), d(0), d(1), d(1)]),
];

const TABLE_DELTA3: &[Row] = &[
    (&[d(0), d(1), d(1), d(0), d(2), d(0)], &[d(-1), d(1), d(1), d(1), d(1), d(0)]),
    (&[d(1), d(1), d(0), d(0), d(2), d(0)], &[d(0), d(1), d(0), d(1), d(1), d(0)]),
    (&[d(0), d(1), d(0), d(0), d(2), d(0)], &[d(-1), d(1), d(0), d(1), d(1), d(0)]),
];

const TABLE_DELTA2: &[Row] = &[
    (&[d(0), d(0), d(-1), d(-1), d(2), d(0)], &[d(-1), d(0), d(-1), d(0), d(1), d(0)]),
    (&[d(0), d(-1), d(-1), d(0), d(2), d(0)], &[d(-1), d(-1), d(-1), d(1), d(1), d(0)]),
];

/// Which table handles a gap `delta` to the next `+-2`, with the window top
/// and the split position, both relative to `i`.
pub fn table_for(delta: Option<i64>) -> (&'static [Row], i64, i64) {
    match delta {
        None => (TABLE_DELTA6, 4, 5),
        Some(x) if x >= 6 => (TABLE_DELTA6, 4, 5),
        Some(5) => (TABLE_DELTA5, 6, 4),
        Some(4) => (TABLE_DELTA4, 4, 3),
        Some(3) => (TABLE_DELTA3, 4, 2),
        _ => (TABLE_DELTA2, 4, 1),
    }
}

/// Rewrites the window whose top digit is at `i + top` by the first matching row.
pub fn apply_case_table(v: &Word, i: i64, rows: &[Row], top: i64) -> Result<Word, RewriteError> {
    for (pat, out) in rows {
        let hit = pat.iter().enumerate().all(|(k, p)| p.is_none_or(|x| v.get(i + top - k as i64) == x));
        if hit {
            let mut w = v.clone();
            for (k, o) in out.iter().enumerate() {
                if let Some(x) = o {
                    w.set(i + top - k as i64, *x);
                }
            }
            return Ok(w);
        }
    }
    let nb: Vec<String> = (i - 1..=i + 7).rev().map(|p| v.get(p).to_string()).collect();
    Err(RewriteError::NoTableRow(format!("{}@{}", nb.join(","), i - 1)))
}

/// Steps of `w1` turning `from` into `to`, by exact division of the difference.
fn w1_steps(from: &Word, to: &Word) -> Result<Vec<RewriteStep>, RewriteError> {
    let mut diff = to.merged(&from.neg());
    let mut steps = Vec::new();
    // divide by X^4 - X + 1 from the top
    while let Some(h) = diff.high() {
        let l = diff.low().unwrap();
        if h - l < 4 {
            return Err(RewriteError::ValueChanged);
        }
        let c = diff.get(h);
        let pos = h - 4;
        for _ in 0..c.unsigned_abs() {
            steps.push(RewriteStep { rule: RewriteRule::W1, position: pos, sign: c.signum() });
        }
        diff = apply_rule(&diff, RewriteRule::W1, pos, -c);
    }
    Ok(steps)
}

/// Rewrites a sparse word into digits `{-1, 0, 1}`.
pub fn normalize(v: &Word) -> Result<(Word, RewriteTrace), RewriteError> {
    if let Some(viol) = check_sparse_conditions(v) {
        return Err(RewriteError::NotSparse { condition: viol.condition, index: viol.index });
    }
    let out = normalize_rec(v)?;
    let steps = w1_steps(v, &out)?;
    Ok((out.clone(), RewriteTrace { initial: v.clone(), steps, final_word: out }))
}

fn normalize_rec(v: &Word) -> Result<Word, RewriteError> {
    let Some(i) = v.iter().find(|(_, d)| d.abs() == 2).map(|(p, _)| p) else {
        return Ok(v.clone());
    };
    if v.get(i) < 0 {
        return Ok(normalize_rec(&v.neg())?.neg());
    }
    let delta = v.iter().find(|&(p, d)| p > i && d.abs() == 2).map(|(p, _)| p - i);
    let (rows, top, split) = table_for(delta);
    let (hi, lo) = v.split_at(i + split);
    let merged = normalize_rec(&hi)?.merged(&lo);
    apply_case_table(&merged, i, rows, top)
}

/// Sparsify, then normalize.
pub fn rewrite_to_signed(x: &Word) -> Result<(Word, RewriteTrace), RewriteError> {
    let (s, t1) = sparsify(x)?;
    let (n, t2) = normalize(&s)?;
    let mut steps = t1.steps;
    steps.extend(t2.steps);
    Ok((n.clone(), RewriteTrace { initial: x.clone(), steps, final_word: n }))
}

/// The power-basis order of `X^4 - X + 1`.
pub fn gamma_order() -> Order {
    Order::power_basis(MinimalPolynomial::from_i64([1, -1, 0, 0, 1]).expect("irreducible"))
}

pub fn values_equal(order: &Order, a: &Word, b: &Word) -> Result<bool, RingError> {
    let g = order.gamma()?;
    LaurentElement::value_eq(order, &g, &a.value(order)?, &b.value(order)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub rule: RewriteRule,
    pub divisible: bool,
    /// `(position, multiplicity)` of shifted copies of `w1` summing to the rule.
    pub combination: Vec<(i64, i64)>,
}

/// Divides each rule by `X^4 - X + 1` and records the quotient.
pub fn validate_derived_rules() -> Result<Vec<RuleCheck>, RewriteError> {
    let mut out = Vec::new();
    for rule in RewriteRule::ALL {
        let steps = w1_steps(&Word::new(), &rule.pattern()).map_err(|_| RewriteError::NotDivisible(rule.name()))?;
        let mut comb: BTreeMap<i64, i64> = BTreeMap::new();
        for s in &steps {
            *comb.entry(s.position).or_default() += s.sign;
        }
        let combination: Vec<(i64, i64)> = comb.into_iter().filter(|&(_, c)| c != 0).collect();
        let rebuilt = combination.iter().fold(Word::new(), |w, &(p, c)| apply_rule(&w, RewriteRule::W1, p, c));
        if rebuilt != rule.pattern() {
            return Err(RewriteError::NotDivisible(rule.name()));
        }
        out.push(RuleCheck { rule, divisible: true, combination });
    }
    Ok(out)
}

/// Power-basis coordinates as a word `x_3 x_2 x_1 x_0`.
pub fn word_of(order: &Order, a: &OrderElement) -> Word {
    let p = order.power_numerator(a);
    let digits: Vec<i64> = p.iter().rev().map(|c| i64::try_from(c.clone()).expect("small coordinates")).collect();
    Word::from_digits(&digits, 0)
}

/// Whether the context is the `X^4 - X + 1` field with its power basis.
pub fn applies_to(ctx: &FieldContext) -> bool {
    let o = ctx.order();
    o.poly().coeffs() == &[1, -1, 0, 0, 1].map(IBig::from) && o.basis().is_power() && validate_derived_rules().is_ok()
}
