//! Exact arithmetic in an order of a quartic number field.
//!
//! Elements are integer coordinate vectors over an integral basis
//! `b_j = (sum_k R[j][k] gamma^k) / den`. The power basis is the case
//! `den = 1`, `R = I`.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use dashu_int::IBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("minimal polynomial must be monic of degree 4, got leading coefficient {0}")]
    NotMonic(IBig),
    #[error("polynomial {poly} is reducible: {reason}")]
    Reducible { poly: String, reason: String },
    #[error("polynomial {0} has a repeated root")]
    RepeatedRoot(String),
    #[error("integral basis matrix is singular")]
    SingularBasis,
    #[error("integral basis is not closed under multiplication")]
    NotClosed,
    #[error("operands belong to different fields")]
    MixedField,
    #[error("element {0} is not invertible in the order")]
    NotInvertible(String),
    #[error("power-basis vector {0:?} does not lie in the order")]
    NotInOrder(Vec<String>),
    #[error("coefficient too large for the factor search")]
    CoefficientOverflow,
}

/// Arbitrary-precision integer with a JSON form that is a number when it fits
/// in `i64` and a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Int(pub IBig);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Int(IBig::from(v))),
            Repr::Str(s) => s
                .parse::<IBig>()
                .map(Int)
                .map_err(|e| serde::de::Error::custom(format!("bad integer {s:?}: {e}"))),
        }
    }
}

/// Coordinate vector in serializable form.
pub type Coords = [Int; 4];

pub fn coords_from(c: &[IBig; 4]) -> Coords {
    c.clone().map(Int)
}

/// Monic quartic with integer coefficients, ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinimalPolynomial {
    coeffs: [IBig; 5],
}

impl MinimalPolynomial {
    /// Validates monicity and irreducibility.
    pub fn new(coeffs: [IBig; 5]) -> Result<Self, RingError> {
        if coeffs[4] != IBig::ONE {
            return Err(RingError::NotMonic(coeffs[4].clone()));
        }
        let p = MinimalPolynomial { coeffs };
        p.check_irreducible()?;
        Ok(p)
    }

    pub fn from_i64(c: [i64; 5]) -> Result<Self, RingError> {
        Self::new(c.map(IBig::from))
    }

    /// Monic check only; skips the irreducibility test.
    pub fn new_unchecked(coeffs: [IBig; 5]) -> Result<Self, RingError> {
        if coeffs[4] != IBig::ONE {
            return Err(RingError::NotMonic(coeffs[4].clone()));
        }
        Ok(MinimalPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[IBig; 5] {
        &self.coeffs
    }

    pub fn eval(&self, x: &IBig) -> IBig {
        let mut acc = IBig::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Discriminant, equal to `Res(f, f')` for a monic quartic.
    pub fn discriminant(&self) -> IBig {
        let d: Vec<IBig> = (1..5).map(|k| &self.coeffs[k] * IBig::from(k)).collect();
        resultant_formal(&self.coeffs, &d)
    }

    fn check_irreducible(&self) -> Result<(), RingError> {
        let small: Vec<i128> = self
            .coeffs
            .iter()
            .map(|c| i128::try_from(c).map_err(|_| RingError::CoefficientOverflow))
            .collect::<Result<_, _>>()?;
        let fail = |reason: String| RingError::Reducible { poly: self.to_string(), reason };
        let c0 = small[0];
        if c0 == 0 {
            return Err(fail("root 0".into()));
        }
        let divs = divisors(c0.unsigned_abs());
        for &d in &divs {
            for x in [d as i128, -(d as i128)] {
                if self.eval(&IBig::from(x)) == IBig::ZERO {
                    return Err(fail(format!("rational root {x}")));
                }
            }
        }
        let bound = 2 * (1 + small.iter().map(|c| c.abs()).max().unwrap_or(0));
        for &d in &divs {
            for b in [d as i128, -(d as i128)] {
                let dd = c0 / b;
                for a in -bound..=bound {
                    let c = small[3] - a;
                    if b + dd + a * c == small[2] && a * dd + b * c == small[1] {
                        return Err(fail(format!("(x^2{a:+}x{b:+})(x^2{c:+}x{dd:+})")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in (0..5).rev() {
            let c = &self.coeffs[k];
            if *c == IBig::ZERO {
                continue;
            }
            let neg = *c < IBig::ZERO;
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_mag = k == 0 || mag != IBig::ONE;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn divisors(n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Determinant by fraction-free Gaussian elimination.
pub fn det_bareiss(mut m: Vec<Vec<IBig>>) -> IBig {
    let n = m.len();
    if n == 0 {
        return IBig::ONE;
    }
    let mut sign = IBig::ONE;
    let mut prev = IBig::ONE;
    for k in 0..n - 1 {
        if m[k][k] == IBig::ZERO {
            match (k + 1..n).find(|&r| m[r][k] != IBig::ZERO) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return IBig::ZERO,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant of `f` (ascending, degree `f.len()-1`) and `g` (ascending, formal
/// degree `g.len()-1`) via the Sylvester matrix.
pub fn resultant_formal(f: &[IBig], g: &[IBig]) -> IBig {
    let n = f.len() - 1;
    let m = g.len() - 1;
    let size = n + m;
    let mut s = vec![vec![IBig::ZERO; size]; size];
    for r in 0..m {
        for (k, c) in f.iter().rev().enumerate() {
            s[r][r + k] = c.clone();
        }
    }
    for r in 0..n {
        for (k, c) in g.iter().rev().enumerate() {
            s[m + r][r + k] = c.clone();
        }
    }
    det_bareiss(s)
}

/// Integral basis numerators and common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegralBasis {
    pub denominator: IBig,
    pub rows: [[IBig; 4]; 4],
}

impl IntegralBasis {
    pub fn power() -> Self {
        let rows = std::array::from_fn(|j| std::array::from_fn(|k| IBig::from((j == k) as i64)));
        IntegralBasis { denominator: IBig::ONE, rows }
    }

    pub fn from_i64(den: i64, rows: [[i64; 4]; 4]) -> Self {
        IntegralBasis {
            denominator: IBig::from(den),
            rows: rows.map(|r| r.map(IBig::from)),
        }
    }

    pub fn is_power(&self) -> bool {
        *self == Self::power()
    }
}

/// Opaque identity of a field presentation; guards against mixing elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldTag(pub u64);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderElement {
    coords: [IBig; 4],
    tag: FieldTag,
}

impl OrderElement {
    pub fn coords(&self) -> &[IBig; 4] {
        &self.coords
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == IBig::ZERO)
    }

    pub fn to_i64(&self) -> Option<[i64; 4]> {
        let mut out = [0i64; 4];
        for (o, c) in out.iter_mut().zip(&self.coords) {
            *o = i64::try_from(c).ok()?;
        }
        Some(out)
    }

    pub fn serializable(&self) -> Coords {
        coords_from(&self.coords)
    }

    pub fn scale(&self, k: &IBig) -> OrderElement {
        OrderElement { coords: self.coords.clone().map(|c| c * k), tag: self.tag }
    }

    pub fn neg(&self) -> OrderElement {
        OrderElement { coords: self.coords.clone().map(|c| -c), tag: self.tag }
    }
}

impl PartialOrd for OrderElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords).then(self.tag.cmp(&other.tag))
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.coords[0], self.coords[1], self.coords[2], self.coords[3])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Multiplication table with `i64` entries for fast inner loops.
#[derive(Clone, Debug)]
pub struct SmallArith {
    t: [[[i64; 4]; 4]; 4],
}

impl SmallArith {
    pub fn mul(&self, a: &[i64; 4], b: &[i64; 4]) -> Option<[i64; 4]> {
        let mut acc = [0i128; 4];
        for i in 0..4 {
            if a[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if b[j] == 0 {
                    continue;
                }
                let p = a[i] as i128 * b[j] as i128;
                for k in 0..4 {
                    acc[k] += p * self.t[i][j][k] as i128;
                }
            }
        }
        let mut out = [0i64; 4];
        for k in 0..4 {
            out[k] = i64::try_from(acc[k]).ok()?;
        }
        Some(out)
    }

    pub fn sub(a: &[i64; 4], b: &[i64; 4]) -> Option<[i64; 4]> {
        let mut out = [0i64; 4];
        for k in 0..4 {
            out[k] = a[k].checked_sub(b[k])?;
        }
        Some(out)
    }
}

/// An order `Z b_0 + ... + Z b_3` in `Q[X]/(f)`.
#[derive(Clone, Debug)]
pub struct Order {
    poly: MinimalPolynomial,
    basis: IntegralBasis,
    tag: FieldTag,
    table: Box<[[[IBig; 4]; 4]; 4]>,
    adj: [[IBig; 4]; 4],
    det_r: IBig,
    one: [IBig; 4],
}

fn reduce_poly(poly: &MinimalPolynomial, mut p: Vec<IBig>) -> [IBig; 4] {
    let f = poly.coeffs();
    while p.len() > 4 {
        let top = p.pop().unwrap();
        let d = p.len() - 4;
        for j in 0..4 {
            p[d + j] -= &top * &f[j];
        }
    }
    p.resize(4, IBig::ZERO);
    [p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()]
}

fn poly_mul(a: &[IBig], b: &[IBig]) -> Vec<IBig> {
    let mut r = vec![IBig::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == IBig::ZERO {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn adjugate4(m: &[[IBig; 4]; 4]) -> [[IBig; 4]; 4] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // adj[i][j] = (-1)^(i+j) * minor(j, i)
            let minor: Vec<Vec<IBig>> = (0..4)
                .filter(|&r| r != j)
                .map(|r| (0..4).filter(|&c| c != i).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = det_bareiss(minor);
            if (i + j) % 2 == 0 {
                d
            } else {
                -d
            }
        })
    })
}

impl Order {
    pub fn new(poly: MinimalPolynomial, basis: IntegralBasis) -> Result<Self, RingError> {
        let det_r = det_bareiss(basis.rows.iter().map(|r| r.to_vec()).collect());
        if det_r == IBig::ZERO || basis.denominator == IBig::ZERO {
            return Err(RingError::SingularBasis);
        }
        let adj = adjugate4(&basis.rows);
        let mut h = DefaultHasher::new();
        poly.hash(&mut h);
        basis.hash(&mut h);
        let tag = FieldTag(h.finish());
        let zero4: [IBig; 4] = Default::default();
        let mut order = Order {
            poly,
            basis,
            tag,
            table: Box::new(std::array::from_fn(|_| std::array::from_fn(|_| zero4.clone()))),
            adj,
            det_r,
            one: zero4.clone(),
        };
        let d2 = &order.basis.denominator * &order.basis.denominator;
        for i in 0..4 {
            for j in 0..4 {
                let p = reduce_poly(&order.poly, poly_mul(&order.basis.rows[i], &order.basis.rows[j]));
                // b_i b_j = p / den^2, convert with den * adj / det.
                order.table[i][j] = order.power_to_basis(&p, &d2).ok_or(RingError::NotClosed)?;
            }
        }
        let mut e0: [IBig; 4] = zero4;
        e0[0] = IBig::ONE;
        order.one = order.power_to_basis(&e0, &IBig::ONE).ok_or(RingError::NotClosed)?;
        Ok(order)
    }

    pub fn power_basis(poly: MinimalPolynomial) -> Self {
        Self::new(poly, IntegralBasis::power()).expect("power basis is always an order")
    }

    /// Basis coordinates of `p / scale` given in power coordinates, if integral.
    fn power_to_basis(&self, p: &[IBig; 4], scale: &IBig) -> Option<[IBig; 4]> {
        let den = &self.basis.denominator;
        let q = &self.det_r * scale;
        let mut out: [IBig; 4] = Default::default();
        for k in 0..4 {
            let mut s = IBig::ZERO;
            for a in 0..4 {
                s += &p[a] * &self.adj[a][k];
            }
            let s = s * den;
            if &s % &q != IBig::ZERO {
                return None;
            }
            out[k] = s / &q;
        }
        Some(out)
    }

    pub fn poly(&self) -> &MinimalPolynomial {
        &self.poly
    }

    pub fn basis(&self) -> &IntegralBasis {
        &self.basis
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    /// Field discriminant `disc(f) * (det R / den^4)^2`.
    pub fn discriminant(&self) -> IBig {
        let d4 = self.basis.denominator.pow(4);
        let num = self.poly.discriminant() * &self.det_r * &self.det_r;
        let den = &d4 * &d4;
        num / den
    }

    pub fn element(&self, coords: [IBig; 4]) -> OrderElement {
        OrderElement { coords, tag: self.tag }
    }

    pub fn from_i64(&self, c: [i64; 4]) -> OrderElement {
        self.element(c.map(IBig::from))
    }

    pub fn zero(&self) -> OrderElement {
        self.element(Default::default())
    }

    pub fn one(&self) -> OrderElement {
        self.element(self.one.clone())
    }

    pub fn integer(&self, k: &IBig) -> OrderElement {
        self.one().scale(k)
    }

    pub fn basis_element(&self, j: usize) -> OrderElement {
        let mut c: [IBig; 4] = Default::default();
        c[j] = IBig::ONE;
        self.element(c)
    }

    /// The element with the given power-basis coordinates.
    pub fn from_power_coords(&self, p: &[IBig; 4]) -> Result<OrderElement, RingError> {
        self.power_to_basis(p, &IBig::ONE)
            .map(|c| self.element(c))
            .ok_or_else(|| RingError::NotInOrder(p.iter().map(|x| x.to_string()).collect()))
    }

    /// Generator `gamma`, when it has integral coordinates.
    pub fn gamma(&self) -> Result<OrderElement, RingError> {
        let mut p: [IBig; 4] = Default::default();
        p[1] = IBig::ONE;
        self.from_power_coords(&p)
    }

    /// Numerator of the power-basis polynomial; the element equals this / den.
    pub fn power_numerator(&self, a: &OrderElement) -> [IBig; 4] {
        let mut out: [IBig; 4] = Default::default();
        for j in 0..4 {
            if a.coords[j] == IBig::ZERO {
                continue;
            }
            for k in 0..4 {
                out[k] += &a.coords[j] * &self.basis.rows[j][k];
            }
        }
        out
    }

    fn check(&self, a: &OrderElement) -> Result<(), RingError> {
        if a.tag == self.tag {
            Ok(())
        } else {
            Err(RingError::MixedField)
        }
    }

    pub fn arithmetic(&self, a: &OrderElement, b: &OrderElement, kind: ArithKind) -> Result<OrderElement, RingError> {
        match kind {
            ArithKind::Add => self.add(a, b),
            ArithKind::Sub => self.sub(a, b),
            ArithKind::Mul => self.mul(a, b),
        }
    }

    pub fn add(&self, a: &OrderElement, b: &OrderElement) -> Result<OrderElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element(std::array::from_fn(|k| &a.coords[k] + &b.coords[k])))
    }

    pub fn sub(&self, a: &OrderElement, b: &OrderElement) -> Result<OrderElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element(std::array::from_fn(|k| &a.coords[k] - &b.coords[k])))
    }

    pub fn mul(&self, a: &OrderElement, b: &OrderElement) -> Result<OrderElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        let mut out: [IBig; 4] = Default::default();
        for i in 0..4 {
            if a.coords[i] == IBig::ZERO {
                continue;
            }
            for j in 0..4 {
                if b.coords[j] == IBig::ZERO {
                    continue;
                }
                let p = &a.coords[i] * &b.coords[j];
                for k in 0..4 {
                    let t = &self.table[i][j][k];
                    if *t != IBig::ZERO {
                        out[k] += &p * t;
                    }
                }
            }
        }
        Ok(self.element(out))
    }

    pub fn power(&self, a: &OrderElement, mut k: u64) -> Result<OrderElement, RingError> {
        self.check(a)?;
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Field norm as `Res(f, G) / den^4` where `G/den` is the power-basis form.
    pub fn norm(&self, a: &OrderElement) -> Result<IBig, RingError> {
        self.check(a)?;
        let g = self.power_numerator(a);
        let r = resultant_formal(self.poly.coeffs(), &g);
        Ok(r / self.basis.denominator.pow(4))
    }

    pub fn is_unit(&self, a: &OrderElement) -> Result<bool, RingError> {
        let n = self.norm(a)?;
        Ok(n == IBig::ONE || n == IBig::NEG_ONE)
    }

    /// Matrix of multiplication by `a`; column `j` holds `a * b_j`.
    pub fn mult_matrix(&self, a: &OrderElement) -> Result<[[IBig; 4]; 4], RingError> {
        let cols: Vec<OrderElement> =
            (0..4).map(|j| self.mul(a, &self.basis_element(j))).collect::<Result<_, _>>()?;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| cols[j].coords[i].clone())))
    }

    /// Exact inverse by Cramer's rule with an integrality check.
    pub fn inverse(&self, a: &OrderElement) -> Result<OrderElement, RingError> {
        let m = self.mult_matrix(a)?;
        let d = det_bareiss(m.iter().map(|r| r.to_vec()).collect());
        if d == IBig::ZERO {
            return Err(RingError::NotInvertible(a.to_string()));
        }
        let mut out: [IBig; 4] = Default::default();
        for i in 0..4 {
            let mut mi: Vec<Vec<IBig>> = m.iter().map(|r| r.to_vec()).collect();
            for r in 0..4 {
                mi[r][i] = self.one[r].clone();
            }
            let di = det_bareiss(mi);
            if &di % &d != IBig::ZERO {
                return Err(RingError::NotInvertible(a.to_string()));
            }
            out[i] = di / &d;
        }
        Ok(self.element(out))
    }

    /// Exact quotient `a / b` when it lies in the order.
    pub fn div_exact(&self, a: &OrderElement, b: &OrderElement) -> Option<OrderElement> {
        let m = self.mult_matrix(b).ok()?;
        let d = det_bareiss(m.iter().map(|r| r.to_vec()).collect());
        if d == IBig::ZERO {
            return None;
        }
        let mut out: [IBig; 4] = Default::default();
        for i in 0..4 {
            let mut mi: Vec<Vec<IBig>> = m.iter().map(|r| r.to_vec()).collect();
            for r in 0..4 {
                mi[r][i] = a.coords[r].clone();
            }
            let di = det_bareiss(mi);
            if &di % &d != IBig::ZERO {
                return None;
            }
            out[i] = di / &d;
        }
        Some(self.element(out))
    }

    /// Structure constants as `i64`, when every entry fits.
    pub fn small_arith(&self) -> Option<SmallArith> {
        let mut t = [[[0i64; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    t[i][j][k] = i64::try_from(&self.table[i][j][k]).ok()?;
                }
            }
        }
        Some(SmallArith { t })
    }

    /// Smallest `k` in `1..=max_order` with `a^k = 1`.
    pub fn root_of_unity_order(&self, a: &OrderElement, max_order: u64) -> Option<u64> {
        let one = self.one();
        let mut p = a.clone();
        for k in 1..=max_order {
            if p == one {
                return Some(k);
            }
            p = self.mul(&p, a).ok()?;
        }
        None
    }
}

/// `element * base^shift` for a unit `base` fixed by context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentElement {
    pub element: OrderElement,
    pub shift: i64,
}

impl LaurentElement {
    pub fn new(element: OrderElement, shift: i64) -> Self {
        LaurentElement { element, shift }
    }

    /// `value * base^(-at)` as an order element; requires `at <= shift`.
    pub fn scaled_to(&self, order: &Order, base: &OrderElement, at: i64) -> Result<OrderElement, RingError> {
        assert!(at <= self.shift, "scaled_to needs at <= shift");
        let p = order.power(base, (self.shift - at) as u64)?;
        order.mul(&self.element, &p)
    }

    pub fn value_eq(order: &Order, base: &OrderElement, a: &LaurentElement, b: &LaurentElement) -> Result<bool, RingError> {
        let m = a.shift.min(b.shift);
        Ok(a.scaled_to(order, base, m)? == b.scaled_to(order, base, m)?)
    }

    /// Checks `target = sum coeff * term` exactly.
    pub fn sum_equals(
        order: &Order,
        base: &OrderElement,
        terms: &[(LaurentElement, IBig)],
        target: &OrderElement,
    ) -> Result<bool, RingError> {
        let m = terms.iter().map(|(t, _)| t.shift).min().unwrap_or(0).min(0);
        let mut acc = order.zero();
        for (t, c) in terms {
            acc = order.add(&acc, &t.scaled_to(order, base, m)?.scale(c))?;
        }
        let lhs = LaurentElement::new(target.clone(), 0).scaled_to(order, base, m)?;
        Ok(acc == lhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(c: [i64; 5]) -> Order {
        Order::power_basis(MinimalPolynomial::from_i64(c).unwrap())
    }

    #[test]
    fn gamma_times_gamma_cubed_reduces() {
        let o = order([1, -1, 0, 0, 1]);
        let g = o.from_i64([0, 1, 0, 0]);
        let g3 = o.from_i64([0, 0, 0, 1]);
        assert_eq!(o.mul(&g, &g3).unwrap(), o.from_i64([-1, 1, 0, 0]));
        assert_eq!(o.power(&g, 4).unwrap(), o.from_i64([-1, 1, 0, 0]));
    }

    #[test]
    fn square_without_reduction() {
        let o = order([2, 0, -2, 0, 1]);
        let a = o.from_i64([1, 1, 0, 0]);
        assert_eq!(o.mul(&a, &a).unwrap(), o.from_i64([1, 2, 1, 0]));
        assert_eq!(o.power(&a, 0).unwrap(), o.one());
        assert_eq!(o.add(&a, &o.zero()).unwrap(), a);
    }

    #[test]
    fn norms_and_units() {
        let o = order([1, -1, 0, 0, 1]);
        assert_eq!(o.norm(&o.from_i64([0, 1, 0, 0])).unwrap(), IBig::ONE);
        assert_eq!(o.norm(&o.zero()).unwrap(), IBig::ZERO);
        let q = order([2, 0, -2, 0, 1]);
        assert!(q.is_unit(&q.from_i64([1, 1, 0, 0])).unwrap());
        assert!(!q.is_unit(&q.from_i64([2, 0, 0, 0])).unwrap());
        assert_eq!(q.norm(&q.from_i64([2, 0, 0, 0])).unwrap(), IBig::from(16));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = order([1, -1, 0, 0, 1]);
        let b = order([2, 0, -2, 0, 1]);
        assert_eq!(a.add(&a.one(), &b.one()), Err(RingError::MixedField));
    }

    #[test]
    fn reducible_polynomials_rejected() {
        assert!(matches!(MinimalPolynomial::from_i64([1, 0, 2, 0, 1]), Err(RingError::Reducible { .. })));
        assert!(matches!(MinimalPolynomial::from_i64([0, 1, 0, 0, 1]), Err(RingError::Reducible { .. })));
        assert!(matches!(MinimalPolynomial::from_i64([-1, 0, 0, 0, 1]), Err(RingError::Reducible { .. })));
        assert!(matches!(MinimalPolynomial::from_i64([1, 0, 0, 0, 2]), Err(RingError::NotMonic(_))));
    }

    #[test]
    fn polynomial_display() {
        let p = MinimalPolynomial::from_i64([1, -1, 0, 0, 1]).unwrap();
        assert_eq!(p.to_string(), "X^4-X+1");
    }

    #[test]
    fn discriminant_of_x4_minus_x_plus_1() {
        // 256 c^3 - 27 b^4 for X^4 + bX + c
        let p = MinimalPolynomial::from_i64([1, -1, 0, 0, 1]).unwrap();
        assert_eq!(p.discriminant(), IBig::from(229));
    }

    #[test]
    fn int_json_forms() {
        let small = Int(IBig::from(-5));
        assert_eq!(serde_json::to_string(&small).unwrap(), "-5");
        let big = Int(IBig::from(1u128 << 100));
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.starts_with('"'));
        assert_eq!(serde_json::from_str::<Int>(&s).unwrap(), big);
    }
}
