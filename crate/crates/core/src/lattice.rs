//! Digit alphabets and enumeration of the critical set `B(eps, Sigma, P)`.

use std::collections::BTreeMap;

use dashu_float::ops::SquareRoot;
use dashu_int::IBig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Membership, Region};
use crate::numerics::{cabs, cx_i, margin, real, real_f64, to_f64, Cx, EmbeddingData, NumericsError, Real, C64};
use crate::ring::{Order, OrderElement, RingError};

/// Largest number of integer points a bounding box may contain.
pub const MAX_BOX_POINTS: u128 = 1_000_000_000;
/// Largest number of digit tuples expanded by [`DigitAlphabet::roots_of_unity`].
pub const MAX_DIGIT_TUPLES: u128 = 20_000_000;

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("bounding box holds {0} points, above the limit")]
    BoxTooLarge(u128),
    #[error("alphabet would need {0} digit tuples")]
    AlphabetTooLarge(u128),
    #[error("unit is not Pisot in the chosen embedding (|eps_2| = {0})")]
    NotPisot(f64),
    #[error("lattice determinant {found} disagrees with sqrt|d_K|/4 = {expected}")]
    Determinant { found: f64, expected: f64 },
    #[error("coordinates exceed i64")]
    Overflow,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AlphabetKind {
    RootsOfUnity { mu: u32, w: u32 },
    AffinePair { w: u32 },
}

/// A finite digit set with its embeddings and conjugate bounds.
#[derive(Clone, Debug)]
pub struct DigitAlphabet {
    pub kind: AlphabetKind,
    pub w: u32,
    /// Distinct digits in increasing coordinate order; contains 0.
    pub elements: Vec<OrderElement>,
    /// `d_1..d_mu` (lexicographically first) or `[d_0, d_1]` per element.
    pub decompositions: Vec<Vec<i64>>,
    pub small: Vec<[i64; 4]>,
    pub images_main: Vec<Cx>,
    pub images_main_f64: Vec<C64>,
    pub images_other_f64: Vec<C64>,
    /// `max |c|` over the digits, for the main and the other embedding.
    pub conj_bounds: [Real; 2],
}

impl DigitAlphabet {
    /// `{ sum_{i=1..mu} d_i zeta^i : 0 <= d_i <= w }`.
    pub fn roots_of_unity(
        order: &Order,
        zeta: &OrderElement,
        mu: u32,
        w: u32,
        emb: &EmbeddingData,
    ) -> Result<Self, LatticeError> {
        let tuples = (w as u128 + 1).pow(mu);
        if tuples > MAX_DIGIT_TUPLES {
            return Err(LatticeError::AlphabetTooLarge(tuples));
        }
        let mut powers = Vec::with_capacity(mu as usize);
        let mut p = zeta.clone();
        for _ in 0..mu {
            powers.push(p.to_i64().ok_or(LatticeError::Overflow)?);
            p = order.mul(&p, zeta)?;
        }
        let mut seen: BTreeMap<[i64; 4], Vec<i64>> = BTreeMap::new();
        let mut d = vec![0i64; mu as usize];
        loop {
            let mut c = [0i64; 4];
            for (di, z) in d.iter().zip(&powers) {
                for k in 0..4 {
                    c[k] += di * z[k];
                }
            }
            seen.entry(c).or_insert_with(|| d.clone());
            // next tuple in lexicographic order
            let mut k = mu as usize;
            loop {
                if k == 0 {
                    return Self::finish(order, AlphabetKind::RootsOfUnity { mu, w }, w, seen, emb);
                }
                k -= 1;
                if d[k] < w as i64 {
                    d[k] += 1;
                    d[k + 1..].iter_mut().for_each(|x| *x = 0);
                    break;
                }
            }
        }
    }

    /// `{ d_0 + d_1 eps_tilde : -w <= d_0, d_1 <= w }`.
    pub fn affine_pair(order: &Order, eps_tilde: &OrderElement, w: u32, emb: &EmbeddingData) -> Result<Self, LatticeError> {
        let e = eps_tilde.to_i64().ok_or(LatticeError::Overflow)?;
        let one = order.one().to_i64().ok_or(LatticeError::Overflow)?;
        let w = w as i64;
        let mut seen = BTreeMap::new();
        for d0 in -w..=w {
            for d1 in -w..=w {
                let c: [i64; 4] = std::array::from_fn(|k| d0 * one[k] + d1 * e[k]);
                seen.entry(c).or_insert_with(|| vec![d0, d1]);
            }
        }
        Self::finish(order, AlphabetKind::AffinePair { w: w as u32 }, w as u32, seen, emb)
    }

    fn finish(
        order: &Order,
        kind: AlphabetKind,
        w: u32,
        seen: BTreeMap<[i64; 4], Vec<i64>>,
        emb: &EmbeddingData,
    ) -> Result<Self, LatticeError> {
        let prec = emb.precision_bits;
        let (mut elements, mut decompositions, mut small) = (Vec::new(), Vec::new(), Vec::new());
        let (mut images_main, mut images_main_f64, mut images_other_f64) = (Vec::new(), Vec::new(), Vec::new());
        let mut bounds = [real(0, prec), real(0, prec)];
        for (c, d) in seen {
            let el = order.from_i64(c);
            let zm = emb.embed_main(&el);
            let zo = emb.embed_other(&el);
            for (b, z) in bounds.iter_mut().zip([&zm, &zo]) {
                let m = cabs(z);
                if m > *b {
                    *b = m;
                }
            }
            images_main_f64.push(emb.embed_small(&c, emb.main_index()));
            images_other_f64.push(emb.embed_small(&c, emb.other_index()));
            images_main.push(zm);
            elements.push(el);
            decompositions.push(d);
            small.push(c);
        }
        Ok(DigitAlphabet {
            kind,
            w,
            elements,
            decompositions,
            small,
            images_main,
            images_main_f64,
            images_other_f64,
            conj_bounds: bounds,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, c: &[i64; 4]) -> Option<usize> {
        self.small.binary_search(c).ok()
    }

    pub fn conj_bounds_f64(&self) -> [f64; 2] {
        [to_f64(&self.conj_bounds[0]), to_f64(&self.conj_bounds[1])]
    }
}

/// Minkowski image of the integral basis in `(Re s_main, Im s_main, Re s_other, Im s_other)`.
#[derive(Clone, Debug)]
pub struct LatticeEmbedding {
    pub basis_matrix: [[Real; 4]; 4],
    pub inverse: [[Real; 4]; 4],
    pub basis_matrix_f64: [[f64; 4]; 4],
    pub inverse_f64: [[f64; 4]; 4],
    pub determinant: Real,
}

impl LatticeEmbedding {
    pub fn new(order: &Order, emb: &EmbeddingData) -> Result<Self, LatticeError> {
        let prec = emb.precision_bits;
        let m = emb.basis_images(emb.main_index());
        let o = emb.basis_images(emb.other_index());
        let e: [[Real; 4]; 4] =
            std::array::from_fn(|j| [m[j].re.clone(), m[j].im.clone(), o[j].re.clone(), o[j].im.clone()]);
        let (inverse, det) = invert4(&e, prec);
        let expected = real_ibig_abs_sqrt(&order.discriminant(), prec) / real(4, prec);
        let found = crate::numerics::rabs(&det);
        let rel = crate::numerics::rabs(&(&found - &expected)) / &expected;
        if rel > real_f64(1e-20, prec) {
            return Err(LatticeError::Determinant { found: to_f64(&found), expected: to_f64(&expected) });
        }
        let f = |a: &[[Real; 4]; 4]| std::array::from_fn(|i| std::array::from_fn(|j| to_f64(&a[i][j])));
        Ok(LatticeEmbedding {
            basis_matrix_f64: f(&e),
            inverse_f64: f(&inverse),
            basis_matrix: e,
            inverse,
            determinant: det,
        })
    }
}

fn real_ibig_abs_sqrt(d: &IBig, prec: usize) -> Real {
    let a = crate::numerics::real_ibig(d, prec);
    crate::numerics::rabs(&a).sqrt()
}

/// Gauss-Jordan inverse and determinant.
fn invert4(m: &[[Real; 4]; 4], prec: usize) -> ([[Real; 4]; 4], Real) {
    let mut a: Vec<Vec<Real>> = (0..4)
        .map(|i| {
            let mut row = m[i].to_vec();
            row.extend((0..4).map(|j| real(i64::from(i == j), prec)));
            row
        })
        .collect();
    let mut det = real(1, prec);
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&x, &y| crate::numerics::rabs(&a[x][col]).partial_cmp(&crate::numerics::rabs(&a[y][col])).unwrap())
            .unwrap();
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col].clone();
                for k in 0..8 {
                    let t = &f * &a[col][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
    }
    (std::array::from_fn(|i| std::array::from_fn(|j| a[i][j + 4].clone())), det)
}

#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub point: OrderElement,
    pub borderline: bool,
}

/// The enumerated set `B`, with `0` reported separately.
#[derive(Clone, Debug)]
pub struct CriticalSet {
    /// Nonzero points, sorted by coordinates.
    pub points: Vec<CriticalPoint>,
    pub contains_zero: bool,
    pub box_bounds: [i64; 4],
    pub scanned: u128,
    /// `C_2 / (1 - |eps_2|)` plus any extra slack.
    pub conjugate_radius: f64,
}

impl CriticalSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, a: &OrderElement) -> bool {
        if a.is_zero() {
            return self.contains_zero;
        }
        self.points.binary_search_by(|p| p.point.cmp(a)).is_ok()
    }

    pub fn elements(&self) -> impl Iterator<Item = &OrderElement> {
        self.points.iter().map(|p| &p.point)
    }
}

/// All `alpha` in the order with `alpha in P` (main embedding) and
/// `|alpha_2| <= C_2/(1-|eps_2|) + extra_slack`. Borderline points are kept.
pub fn enumerate_critical_points(
    order: &Order,
    emb: &EmbeddingData,
    base: &OrderElement,
    alphabet: &DigitAlphabet,
    region: &Region,
    extra_slack: f64,
) -> Result<CriticalSet, LatticeError> {
    let prec = emb.precision_bits;
    let eps2 = cabs(&emb.embed_other(base));
    let one = real(1, prec);
    if eps2 >= one {
        return Err(LatticeError::NotPisot(to_f64(&eps2)));
    }
    let radius = &alphabet.conj_bounds[1] / (&one - &eps2) + real_f64(extra_slack, prec);
    let r2 = to_f64(&radius);
    let lat = LatticeEmbedding::new(order, emb)?;
    let inv = &lat.inverse_f64;
    let verts = region.vertices_f64();
    let box_bounds: [i64; 4] = std::array::from_fn(|k| {
        let planar = verts.iter().map(|v| (v.re * inv[0][k] + v.im * inv[1][k]).abs()).fold(0.0, f64::max);
        let disk = r2 * inv[2][k].hypot(inv[3][k]);
        ((planar + disk) * (1.0 + 1e-9) + 1e-9).floor() as i64
    });
    let scanned: u128 = box_bounds.iter().map(|&b| 2 * b as u128 + 1).product();
    if scanned > MAX_BOX_POINTS {
        return Err(LatticeError::BoxTooLarge(scanned));
    }
    let e = &lat.basis_matrix_f64;
    let slack = 1e-9;
    let r2_sq = (r2 + slack) * (r2 + slack);
    let b = box_bounds;
    let candidates: Vec<[i64; 4]> = (-b[0]..=b[0])
        .into_par_iter()
        .flat_map_iter(|c0| {
            let mut out = Vec::new();
            for c1 in -b[1]..=b[1] {
                for c2 in -b[2]..=b[2] {
                    let base_v: [f64; 4] =
                        std::array::from_fn(|k| c0 as f64 * e[0][k] + c1 as f64 * e[1][k] + c2 as f64 * e[2][k]);
                    for c3 in -b[3]..=b[3] {
                        let v: [f64; 4] = std::array::from_fn(|k| base_v[k] + c3 as f64 * e[3][k]);
                        if v[2] * v[2] + v[3] * v[3] > r2_sq {
                            continue;
                        }
                        if region.gauge_f64(C64::new(v[0], v[1])) > 1.0 + slack {
                            continue;
                        }
                        out.push([c0, c1, c2, c3]);
                    }
                }
            }
            out
        })
        .collect();
    let unit_scale = cx_i(1, 0, prec);
    let m = margin(prec);
    let mut points = Vec::new();
    let mut contains_zero = false;
    for c in candidates {
        let a = order.from_i64(c);
        let inside = region.membership(&emb.embed_main(&a), &unit_scale);
        if inside == Membership::Outside {
            continue;
        }
        let mod2 = cabs(&emb.embed_other(&a));
        let conj_border = crate::numerics::rabs(&(&mod2 - &radius)) <= m;
        if mod2 > radius && !conj_border {
            continue;
        }
        if a.is_zero() {
            contains_zero = true;
        } else {
            points.push(CriticalPoint { point: a, borderline: inside == Membership::Borderline || conj_border });
        }
    }
    points.sort_by(|x, y| x.point.cmp(&y.point));
    Ok(CriticalSet { points, contains_zero, box_bounds, scanned, conjugate_radius: r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rabs, DEFAULT_PRECISION_BITS};

    #[test]
    fn inverse_round_trip() {
        let p = DEFAULT_PRECISION_BITS;
        let m: [[Real; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| real(((i * 7 + j * 3) % 5) as i64 + i64::from(i == j) * 4, p))
        });
        let (inv, det) = invert4(&m, p);
        assert!(rabs(&det) > real(0, p));
        for i in 0..4 {
            for j in 0..4 {
                let s = (0..4).fold(real(0, p), |acc, k| acc + &m[i][k] * &inv[k][j]);
                let want = real(i64::from(i == j), p);
                assert!(rabs(&(s - want)) < real_f64(1e-60, p));
            }
        }
    }
}
