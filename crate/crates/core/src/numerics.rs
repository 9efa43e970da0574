//! High-precision roots, embeddings and complex-Pisot classification.

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ring::{MinimalPolynomial, Order, OrderElement, RingError};

pub type Real = FBig<HalfEven, 2>;
pub type Cx = Complex<Real>;
pub type C64 = Complex<f64>;

pub const DEFAULT_PRECISION_BITS: usize = 256;
pub const MIN_PRECISION_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("polynomial {0} has repeated roots")]
    RepeatedRoots(String),
    #[error("root refinement did not converge for {poly}; residuals {residuals:?}")]
    NoConvergence { poly: String, residuals: Vec<f64> },
    #[error("polynomial {0} is not totally complex")]
    NotTotallyComplex(String),
    #[error("precision {0} bits is below the minimum of {MIN_PRECISION_BITS}")]
    PrecisionTooLow(usize),
    #[error("embedding index {0} out of range")]
    BadIndex(usize),
    #[error("classify_pisot needs a nonzero element")]
    ZeroElement,
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub fn real(v: i64, prec: usize) -> Real {
    Real::from(v).with_precision(prec).value()
}

pub fn real_ibig(v: &IBig, prec: usize) -> Real {
    Real::from(v.clone()).with_precision(prec).value()
}

pub fn real_f64(v: f64, prec: usize) -> Real {
    Real::try_from(v).expect("finite f64").with_precision(prec).value()
}

/// `2^e` at the given precision.
pub fn pow2(e: isize, prec: usize) -> Real {
    Real::from_parts(IBig::ONE, e).with_precision(prec).value()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn cx(re: Real, im: Real) -> Cx {
    Complex::new(re, im)
}

pub fn cx_i(re: i64, im: i64, prec: usize) -> Cx {
    cx(real(re, prec), real(im, prec))
}

pub fn cx_f64(z: C64, prec: usize) -> Cx {
    cx(real_f64(z.re, prec), real_f64(z.im, prec))
}

pub fn to_c64(z: &Cx) -> C64 {
    C64::new(to_f64(&z.re), to_f64(&z.im))
}

pub fn rabs(x: &Real) -> Real {
    if *x < Real::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub fn rmax(a: Real, b: Real) -> Real {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn norm_sqr(z: &Cx) -> Real {
    &z.re * &z.re + &z.im * &z.im
}

pub fn cabs(z: &Cx) -> Real {
    norm_sqr(z).sqrt()
}

pub fn cmul(a: &Cx, b: &Cx) -> Cx {
    cx(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}

pub fn cadd(a: &Cx, b: &Cx) -> Cx {
    cx(&a.re + &b.re, &a.im + &b.im)
}

pub fn csub(a: &Cx, b: &Cx) -> Cx {
    cx(&a.re - &b.re, &a.im - &b.im)
}

pub fn cdiv(a: &Cx, b: &Cx) -> Cx {
    let d = norm_sqr(b);
    cx(
        (&a.re * &b.re + &a.im * &b.im) / &d,
        (&a.im * &b.re - &a.re * &b.im) / &d,
    )
}

pub fn cscale(a: &Cx, k: &Real) -> Cx {
    cx(&a.re * k, &a.im * k)
}

pub fn cconj(a: &Cx) -> Cx {
    cx(a.re.clone(), -a.im.clone())
}

pub fn czero(prec: usize) -> Cx {
    cx_i(0, 0, prec)
}

/// Comparison margin `2^(-prec/4)` used throughout.
pub fn margin(prec: usize) -> Real {
    pow2(-((prec / 4) as isize), prec)
}

pub fn margin_f64(prec: usize) -> f64 {
    2f64.powi(-((prec / 4) as i32))
}

fn horner(coeffs: &[Real], z: &Cx, prec: usize) -> Cx {
    let mut acc = czero(prec);
    for c in coeffs.iter().rev() {
        acc = cmul(&acc, z);
        acc.re = &acc.re + c;
    }
    acc
}

fn durand_kerner(c: &[f64; 5]) -> [C64; 4] {
    let radius = 1.0 + c[..4].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: [C64; 4] = std::array::from_fn(|k| seed.powi(k as i32) * (radius / 2.0));
    let eval = |x: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a);
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..4 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C64::new(1e-12, 1e-12);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// All four roots at `prec` bits, in canonical order (real part, then imaginary part).
pub fn find_roots(p: &MinimalPolynomial, prec: usize) -> Result<[Cx; 4], NumericsError> {
    if prec < MIN_PRECISION_BITS {
        return Err(NumericsError::PrecisionTooLow(prec));
    }
    if p.discriminant() == IBig::ZERO {
        return Err(NumericsError::RepeatedRoots(p.to_string()));
    }
    let cf: [f64; 5] = std::array::from_fn(|k| p.coeffs()[k].to_f64().value());
    let seeds = durand_kerner(&cf);
    let work = prec + 32;
    let coeffs: Vec<Real> = p.coeffs().iter().map(|c| real_ibig(c, work)).collect();
    let deriv: Vec<Real> = (1..5).map(|k| real_ibig(&(&p.coeffs()[k] * IBig::from(k)), work)).collect();
    let tol = pow2(-(prec as isize) + 4, work);
    let mut roots: Vec<Cx> = Vec::with_capacity(4);
    let mut residuals = Vec::new();
    for s in seeds {
        let mut z = cx_f64(s, work);
        let mut converged = false;
        for _ in 0..200 {
            let step = cdiv(&horner(&coeffs, &z, work), &horner(&deriv, &z, work));
            z = csub(&z, &step);
            let scale = rmax(cabs(&z), real(1, work));
            if cabs(&step) <= &tol * &scale {
                converged = true;
                break;
            }
        }
        let res = cabs(&horner(&coeffs, &z, work));
        residuals.push(to_f64(&res));
        if !converged {
            return Err(NumericsError::NoConvergence { poly: p.to_string(), residuals });
        }
        roots.push(cx(z.re.with_precision(prec).value(), z.im.with_precision(prec).value()));
    }
    let limit = pow2(-((prec / 2) as isize), prec);
    let sep = pow2(-((prec / 4) as isize), prec);
    for i in 0..4 {
        let r = cabs(&horner(&coeffs, &roots[i], work));
        let scale = rmax(cabs(&roots[i]), real(1, prec));
        let s2 = &scale * &scale;
        if r > &limit * &s2 * &s2 {
            return Err(NumericsError::NoConvergence { poly: p.to_string(), residuals });
        }
        for j in 0..i {
            if cabs(&csub(&roots[i], &roots[j])) <= sep {
                return Err(NumericsError::NoConvergence { poly: p.to_string(), residuals });
            }
        }
    }
    roots.sort_by(|a, b| {
        let (ar, br) = (to_f64(&a.re), to_f64(&b.re));
        if (ar - br).abs() > 1e-12 * (1.0 + ar.abs()) {
            ar.partial_cmp(&br).unwrap()
        } else {
            a.im.partial_cmp(&b.im).unwrap()
        }
    });
    Ok([roots[0].clone(), roots[1].clone(), roots[2].clone(), roots[3].clone()])
}

/// Which complex embedding is identified with `K` inside `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingChoice {
    /// Conjugate pair, ordered by the canonical index of its upper member.
    pub pair: usize,
    /// Use the lower (negative imaginary part) member of the pair.
    pub conjugate: bool,
}

impl EmbeddingChoice {
    pub fn alternate(self) -> Self {
        EmbeddingChoice { pair: 1 - self.pair, conjugate: false }
    }
}

/// Roots and images of the integral basis under every embedding.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    pub roots: [Cx; 4],
    pub precision_bits: usize,
    /// (upper, lower) canonical indices of each conjugate pair.
    pub pairs: [(usize, usize); 2],
    pub chosen: EmbeddingChoice,
    images: [[Cx; 4]; 4],
    images_f64: [[C64; 4]; 4],
}

impl EmbeddingData {
    pub fn new(order: &Order, prec: usize, chosen: EmbeddingChoice) -> Result<Self, NumericsError> {
        let roots = find_roots(order.poly(), prec)?;
        let sep = 1e-12;
        let ups: Vec<usize> = (0..4).filter(|&i| to_f64(&roots[i].im) > sep).collect();
        if ups.len() != 2 || (0..4).any(|i| to_f64(&roots[i].im).abs() <= sep) {
            return Err(NumericsError::NotTotallyComplex(order.poly().to_string()));
        }
        let lower_of = |u: usize| {
            let target = to_c64(&cconj(&roots[u]));
            (0..4)
                .filter(|&j| to_f64(&roots[j].im) < 0.0)
                .min_by(|&a, &b| {
                    let da = (to_c64(&roots[a]) - target).norm();
                    let db = (to_c64(&roots[b]) - target).norm();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap()
        };
        let pairs = [(ups[0], lower_of(ups[0])), (ups[1], lower_of(ups[1]))];
        if chosen.pair > 1 {
            return Err(NumericsError::BadIndex(chosen.pair));
        }
        let den = real_ibig(&order.basis().denominator, prec);
        let images: [[Cx; 4]; 4] = std::array::from_fn(|r| {
            let z = &roots[r];
            let mut pw = vec![cx_i(1, 0, prec)];
            for k in 1..4 {
                let next = cmul(&pw[k - 1], z);
                pw.push(next);
            }
            std::array::from_fn(|j| {
                let mut acc = czero(prec);
                for k in 0..4 {
                    let c = &order.basis().rows[j][k];
                    if *c != IBig::ZERO {
                        acc = cadd(&acc, &cscale(&pw[k], &real_ibig(c, prec)));
                    }
                }
                cx(&acc.re / &den, &acc.im / &den)
            })
        });
        let images_f64 = std::array::from_fn(|r| std::array::from_fn(|j| to_c64(&images[r][j])));
        Ok(EmbeddingData { roots, precision_bits: prec, pairs, chosen, images, images_f64 })
    }

    pub fn with_choice(&self, chosen: EmbeddingChoice) -> Self {
        EmbeddingData { chosen, ..self.clone() }
    }

    /// Signature `(r1, r2)`.
    pub fn signature(&self) -> (usize, usize) {
        (0, 2)
    }

    pub fn index_of(&self, choice: EmbeddingChoice) -> usize {
        let (u, l) = self.pairs[choice.pair];
        if choice.conjugate {
            l
        } else {
            u
        }
    }

    /// Canonical index of the identified embedding.
    pub fn main_index(&self) -> usize {
        self.index_of(self.chosen)
    }

    /// Canonical index of the upper member of the other pair.
    pub fn other_index(&self) -> usize {
        self.pairs[1 - self.chosen.pair].0
    }

    pub fn main_root(&self) -> &Cx {
        &self.roots[self.main_index()]
    }

    pub fn basis_images(&self, which: usize) -> &[Cx; 4] {
        &self.images[which]
    }

    pub fn basis_images_f64(&self, which: usize) -> &[C64; 4] {
        &self.images_f64[which]
    }

    pub fn embed(&self, a: &OrderElement, which: usize) -> Result<Cx, NumericsError> {
        if which >= 4 {
            return Err(NumericsError::BadIndex(which));
        }
        let prec = self.precision_bits;
        let mut acc = czero(prec);
        for j in 0..4 {
            let c = &a.coords()[j];
            if *c != IBig::ZERO {
                acc = cadd(&acc, &cscale(&self.images[which][j], &real_ibig(c, prec)));
            }
        }
        Ok(acc)
    }

    pub fn embed_main(&self, a: &OrderElement) -> Cx {
        self.embed(a, self.main_index()).expect("valid index")
    }

    pub fn embed_other(&self, a: &OrderElement) -> Cx {
        self.embed(a, self.other_index()).expect("valid index")
    }

    pub fn embed_f64(&self, a: &OrderElement, which: usize) -> C64 {
        let im = &self.images_f64[which];
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..4 {
            acc += im[j] * a.coords()[j].to_f64().value();
        }
        acc
    }

    pub fn embed_small(&self, a: &[i64; 4], which: usize) -> C64 {
        let im = &self.images_f64[which];
        im[0] * a[0] as f64 + im[1] * a[1] as f64 + im[2] * a[2] as f64 + im[3] * a[3] as f64
    }
}

/// Free-function form of [`EmbeddingData::embed`].
pub fn embed(a: &OrderElement, e: &EmbeddingData, which: usize) -> Result<Cx, NumericsError> {
    e.embed(a, which)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PisotVerdict {
    ComplexPisot,
    NotPisot,
    Borderline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PisotClass {
    pub modulus_main: f64,
    pub moduli_others: Vec<f64>,
    pub verdict: PisotVerdict,
    pub root_of_unity: bool,
    pub margin: f64,
}

pub fn classify_pisot(order: &Order, a: &OrderElement, e: &EmbeddingData) -> Result<PisotClass, NumericsError> {
    if a.is_zero() {
        return Err(NumericsError::ZeroElement);
    }
    let prec = e.precision_bits;
    let m = margin(prec);
    let main = cabs(&e.embed_main(a));
    let other = cabs(&e.embed_other(a));
    let one = real(1, prec);
    let root_of_unity = order.root_of_unity_order(a, 12).is_some();
    let near_one = |x: &Real| rabs(&(x - &one)) <= m;
    let verdict = if root_of_unity {
        PisotVerdict::NotPisot
    } else if near_one(&main) || near_one(&other) {
        PisotVerdict::Borderline
    } else if main > &one + &m && other < &one - &m {
        PisotVerdict::ComplexPisot
    } else {
        PisotVerdict::NotPisot
    };
    Ok(PisotClass {
        modulus_main: to_f64(&main),
        moduli_others: vec![to_f64(&other)],
        verdict,
        root_of_unity,
        margin: to_f64(&m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::MinimalPolynomial;

    fn poly(c: [i64; 5]) -> MinimalPolynomial {
        MinimalPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn roots_of_x4_minus_x_plus_1() {
        let r = find_roots(&poly([1, -1, 0, 0, 1]), 256).unwrap();
        // The printed 0.727+0.934i is the unit -gamma.
        let hit = r.iter().any(|z| {
            let z = to_c64(z);
            (z.re + 0.727).abs() < 5e-4 && (z.im + 0.934).abs() < 5e-4
        });
        assert!(hit);
    }

    #[test]
    fn repeated_roots_rejected() {
        let sq = MinimalPolynomial::new_unchecked([1, 0, 2, 0, 1].map(IBig::from)).unwrap();
        assert!(matches!(find_roots(&sq, 128), Err(NumericsError::RepeatedRoots(_))));
    }

    #[test]
    fn one_is_not_pisot() {
        let o = Order::power_basis(poly([2, 0, -2, 0, 1]));
        let e = EmbeddingData::new(&o, 128, EmbeddingChoice { pair: 1, conjugate: false }).unwrap();
        let c = classify_pisot(&o, &o.one(), &e).unwrap();
        assert_eq!(c.verdict, PisotVerdict::NotPisot);
        assert!(c.root_of_unity);
    }
}
