//! Convex regions, covering criteria and a polygon-clipping covering check.

use dashu_float::ops::SquareRoot;
use serde::{Deserialize, Serialize};

use crate::numerics::{
    cdiv, cmul, cx, margin, margin_f64, rabs, real, real_f64, to_c64, to_f64, Cx, Real, C64,
};

/// Largest `w` tried by [`minimal_w`].
pub const W_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("polygon must be convex, counterclockwise and contain 0 in its interior")]
    BadPolygon,
    #[error("parallelogram needs a non-real eps_tilde")]
    DegenerateParallelogram,
    #[error("no w <= {W_CAP} satisfies the {0:?} criterion")]
    NoW(Criterion),
    #[error("mu = {0} has no covering criterion")]
    UnsupportedMu(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Square,
    Hexagon,
    Parallelogram,
    Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Borderline,
}

/// Convex polygon with `0` in its interior, vertices counterclockwise.
#[derive(Clone, Debug)]
pub struct Region {
    pub kind: RegionKind,
    pub vertices: Vec<Cx>,
    pub precision_bits: usize,
    /// Edge functionals `(a, b)` with `a x + b y <= 1` on the region.
    edges: Vec<(Real, Real)>,
    edges_f64: Vec<(f64, f64)>,
    vertices_f64: Vec<C64>,
}

impl Region {
    pub fn polygon(vertices: Vec<Cx>, prec: usize) -> Result<Self, GeometryError> {
        Self::build(RegionKind::Polygon, vertices, prec)
    }

    fn build(kind: RegionKind, vertices: Vec<Cx>, prec: usize) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::BadPolygon);
        }
        let zero = real(0, prec);
        let mut edges = Vec::with_capacity(n);
        for k in 0..n {
            let a = &vertices[k];
            let b = &vertices[(k + 1) % n];
            let c = &vertices[(k + 2) % n];
            let cross = (&b.re - &a.re) * (&c.im - &b.im) - (&b.im - &a.im) * (&c.re - &b.re);
            if cross <= zero {
                return Err(GeometryError::BadPolygon);
            }
            // outward normal (dy, -dx), offset h = n . a
            let nx = &b.im - &a.im;
            let ny = &a.re - &b.re;
            let h = &nx * &a.re + &ny * &a.im;
            if h <= zero {
                return Err(GeometryError::BadPolygon);
            }
            edges.push((&nx / &h, &ny / &h));
        }
        let edges_f64 = edges.iter().map(|(a, b)| (to_f64(a), to_f64(b))).collect();
        let vertices_f64 = vertices.iter().map(to_c64).collect();
        Ok(Region { kind, vertices, precision_bits: prec, edges, edges_f64, vertices_f64 })
    }

    /// Square with vertices `(+-1 +- i)/2`.
    pub fn square(prec: usize) -> Self {
        let h = real_f64(0.5, prec);
        let v = |x: &Real, y: &Real| cx(x.clone(), y.clone());
        let (p, m) = (h.clone(), -h);
        Self::build(RegionKind::Square, vec![v(&p, &p), v(&m, &p), v(&m, &m), v(&p, &m)], prec).unwrap()
    }

    /// Hexagon with vertices `exp(2 pi i (2k+1)/12) / sqrt 3`.
    pub fn hexagon(prec: usize) -> Self {
        let s3 = real(3, prec).sqrt();
        let half = real_f64(0.5, prec);
        let r = &real(1, prec) / &s3;
        let r2 = &half / &s3;
        let z = real(0, prec);
        let verts = vec![
            cx(half.clone(), r2.clone()),
            cx(z.clone(), r.clone()),
            cx(-half.clone(), r2.clone()),
            cx(-half.clone(), -r2.clone()),
            cx(z, -r),
            cx(half, -r2),
        ];
        Self::build(RegionKind::Hexagon, verts, prec).unwrap()
    }

    /// Parallelogram with vertices `(+-1 +- eps_tilde)/2`.
    pub fn parallelogram(eps_tilde: &Cx, prec: usize) -> Result<Self, GeometryError> {
        let m = margin(prec);
        if rabs(&eps_tilde.im) <= m {
            return Err(GeometryError::DegenerateParallelogram);
        }
        let half = real_f64(0.5, prec);
        let p = |s: i64, t: i64| {
            let s = real(s, prec);
            let t = real(t, prec);
            cx((&s + &t * &eps_tilde.re) * &half, (&t * &eps_tilde.im) * &half)
        };
        let mut verts = vec![p(1, 1), p(-1, 1), p(-1, -1), p(1, -1)];
        if eps_tilde.im < real(0, prec) {
            verts.reverse();
        }
        Self::build(RegionKind::Parallelogram, verts, prec)
    }

    pub fn vertices_f64(&self) -> &[C64] {
        &self.vertices_f64
    }

    /// Minkowski gauge: `z` lies in `s P` iff `gauge(z) <= s`.
    pub fn gauge(&self, z: &Cx) -> Real {
        let mut best: Option<Real> = None;
        for (a, b) in &self.edges {
            let v = a * &z.re + b * &z.im;
            best = Some(match best {
                Some(cur) if cur >= v => cur,
                _ => v,
            });
        }
        best.unwrap()
    }

    pub fn gauge_f64(&self, z: C64) -> f64 {
        self.edges_f64.iter().map(|(a, b)| a * z.re + b * z.im).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Tests `z` against `scale * P` with margin `2^(-prec/4)`.
    pub fn membership(&self, z: &Cx, scale: &Cx) -> Membership {
        let g = self.gauge(&cdiv(z, scale));
        let one = real(1, self.precision_bits);
        let m = margin(self.precision_bits);
        if rabs(&(&g - &one)) <= m {
            Membership::Borderline
        } else if g < one {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    pub fn area(&self) -> Real {
        polygon_area(&self.vertices.iter().map(|z| (z.re.clone(), z.im.clone())).collect::<Vec<_>>())
    }

    /// The region mapped by `z -> scale * z`.
    pub fn scaled(&self, scale: &Cx) -> Region {
        let verts = self.vertices.iter().map(|v| cmul(v, scale)).collect();
        Self::build(self.kind, verts, self.precision_bits).expect("nonzero scale keeps convexity")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Square,
    Hexagon,
    Parallelogram,
}

impl Criterion {
    pub fn for_mu(mu: u32) -> Result<Self, GeometryError> {
        match mu {
            2 => Ok(Criterion::Parallelogram),
            m if m % 4 == 0 => Ok(Criterion::Square),
            6 => Ok(Criterion::Hexagon),
            m => Err(GeometryError::UnsupportedMu(m)),
        }
    }

    pub fn region(self, eps_main: &Cx, prec: usize) -> Result<Region, GeometryError> {
        match self {
            Criterion::Square => Ok(Region::square(prec)),
            Criterion::Hexagon => Ok(Region::hexagon(prec)),
            Criterion::Parallelogram => Region::parallelogram(eps_main, prec),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionStatus {
    Pass,
    Fail,
    Borderline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringVerdict {
    pub criterion: Criterion,
    pub w: u32,
    pub status: CriterionStatus,
    /// Left-hand side of the inequality.
    pub value: f64,
    pub bound: f64,
    /// Intermediate quantities of the criterion.
    pub criterion_values: Vec<f64>,
    /// Smallest `w <= W_CAP` passing, if any.
    pub w_required: Option<u32>,
    pub margin: f64,
}

impl CoveringVerdict {
    pub fn passes(&self) -> bool {
        self.status == CriterionStatus::Pass
    }
}

fn bound_for(criterion: Criterion, w: u32, prec: usize) -> Real {
    let w = w as i64;
    match criterion {
        Criterion::Square | Criterion::Parallelogram => real(1 + 2 * w, prec) / real(2, prec),
        Criterion::Hexagon => real(5 * w + 2, prec) / (real(2, prec) * real(3, prec).sqrt()),
    }
}

fn verdict(criterion: Criterion, w: u32, value: Real, parts: Vec<Real>, prec: usize) -> CoveringVerdict {
    let m = margin(prec);
    let status_for = |w: u32| {
        let b = bound_for(criterion, w, prec);
        if rabs(&(&value - &b)) <= m {
            CriterionStatus::Borderline
        } else if value < b {
            CriterionStatus::Pass
        } else {
            CriterionStatus::Fail
        }
    };
    let w_required = (0..=W_CAP).find(|&k| status_for(k) == CriterionStatus::Pass);
    CoveringVerdict {
        criterion,
        w,
        status: status_for(w),
        value: to_f64(&value),
        bound: to_f64(&bound_for(criterion, w, prec)),
        criterion_values: parts.iter().map(to_f64).collect(),
        w_required,
        margin: to_f64(&m),
    }
}

fn max_of(vals: &[Real]) -> Real {
    let mut best = vals[0].clone();
    for v in &vals[1..] {
        if *v > best {
            best = v.clone();
        }
    }
    best
}

/// `eta = eps (1+i)/2`, passes when `max(|Re eta|, |Im eta|) <= (1+2w)/2`.
pub fn square_criterion(eps: &Cx, w: u32, prec: usize) -> CoveringVerdict {
    let half = real_f64(0.5, prec);
    let eta = cmul(eps, &cx(half.clone(), half));
    let parts = vec![eta.re.clone(), eta.im.clone()];
    let value = max_of(&[rabs(&eta.re), rabs(&eta.im)]);
    verdict(Criterion::Square, w, value, parts, prec)
}

/// `eta_k = eps v_k`, passes when `max_k |Im eta_k| <= (5w+2)/(2 sqrt 3)`.
pub fn hexagon_criterion(eps: &Cx, w: u32, prec: usize) -> CoveringVerdict {
    let hex = Region::hexagon(prec);
    let ims: Vec<Real> = hex.vertices.iter().map(|v| cmul(eps, v).im).collect();
    let value = max_of(&ims.iter().map(rabs).collect::<Vec<_>>());
    verdict(Criterion::Hexagon, w, value, ims, prec)
}

/// Coordinates of `(eps_tilde^2/2)(1 +- eps_tilde)` in the basis `1, eps_tilde`,
/// passes when all are at most `(1+2w)/2` in absolute value.
pub fn parallelogram_criterion(eps_tilde: &Cx, w: u32, prec: usize) -> Result<CoveringVerdict, GeometryError> {
    if rabs(&eps_tilde.im) <= margin(prec) {
        return Err(GeometryError::DegenerateParallelogram);
    }
    let half = real_f64(0.5, prec);
    let one = cx(real(1, prec), real(0, prec));
    let sq = cmul(eps_tilde, eps_tilde);
    let mut parts = Vec::new();
    for sign in [1i64, -1] {
        let t = cx(&one.re + &eps_tilde.re * real(sign, prec), &eps_tilde.im * real(sign, prec));
        let z = cmul(&sq, &t);
        let z = cx(&z.re * &half, &z.im * &half);
        let b = &z.im / &eps_tilde.im;
        let a = &z.re - &b * &eps_tilde.re;
        parts.push(a);
        parts.push(b);
    }
    let value = max_of(&parts.iter().map(rabs).collect::<Vec<_>>());
    Ok(verdict(Criterion::Parallelogram, w, value, parts, prec))
}

pub fn criterion_verdict(criterion: Criterion, eps_main: &Cx, w: u32, prec: usize) -> Result<CoveringVerdict, GeometryError> {
    match criterion {
        Criterion::Square => Ok(square_criterion(eps_main, w, prec)),
        Criterion::Hexagon => Ok(hexagon_criterion(eps_main, w, prec)),
        Criterion::Parallelogram => parallelogram_criterion(eps_main, w, prec),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalW {
    pub w: u32,
    /// Index into the candidate list that attains `w` (first on ties).
    pub embedding_index: usize,
    pub per_embedding: Vec<Option<u32>>,
}

/// Smallest `w` in `1..=W_CAP` over the candidate unit values.
pub fn minimal_w(candidates: &[Cx], criterion: Criterion, prec: usize) -> Result<MinimalW, GeometryError> {
    let mut per = Vec::new();
    for eps in candidates {
        let v = criterion_verdict(criterion, eps, 1, prec)?;
        per.push(v.w_required.map(|w| w.max(1)));
    }
    let best = per
        .iter()
        .enumerate()
        .filter_map(|(i, w)| w.map(|w| (w, i)))
        .min()
        .ok_or(GeometryError::NoW(criterion))?;
    Ok(MinimalW { w: best.0, embedding_index: best.1, per_embedding: per })
}

type Pt = (Real, Real);

fn polygon_area(p: &[Pt]) -> Real {
    let n = p.len();
    if n < 3 {
        return Real::ZERO;
    }
    let mut acc = &p[n - 1].0 * &p[0].1 - &p[0].0 * &p[n - 1].1;
    for k in 0..n - 1 {
        acc = acc + (&p[k].0 * &p[k + 1].1 - &p[k + 1].0 * &p[k].1);
    }
    rabs(&acc) / Real::from(2)
}

/// Keeps the part of a convex polygon where `a x + b y <= c` (or `>=` when `!le`).
fn clip(poly: &[Pt], a: &Real, b: &Real, c: &Real, le: bool) -> Vec<Pt> {
    let f = |p: &Pt| {
        let v = a * &p.0 + b * &p.1 - c;
        if le {
            v
        } else {
            -v
        }
    };
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let p = &poly[k];
        let q = &poly[(k + 1) % n];
        let (fp, fq) = (f(p), f(q));
        let p_in = fp <= Real::ZERO;
        let q_in = fq <= Real::ZERO;
        if p_in {
            out.push(p.clone());
        }
        if p_in != q_in {
            let t = &fp / (&fp - &fq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out
}

fn bbox(p: &[Pt]) -> (f64, f64, f64, f64) {
    let xs = p.iter().map(|q| to_f64(&q.0));
    let ys = p.iter().map(|q| to_f64(&q.1));
    (
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStatus {
    Covered,
    NotCovered,
    Borderline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringCheck {
    pub status: CoverStatus,
    pub w: u32,
    pub residual_area: f64,
    /// Area of `P`, the reference for the thresholds.
    pub region_area: f64,
    pub pieces: usize,
    /// Point of `eps P` outside every translate, when not covered.
    pub witness: Option<[f64; 2]>,
}

impl CoveringCheck {
    pub fn covered(&self) -> bool {
        self.status == CoverStatus::Covered
    }
}

/// Residual area below `COVERED_RATIO * |P|` counts as covered.
pub const COVERED_RATIO: f64 = 1e-20;
/// Residual area above `COVERED_RATIO` and below this ratio is borderline.
pub const BORDERLINE_RATIO: f64 = 1e-12;
const DISCARD_RATIO: f64 = 1e-30;

/// Decides `eps P` inside the union of `s + P` by subtracting every translate.
pub fn verify_covering_exact(eps: &Cx, alphabet_points: &[Cx], region: &Region, w: u32) -> CoveringCheck {
    let prec = region.precision_bits;
    let area_p = region.area();
    let discard = &area_p * real_f64(DISCARD_RATIO, prec);
    let target: Vec<Pt> = region.vertices.iter().map(|v| cmul(v, eps)).map(|z| (z.re, z.im)).collect();
    let mut pieces = vec![target];
    let mut order: Vec<&Cx> = alphabet_points.iter().collect();
    order.sort_by(|a, b| {
        let (a, b) = (to_c64(a), to_c64(b));
        (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap()
    });
    let (vx0, vx1, vy0, vy1) = bbox(&region.vertices.iter().map(|z| (z.re.clone(), z.im.clone())).collect::<Vec<_>>());
    for s in order {
        let sf = to_c64(s);
        let mut next = Vec::new();
        for piece in pieces {
            let (x0, x1, y0, y1) = bbox(&piece);
            let slack = 1e-9;
            if x1 < sf.re + vx0 - slack || x0 > sf.re + vx1 + slack || y1 < sf.im + vy0 - slack || y0 > sf.im + vy1 + slack {
                next.push(piece);
                continue;
            }
            // piece minus (s + P): one convex part per edge of P
            let mut inside = piece.clone();
            for (a, b) in &region.edges {
                let c = real(1, prec) + a * &s.re + b * &s.im;
                let outside = clip(&inside, a, b, &c, false);
                if outside.len() >= 3 && polygon_area(&outside) > discard {
                    next.push(outside);
                }
                inside = clip(&inside, a, b, &c, true);
                if inside.len() < 3 {
                    break;
                }
            }
        }
        pieces = next;
    }
    let areas: Vec<Real> = pieces.iter().map(|p| polygon_area(p)).collect();
    let total = areas.iter().fold(Real::ZERO, |acc, a| acc + a);
    let ratio = to_f64(&(&total / &area_p));
    let status = if ratio <= COVERED_RATIO {
        CoverStatus::Covered
    } else if ratio <= BORDERLINE_RATIO {
        CoverStatus::Borderline
    } else {
        CoverStatus::NotCovered
    };
    let witness = if status == CoverStatus::NotCovered {
        let (k, _) = areas.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
        let p = &pieces[k];
        let n = Real::from(p.len() as i64);
        let cx_ = p.iter().fold(Real::ZERO, |acc, q| acc + &q.0) / &n;
        let cy_ = p.iter().fold(Real::ZERO, |acc, q| acc + &q.1) / &n;
        Some([to_f64(&cx_), to_f64(&cy_)])
    } else {
        None
    };
    CoveringCheck {
        status,
        w,
        residual_area: to_f64(&total),
        region_area: to_f64(&area_p),
        pieces: pieces.len(),
        witness,
    }
}

/// Whether `z` lies in some translate `s + P`, with the f64 margin of the precision.
pub fn covered_by_translates(z: C64, alphabet_points: &[C64], region: &Region) -> bool {
    let m = margin_f64(region.precision_bits).max(1e-12);
    alphabet_points.iter().any(|s| region.gauge_f64(z - s) <= 1.0 + m)
}

pub fn membership_f64(region: &Region, z: C64) -> Membership {
    let g = region.gauge_f64(z);
    if (g - 1.0).abs() <= 1e-12 {
        Membership::Borderline
    } else if g < 1.0 {
        Membership::Inside
    } else {
        Membership::Outside
    }
}
