//! Branch-tracked square roots of q and integrals of √q dz.

use num_complex::Complex64 as C;

use crate::quad::{integrate, integrate_real};
use crate::{QdError, QuadDiff, ZeroPoint};

/// The square root of `q` nearer to `prev`.
pub fn sqrt_near(q: C, prev: C) -> C {
    let r = q.sqrt();
    if (r - prev).norm_sqr() <= (r + prev).norm_sqr() {
        r
    } else {
        -r
    }
}

/// Continue √q along a sampled path from `seed` at `path[0]`, taking the
/// nearer root at each sample.  A sample where both roots are about equally
/// near the previous value is reported; the caller must refine the path.
pub fn sqrt_q_continue(qd: &QuadDiff, path: &[C], seed: C) -> Result<Vec<C>, QdError> {
    let Some(&z0) = path.first() else { return Ok(Vec::new()) };
    let q0 = qd.eval(z0)?;
    if (seed * seed - q0).norm() > 1e-8 * (1.0 + q0.norm()) {
        return Err(QdError::BadSeed);
    }
    let mut out = Vec::with_capacity(path.len());
    let mut prev = seed;
    out.push(seed);
    for (i, &z) in path.iter().enumerate().skip(1) {
        let r = qd.eval(z)?.sqrt();
        // cosine of the angle between r and prev
        let cos = (r * prev.conj()).re / (r.norm() * prev.norm()).max(1e-300);
        if cos.abs() < 0.25 {
            return Err(QdError::StepTooCoarse(i));
        }
        prev = if cos > 0.0 { r } else { -r };
        out.push(prev);
    }
    Ok(out)
}

/// Factored form of √q, giving branches continuous along straight segments.
#[derive(Clone, Debug)]
pub struct SqrtModel {
    pub qd: QuadDiff,
    pub zeros: Vec<ZeroPoint>,
    /// (point, half-exponent numerator): zeros with their orders, and 0 with -m
    factors: Vec<(C, i64)>,
    sqrt_factor: C,
}

/// A segment `a -> b` whose endpoints may be zeros of q.
#[derive(Clone, Copy, Debug)]
struct Segment {
    a: C,
    b: C,
    /// factor indices sitting at the endpoints
    at_a: Option<usize>,
    at_b: Option<usize>,
}

impl SqrtModel {
    pub fn new(qd: &QuadDiff) -> Result<SqrtModel, QdError> {
        let zeros = qd.zeros()?;
        Ok(Self::with_zeros(qd, zeros))
    }

    pub fn with_zeros(qd: &QuadDiff, zeros: Vec<ZeroPoint>) -> SqrtModel {
        let mut factors: Vec<(C, i64)> = zeros.iter().map(|z| (z.location, z.order as i64)).collect();
        if qd.m > 0 {
            factors.push((C::new(0.0, 0.0), -(qd.m as i64)));
        }
        SqrtModel { qd: qd.clone(), zeros, factors, sqrt_factor: qd.factor.sqrt() }
    }

    /// Index of the zero at `z`, if `z` is (numerically) one.
    pub fn zero_at(&self, z: C) -> Option<usize> {
        self.zeros.iter().position(|zp| (zp.location - z).norm() <= 1e-14 * (1.0 + z.norm()))
    }

    fn segment(&self, a: C, b: C) -> Segment {
        Segment { a, b, at_a: self.zero_at(a), at_b: self.zero_at(b) }
    }

    /// Raw continuous branch on the segment at parameter t, where `sa = √t`
    /// and `sb = √(1-t)` are supplied exactly near singular endpoints.
    fn raw(&self, s: &Segment, t: f64, sa: f64, sb: f64) -> C {
        let z = s.a + (s.b - s.a) * t;
        let mut v = self.sqrt_factor;
        for (i, &(r, k)) in self.factors.iter().enumerate() {
            let half = if Some(i) == s.at_a {
                (s.b - r).sqrt() * sa
            } else if Some(i) == s.at_b {
                (s.a - r).sqrt() * sb
            } else {
                (s.a - r).sqrt() * ((z - r) / (s.a - r)).sqrt()
            };
            v *= if k >= 0 { half.powu(k as u32) } else { half.powu((-k) as u32).inv() };
        }
        v
    }

    /// √q on segment `a -> b` at parameter t with the branch fixed by
    /// `reference` = (t_ref, w_ref).
    pub fn branch_on_segment(&self, a: C, b: C, t: f64, reference: (f64, C)) -> C {
        let s = self.segment(a, b);
        let sign = self.sign(&s, reference);
        self.raw(&s, t, t.sqrt(), (1.0 - t).sqrt()) * sign
    }

    fn sign(&self, s: &Segment, reference: (f64, C)) -> f64 {
        let (tr, wr) = reference;
        let r = self.raw(s, tr, tr.sqrt(), (1.0 - tr).sqrt());
        if (r - wr).norm_sqr() <= (r + wr).norm_sqr() {
            1.0
        } else {
            -1.0
        }
    }

    /// ∫ √q dz along the segment with the branch pinned by `reference`.
    /// Endpoints may be zeros; interior points must avoid them.
    pub fn integrate_segment(&self, a: C, b: C, reference: (f64, C), tol: f64) -> C {
        let s = self.segment(a, b);
        let sign = self.sign(&s, reference);
        let dz = s.b - s.a;
        let mut total = C::new(0.0, 0.0);
        // left half: t = u²/2 near a singular a, else linear
        if s.at_a.is_some() {
            let mut f = |u: f64| {
                let t = 0.5 * u * u;
                self.raw(&s, t, u * std::f64::consts::FRAC_1_SQRT_2, (1.0 - t).sqrt()) * (u * dz)
            };
            total += integrate(&mut f, 0.0, 1.0, tol);
        } else {
            let mut f = |t: f64| self.raw(&s, t, t.sqrt(), (1.0 - t).sqrt()) * dz;
            total += integrate(&mut f, 0.0, 0.5, tol);
        }
        if s.at_b.is_some() {
            let mut f = |v: f64| {
                let t = 1.0 - 0.5 * v * v;
                self.raw(&s, t, t.sqrt(), v * std::f64::consts::FRAC_1_SQRT_2) * (v * dz)
            };
            total += integrate(&mut f, 0.0, 1.0, tol);
        } else {
            let mut f = |t: f64| self.raw(&s, t, t.sqrt(), (1.0 - t).sqrt()) * dz;
            total += integrate(&mut f, 0.5, 1.0, tol);
        }
        total * sign
    }

    /// ∫ √q dz along a polyline.  The branch is pinned at the midpoint of
    /// the first segment by `seed` and continued through interior vertices,
    /// which must not be zeros.  Returns the integral and the branch at the
    /// midpoint of the last segment.
    pub fn integrate_path(&self, points: &[C], seed: C, tol: f64) -> (C, C) {
        let mut total = C::new(0.0, 0.0);
        let mut reference = (0.5, seed);
        let mut last_mid = seed;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            total += self.integrate_segment(a, b, reference, tol);
            last_mid = self.branch_on_segment(a, b, 0.5, reference);
            let at_end = self.branch_on_segment(a, b, 1.0, reference);
            reference = (0.0, at_end);
        }
        (total, last_mid)
    }

    /// ∫ |Im √q dz| (horizontal) or ∫ |Re √q dz| (vertical) along a polyline
    /// avoiding zeros, branch seeded at the first vertex.
    pub fn transverse_measure(&self, points: &[C], seed: C, vertical: bool, tol: f64) -> f64 {
        let mut total = 0.0;
        let mut reference = (0.0, seed);
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let s = self.segment(a, b);
            let sign = self.sign(&s, reference);
            let dz = b - a;
            let mut f = |t: f64| {
                let g = self.raw(&s, t, t.sqrt(), (1.0 - t).sqrt()) * dz * sign;
                if vertical {
                    g.re.abs()
                } else {
                    g.im.abs()
                }
            };
            total += integrate_real(&mut f, 0.0, 1.0, tol);
            reference = (0.0, self.branch_on_segment(a, b, 1.0, reference));
        }
        total
    }
}
