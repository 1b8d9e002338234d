use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::poly::{aberth, cluster, horner, magnitude_bound, polish_multiple};
use crate::QdError;

/// Multiple roots found closer than this (relative) are merged.
pub const ROOT_CLUSTER_RADIUS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Surface {
    Plane,
    PuncturedPlane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pole {
    Zero,
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FoliationKind {
    Horizontal,
    Vertical,
}

impl FoliationKind {
    pub fn other(self) -> FoliationKind {
        match self {
            FoliationKind::Horizontal => FoliationKind::Vertical,
            FoliationKind::Vertical => FoliationKind::Horizontal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub location: C,
    pub order: usize,
}

/// `factor · p(z) / z^m · dz²` with p monic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiff {
    pub surface: Surface,
    /// Coefficients of p, leading first.
    pub coeffs: Vec<C>,
    /// Pole order at 0 (0 on the plane).
    pub m: usize,
    /// Pole order at infinity.
    pub n: usize,
    /// Constant in front of p; 1 for normalized input.
    #[serde(default = "one")]
    pub factor: C,
}

fn one() -> C {
    C::new(1.0, 0.0)
}

/// Argument in [-pi, pi).
pub fn principal_arg(z: C) -> f64 {
    let a = z.arg();
    if a >= PI {
        a - 2.0 * PI
    } else {
        a
    }
}

impl QuadDiff {
    /// `p(z) dz²` with p monic and centered.  Degree 0 and 1 are accepted.
    pub fn plane(coeffs: Vec<C>) -> Result<QuadDiff, QdError> {
        let q = QuadDiff { surface: Surface::Plane, n: coeffs.len().saturating_sub(1) + 4, m: 0, coeffs, factor: one() };
        q.validate()?;
        Ok(q)
    }

    /// `p(z)/z^m dz²` with p monic of degree n + m - 4 and p(0) != 0.
    pub fn punctured(n: usize, m: usize, coeffs: Vec<C>) -> Result<QuadDiff, QdError> {
        let q = QuadDiff { surface: Surface::PuncturedPlane, n, m, coeffs, factor: one() };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QdError> {
        if self.coeffs.is_empty() {
            return Err(QdError::ZeroLeading);
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) || !self.factor.is_finite() {
            return Err(QdError::NonFinite);
        }
        if self.factor == C::new(0.0, 0.0) {
            return Err(QdError::ZeroLeading);
        }
        if self.coeffs[0] != one() {
            return Err(QdError::NotMonic(format!("{}", self.coeffs[0])));
        }
        let deg = self.degree();
        match self.surface {
            Surface::Plane => {
                if self.m != 0 || self.n != deg + 4 {
                    return Err(QdError::Degree { expected: self.n.saturating_sub(4), found: deg });
                }
                if deg >= 1 && self.coeffs[1] != C::new(0.0, 0.0) {
                    return Err(QdError::NotCentered(format!("{}", self.coeffs[1])));
                }
            }
            Surface::PuncturedPlane => {
                if self.n < 3 {
                    return Err(QdError::PoleOrder(self.n));
                }
                if self.m < 3 {
                    return Err(QdError::PoleOrder(self.m));
                }
                if deg + 4 != self.n + self.m {
                    return Err(QdError::Degree { expected: self.n + self.m - 4, found: deg });
                }
                if self.coeffs[deg] == C::new(0.0, 0.0) {
                    return Err(QdError::ZeroAtPuncture);
                }
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The same differential times a constant.
    pub fn scaled(&self, c: C) -> QuadDiff {
        QuadDiff { factor: self.factor * c, ..self.clone() }
    }

    /// `-q`; its horizontal foliation is the vertical foliation of `q`.
    pub fn negated(&self) -> QuadDiff {
        self.scaled(C::new(-1.0, 0.0))
    }

    /// The differential whose horizontal foliation is the `kind` foliation of `self`.
    pub fn oriented(&self, kind: FoliationKind) -> QuadDiff {
        match kind {
            FoliationKind::Horizontal => self.clone(),
            FoliationKind::Vertical => self.negated(),
        }
    }

    pub fn eval_p(&self, z: C) -> C {
        horner(&self.coeffs, z)
    }

    /// q(z); fails at z = 0 on the punctured plane.
    pub fn eval(&self, z: C) -> Result<C, QdError> {
        if self.m > 0 && z == C::new(0.0, 0.0) {
            return Err(QdError::Domain);
        }
        Ok(self.factor * self.eval_p(z) / z.powu(self.m as u32))
    }

    /// Roots of p with multiplicities.
    pub fn zeros(&self) -> Result<Vec<ZeroPoint>, QdError> {
        self.zeros_with_radius(ROOT_CLUSTER_RADIUS)
    }

    pub fn zeros_with_radius(&self, radius: f64) -> Result<Vec<ZeroPoint>, QdError> {
        let raw = aberth(&self.coeffs, 2000).ok_or(QdError::RootFinding)?;
        let mut out: Vec<ZeroPoint> = cluster(&raw, radius)
            .into_iter()
            .map(|(z, k)| ZeroPoint { location: polish_multiple(&self.coeffs, z, k), order: k })
            .collect();
        for zp in &out {
            let r = horner(&self.coeffs, zp.location).norm();
            let tol = 1e-12 * magnitude_bound(&self.coeffs, zp.location);
            // a k-fold root is only located to about eps^(1/k)
            let slack = if zp.order == 1 { 1.0 } else { 1e4 };
            if r > tol * slack && r > 1e-300 {
                return Err(QdError::RootFinding);
            }
        }
        out.sort_by(|a, b| {
            (a.location.re, a.location.im).partial_cmp(&(b.location.re, b.location.im)).unwrap()
        });
        Ok(out)
    }

    pub fn pole_order(&self, pole: Pole) -> Option<usize> {
        match pole {
            Pole::Infinity => Some(self.n),
            Pole::Zero => (self.m > 0).then_some(self.m),
        }
    }

    pub fn poles(&self) -> Vec<Pole> {
        match self.surface {
            Surface::Plane => vec![Pole::Infinity],
            Surface::PuncturedPlane => vec![Pole::Infinity, Pole::Zero],
        }
    }

    /// Leading Laurent coefficient of the `kind`-oriented differential in the
    /// local coordinate u (u = z at 0, u = 1/z at infinity).
    pub fn leading_coefficient(&self, pole: Pole, kind: FoliationKind) -> Option<C> {
        let q = self.oriented(kind);
        match pole {
            Pole::Infinity => Some(q.factor),
            Pole::Zero => (self.m > 0).then(|| q.factor * self.coeffs[self.degree()]),
        }
    }

    /// Rotation of the pole frame: Arg(lead) / (N - 2).
    pub fn frame_angle(&self, pole: Pole, kind: FoliationKind) -> Option<f64> {
        let n = self.pole_order(pole)?;
        if n < 3 {
            return None;
        }
        Some(principal_arg(self.leading_coefficient(pole, kind)?) / (n - 2) as f64)
    }

    fn to_z_angle(pole: Pole, u_angle: f64) -> f64 {
        let a = match pole {
            Pole::Infinity => -u_angle,
            Pole::Zero => u_angle,
        };
        a.rem_euclid(2.0 * PI)
    }

    /// z-angle along which leaves of `kind` run into `pole` with index `j`.
    pub fn end_direction(&self, pole: Pole, kind: FoliationKind, j: usize) -> Option<f64> {
        let n = self.pole_order(pole)? as f64 - 2.0;
        let psi = 2.0 * PI * j as f64 / n;
        Some(Self::to_z_angle(pole, psi + self.frame_angle(pole, kind)?))
    }

    /// z-angle at the middle of the half-plane labelled `label` in the
    /// `kind` foliation; it is the direction of the other foliation's leaves.
    pub fn region_direction(&self, pole: Pole, kind: FoliationKind, label: usize) -> Option<f64> {
        let n = self.pole_order(pole)? as f64 - 2.0;
        let psi = 2.0 * PI * (label as f64 + 0.5) / n;
        Some(Self::to_z_angle(pole, psi + self.frame_angle(pole, kind)?))
    }

    /// Nearest end index (1..=N-2) for a leaf of `kind` approaching `pole` at
    /// z-angle `angle`, together with the offset in units of grid spacing.
    pub fn classify_end(&self, pole: Pole, kind: FoliationKind, angle: f64) -> Option<(usize, f64)> {
        let n = self.pole_order(pole)? - 2;
        let u_angle = match pole {
            Pole::Infinity => -angle,
            Pole::Zero => angle,
        };
        let x = (u_angle - self.frame_angle(pole, kind)?) * n as f64 / (2.0 * PI);
        let j = x.round();
        let idx = (j as i64).rem_euclid(n as i64) as usize;
        Some((if idx == 0 { n } else { idx }, x - j))
    }

    /// Label of the half-plane containing z-angle `angle` near `pole`.
    pub fn classify_region(&self, pole: Pole, kind: FoliationKind, angle: f64) -> Option<(usize, f64)> {
        let n = self.pole_order(pole)? - 2;
        let u_angle = match pole {
            Pole::Infinity => -angle,
            Pole::Zero => angle,
        };
        let x = (u_angle - self.frame_angle(pole, kind)?) * n as f64 / (2.0 * PI) - 0.5;
        let j = x.round();
        let idx = (j as i64).rem_euclid(n as i64) as usize;
        Some((if idx == 0 { n } else { idx }, x - j))
    }

    /// Coefficient a with q ~ a (z - z0)^k near a zero of order k.
    pub fn local_coefficient(&self, zeros: &[ZeroPoint], idx: usize) -> C {
        let z0 = zeros[idx].location;
        let mut a = self.factor / z0.powu(self.m as u32);
        for (i, zp) in zeros.iter().enumerate() {
            if i != idx {
                a *= (z0 - zp.location).powu(zp.order as u32);
            }
        }
        a
    }

    /// Launch angles of the k + 2 critical leaves of `kind` at a zero,
    /// counterclockwise from the first one at or above angle 0.
    pub fn prong_angles(&self, zeros: &[ZeroPoint], idx: usize, kind: FoliationKind) -> Vec<f64> {
        let k = zeros[idx].order;
        let mut a = self.local_coefficient(zeros, idx);
        if kind == FoliationKind::Vertical {
            a = -a;
        }
        let base = -principal_arg(a) / (k + 2) as f64;
        let step = 2.0 * PI / (k + 2) as f64;
        let mut out: Vec<f64> = (0..k + 2).map(|j| (base + step * j as f64).rem_euclid(2.0 * PI)).collect();
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }

    /// Distance from a zero to the nearest other singular point.
    pub fn zero_spacing(&self, zeros: &[ZeroPoint], idx: usize) -> f64 {
        let z0 = zeros[idx].location;
        let mut d = f64::INFINITY;
        for (i, zp) in zeros.iter().enumerate() {
            if i != idx {
                d = d.min((zp.location - z0).norm());
            }
        }
        if self.m > 0 {
            d = d.min(z0.norm());
        }
        if d.is_infinite() {
            1.0
        } else {
            d
        }
    }
}

/// Standard asymptotic directions at a pole of order `pole_order` with
/// leading coefficient 1, sorted in [0, 2π).
pub fn asymptotic_directions(pole_order: usize, kind: FoliationKind) -> Result<Vec<f64>, QdError> {
    if pole_order < 3 {
        return Err(QdError::PoleOrder(pole_order));
    }
    let n = (pole_order - 2) as f64;
    let shift = match kind {
        FoliationKind::Horizontal => 0.0,
        FoliationKind::Vertical => 0.5,
    };
    let mut out: Vec<f64> = (1..=pole_order - 2).map(|k| (2.0 * PI * (k as f64 + shift) / n).rem_euclid(2.0 * PI)).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

pub fn half_plane_count(pole_order: usize) -> Result<usize, QdError> {
    if pole_order < 3 {
        return Err(QdError::PoleOrder(pole_order));
    }
    Ok(pole_order - 2)
}

/// Result of bringing raw coefficients to normal form by z = alpha·w + beta.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub qd: QuadDiff,
    pub alpha: C,
    pub beta: C,
}

impl Normalized {
    /// Coefficients of the original polynomial (leading first) recovered by
    /// undoing the change of variables.
    pub fn original_coeffs(&self) -> Vec<C> {
        // q_raw(z) dz² = q(w) dw², w = (z - beta)/alpha
        let d = self.qd.degree();
        let inv = self.alpha.inv();
        let scale = inv.powu(2);
        match self.qd.surface {
            Surface::Plane => {
                // p((z - beta)/alpha) expanded in z
                let lin = [inv, -self.beta * inv];
                let mut acc = vec![C::new(0.0, 0.0)];
                for &a in &self.qd.coeffs {
                    acc = poly_mul(&acc, &lin);
                    let last = acc.len() - 1;
                    acc[last] += a;
                }
                let acc = trim_leading(acc, d + 1);
                acc.into_iter().map(|c| c * scale * self.qd.factor).collect()
            }
            Surface::PuncturedPlane => {
                // p(z/alpha)/(z/alpha)^m / alpha²
                let m = self.qd.m as i32;
                self.qd
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * inv.powi((d - i) as i32 - m) * scale * self.qd.factor)
                    .collect()
            }
        }
    }
}

fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim_leading(mut v: Vec<C>, len: usize) -> Vec<C> {
    while v.len() > len {
        v.remove(0);
    }
    v
}

/// Make raw coefficients monic (and centered on the plane) by an affine
/// change of coordinates z = alpha·w + beta (beta = 0 on the punctured plane).
pub fn normalize(raw: &[C], surface: Surface, n: usize, m: usize) -> Result<Normalized, QdError> {
    if raw.is_empty() || raw[0] == C::new(0.0, 0.0) {
        return Err(QdError::ZeroLeading);
    }
    if raw.iter().any(|c| !c.is_finite()) {
        return Err(QdError::NonFinite);
    }
    let d = raw.len() - 1;
    let a0 = raw[0];
    match surface {
        Surface::Plane => {
            // a0 alpha^(d+2) = 1, and the w^(d-1) coefficient vanishes
            let alpha = if a0 == C::new(1.0, 0.0) { a0 } else { a0.inv().powf(1.0 / (d + 2) as f64) };
            let beta = if d >= 1 { -raw[1] / (a0 * d as f64) } else { C::new(0.0, 0.0) };
            // expand p(alpha w + beta) alpha²
            let lin = [alpha, beta];
            let mut acc = vec![C::new(0.0, 0.0)];
            for &a in raw {
                acc = poly_mul(&acc, &lin);
                let last = acc.len() - 1;
                acc[last] += a;
            }
            let mut coeffs: Vec<C> = trim_leading(acc, d + 1).into_iter().map(|c| c * alpha * alpha).collect();
            coeffs[0] = C::new(1.0, 0.0);
            if d >= 1 {
                coeffs[1] = C::new(0.0, 0.0);
            }
            let qd = QuadDiff::plane(coeffs)?;
            Ok(Normalized { qd, alpha, beta })
        }
        Surface::PuncturedPlane => {
            if n < 3 || m < 3 {
                return Err(QdError::PoleOrder(n.min(m)));
            }
            if d + 4 != n + m {
                return Err(QdError::Degree { expected: n + m - 4, found: d });
            }
            // a0 alpha^(n-2) = 1
            let alpha = if a0 == C::new(1.0, 0.0) { a0 } else { a0.inv().powf(1.0 / (n - 2) as f64) };
            let mi = m as i32;
            let mut coeffs: Vec<C> =
                raw.iter().enumerate().map(|(i, a)| a * alpha.powi((d - i) as i32 - mi + 2)).collect();
            coeffs[0] = C::new(1.0, 0.0);
            let qd = QuadDiff::punctured(n, m, coeffs)?;
            Ok(Normalized { qd, alpha, beta: C::new(0.0, 0.0) })
        }
    }
}
