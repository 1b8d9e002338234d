//! Global charts.  The folded half-plane {(x, y): y >= 0}/(x,0)~(-x,0) is
//! identified with C by w = x + iy ↦ w², which folds the boundary exactly.

use crate::sides::{compose, compose_ring, decompose, Base};
use crate::SpaceError;
use foliation_extractor::FoliationDescriptor;
use graph_moduli::{coords_to_cycle, cycle_chart};
use qd_core::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Point of the folded half-plane; for y = 0 the stored x is >= 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldedPoint {
    pub x: f64,
    pub y: f64,
}

impl FoldedPoint {
    pub fn new(x: f64, y: f64) -> FoldedPoint {
        if y == 0.0 {
            FoldedPoint { x: x.abs(), y }
        } else {
            FoldedPoint { x, y }
        }
    }

    /// Index j of the wedge j·y <= x <= (j+1)·y; boundary rays go to the
    /// larger index.  None on the fold line.
    pub fn wedge(&self) -> Option<i64> {
        (self.y > 0.0).then(|| (self.x / self.y).floor() as i64)
    }

    fn squared(&self) -> C {
        let w = C::new(self.x, self.y);
        w * w
    }

    fn unsquare(z: C) -> FoldedPoint {
        let mut w = z.sqrt();
        if w.im < 0.0 || (w.im == 0.0 && w.re < 0.0) {
            w = -w;
        }
        FoldedPoint::new(w.re, w.im.max(0.0))
    }
}

/// (t, τ) for τ > 0, (ring height, 0) otherwise.
pub fn project_pi(fd: &FoliationDescriptor) -> FoldedPoint {
    if fd.tau > 0.0 {
        let t = fd
            .continuous_twist
            .unwrap_or_else(|| fd.twist_j.unwrap_or(0) as f64 * fd.tau + fd.l0.unwrap_or(0.0));
        FoldedPoint::new(t, fd.tau)
    } else {
        FoldedPoint::new(fd.ring_height.unwrap_or(0.0), 0.0)
    }
}

pub fn fnm_dimension(n: usize, m: usize) -> usize {
    n + m - 4
}

pub fn pair_dimension(n: usize, m: usize) -> usize {
    2 * (n + m - 4)
}

fn check_sizes(n: usize, m: usize) -> Result<(), SpaceError> {
    if n < 3 || m < 3 {
        return Err(SpaceError::Shape(format!("pole orders ({n}, {m}) below 3")));
    }
    Ok(())
}

fn fibers(fd: &FoliationDescriptor) -> Result<(Vec<f64>, FoldedPoint), SpaceError> {
    let s = decompose(fd)?;
    let base = match s.base {
        Base::Twist(t) => FoldedPoint::new(t, fd.tau),
        Base::Ring(h) => FoldedPoint::new(h, 0.0),
    };
    let mut c = cycle_chart(&s.g_inf)?;
    c.extend(cycle_chart(&s.g_zero)?);
    Ok((c, base))
}

fn assemble(n: usize, m: usize, base: FoldedPoint, fib: &[f64]) -> Result<FoliationDescriptor, SpaceError> {
    let (a, b) = fib.split_at(n - 3);
    let g_inf = coords_to_cycle(n - 2, base.y, a)?;
    let g_zero = coords_to_cycle(m - 2, base.y, b)?;
    if base.y > 0.0 {
        compose(&g_inf, &g_zero, base.x)
    } else {
        compose_ring(&g_inf, &g_zero, base.x)
    }
}

/// Chart F(n, m) → R^{n+m-4}: folded base squared, then the side-graph charts.
pub fn fnm_chart(fd: &FoliationDescriptor) -> Result<Vec<f64>, SpaceError> {
    check_sizes(fd.n, fd.m)?;
    let (fib, base) = fibers(fd)?;
    let w2 = base.squared();
    let mut out = vec![w2.re, w2.im];
    out.extend(fib);
    let dim = fnm_dimension(fd.n, fd.m);
    if out.len() != dim {
        return Err(SpaceError::Dimension { expected: dim, found: out.len() });
    }
    Ok(out)
}

pub fn coords_to_fnm(n: usize, m: usize, c: &[f64]) -> Result<FoliationDescriptor, SpaceError> {
    check_sizes(n, m)?;
    let dim = fnm_dimension(n, m);
    if c.len() != dim {
        return Err(SpaceError::Dimension { expected: dim, found: c.len() });
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(SpaceError::Shape("non-finite chart input".into()));
    }
    let base = FoldedPoint::unsquare(C::new(c[0], c[1]));
    assemble(n, m, base, &c[2..])
}

/// A pair lies off the diagonal set unless both measures vanish.
pub fn f2_membership(fd_h: &FoliationDescriptor, fd_v: &FoliationDescriptor) -> bool {
    !(fd_h.tau == 0.0 && fd_v.tau == 0.0)
}

/// Half-width of the angular band.
const BAND: f64 = FRAC_PI_2;

/// Chart on pairs off the diagonal set.  With ρ = |(τ_h, τ_v)| and
/// α = atan2(τ_h, τ_v) ∈ [0, π/2]: (x_h + iα)² fills the region right of the
/// parabola X = Y²/(4c²) - c² (folded at α = 0); its distance q to the
/// parabola, paired with x_v as (x_v + iq)², folds at α = π/2.
/// Coordinates: ln ρ, Y, Re and Im of (x_v + iq)², then the four side charts.
pub fn pair_chart(fd_h: &FoliationDescriptor, fd_v: &FoliationDescriptor) -> Result<Vec<f64>, SpaceError> {
    if !f2_membership(fd_h, fd_v) {
        return Err(SpaceError::Diagonal);
    }
    if (fd_h.n, fd_h.m) != (fd_v.n, fd_v.m) {
        return Err(SpaceError::Shape("pole orders differ between the pair".into()));
    }
    check_sizes(fd_h.n, fd_h.m)?;
    let (fh, bh) = fibers(fd_h)?;
    let (fv, bv) = fibers(fd_v)?;
    let rho = bh.y.hypot(bv.y);
    let alpha = bh.y.atan2(bv.y);
    let s = C::new(bh.x, alpha) * C::new(bh.x, alpha);
    let q = if bv.y == 0.0 { 0.0 } else { s.re - (s.im * s.im / (4.0 * BAND * BAND) - BAND * BAND) };
    let v = C::new(bv.x, q.max(0.0));
    let v2 = v * v;
    let mut out = vec![rho.ln(), s.im, v2.re, v2.im];
    out.extend(fh);
    out.extend(fv);
    let dim = pair_dimension(fd_h.n, fd_h.m);
    if out.len() != dim {
        return Err(SpaceError::Dimension { expected: dim, found: out.len() });
    }
    Ok(out)
}

pub fn coords_to_pair(n: usize, m: usize, c: &[f64]) -> Result<(FoliationDescriptor, FoliationDescriptor), SpaceError> {
    check_sizes(n, m)?;
    let dim = pair_dimension(n, m);
    if c.len() != dim {
        return Err(SpaceError::Dimension { expected: dim, found: c.len() });
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(SpaceError::Shape("non-finite chart input".into()));
    }
    let rho = c[0].exp();
    let v = FoldedPoint::unsquare(C::new(c[2], c[3]));
    let (x_v, q) = (v.x, v.y);
    let y = c[1];
    let x = q + y * y / (4.0 * BAND * BAND) - BAND * BAND;
    let h = FoldedPoint::unsquare(C::new(x, y));
    let alpha = h.y.min(BAND);
    let tau_h = if h.y == 0.0 { 0.0 } else { rho * alpha.sin() };
    let tau_v = if q == 0.0 { 0.0 } else { rho * alpha.cos() };
    let f = fnm_dimension(n, m) - 2;
    let dh = assemble(n, m, FoldedPoint::new(h.x, tau_h), &c[4..4 + f])?;
    let dv = assemble(n, m, FoldedPoint::new(x_v, tau_v), &c[4 + f..])?;
    Ok((dh, dv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_identifies_boundary_points() {
        let a = FoldedPoint::new(0.7, 0.0);
        let b = FoldedPoint::new(-0.7, 0.0);
        assert_eq!(a, b);
        assert_eq!(a.squared(), b.squared());
        assert_eq!(FoldedPoint::unsquare(a.squared()), a);
    }

    #[test]
    fn wedges() {
        assert_eq!(FoldedPoint::new(2.3, 1.0).wedge(), Some(2));
        assert_eq!(FoldedPoint::new(0.0, 1.0).wedge(), Some(0));
        assert_eq!(FoldedPoint::new(-0.1, 1.0).wedge(), Some(-1));
        assert_eq!(FoldedPoint::new(0.7, 0.0).wedge(), None);
    }

    #[test]
    fn unsquare_inverts_square_on_closed_half_plane() {
        for &(x, y) in &[(1.0, 2.0), (-3.0, 0.5), (0.0, 1.0), (2.0, 0.0), (-1e-3, 1e-9)] {
            let p = FoldedPoint::new(x, y);
            let q = FoldedPoint::unsquare(p.squared());
            assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12, "{p:?} {q:?}");
        }
    }
}
