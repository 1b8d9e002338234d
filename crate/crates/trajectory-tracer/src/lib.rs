//! Horizontal and vertical trajectories: adaptive integration at unit flat
//! speed, classification of ends at zeros and poles, transverse measures.

use qd_core::{Complex64 as C, FoliationKind, Pole, QdError, QuadDiff, SqrtModel, ZeroPoint};
use serde::{Deserialize, Serialize};

mod rk;

pub use rk::{Stepper, StepOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Qd(#[from] QdError),
    #[error("integrator step size underflow at z = {0}")]
    StepFailure(String),
    #[error("launch from zero {zero} prong {prong} did not converge")]
    Launch { zero: usize, prong: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryEnd {
    /// Ends at a zero; `distance` is the Euclidean gap when the hit was declared.
    HitZero { zero: usize, distance: f64 },
    /// Runs into a pole along the asymptotic direction with this index.
    PoleApproach { pole: Pole, label: usize },
    StepLimit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: FoliationKind,
    pub points: Vec<C>,
    pub flat_length: f64,
    pub ends: (TrajectoryEnd, TrajectoryEnd),
    pub is_critical: bool,
    /// (zero, prong) for critical leaves.
    pub origin: Option<(usize, usize)>,
    /// Branch of √q at the last point, oriented along the travel direction.
    pub end_branch: C,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Inner pole radius as a multiple of the smallest |zero|.
    pub inner_factor: f64,
    /// Outer pole radius as a multiple of the largest |zero|.
    pub outer_factor: f64,
    /// Saddle hit threshold, relative to the flat radius of a zero's disc.
    pub eps_zero: f64,
    /// Off-grid tolerance for asymptotic angles, in units of grid spacing.
    pub angle_tol: f64,
    pub detect_poles: bool,
    /// Stop after this flat length (StepLimit).
    pub max_flat_length: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 1_000_000,
            inner_factor: 1e-3,
            outer_factor: 1e3,
            eps_zero: 1e-6,
            angle_tol: 0.25,
            detect_poles: true,
            max_flat_length: f64::INFINITY,
        }
    }
}

/// Per-zero data for hit detection.
#[derive(Clone, Debug)]
struct Disc {
    radius: f64,
    flat_radius: f64,
}

/// Trajectory integrator bound to one differential.
#[derive(Clone, Debug)]
pub struct Tracer {
    pub qd: QuadDiff,
    pub model: SqrtModel,
    pub config: TraceConfig,
    inner: f64,
    outer: f64,
    discs: Vec<Disc>,
}

fn unit(kind: FoliationKind) -> C {
    match kind {
        FoliationKind::Horizontal => C::new(1.0, 0.0),
        FoliationKind::Vertical => C::new(0.0, 1.0),
    }
}

impl Tracer {
    pub fn new(qd: &QuadDiff, config: TraceConfig) -> Result<Tracer, TraceError> {
        qd.validate()?;
        let zeros = qd.zeros()?;
        Ok(Self::with_zeros(qd, zeros, config))
    }

    pub fn with_zeros(qd: &QuadDiff, zeros: Vec<ZeroPoint>, config: TraceConfig) -> Tracer {
        let model = SqrtModel::with_zeros(qd, zeros);
        let zs = &model.zeros;
        let min_abs = zs.iter().map(|z| z.location.norm()).fold(f64::INFINITY, f64::min);
        let max_abs = zs.iter().map(|z| z.location.norm()).fold(0.0, f64::max);
        let inner = config.inner_factor * if min_abs.is_finite() && min_abs > 0.0 { min_abs } else { 1.0 };
        let outer = config.outer_factor * if max_abs > 0.0 { max_abs } else { 1.0 };
        let mut tracer = Tracer { qd: qd.clone(), model, config, inner, outer, discs: Vec::new() };
        tracer.discs = (0..tracer.model.zeros.len())
            .map(|i| {
                let radius = 0.25 * qd.zero_spacing(&tracer.model.zeros, i);
                let z0 = tracer.model.zeros[i].location;
                let edge = z0 + C::new(radius, 0.0);
                let w = qd.eval(edge).map(|q| q.sqrt()).unwrap_or(C::new(1.0, 0.0));
                let flat = tracer.model.integrate_segment(z0, edge, (1.0, w), 1e-12).norm();
                Disc { radius, flat_radius: flat }
            })
            .collect();
        tracer
    }

    pub fn zeros(&self) -> &[ZeroPoint] {
        &self.model.zeros
    }

    pub fn pole_radii(&self) -> (f64, f64) {
        (self.inner, self.outer)
    }

    /// Value of ∫ from zero `j` to z of √q dz with the branch `w` at z, divided
    /// by the unit of `kind`: real along critical leaves of zero `j`.
    pub fn local_coordinate(&self, j: usize, z: C, w: C, kind: FoliationKind) -> C {
        let z0 = self.model.zeros[j].location;
        self.model.integrate_segment(z0, z, (1.0, w), 1e-12) / unit(kind)
    }

    /// Trace the leaf of `kind` through z0 in both directions.  The polyline
    /// runs along `sign`; `ends.0` is the backward end.
    pub fn trace(&self, z0: C, seed: C, kind: FoliationKind, sign: f64) -> Result<Trajectory, TraceError> {
        let q0 = self.qd.eval(z0)?;
        if (seed * seed - q0).norm() > 1e-8 * (1.0 + q0.norm()) {
            return Err(QdError::BadSeed.into());
        }
        let back = self.run(z0, seed, kind, -sign, None)?;
        let fwd = self.run(z0, seed, kind, sign, None)?;
        let mut points: Vec<C> = back.points.iter().rev().copied().collect();
        points.extend(fwd.points.iter().skip(1));
        Ok(Trajectory {
            kind,
            points,
            flat_length: back.flat + fwd.flat,
            ends: (back.end, fwd.end),
            is_critical: false,
            origin: None,
            end_branch: fwd.branch,
        })
    }

    /// Trace one direction only.
    pub fn trace_ray(&self, z0: C, seed: C, kind: FoliationKind, sign: f64) -> Result<Trajectory, TraceError> {
        let r = self.run(z0, seed, kind, sign, None)?;
        Ok(Trajectory {
            kind,
            points: r.points,
            flat_length: r.flat,
            ends: (TrajectoryEnd::StepLimit, r.end),
            is_critical: false,
            origin: None,
            end_branch: r.branch,
        })
    }

    /// Point on the critical leaf from zero `j` along prong angle `angle`,
    /// at flat distance about `frac` of the disc's flat radius, with the
    /// branch making the local coordinate positive there.
    pub fn launch_point(&self, j: usize, angle: f64, kind: FoliationKind, frac: f64) -> Option<(C, C, f64)> {
        let z0 = self.model.zeros[j].location;
        let r = 0.2 * self.discs[j].radius;
        let mut z = z0 + C::from_polar(r, angle);
        let mut w = self.qd.eval(z).ok()?.sqrt();
        let mut zeta = self.local_coordinate(j, z, w, kind);
        if zeta.re < 0.0 {
            w = -w;
            zeta = -zeta;
        }
        let target = frac.max(zeta.norm() / self.discs[j].flat_radius) * self.discs[j].flat_radius;
        let target = target.min(zeta.norm() * 4.0);
        for _ in 0..40 {
            let err = zeta - C::new(target, 0.0);
            if err.norm() <= 1e-14 * target {
                return Some((z, w, target));
            }
            let step = err * unit(kind) / w;
            let mut lambda = 1.0;
            loop {
                let zn = z - step * lambda;
                if (zn - z0).norm() > 1e-3 * r {
                    if let Ok(qn) = self.qd.eval(zn) {
                        let wn = qd_core::sqrt_near(qn, w);
                        let zn_eta = self.local_coordinate(j, zn, wn, kind);
                        if (zn_eta - C::new(target, 0.0)).norm() < err.norm() || lambda < 1e-3 {
                            z = zn;
                            w = wn;
                            zeta = zn_eta;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-6 {
                    return None;
                }
            }
        }
        ((zeta - C::new(target, 0.0)).norm() <= 1e-10 * target).then_some((z, w, target))
    }

    /// The k + 2 critical leaves of `kind` at zero `j`, prongs ordered ccw.
    pub fn critical_from(&self, j: usize, kind: FoliationKind) -> Result<Vec<Trajectory>, TraceError> {
        let angles = self.qd.prong_angles(&self.model.zeros, j, kind);
        let z0 = self.model.zeros[j].location;
        let mut out = Vec::with_capacity(angles.len());
        for (p, &a) in angles.iter().enumerate() {
            let (z, w, flat0) = self.launch_point(j, a, kind, 0.3).ok_or(TraceError::Launch { zero: j, prong: p })?;
            let r = self.run(z, w, kind, 1.0, Some(j))?;
            let mut points = vec![z0];
            points.extend(r.points);
            out.push(Trajectory {
                kind,
                points,
                flat_length: flat0 + r.flat,
                ends: (TrajectoryEnd::HitZero { zero: j, distance: 0.0 }, r.end),
                is_critical: true,
                origin: Some((j, p)),
                end_branch: r.branch,
            });
        }
        Ok(out)
    }

    /// All critical trajectories of `kind`, grouped by zero.
    pub fn critical_trajectories(&self, kind: FoliationKind) -> Result<Vec<Trajectory>, TraceError> {
        let mut out = Vec::new();
        for j in 0..self.model.zeros.len() {
            out.extend(self.critical_from(j, kind)?);
        }
        Ok(out)
    }

    /// ∫|Im √q dz| (horizontal) or ∫|Re √q dz| (vertical) along an arc.
    pub fn transverse_measure_along(&self, arc: &[C], kind: FoliationKind) -> Result<f64, TraceError> {
        let Some(&z0) = arc.first() else { return Ok(0.0) };
        let seed = self.qd.eval(z0)?.sqrt();
        Ok(self.model.transverse_measure(arc, seed, kind == FoliationKind::Vertical, 1e-12))
    }

    fn run(&self, z0: C, seed: C, kind: FoliationKind, sign: f64, own: Option<usize>) -> Result<RunResult, TraceError> {
        let e = unit(kind) * sign;
        let stepper = Stepper::new(&self.qd, e, self.config.rtol, self.config.atol);
        let mut z = z0;
        let mut w = seed;
        let mut points = vec![z0];
        let mut flat = 0.0;
        // own zero is ignored until the leaf leaves its disc
        let mut armed: Vec<bool> = (0..self.discs.len()).map(|i| Some(i) != own).collect();
        let mut pole_votes: (Option<(Pole, usize)>, usize) = (None, 0);
        let mut h = 0.05 * self.step_scale(z, w);
        for _ in 0..self.config.max_steps {
            let out = stepper.step(z, w, h);
            let (zn, wn, taken, next_h) = match out {
                StepOutcome::Accepted { z, w, h, next_h } => (z, w, h, next_h),
                StepOutcome::Rejected { next_h } => {
                    h = next_h;
                    if h < 1e-300 || !h.is_finite() {
                        return Err(TraceError::StepFailure(format!("{z}")));
                    }
                    continue;
                }
            };
            let prev = z;
            z = zn;
            w = wn;
            flat += taken;
            points.push(z);
            h = next_h;
            // saddle hits
            for (i, d) in self.discs.iter().enumerate() {
                let zi = self.model.zeros[i].location;
                let dist = (z - zi).norm();
                if !armed[i] {
                    if dist > d.radius {
                        armed[i] = true;
                    }
                    continue;
                }
                if dist < d.radius {
                    let zeta = self.local_coordinate(i, z, w, kind) * sign;
                    // approaching means the real part shrinks towards 0
                    if zeta.im.abs() <= self.config.eps_zero * d.flat_radius && zeta.re < 0.0 {
                        points.push(zi);
                        flat += zeta.re.abs();
                        return Ok(RunResult { points, flat, end: TrajectoryEnd::HitZero { zero: i, distance: dist }, branch: w });
                    }
                    // keep steps small inside a disc so the check is not skipped over
                    h = h.min(0.25 * d.flat_radius);
                }
            }
            if self.config.detect_poles {
                if let Some(vote) = self.pole_vote(prev, z, kind) {
                    if pole_votes.0 == Some(vote) {
                        pole_votes.1 += 1;
                    } else {
                        pole_votes = (Some(vote), 1);
                    }
                    if pole_votes.1 >= 3 {
                        let (pole, label) = vote;
                        return Ok(RunResult { points, flat, end: TrajectoryEnd::PoleApproach { pole, label }, branch: w });
                    }
                } else {
                    pole_votes = (None, 0);
                }
            }
            if flat >= self.config.max_flat_length {
                break;
            }
        }
        Ok(RunResult { points, flat, end: TrajectoryEnd::StepLimit, branch: w })
    }

    fn step_scale(&self, z: C, w: C) -> f64 {
        // flat size of a neighbourhood comparable to |z|
        (w.norm() * (0.1 * (1.0 + z.norm()))).max(1e-12)
    }

    fn pole_vote(&self, prev: C, z: C, kind: FoliationKind) -> Option<(Pole, usize)> {
        let r = z.norm();
        let (pole, inward) = if r > self.outer {
            (Pole::Infinity, r > prev.norm())
        } else if self.qd.m > 0 && r < self.inner {
            (Pole::Zero, r < prev.norm())
        } else {
            return None;
        };
        if !inward {
            return None;
        }
        let (label, off) = self.qd.classify_end(pole, kind, z.arg())?;
        (off.abs() <= self.config.angle_tol).then_some((pole, label))
    }
}

struct RunResult {
    points: Vec<C>,
    flat: f64,
    end: TrajectoryEnd,
    branch: C,
}

/// Polyline dump: one point per line.
pub fn polyline_text(points: &[C]) -> String {
    let mut s = String::new();
    for p in points {
        s.push_str(&format!("{:.17e} {:.17e}\n", p.re, p.im));
    }
    s
}
