//! Extraction from a quadratic differential by tracing critical leaves.

use crate::assemble::{assemble, boundary_lines, Assembly, CriticalGraph, CriticalVertex, Facing, ProngEnd, SectorProbe};
use crate::geom::{unrolled_turn, PolylineIndex};
use crate::graph::{FoliationDescriptor, MetricRibbonGraph};
use crate::ExtractError;
use qd_core::{Complex64 as C, FoliationKind, Pole, QuadDiff, ZeroPoint};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use trajectory_tracer::{TraceConfig, Tracer, Trajectory, TrajectoryEnd};

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub trace: TraceConfig,
    /// Quadrature tolerance for heights, lengths and turns.
    pub quad_tol: f64,
    /// Re-traces with a tenfold tighter tolerance before giving up on a leaf.
    pub retries: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { trace: TraceConfig::default(), quad_tol: 1e-12, retries: 2 }
    }
}

/// Everything traced for one foliation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Traced {
    pub kind: FoliationKind,
    /// Differential whose horizontal foliation is the requested one.
    pub oriented: QuadDiff,
    pub zeros: Vec<ZeroPoint>,
    /// Critical leaves of the foliation, by zero then prong.
    pub critical: Vec<Vec<Trajectory>>,
    /// Critical leaves of the other foliation, by zero then prong.
    pub transverse: Vec<Vec<Trajectory>>,
    pub graph: CriticalGraph,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Extraction {
    pub traced: Traced,
    pub probes: Vec<SectorProbe>,
    pub assembly: Assembly,
}

impl Extraction {
    pub fn descriptor(&self) -> &FoliationDescriptor {
        &self.assembly.descriptor
    }
}

fn tracer_for(q: &QuadDiff, zeros: &[ZeroPoint], cfg: &ExtractConfig, attempt: usize) -> Tracer {
    let mut tc = cfg.trace.clone();
    let f = 0.1f64.powi(attempt as i32);
    tc.rtol *= f;
    tc.atol *= f;
    Tracer::with_zeros(q, zeros.to_vec(), tc)
}

fn has_step_limit(t: &Trajectory) -> bool {
    t.ends.1 == TrajectoryEnd::StepLimit
}

/// Critical leaves of `kind` (horizontal of the oriented differential) at every zero.
fn trace_critical(q: &QuadDiff, zeros: &[ZeroPoint], cfg: &ExtractConfig, kind: FoliationKind) -> Result<Vec<Vec<Trajectory>>, ExtractError> {
    let mut out = Vec::with_capacity(zeros.len());
    for j in 0..zeros.len() {
        let mut attempt = 0;
        loop {
            let leaves = tracer_for(q, zeros, cfg, attempt).critical_from(j, kind)?;
            match leaves.iter().find(|t| has_step_limit(t)) {
                None => {
                    out.push(leaves);
                    break;
                }
                Some(t) if attempt >= cfg.retries => {
                    let (zero, prong) = t.origin.unwrap();
                    return Err(ExtractError::Unresolved { zero, prong, kind });
                }
                Some(_) => attempt += 1,
            }
        }
    }
    Ok(out)
}

fn nearest_prong(angles: &[f64], a: f64) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &b) in angles.iter().enumerate() {
        let d = (a - b + PI).rem_euclid(TAU) - PI;
        if d.abs() < best.1 {
            best = (i, d.abs());
        }
    }
    best
}

/// Sector of a zero (between consecutive prongs in `angles`) containing `a`.
fn sector_of(angles: &[f64], a: f64) -> usize {
    let k = angles.len();
    for i in 0..k {
        let span = (angles[(i + 1) % k] - angles[i]).rem_euclid(TAU);
        let span = if span == 0.0 { TAU } else { span };
        if (a - angles[i]).rem_euclid(TAU) < span {
            return i;
        }
    }
    k - 1
}

fn flat_integral(model: &qd_core::SqrtModel, q: &QuadDiff, pts: &[C], tol: f64) -> Result<C, ExtractError> {
    if pts.len() < 2 {
        return Ok(C::new(0.0, 0.0));
    }
    let mid = (pts[0] + pts[1]) * 0.5;
    let seed = q.eval(mid)?.sqrt();
    Ok(model.integrate_path(pts, seed, tol).0)
}

/// Critical graph of `kind`, with the traced leaves.
pub fn build_critical_graph(qd: &QuadDiff, kind: FoliationKind, cfg: &ExtractConfig) -> Result<Traced, ExtractError> {
    qd.validate()?;
    let zeros = qd.zeros()?;
    build_with_zeros(qd, zeros, kind, cfg)
}

fn build_with_zeros(qd: &QuadDiff, zeros: Vec<ZeroPoint>, kind: FoliationKind, cfg: &ExtractConfig) -> Result<Traced, ExtractError> {
    let q = qd.oriented(kind);
    let critical = trace_critical(&q, &zeros, cfg, FoliationKind::Horizontal)?;
    let transverse = trace_critical(&q, &zeros, cfg, FoliationKind::Vertical)?;
    let model = qd_core::SqrtModel::with_zeros(&q, zeros.clone());
    let mut vertices = Vec::with_capacity(zeros.len());
    for (j, leaves) in critical.iter().enumerate() {
        let mut prongs = Vec::with_capacity(leaves.len());
        for (p, t) in leaves.iter().enumerate() {
            let end = match t.ends.1 {
                TrajectoryEnd::PoleApproach { pole, label } => ProngEnd::Pole { pole, index: label },
                TrajectoryEnd::HitZero { zero, .. } => {
                    let target = zeros[zero].location;
                    let before = t.points[t.points.len() - 2];
                    let angles = q.prong_angles(&zeros, zero, FoliationKind::Horizontal);
                    let (prong, dev) = nearest_prong(&angles, (before - target).arg());
                    if dev > PI / angles.len() as f64 {
                        return Err(ExtractError::Inconsistent(format!(
                            "leaf from zero {j} prong {p} reaches zero {zero} off its prongs"
                        )));
                    }
                    let length = flat_integral(&model, &q, &t.points, cfg.quad_tol)?.norm();
                    ProngEnd::Zero { zero, prong, length, turn: unrolled_turn(&t.points) }
                }
                TrajectoryEnd::StepLimit => unreachable!(),
            };
            prongs.push(end);
        }
        vertices.push(CriticalVertex { order: zeros[j].order, prongs });
    }
    let graph = CriticalGraph {
        surface: qd.surface,
        n: qd.n,
        m: qd.m,
        vertices,
        base_arg: zeros.first().map_or(0.0, |z| z.location.arg()),
    };
    graph.check()?;
    Ok(Traced { kind, oriented: q, zeros, critical, transverse, graph })
}

/// Probe one sector per boundary line with the transverse critical leaf
/// bisecting it.
pub fn probe_sectors(tr: &Traced, cfg: &ExtractConfig) -> Result<Vec<SectorProbe>, ExtractError> {
    let q = &tr.oriented;
    let model = qd_core::SqrtModel::with_zeros(q, tr.zeros.clone());
    let flat: Vec<&Trajectory> = tr.critical.iter().flatten().collect();
    let index = PolylineIndex::new(flat.iter().map(|t| t.points.as_slice()).collect());
    let lines = boundary_lines(&tr.graph)?;
    let mut probes = Vec::with_capacity(lines.len());
    for line in &lines {
        let (z, i) = line.sectors[0];
        let h = q.prong_angles(&tr.zeros, z, FoliationKind::Horizontal);
        let v = q.prong_angles(&tr.zeros, z, FoliationKind::Vertical);
        let vp = v
            .iter()
            .position(|&a| sector_of(&h, a) == i)
            .ok_or_else(|| ExtractError::Inconsistent(format!("no transverse prong in sector ({z}, {i})")))?;
        let t = &tr.transverse[z][vp];
        let origin = tr.zeros[z].location;
        let end_zero = match t.ends.1 {
            TrajectoryEnd::HitZero { zero, .. } => Some(zero),
            _ => None,
        };
        let scale = tr.zeros.iter().map(|p| p.location.norm()).fold(1e-300, f64::max);
        let near = |p: C, w: C| (p - w).norm() <= 1e-9 * scale;
        let hit = index.first_crossing(&t.points, |c| {
            near(c.point, origin) || end_zero.is_some_and(|e| near(c.point, tr.zeros[e].location))
        });
        let facing = match (hit, t.ends.1) {
            (Some(c), _) => {
                let leaf = flat[c.line];
                let (lz, lp) = leaf.origin.unwrap();
                let k = tr.critical[lz].len();
                let dl = leaf.points[c.line_seg + 1] - leaf.points[c.line_seg];
                let dt = t.points[c.seg + 1] - t.points[c.seg];
                let crosses_leftward = dl.re * dt.im - dl.im * dt.re > 0.0;
                let sector = if crosses_leftward { (lp + k - 1) % k } else { lp };
                let mut path: Vec<C> = t.points[..=c.seg].to_vec();
                path.push(c.point);
                path.extend(leaf.points[..=c.line_seg].iter().rev());
                let integral = flat_integral(&model, q, &path, cfg.quad_tol)?;
                Facing::Across { zero: lz, sector, height: integral.im.abs(), turn: unrolled_turn(&path) }
            }
            (None, TrajectoryEnd::HitZero { zero, .. }) => {
                let target = tr.zeros[zero].location;
                let before = t.points[t.points.len() - 2];
                let hz = q.prong_angles(&tr.zeros, zero, FoliationKind::Horizontal);
                let sector = sector_of(&hz, (before - target).arg());
                let integral = flat_integral(&model, q, &t.points, cfg.quad_tol)?;
                Facing::Across { zero, sector, height: integral.im.abs(), turn: unrolled_turn(&t.points) }
            }
            (None, TrajectoryEnd::PoleApproach { pole, .. }) => {
                let last = *t.points.last().unwrap();
                let (label, _) = q.classify_region(pole, FoliationKind::Horizontal, last.arg()).unwrap();
                let exact = q.region_direction(pole, FoliationKind::Horizontal, label).unwrap();
                let start = origin.arg();
                let raw = start + unrolled_turn(&t.points);
                let snapped = raw + ((exact - raw + PI).rem_euclid(TAU) - PI);
                Facing::HalfPlane { pole, label, turn: snapped - start }
            }
            (None, TrajectoryEnd::StepLimit) => {
                return Err(ExtractError::Unresolved { zero: z, prong: vp, kind: tr.kind.other() })
            }
        };
        probes.push(SectorProbe { zero: z, sector: i, facing });
    }
    Ok(probes)
}

/// Full extraction of the `kind` foliation.
pub fn extract(qd: &QuadDiff, kind: FoliationKind, cfg: &ExtractConfig) -> Result<Extraction, ExtractError> {
    let traced = build_critical_graph(qd, kind, cfg)?;
    finish(traced, cfg)
}

fn finish(traced: Traced, cfg: &ExtractConfig) -> Result<Extraction, ExtractError> {
    let probes = probe_sectors(&traced, cfg)?;
    let assembly = assemble(&traced.graph, &probes)?;
    Ok(Extraction { traced, probes, assembly })
}

/// Both foliations, sharing the root finding.
pub fn extract_pair(qd: &QuadDiff, cfg: &ExtractConfig) -> Result<(Extraction, Extraction), ExtractError> {
    qd.validate()?;
    let zeros = qd.zeros()?;
    let h = finish(build_with_zeros(qd, zeros.clone(), FoliationKind::Horizontal, cfg)?, cfg)?;
    let v = finish(build_with_zeros(qd, zeros, FoliationKind::Vertical, cfg)?, cfg)?;
    Ok((h, v))
}

/// Region classification of the `kind` foliation.
pub fn classify_regions(qd: &QuadDiff, kind: FoliationKind, cfg: &ExtractConfig) -> Result<Vec<crate::RegionRec>, ExtractError> {
    Ok(extract(qd, kind, cfg)?.assembly.regions)
}

/// Leaf space of the `kind` foliation.
pub fn leaf_space(qd: &QuadDiff, kind: FoliationKind, cfg: &ExtractConfig) -> Result<MetricRibbonGraph, ExtractError> {
    Ok(extract(qd, kind, cfg)?.assembly.descriptor.graph)
}

/// (j, l0, t) of the `kind` foliation; None when τ = 0.
pub fn twist_parameters(qd: &QuadDiff, kind: FoliationKind, cfg: &ExtractConfig) -> Result<Option<(i64, f64, f64)>, ExtractError> {
    let d = extract(qd, kind, cfg)?.assembly.descriptor;
    Ok(match (d.twist_j, d.l0, d.continuous_twist) {
        (Some(j), Some(l0), Some(t)) => Some((j, l0, t)),
        _ => None,
    })
}

/// The opposite-kind direction label inside each face of the leaf space of
/// the `kind` foliation.  Faces are keyed by their bounding rays.
pub fn face_labels(g: &MetricRibbonGraph, qd: &QuadDiff, kind: FoliationKind) -> Result<Vec<((usize, usize), usize)>, ExtractError> {
    let q = qd.oriented(kind);
    let mut out = Vec::new();
    for (a, b) in g.faces() {
        let (ra, rb) = (&g.rays[a], &g.rays[b]);
        if ra.pole != rb.pole {
            return Err(ExtractError::Inconsistent(format!("face between rays {a} and {b} spans two poles")));
        }
        let pole = ra.pole;
        let order = qd.pole_order(pole).unwrap_or(0);
        if order < 3 {
            return Err(ExtractError::Inconsistent("face at a pole of low order".into()));
        }
        let aa = q.region_direction(pole, FoliationKind::Horizontal, ra.label).unwrap();
        let ab = q.region_direction(pole, FoliationKind::Horizontal, rb.label).unwrap();
        let inside = |x: f64| -> bool {
            let (from, span) = match pole {
                Pole::Infinity => ((x - aa).rem_euclid(TAU), (ab - aa).rem_euclid(TAU)),
                Pole::Zero => ((aa - x).rem_euclid(TAU), (aa - ab).rem_euclid(TAU)),
            };
            let span = if a == b || span == 0.0 { TAU } else { span };
            from > 0.0 && from < span
        };
        let found: Vec<f64> = (1..=order - 2)
            .map(|j| q.end_direction(pole, FoliationKind::Horizontal, j).unwrap())
            .filter(|&x| inside(x))
            .collect();
        if found.len() != 1 {
            return Err(ExtractError::Inconsistent(format!("face ({a}, {b}) holds {} directions", found.len())));
        }
        let (label, _) = q.classify_region(pole, FoliationKind::Vertical, found[0]).unwrap();
        out.push(((a, b), label));
    }
    let want = g.rays.len();
    if out.len() != want {
        return Err(ExtractError::Inconsistent(format!("{} faces for {want} rays", out.len())));
    }
    Ok(out)
}



