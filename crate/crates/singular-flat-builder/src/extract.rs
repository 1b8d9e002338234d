//! Reading the two leaf spaces back off a glued complex.
//!
//! The primary foliation runs along piece boundaries, so its critical
//! graph comes straight from the gluings.  Leaves of the secondary
//! foliation cross pieces transversally: a point at s on one side of a
//! strip continues at offset - s on the other, and the secondary leaf
//! through a singular point is followed until it reaches a singular point
//! or a half-plane.

use std::f64::consts::TAU;

use foliation_extractor::{
    assemble, extract_pair, CriticalGraph, CriticalVertex, ExtractConfig, Facing, FoliationDescriptor, ProngEnd,
    SectorProbe,
};
use foliation_space::{compose_plane, descriptor_distance};
use graph_moduli::LabelledTree;
use qd_core::{FoliationKind, Pole, QuadDiff, Surface};
use serde::{Deserialize, Serialize};

use crate::complex::{build_from_pair_with, FlatPiece, LineShape, SegmentRef, SurfaceComplex};
use crate::{BuildError, RegionBijection};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafSpaces {
    pub horizontal: FoliationDescriptor,
    pub vertical: FoliationDescriptor,
}

impl LeafSpaces {
    pub fn twists(&self) -> (Option<f64>, Option<f64>) {
        (self.horizontal.continuous_twist, self.vertical.continuous_twist)
    }
}

fn bad(m: impl Into<String>) -> BuildError {
    BuildError::Inconsistent(m.into())
}

fn u_angle(pole: Pole, z_angle: f64) -> f64 {
    match pole {
        Pole::Infinity => -z_angle,
        Pole::Zero => z_angle,
    }
}

fn cyclic(x: f64, k: usize) -> usize {
    let i = (x.round() as i64).rem_euclid(k as i64) as usize;
    if i == 0 {
        k
    } else {
        i
    }
}

fn k_at(sc: &SurfaceComplex, pole: Pole) -> usize {
    match pole {
        Pole::Infinity => sc.n - 2,
        Pole::Zero => sc.m - 2,
    }
}

/// End index of a leaf of `kind` leaving towards `pole` at a z-angle.
fn end_index(sc: &SurfaceComplex, kind: FoliationKind, pole: Pole, angle: f64) -> usize {
    let k = k_at(sc, pole);
    cyclic((u_angle(pole, angle) - sc.frames.frame(pole, kind)) * k as f64 / TAU, k)
}

/// Label of the half-plane of `kind` around a z-angle.
fn region_label(sc: &SurfaceComplex, kind: FoliationKind, pole: Pole, angle: f64) -> usize {
    let k = k_at(sc, pole);
    cyclic((u_angle(pole, angle) - sc.frames.frame(pole, kind)) * k as f64 / TAU - 0.5, k)
}

/// Sectors of the primary foliation: for every zero its occurrences in
/// counterclockwise order, and the (zero, sector) of every occurrence.
struct Sectors {
    by_zero: Vec<Vec<(usize, usize)>>,
    of: Vec<Vec<(usize, usize)>>,
}

fn sectors(sc: &SurfaceComplex) -> Result<Sectors, BuildError> {
    let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sc.zeros.len()];
    for (l, line) in sc.lines.iter().enumerate() {
        for (j, o) in line.occ.iter().enumerate() {
            occ.get_mut(o.zero).ok_or_else(|| bad("occurrence of an unknown zero"))?.push((l, j));
        }
    }
    let mut of: Vec<Vec<(usize, usize)>> = sc.lines.iter().map(|l| vec![(usize::MAX, 0); l.occ.len()]).collect();
    let mut by_zero = Vec::with_capacity(sc.zeros.len());
    for (z, list) in occ.iter().enumerate() {
        if list.len() != sc.zeros[z] + 2 {
            return Err(bad(format!("zero {z} of order {} meets {} sectors", sc.zeros[z], list.len())));
        }
        let mut cyc = vec![list[0]];
        loop {
            let (l, j) = *cyc.last().unwrap();
            let g = sc
                .glued(SegmentRef { line: l, segment: sc.lines[l].seg_out(j) })
                .ok_or_else(|| bad("unglued segment"))?;
            let next = (g.b.line, g.b.segment);
            if next.1 >= sc.lines[next.0].occ.len() || sc.lines[next.0].occ[next.1].zero != z {
                return Err(bad(format!("gluing around zero {z} leaves the zero")));
            }
            if next == cyc[0] {
                break;
            }
            if cyc.len() > list.len() {
                return Err(bad("sector cycle runs away"));
            }
            cyc.push(next);
        }
        if cyc.len() != list.len() {
            return Err(bad(format!("zero {z}: sectors form {} cycle(s)", 1 + list.len() - cyc.len())));
        }
        for (i, &(l, j)) in cyc.iter().enumerate() {
            of[l][j] = (z, i);
        }
        by_zero.push(cyc);
    }
    Ok(Sectors { by_zero, of })
}

fn primary_graph(sc: &SurfaceComplex, sec: &Sectors) -> Result<(CriticalGraph, Vec<SectorProbe>), BuildError> {
    let kind = sc.primary;
    let mut vertices = Vec::with_capacity(sc.zeros.len());
    for (z, cyc) in sec.by_zero.iter().enumerate() {
        let mut prongs = Vec::with_capacity(cyc.len());
        for &(l, j) in cyc {
            let line = &sc.lines[l];
            let end = match (line.shape, j) {
                (LineShape::Open { pole_in, from, .. }, 0) => {
                    ProngEnd::Pole { pole: pole_in, index: end_index(sc, kind, pole_in, from) }
                }
                _ => {
                    let r = line.occ.len();
                    let p = (j + r - 1) % r;
                    let (z2, i2) = sec.of[l][p];
                    let (pin, lin) = line.at_in(j);
                    let (pout, lout) = line.at_out(p);
                    ProngEnd::Zero {
                        zero: z2,
                        prong: (i2 + 1) % (sc.zeros[z2] + 2),
                        length: pin - pout,
                        turn: TAU * (lout - lin) as f64,
                    }
                }
            };
            prongs.push(end);
        }
        vertices.push(CriticalVertex { order: sc.zeros[z], prongs });
    }
    let mut probes = Vec::new();
    for (l, line) in sc.lines.iter().enumerate() {
        if line.occ.is_empty() {
            continue;
        }
        let (z, i) = sec.of[l][0];
        let d = line.occ[0].lift;
        let facing = match sc.pieces[line.piece] {
            FlatPiece::HalfPlane { pole, label, angle, .. } => {
                Facing::HalfPlane { pole, label, turn: angle - TAU * d as f64 }
            }
            FlatPiece::Strip { height, lines, deck, .. } => {
                let (other, copy) = if lines[0] == l { (lines[1], deck) } else { (lines[0], -deck) };
                let o = sc.lines[other].occ.first().ok_or_else(|| bad("strip side without zeros"))?;
                let (z2, i2) = sec.of[other][0];
                Facing::Across { zero: z2, sector: i2, height, turn: TAU * (copy + o.lift - d) as f64 }
            }
            FlatPiece::RingDomain { height, lines, .. } => {
                let other = if lines[0] == l { lines[1] } else { lines[0] };
                let (z2, i2) = sec.of[other][0];
                Facing::Across { zero: z2, sector: i2, height, turn: 0.0 }
            }
        };
        probes.push(SectorProbe { zero: z, sector: i, facing });
    }
    let cg = CriticalGraph { surface: sc.surface, n: sc.n, m: sc.m, vertices, base_arg: 0.0 };
    Ok((cg, probes))
}

/// A secondary leaf crossing a boundary line.
#[derive(Clone, Copy, Debug)]
struct Crossing {
    pos: f64,
    /// entering the line's piece (as opposed to leaving it)
    into: bool,
    zero: usize,
    prong: usize,
    /// copy of the line met, relative to the traced zero
    lift: i64,
}

struct Tracer<'a> {
    sc: &'a SurfaceComplex,
    sec: &'a Sectors,
    tol: f64,
    crossings: Vec<Vec<Crossing>>,
}

impl Tracer<'_> {
    /// Bring a position on a closed line into its canonical period.
    fn wrap(&self, l: usize, s: f64, lift: i64) -> (f64, i64) {
        let line = &self.sc.lines[l];
        match line.closed() {
            Some((c, turn)) if !line.occ.is_empty() => {
                let p = ((s - line.occ[0].pos + self.tol) / c).floor();
                (s - p * c, lift + p as i64 * turn)
            }
            _ => (s, lift),
        }
    }

    /// Follow the secondary prong `prong` of zero `z`.
    fn trace(&mut self, z: usize, prong: usize) -> Result<ProngEnd, BuildError> {
        let sc = self.sc;
        let other = sc.primary.other();
        let (mut l, j) = self.sec.by_zero[z][prong];
        let (mut s, d) = sc.lines[l].at_out(j);
        let mut lift = -d;
        let mut acc = 0.0;
        for _ in 0..100_000 {
            let (l2, s2, step, h) = match sc.pieces[sc.lines[l].piece] {
                FlatPiece::HalfPlane { pole, angle, .. } => {
                    return Ok(ProngEnd::Pole { pole, index: end_index(sc, other, pole, angle) });
                }
                FlatPiece::Strip { height, lines, offset, deck } => {
                    if lines[0] == l {
                        (lines[1], offset - s, deck, height)
                    } else {
                        (lines[0], offset - s, -deck, height)
                    }
                }
                FlatPiece::RingDomain { height, lines, offset, .. } => {
                    (if lines[0] == l { lines[1] } else { lines[0] }, offset - s, 0, height)
                }
            };
            acc += h;
            let (s2, lift2) = self.wrap(l2, s2, lift + step);
            let line = &sc.lines[l2];
            if let Some(j2) = line.occ.iter().position(|o| (o.pos - s2).abs() <= self.tol) {
                let o = line.occ[j2];
                let (z2, i2) = self.sec.of[l2][j2];
                return Ok(ProngEnd::Zero { zero: z2, prong: i2, length: acc, turn: TAU * (lift2 + o.lift) as f64 });
            }
            let below = line.occ.iter().filter(|o| o.pos < s2).count();
            let seg = if line.closed().is_some() { below % line.occ.len() } else { below };
            self.crossings[l2].push(Crossing { pos: s2, into: false, zero: z, prong, lift: lift2 });
            let g = sc.glued(SegmentRef { line: l2, segment: seg }).ok_or_else(|| bad("unglued segment"))?;
            let (s3, lift3) = self.wrap(g.b.line, g.offset - s2, lift2 + g.deck);
            self.crossings[g.b.line].push(Crossing { pos: s3, into: true, zero: z, prong, lift: lift3 });
            l = g.b.line;
            s = s3;
            lift = lift3;
        }
        Err(bad("secondary leaf does not terminate"))
    }

    /// What the secondary leaf leaving sector `i` of zero `z` faces.
    fn probe(&self, z: usize, i: usize) -> Result<Facing, BuildError> {
        let sc = self.sc;
        let other = sc.primary.other();
        let (l, j) = self.sec.by_zero[z][i];
        let line = &sc.lines[l];
        let (start, d) = line.at_out(j);
        let r = line.occ.len();
        let next = match line.shape {
            LineShape::Open { .. } if j + 1 == r => None,
            _ => Some((j + 1) % r),
        };
        let limit = next.map_or(f64::INFINITY, |n| line.at_in(n).0);
        let mut best: Option<(f64, Crossing)> = None;
        for c in &self.crossings[l] {
            for p in [c.pos, c.pos + line.closed().map_or(f64::NAN, |x| x.0)] {
                if p > start + self.tol && p < limit - self.tol && best.is_none_or(|b| p < b.0) {
                    best = Some((p, *c));
                }
            }
        }
        if let Some((p, c)) = best {
            let wrapped = p - c.pos > self.tol;
            let turn = line.closed().map_or(0, |x| x.1) * wrapped as i64;
            let count = sc.zeros[c.zero] + 2;
            let sector = if c.into { (c.prong + count - 1) % count } else { c.prong };
            return Ok(Facing::Across {
                zero: c.zero,
                sector,
                height: p - start,
                turn: TAU * (-c.lift + turn - d) as f64,
            });
        }
        match (next, line.shape) {
            (Some(n), _) => {
                let (z2, i2) = self.sec.of[l][n];
                let count = sc.zeros[z2] + 2;
                Ok(Facing::Across {
                    zero: z2,
                    sector: (i2 + count - 1) % count,
                    height: limit - start,
                    turn: TAU * (line.at_in(n).1 - d) as f64,
                })
            }
            (None, LineShape::Open { pole_out, to, .. }) => Ok(Facing::HalfPlane {
                pole: pole_out,
                label: region_label(sc, other, pole_out, to),
                turn: to - TAU * d as f64,
            }),
            _ => Err(bad("closed line without a next singular point")),
        }
    }
}

fn secondary_graph(sc: &SurfaceComplex, sec: &Sectors) -> Result<(CriticalGraph, Vec<SectorProbe>), BuildError> {
    let scale: f64 = 1.0
        + sc.pieces
            .iter()
            .map(|p| match p {
                FlatPiece::Strip { height, offset, .. } => height + offset.abs(),
                FlatPiece::RingDomain { height, circumference, .. } => height + circumference,
                FlatPiece::HalfPlane { .. } => 0.0,
            })
            .sum::<f64>();
    let mut t = Tracer { sc, sec, tol: 1e-9 * scale, crossings: vec![Vec::new(); sc.lines.len()] };
    let mut vertices = Vec::with_capacity(sc.zeros.len());
    for z in 0..sc.zeros.len() {
        let prongs = (0..sc.zeros[z] + 2).map(|i| t.trace(z, i)).collect::<Result<Vec<_>, _>>()?;
        vertices.push(CriticalVertex { order: sc.zeros[z], prongs });
    }
    let mut probes = Vec::new();
    for z in 0..sc.zeros.len() {
        for i in 0..sc.zeros[z] + 2 {
            probes.push(SectorProbe { zero: z, sector: i, facing: t.probe(z, i)? });
        }
    }
    let cg = CriticalGraph { surface: sc.surface, n: sc.n, m: sc.m, vertices, base_arg: 0.0 };
    Ok((cg, probes))
}

/// Leaf spaces (with twists) of both foliations of a complex.
pub fn extract_leaf_spaces(sc: &SurfaceComplex) -> Result<LeafSpaces, BuildError> {
    sc.check()?;
    if sc.zeros.is_empty() {
        if sc.surface != Surface::Plane || sc.n != 4 {
            return Err(bad("no singular points"));
        }
        let line = compose_plane(&LabelledTree::star(2))?;
        return Ok(LeafSpaces { horizontal: line.clone(), vertical: line });
    }
    let sec = sectors(sc)?;
    let (cg, probes) = primary_graph(sc, &sec)?;
    let primary = assemble(&cg, &probes)?.descriptor;
    let (cg, probes) = secondary_graph(sc, &sec)?;
    let secondary = assemble(&cg, &probes)?.descriptor;
    Ok(match sc.primary {
        FoliationKind::Horizontal => LeafSpaces { horizontal: primary, vertical: secondary },
        FoliationKind::Vertical => LeafSpaces { horizontal: secondary, vertical: primary },
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundTrip {
    pub horizontal_error: f64,
    pub vertical_error: f64,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub pieces: usize,
}

/// Extract both foliations of `qd`, build the complex they prescribe (with
/// the frames of `qd`'s leading coefficients) and extract again.
pub fn verify_roundtrip(qd: &QuadDiff, cfg: &ExtractConfig, tolerance: f64) -> Result<RoundTrip, BuildError> {
    let (h, v) = extract_pair(qd, cfg)?;
    let frames = RegionBijection::from_qd(qd)?;
    let sc = build_from_pair_with(h.descriptor(), v.descriptor(), &frames)?;
    let back = extract_leaf_spaces(&sc)?;
    let eh = descriptor_distance(h.descriptor(), &back.horizontal)?;
    let ev = descriptor_distance(v.descriptor(), &back.vertical)?;
    let max = eh.max(ev);
    Ok(RoundTrip {
        horizontal_error: eh,
        vertical_error: ev,
        max_error: max,
        tolerance,
        passed: max <= tolerance,
        pieces: sc.pieces.len(),
    })
}
