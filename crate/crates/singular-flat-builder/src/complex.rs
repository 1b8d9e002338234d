//! The glued surface: half-planes, strips and at most one ring domain.
//!
//! Boundary lines of pieces carry the singular points met along them with
//! a coordinate increasing in the direction that keeps the piece on the
//! right.  Every boundary segment between two consecutive singular points
//! (or a singular point and a pole) is glued to exactly one other segment
//! by s' = offset - s.  On the punctured plane the complex is one
//! fundamental domain of the universal cover; lifts count applications of
//! the deck map, and a closed line (a ring boundary) uses an unrolled
//! coordinate in which one circumference is one deck step of sign `turn`.

use std::collections::BTreeMap;

use foliation_extractor::FoliationDescriptor;
use foliation_space::{decompose, f2_membership, Base};
use graph_moduli::LabelledTree;
use qd_core::{FoliationKind, Pole, Surface};
use serde::{Deserialize, Serialize};

use crate::cover::{Cover, Pt, Trunk};
use crate::leaf::{corner, enumerate, facing_ray, kid_slots, EdgeKey, Gap, HVertex, Slot, VKind, Window};
use crate::{BuildError, RegionBijection};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlatPiece {
    /// Half-plane of the primary foliation; `angle` is the lifted
    /// asymptotic direction of its centre in the frame of its line.
    HalfPlane { pole: Pole, label: usize, angle: f64, line: usize },
    /// A point at s on `lines[0]` faces offset - s on the copy `deck` of `lines[1]`.
    Strip { height: f64, lines: [usize; 2], offset: f64, deck: i64 },
    RingDomain { height: f64, circumference: f64, lines: [usize; 2], offset: f64 },
}

impl FlatPiece {
    pub fn lines(&self) -> Vec<usize> {
        match self {
            FlatPiece::HalfPlane { line, .. } => vec![*line],
            FlatPiece::Strip { lines, .. } | FlatPiece::RingDomain { lines, .. } => lines.to_vec(),
        }
    }
}

/// A singular point on a boundary line: copy `lift` of zero `zero` at `pos`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Occurrence {
    pub zero: usize,
    pub lift: i64,
    pub pos: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LineShape {
    /// Runs in from the pole end at angle `from` and out at angle `to`.
    Open { pole_in: Pole, from: f64, pole_out: Pole, to: f64 },
    Closed { circumference: f64, turn: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    pub piece: usize,
    pub occ: Vec<Occurrence>,
    pub shape: LineShape,
}

/// Segment `segment` of a line: for an open line it is the part before
/// occurrence `segment` (the last one runs out to the pole); for a closed
/// line segment 0 wraps from the last occurrence to the first one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SegmentRef {
    pub line: usize,
    pub segment: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: SegmentRef,
    pub b: SegmentRef,
    pub offset: f64,
    /// always true here: the identification is s ↦ offset - s
    pub reversing: bool,
    /// copy of `b`'s line met by copy 0 of `a`'s line
    pub deck: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeckMap {
    pub tau_h: f64,
    pub tau_v: f64,
    /// length of the period τ_v + iτ_h
    pub translation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceComplex {
    pub surface: Surface,
    pub n: usize,
    pub m: usize,
    /// the foliation whose leaves run along the piece boundaries
    pub primary: FoliationKind,
    pub frames: RegionBijection,
    /// order of each singular point
    pub zeros: Vec<usize>,
    pub pieces: Vec<FlatPiece>,
    pub lines: Vec<BoundaryLine>,
    pub gluings: Vec<Gluing>,
    pub deck: Option<DeckMap>,
}

impl BoundaryLine {
    pub fn closed(&self) -> Option<(f64, i64)> {
        match self.shape {
            LineShape::Closed { circumference, turn } => Some((circumference, turn)),
            LineShape::Open { .. } => None,
        }
    }

    pub fn segments(&self) -> usize {
        if self.closed().is_some() {
            self.occ.len()
        } else {
            self.occ.len() + 1
        }
    }

    /// Segment leaving occurrence `j`.
    pub fn seg_out(&self, j: usize) -> usize {
        if self.closed().is_some() {
            (j + 1) % self.occ.len()
        } else {
            j + 1
        }
    }

    /// Position and lift of occurrence `j` seen as the far end of the
    /// segment entering it.
    pub fn at_in(&self, j: usize) -> (f64, i64) {
        let o = self.occ[j];
        match self.closed() {
            Some((c, turn)) if j == 0 => (o.pos + c, o.lift + turn),
            _ => (o.pos, o.lift),
        }
    }

    pub fn at_out(&self, j: usize) -> (f64, i64) {
        (self.occ[j].pos, self.occ[j].lift)
    }
}

impl SurfaceComplex {
    pub fn half_planes(&self) -> usize {
        self.pieces.iter().filter(|p| matches!(p, FlatPiece::HalfPlane { .. })).count()
    }

    pub fn strips(&self) -> usize {
        self.pieces.iter().filter(|p| matches!(p, FlatPiece::Strip { .. })).count()
    }

    pub fn rings(&self) -> usize {
        self.pieces.iter().filter(|p| matches!(p, FlatPiece::RingDomain { .. })).count()
    }

    /// Gluing of a segment, oriented so that the segment is its `a` side.
    pub fn glued(&self, seg: SegmentRef) -> Option<Gluing> {
        self.gluings.iter().find_map(|g| {
            if g.a == seg {
                Some(*g)
            } else if g.b == seg {
                Some(Gluing { a: g.b, b: g.a, deck: -g.deck, ..*g })
            } else {
                None
            }
        })
    }

    /// Structural checks: every segment glued once, pieces own their lines,
    /// gluing data finite, deck steps bounded.
    pub fn check(&self) -> Result<(), BuildError> {
        let bad = |m: String| Err(BuildError::Inconsistent(m));
        let mut owner = vec![None; self.lines.len()];
        for (i, p) in self.pieces.iter().enumerate() {
            for l in p.lines() {
                if l >= self.lines.len() || owner[l].is_some() || self.lines[l].piece != i {
                    return bad(format!("line {l} is not owned by piece {i} alone"));
                }
                owner[l] = Some(i);
            }
            let ok = match p {
                FlatPiece::HalfPlane { angle, .. } => angle.is_finite(),
                FlatPiece::Strip { height, offset, .. } => *height >= 0.0 && offset.is_finite(),
                FlatPiece::RingDomain { height, circumference, .. } => *height >= 0.0 && *circumference > 0.0,
            };
            if !ok {
                return bad(format!("piece {i} has bad measurements"));
            }
        }
        if owner.iter().any(|o| o.is_none()) {
            return bad("a line has no piece".into());
        }
        let mut seen: BTreeMap<SegmentRef, usize> = BTreeMap::new();
        for g in &self.gluings {
            if !g.offset.is_finite() || !g.reversing {
                return bad(format!("gluing {g:?} is not a bounded half-translation"));
            }
            *seen.entry(g.a).or_default() += 1;
            *seen.entry(g.b).or_default() += 1;
        }
        for (l, line) in self.lines.iter().enumerate() {
            for s in 0..line.segments() {
                if line.occ.is_empty() {
                    continue;
                }
                if seen.get(&SegmentRef { line: l, segment: s }) != Some(&1) {
                    return bad(format!("segment {s} of line {l} is not glued exactly once"));
                }
            }
        }
        if self.surface == Surface::Plane && self.gluings.iter().any(|g| g.deck != 0) {
            return bad("deck steps on the plane".into());
        }
        Ok(())
    }
}

/// One side of a critical leaf, in the quotient.
struct QSide {
    occ: Vec<Occurrence>,
    shape: LineShape,
    len: f64,
}

struct VertexLeaf {
    /// sectors of each zero: (side, occurrence)
    zeros: Vec<Vec<(usize, usize)>>,
    /// one per slot, then the ring side for a ring end
    sides: Vec<QSide>,
}

fn open_shape(primary: &Cover, a: Gap, b: Gap) -> LineShape {
    LineShape::Open {
        pole_in: a.pole,
        from: primary.angle(a.pole, a.g as f64 + 0.5),
        pole_out: b.pole,
        to: primary.angle(b.pole, b.g as f64 + 0.5),
    }
}

fn finite_leaf(primary: &Cover, secondary: &Cover, v: &HVertex) -> Result<VertexLeaf, BuildError> {
    let d = v.slots.len();
    let mut gaps = Vec::with_capacity(d);
    let mut ends = Vec::with_capacity(d);
    for i in 0..d {
        let g = corner(primary, v, &v.slots[i], &v.slots[(i + 1) % d])?;
        ends.push(facing_ray(primary, secondary, g)?.1);
        gaps.push(g);
    }
    let pairs: Vec<(usize, usize)> = (0..d).map(|i| ((i + d - 1) % d, i)).collect();
    let w = Window::span(secondary, ends, &pairs);
    let sides = w
        .sides
        .iter()
        .map(|s| QSide {
            occ: s.occ.iter().map(|&(z, t)| Occurrence { zero: z, lift: 0, pos: t }).collect(),
            shape: open_shape(primary, gaps[s.a], gaps[s.b]),
            len: s.len,
        })
        .collect();
    let zeros = (0..w.zeros.len()).map(|z| w.sectors(z)).collect::<Result<_, _>>()?;
    Ok(VertexLeaf { zeros, sides })
}

/// A ring end: periodic leaf, computed on a window of lifts.
fn ring_leaf(primary: &Cover, secondary: &Cover, pole: Pole, width: i64) -> Result<VertexLeaf, BuildError> {
    let root = primary.roots.iter().find(|r| r.pole == pole).unwrap().node;
    let tau = secondary.tau();
    if tau <= 0.0 {
        return Err(BuildError::Shape("a ring needs the other foliation to have a cycle".into()));
    }
    let lifts: Vec<i64> = match pole {
        Pole::Infinity => (-width..=width).collect(),
        Pole::Zero => (-width..=width).rev().collect(),
    };
    // (slot, kid index, lift)
    let per = kid_slots(primary, root, 0).len();
    let mut list = Vec::new();
    for &l in &lifts {
        for (k, s) in kid_slots(primary, root, l).into_iter().enumerate() {
            list.push((s, k, l));
        }
    }
    let n = list.len();
    // ends: 0 and n are far along the trunk, i in 1..n between slots i-1 and i
    let mut ends = vec![Pt::Far(0.0); n + 1];
    let mut gaps = vec![None; n + 1];
    let fake = HVertex { kind: VKind::RingEnd(pole), slots: vec![] };
    for i in 1..n {
        let g = corner(primary, &fake, &list[i - 1].0, &list[i].0)?;
        ends[i] = facing_ray(primary, secondary, g)?.1;
        gaps[i] = Some(g);
    }
    let phis: Vec<f64> = ends[1..n].iter().map(|&p| secondary.pt_phi(p)).collect();
    let lo = phis.iter().copied().fold(f64::INFINITY, f64::min) - tau - 1.0;
    let hi = phis.iter().copied().fold(f64::NEG_INFINITY, f64::max) + tau + 1.0;
    let start_low = phis.first().is_some_and(|&p| p - lo < hi - p);
    ends[0] = Pt::Far(if start_low { lo } else { hi });
    ends[n] = Pt::Far(if start_low { hi } else { lo });
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
    pairs.push((n, 0));
    let w = Window::span(secondary, ends, &pairs);
    let ring_side = n;
    // cut the trunk between two singular points
    let mut marks: Vec<f64> = w
        .zeros
        .iter()
        .filter_map(|z| match z {
            crate::cover::Loc::Trunk(x) => Some(x.rem_euclid(tau)),
            _ => None,
        })
        .collect();
    if marks.is_empty() {
        return Err(BuildError::Inconsistent("ring boundary without singular points".into()));
    }
    marks.sort_by(f64::total_cmp);
    let mut cut = (marks[marks.len() - 1] + marks[0] + tau) / 2.0;
    let mut widest = marks[0] + tau - marks[marks.len() - 1];
    for p in marks.windows(2) {
        if p[1] - p[0] > widest {
            widest = p[1] - p[0];
            cut = (p[0] + p[1]) / 2.0;
        }
    }
    // shift the cut next to the copy of the leaf we keep
    let lowest = list
        .iter()
        .zip(&w.sides)
        .filter(|((_, _, l), _)| *l == 0)
        .flat_map(|(_, s)| s.occ.iter().map(|&(z, _)| secondary.loc_phi(w.zeros[z])))
        .fold(f64::INFINITY, f64::min);
    if lowest.is_finite() {
        cut += ((lowest - cut) / tau).floor() * tau;
    }
    // canonical copy and lift of every window zero
    let mut canon: Vec<crate::cover::Loc> = Vec::new();
    let mut of: Vec<(usize, i64)> = Vec::with_capacity(w.zeros.len());
    for &z in &w.zeros {
        let lift = ((secondary.loc_phi(z) - cut) / tau).floor() as i64;
        let c = secondary.loc_shift(z, -lift);
        let id = match canon.iter().position(|&x| secondary.loc_eq(x, c)) {
            Some(i) => i,
            None => {
                canon.push(c);
                canon.len() - 1
            }
        };
        of.push((id, lift));
    }
    let mut sides = Vec::with_capacity(per + 1);
    for k in 0..per {
        let si = list.iter().position(|&(_, kk, l)| kk == k && l == 0).unwrap();
        let s = &w.sides[si];
        sides.push(QSide {
            occ: s.occ.iter().map(|&(z, t)| Occurrence { zero: of[z].0, lift: of[z].1, pos: t }).collect(),
            shape: open_shape(primary, gaps[s.a].unwrap(), gaps[s.b].unwrap()),
            len: s.len,
        });
    }
    let dir = (secondary.pt_phi(w.ends[0]) - secondary.pt_phi(w.ends[n])).signum();
    let mut ring_occ: Vec<Occurrence> = w.sides[ring_side]
        .occ
        .iter()
        .filter(|&&(z, _)| of[z].1 == 0)
        .map(|&(z, _)| Occurrence { zero: of[z].0, lift: 0, pos: dir * secondary.loc_phi(w.zeros[z]) })
        .collect();
    ring_occ.sort_by(|a, b| a.pos.total_cmp(&b.pos));
    sides.push(QSide { occ: ring_occ, shape: LineShape::Closed { circumference: tau, turn: dir as i64 }, len: 0.0 });
    let mut zeros = vec![Vec::new(); canon.len()];
    for (id, sectors) in zeros.iter_mut().enumerate() {
        let wz = (0..w.zeros.len())
            .find(|&z| of[z] == (id, 0))
            .ok_or_else(|| BuildError::Inconsistent("singular point outside the window".into()))?;
        for (s, j) in w.sectors(wz)? {
            let (q, want) = if s == ring_side { (per, 0) } else { (list[s].1, -list[s].2) };
            let _ = j;
            let at = sides[q]
                .occ
                .iter()
                .position(|o| o.zero == id && o.lift == want)
                .ok_or_else(|| BuildError::Inconsistent("window too narrow for a ring end".into()))?;
            sectors.push((q, at));
        }
    }
    Ok(VertexLeaf { zeros, sides })
}

/// Glue the critical leaves of the primary leaf space.
pub(crate) fn glue(
    primary: &Cover,
    secondary: &Cover,
    kind: FoliationKind,
    frames: RegionBijection,
    surface: Surface,
    n: usize,
    m: usize,
) -> Result<SurfaceComplex, BuildError> {
    let (vs, es) = enumerate(primary)?;
    let mut leaves = Vec::with_capacity(vs.len());
    for v in &vs {
        let leaf = match v.kind {
            VKind::RingEnd(pole) => {
                let mut res = Err(BuildError::Inconsistent("no window".into()));
                for width in [2, 4, 8] {
                    res = ring_leaf(primary, secondary, pole, width);
                    if res.is_ok() {
                        break;
                    }
                }
                res?
            }
            _ => finite_leaf(primary, secondary, v)?,
        };
        leaves.push(leaf);
    }
    // global numbering
    let mut zero_base = Vec::new();
    let mut line_base = Vec::new();
    let (mut nz, mut nl) = (0, 0);
    for l in &leaves {
        zero_base.push(nz);
        line_base.push(nl);
        nz += l.zeros.len();
        nl += l.sides.len();
    }
    let mut lines: Vec<BoundaryLine> = Vec::with_capacity(nl);
    let mut lens = Vec::with_capacity(nl);
    for (vi, l) in leaves.iter().enumerate() {
        for s in &l.sides {
            let occ = s.occ.iter().map(|o| Occurrence { zero: o.zero + zero_base[vi], ..*o }).collect();
            lines.push(BoundaryLine { piece: usize::MAX, occ, shape: s.shape });
            lens.push(s.len);
        }
    }
    let mut pieces = Vec::new();
    let own = |pieces: &mut Vec<FlatPiece>, lines: &mut Vec<BoundaryLine>, p: FlatPiece| {
        for l in p.lines() {
            lines[l].piece = pieces.len();
        }
        pieces.push(p);
    };
    for (vi, v) in vs.iter().enumerate() {
        for (si, s) in v.slots.iter().enumerate() {
            if let Slot::Ray { pole, q } = *s {
                let p = FlatPiece::HalfPlane {
                    pole,
                    label: primary.label(pole, q),
                    angle: primary.angle(pole, q as f64),
                    line: line_base[vi] + si,
                };
                own(&mut pieces, &mut lines, p);
            }
        }
    }
    for e in &es {
        let (la, lb) = (line_base[e.ends[0].0] + e.ends[0].1, line_base[e.ends[1].0] + e.ends[1].1);
        if (lens[la] - lens[lb]).abs() > secondary.tol * 10.0 {
            return Err(BuildError::Inconsistent(format!(
                "strip sides differ in length: {} vs {} ({:?})",
                lens[la], lens[lb], e.key
            )));
        }
        let _: EdgeKey = e.key;
        own(&mut pieces, &mut lines, FlatPiece::Strip { height: e.len, lines: [la, lb], offset: lens[la], deck: e.deck });
    }
    if let Trunk::Segment(h) = primary.trunk {
        let ends: Vec<usize> = vs
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v.kind, VKind::RingEnd(_)))
            .map(|(i, _)| line_base[i] + leaves[i].sides.len() - 1)
            .collect();
        let turns: Vec<i64> = ends.iter().map(|&l| lines[l].closed().unwrap().1).collect();
        if ends.len() != 2 || turns[0] != -turns[1] {
            return Err(BuildError::Inconsistent("ring boundaries do not run opposite ways".into()));
        }
        let p = FlatPiece::RingDomain { height: h, circumference: secondary.tau(), lines: [ends[0], ends[1]], offset: 0.0 };
        own(&mut pieces, &mut lines, p);
    }
    // singular points and their gluings
    let mut zeros = Vec::with_capacity(nz);
    let mut gluings: BTreeMap<(SegmentRef, SegmentRef), Gluing> = BTreeMap::new();
    for (vi, l) in leaves.iter().enumerate() {
        for sectors in &l.zeros {
            zeros.push(sectors.len() - 2);
            let r = sectors.len();
            for i in 0..r {
                let (la, ja) = (line_base[vi] + sectors[i].0, sectors[i].1);
                let (lb, jb) = (line_base[vi] + sectors[(i + 1) % r].0, sectors[(i + 1) % r].1);
                let (pa, da) = lines[la].at_out(ja);
                let (pb, db) = lines[lb].at_in(jb);
                let a = SegmentRef { line: la, segment: lines[la].seg_out(ja) };
                let b = SegmentRef { line: lb, segment: jb };
                let g = Gluing { a, b, offset: pa + pb, reversing: true, deck: da - db };
                let key = if a <= b { (a, b) } else { (b, a) };
                let g = if a <= b { g } else { Gluing { a: b, b: a, deck: -g.deck, ..g } };
                if let Some(old) = gluings.get(&key) {
                    if (old.offset - g.offset).abs() > secondary.tol * 10.0 || old.deck != g.deck {
                        return Err(BuildError::Inconsistent(format!("saddle connection glued two ways: {old:?} vs {g:?}")));
                    }
                } else {
                    gluings.insert(key, g);
                }
            }
        }
    }
    // lines without singular points (the plane with no zeros) glue to each other whole
    let bare: Vec<usize> = (0..lines.len()).filter(|&l| lines[l].occ.is_empty()).collect();
    if !bare.is_empty() && (bare.len() != 2 || nz != 0) {
        return Err(BuildError::Inconsistent("boundary line without singular points".into()));
    }
    let mut gluings: Vec<Gluing> = gluings.into_values().collect();
    if bare.len() == 2 {
        gluings.push(Gluing {
            a: SegmentRef { line: bare[0], segment: 0 },
            b: SegmentRef { line: bare[1], segment: 0 },
            offset: 0.0,
            reversing: true,
            deck: 0,
        });
    }
    let deck = match surface {
        Surface::Plane => None,
        Surface::PuncturedPlane => {
            let (tp, ts) = (primary.tau(), secondary.tau());
            let (tau_h, tau_v) = match kind {
                FoliationKind::Horizontal => (tp, ts),
                FoliationKind::Vertical => (ts, tp),
            };
            Some(DeckMap { tau_h, tau_v, translation: tau_h.hypot(tau_v) })
        }
    };
    let sc = SurfaceComplex { surface, n, m, primary: kind, frames, zeros, pieces, lines, gluings, deck };
    sc.check()?;
    Ok(sc)
}

/// The plane assembled from the leaf spaces of its two foliations.
pub fn planar_build(v: &LabelledTree, h: &LabelledTree, f: &RegionBijection) -> Result<SurfaceComplex, BuildError> {
    v.validate()?;
    h.validate()?;
    if v.k != h.k {
        return Err(BuildError::Shape(format!("{} vs {} rays", v.k, h.k)));
    }
    f.validate()?;
    let fr = f.get(Pole::Infinity).ok_or_else(|| BuildError::Bijection("no frame at infinity".into()))?;
    if f.frames.len() != 1 || fr.order != h.k + 2 {
        return Err(BuildError::Bijection("frames do not match the trees".into()));
    }
    let hc = Cover::from_tree(h, &|p| f.frame(p, FoliationKind::Horizontal))?;
    let vc = Cover::from_tree(v, &|p| f.frame(p, FoliationKind::Vertical))?;
    glue(&hc, &vc, FoliationKind::Horizontal, f.clone(), Surface::Plane, h.k + 2, 0)
}

/// The universal cover model of the punctured plane with horizontal leaf
/// space `g_h` and vertical leaf space `g_v`, with positive real leading
/// coefficients.
pub fn build_from_pair(g_h: &FoliationDescriptor, g_v: &FoliationDescriptor) -> Result<SurfaceComplex, BuildError> {
    let f = RegionBijection::standard(g_h.n, Some(g_h.m))?;
    build_from_pair_with(g_h, g_v, &f)
}

pub fn build_from_pair_with(
    g_h: &FoliationDescriptor,
    g_v: &FoliationDescriptor,
    f: &RegionBijection,
) -> Result<SurfaceComplex, BuildError> {
    if g_h.graph.surface == Surface::Plane || g_v.graph.surface == Surface::Plane {
        let (h, v) = (foliation_space::plane_tree(&g_h.graph)?, foliation_space::plane_tree(&g_v.graph)?);
        return planar_build(&v, &h, f);
    }
    if (g_h.n, g_h.m) != (g_v.n, g_v.m) {
        return Err(BuildError::Shape("the descriptors have different pole orders".into()));
    }
    if !f2_membership(g_h, g_v) {
        return Err(BuildError::Diagonal);
    }
    f.validate()?;
    let (sh, sv) = (decompose(g_h)?, decompose(g_v)?);
    // the foliation with a ring (if any) supplies the pieces
    let kind = match (sh.base, sv.base) {
        (Base::Ring(_), Base::Ring(_)) => return Err(BuildError::Diagonal),
        (_, Base::Ring(_)) => FoliationKind::Vertical,
        _ => FoliationKind::Horizontal,
    };
    let (ps, ss) = match kind {
        FoliationKind::Horizontal => (&sh, &sv),
        FoliationKind::Vertical => (&sv, &sh),
    };
    let pc = Cover::from_sides(ps, &|p| f.frame(p, kind))?;
    let sc = Cover::from_sides(ss, &|p| f.frame(p, kind.other()))?;
    glue(&pc, &sc, kind, f.clone(), Surface::PuncturedPlane, g_h.n, g_h.m)
}
