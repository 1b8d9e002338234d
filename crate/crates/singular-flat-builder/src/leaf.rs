//! Vertices of the primary leaf space and the critical leaves they become.
//!
//! Every vertex of the primary leaf space is a critical leaf of the primary
//! foliation.  Its prongs run to the ends sitting in the corners between
//! consecutive slots, and each such end faces a half-plane of the secondary
//! foliation, i.e. a ray of the secondary leaf space.  The leaf itself is
//! the subtree of the secondary cover spanned by those rays: singular
//! points are its branch points, and the side of the leaf facing a slot is
//! the geodesic between the rays in the two corners of that slot.

use qd_core::Pole;

use crate::cover::{Cover, Kid, Loc, Pt, Trunk};
use crate::BuildError;

/// The end between reading indices `g` and `g + 1` at a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Gap {
    pub pole: Pole,
    pub g: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EdgeKey {
    Tree(usize),
    Cycle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Slot {
    Ray { pole: Pole, q: i64 },
    Branch { pole: Pole, first: i64, last: i64, edge: EdgeKey },
    Parent(EdgeKey),
    Prev(EdgeKey),
    Next(EdgeKey),
}

#[derive(Clone, Debug)]
pub(crate) enum VKind {
    Node,
    Cycle { phi: f64 },
    /// end of the ring edge; slots hold one period of its branches
    RingEnd(Pole),
    PlaneRoot,
}

#[derive(Clone, Debug)]
pub(crate) struct HVertex {
    pub kind: VKind,
    /// counterclockwise
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug)]
pub(crate) struct HEdge {
    pub key: EdgeKey,
    pub len: f64,
    /// (vertex, slot index) at each end
    pub ends: [(usize, usize); 2],
    /// lift of the copy of end 1 that meets the chosen copy of end 0
    pub deck: i64,
}

fn kid_slot(c: &Cover, pole: Pole, kid: Kid, lift: i64) -> Slot {
    match kid {
        Kid::Ray(i) => Slot::Ray { pole, q: c.reading(pole, i, lift) },
        Kid::Node(w) => {
            let (a, b) = c.nodes[w].span;
            Slot::Branch { pole, first: c.reading(pole, a, lift), last: c.reading(pole, b, lift), edge: EdgeKey::Tree(w) }
        }
    }
}

/// Kid slots of `node` in counterclockwise order.
pub(crate) fn kid_slots(c: &Cover, node: usize, lift: i64) -> Vec<Slot> {
    let pole = c.roots[c.nodes[node].root].pole;
    c.nodes[node].kids.iter().rev().map(|&k| kid_slot(c, pole, k, lift)).collect()
}

struct Enum<'a> {
    c: &'a Cover,
    vertices: Vec<HVertex>,
    /// (vertex, slot) of the branch end of each tree edge, keyed by node
    pending: Vec<(usize, usize, usize)>,
}

impl Enum<'_> {
    fn add(&mut self, kind: VKind, slots: Vec<Slot>) -> usize {
        let v = self.vertices.len();
        for (i, s) in slots.iter().enumerate() {
            if let Slot::Branch { edge: EdgeKey::Tree(w), .. } = s {
                self.pending.push((*w, v, i));
            }
        }
        self.vertices.push(HVertex { kind, slots });
        v
    }

    /// Vertices below `node` (which has already been added).
    fn below(&mut self, node: usize, lift: i64, edges: &mut Vec<HEdge>) {
        let kids = self.c.nodes[node].kids.clone();
        for k in kids {
            if let Kid::Node(w) = k {
                let mut slots = vec![Slot::Parent(EdgeKey::Tree(w))];
                slots.extend(kid_slots(self.c, w, lift));
                let v = self.add(VKind::Node, slots);
                let &(_, pv, ps) = self.pending.iter().find(|p| p.0 == w).unwrap();
                edges.push(HEdge { key: EdgeKey::Tree(w), len: self.c.nodes[w].len, ends: [(pv, ps), (v, 0)], deck: 0 });
                self.below(w, lift, edges);
            }
        }
    }
}

/// All vertices and finite edges of the primary leaf space, each vertex
/// taken in one chosen copy.
pub(crate) fn enumerate(c: &Cover) -> Result<(Vec<HVertex>, Vec<HEdge>), BuildError> {
    let mut e = Enum { c, vertices: Vec::new(), pending: Vec::new() };
    let mut edges = Vec::new();
    match c.trunk {
        Trunk::Point => {
            let root = c.roots[0].node;
            e.add(VKind::PlaneRoot, kid_slots(c, root, 0));
            e.below(root, 0, &mut edges);
        }
        Trunk::Segment(_) => {
            for r in 0..c.roots.len() {
                let root = c.roots[r].node;
                e.add(VKind::RingEnd(c.roots[r].pole), kid_slots(c, root, 0));
                e.below(root, 0, &mut edges);
            }
        }
        Trunk::Line(tau) => {
            // (phi in [0, τ), lift, root)
            let mut stops: Vec<(f64, i64, usize)> = c
                .roots
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut phi = r.pos.rem_euclid(tau);
                    if tau - phi <= c.tol {
                        phi = 0.0;
                    }
                    (phi, ((phi - r.pos) / tau).round() as i64, i)
                })
                .collect();
            stops.sort_by(|a, b| a.0.total_cmp(&b.0).then(c.roots[a.2].pole.cmp(&c.roots[b.2].pole)));
            let mut groups: Vec<(f64, Vec<(i64, usize)>)> = Vec::new();
            for (phi, lift, r) in stops {
                let pole = c.roots[r].pole;
                match groups.last_mut() {
                    Some(g) if (g.0 - phi).abs() <= c.tol && g.1.iter().all(|&(_, s)| c.roots[s].pole != pole) => {
                        g.1.push((lift, r))
                    }
                    _ => groups.push((phi, vec![(lift, r)])),
                }
            }
            if groups.len() > 1 {
                let last = groups.last().unwrap().clone();
                let g0 = &groups[0];
                let poles_clash = last.1.iter().any(|&(_, a)| g0.1.iter().any(|&(_, b)| c.roots[a].pole == c.roots[b].pole));
                if (g0.0 + tau - last.0).abs() <= c.tol && !poles_clash {
                    groups.pop();
                    groups[0].1.extend(last.1.into_iter().map(|(l, r)| (l - 1, r)));
                }
            }
            let n = groups.len();
            let side = |g: &(f64, Vec<(i64, usize)>), pole: Pole| g.1.iter().copied().find(|&(_, r)| c.roots[r].pole == pole);
            let mut firsts = Vec::new();
            for (i, g) in groups.iter().enumerate() {
                let mut slots = vec![Slot::Prev(EdgeKey::Cycle((i + n - 1) % n))];
                if let Some((l, r)) = side(g, Pole::Infinity) {
                    slots.extend(kid_slots(c, c.roots[r].node, l));
                }
                slots.push(Slot::Next(EdgeKey::Cycle(i)));
                let next_at = slots.len() - 1;
                if let Some((l, r)) = side(g, Pole::Zero) {
                    slots.extend(kid_slots(c, c.roots[r].node, l));
                }
                let v = e.add(VKind::Cycle { phi: g.0 }, slots);
                firsts.push((v, next_at));
                for &(l, r) in &g.1 {
                    e.below(c.roots[r].node, l, &mut edges);
                }
            }
            for i in 0..n {
                let j = (i + 1) % n;
                let len = if j == 0 { groups[0].0 + tau - groups[i].0 } else { groups[j].0 - groups[i].0 };
                edges.push(HEdge {
                    key: EdgeKey::Cycle(i),
                    len,
                    ends: [(firsts[i].0, firsts[i].1), (firsts[j].0, 0)],
                    deck: if j == 0 { 1 } else { 0 },
                });
            }
        }
    }
    Ok((e.vertices, edges))
}

fn is_branch(s: &Slot) -> Option<(Pole, i64, i64)> {
    match *s {
        Slot::Ray { pole, q } => Some((pole, q, q)),
        Slot::Branch { pole, first, last, .. } => Some((pole, first, last)),
        _ => None,
    }
}

/// End of the primary foliation sitting between slots `x` and `y`
/// (counterclockwise) at vertex `v`.
pub(crate) fn corner(c: &Cover, v: &HVertex, x: &Slot, y: &Slot) -> Result<Gap, BuildError> {
    if let Some((pole, first, _)) = is_branch(x) {
        return Ok(Gap { pole, g: first - 1 });
    }
    if let Some((pole, _, last)) = is_branch(y) {
        return Ok(Gap { pole, g: last });
    }
    let (VKind::Cycle { phi }, Trunk::Line(tau)) = (&v.kind, c.trunk) else {
        return Err(BuildError::Shape("corner between two edges away from the cycle".into()));
    };
    let pole = match (x, y) {
        (Slot::Prev(_), Slot::Next(_)) => Pole::Infinity,
        (Slot::Next(_), Slot::Prev(_)) => Pole::Zero,
        _ => return Err(BuildError::Shape("unexpected corner at a cycle vertex".into())),
    };
    // nearest stop of that side beyond the vertex in reading order
    let mut best: Option<(f64, i64, usize)> = None;
    for r in c.roots.iter().filter(|r| r.pole == pole) {
        let (l, at) = match pole {
            Pole::Infinity => {
                let mut l = ((phi - r.pos) / tau).floor() as i64 + 1;
                if r.pos + l as f64 * tau <= phi + c.tol {
                    l += 1;
                }
                (l, r.pos + l as f64 * tau)
            }
            Pole::Zero => {
                let mut l = ((phi - r.pos) / tau).ceil() as i64 - 1;
                if r.pos + l as f64 * tau >= phi - c.tol {
                    l -= 1;
                }
                (l, r.pos + l as f64 * tau)
            }
        };
        let key = (at - phi).abs();
        if best.is_none_or(|b| key < b.0) {
            best = Some((key, l, r.node));
        }
    }
    let (_, l, node) = best.ok_or_else(|| BuildError::Shape(format!("no branches towards {pole:?}")))?;
    Ok(Gap { pole, g: c.reading(pole, c.nodes[node].span.1, l) })
}

/// Where the secondary ray facing a primary end attaches.
pub(crate) fn facing_ray(primary: &Cover, secondary: &Cover, gap: Gap) -> Result<(f64, Pt), BuildError> {
    let angle = primary.angle(gap.pole, gap.g as f64 + 0.5);
    let x = secondary.reading_at(gap.pole, angle);
    let q = x.round();
    if (x - q).abs() > 1e-6 {
        return Err(BuildError::Bijection(format!("end at angle {angle} faces no half-plane")));
    }
    let (node, lift) = secondary.ray(gap.pole, q as i64);
    Ok((angle, Pt::At(node, lift)))
}

#[derive(Clone, Debug)]
pub(crate) struct WSide {
    pub a: usize,
    pub b: usize,
    pub len: f64,
    /// (zero, distance from end a)
    pub occ: Vec<(usize, f64)>,
}

/// A critical leaf (or a window of a periodic one) inside the secondary cover.
#[derive(Clone, Debug)]
pub(crate) struct Window {
    pub ends: Vec<Pt>,
    pub zeros: Vec<Loc>,
    pub sides: Vec<WSide>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Nb {
    Zero(usize),
    End(usize),
}

impl Window {
    pub fn span(sec: &Cover, ends: Vec<Pt>, pairs: &[(usize, usize)]) -> Window {
        let mut zeros: Vec<Loc> = Vec::new();
        let mut sides = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (pa, pb) = (ends[a], ends[b]);
            let d = sec.dist(pa, pb);
            let mut ts: Vec<f64> = ends
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != a && i != b)
                .map(|(_, &z)| ((d + sec.dist(pa, z) - sec.dist(pb, z)) / 2.0).clamp(0.0, d))
                .collect();
            ts.sort_by(f64::total_cmp);
            let mut occ: Vec<(usize, f64)> = Vec::new();
            for t in ts {
                if occ.last().is_some_and(|o| t - o.1 <= sec.tol) {
                    continue;
                }
                let loc = sec.locate(pa, pb, d, t);
                let id = match zeros.iter().position(|&z| sec.loc_eq(z, loc)) {
                    Some(i) => i,
                    None => {
                        zeros.push(loc);
                        zeros.len() - 1
                    }
                };
                occ.push((id, t));
            }
            sides.push(WSide { a, b, len: d, occ });
        }
        Window { ends, zeros, sides }
    }

    fn in_nb(&self, s: usize, j: usize) -> Nb {
        let side = &self.sides[s];
        if j == 0 {
            Nb::End(side.a)
        } else {
            Nb::Zero(side.occ[j - 1].0)
        }
    }

    fn out_nb(&self, s: usize, j: usize) -> Nb {
        let side = &self.sides[s];
        if j + 1 == side.occ.len() {
            Nb::End(side.b)
        } else {
            Nb::Zero(side.occ[j + 1].0)
        }
    }

    /// Occurrences (side, index) of zero `z` in counterclockwise order.
    pub fn sectors(&self, z: usize) -> Result<Vec<(usize, usize)>, BuildError> {
        let occ: Vec<(usize, usize)> = self
            .sides
            .iter()
            .enumerate()
            .flat_map(|(s, side)| side.occ.iter().enumerate().filter(|o| o.1 .0 == z).map(move |(j, _)| (s, j)))
            .collect();
        let mut out = vec![occ[0]];
        loop {
            let &(s, j) = out.last().unwrap();
            let nb = self.out_nb(s, j);
            let next: Vec<_> = occ.iter().copied().filter(|&(s2, j2)| self.in_nb(s2, j2) == nb).collect();
            if next.len() != 1 {
                return Err(BuildError::Inconsistent(format!("prongs at a singular point do not close up ({})", next.len())));
            }
            if next[0] == out[0] {
                break;
            }
            if out.len() > occ.len() {
                return Err(BuildError::Inconsistent("prong cycle runs away".into()));
            }
            out.push(next[0]);
        }
        if out.len() != occ.len() || out.len() < 3 {
            return Err(BuildError::Inconsistent(format!(
                "singular point with {} sectors, {} sides through it",
                out.len(),
                occ.len()
            )));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use foliation_space::{Base, Sides};
    use graph_moduli::{CycleGraph, LabelledTree, Root, Sub};

    #[test]
    fn star_vertex_has_all_rays() {
        let t = LabelledTree::star(4);
        let c = Cover::from_tree(&t, &|_| 0.0).unwrap();
        let (vs, es) = enumerate(&c).unwrap();
        assert_eq!(vs.len(), 1);
        assert!(es.is_empty());
        let qs: Vec<i64> =
            vs[0].slots.iter().map(|s| if let Slot::Ray { q, .. } = s { *q } else { panic!() }).collect();
        assert_eq!(qs, vec![3, 2, 1, 0]);
    }

    #[test]
    fn cycle_corners_without_branches() {
        // one ray per pole: a single cycle vertex when the twist is 0
        let g = CycleGraph::single(1.0);
        let sides = Sides { g_inf: g.clone(), g_zero: g, base: Base::Twist(0.25) };
        let c = Cover::from_sides(&sides, &|_| 0.0).unwrap();
        let (vs, es) = enumerate(&c).unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(es.len(), 2);
        // the vertex carrying only the 0 ray has an empty side towards infinity
        let v = vs.iter().find(|v| v.slots.len() == 3 && matches!(v.slots[2], Slot::Ray { pole: Pole::Zero, .. })).unwrap();
        let gap = corner(&c, v, &v.slots[0], &v.slots[1]).unwrap();
        assert_eq!(gap.pole, Pole::Infinity);
        // ray at infinity sits at φ = 0 (lift 0) and φ = 1 (lift 1); 1 is above 0.25
        assert_eq!(gap.g, c.reading(Pole::Infinity, 0, 1));
    }

    #[test]
    fn window_of_a_tripod() {
        let t = LabelledTree { k: 3, kids: vec![Sub::Ray(1), Sub::Ray(2)] };
        let c = Cover::from_tree(&t, &|_| 0.0).unwrap();
        let ends: Vec<Pt> = (0..3).map(|q| { let (n, l) = c.ray(Pole::Infinity, q); Pt::At(n, l) }).collect();
        let w = Window::span(&c, ends, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(w.zeros.len(), 1);
        assert_eq!(w.sectors(0).unwrap().len(), 3);
        let _ = Root { pos: 0.0, kids: vec![] };
    }
}
