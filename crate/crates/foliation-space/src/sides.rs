//! Cutting a leaf space along its cycle into the graph seen from infinity
//! and the graph seen from 0, and gluing them back.
//!
//! Position φ along the cycle increases counterclockwise about the origin.
//! Labels increase clockwise at infinity and counterclockwise at 0, so the
//! side graphs read the cycle in opposite directions.  At a cycle vertex the
//! counterclockwise order is: previous cycle edge, branches towards
//! infinity, next cycle edge, branches towards 0.  Children of any vertex
//! are read clockwise.

use crate::SpaceError;
use foliation_extractor::{Edge, FoliationDescriptor, MetricRibbonGraph, Ray, Slot};
use graph_moduli::{cycle_distance, tree_distance, CycleGraph, LabelledTree, Root, Sub};
use qd_core::{Pole, Surface};
use serde::{Deserialize, Serialize};

/// Where the foliation sits over the folded half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Base {
    /// Continuous twist (τ > 0).
    Twist(f64),
    /// Ring domain height (τ = 0).
    Ring(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub g_inf: CycleGraph,
    pub g_zero: CycleGraph,
    pub base: Base,
}

fn shape(msg: impl Into<String>) -> SpaceError {
    SpaceError::Shape(msg.into())
}

struct Builder {
    edges: Vec<Edge>,
    rays: Vec<Ray>,
    ribbon: Vec<Vec<Slot>>,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.ribbon.push(Vec::new());
        self.ribbon.len() - 1
    }

    fn edge(&mut self, v1: usize, v2: usize, length: f64, in_cycle: bool, ring: bool) -> usize {
        self.edges.push(Edge { v1, v2, length, in_cycle, ring });
        self.edges.len() - 1
    }

    /// Hang `kids` (reading order) at `v`, appending their slots in
    /// counterclockwise order.
    fn hang(&mut self, v: usize, kids: &[Sub], pole: Pole) {
        for k in kids.iter().rev() {
            match k {
                Sub::Ray(l) => {
                    self.rays.push(Ray { vertex: v, pole, label: *l });
                    let r = self.rays.len() - 1;
                    self.ribbon[v].push(Slot::Ray { ray: r });
                }
                Sub::Node { len, kids } => {
                    let w = self.vertex();
                    let e = self.edge(v, w, *len, false, false);
                    self.ribbon[v].push(Slot::Edge { edge: e, end: 0 });
                    self.ribbon[w].push(Slot::Edge { edge: e, end: 1 });
                    self.hang(w, kids, pole);
                }
            }
        }
    }

    fn finish(self) -> MetricRibbonGraph {
        MetricRibbonGraph {
            surface: Surface::PuncturedPlane,
            vertices: (0..self.ribbon.len()).collect(),
            edges: self.edges,
            rays: self.rays,
            ribbon: self.ribbon,
        }
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + scale)
}

/// Glue side graphs of equal cycle length τ > 0, placing the root of ray 1
/// at 0 on the 0 side an arc `l0` (mod τ) after the root of ray 1 at infinity.
pub fn compose_graph(g_inf: &CycleGraph, g_zero: &CycleGraph, l0: f64) -> Result<MetricRibbonGraph, SpaceError> {
    g_inf.validate()?;
    g_zero.validate()?;
    let tau = g_inf.tau;
    if !close(tau, g_zero.tau, tau) {
        return Err(SpaceError::TauMismatch(tau, g_zero.tau));
    }
    if tau <= 0.0 {
        return Err(shape("compose_graph needs a positive cycle length"));
    }
    // (φ, side, root index)
    let mut stops: Vec<(f64, Pole, usize)> = Vec::new();
    for (i, r) in g_inf.roots.iter().enumerate() {
        stops.push(((-r.pos).rem_euclid(tau), Pole::Infinity, i));
    }
    for (i, r) in g_zero.roots.iter().enumerate() {
        stops.push(((l0 + r.pos).rem_euclid(tau), Pole::Zero, i));
    }
    for s in stops.iter_mut() {
        if close(s.0, tau, tau) {
            s.0 = 0.0;
        }
    }
    stops.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then((a.1 == Pole::Zero).cmp(&(b.1 == Pole::Zero))));
    // merge stops at the same position into one vertex
    let mut groups: Vec<(f64, Option<usize>, Option<usize>)> = Vec::new();
    for (phi, side, i) in stops {
        let merge = groups.last().is_some_and(|g| close(g.0, phi, tau) && match side {
            Pole::Infinity => g.1.is_none(),
            Pole::Zero => g.2.is_none(),
        });
        if !merge {
            groups.push((phi, None, None));
        }
        let g = groups.last_mut().unwrap();
        match side {
            Pole::Infinity => g.1 = Some(i),
            Pole::Zero => g.2 = Some(i),
        }
    }
    // wrap-around merge
    if groups.len() > 1 {
        let last = *groups.last().unwrap();
        let first = groups[0];
        if close(last.0, tau + first.0, tau)
            && (last.1.is_none() || first.1.is_none())
            && (last.2.is_none() || first.2.is_none())
        {
            groups.pop();
            groups[0].1 = groups[0].1.or(last.1);
            groups[0].2 = groups[0].2.or(last.2);
        }
    }
    let r = groups.len();
    let mut b = Builder { edges: Vec::new(), rays: Vec::new(), ribbon: Vec::new() };
    for _ in 0..r {
        b.vertex();
    }
    for i in 0..r {
        let next = if i + 1 < r { groups[i + 1].0 } else { groups[0].0 + tau };
        b.edge(i, (i + 1) % r, next - groups[i].0, true, false);
    }
    for (i, g) in groups.iter().enumerate() {
        let prev = (i + r - 1) % r;
        b.ribbon[i].push(Slot::Edge { edge: prev, end: 1 });
        if let Some(ri) = g.1 {
            b.hang(i, &g_inf.roots[ri].kids, Pole::Infinity);
        }
        b.ribbon[i].push(Slot::Edge { edge: i, end: 0 });
        if let Some(ri) = g.2 {
            b.hang(i, &g_zero.roots[ri].kids, Pole::Zero);
        }
    }
    Ok(b.finish())
}

/// Descriptor with τ > 0 and continuous twist t.
pub fn compose(g_inf: &CycleGraph, g_zero: &CycleGraph, t: f64) -> Result<FoliationDescriptor, SpaceError> {
    let tau = g_inf.tau;
    let (j, l0) = FoliationDescriptor::split_twist(t, tau);
    let graph = compose_graph(g_inf, g_zero, l0)?;
    Ok(FoliationDescriptor {
        n: g_inf.k + 2,
        m: g_zero.k + 2,
        graph,
        tau,
        twist_j: Some(j),
        l0: Some(l0),
        continuous_twist: Some(t),
        ring_height: None,
    })
}

/// Descriptor with a ring domain of height `h` between two rooted trees.
pub fn compose_ring(g_inf: &CycleGraph, g_zero: &CycleGraph, h: f64) -> Result<FoliationDescriptor, SpaceError> {
    g_inf.validate()?;
    g_zero.validate()?;
    if g_inf.tau != 0.0 || g_zero.tau != 0.0 {
        return Err(shape("ring composition needs rooted trees"));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(shape(format!("bad ring height {h}")));
    }
    let mut b = Builder { edges: Vec::new(), rays: Vec::new(), ribbon: Vec::new() };
    let a = b.vertex();
    let z = b.vertex();
    let e = b.edge(a, z, h, false, true);
    b.ribbon[a].push(Slot::Edge { edge: e, end: 0 });
    b.hang(a, &g_inf.roots[0].kids, Pole::Infinity);
    b.ribbon[z].push(Slot::Edge { edge: e, end: 1 });
    b.hang(z, &g_zero.roots[0].kids, Pole::Zero);
    Ok(FoliationDescriptor {
        n: g_inf.k + 2,
        m: g_zero.k + 2,
        graph: b.finish(),
        tau: 0.0,
        twist_j: None,
        l0: None,
        continuous_twist: None,
        ring_height: Some(h),
    })
}

/// Children of `v` read clockwise, starting after `from`.
fn read_kids(g: &MetricRibbonGraph, v: usize, from: usize, upto: usize, pole: &mut Option<Pole>) -> Result<Vec<Sub>, SpaceError> {
    let list = &g.ribbon[v];
    let n = list.len();
    let mut out = Vec::new();
    let mut i = (from + 1) % n;
    while i != upto {
        out.push(read_sub(g, list[i], pole)?);
        i = (i + 1) % n;
    }
    out.reverse();
    Ok(out)
}

fn read_sub(g: &MetricRibbonGraph, slot: Slot, pole: &mut Option<Pole>) -> Result<Sub, SpaceError> {
    match slot {
        Slot::Ray { ray } => {
            let r = &g.rays[ray];
            if pole.is_some_and(|p| p != r.pole) {
                return Err(shape("a branch reaches both poles"));
            }
            *pole = Some(r.pole);
            Ok(Sub::Ray(r.label))
        }
        Slot::Edge { edge, .. } => {
            let (w, back) = g.across(slot).unwrap();
            let at = g.slot_index(w, back).unwrap();
            let kids = read_kids(g, w, at, at, pole)?;
            Ok(Sub::Node { len: g.edges[edge].length, kids })
        }
    }
}

/// Branches hanging at a vertex between two slots, with the pole they reach.
fn arc(g: &MetricRibbonGraph, v: usize, from: usize, upto: usize) -> Result<(Vec<Sub>, Option<Pole>), SpaceError> {
    let mut pole = None;
    let kids = read_kids(g, v, from, upto, &mut pole)?;
    Ok((kids, pole))
}

/// Cut a leaf space with a cycle into side graphs; returns them with l0.
pub fn decompose_graph(g: &MetricRibbonGraph) -> Result<(CycleGraph, CycleGraph, f64), SpaceError> {
    g.check()?;
    let cyc = g.cycle_edges();
    if cyc.is_empty() {
        return Err(shape("leaf space has no cycle"));
    }
    let tau: f64 = cyc.iter().map(|&e| g.edges[e].length).sum();
    let nv = g.vertices.len();
    // the two cycle slots at every cycle vertex
    let mut cslots: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (v, list) in g.ribbon.iter().enumerate() {
        for (i, s) in list.iter().enumerate() {
            if let Slot::Edge { edge, .. } = s {
                if cyc.contains(edge) {
                    cslots[v].push(i);
                }
            }
        }
    }
    // orientation: find (prev, next) slot at each cycle vertex
    let mut prev_next: Vec<Option<(usize, usize)>> = vec![None; nv];
    let mut any = None;
    for v in 0..nv {
        if cslots[v].is_empty() {
            continue;
        }
        if cslots[v].len() != 2 {
            return Err(shape(format!("cycle vertex {v} meets the cycle {} times", cslots[v].len())));
        }
        let (a, b) = (cslots[v][0], cslots[v][1]);
        let (_, pa) = arc(g, v, a, b)?;
        let (_, pb) = arc(g, v, b, a)?;
        let pn = match (pa, pb) {
            (Some(Pole::Infinity), _) | (_, Some(Pole::Zero)) => Some((a, b)),
            (Some(Pole::Zero), _) | (_, Some(Pole::Infinity)) => Some((b, a)),
            (None, None) => None,
        };
        if let (Some(x), Some(y)) = (pa, pb) {
            if x == y {
                return Err(shape(format!("both sides of cycle vertex {v} reach {x:?}")));
            }
        }
        prev_next[v] = pn;
        if pn.is_some() && any.is_none() {
            any = Some(v);
        }
    }
    let start = any.ok_or_else(|| shape("no branches on the cycle"))?;
    // walk forward, propagating orientation and positions
    let mut phi = vec![f64::NAN; nv];
    phi[start] = 0.0;
    let mut v = start;
    let mut acc = 0.0;
    for _ in 0..cyc.len() {
        let (_, nx) = prev_next[v].unwrap();
        let slot = g.ribbon[v][nx];
        let Slot::Edge { edge, .. } = slot else { unreachable!() };
        let (w, back) = g.across(slot).unwrap();
        let at = g.slot_index(w, back).unwrap();
        let other = cslots[w].iter().copied().find(|&i| i != at).unwrap_or(at);
        match prev_next[w] {
            Some((pw, _)) if pw != at => return Err(shape("inconsistent orientation along the cycle")),
            _ => prev_next[w] = Some((at, other)),
        }
        acc += g.edges[edge].length;
        v = w;
        if v == start {
            break;
        }
        phi[v] = acc;
    }
    if v != start || (acc - tau).abs() > 1e-9 * (1.0 + tau) {
        return Err(shape("cycle walk did not close"));
    }
    let mut inf_roots = Vec::new();
    let mut zero_roots = Vec::new();
    for v in 0..nv {
        let Some((p, nx)) = prev_next[v] else { continue };
        let (kids_inf, pi) = arc(g, v, p, nx)?;
        let (kids_zero, pz) = arc(g, v, nx, p)?;
        if pi == Some(Pole::Zero) || pz == Some(Pole::Infinity) {
            return Err(shape(format!("branches on the wrong side at vertex {v}")));
        }
        if !kids_inf.is_empty() {
            inf_roots.push((phi[v], kids_inf));
        }
        if !kids_zero.is_empty() {
            zero_roots.push((phi[v], kids_zero));
        }
    }
    let holder = |roots: &[(f64, Vec<Sub>)]| roots.iter().find(|r| r.1.iter().any(|k| k.contains(1))).map(|r| r.0);
    let x1 = holder(&inf_roots).ok_or_else(|| shape("ray 1 at infinity missing"))?;
    let x1p = holder(&zero_roots).ok_or_else(|| shape("ray 1 at 0 missing"))?;
    let k_inf = g.rays_at(Pole::Infinity).len();
    let k_zero = g.rays_at(Pole::Zero).len();
    let mk = |k: usize, roots: Vec<(f64, Vec<Sub>)>, pos: &dyn Fn(f64) -> f64| -> CycleGraph {
        let mut roots: Vec<Root> = roots.into_iter().map(|(p, kids)| Root { pos: pos(p), kids }).collect();
        roots.sort_by(|a, b| a.pos.partial_cmp(&b.pos).unwrap());
        CycleGraph { k, tau, roots }.canonical()
    };
    let g_inf = mk(k_inf, inf_roots, &|p| (x1 - p).rem_euclid(tau));
    let g_zero = mk(k_zero, zero_roots, &|p| (p - x1p).rem_euclid(tau));
    g_inf.validate()?;
    g_zero.validate()?;
    let mut l0 = (x1p - x1).rem_euclid(tau);
    if l0 >= tau {
        l0 = 0.0;
    }
    Ok((g_inf, g_zero, l0))
}

/// Cut a descriptor into side graphs and its base coordinate.
pub fn decompose(fd: &FoliationDescriptor) -> Result<Sides, SpaceError> {
    if fd.tau > 0.0 {
        let (g_inf, g_zero, l0) = decompose_graph(&fd.graph)?;
        let t = match fd.continuous_twist {
            Some(t) => t,
            None => fd.twist_j.unwrap_or(0) as f64 * fd.tau + l0,
        };
        return Ok(Sides { g_inf, g_zero, base: Base::Twist(t) });
    }
    let g = &fd.graph;
    g.check()?;
    let e = g
        .edges
        .iter()
        .position(|e| e.ring)
        .ok_or_else(|| shape("τ = 0 but no ring edge"))?;
    let side = |end: u8| -> Result<(CycleGraph, Pole), SpaceError> {
        let slot = Slot::Edge { edge: e, end };
        let v = if end == 0 { g.edges[e].v1 } else { g.edges[e].v2 };
        let at = g.slot_index(v, slot).unwrap();
        let (kids, pole) = arc(g, v, at, at)?;
        let pole = pole.ok_or_else(|| shape("empty side of the ring"))?;
        let k = g.rays_at(pole).len();
        let cg = CycleGraph { k, tau: 0.0, roots: vec![Root { pos: 0.0, kids }] }.canonical();
        cg.validate()?;
        Ok((cg, pole))
    };
    let (a, pa) = side(0)?;
    let (b, _) = side(1)?;
    let (g_inf, g_zero) = if pa == Pole::Infinity { (a, b) } else { (b, a) };
    let h = fd.ring_height.unwrap_or(g.edges[e].length);
    Ok(Sides { g_inf, g_zero, base: Base::Ring(h) })
}

/// Leaf space of a foliation of the plane as a tree rooted at its last ray.
pub fn plane_tree(g: &MetricRibbonGraph) -> Result<LabelledTree, SpaceError> {
    g.check()?;
    if g.surface != Surface::Plane {
        return Err(shape("not a leaf space of the plane"));
    }
    let k = g.rays.len();
    let r = g.ray_by_label(Pole::Infinity, k).ok_or_else(|| shape("last ray missing"))?;
    let v = g.rays[r].vertex;
    let at = g.slot_index(v, Slot::Ray { ray: r }).unwrap();
    let (kids, _) = arc(g, v, at, at)?;
    let t = LabelledTree { k, kids }.canonical();
    t.validate()?;
    Ok(t)
}

/// Descriptor of the plane foliation whose leaf space is `tree`.
pub fn compose_plane(tree: &LabelledTree) -> Result<FoliationDescriptor, SpaceError> {
    tree.validate()?;
    let mut b = Builder { edges: Vec::new(), rays: Vec::new(), ribbon: Vec::new() };
    let v = b.vertex();
    b.rays.push(Ray { vertex: v, pole: Pole::Infinity, label: tree.k });
    b.ribbon[v].push(Slot::Ray { ray: 0 });
    b.hang(v, &tree.kids, Pole::Infinity);
    let mut graph = b.finish();
    graph.surface = Surface::Plane;
    Ok(FoliationDescriptor {
        n: tree.k + 2,
        m: 0,
        graph,
        tau: 0.0,
        twist_j: None,
        l0: None,
        continuous_twist: None,
        ring_height: None,
    })
}

/// Distance between descriptors: base coordinates plus side-graph distances.
pub fn descriptor_distance(a: &FoliationDescriptor, b: &FoliationDescriptor) -> Result<f64, SpaceError> {
    match (a.graph.surface, b.graph.surface) {
        (Surface::Plane, Surface::Plane) => return Ok(tree_distance(&plane_tree(&a.graph)?, &plane_tree(&b.graph)?)?),
        (Surface::Plane, _) | (_, Surface::Plane) => return Err(shape("descriptors live on different surfaces")),
        _ => {}
    }
    let (sa, sb) = (decompose(a)?, decompose(b)?);
    let base = match (sa.base, sb.base) {
        (Base::Twist(x), Base::Twist(y)) => (x - y).abs() + (a.tau - b.tau).abs(),
        (Base::Ring(x), Base::Ring(y)) => (x - y).abs(),
        (Base::Twist(x), Base::Ring(h)) | (Base::Ring(h), Base::Twist(x)) => (x.abs() - h).abs() + a.tau.max(b.tau),
    };
    Ok(base + cycle_distance(&sa.g_inf, &sb.g_inf)? + cycle_distance(&sa.g_zero, &sb.g_zero)?)
}
