//! Universal cover of a leaf space: a trunk (line, segment or point) with
//! planar trees hanging off it.
//!
//! Copies of a hanging tree are indexed by a lift (one turn about the
//! origin moves a tree one period along a line trunk).  Rays at a pole are
//! indexed by their reading index q over all lifts; q = 0 is ray 1 in
//! sheet 0 and consecutive rays differ by 2π/K in asymptotic angle.

use std::f64::consts::TAU;

use foliation_space::{Base, Sides};
use graph_moduli::{LabelledTree, Sub};
use qd_core::Pole;

use crate::BuildError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Trunk {
    Line(f64),
    Segment(f64),
    Point,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Kid {
    /// index into the period's reading sequence
    Ray(usize),
    Node(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub parent: Option<usize>,
    pub len: f64,
    pub depth: f64,
    pub root: usize,
    pub kids: Vec<Kid>,
    /// reading indices (within the period) of the first and last ray below
    pub span: (usize, usize),
}

#[derive(Clone, Debug)]
pub(crate) struct RootSpot {
    pub pole: Pole,
    pub pos: f64,
    pub node: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct PoleRays {
    pub pole: Pole,
    pub k: usize,
    pub attach: Vec<usize>,
    pub labels: Vec<usize>,
    pub first: usize,
    /// asymptotic angle of ray 1 in sheet 0, in [0, 2π)
    pub alpha1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Pt {
    At(usize, i64),
    Far(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Loc {
    Trunk(f64),
    At { node: usize, lift: i64, up: f64 },
}

#[derive(Clone, Debug)]
pub(crate) struct Cover {
    pub trunk: Trunk,
    pub nodes: Vec<Node>,
    pub roots: Vec<RootSpot>,
    pub poles: Vec<PoleRays>,
    pub tol: f64,
}

/// +1 where reading runs counterclockwise (at 0), -1 at infinity.
pub(crate) fn sense(pole: Pole) -> i64 {
    match pole {
        Pole::Infinity => -1,
        Pole::Zero => 1,
    }
}

fn alpha1(pole: Pole, k: usize, frame: f64) -> f64 {
    let u = TAU * 1.5 / k as f64 + frame;
    match pole {
        Pole::Infinity => (-u).rem_euclid(TAU),
        Pole::Zero => u.rem_euclid(TAU),
    }
}

impl Cover {
    fn empty(trunk: Trunk) -> Cover {
        Cover { trunk, nodes: Vec::new(), roots: Vec::new(), poles: Vec::new(), tol: 0.0 }
    }

    fn add_root(&mut self, pole: Pole, pos: f64, kids: &[Sub], pr: &mut PoleRays) {
        let node = self.nodes.len();
        let root = self.roots.len();
        self.roots.push(RootSpot { pole, pos, node });
        self.nodes.push(Node { parent: None, len: 0.0, depth: 0.0, root, kids: Vec::new(), span: (0, 0) });
        self.hang(node, kids, pr);
    }

    fn hang(&mut self, v: usize, kids: &[Sub], pr: &mut PoleRays) {
        let start = pr.attach.len();
        let mut out = Vec::with_capacity(kids.len());
        for s in kids {
            match s {
                Sub::Ray(l) => {
                    out.push(Kid::Ray(pr.attach.len()));
                    pr.attach.push(v);
                    pr.labels.push(*l);
                }
                Sub::Node { len, kids } => {
                    let w = self.nodes.len();
                    let depth = self.nodes[v].depth + len;
                    let root = self.nodes[v].root;
                    self.nodes.push(Node { parent: Some(v), len: *len, depth, root, kids: Vec::new(), span: (0, 0) });
                    self.hang(w, kids, pr);
                    out.push(Kid::Node(w));
                }
            }
        }
        self.nodes[v].kids = out;
        self.nodes[v].span = (start, pr.attach.len().saturating_sub(1));
    }

    fn finish(mut self, mut poles: Vec<PoleRays>, frame: &dyn Fn(Pole) -> f64) -> Result<Cover, BuildError> {
        for pr in poles.iter_mut() {
            pr.k = pr.attach.len();
            if pr.k == 0 {
                return Err(BuildError::Shape(format!("no rays at {:?}", pr.pole)));
            }
            pr.first = pr
                .labels
                .iter()
                .position(|&l| l == 1)
                .ok_or_else(|| BuildError::Shape("ray 1 missing".into()))?;
            pr.alpha1 = alpha1(pr.pole, pr.k, frame(pr.pole));
        }
        let mut scale: f64 = self.nodes.iter().map(|n| n.len).sum();
        scale += match self.trunk {
            Trunk::Line(t) | Trunk::Segment(t) => t,
            Trunk::Point => 0.0,
        };
        self.tol = 1e-9 * (1.0 + scale);
        self.poles = poles;
        Ok(self)
    }

    /// Cover of a leaf space of the punctured plane from its side graphs.
    pub fn from_sides(sides: &Sides, frame: &dyn Fn(Pole) -> f64) -> Result<Cover, BuildError> {
        let mut inf = PoleRays { pole: Pole::Infinity, k: 0, attach: vec![], labels: vec![], first: 0, alpha1: 0.0 };
        let mut zero = PoleRays { pole: Pole::Zero, ..inf.clone() };
        let mut c = match sides.base {
            Base::Twist(t) => {
                let tau = sides.g_inf.tau;
                let mut c = Cover::empty(Trunk::Line(tau));
                for r in &sides.g_inf.roots {
                    c.add_root(Pole::Infinity, -r.pos, &r.kids, &mut inf);
                }
                for r in &sides.g_zero.roots {
                    c.add_root(Pole::Zero, t + r.pos, &r.kids, &mut zero);
                }
                c
            }
            Base::Ring(h) => {
                let mut c = Cover::empty(Trunk::Segment(h));
                if sides.g_inf.roots.len() != 1 || sides.g_zero.roots.len() != 1 {
                    return Err(BuildError::Shape("a ring side must be a rooted tree".into()));
                }
                c.add_root(Pole::Infinity, 0.0, &sides.g_inf.roots[0].kids, &mut inf);
                c.add_root(Pole::Zero, h, &sides.g_zero.roots[0].kids, &mut zero);
                c
            }
        };
        c.poles.clear();
        c.finish(vec![inf, zero], frame)
    }

    /// Cover (the tree itself) of a leaf space of the plane.
    pub fn from_tree(tree: &LabelledTree, frame: &dyn Fn(Pole) -> f64) -> Result<Cover, BuildError> {
        let mut pr = PoleRays { pole: Pole::Infinity, k: 0, attach: vec![], labels: vec![], first: 0, alpha1: 0.0 };
        let mut c = Cover::empty(Trunk::Point);
        let mut kids = tree.kids.clone();
        kids.push(Sub::Ray(tree.k));
        c.add_root(Pole::Infinity, 0.0, &kids, &mut pr);
        c.finish(vec![pr], frame)
    }

    pub fn tau(&self) -> f64 {
        match self.trunk {
            Trunk::Line(t) => t,
            _ => 0.0,
        }
    }

    pub fn pole(&self, pole: Pole) -> &PoleRays {
        self.poles.iter().find(|p| p.pole == pole).expect("pole present")
    }

    /// Reading index of the ray at period index `i` in lift `lift`.
    pub fn reading(&self, pole: Pole, i: usize, lift: i64) -> i64 {
        let pr = self.pole(pole);
        let lift = if self.trunk == Trunk::Point { 0 } else { lift };
        i as i64 - pr.first as i64 + sense(pole) * lift * pr.k as i64
    }

    /// Attaching node and lift of the ray with reading index `q`.
    pub fn ray(&self, pole: Pole, q: i64) -> (usize, i64) {
        let pr = self.pole(pole);
        let k = pr.k as i64;
        let i = (q + pr.first as i64).rem_euclid(k);
        let lift = if self.trunk == Trunk::Point { 0 } else { (q - i + pr.first as i64) / (sense(pole) * k) };
        (pr.attach[i as usize], lift)
    }

    pub fn label(&self, pole: Pole, q: i64) -> usize {
        let pr = self.pole(pole);
        pr.labels[(q + pr.first as i64).rem_euclid(pr.k as i64) as usize]
    }

    /// Continuous asymptotic angle at (fractional) reading index `x`.
    pub fn angle(&self, pole: Pole, x: f64) -> f64 {
        let pr = self.pole(pole);
        pr.alpha1 + sense(pole) as f64 * x * TAU / pr.k as f64
    }

    /// Inverse of [`Cover::angle`].
    pub fn reading_at(&self, pole: Pole, angle: f64) -> f64 {
        let pr = self.pole(pole);
        (angle - pr.alpha1) * pr.k as f64 / TAU * sense(pole) as f64
    }

    pub fn phi(&self, node: usize, lift: i64) -> f64 {
        let pos = self.roots[self.nodes[node].root].pos;
        match self.trunk {
            Trunk::Line(t) => pos + lift as f64 * t,
            _ => pos,
        }
    }

    fn pt_depth(&self, p: Pt) -> f64 {
        match p {
            Pt::At(n, _) => self.nodes[n].depth,
            Pt::Far(_) => 0.0,
        }
    }

    pub fn pt_phi(&self, p: Pt) -> f64 {
        match p {
            Pt::At(n, l) => self.phi(n, l),
            Pt::Far(x) => x,
        }
    }

    fn same_tree(&self, a: Pt, b: Pt) -> bool {
        match (a, b) {
            (Pt::At(u, lu), Pt::At(v, lv)) => {
                self.nodes[u].root == self.nodes[v].root && (lu == lv || self.trunk == Trunk::Point)
            }
            _ => false,
        }
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while u != v {
            if self.nodes[u].depth >= self.nodes[v].depth && self.nodes[u].parent.is_some() {
                u = self.nodes[u].parent.unwrap();
            } else {
                v = self.nodes[v].parent.expect("nodes share a root");
            }
        }
        u
    }

    pub fn dist(&self, a: Pt, b: Pt) -> f64 {
        if self.same_tree(a, b) {
            let (Pt::At(u, _), Pt::At(v, _)) = (a, b) else { unreachable!() };
            let l = self.lca(u, v);
            return self.nodes[u].depth + self.nodes[v].depth - 2.0 * self.nodes[l].depth;
        }
        self.pt_depth(a) + self.pt_depth(b) + (self.pt_phi(a) - self.pt_phi(b)).abs()
    }

    fn norm(&self, node: usize, lift: i64, up: f64) -> Loc {
        let n = &self.nodes[node];
        if up <= self.tol {
            if n.parent.is_none() {
                return match self.trunk {
                    Trunk::Line(_) => Loc::Trunk(self.phi(node, lift)),
                    Trunk::Segment(_) => Loc::At { node, lift, up: 0.0 },
                    Trunk::Point => Loc::At { node, lift: 0, up: 0.0 },
                };
            }
            return Loc::At { node, lift, up: 0.0 };
        }
        if n.parent.is_some() && up >= n.len - self.tol {
            return self.norm(n.parent.unwrap(), lift, 0.0);
        }
        Loc::At { node, lift, up }
    }

    /// Point at height `h` above `node` on its way to the trunk.
    fn climb(&self, node: usize, lift: i64, mut h: f64) -> Loc {
        let mut u = node;
        loop {
            let n = &self.nodes[u];
            match n.parent {
                Some(p) if h >= n.len - self.tol => {
                    h -= n.len;
                    u = p;
                }
                _ => return self.norm(u, lift, h.max(0.0)),
            }
        }
    }

    /// Point at distance `t` from `a` on the geodesic to `b` (of length `d`).
    pub fn locate(&self, a: Pt, b: Pt, d: f64, t: f64) -> Loc {
        if self.same_tree(a, b) {
            let (Pt::At(u, lu), Pt::At(v, lv)) = (a, b) else { unreachable!() };
            let l = self.lca(u, v);
            let up = self.nodes[u].depth - self.nodes[l].depth;
            return if t <= up { self.climb(u, lu, t) } else { self.climb(v, lv, d - t) };
        }
        let (da, db) = (self.pt_depth(a), self.pt_depth(b));
        if let Pt::At(u, lu) = a {
            if t <= da {
                return self.climb(u, lu, t);
            }
        }
        if let Pt::At(v, lv) = b {
            if t >= d - db {
                return self.climb(v, lv, d - t);
            }
        }
        let (pa, pb) = (self.pt_phi(a), self.pt_phi(b));
        Loc::Trunk(pa + (pb - pa).signum() * (t - da))
    }

    pub fn loc_eq(&self, a: Loc, b: Loc) -> bool {
        match (a, b) {
            (Loc::Trunk(x), Loc::Trunk(y)) => (x - y).abs() <= self.tol,
            (Loc::At { node: u, lift: lu, up: hu }, Loc::At { node: v, lift: lv, up: hv }) => {
                u == v && lu == lv && (hu - hv).abs() <= self.tol
            }
            _ => false,
        }
    }

    /// Trunk coordinate below a point.
    pub fn loc_phi(&self, l: Loc) -> f64 {
        match l {
            Loc::Trunk(x) => x,
            Loc::At { node, lift, .. } => self.phi(node, lift),
        }
    }

    pub fn loc_shift(&self, l: Loc, by: i64) -> Loc {
        match (l, self.trunk) {
            (Loc::Trunk(x), Trunk::Line(t)) => Loc::Trunk(x + by as f64 * t),
            (Loc::At { node, lift, up }, Trunk::Line(_)) => Loc::At { node, lift: lift + by, up },
            _ => l,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graph_moduli::{CycleGraph, Root};

    fn line_cover() -> Cover {
        // two rays at each pole, one root per side
        let g_inf = CycleGraph { k: 2, tau: 3.0, roots: vec![Root { pos: 0.0, kids: vec![Sub::Ray(1), Sub::Ray(2)] }] };
        let g_zero = CycleGraph {
            k: 2,
            tau: 3.0,
            roots: vec![Root { pos: 0.0, kids: vec![Sub::node(0.5, vec![Sub::Ray(1), Sub::Ray(2)])] }],
        };
        let sides = Sides { g_inf, g_zero, base: Base::Twist(1.0) };
        Cover::from_sides(&sides, &|_| 0.0).unwrap()
    }

    #[test]
    fn reading_indices_wrap_into_lifts() {
        let c = line_cover();
        assert_eq!(c.ray(Pole::Infinity, 0).1, 0);
        assert_eq!(c.ray(Pole::Infinity, 2).1, -1);
        assert_eq!(c.ray(Pole::Zero, 2).1, 1);
        assert_eq!(c.label(Pole::Zero, 3), 2);
        for q in -5..5 {
            let (n, l) = c.ray(Pole::Zero, q);
            let i = c.pole(Pole::Zero).attach.iter().position(|&a| a == n).unwrap();
            let _ = i;
            assert_eq!(c.phi(n, l), 1.0 + 3.0 * l as f64);
        }
    }

    #[test]
    fn angles_step_by_turn_over_k() {
        let c = line_cover();
        let a0 = c.angle(Pole::Infinity, 0.0);
        let a1 = c.angle(Pole::Infinity, 1.0);
        assert!((a0 - a1 - std::f64::consts::PI).abs() < 1e-12);
        assert!((c.reading_at(Pole::Zero, c.angle(Pole::Zero, 2.5)) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn distances_run_through_the_trunk() {
        let c = line_cover();
        let (a, la) = c.ray(Pole::Infinity, 0);
        let (b, lb) = c.ray(Pole::Zero, 0);
        assert!((c.dist(Pt::At(a, la), Pt::At(b, lb)) - 1.5).abs() < 1e-12);
        let (b2, lb2) = c.ray(Pole::Zero, 2);
        assert!((c.dist(Pt::At(b, lb), Pt::At(b2, lb2)) - 4.0).abs() < 1e-12);
        let (b1, lb1) = c.ray(Pole::Zero, 1);
        assert_eq!(c.dist(Pt::At(b, lb), Pt::At(b1, lb1)), 0.0);
        let mid = c.locate(Pt::At(a, la), Pt::At(b, lb), 1.5, 0.5);
        assert!(c.loc_eq(mid, Loc::Trunk(0.5)));
        let up = c.locate(Pt::At(a, la), Pt::At(b, lb), 1.5, 1.25);
        assert!(matches!(up, Loc::At { up, .. } if (up - 0.25).abs() < 1e-12));
    }
}
