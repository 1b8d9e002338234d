//! Metric ribbon graphs (leaf spaces) and foliation descriptors.

use qd_core::{Pole, Surface};
use serde::{Deserialize, Serialize};

/// One entry of a vertex's cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    /// End `end` (0 at `v1`, 1 at `v2`) of a finite edge.
    Edge { edge: usize, end: u8 },
    Ray { ray: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub v1: usize,
    pub v2: usize,
    pub length: f64,
    pub in_cycle: bool,
    /// The edge dual to a ring domain.
    #[serde(default)]
    pub ring: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub vertex: usize,
    pub pole: Pole,
    pub label: usize,
}

/// Leaf space of a foliation: vertices are the critical components, finite
/// edges are strips and the ring domain, rays are half-planes.  `ribbon[v]`
/// lists the slots around vertex v counterclockwise in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRibbonGraph {
    pub surface: Surface,
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
    pub rays: Vec<Ray>,
    pub ribbon: Vec<Vec<Slot>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has first Betti number {0}")]
    TooManyCycles(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("inconsistent ribbon: {0}")]
    Ribbon(String),
}

impl MetricRibbonGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Betti number E - V + 1 of the finite part (assumed connected).
    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertices.len())
    }

    pub fn check(&self) -> Result<(), GraphError> {
        let nv = self.vertices.len();
        if self.ribbon.len() != nv {
            return Err(GraphError::Ribbon("one cyclic list per vertex".into()));
        }
        let mut seen_e = vec![[false; 2]; self.edges.len()];
        let mut seen_r = vec![false; self.rays.len()];
        for (v, list) in self.ribbon.iter().enumerate() {
            for s in list {
                match *s {
                    Slot::Edge { edge, end } => {
                        let e = self.edges.get(edge).ok_or_else(|| GraphError::Ribbon("bad edge".into()))?;
                        let at = if end == 0 { e.v1 } else { e.v2 };
                        if at != v || seen_e[edge][end as usize] {
                            return Err(GraphError::Ribbon(format!("edge {edge} end {end} misplaced")));
                        }
                        seen_e[edge][end as usize] = true;
                    }
                    Slot::Ray { ray } => {
                        let r = self.rays.get(ray).ok_or_else(|| GraphError::Ribbon("bad ray".into()))?;
                        if r.vertex != v || seen_r[ray] {
                            return Err(GraphError::Ribbon(format!("ray {ray} misplaced")));
                        }
                        seen_r[ray] = true;
                    }
                }
            }
        }
        if seen_e.iter().any(|s| !s[0] || !s[1]) || seen_r.iter().any(|s| !s) {
            return Err(GraphError::Ribbon("slot missing".into()));
        }
        if nv > 0 && self.components() != 1 {
            return Err(GraphError::Disconnected);
        }
        let b = self.betti();
        if b > 1 || (b == 1 && self.surface == Surface::Plane) {
            return Err(GraphError::TooManyCycles(b));
        }
        Ok(())
    }

    fn components(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.v1), find(&mut parent, e.v2));
            parent[a] = b;
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Edges on the unique cycle: those that are not bridges.
    pub fn cycle_edges(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut deg = vec![0usize; n];
        for e in &self.edges {
            deg[e.v1] += 1;
            deg[e.v2] += 1;
        }
        // strip leaves repeatedly; rays do not count
        let mut alive = vec![true; self.edges.len()];
        let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        while let Some(v) = stack.pop() {
            if deg[v] != 1 {
                continue;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if alive[i] && (e.v1 == v || e.v2 == v) {
                    alive[i] = false;
                    deg[e.v1] -= 1;
                    deg[e.v2] -= 1;
                    let w = if e.v1 == v { e.v2 } else { e.v1 };
                    if deg[w] == 1 {
                        stack.push(w);
                    }
                    break;
                }
            }
        }
        (0..self.edges.len()).filter(|&i| alive[i]).collect()
    }

    /// Mark `in_cycle` from the topology.
    pub fn mark_cycle(&mut self) {
        let c = self.cycle_edges();
        for (i, e) in self.edges.iter_mut().enumerate() {
            e.in_cycle = c.contains(&i);
        }
    }

    /// Sum of edge lengths over the cycle (0 for a tree).
    pub fn transverse_measure(&self) -> Result<f64, GraphError> {
        let b = self.betti();
        if b > 1 {
            return Err(GraphError::TooManyCycles(b));
        }
        Ok(self.cycle_edges().iter().fold(0.0, |acc, &i| acc + self.edges[i].length))
    }

    pub fn rays_at(&self, pole: Pole) -> Vec<usize> {
        let mut v: Vec<usize> = self.rays.iter().filter(|r| r.pole == pole).map(|r| r.label).collect();
        v.sort();
        v
    }

    pub fn ray_by_label(&self, pole: Pole, label: usize) -> Option<usize> {
        self.rays.iter().position(|r| r.pole == pole && r.label == label)
    }

    /// Position of `slot` in the cyclic list of `v`.
    pub fn slot_index(&self, v: usize, slot: Slot) -> Option<usize> {
        self.ribbon[v].iter().position(|&s| s == slot)
    }

    /// The vertex at the other end of a slot's edge (None for rays).
    pub fn across(&self, slot: Slot) -> Option<(usize, Slot)> {
        match slot {
            Slot::Edge { edge, end } => {
                let e = &self.edges[edge];
                Some(if end == 0 { (e.v2, Slot::Edge { edge, end: 1 }) } else { (e.v1, Slot::Edge { edge, end: 0 }) })
            }
            Slot::Ray { .. } => None,
        }
    }

    /// Faces of the ribbon graph.  Each face is reported as the pair of rays
    /// (a, b) it runs between: the face lies counterclockwise after `a` and
    /// before `b` at their vertices.  Faces without rays (impossible for leaf
    /// spaces) are skipped.
    pub fn faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (v, list) in self.ribbon.iter().enumerate() {
            for (i, s) in list.iter().enumerate() {
                let Slot::Ray { ray: a } = *s else { continue };
                let (mut cv, mut ci) = (v, i);
                let mut guard = 0;
                loop {
                    guard += 1;
                    if guard > 4 * (self.edges.len() + self.rays.len() + 2) {
                        break;
                    }
                    let l = &self.ribbon[cv];
                    let next = l[(ci + 1) % l.len()];
                    match next {
                        Slot::Ray { ray: b } => {
                            out.push((a, b));
                            break;
                        }
                        Slot::Edge { .. } => {
                            let (w, back) = self.across(next).unwrap();
                            ci = self.slot_index(w, back).unwrap();
                            cv = w;
                        }
                    }
                }
            }
        }
        out
    }
}

/// A point of the space of foliations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoliationDescriptor {
    pub n: usize,
    pub m: usize,
    pub graph: MetricRibbonGraph,
    pub tau: f64,
    pub twist_j: Option<i64>,
    pub l0: Option<f64>,
    pub continuous_twist: Option<f64>,
    pub ring_height: Option<f64>,
}

impl FoliationDescriptor {
    /// Split t into j = floor(t / τ) and l0 = t - jτ.
    pub fn split_twist(t: f64, tau: f64) -> (i64, f64) {
        let j = (t / tau).floor();
        let mut l0 = t - j * tau;
        let mut j = j as i64;
        if l0 >= tau {
            l0 -= tau;
            j += 1;
        }
        if l0 < 0.0 {
            l0 = 0.0;
        }
        (j, l0)
    }
}

/// Twist j, l0 and t from an integer part and offset.
pub fn twist_parameters(j: i64, tau: f64, l0: f64) -> f64 {
    j as f64 * tau + l0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_edge_cycle() -> MetricRibbonGraph {
        MetricRibbonGraph {
            surface: Surface::PuncturedPlane,
            vertices: vec![0, 1],
            edges: vec![
                Edge { v1: 0, v2: 1, length: 0.4, in_cycle: false, ring: false },
                Edge { v1: 1, v2: 0, length: 0.6, in_cycle: false, ring: false },
            ],
            rays: vec![Ray { vertex: 0, pole: Pole::Infinity, label: 1 }, Ray { vertex: 1, pole: Pole::Zero, label: 1 }],
            ribbon: vec![
                vec![Slot::Edge { edge: 1, end: 1 }, Slot::Ray { ray: 0 }, Slot::Edge { edge: 0, end: 0 }],
                vec![Slot::Edge { edge: 0, end: 1 }, Slot::Ray { ray: 1 }, Slot::Edge { edge: 1, end: 0 }],
            ],
        }
    }

    #[test]
    fn cycle_sum() {
        let mut g = two_edge_cycle();
        g.check().unwrap();
        g.mark_cycle();
        assert!(g.edges.iter().all(|e| e.in_cycle));
        assert!((g.transverse_measure().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tree_has_zero_measure() {
        let g = MetricRibbonGraph {
            surface: Surface::Plane,
            vertices: vec![0, 1],
            edges: vec![Edge { v1: 0, v2: 1, length: 2.0, in_cycle: false, ring: false }],
            rays: (0..4).map(|i| Ray { vertex: i / 2, pole: Pole::Infinity, label: i + 1 }).collect(),
            ribbon: vec![
                vec![Slot::Ray { ray: 0 }, Slot::Ray { ray: 1 }, Slot::Edge { edge: 0, end: 0 }],
                vec![Slot::Ray { ray: 2 }, Slot::Ray { ray: 3 }, Slot::Edge { edge: 0, end: 1 }],
            ],
        };
        g.check().unwrap();
        assert_eq!(g.transverse_measure().unwrap(), 0.0);
        assert_eq!(g.faces().len(), 4);
    }

    #[test]
    fn line_has_two_faces() {
        let g = MetricRibbonGraph {
            surface: Surface::Plane,
            vertices: vec![0],
            edges: vec![],
            rays: vec![Ray { vertex: 0, pole: Pole::Infinity, label: 1 }, Ray { vertex: 0, pole: Pole::Infinity, label: 2 }],
            ribbon: vec![vec![Slot::Ray { ray: 0 }, Slot::Ray { ray: 1 }]],
        };
        assert_eq!(g.faces(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn twist_split() {
        assert_eq!(FoliationDescriptor::split_twist(0.0, 1.0), (0, 0.0));
        let (j, l0) = FoliationDescriptor::split_twist(3.3, 1.5);
        assert_eq!(j, 2);
        assert!((l0 - 0.3).abs() < 1e-12);
        assert!((twist_parameters(2, 1.5, 0.3) - 3.3).abs() < 1e-15);
        assert_eq!(FoliationDescriptor::split_twist(-0.5, 1.0), (-1, 0.5));
    }
}
