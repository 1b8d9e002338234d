//! Planar metric trees with k labelled rays, rooted at ray k.

use serde::{Deserialize, Serialize};

use crate::cycle::{coords_to_cycle, cycle_chart, unzip1, zip12, CycleGraph, Root};
use crate::sub::{kid_with, normalize_kids, Sub};
use crate::GraphError;

/// A tree whose rays read 1, 2, ..., k going around it.  It is stored as
/// the children of the vertex carrying ray k, listed in reading order
/// after ray k.  For k = 2 the tree is a line and `kids` is `[Ray(1)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledTree {
    pub k: usize,
    pub kids: Vec<Sub>,
}

impl LabelledTree {
    /// The star: one vertex carrying all k rays.
    pub fn star(k: usize) -> LabelledTree {
        LabelledTree { k, kids: (1..k).map(Sub::Ray).collect() }
    }

    pub fn rays(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for s in &self.kids {
            s.collect_rays(&mut out);
        }
        out.push(self.k);
        out
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let rays = self.rays();
        let expect: Vec<usize> = (1..=self.k).collect();
        if rays != expect {
            return Err(GraphError::Labels(format!("rays {rays:?} do not read 1..{}", self.k)));
        }
        if self.k >= 3 && self.kids.len() < 2 {
            return Err(GraphError::Invalid("vertex of ray k has valence < 3".into()));
        }
        fn check(s: &Sub) -> Result<(), GraphError> {
            if let Sub::Node { len, kids } = s {
                if !(*len >= 0.0) || !len.is_finite() {
                    return Err(GraphError::Invalid(format!("bad edge length {len}")));
                }
                if kids.len() < 2 {
                    return Err(GraphError::Invalid("internal vertex of valence < 3".into()));
                }
                kids.iter().try_for_each(check)?;
            }
            Ok(())
        }
        self.kids.iter().try_for_each(check)
    }

    /// Collapse zero-length edges.
    pub fn canonical(self) -> LabelledTree {
        LabelledTree { k: self.k, kids: normalize_kids(self.kids) }
    }

    /// Finite edges as (first ray below, last ray below, length).
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for s in &self.kids {
            s.for_each_edge(&mut |a, b, l| out.push((a, b, l)));
        }
        out
    }

    pub fn is_trivalent(&self) -> bool {
        fn tri(s: &Sub) -> bool {
            match s {
                Sub::Ray(_) => true,
                Sub::Node { kids, .. } => kids.len() == 2 && kids.iter().all(tri),
            }
        }
        self.kids.len() == 2 && self.kids.iter().all(tri)
    }

    /// Combinatorial type as a bracketing, e.g. `((1,2),3)`.
    pub fn shape(&self) -> String {
        fn go(s: &Sub, out: &mut String) {
            match s {
                Sub::Ray(l) => out.push_str(&l.to_string()),
                Sub::Node { kids, .. } => {
                    out.push('(');
                    for (i, k) in kids.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(k, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        go(&Sub::Node { len: 0.0, kids: self.kids.clone() }, &mut out);
        out
    }
}

/// Chart T(k) -> R^{k-3}.  Ray k is dropped, its vertex becomes the root of
/// a graph with a collapsed cycle, rays k-1 and 1 are zipped there and the
/// result is charted as an element of the cycle-graph space with k-2 rays.
pub fn tree_chart(t: &LabelledTree) -> Result<Vec<f64>, GraphError> {
    t.validate()?;
    if t.k < 3 {
        return Err(GraphError::Invalid("trees need at least 3 rays".into()));
    }
    let k = t.k;
    let t = t.clone().canonical();
    let mut kids = t.kids;
    for s in &mut kids {
        s.relabel(&|l| if l == k - 1 { 1 } else { l + 1 });
    }
    let a = kid_with(&kids, 1).unwrap();
    kids.rotate_left(a);
    let g = CycleGraph { k: k - 1, tau: 0.0, roots: vec![Root { pos: 0.0, kids }] };
    let (z, _) = zip12(&g)?;
    cycle_chart(&z)
}

pub fn coords_to_tree(k: usize, c: &[f64]) -> Result<LabelledTree, GraphError> {
    if k < 3 {
        return Err(GraphError::Invalid("trees need at least 3 rays".into()));
    }
    if c.len() != k - 3 {
        return Err(GraphError::Dimension { expected: k - 3, found: c.len() });
    }
    let g = coords_to_cycle(k - 2, 0.0, c)?;
    let h = unzip1(&g, 0.0);
    let mut kids = h.roots.into_iter().next().unwrap().kids;
    let b = kid_with(&kids, 2).unwrap();
    kids.rotate_left(b);
    for s in &mut kids {
        s.relabel(&|l| if l == 1 { k - 1 } else { l - 1 });
    }
    Ok(LabelledTree { k, kids }.canonical())
}

/// Path of child indices from the root children to the node whose rays are
/// exactly `lo..=hi`.
fn find_edge(kids: &[Sub], lo: usize, hi: usize, path: &mut Vec<usize>) -> bool {
    for (i, s) in kids.iter().enumerate() {
        if let Sub::Node { kids: inner, .. } = s {
            path.push(i);
            if s.first_ray() == lo && s.last_ray() == hi {
                return true;
            }
            if s.contains(lo) && find_edge(inner, lo, hi, path) {
                return true;
            }
            path.pop();
        }
    }
    false
}

/// Whitehead move on the finite edge above the subtree holding rays
/// `lo..=hi`.  Both endpoints must be trivalent.  The edge keeps its length
/// and afterwards separates the rays the other way.
pub fn whitehead_move(t: &LabelledTree, edge: (usize, usize)) -> Result<LabelledTree, GraphError> {
    t.validate()?;
    let (lo, hi) = edge;
    if lo == hi {
        return Err(GraphError::Move(format!("ray {lo} has no finite edge")));
    }
    let mut path = Vec::new();
    if !find_edge(&t.kids, lo, hi, &mut path) {
        return Err(GraphError::Move(format!("no edge above rays {lo}..{hi}")));
    }
    let mut out = t.clone();
    let last = path.pop().unwrap();
    // parent child list
    let mut parent: &mut Vec<Sub> = &mut out.kids;
    for &i in &path {
        let Sub::Node { kids, .. } = &mut parent[i] else { unreachable!() };
        parent = kids;
    }
    if parent.len() != 2 {
        return Err(GraphError::Move("upper endpoint is not trivalent".into()));
    }
    let Sub::Node { len, kids: below } = parent[last].clone() else { unreachable!() };
    if below.len() != 2 {
        return Err(GraphError::Move("lower endpoint is not trivalent".into()));
    }
    let (y, z) = (below[0].clone(), below[1].clone());
    let x = parent[1 - last].clone();
    *parent = if last == 1 {
        vec![Sub::Node { len, kids: vec![x, y] }, z]
    } else {
        vec![y, Sub::Node { len, kids: vec![z, x] }]
    };
    Ok(out)
}

/// All trivalent types with k rays, unit edge lengths.
pub fn enumerate_types(k: usize) -> Vec<LabelledTree> {
    fn build(a: usize, b: usize) -> Vec<Sub> {
        if a == b {
            return vec![Sub::Ray(a)];
        }
        let mut out = Vec::new();
        for m in a..b {
            for l in build(a, m) {
                for r in build(m + 1, b) {
                    out.push(Sub::Node { len: 1.0, kids: vec![l.clone(), r] });
                }
            }
        }
        out
    }
    if k < 3 {
        return Vec::new();
    }
    build(1, k - 1)
        .into_iter()
        .map(|s| match s {
            Sub::Node { kids, .. } => LabelledTree { k, kids },
            Sub::Ray(_) => unreachable!(),
        })
        .collect()
}
