//! Distance between metric graphs of the same kind.  Each graph is reduced
//! to a map from features (finite tree edges keyed by the rays they
//! separate, cycle arcs keyed by the ray read just before them) to lengths.
//! A feature missing on one side counts as a collapsed edge of length 0, so
//! graphs on either side of a Whitehead seam are close.

use std::collections::BTreeMap;

use crate::cycle::CycleGraph;
use crate::tree::LabelledTree;
use crate::GraphError;

#[derive(Clone, Debug)]
pub enum Graph<'a> {
    Tree(&'a LabelledTree),
    Cycle(&'a CycleGraph),
}

type Features = BTreeMap<(u8, usize, usize), f64>;

fn tree_features(t: &LabelledTree) -> Features {
    let t = t.clone().canonical();
    let mut f = Features::new();
    for (a, b, l) in t.edges() {
        *f.entry((0, a, b)).or_default() += l;
    }
    f
}

fn cycle_features(g: &CycleGraph) -> Features {
    let g = g.clone().canonical();
    let mut f = Features::new();
    for r in &g.roots {
        for s in &r.kids {
            s.for_each_edge(&mut |a, b, l| *f.entry((0, a, b)).or_default() += l);
        }
    }
    if g.tau > 0.0 {
        for (r, arc) in g.roots.iter().zip(g.arcs()) {
            let last = r.kids.last().map(|s| s.last_ray()).unwrap_or(0);
            *f.entry((1, last, 0)).or_default() += arc;
        }
    }
    f
}

fn compare(a: &Features, b: &Features) -> f64 {
    let mut d: f64 = 0.0;
    for (key, la) in a {
        d = d.max((la - b.get(key).copied().unwrap_or(0.0)).abs());
    }
    for (key, lb) in b {
        if !a.contains_key(key) {
            d = d.max(lb.abs());
        }
    }
    d
}

pub fn tree_distance(a: &LabelledTree, b: &LabelledTree) -> Result<f64, GraphError> {
    a.validate()?;
    b.validate()?;
    if a.k != b.k {
        return Err(GraphError::Labels(format!("{} rays vs {}", a.k, b.k)));
    }
    Ok(compare(&tree_features(a), &tree_features(b)))
}

pub fn cycle_distance(a: &CycleGraph, b: &CycleGraph) -> Result<f64, GraphError> {
    a.validate()?;
    b.validate()?;
    if a.k != b.k {
        return Err(GraphError::Labels(format!("{} rays vs {}", a.k, b.k)));
    }
    Ok(compare(&cycle_features(a), &cycle_features(b)) + (a.tau - b.tau).abs())
}

pub fn graph_distance(a: Graph<'_>, b: Graph<'_>) -> Result<f64, GraphError> {
    match (a, b) {
        (Graph::Tree(x), Graph::Tree(y)) => tree_distance(x, y),
        (Graph::Cycle(x), Graph::Cycle(y)) => cycle_distance(x, y),
        _ => Err(GraphError::Labels("cannot compare a tree with a cycle graph".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sub::Sub::{self, Ray as R};
    use crate::Root;

    fn n(len: f64, kids: Vec<Sub>) -> Sub {
        Sub::node(len, kids)
    }

    #[test]
    fn identical_is_zero_and_one_edge_gives_delta() {
        let a = LabelledTree { k: 5, kids: vec![n(1.0, vec![R(1), R(2)]), n(2.0, vec![R(3), R(4)])] };
        assert_eq!(tree_distance(&a, &a).unwrap(), 0.0);
        let b = LabelledTree { k: 5, kids: vec![n(1.25, vec![R(1), R(2)]), n(2.0, vec![R(3), R(4)])] };
        assert!((tree_distance(&a, &b).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn whitehead_seam_is_close() {
        let eps = 1e-3;
        let a = LabelledTree { k: 4, kids: vec![n(eps, vec![R(1), R(2)]), R(3)] };
        let b = LabelledTree { k: 4, kids: vec![R(1), n(eps, vec![R(2), R(3)])] };
        assert!(tree_distance(&a, &b).unwrap() <= 2.0 * eps);
    }

    #[test]
    fn cycle_arcs_compared() {
        let g = |a: f64| CycleGraph {
            k: 2,
            tau: 1.0,
            roots: vec![Root { pos: 0.0, kids: vec![R(1)] }, Root { pos: a, kids: vec![R(2)] }],
        };
        assert!((cycle_distance(&g(0.3), &g(0.35)).unwrap() - 0.05).abs() < 1e-12);
    }
}
