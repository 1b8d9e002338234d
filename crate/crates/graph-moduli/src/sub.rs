//! Rooted planar subtrees hanging off a root vertex.
//!
//! A `Sub` is either an infinite ray or an internal vertex reached through a
//! finite edge of length `len`.  Children are listed in reading order, the
//! order in which their rays appear when walking around the graph.

use serde::{Deserialize, Serialize};

/// Distances closer than this (relative) are treated as equal when merging paths.
pub const MERGE_EPS: f64 = 1e-12;

pub(crate) fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_EPS * (1.0 + a.abs().max(b.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Sub {
    Ray(usize),
    Node { len: f64, kids: Vec<Sub> },
}

impl Sub {
    pub fn node(len: f64, kids: Vec<Sub>) -> Sub {
        Sub::Node { len, kids }
    }

    /// Rays in reading order.
    pub fn rays(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_rays(&mut out);
        out
    }

    pub(crate) fn collect_rays(&self, out: &mut Vec<usize>) {
        match self {
            Sub::Ray(l) => out.push(*l),
            Sub::Node { kids, .. } => kids.iter().for_each(|k| k.collect_rays(out)),
        }
    }

    pub fn contains(&self, label: usize) -> bool {
        match self {
            Sub::Ray(l) => *l == label,
            Sub::Node { kids, .. } => kids.iter().any(|k| k.contains(label)),
        }
    }

    pub fn first_ray(&self) -> usize {
        match self {
            Sub::Ray(l) => *l,
            Sub::Node { kids, .. } => kids[0].first_ray(),
        }
    }

    pub fn last_ray(&self) -> usize {
        match self {
            Sub::Ray(l) => *l,
            Sub::Node { kids, .. } => kids[kids.len() - 1].last_ray(),
        }
    }

    /// Length of the edge above this subtree (0 for a ray).
    pub fn edge_len(&self) -> f64 {
        match self {
            Sub::Ray(_) => 0.0,
            Sub::Node { len, .. } => *len,
        }
    }

    pub fn relabel(&mut self, f: &dyn Fn(usize) -> usize) {
        match self {
            Sub::Ray(l) => *l = f(*l),
            Sub::Node { kids, .. } => kids.iter_mut().for_each(|k| k.relabel(f)),
        }
    }

    /// Number of finite edges in the subtree, counting the edge above it.
    pub fn edge_count(&self) -> usize {
        match self {
            Sub::Ray(_) => 0,
            Sub::Node { kids, .. } => 1 + kids.iter().map(Sub::edge_count).sum::<usize>(),
        }
    }

    /// Visit every internal node with its (first ray, last ray, edge length).
    pub fn for_each_edge(&self, f: &mut dyn FnMut(usize, usize, f64)) {
        if let Sub::Node { len, kids } = self {
            f(self.first_ray(), self.last_ray(), *len);
            for k in kids {
                k.for_each_edge(f);
            }
        }
    }

    /// Same shape and labels, lengths equal up to rounding.
    pub fn approx_eq(&self, other: &Sub) -> bool {
        match (self, other) {
            (Sub::Ray(a), Sub::Ray(b)) => a == b,
            (Sub::Node { len: la, kids: ka }, Sub::Node { len: lb, kids: kb }) => {
                close(*la, *lb) && ka.len() == kb.len() && ka.iter().zip(kb).all(|(x, y)| x.approx_eq(y))
            }
            _ => false,
        }
    }

    /// Lengthen the edge above the subtree; a ray absorbs the extra length.
    pub(crate) fn extended(self, extra: f64) -> Sub {
        match self {
            Sub::Ray(l) => Sub::Ray(l),
            Sub::Node { len, kids } => Sub::Node { len: len + extra, kids },
        }
    }
}

/// Collapse zero-length edges and splice vertices left with a single child.
pub fn normalize_kids(kids: Vec<Sub>) -> Vec<Sub> {
    let mut out = Vec::with_capacity(kids.len());
    for k in kids {
        match normalize_sub(k) {
            Sub::Node { len, kids } if len <= 0.0 => out.extend(kids),
            other => out.push(other),
        }
    }
    out
}

pub fn normalize_sub(s: Sub) -> Sub {
    match s {
        Sub::Ray(l) => Sub::Ray(l),
        Sub::Node { len, kids } => {
            let mut kids = normalize_kids(kids);
            if kids.len() == 1 {
                kids.pop().unwrap().extended(len)
            } else {
                Sub::Node { len, kids }
            }
        }
    }
}

/// Index of the child containing `label`.
pub(crate) fn kid_with(kids: &[Sub], label: usize) -> Option<usize> {
    kids.iter().position(|k| k.contains(label))
}

/// Spine of a subtree along the path to its last ray (`last = true`) or
/// first ray.  Each entry is (segment length, side branches at its end).
fn spine(mut cur: Sub, last: bool) -> (Vec<(f64, Vec<Sub>)>, usize) {
    let mut out = Vec::new();
    loop {
        match cur {
            Sub::Ray(l) => return (out, l),
            Sub::Node { len, mut kids } => {
                let next = if last { kids.pop().unwrap() } else { kids.remove(0) };
                out.push((len, kids));
                cur = next;
            }
        }
    }
}

/// Merge two sibling subtrees whose paths to their adjacent rays are zipped
/// together.  `a`'s target ray is its last ray and `b`'s is its first.  The
/// merged ray keeps `a`'s label.  Works segment by segment so that merging
/// two copies of one path reproduces its lengths bit for bit.
pub(crate) fn merge_paths(a: Sub, b: Sub) -> Sub {
    let (sa, label) = spine(a, true);
    let (sb, _) = spine(b, false);
    // (segment, before-branches, after-branches)
    let mut merged: Vec<(f64, Vec<Sub>, Vec<Sub>)> = Vec::new();
    let mut ia = sa.into_iter().peekable();
    let mut ib = sb.into_iter().peekable();
    loop {
        match (ia.peek_mut(), ib.peek_mut()) {
            (None, None) => break,
            (Some(_), None) => {
                let (l, br) = ia.next().unwrap();
                merged.push((l, br, Vec::new()));
            }
            (None, Some(_)) => {
                let (l, br) = ib.next().unwrap();
                merged.push((l, Vec::new(), br));
            }
            (Some(x), Some(y)) => {
                if close(x.0, y.0) {
                    let (l, bx) = ia.next().unwrap();
                    let (_, by) = ib.next().unwrap();
                    merged.push((l, bx, by));
                } else if x.0 < y.0 {
                    y.0 -= x.0;
                    let (l, bx) = ia.next().unwrap();
                    merged.push((l, bx, Vec::new()));
                } else {
                    x.0 -= y.0;
                    let (l, by) = ib.next().unwrap();
                    merged.push((l, Vec::new(), by));
                }
            }
        }
    }
    let mut node = Sub::Ray(label);
    for (l, before, after) in merged.into_iter().rev() {
        let mut kids = before;
        kids.push(node);
        kids.extend(after);
        node = Sub::Node { len: l, kids };
    }
    node
}

/// Split the path to ray `label` inside `x` into two parallel paths.  The
/// first copy keeps the side branches read before the ray and the label;
/// the second keeps those read after and gets `label + 1`.
pub(crate) fn split_path(x: Sub, label: usize) -> (Sub, Sub) {
    match x {
        Sub::Ray(l) => {
            debug_assert_eq!(l, label);
            (Sub::Ray(label), Sub::Ray(label + 1))
        }
        Sub::Node { len, mut kids } => {
            let a = kid_with(&kids, label).expect("label below node");
            let after: Vec<Sub> = kids.split_off(a + 1);
            let cont = kids.pop().unwrap();
            let before = kids;
            let (c1, c2) = split_path(cont, label);
            let p1 = if before.is_empty() {
                c1.extended(len)
            } else {
                let mut k = before;
                k.push(c1);
                Sub::Node { len, kids: k }
            };
            let p2 = if after.is_empty() {
                c2.extended(len)
            } else {
                let mut k = vec![c2];
                k.extend(after);
                Sub::Node { len, kids: k }
            };
            (p1, p2)
        }
    }
}

/// Zip rays `label` and `label + 1` inside a child list: they must sit in
/// adjacent children or share a child.  Returns the shared path length.
pub(crate) fn zip_in(kids: &mut Vec<Sub>, label: usize) -> Result<f64, String> {
    let a = kid_with(kids, label).ok_or("missing ray")?;
    if kids[a].contains(label + 1) {
        let Sub::Node { len, kids: inner } = &mut kids[a] else {
            return Err("rays share a ray slot".into());
        };
        let len0 = *len;
        let s = zip_in(inner, label)?;
        if inner.len() == 1 {
            let only = inner.pop().unwrap();
            kids[a] = only.extended(len0);
        }
        return Ok(s + len0);
    }
    if a + 1 >= kids.len() || !kids[a + 1].contains(label + 1) {
        return Err("rays are not adjacent".into());
    }
    if kids[a].last_ray() != label || kids[a + 1].first_ray() != label + 1 {
        return Err("rays are not adjacent".into());
    }
    let b = kids.remove(a + 1);
    let av = std::mem::replace(&mut kids[a], Sub::Ray(0));
    kids[a] = merge_paths(av, b);
    Ok(0.0)
}

/// Inverse of `zip_in`: split ray `label` at distance `s` below the vertex
/// owning `kids`.  The new ray is `label + 1`; callers relabel beforehand.
pub(crate) fn unzip_in(kids: &mut Vec<Sub>, label: usize, s: f64) {
    let a = kid_with(kids, label).expect("ray present");
    if s <= 0.0 {
        let x = kids.remove(a);
        let (p1, p2) = split_path(x, label);
        kids.insert(a, p2);
        kids.insert(a, p1);
        return;
    }
    let x = std::mem::replace(&mut kids[a], Sub::Ray(0));
    kids[a] = match x {
        Sub::Ray(l) => Sub::Node { len: s, kids: vec![Sub::Ray(l), Sub::Ray(l + 1)] },
        Sub::Node { len, kids: mut inner } => {
            if close(s, len) {
                unzip_in(&mut inner, label, 0.0);
                Sub::Node { len, kids: inner }
            } else if s < len {
                let (p1, p2) = split_path(Sub::Node { len: len - s, kids: inner }, label);
                Sub::Node { len: s, kids: vec![p1, p2] }
            } else {
                unzip_in(&mut inner, label, s - len);
                Sub::Node { len, kids: inner }
            }
        }
    };
}
