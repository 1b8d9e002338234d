//! Metric graphs with one cycle (or a marked root when the cycle has length 0)
//! and k labelled rays, together with their chart to R^{k-1}.

use serde::{Deserialize, Serialize};

use crate::sub::{close, kid_with, normalize_kids, unzip_in, zip_in, Sub};
use crate::GraphError;

/// A vertex on the cycle together with the trees hanging off it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    /// Position along the cycle, measured in the direction of increasing labels.
    pub pos: f64,
    pub kids: Vec<Sub>,
}

/// Element of the space of graphs with a cycle of length `tau` and `k` rays.
///
/// For `tau > 0` roots are sorted by position, the first root sits at 0 and
/// holds ray 1, and each root's children are linearly ordered.  For
/// `tau == 0` there is a single root whose children are cyclically ordered
/// and stored starting with the child holding ray 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleGraph {
    pub k: usize,
    pub tau: f64,
    pub roots: Vec<Root>,
}

/// Which band of the last chart coordinate a graph falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    /// rays 1 and 2 share a root and branch off in reading order
    Zero,
    /// rays 1 and 2 have distinct roots
    Slab,
    /// single root, ray 2 read first and ray 1 last
    Wrap,
}

impl CycleGraph {
    /// The unique graph with one ray.
    pub fn single(tau: f64) -> CycleGraph {
        CycleGraph { k: 1, tau, roots: vec![Root { pos: 0.0, kids: vec![Sub::Ray(1)] }] }
    }

    pub fn rays(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for r in &self.roots {
            for k in &r.kids {
                k.collect_rays(&mut out);
            }
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.k.saturating_sub(1)
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(GraphError::Invalid(format!("bad cycle length {}", self.tau)));
        }
        if self.roots.is_empty() {
            return Err(GraphError::Invalid("no roots".into()));
        }
        if self.tau == 0.0 && self.roots.len() != 1 {
            return Err(GraphError::Invalid("zero cycle needs one root".into()));
        }
        let rays = self.rays();
        check_cyclic_labels(&rays, self.k)?;
        if !self.roots[0].kids.first().is_some_and(|k| k.contains(1)) && self.tau == 0.0 {
            return Err(GraphError::Invalid("root children must start at ray 1".into()));
        }
        if !self.roots[0].kids.iter().any(|k| k.contains(1)) {
            return Err(GraphError::Invalid("first root must hold ray 1".into()));
        }
        let mut prev = -1.0;
        for r in &self.roots {
            if r.kids.is_empty() {
                return Err(GraphError::Invalid("root without children".into()));
            }
            if !(r.pos > prev) || (self.tau > 0.0 && r.pos >= self.tau) {
                return Err(GraphError::Invalid("root positions out of order".into()));
            }
            prev = r.pos;
            for k in &r.kids {
                check_sub(k)?;
            }
        }
        if self.roots[0].pos != 0.0 {
            return Err(GraphError::Invalid("first root must sit at 0".into()));
        }
        Ok(())
    }

    /// Arc lengths from each root to the next one (cyclically).
    pub fn arcs(&self) -> Vec<f64> {
        let n = self.roots.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    self.roots[i + 1].pos - self.roots[i].pos
                } else {
                    self.tau - self.roots[i].pos
                }
            })
            .collect()
    }

    /// Bring the graph into canonical form: collapse zero edges, merge
    /// coincident roots, rotate so that ray 1 is in front.
    pub fn canonical(mut self) -> CycleGraph {
        for r in &mut self.roots {
            r.kids = normalize_kids(std::mem::take(&mut r.kids));
        }
        if self.tau == 0.0 {
            let mut kids: Vec<Sub> = self.roots.drain(..).flat_map(|r| r.kids).collect();
            if let Some(a) = kid_with(&kids, 1) {
                kids.rotate_left(a);
            }
            self.roots = vec![Root { pos: 0.0, kids }];
            return self;
        }
        // merge roots at equal positions, wrap positions into [0, tau)
        let tau = self.tau;
        let mut roots: Vec<Root> = Vec::new();
        for mut r in self.roots.drain(..) {
            r.pos = r.pos.rem_euclid(tau);
            if let Some(last) = roots.last_mut() {
                if close(last.pos, r.pos) {
                    last.kids.extend(r.kids);
                    continue;
                }
            }
            roots.push(r);
        }
        let start = roots.iter().position(|r| r.kids.iter().any(|k| k.contains(1))).unwrap_or(0);
        roots.rotate_left(start);
        let p0 = roots[0].pos;
        for r in &mut roots {
            r.pos = (r.pos - p0).rem_euclid(tau);
            if close(r.pos, tau) {
                r.pos = 0.0;
            }
        }
        roots[0].pos = 0.0;
        // a root whose first children precede ray 1 at the wrap point keeps
        // them in front; that is the reading order convention.
        self.roots = roots;
        self
    }

    /// Same combinatorics, positions and lengths equal up to rounding.
    pub fn approx_eq(&self, other: &CycleGraph) -> bool {
        self.k == other.k
            && close(self.tau, other.tau)
            && self.roots.len() == other.roots.len()
            && self.roots.iter().zip(&other.roots).all(|(a, b)| {
                close(a.pos, b.pos)
                    && a.kids.len() == b.kids.len()
                    && a.kids.iter().zip(&b.kids).all(|(x, y)| x.approx_eq(y))
            })
    }

    fn relabel(&mut self, f: &dyn Fn(usize) -> usize) {
        for r in &mut self.roots {
            for k in &mut r.kids {
                k.relabel(f);
            }
        }
    }

    /// Where rays 1 and 2 sit relative to each other.
    pub fn slice(&self) -> Result<Slice, GraphError> {
        if self.k < 2 {
            return Err(GraphError::Invalid("slice needs two rays".into()));
        }
        let r2 = self.root_of(2).ok_or_else(|| GraphError::Invalid("missing ray 2".into()))?;
        if r2 != 0 {
            return Ok(Slice::Slab);
        }
        let (_, wrap) = divergence(&self.roots[0].kids, self.tau == 0.0)?;
        Ok(if wrap { Slice::Wrap } else { Slice::Zero })
    }

    fn root_of(&self, label: usize) -> Option<usize> {
        self.roots.iter().position(|r| r.kids.iter().any(|k| k.contains(label)))
    }
}

fn check_sub(s: &Sub) -> Result<(), GraphError> {
    if let Sub::Node { len, kids } = s {
        if !(*len >= 0.0) || !len.is_finite() {
            return Err(GraphError::Invalid(format!("bad edge length {len}")));
        }
        if kids.len() < 2 {
            return Err(GraphError::Invalid("internal vertex of valence < 3".into()));
        }
        for k in kids {
            check_sub(k)?;
        }
    }
    Ok(())
}

/// Labels must be 1..k, each once, in a cyclic rotation of increasing order.
pub(crate) fn check_cyclic_labels(rays: &[usize], k: usize) -> Result<(), GraphError> {
    if rays.len() != k {
        return Err(GraphError::Labels(format!("expected {k} rays, found {}", rays.len())));
    }
    if k == 0 {
        return Ok(());
    }
    let start = rays.iter().position(|&r| r == 1).ok_or_else(|| GraphError::Labels("ray 1 missing".into()))?;
    for i in 0..k {
        if rays[(start + i) % k] != i + 1 {
            return Err(GraphError::Labels(format!("rays {rays:?} are not a cyclic order of 1..{k}")));
        }
    }
    Ok(())
}

/// Shared path length of rays 1 and 2 below a root and whether ray 2 is
/// read before ray 1 at their divergence vertex.
fn divergence(kids: &[Sub], cyclic: bool) -> Result<(f64, bool), GraphError> {
    let a = kid_with(kids, 1).ok_or_else(|| GraphError::Invalid("ray 1 missing".into()))?;
    let b = kid_with(kids, 2).ok_or_else(|| GraphError::Invalid("ray 2 missing".into()))?;
    if a == b {
        let Sub::Node { len, kids: inner } = &kids[a] else { unreachable!() };
        let (s, wrap) = divergence(inner, false)?;
        return Ok((s + len, wrap));
    }
    if b == a + 1 {
        return Ok((0.0, false));
    }
    if a + 1 == kids.len() && b == 0 {
        return Ok((0.0, !cyclic));
    }
    Err(GraphError::Invalid("rays 1 and 2 are not adjacent".into()))
}

fn shift_down(l: usize) -> usize {
    if l >= 3 {
        l - 1
    } else {
        l
    }
}

fn shift_up(l: usize) -> usize {
    if l >= 2 {
        l + 1
    } else {
        l
    }
}

/// Merge rays 1 and 2 (which must share a root and be adjacent) into ray 1.
/// Returns the reduced graph and the shared path length.
pub fn zip12(g: &CycleGraph) -> Result<(CycleGraph, f64), GraphError> {
    let mut h = g.clone();
    let kids = &mut h.roots[0].kids;
    if h.tau == 0.0 {
        // cyclic children: make ray 1's child precede ray 2's child
        let a = kid_with(kids, 1).unwrap();
        kids.rotate_left(a);
    }
    let s = zip_in(kids, 1).map_err(GraphError::Invalid)?;
    h.relabel(&shift_down);
    h.k -= 1;
    Ok((h.canonical(), s))
}

/// Inverse of `zip12`: duplicate ray 1 and its path down to distance `s`.
pub fn unzip1(g: &CycleGraph, s: f64) -> CycleGraph {
    let mut h = g.clone();
    h.relabel(&shift_up);
    unzip_in(&mut h.roots[0].kids, 1, s);
    h.k += 1;
    h.canonical()
}

/// Collapse the arc from the root of ray 1 to the root of ray 2.
fn collapse_arc(g: &CycleGraph) -> (CycleGraph, f64) {
    let a = g.roots[1].pos;
    let mut roots = g.roots.clone();
    let second = roots.remove(1);
    roots[0].kids.extend(second.kids);
    for r in roots.iter_mut().skip(1) {
        r.pos -= a;
    }
    (CycleGraph { k: g.k, tau: g.tau - a, roots }, a)
}

/// Chart to R^{k-1}.  The last coordinate `u` sorts graphs into three bands:
/// u <= 0 when rays 1, 2 branch off a shared path of length -u in reading
/// order, 0 < u < tau when their roots are an arc u apart, u >= tau when a
/// single root carries ray 2 first and ray 1 last behind an edge of length
/// u - tau.  The remaining coordinates chart the graph with rays 1, 2 zipped.
pub fn cycle_chart(g: &CycleGraph) -> Result<Vec<f64>, GraphError> {
    g.validate()?;
    chart_rec(g)
}

fn chart_rec(g: &CycleGraph) -> Result<Vec<f64>, GraphError> {
    if g.k <= 1 {
        return Ok(Vec::new());
    }
    let (reduced, u) = match g.slice()? {
        Slice::Slab => {
            let (c, a) = collapse_arc(g);
            let (z, _) = zip12(&c)?;
            (z, a)
        }
        Slice::Zero => {
            let (z, s) = zip12(g)?;
            (z, -s)
        }
        Slice::Wrap => {
            let kids = &g.roots[0].kids;
            let (t, inner) = if kids.len() == 1 {
                match &kids[0] {
                    Sub::Node { len, kids } => (*len, kids.clone()),
                    Sub::Ray(_) => unreachable!(),
                }
            } else {
                (0.0, kids.clone())
            };
            let flat = CycleGraph { k: g.k, tau: 0.0, roots: vec![Root { pos: 0.0, kids: inner }] }.canonical();
            let (z, _) = zip12(&flat)?;
            (z, g.tau + t)
        }
    };
    let mut c = chart_rec(&reduced)?;
    c.push(u);
    Ok(c)
}

/// Inverse chart.
pub fn coords_to_cycle(k: usize, tau: f64, c: &[f64]) -> Result<CycleGraph, GraphError> {
    if k == 0 {
        return Err(GraphError::Dimension { expected: 0, found: c.len() });
    }
    if c.len() != k - 1 {
        return Err(GraphError::Dimension { expected: k - 1, found: c.len() });
    }
    if !(tau >= 0.0) || !tau.is_finite() || c.iter().any(|x| !x.is_finite()) {
        return Err(GraphError::Invalid("non-finite chart input".into()));
    }
    Ok(coords_rec(k, tau, c))
}

fn coords_rec(k: usize, tau: f64, c: &[f64]) -> CycleGraph {
    if k == 1 {
        return CycleGraph::single(tau);
    }
    let u = c[k - 2];
    let rest = &c[..k - 2];
    if u <= 0.0 {
        return unzip1(&coords_rec(k - 1, tau, rest), -u);
    }
    if u < tau {
        let g = coords_rec(k - 1, tau - u, rest);
        let mut h = unzip1(&g, 0.0);
        // the new ray 2 starts a root of its own, an arc u further on
        let kids = std::mem::take(&mut h.roots[0].kids);
        let b = kid_with(&kids, 2).unwrap();
        let (first, second) = kids.split_at(b);
        h.roots[0].kids = first.to_vec();
        for r in h.roots.iter_mut().skip(1) {
            r.pos += u;
        }
        h.roots.insert(1, Root { pos: u, kids: second.to_vec() });
        h.tau = tau;
        return h;
    }
    let t = if tau > 0.0 { u - tau } else { u };
    let g = coords_rec(k - 1, 0.0, rest);
    let h = unzip1(&g, 0.0);
    let mut kids = h.roots.into_iter().next().unwrap().kids;
    let b = kid_with(&kids, 2).unwrap();
    kids.rotate_left(b);
    let kids = if t > 0.0 { vec![Sub::Node { len: t, kids }] } else { kids };
    let out = CycleGraph { k, tau, roots: vec![Root { pos: 0.0, kids }] };
    if tau == 0.0 {
        out.canonical()
    } else {
        out
    }
}

/// Duplicate ray `label` together with its path to the cycle; rays after it
/// shift up by one and the copy is read right after the original.
pub fn split_root(g: &CycleGraph, label: usize) -> Result<CycleGraph, GraphError> {
    g.validate()?;
    if label == 0 || label > g.k {
        return Err(GraphError::Labels(format!("no ray {label}")));
    }
    let k = g.k;
    let to1 = move |l: usize| (l + k - label) % k + 1;
    let back = move |l: usize| (l + label - 2) % (k + 1) + 1;
    let mut h = g.clone();
    h.relabel(&to1);
    let h = h.canonical();
    let mut s = unzip1(&h, 0.0);
    s.relabel(&back);
    Ok(s.canonical())
}

/// Merge two cyclically adjacent rays that share a root; the merged ray
/// keeps the smaller position label and later labels shift down.
pub fn zip_roots(g: &CycleGraph, ray_a: usize, ray_b: usize) -> Result<CycleGraph, GraphError> {
    g.validate()?;
    let k = g.k;
    if k < 2 || ray_a == 0 || ray_a > k || ray_b != ray_a % k + 1 {
        return Err(GraphError::Labels(format!("rays {ray_a}, {ray_b} are not adjacent")));
    }
    let to1 = move |l: usize| (l + k - ray_a) % k + 1;
    let mut h = g.clone();
    h.relabel(&to1);
    let h = h.canonical();
    if h.root_of(2) != Some(0) {
        return Err(GraphError::Invalid("rays have distinct roots".into()));
    }
    let (mut z, _) = zip12(&h)?;
    let km = k - 1;
    let back = move |l: usize| (l + ray_a - 2) % km + 1;
    z.relabel(&back);
    Ok(z.canonical())
}
