//! Combinatorial assembly: from the prong structure at the zeros and what
//! each sector faces, build the regions, the leaf space and the twist.
//!
//! Everything here is independent of how the data was produced, so the
//! flat-surface builder can feed the same routine.

use crate::graph::{Edge, FoliationDescriptor, MetricRibbonGraph, Ray, Slot};
use crate::ExtractError;
use qd_core::{Pole, Surface};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Where a prong (critical leaf) from a zero ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProngEnd {
    /// Runs into a pole along end direction `index`.
    Pole { pole: Pole, index: usize },
    /// Saddle connection arriving at `zero` as its prong `prong`.  `turn` is
    /// the change of a continuous arg z along the leaf, `length` its flat length.
    Zero { zero: usize, prong: usize, length: f64, turn: f64 },
}

/// A zero with its prongs in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalVertex {
    pub order: usize,
    pub prongs: Vec<ProngEnd>,
}

/// Zeros and critical leaves of one foliation.  Sector i of a zero lies
/// between its prongs i and i + 1, counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalGraph {
    pub surface: Surface,
    pub n: usize,
    pub m: usize,
    pub vertices: Vec<CriticalVertex>,
    /// A value of arg z at zero 0 (the lift every turn is measured from).
    pub base_arg: f64,
}

/// What the transverse leaf launched into a sector runs into.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Facing {
    /// The region is a half-plane with this label; `turn` carries arg z from
    /// the zero to the half-plane's asymptotic direction.
    HalfPlane { pole: Pole, label: usize, turn: f64 },
    /// The region is crossed to sector `sector` of `zero`, at transverse
    /// distance `height`; `turn` is the change of arg z along the crossing.
    Across { zero: usize, sector: usize, height: f64, turn: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorProbe {
    pub zero: usize,
    pub sector: usize,
    pub facing: Facing,
}

/// Complementary region of the critical graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegionRec {
    HalfPlane { pole: Pole, direction_label: usize },
    Strip { end_a: (Pole, usize), end_b: (Pole, usize), height: f64 },
    RingDomain { height: f64 },
}

/// Maximal chain of sectors glued along saddle connections: one side of a
/// region's boundary, traversed with the region on the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    pub sectors: Vec<(usize, usize)>,
    /// Pole ends (incoming, outgoing); None for a closed line.
    pub ends: Option<((Pole, usize), (Pole, usize))>,
    pub vertex: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Assembly {
    pub lines: Vec<BoundaryLine>,
    pub regions: Vec<RegionRec>,
    /// region of each line
    pub line_region: Vec<usize>,
    pub descriptor: FoliationDescriptor,
    /// τ summed over the strips joining ∞ to 0, taken from the regions.
    pub tau_from_regions: f64,
    /// Circumference of the ring domain, when present.
    pub ring_circumference: Option<f64>,
}

/// Tolerance for two probes of the same strip to agree on its height.
pub const HEIGHT_AGREEMENT: f64 = 1e-6;

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let nx = self.0[c];
            self.0[c] = r;
            c = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

fn bad(msg: impl Into<String>) -> ExtractError {
    ExtractError::Inconsistent(msg.into())
}

impl CriticalGraph {
    pub fn sector_count(&self) -> usize {
        self.vertices.iter().map(|v| v.prongs.len()).sum()
    }

    pub fn saddle_connections(&self) -> usize {
        self.vertices
            .iter()
            .flat_map(|v| v.prongs.iter())
            .filter(|p| matches!(p, ProngEnd::Zero { .. }))
            .count()
            / 2
    }

    /// Structural checks: valence, symmetric saddle connections, pole orders.
    pub fn check(&self) -> Result<(), ExtractError> {
        for (z, v) in self.vertices.iter().enumerate() {
            if v.prongs.len() != v.order + 2 {
                return Err(bad(format!("zero {z}: {} prongs for order {}", v.prongs.len(), v.order)));
            }
            for (p, end) in v.prongs.iter().enumerate() {
                match *end {
                    ProngEnd::Zero { zero, prong, .. } => {
                        let back = self
                            .vertices
                            .get(zero)
                            .and_then(|w| w.prongs.get(prong))
                            .ok_or_else(|| bad(format!("zero {z} prong {p}: dangling target")))?;
                        match back {
                            ProngEnd::Zero { zero: z2, prong: p2, .. } if *z2 == z && *p2 == p => {}
                            _ => return Err(bad(format!("saddle connection from zero {z} prong {p} is one-sided"))),
                        }
                    }
                    ProngEnd::Pole { pole, index } => {
                        let order = match pole {
                            Pole::Infinity => self.n,
                            Pole::Zero => self.m,
                        };
                        if order < 3 || index == 0 || index > order - 2 {
                            return Err(bad(format!("zero {z} prong {p}: bad pole end {pole:?} {index}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn open_line(cg: &CriticalGraph, start: (usize, usize), seen: &mut [Vec<bool>]) -> Result<BoundaryLine, ExtractError> {
    let (mut z, mut i) = start;
    let first_in = match cg.vertices[z].prongs[i] {
        ProngEnd::Pole { pole, index } => (pole, index),
        _ => unreachable!(),
    };
    let mut sectors = Vec::new();
    loop {
        if seen[z][i] {
            return Err(bad("boundary walk revisits a sector"));
        }
        seen[z][i] = true;
        sectors.push((z, i));
        let k = cg.vertices[z].prongs.len();
        match cg.vertices[z].prongs[(i + 1) % k] {
            ProngEnd::Pole { pole, index } => {
                return Ok(BoundaryLine { sectors, ends: Some((first_in, (pole, index))), vertex: 0 });
            }
            ProngEnd::Zero { zero, prong, .. } => {
                z = zero;
                i = prong;
            }
        }
    }
}

/// Boundary lines of all regions.
pub fn boundary_lines(cg: &CriticalGraph) -> Result<Vec<BoundaryLine>, ExtractError> {
    let mut seen: Vec<Vec<bool>> = cg.vertices.iter().map(|v| vec![false; v.prongs.len()]).collect();
    let mut lines = Vec::new();
    for z in 0..cg.vertices.len() {
        for i in 0..cg.vertices[z].prongs.len() {
            if matches!(cg.vertices[z].prongs[i], ProngEnd::Pole { .. }) {
                lines.push(open_line(cg, (z, i), &mut seen)?);
            }
        }
    }
    for z in 0..cg.vertices.len() {
        for i in 0..cg.vertices[z].prongs.len() {
            if seen[z][i] {
                continue;
            }
            let (mut cz, mut ci) = (z, i);
            let mut sectors = Vec::new();
            while !seen[cz][ci] {
                seen[cz][ci] = true;
                sectors.push((cz, ci));
                let k = cg.vertices[cz].prongs.len();
                match cg.vertices[cz].prongs[(ci + 1) % k] {
                    ProngEnd::Zero { zero, prong, .. } => {
                        cz = zero;
                        ci = prong;
                    }
                    ProngEnd::Pole { .. } => return Err(bad("closed line reaches a pole")),
                }
            }
            if (cz, ci) != (z, i) {
                return Err(bad("closed line does not close up"));
            }
            lines.push(BoundaryLine { sectors, ends: None, vertex: 0 });
        }
    }
    Ok(lines)
}

/// Leaf space of the trivial foliation of dz² on the plane.
fn trivial_plane(n: usize) -> Result<Assembly, ExtractError> {
    if n != 4 {
        return Err(bad("a differential without zeros must be dz² on the plane"));
    }
    let graph = MetricRibbonGraph {
        surface: Surface::Plane,
        vertices: vec![0],
        edges: vec![],
        rays: vec![Ray { vertex: 0, pole: Pole::Infinity, label: 1 }, Ray { vertex: 0, pole: Pole::Infinity, label: 2 }],
        ribbon: vec![vec![Slot::Ray { ray: 0 }, Slot::Ray { ray: 1 }]],
    };
    Ok(Assembly {
        lines: vec![],
        regions: vec![
            RegionRec::HalfPlane { pole: Pole::Infinity, direction_label: 1 },
            RegionRec::HalfPlane { pole: Pole::Infinity, direction_label: 2 },
        ],
        line_region: vec![],
        descriptor: FoliationDescriptor {
            n,
            m: 0,
            graph,
            tau: 0.0,
            twist_j: None,
            l0: None,
            continuous_twist: None,
            ring_height: None,
        },
        tau_from_regions: 0.0,
        ring_circumference: None,
    })
}

/// Build regions, leaf space and twist from a critical graph and sector probes.
/// Every boundary line needs at least one probe on one of its sectors.
pub fn assemble(cg: &CriticalGraph, probes: &[SectorProbe]) -> Result<Assembly, ExtractError> {
    if cg.vertices.is_empty() {
        return trivial_plane(cg.n);
    }
    cg.check()?;
    let mut lines = boundary_lines(cg)?;
    let mut line_of: Vec<Vec<usize>> = cg.vertices.iter().map(|v| vec![usize::MAX; v.prongs.len()]).collect();
    for (l, line) in lines.iter().enumerate() {
        for &(z, i) in &line.sectors {
            line_of[z][i] = l;
        }
    }

    // critical components
    let nz = cg.vertices.len();
    let mut dsu = Dsu((0..nz).collect());
    for (z, v) in cg.vertices.iter().enumerate() {
        for p in &v.prongs {
            if let ProngEnd::Zero { zero, .. } = *p {
                dsu.union(z, zero);
            }
        }
    }
    let mut comp_id = vec![usize::MAX; nz];
    let mut ncomp = 0;
    for z in 0..nz {
        let r = dsu.find(z);
        if comp_id[r] == usize::MAX {
            comp_id[r] = ncomp;
            ncomp += 1;
        }
        comp_id[z] = comp_id[r];
    }
    for line in lines.iter_mut() {
        line.vertex = comp_id[line.sectors[0].0];
    }

    // what each line faces
    let mut facing: Vec<Option<(usize, Facing)>> = vec![None; lines.len()];
    for pr in probes {
        let l = *line_of
            .get(pr.zero)
            .and_then(|v| v.get(pr.sector))
            .ok_or_else(|| bad(format!("probe on missing sector ({}, {})", pr.zero, pr.sector)))?;
        if facing[l].is_none() {
            facing[l] = Some((pr.zero, pr.facing.clone()));
        }
    }
    let mut partner = vec![usize::MAX; lines.len()];
    for l in 0..lines.len() {
        let (_, f) = facing[l].as_ref().ok_or_else(|| bad(format!("boundary line {l} was not probed")))?;
        if let Facing::Across { zero, sector, height, .. } = *f {
            let p = *line_of
                .get(zero)
                .and_then(|v| v.get(sector))
                .ok_or_else(|| bad("crossing lands on a missing sector"))?;
            if p == l {
                return Err(bad(format!("line {l} faces itself")));
            }
            if !(height.is_finite() && height >= 0.0) {
                return Err(bad(format!("line {l}: bad height {height}")));
            }
            partner[l] = p;
        }
    }

    // regions
    let mut regions = Vec::new();
    let mut line_region = vec![usize::MAX; lines.len()];
    let mut region_lines: Vec<(usize, Option<usize>)> = Vec::new();
    for l in 0..lines.len() {
        if line_region[l] != usize::MAX {
            continue;
        }
        let (_, f) = facing[l].as_ref().unwrap();
        match *f {
            Facing::HalfPlane { pole, label, .. } => {
                if let Some(((p0, _), (p1, _))) = lines[l].ends {
                    if p0 != pole || p1 != pole {
                        return Err(bad(format!("half-plane line {l} does not return to its pole")));
                    }
                } else {
                    return Err(bad(format!("closed line {l} bounds a half-plane")));
                }
                line_region[l] = regions.len();
                region_lines.push((l, None));
                regions.push(RegionRec::HalfPlane { pole, direction_label: label });
            }
            Facing::Across { height, .. } => {
                let p = partner[l];
                if partner[p] != usize::MAX && partner[p] != l {
                    return Err(bad(format!("lines {l} and {p} disagree about their strip")));
                }
                if let Some((_, Facing::Across { height: h2, .. })) = &facing[p] {
                    if (h2 - height).abs() > HEIGHT_AGREEMENT * (1.0 + height.abs()) {
                        return Err(bad(format!("strip heights {height} and {h2} disagree")));
                    }
                }
                line_region[l] = regions.len();
                line_region[p] = regions.len();
                region_lines.push((l, Some(p)));
                match (lines[l].ends, lines[p].ends) {
                    (None, None) => regions.push(RegionRec::RingDomain { height }),
                    (Some((a, b)), Some((b2, a2))) => {
                        if a != a2 || b != b2 {
                            return Err(bad(format!("strip sides {l}, {p} have different ends")));
                        }
                        regions.push(RegionRec::Strip { end_a: a, end_b: b, height });
                    }
                    _ => return Err(bad("strip with one closed side")),
                }
            }
        }
    }
    if regions.iter().filter(|r| matches!(r, RegionRec::RingDomain { .. })).count() > 1 {
        return Err(bad("more than one ring domain"));
    }

    // graph
    let mut edges = Vec::new();
    let mut rays = Vec::new();
    let mut slot_of_line = vec![Slot::Ray { ray: 0 }; lines.len()];
    for (r, &(a, b)) in region_lines.iter().enumerate() {
        match (&regions[r], b) {
            (RegionRec::HalfPlane { pole, direction_label }, _) => {
                slot_of_line[a] = Slot::Ray { ray: rays.len() };
                rays.push(Ray { vertex: lines[a].vertex, pole: *pole, label: *direction_label });
            }
            (RegionRec::Strip { height, .. }, Some(b)) | (RegionRec::RingDomain { height }, Some(b)) => {
                slot_of_line[a] = Slot::Edge { edge: edges.len(), end: 0 };
                slot_of_line[b] = Slot::Edge { edge: edges.len(), end: 1 };
                edges.push(Edge {
                    v1: lines[a].vertex,
                    v2: lines[b].vertex,
                    length: *height,
                    in_cycle: false,
                    ring: matches!(regions[r], RegionRec::RingDomain { .. }),
                });
            }
            _ => unreachable!(),
        }
    }
    let mut ribbon: Vec<Vec<Slot>> = vec![Vec::new(); ncomp];
    let mut placed = vec![false; lines.len()];
    for l in 0..lines.len() {
        if lines[l].ends.is_none() || placed[l] {
            continue;
        }
        let v = lines[l].vertex;
        if !ribbon[v].is_empty() {
            return Err(bad(format!("vertex {v} has two outer boundary cycles")));
        }
        let mut cur = l;
        loop {
            placed[cur] = true;
            ribbon[v].push(slot_of_line[cur]);
            let &(z, i) = lines[cur].sectors.last().unwrap();
            let k = cg.vertices[z].prongs.len();
            cur = line_of[z][(i + 1) % k];
            if cur == l {
                break;
            }
            if placed[cur] {
                return Err(bad("ribbon walk loops early"));
            }
        }
    }
    for l in 0..lines.len() {
        if lines[l].ends.is_none() {
            ribbon[lines[l].vertex].insert(0, slot_of_line[l]);
            placed[l] = true;
        }
    }
    if placed.iter().any(|p| !p) {
        return Err(bad("lines missing from the ribbon"));
    }
    let mut graph = MetricRibbonGraph { surface: cg.surface, vertices: (0..ncomp).collect(), edges, rays, ribbon };
    graph.mark_cycle();
    graph.check().map_err(|e| bad(e.to_string()))?;
    check_labels(&graph, cg.n, cg.m)?;

    let tau = graph.transverse_measure().map_err(|e| bad(e.to_string()))? + 0.0;
    let tau_from_regions: f64 = regions
        .iter()
        .filter_map(|r| match r {
            RegionRec::Strip { end_a, end_b, height } if end_a.0 != end_b.0 => Some(*height),
            _ => None,
        })
        .sum();
    let ring = regions.iter().find_map(|r| match r {
        RegionRec::RingDomain { height } => Some(*height),
        _ => None,
    });
    let ring_circumference = ring.map(|_| {
        let l = (0..lines.len()).find(|&l| lines[l].ends.is_none()).unwrap();
        lines[l]
            .sectors
            .iter()
            .map(|&(z, i)| {
                let k = cg.vertices[z].prongs.len();
                match cg.vertices[z].prongs[(i + 1) % k] {
                    ProngEnd::Zero { length, .. } => length,
                    _ => 0.0,
                }
            })
            .sum()
    });

    let mut descriptor = FoliationDescriptor {
        n: cg.n,
        m: cg.m,
        graph,
        tau,
        twist_j: None,
        l0: None,
        continuous_twist: None,
        ring_height: None,
    };
    if cg.surface == Surface::PuncturedPlane {
        if descriptor.graph.betti() == 1 {
            let line_edge: Vec<usize> = slot_of_line
                .iter()
                .map(|s| match *s {
                    Slot::Edge { edge, .. } => edge,
                    Slot::Ray { .. } => usize::MAX,
                })
                .collect();
            let t = continuous_twist(cg, &lines, &line_edge, &facing, &descriptor.graph, tau)?;
            let (j, l0) = FoliationDescriptor::split_twist(t, tau);
            descriptor.twist_j = Some(j);
            descriptor.l0 = Some(l0);
            descriptor.continuous_twist = Some(t);
        } else {
            descriptor.ring_height = Some(ring.ok_or_else(|| bad("tree leaf space on the punctured plane without a ring domain"))?);
        }
    }
    Ok(Assembly { lines, regions, line_region, descriptor, tau_from_regions, ring_circumference })
}

fn check_labels(g: &MetricRibbonGraph, n: usize, m: usize) -> Result<(), ExtractError> {
    let want = |k: usize| -> Vec<usize> { if k >= 3 { (1..=k - 2).collect() } else { vec![] } };
    if g.rays_at(Pole::Infinity) != want(n) {
        return Err(bad(format!("rays to infinity {:?}, expected labels 1..={}", g.rays_at(Pole::Infinity), n - 2)));
    }
    if g.surface == Surface::PuncturedPlane && g.rays_at(Pole::Zero) != want(m) {
        return Err(bad(format!("rays to 0 {:?}, expected labels 1..={}", g.rays_at(Pole::Zero), m - 2)));
    }
    Ok(())
}

/// Continuous twist t = X' - X, where X, X' are the positions along the
/// lifted cycle of the roots of ray 1 at infinity and ray 1 at 0, taken in
/// the lifts whose asymptotic arg z lies in [0, 2π).  Position increases
/// counterclockwise about the origin.
fn continuous_twist(
    cg: &CriticalGraph,
    lines: &[BoundaryLine],
    line_edge: &[usize],
    facing: &[Option<(usize, Facing)>],
    g: &MetricRibbonGraph,
    tau: f64,
) -> Result<f64, ExtractError> {
    if tau <= 0.0 {
        return Err(bad("twist needs a positive transverse measure"));
    }
    let nz = cg.vertices.len();
    let cyc = g.cycle_edges();
    // the strip cut open to make a simply connected domain
    let cut = cyc[0];

    // lift of arg z over zeros, avoiding the cut strip
    let mut arg = vec![f64::NAN; nz];
    arg[0] = cg.base_arg;
    let mut stack = vec![0usize];
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nz];
    for (z, v) in cg.vertices.iter().enumerate() {
        for p in &v.prongs {
            if let ProngEnd::Zero { zero, turn, .. } = *p {
                adj[z].push((zero, turn));
            }
        }
    }
    let mut cut_crossing = None;
    for (l, f) in facing.iter().enumerate() {
        if let Some((src, Facing::Across { zero, turn, .. })) = f {
            if line_edge[l] == cut {
                cut_crossing.get_or_insert((*src, *zero, *turn));
            } else {
                adj[*src].push((*zero, *turn));
                adj[*zero].push((*src, -*turn));
            }
        }
    }
    while let Some(z) = stack.pop() {
        for &(w, t) in &adj[z] {
            if arg[w].is_nan() {
                arg[w] = arg[z] + t;
                stack.push(w);
            }
        }
    }
    if arg.iter().any(|a| a.is_nan()) {
        return Err(bad("zeros not connected away from the cut strip"));
    }
    let (src, dst, turn) = cut_crossing.ok_or_else(|| bad("cut strip was not probed"))?;
    let wind = arg[src] + turn - arg[dst];
    if (wind.abs() - 2.0 * PI).abs() > 0.5 {
        return Err(bad(format!("crossing the cycle winds by {wind:.4} instead of ±2π")));
    }
    let comp = |z: usize| lines.iter().find(|l| l.sectors.iter().any(|s| s.0 == z)).map(|l| l.vertex).unwrap();
    let (start, finish) = if wind > 0.0 { (comp(dst), comp(src)) } else { (comp(src), comp(dst)) };

    // positions along the cycle, walking away from the cut
    let nv = g.vertices.len();
    let mut pos = vec![f64::NAN; nv];
    pos[start] = 0.0;
    let mut cur = start;
    let mut used = vec![false; g.edges.len()];
    used[cut] = true;
    let mut acc = 0.0;
    for _ in 1..cyc.len() {
        let next = cyc.iter().copied().find(|&e| !used[e] && (g.edges[e].v1 == cur || g.edges[e].v2 == cur));
        let Some(e) = next else { break };
        used[e] = true;
        acc += g.edges[e].length;
        cur = if g.edges[e].v1 == cur { g.edges[e].v2 } else { g.edges[e].v1 };
        pos[cur] = acc;
    }
    if cur != finish {
        return Err(bad("cycle walk did not reach the far side of the cut"));
    }

    // root on the cycle of every vertex
    let mut root = vec![usize::MAX; nv];
    let mut stack: Vec<usize> = (0..nv).filter(|&v| !pos[v].is_nan()).collect();
    for &v in &stack {
        root[v] = v;
    }
    while let Some(v) = stack.pop() {
        for e in &g.edges {
            if e.in_cycle {
                continue;
            }
            for (a, b) in [(e.v1, e.v2), (e.v2, e.v1)] {
                if a == v && root[b] == usize::MAX {
                    root[b] = root[v];
                    stack.push(b);
                }
            }
        }
    }

    let anchor = |pole: Pole| -> Result<f64, ExtractError> {
        let l = (0..lines.len())
            .find(|&l| matches!(facing[l], Some((_, Facing::HalfPlane { pole: p, label: 1, .. })) if p == pole))
            .ok_or_else(|| bad(format!("no half-plane 1 at {pole:?}")))?;
        let (src, Facing::HalfPlane { turn, .. }) = facing[l].as_ref().unwrap() else { unreachable!() };
        let theta = arg[*src] + turn;
        let r = root[lines[l].vertex];
        if r == usize::MAX {
            return Err(bad("half-plane not attached to the cycle"));
        }
        // region centres can sit exactly on arg z = 0; count those in sheet 0
        Ok(pos[r] - (theta / (2.0 * PI) + 1e-9).floor() * tau)
    };
    Ok(anchor(Pole::Zero)? - anchor(Pole::Infinity)?)
}
