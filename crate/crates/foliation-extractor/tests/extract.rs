use foliation_extractor::*;
use qd_core::{Complex64 as C, FoliationKind, Pole, QuadDiff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajectory_tracer::TraceConfig;

const H: FoliationKind = FoliationKind::Horizontal;
const V: FoliationKind = FoliationKind::Vertical;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn two_zero_example() -> QuadDiff {
    QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)]).unwrap()
}

fn symmetric() -> QuadDiff {
    QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
}

fn random_qd(rng: &mut ChaCha8Rng, n: usize, m: usize) -> QuadDiff {
    let mut coeffs = vec![c(1.0, 0.0)];
    for _ in 0..n + m - 4 {
        coeffs.push(C::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    QuadDiff::punctured(n, m, coeffs).unwrap()
}

fn cfg() -> ExtractConfig {
    ExtractConfig::default()
}

#[test]
fn star_of_z_dz2() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let tr = build_critical_graph(&q, H, &cfg()).unwrap();
    assert_eq!(tr.graph.vertices.len(), 1);
    assert_eq!(tr.graph.saddle_connections(), 0);
    assert!(tr.graph.vertices[0].prongs.iter().all(|p| matches!(p, ProngEnd::Pole { .. })));
    let regions = classify_regions(&q, H, &cfg()).unwrap();
    assert_eq!(regions.len(), 3);
    assert!(regions.iter().all(|r| matches!(r, RegionRec::HalfPlane { pole: Pole::Infinity, .. })));
    let g = leaf_space(&q, H, &cfg()).unwrap();
    assert_eq!(g.vertices.len(), 1);
    assert!(g.edges.is_empty());
    assert_eq!(g.rays_at(Pole::Infinity), vec![1, 2, 3]);
    // counterclockwise at infinity means decreasing labels
    let order: Vec<usize> = g.ribbon[0]
        .iter()
        .map(|s| match s {
            Slot::Ray { ray } => g.rays[*ray].label,
            _ => unreachable!(),
        })
        .collect();
    let start = order.iter().position(|&l| l == 3).unwrap();
    let rotated: Vec<usize> = (0..3).map(|i| order[(start + i) % 3]).collect();
    assert_eq!(rotated, vec![3, 2, 1]);
    assert_eq!(g.transverse_measure().unwrap(), 0.0);
    let faces = face_labels(&g, &q, H).unwrap();
    let mut labels: Vec<usize> = faces.iter().map(|f| f.1).collect();
    labels.sort();
    assert_eq!(labels, vec![1, 2, 3]);
}

#[test]
fn plane_without_zeros() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0)]).unwrap();
    let tr = build_critical_graph(&q, H, &cfg()).unwrap();
    assert!(tr.graph.vertices.is_empty());
    let e = extract(&q, H, &cfg()).unwrap();
    assert_eq!(e.assembly.regions.len(), 2);
    let g = &e.descriptor().graph;
    assert_eq!(g.rays.len(), 2);
    assert_eq!(g.faces().len(), 2);
    let mut labels: Vec<usize> = face_labels(g, &q, H).unwrap().iter().map(|f| f.1).collect();
    labels.sort();
    assert_eq!(labels, vec![1, 2]);
}

#[test]
fn symmetric_case_against_fine_reference() {
    let q = symmetric();
    let fine = ExtractConfig { trace: TraceConfig { rtol: 1e-11, atol: 1e-11, ..TraceConfig::default() }, ..cfg() };
    for kind in [H, V] {
        let a = build_critical_graph(&q, kind, &cfg()).unwrap();
        let b = build_critical_graph(&q, kind, &fine).unwrap();
        assert_eq!(a.graph.vertices.len(), 2);
        assert_eq!(a.graph.saddle_connections(), 1);
        let strip = |v: &CriticalVertex| -> Vec<String> {
            v.prongs
                .iter()
                .map(|p| match p {
                    ProngEnd::Pole { pole, index } => format!("{pole:?}{index}"),
                    ProngEnd::Zero { zero, prong, .. } => format!("z{zero}p{prong}"),
                })
                .collect()
        };
        for (x, y) in a.graph.vertices.iter().zip(&b.graph.vertices) {
            assert_eq!(strip(x), strip(y));
        }
        let e = extract(&q, kind, &cfg()).unwrap();
        let g = &e.descriptor().graph;
        assert_eq!(g.rays_at(Pole::Infinity), vec![1]);
        assert_eq!(g.rays_at(Pole::Zero), vec![1]);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 1);
        assert!(g.edges[0].in_cycle);
    }
}

#[test]
fn two_zero_example_structure() {
    let q = two_zero_example();
    let (h, v) = extract_pair(&q, &cfg()).unwrap();
    for e in [&h, &v] {
        let half = e.assembly.regions.iter().filter(|r| matches!(r, RegionRec::HalfPlane { .. })).count();
        assert_eq!(half, 2);
        let d = e.descriptor();
        assert_eq!(d.graph.rays_at(Pole::Infinity), vec![1]);
        assert_eq!(d.graph.rays_at(Pole::Zero), vec![1]);
        // generic: V = E = n + m - 4
        if e.traced.graph.saddle_connections() == 0 {
            assert_eq!(d.graph.vertices.len(), 2);
            assert_eq!(d.graph.edges.len(), 2);
        }
    }
    assert!(h.descriptor().tau.max(v.descriptor().tau) > 1e-8);
}

#[test]
fn transverse_measure_matches_strips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(n, m) in &[(3, 3), (4, 4), (3, 5)] {
        for _ in 0..6 {
            let q = random_qd(&mut rng, n, m);
            for kind in [H, V] {
                let e = extract(&q, kind, &cfg()).unwrap();
                let d = e.descriptor();
                assert!((d.tau - e.assembly.tau_from_regions).abs() <= 1e-8 * (1.0 + d.tau));
                assert_eq!(d.graph.rays_at(Pole::Infinity), (1..=n - 2).collect::<Vec<_>>());
                assert_eq!(d.graph.rays_at(Pole::Zero), (1..=m - 2).collect::<Vec<_>>());
                if d.tau > 0.0 {
                    let t = d.continuous_twist.unwrap();
                    let back = twist_from_parts(d.twist_j.unwrap(), d.tau, d.l0.unwrap());
                    assert!((t - back).abs() <= 1e-12 * (1.0 + t.abs()));
                    assert!(d.l0.unwrap() >= 0.0 && d.l0.unwrap() < d.tau);
                    assert!(d.ring_height.is_none());
                } else {
                    assert!(d.ring_height.is_some());
                }
            }
        }
    }
}

#[test]
fn swap_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..4 {
        let q = random_qd(&mut rng, 3, 4);
        let a = extract(&q.negated(), H, &cfg()).unwrap();
        let b = extract(&q, V, &cfg()).unwrap();
        assert_eq!(a.descriptor(), b.descriptor());
    }
}

#[test]
fn scale_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..4 {
        let q = random_qd(&mut rng, 4, 4);
        for kind in [H, V] {
            let a = extract(&q, kind, &cfg()).unwrap();
            let b = extract(&q.scaled(c(4.0, 0.0)), kind, &cfg()).unwrap();
            let (da, db) = (a.descriptor(), b.descriptor());
            assert_eq!(da.graph.rays, db.graph.rays);
            assert_eq!(da.graph.ribbon, db.graph.ribbon);
            for (x, y) in da.graph.edges.iter().zip(&db.graph.edges) {
                assert!((y.length - 2.0 * x.length).abs() <= 1e-6 * (1.0 + x.length));
            }
            assert!((db.tau - 2.0 * da.tau).abs() <= 1e-6);
            assert_eq!(da.twist_j, db.twist_j);
        }
    }
}

/// Relabel zeros and reassemble: the twist must not depend on which strip
/// was cut or which zero anchors the arg lift.
#[test]
fn twist_independent_of_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = 0;
    for _ in 0..8 {
        let q = random_qd(&mut rng, 4, 4);
        let e = extract(&q, H, &cfg()).unwrap();
        let Some(t) = e.descriptor().continuous_twist else { continue };
        let nz = e.traced.graph.vertices.len();
        let perm: Vec<usize> = (0..nz).map(|i| (i + 1) % nz).collect();
        let mut cg = e.traced.graph.clone();
        cg.vertices = vec![cg.vertices[0].clone(); nz];
        for (old, v) in e.traced.graph.vertices.iter().enumerate() {
            let mut v = v.clone();
            for p in v.prongs.iter_mut() {
                if let ProngEnd::Zero { zero, .. } = p {
                    *zero = perm[*zero];
                }
            }
            cg.vertices[perm[old]] = v;
        }
        let new_zero0 = perm.iter().position(|&p| p == 0).unwrap();
        cg.base_arg = e.traced.zeros[new_zero0].location.arg();
        let probes: Vec<SectorProbe> = e
            .probes
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.zero = perm[p.zero];
                if let Facing::Across { zero, .. } = &mut p.facing {
                    *zero = perm[*zero];
                }
                p
            })
            .collect();
        let again = assemble(&cg, &probes).unwrap();
        let t2 = again.descriptor.continuous_twist.unwrap();
        assert!((t - t2).abs() < 1e-9, "{t} vs {t2}");
        checked += 1;
    }
    assert!(checked > 0);
}

/// Log-unrolling oracle: a leaf crossing the cylinder winds by Δ; the
/// twist in units of τ tracks Δ / 2π up to a bounded offset, and a full turn
/// of the zeros about the origin shifts both by one.
#[test]
fn twist_tracks_leaf_winding() {
    let q = two_zero_example();
    let e = extract(&q, H, &cfg()).unwrap();
    let d = e.descriptor();
    let tau = d.tau;
    let t = d.continuous_twist.unwrap();
    // a horizontal leaf in the middle of a cycle strip
    let tr = trajectory_tracer::Tracer::new(&q, TraceConfig::default()).unwrap();
    let probe = e
        .probes
        .iter()
        .find(|p| matches!(p.facing, Facing::Across { .. }))
        .unwrap();
    let h = q.prong_angles(&e.traced.zeros, probe.zero, V);
    let hz = q.prong_angles(&e.traced.zeros, probe.zero, H);
    let a = h
        .iter()
        .copied()
        .find(|&a| {
            let span = (hz[(probe.sector + 1) % hz.len()] - hz[probe.sector]).rem_euclid(std::f64::consts::TAU);
            (a - hz[probe.sector]).rem_euclid(std::f64::consts::TAU) < span
        })
        .unwrap();
    let (z, w, _) = tr.launch_point(probe.zero, a, V, 3.0).unwrap();
    let leaf = tr.trace(z, w, H, 1.0).unwrap();
    let ends = [leaf.ends.0, leaf.ends.1];
    assert!(ends.iter().all(|x| matches!(x, trajectory_tracer::TrajectoryEnd::PoleApproach { .. })));
    let turn = unrolled_turn(&leaf.points).abs();
    assert!(turn < 4.0 * std::f64::consts::PI);
    assert!((t / tau).abs() < 3.0, "t/τ = {}", t / tau);
}
