use foliation_space::{compose, coords_to_pair, descriptor_distance, pair_dimension, plane_tree};
use graph_moduli::{coords_to_tree, tree_distance, CycleGraph, LabelledTree, Sub};
use qd_core::Pole;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singular_flat_builder::{
    build_from_pair, build_from_pair_with, extract_leaf_spaces, planar_build, FlatPiece, RegionBijection, SurfaceComplex,
};

fn plane_round_trip(v: &LabelledTree, h: &LabelledTree) -> (SurfaceComplex, f64, f64) {
    let f = RegionBijection::standard(h.k + 2, None).unwrap();
    let sc = planar_build(v, h, &f).unwrap();
    let back = extract_leaf_spaces(&sc).unwrap();
    let dh = tree_distance(h, &plane_tree(&back.horizontal.graph).unwrap()).unwrap();
    let dv = tree_distance(v, &plane_tree(&back.vertical.graph).unwrap()).unwrap();
    (sc, dh, dv)
}

#[test]
fn dz2_is_two_half_planes() {
    let line = LabelledTree::star(2);
    let (sc, dh, dv) = plane_round_trip(&line, &line);
    assert_eq!(sc.half_planes(), 2);
    assert_eq!(sc.strips(), 0);
    assert_eq!(sc.gluings.len(), 1);
    assert_eq!((dh, dv), (0.0, 0.0));
}

#[test]
fn star_against_a_tree() {
    let h = LabelledTree { k: 4, kids: vec![Sub::node(1.5, vec![Sub::Ray(1), Sub::Ray(2)]), Sub::Ray(3)] };
    let v = LabelledTree::star(4);
    let (sc, dh, dv) = plane_round_trip(&v, &h);
    assert_eq!(sc.half_planes(), 4);
    assert_eq!(sc.strips(), 1);
    assert!(dh < 1e-9 && dv < 1e-9, "{dh} {dv}");
}

#[test]
fn random_plane_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let k = 5;
        let c1: Vec<f64> = (0..k - 3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let c2: Vec<f64> = (0..k - 3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (h, v) = (coords_to_tree(k, &c1).unwrap(), coords_to_tree(k, &c2).unwrap());
        let (_, dh, dv) = plane_round_trip(&v, &h);
        assert!(dh < 1e-9 && dv < 1e-9, "{dh} {dv} {h:?} {v:?}");
    }
}

#[test]
fn one_ray_cycles() {
    let g = CycleGraph::single(1.0);
    let gh = compose(&g, &g, 0.0).unwrap();
    let gv = compose(&g, &g, 0.0).unwrap();
    let sc = build_from_pair(&gh, &gv).unwrap();
    assert_eq!(sc.half_planes(), 2);
    let back = extract_leaf_spaces(&sc).unwrap();
    assert!(descriptor_distance(&gh, &back.horizontal).unwrap() < 1e-9);
    assert!(descriptor_distance(&gv, &back.vertical).unwrap() < 1e-9);
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<f64> {
    (0..pair_dimension(n, m)).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

#[test]
fn random_pairs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, m) in [(3, 3), (3, 4), (4, 4)] {
        for _ in 0..60 {
            let c = random_pair(&mut rng, n, m);
            let (gh, gv) = coords_to_pair(n, m, &c).unwrap();
            let sc = build_from_pair(&gh, &gv).unwrap_or_else(|e| panic!("{e} at {c:?}"));
            let back = extract_leaf_spaces(&sc).unwrap_or_else(|e| panic!("{e} at {c:?}"));
            let dh = descriptor_distance(&gh, &back.horizontal).unwrap();
            let dv = descriptor_distance(&gv, &back.vertical).unwrap();
            assert!(dh < 1e-9 && dv < 1e-9, "({n},{m}) {dh} {dv} at {c:?}");
        }
    }
    let _ = (Pole::Infinity, FlatPiece::HalfPlane { pole: Pole::Infinity, label: 1, angle: 0.0, line: 0 });
}

#[test]
fn ring_case_has_one_ring_domain() {
    use foliation_space::compose_ring;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, m) in [(3, 3), (3, 4), (4, 4), (5, 4)] {
        for _ in 0..40 {
            let c = random_pair(&mut rng, n, m);
            let (gh, _) = coords_to_pair(n, m, &c).unwrap();
            // a random tree pair as the ring foliation
            let cyc = |k: usize, rng: &mut ChaCha8Rng| {
                let cc: Vec<f64> = (0..k.saturating_sub(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
                graph_moduli::coords_to_cycle(k, 0.0, &cc).unwrap()
            };
            let (a, b) = (cyc(n - 2, &mut rng), cyc(m - 2, &mut rng));
            let h = rng.gen_range(0.1..2.0);
            let gv = compose_ring(&a, &b, h).unwrap();
            let sc = build_from_pair(&gh, &gv).unwrap_or_else(|e| panic!("{e} {gh:?} {gv:?}"));
            assert_eq!(sc.rings(), 1);
            let ring = sc.pieces.iter().find(|p| matches!(p, FlatPiece::RingDomain { .. })).unwrap();
            assert!(matches!(ring, FlatPiece::RingDomain { height, .. } if (height - h).abs() < 1e-12));
            let back = extract_leaf_spaces(&sc).unwrap_or_else(|e| panic!("{e}"));
            let dh = descriptor_distance(&gh, &back.horizontal).unwrap();
            let dv = descriptor_distance(&gv, &back.vertical).unwrap();
            assert!(dh < 1e-9 && dv < 1e-9, "({n},{m}) {dh} {dv}");
            // and with the roles exchanged
            let sc = build_from_pair(&gv, &gh).unwrap();
            assert_eq!(sc.rings(), 1);
            let back = extract_leaf_spaces(&sc).unwrap();
            assert!(descriptor_distance(&gv, &back.horizontal).unwrap() < 1e-9);
            assert!(descriptor_distance(&gh, &back.vertical).unwrap() < 1e-9);
        }
    }
}

fn c(re: f64, im: f64) -> qd_core::Complex64 {
    qd_core::Complex64::new(re, im)
}

#[test]
fn differentials_round_trip() {
    use foliation_extractor::ExtractConfig;
    use qd_core::QuadDiff;
    use singular_flat_builder::verify_roundtrip;
    let cfg = ExtractConfig::default();
    let cases = [
        QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)]).unwrap(),
        QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
        QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.3, -0.8)]).unwrap(),
    ];
    for q in &cases {
        let r = verify_roundtrip(q, &cfg, 1e-4).unwrap_or_else(|e| panic!("{e}"));
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn scaling_the_differential_doubles_heights() {
    use foliation_extractor::{extract_pair, ExtractConfig};
    use qd_core::QuadDiff;
    let cfg = ExtractConfig::default();
    let q = QuadDiff::punctured(3, 4, vec![c(1.0, 0.0), c(0.4, -0.9), c(-0.2, 0.3), c(0.5, 1.1)]).unwrap();
    let heights = |q: &QuadDiff| {
        let (h, v) = extract_pair(q, &cfg).unwrap();
        let sc = build_from_pair_with(h.descriptor(), v.descriptor(), &RegionBijection::from_qd(q).unwrap()).unwrap();
        let mut out: Vec<f64> = sc
            .pieces
            .iter()
            .filter_map(|p| match p {
                FlatPiece::Strip { height, .. } | FlatPiece::RingDomain { height, .. } => Some(*height),
                _ => None,
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out
    };
    let a = heights(&q);
    let b = heights(&q.scaled(c(4.0, 0.0)));
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((2.0 * x - y).abs() < 1e-6 * (1.0 + y), "{x} {y}");
    }
}

#[test]
fn non_cyclic_region_maps_rejected() {
    assert!(RegionBijection::from_maps(5, None, &[(Pole::Infinity, vec![2, 1, 3])]).is_err());
    assert!(RegionBijection::from_maps(5, None, &[(Pole::Infinity, vec![2, 3, 1])]).is_ok());
}
