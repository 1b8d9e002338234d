use qd_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use trajectory_tracer::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_zero_example() -> QuadDiff {
    QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)]).unwrap()
}

fn symmetric() -> QuadDiff {
    QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
}

fn random_qd(rng: &mut ChaCha8Rng, n: usize, m: usize) -> QuadDiff {
    let mut coeffs: Vec<Complex64> = (0..n + m - 3).map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
    coeffs[0] = c(1.0, 0.0);
    QuadDiff::punctured(n, m, coeffs).unwrap()
}

#[test]
fn straight_leaf_of_dz2() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0)]).unwrap();
    let cfg = TraceConfig { detect_poles: false, max_flat_length: 5.0, ..TraceConfig::default() };
    let t = Tracer::new(&q, cfg).unwrap();
    let tr = t.trace_ray(c(0.0, 1.0), c(1.0, 0.0), FoliationKind::Horizontal, 1.0).unwrap();
    assert_eq!(tr.ends.1, TrajectoryEnd::StepLimit);
    for p in &tr.points {
        assert!((p.im - 1.0).abs() < 1e-12);
    }
    let last = tr.points.last().unwrap();
    assert!((last.re - tr.flat_length).abs() < 1e-9 && tr.flat_length >= 5.0);
}

#[test]
fn three_prongs_for_z_dz2() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let t = Tracer::new(&q, TraceConfig::default()).unwrap();
    let crit = t.critical_trajectories(FoliationKind::Horizontal).unwrap();
    assert_eq!(crit.len(), 3);
    let expect = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    for (tr, a) in crit.iter().zip(expect) {
        let d = tr.points[1] - tr.points[0];
        let diff = (d.arg() - a).rem_euclid(2.0 * PI);
        assert!(diff.min(2.0 * PI - diff) < 1e-9);
        // straight rays to the pole of order 5
        assert!(matches!(tr.ends.1, TrajectoryEnd::PoleApproach { pole: Pole::Infinity, .. }));
    }
    let labels: Vec<_> = crit
        .iter()
        .map(|tr| match tr.ends.1 {
            TrajectoryEnd::PoleApproach { label, .. } => label,
            _ => 0,
        })
        .collect();
    let mut sorted = labels.clone();
    sorted.sort();
    assert_eq!(sorted, vec![1, 2, 3]);
}

fn ends(t: &Tracer, kind: FoliationKind) -> Vec<TrajectoryEnd> {
    t.critical_trajectories(kind)
        .unwrap()
        .into_iter()
        .map(|tr| match tr.ends.1 {
            TrajectoryEnd::HitZero { zero, .. } => TrajectoryEnd::HitZero { zero, distance: 0.0 },
            e => e,
        })
        .collect()
}

#[test]
fn symmetric_case_matches_fine_reference() {
    let q = symmetric();
    let coarse = Tracer::new(&q, TraceConfig::default()).unwrap();
    let fine = Tracer::new(&q, TraceConfig { rtol: 1e-12, atol: 1e-12, ..TraceConfig::default() }).unwrap();
    for kind in [FoliationKind::Horizontal, FoliationKind::Vertical] {
        let a = ends(&coarse, kind);
        assert_eq!(a, ends(&fine, kind));
        // one saddle connection each way between ±i
        assert_eq!(a.iter().filter(|e| matches!(e, TrajectoryEnd::HitZero { .. })).count(), 2);
    }
}

#[test]
fn counts_match_prong_model() {
    let t = Tracer::new(&two_zero_example(), TraceConfig::default()).unwrap();
    assert_eq!(t.critical_trajectories(FoliationKind::Horizontal).unwrap().len(), 6);
    let double = QuadDiff::punctured(3, 5, vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let t = Tracer::new(&double, TraceConfig::default()).unwrap();
    for j in 0..t.zeros().len() {
        assert_eq!(t.critical_from(j, FoliationKind::Horizontal).unwrap().len(), 4);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let q = random_qd(&mut rng, 4, 5);
        let t = Tracer::new(&q, TraceConfig::default()).unwrap();
        let expect: usize = t.zeros().iter().map(|z| z.order + 2).sum();
        assert_eq!(t.critical_trajectories(FoliationKind::Vertical).unwrap().len(), expect);
    }
}

#[test]
fn transverse_measure_examples() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0)]).unwrap();
    let t = Tracer::new(&q, TraceConfig::default()).unwrap();
    let up = t.transverse_measure_along(&[c(0.0, 0.0), c(0.0, 1.0)], FoliationKind::Horizontal).unwrap();
    assert!((up - 1.0).abs() < 1e-14);
    let flat = t.transverse_measure_along(&[c(0.0, 0.0), c(1.0, 0.0)], FoliationKind::Horizontal).unwrap();
    assert!(flat.abs() < 1e-14);
    let q = two_zero_example();
    let model = SqrtModel::new(&q).unwrap();
    let circle: Vec<Complex64> = (0..=720).map(|i| Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 720.0)).collect();
    let seed = q.eval(circle[0]).unwrap().sqrt();
    let a = model.transverse_measure(&circle, seed, false, 1e-9);
    let b = model.transverse_measure(&circle, seed, false, 1e-13);
    assert!(a > 0.0 && (a - b).abs() < 1e-8, "{a} {b}");
}

fn hausdorff_one_sided(a: &[Complex64], b: &[Complex64]) -> f64 {
    // distance from each point of a to the polyline b
    a.iter()
        .map(|p| {
            b.windows(2)
                .map(|s| {
                    let d = s[1] - s[0];
                    let t = (((p - s[0]) * d.conj()).re / d.norm_sqr().max(1e-300)).clamp(0.0, 1.0);
                    (s[0] + d * t - p).norm()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[test]
fn swap_symmetry_of_traces() {
    let q = two_zero_example();
    let tq = Tracer::new(&q, TraceConfig::default()).unwrap();
    let tn = Tracer::new(&q.negated(), TraceConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let z0 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let s = q.eval(z0).unwrap().sqrt();
        let v = tq.trace(z0, s, FoliationKind::Vertical, 1.0).unwrap();
        let h = tn.trace(z0, s * c(0.0, 1.0), FoliationKind::Horizontal, -1.0).unwrap();
        assert_eq!(v.ends, h.ends);
        // compare the parts away from the poles
        let near: Vec<Complex64> = v.points.iter().copied().filter(|p| p.norm() < 10.0 && p.norm() > 0.1).collect();
        assert!(hausdorff_one_sided(&near, &h.points) < 1e-6);
    }
}

#[test]
fn scale_covariance() {
    let q = two_zero_example();
    let q4 = q.scaled(c(4.0, 0.0));
    let t1 = Tracer::new(&q, TraceConfig::default()).unwrap();
    let t4 = Tracer::new(&q4, TraceConfig::default()).unwrap();
    let z0 = c(0.7, 0.9);
    let s = q.eval(z0).unwrap().sqrt();
    let a = t1.trace(z0, s, FoliationKind::Horizontal, 1.0).unwrap();
    let b = t4.trace(z0, s * 2.0, FoliationKind::Horizontal, 1.0).unwrap();
    assert_eq!(a.ends, b.ends);
    let near: Vec<Complex64> = a.points.iter().copied().filter(|p| p.norm() < 10.0 && p.norm() > 0.1).collect();
    assert!(hausdorff_one_sided(&near, &b.points) < 1e-6);
    let arc = [c(0.5, 0.5), c(1.5, -0.2), c(2.0, 1.0)];
    let m1 = t1.transverse_measure_along(&arc, FoliationKind::Horizontal).unwrap();
    let m4 = t4.transverse_measure_along(&arc, FoliationKind::Horizontal).unwrap();
    assert!((m4 / m1 - 2.0).abs() < 1e-8);
}

#[test]
fn classification_stable_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut corpus = vec![two_zero_example(), symmetric()];
    for (n, m) in [(3, 4), (4, 4), (3, 5), (4, 5)] {
        corpus.push(random_qd(&mut rng, n, m));
    }
    for q in corpus {
        let base = Tracer::new(&q, TraceConfig::default()).unwrap();
        let fine = Tracer::new(&q, TraceConfig { rtol: 1e-10 / 32.0, atol: 1e-10 / 32.0, ..TraceConfig::default() }).unwrap();
        for kind in [FoliationKind::Horizontal, FoliationKind::Vertical] {
            assert_eq!(ends(&base, kind), ends(&fine, kind));
        }
    }
}

#[test]
fn polyline_dump_has_one_point_per_line() {
    let s = polyline_text(&[c(1.0, 2.0), c(3.0, -4.0)]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 2);
    let xy: Vec<f64> = lines[1].split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert_eq!(xy, vec![3.0, -4.0]);
}
