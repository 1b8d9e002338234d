use qd_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_zero_example() -> QuadDiff {
    QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)]).unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(two_zero_example().eval(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
    let z = QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert_eq!(z.eval(c(4.0, 0.0)).unwrap(), c(4.0, 0.0));
    // (z²+1)/z³ at 2i is exactly -3i/8
    let q = QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let v = q.eval(c(0.0, 2.0)).unwrap();
    assert!((v - c(0.0, -0.375)).norm() < 1e-16);
    assert_eq!(q.eval(c(0.0, 0.0)), Err(QdError::Domain));
}

#[test]
fn zeros_examples() {
    let q = QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let z = q.zeros().unwrap();
    assert_eq!(z.len(), 2);
    assert!((z[0].location - c(0.0, -1.0)).norm() < 1e-15 || (z[0].location - c(0.0, 1.0)).norm() < 1e-15);
    let sq = QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    let z = sq.zeros().unwrap();
    assert_eq!(z, vec![ZeroPoint { location: c(0.0, 0.0), order: 2 }]);
    // quadratic formula as an independent oracle
    let q = two_zero_example();
    let disc = (c(0.0, -1.0) * c(0.0, -1.0) - 4.0 * c(0.0, 1.0)).sqrt();
    let r1 = (c(0.0, 1.0) + disc) / 2.0;
    let r2 = (c(0.0, 1.0) - disc) / 2.0;
    for zp in q.zeros().unwrap() {
        assert_eq!(zp.order, 1);
        assert!(q.eval_p(zp.location).norm() < 1e-12);
        let d = (zp.location - r1).norm().min((zp.location - r2).norm());
        assert!(d < 1e-13);
    }
}

#[test]
fn double_zero_counted_twice() {
    // (z² + 1)² / z^5 : n + m - 4 = 4 with n = 3, m = 5
    let q = QuadDiff::punctured(3, 5, vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let z = q.zeros().unwrap();
    assert_eq!(z.len(), 2);
    assert!(z.iter().all(|zp| zp.order == 2));
    assert_eq!(q.prong_angles(&z, 0, FoliationKind::Horizontal).len(), 4);
}

#[test]
fn asymptotic_direction_examples() {
    let h5 = asymptotic_directions(5, FoliationKind::Horizontal).unwrap();
    let expect = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    for (a, b) in h5.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    let v4 = asymptotic_directions(4, FoliationKind::Vertical).unwrap();
    assert!((v4[0] - PI / 2.0).abs() < 1e-12 && (v4[1] - 1.5 * PI).abs() < 1e-12);
    assert_eq!(asymptotic_directions(3, FoliationKind::Horizontal).unwrap(), vec![0.0]);
    assert!(asymptotic_directions(2, FoliationKind::Horizontal).is_err());
    assert_eq!(half_plane_count(3).unwrap(), 1);
    assert_eq!(half_plane_count(4).unwrap(), 2);
    assert_eq!(half_plane_count(7).unwrap(), 5);
    assert!(half_plane_count(2).is_err());
}

#[test]
fn vertical_directions_bisect_horizontal() {
    for n in 3..=12 {
        let h = asymptotic_directions(n, FoliationKind::Horizontal).unwrap();
        let v = asymptotic_directions(n, FoliationKind::Vertical).unwrap();
        let k = h.len();
        for i in 0..k {
            let a = h[i];
            let b = if i + 1 < k { h[i + 1] } else { h[0] + 2.0 * PI };
            assert!((v[i] - 0.5 * (a + b)).abs() < 1e-12, "n = {n}");
        }
    }
}

#[test]
fn prongs_of_z_dz2() {
    let q = QuadDiff::plane(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let z = q.zeros().unwrap();
    let p = q.prong_angles(&z, 0, FoliationKind::Horizontal);
    let expect = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    for (a, b) in p.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn normalize_examples() {
    let n = normalize(&[c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], Surface::Plane, 6, 0).unwrap();
    assert!((n.alpha - c(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    assert_eq!(n.qd.coeffs, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let id = normalize(&two_zero_example().coeffs, Surface::PuncturedPlane, 3, 3).unwrap();
    assert_eq!(id.alpha, c(1.0, 0.0));
    assert_eq!(id.qd, two_zero_example());
    let raw = [c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let n = normalize(&raw, Surface::Plane, 7, 0).unwrap();
    assert_eq!(n.qd.coeffs[0], c(1.0, 0.0));
    assert_eq!(n.qd.coeffs[1], c(0.0, 0.0));
    for (a, b) in n.original_coeffs().iter().zip(raw) {
        assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()), "{a} vs {b}");
    }
    assert!(normalize(&[c(0.0, 0.0), c(1.0, 0.0)], Surface::Plane, 5, 0).is_err());
}

#[test]
fn normalize_recomposes_and_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (n, m) = (rng.gen_range(3..6), rng.gen_range(3..6));
        let raw: Vec<Complex64> = (0..n + m - 3).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let norm = normalize(&raw, Surface::PuncturedPlane, n, m).unwrap();
        for (a, b) in norm.original_coeffs().iter().zip(&raw) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
        let again = normalize(&norm.qd.coeffs, Surface::PuncturedPlane, n, m).unwrap();
        assert_eq!(again.qd, norm.qd);
    }
    for _ in 0..200 {
        let d = rng.gen_range(2..7);
        let raw: Vec<Complex64> = (0..=d).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let norm = normalize(&raw, Surface::Plane, d + 4, 0).unwrap();
        for (a, b) in norm.original_coeffs().iter().zip(&raw) {
            assert!((a - b).norm() < 1e-11 * (1.0 + b.norm()), "{a} vs {b}");
        }
        let again = normalize(&norm.qd.coeffs, Surface::Plane, d + 4, 0).unwrap();
        assert_eq!(again.qd, norm.qd);
    }
}

#[test]
fn invalid_differentials_rejected() {
    assert_eq!(
        QuadDiff::punctured(3, 3, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        Err(QdError::ZeroAtPuncture)
    );
    assert!(QuadDiff::punctured(2, 3, vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    assert!(QuadDiff::punctured(3, 3, vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    assert!(QuadDiff::plane(vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn orders_sum_to_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let (n, m) = (rng.gen_range(3..7), rng.gen_range(3..7));
        let mut coeffs: Vec<Complex64> =
            (0..n + m - 3).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        coeffs[0] = c(1.0, 0.0);
        let q = QuadDiff::punctured(n, m, coeffs).unwrap();
        let total: usize = q.zeros().unwrap().iter().map(|z| z.order).sum();
        assert_eq!(total, n + m - 4);
    }
}

/// Parity oracle: continuing √q around a circle flips sign iff the enclosed
/// zeros and poles have odd total order.
#[test]
fn monodromy_matches_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = two_zero_example();
    let zeros = q.zeros().unwrap();
    let mut checked = 0;
    while checked < 200 {
        let centre = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let radius = rng.gen_range(0.1..3.0);
        let clearance = zeros
            .iter()
            .map(|z| ((z.location - centre).norm() - radius).abs())
            .chain([(centre.norm() - radius).abs()])
            .fold(f64::INFINITY, f64::min);
        if clearance < 0.05 {
            continue;
        }
        let mut parity = zeros.iter().filter(|z| (z.location - centre).norm() < radius).map(|z| z.order).sum::<usize>();
        if centre.norm() < radius {
            parity += q.m;
        }
        let path: Vec<Complex64> = (0..=4000).map(|i| centre + Complex64::from_polar(radius, 2.0 * PI * i as f64 / 4000.0)).collect();
        let seed = q.eval(path[0]).unwrap().sqrt();
        let w = sqrt_q_continue(&q, &path, seed).unwrap();
        let last = *w.last().unwrap();
        let expect = if parity % 2 == 1 { -seed } else { seed };
        assert!((last - expect).norm() < 1e-9 * seed.norm(), "parity {parity}");
        checked += 1;
    }
}

#[test]
fn pole_frames_are_swap_symmetric() {
    let q = two_zero_example();
    for pole in [Pole::Infinity, Pole::Zero] {
        for kind in [FoliationKind::Horizontal, FoliationKind::Vertical] {
            let a = q.frame_angle(pole, kind).unwrap();
            let b = q.oriented(kind).frame_angle(pole, FoliationKind::Horizontal).unwrap();
            assert_eq!(a, b);
        }
    }
    // standard frame: leading coefficient 1 at infinity
    let e = q.end_direction(Pole::Infinity, FoliationKind::Horizontal, 1).unwrap();
    assert!(e.abs() < 1e-15 || (e - 2.0 * PI).abs() < 1e-15);
    assert_eq!(q.classify_end(Pole::Infinity, FoliationKind::Horizontal, 0.01).unwrap().0, 1);
}
