//! Polynomial evaluation and simultaneous root finding.

use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Horner evaluation, coefficients leading first.
pub fn horner(coeffs: &[C], z: C) -> C {
    coeffs.iter().fold(C::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and derivative.
pub fn horner_d(coeffs: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &a in coeffs {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Sum of |a_i| |z|^(d-i), the natural scale for residuals at z.
pub fn magnitude_bound(coeffs: &[C], z: C) -> f64 {
    let r = z.norm();
    coeffs.iter().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Aberth-Ehrlich iteration.  Returns all roots with repetition, or `None`
/// when the iteration does not settle within `max_iter` sweeps.
pub fn aberth(coeffs: &[C], max_iter: usize) -> Option<Vec<C>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[0];
    let monic: Vec<C> = coeffs.iter().map(|a| a / lead).collect();
    // Fujiwara-type radius for the starting circle
    let radius = monic[1..]
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm().powf(1.0 / (i + 1) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let centre = -monic[1] / d as f64;
    let mut z: Vec<C> = (0..d)
        .map(|i| centre + C::from_polar(radius, 2.0 * PI * i as f64 / d as f64 + 0.4))
        .collect();
    let mut settled = vec![false; d];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if settled[i] {
                continue;
            }
            let (p, dp) = horner_d(&monic, z[i]);
            if p.norm() == 0.0 {
                settled[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: C = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (C::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                settled[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Some(z);
        }
    }
    // multiple roots converge linearly; accept if residuals are tiny anyway
    let ok = z.iter().all(|&r| horner(&monic, r).norm() <= 1e-10 * magnitude_bound(&monic, r));
    ok.then_some(z)
}

/// Group roots closer than `radius` (relative to their size) and return
/// (centroid, multiplicity) pairs.
pub fn cluster(roots: &[C], radius: f64) -> Vec<(C, usize)> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + roots[i].norm().max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, C, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((r, roots[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, k)| (s / k as f64, k)).collect()
}

/// Coefficients of the j-th derivative.
pub fn derivative(coeffs: &[C], j: usize) -> Vec<C> {
    let mut c = coeffs.to_vec();
    for _ in 0..j {
        let d = c.len().saturating_sub(1);
        if d == 0 {
            return vec![C::new(0.0, 0.0)];
        }
        c = c[..d].iter().enumerate().map(|(i, a)| a * (d - i) as f64).collect();
    }
    c
}

/// Polish a root of multiplicity k as a simple root of p^(k-1).
pub fn polish_multiple(coeffs: &[C], z: C, k: usize) -> C {
    if k <= 1 {
        return polish(coeffs, z);
    }
    polish(&derivative(coeffs, k - 1), z)
}

/// Newton polish for a simple root.
pub fn polish(coeffs: &[C], mut z: C) -> C {
    for _ in 0..4 {
        let (p, dp) = horner_d(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn horner_matches_direct() {
        let p = [c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)];
        let z = c(0.3, -0.7);
        let direct = z * z - c(0.0, 1.0) * z + c(0.0, 1.0);
        assert!((horner(&p, z) - direct).norm() < 1e-15);
        let (_, dp) = horner_d(&p, z);
        assert!((dp - (2.0 * z - c(0.0, 1.0))).norm() < 1e-15);
    }

    #[test]
    fn aberth_finds_unit_roots() {
        let mut p = vec![c(0.0, 0.0); 8];
        p[0] = c(1.0, 0.0);
        p[7] = c(-1.0, 0.0);
        let roots = aberth(&p, 500).unwrap();
        assert_eq!(roots.len(), 7);
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-13);
            assert!(horner(&p, r).norm() < 1e-13);
        }
    }

    #[test]
    fn cluster_merges_double_root() {
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let roots = aberth(&p, 1000).unwrap();
        let groups: Vec<(C, usize)> =
            cluster(&roots, 1e-8).into_iter().map(|(z, k)| (polish_multiple(&p, z, k), k)).collect();
        assert_eq!(groups.len(), 2);
        for (z, k) in groups {
            assert_eq!(k, 2);
            assert!((z.norm() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14);
        }
    }
}
