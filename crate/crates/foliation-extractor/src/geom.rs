//! Polyline utilities: unrolled argument and first-crossing search.

use qd_core::Complex64 as C;

/// Change of a continuous arg z along a polyline.
pub fn unrolled_turn(points: &[C]) -> f64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[0].norm() == 0.0 || w[1].norm() == 0.0 {
            continue;
        }
        total += (w[1] / w[0]).arg();
    }
    total
}

fn cross(a: C, b: C) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Intersection parameters (s, u) of segments p0p1 and q0q1, if any.
pub fn segment_hit(p0: C, p1: C, q0: C, q1: C) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let d = q1 - q0;
    let den = cross(r, d);
    if den == 0.0 {
        return None;
    }
    let w = q0 - p0;
    let s = cross(w, d) / den;
    let u = cross(w, r) / den;
    ((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u)).then_some((s, u))
}

#[derive(Clone, Copy, Debug)]
struct Bbox {
    lo: C,
    hi: C,
}

impl Bbox {
    fn of(a: C, b: C) -> Bbox {
        Bbox { lo: C::new(a.re.min(b.re), a.im.min(b.im)), hi: C::new(a.re.max(b.re), a.im.max(b.im)) }
    }
    fn grow(&mut self, p: C) {
        self.lo = C::new(self.lo.re.min(p.re), self.lo.im.min(p.im));
        self.hi = C::new(self.hi.re.max(p.re), self.hi.im.max(p.im));
    }
    fn meets(&self, o: &Bbox) -> bool {
        self.lo.re <= o.hi.re && o.lo.re <= self.hi.re && self.lo.im <= o.hi.im && o.lo.im <= self.hi.im
    }
}

const CHUNK: usize = 8;

/// Chunked bounding boxes over a family of polylines.
pub struct PolylineIndex<'a> {
    lines: Vec<&'a [C]>,
    chunks: Vec<(usize, usize, Bbox)>,
}

/// A crossing of a query polyline with an indexed one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// segment of the query and parameter on it
    pub seg: usize,
    pub s: f64,
    /// indexed polyline, its segment and parameter
    pub line: usize,
    pub line_seg: usize,
    pub u: f64,
    pub point: C,
}

impl<'a> PolylineIndex<'a> {
    pub fn new(lines: Vec<&'a [C]>) -> Self {
        let mut chunks = Vec::new();
        for (l, pts) in lines.iter().enumerate() {
            let mut start = 0;
            while start + 1 < pts.len() {
                let end = (start + CHUNK).min(pts.len() - 1);
                let mut b = Bbox::of(pts[start], pts[start + 1]);
                for p in &pts[start + 1..=end] {
                    b.grow(*p);
                }
                chunks.push((l, start, b));
                start = end;
            }
        }
        PolylineIndex { lines, chunks }
    }

    /// First crossing along `query`, skipping crossings rejected by `skip`.
    pub fn first_crossing(&self, query: &[C], skip: impl Fn(&Crossing) -> bool) -> Option<Crossing> {
        for (seg, w) in query.windows(2).enumerate() {
            let sb = Bbox::of(w[0], w[1]);
            let mut best: Option<Crossing> = None;
            for &(l, start, ref b) in &self.chunks {
                if !b.meets(&sb) {
                    continue;
                }
                let pts = self.lines[l];
                let end = (start + CHUNK).min(pts.len() - 1);
                for k in start..end {
                    if let Some((s, u)) = segment_hit(w[0], w[1], pts[k], pts[k + 1]) {
                        let c = Crossing { seg, s, line: l, line_seg: k, u, point: w[0] + (w[1] - w[0]) * s };
                        if skip(&c) {
                            continue;
                        }
                        if best.map_or(true, |b| c.s < b.s) {
                            best = Some(c);
                        }
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turn_around_origin() {
        let pts: Vec<C> = (0..=64).map(|k| C::from_polar(2.0, k as f64 * std::f64::consts::TAU / 64.0)).collect();
        assert!((unrolled_turn(&pts) - std::f64::consts::TAU).abs() < 1e-12);
        let back: Vec<C> = pts.iter().rev().copied().collect();
        assert!((unrolled_turn(&back) + std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn crossing_found_in_order() {
        let a = [C::new(0.0, 0.0), C::new(10.0, 0.0)];
        let v1: Vec<C> = (0..20).map(|k| C::new(7.0, -1.0 + 0.1 * k as f64)).collect();
        let v2 = [C::new(3.0, -1.0), C::new(3.0, 1.0)];
        let idx = PolylineIndex::new(vec![&v1, &v2]);
        let c = idx.first_crossing(&a, |_| false).unwrap();
        assert_eq!(c.line, 1);
        assert!((c.point - C::new(3.0, 0.0)).norm() < 1e-12);
        let c = idx.first_crossing(&a, |c| c.line == 1).unwrap();
        assert_eq!(c.line, 0);
        assert!(c.line_seg == 9 || c.line_seg == 10);
    }

    #[test]
    fn parallel_segments_miss() {
        assert!(segment_hit(C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(1.0, 1.0)).is_none());
    }
}
