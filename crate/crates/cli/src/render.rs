//! SVG pictures of the critical graph and sampled leaves.

use std::fmt::Write as _;

use foliation_extractor::{build_critical_graph, ExtractConfig};
use qd_core::{Complex64 as C, FoliationKind, Pole, QuadDiff, Surface};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajectory_tracer::{TraceConfig, Tracer, Trajectory};

use crate::CliError;

const SIZE: f64 = 800.0;

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub kinds: Vec<FoliationKind>,
    pub seed: u64,
    /// Launch points per side of the sampling grid.
    pub grid: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { kinds: vec![FoliationKind::Horizontal], seed: 0, grid: 9 }
    }
}

/// Element counts, handy for regression checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenderStats {
    pub critical: usize,
    pub leaves: usize,
    pub zeros: usize,
    pub pole_marks: usize,
}

struct View {
    radius: f64,
}

impl View {
    fn px(&self, z: C) -> (f64, f64) {
        let s = SIZE / (2.0 * self.radius);
        (SIZE / 2.0 + z.re * s, SIZE / 2.0 - z.im * s)
    }

    /// Part of the segment a→b inside the frame (Liang-Barsky), with flags
    /// telling whether each end was cut.
    fn clip(&self, a: C, b: C) -> Option<(C, C, bool, bool)> {
        let r = self.radius;
        let d = b - a;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (p, q) in [(-d.re, a.re + r), (d.re, r - a.re), (-d.im, a.im + r), (d.im, r - a.im)] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        (lo <= hi).then(|| {
            let p = if lo > 0.0 { a + d * lo } else { a };
            let q = if hi < 1.0 { a + d * hi } else { b };
            (p, q, lo > 0.0, hi < 1.0)
        })
    }

    /// Pieces of the polyline inside the frame, as path data.
    fn path(&self, pts: &[C]) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut count = 0;
        let mut last: Option<(f64, f64)> = None;
        let push = |z: C, cur: &mut String, count: &mut usize, last: &mut Option<(f64, f64)>| {
            let (x, y) = self.px(z);
            // drop points closer than a tenth of a pixel
            if last.is_some_and(|(a, b)| (a - x).hypot(b - y) < 0.1) {
                return;
            }
            let _ = write!(cur, "{}{x:.2},{y:.2}", if *count == 0 { "M" } else { " L" });
            *count += 1;
            *last = Some((x, y));
        };
        for w in pts.windows(2) {
            if !(w[0].is_finite() && w[1].is_finite()) {
                continue;
            }
            match self.clip(w[0], w[1]) {
                Some((p, q, cut_in, cut_out)) => {
                    if cut_in && count > 0 {
                        // re-entering
                        if count > 1 {
                            out.push(std::mem::take(&mut cur));
                        }
                        cur.clear();
                        count = 0;
                        last = None;
                    }
                    push(p, &mut cur, &mut count, &mut last);
                    push(q, &mut cur, &mut count, &mut last);
                    if cut_out {
                        if count > 1 {
                            out.push(std::mem::take(&mut cur));
                        }
                        cur.clear();
                        count = 0;
                        last = None;
                    }
                }
                None => {
                    if count > 1 {
                        out.push(std::mem::take(&mut cur));
                    }
                    cur.clear();
                    count = 0;
                    last = None;
                }
            }
        }
        if count > 1 {
            out.push(cur);
        }
        out
    }
}

fn kind_class(kind: FoliationKind) -> &'static str {
    match kind {
        FoliationKind::Horizontal => "horizontal-leaf",
        FoliationKind::Vertical => "vertical-leaf",
    }
}

fn sample_leaves(q: &QuadDiff, kind: FoliationKind, view: &View, opts: &RenderOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Trajectory>, CliError> {
    let cfg = TraceConfig { rtol: 1e-7, atol: 1e-7, max_steps: 4000, ..TraceConfig::default() };
    let oriented = q.oriented(kind);
    let tracer = Tracer::new(&oriented, cfg).map_err(|e| CliError::Extraction(e.to_string()))?;
    let zeros: Vec<C> = tracer.zeros().iter().map(|z| z.location).collect();
    let g = opts.grid.max(1);
    let cell = 2.0 * view.radius / g as f64;
    let mut out = Vec::new();
    for a in 0..g {
        for b in 0..g {
            let jitter = C::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            let z = C::new(-view.radius + (a as f64 + 0.5) * cell, -view.radius + (b as f64 + 0.5) * cell) + jitter * cell;
            let near_zero = zeros.iter().any(|w| (w - z).norm() < 0.05 * cell);
            if near_zero || (q.surface == Surface::PuncturedPlane && z.norm() < 0.05 * cell) {
                continue;
            }
            let w = oriented.eval(z)?.sqrt();
            // a leaf that cannot be traced is left out of the picture
            if let Ok(t) = tracer.trace(z, w, FoliationKind::Horizontal, 1.0) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Render the requested foliations of `q` to an SVG document.
pub fn render_svg(q: &QuadDiff, opts: &RenderOptions) -> Result<(String, RenderStats), CliError> {
    let cfg = ExtractConfig::default();
    let zeros = q.zeros()?;
    let reach = zeros.iter().map(|z| z.location.norm()).fold(0.0, f64::max);
    let view = View { radius: if reach > 0.0 { 1.6 * reach } else { 2.0 } };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = RenderStats::default();
    let mut body = String::new();

    for &kind in &opts.kinds {
        let class = kind_class(kind);
        for t in sample_leaves(q, kind, &view, opts, &mut rng)? {
            for d in view.path(&t.points) {
                let _ = writeln!(body, r#"<path class="{class}" d="{d}"/>"#);
                stats.leaves += 1;
            }
        }
    }
    for &kind in &opts.kinds {
        let traced = build_critical_graph(q, kind, &cfg)?;
        for t in traced.critical.iter().flatten() {
            for d in view.path(&t.points) {
                let _ = writeln!(body, r#"<path class="critical {}" d="{d}"/>"#, kind_class(kind));
                stats.critical += 1;
            }
        }
    }
    for &kind in &opts.kinds {
        for pole in q.poles() {
            let order = q.pole_order(pole).unwrap_or(0);
            for j in 0..order.saturating_sub(2) {
                let Some(a) = q.end_direction(pole, kind, j) else { continue };
                let dir = C::from_polar(1.0, a);
                let (p0, p1) = match pole {
                    Pole::Infinity => (dir * 0.9 * view.radius, dir * view.radius),
                    Pole::Zero => (dir * 0.04 * view.radius, dir * 0.1 * view.radius),
                };
                let ((x0, y0), (x1, y1)) = (view.px(p0), view.px(p1));
                let _ = writeln!(
                    body,
                    r#"<line class="pole-direction {}" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#,
                    kind_class(kind)
                );
                stats.pole_marks += 1;
            }
        }
    }
    if q.surface == Surface::PuncturedPlane {
        let (x, y) = view.px(C::new(0.0, 0.0));
        let _ = writeln!(body, r#"<circle class="pole" cx="{x:.2}" cy="{y:.2}" r="4"/>"#);
    }
    for z in &zeros {
        let (x, y) = view.px(z.location);
        let _ = writeln!(body, r#"<circle class="zero" cx="{x:.2}" cy="{y:.2}" r="4"/>"#);
        stats.zeros += 1;
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    svg.push_str(
        "<style>\n\
         path { fill: none; }\n\
         .horizontal-leaf { stroke: #3a6ea5; stroke-width: 0.8; }\n\
         .vertical-leaf { stroke: #c0504d; stroke-width: 0.8; }\n\
         .critical { stroke: #111; stroke-width: 2; }\n\
         .pole-direction { stroke: #2a2; stroke-width: 3; }\n\
         .zero { fill: #000; }\n\
         .pole { fill: #fff; stroke: #000; stroke-width: 2; }\n\
         </style>\n",
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    svg.push_str(&body);
    svg.push_str("</svg>\n");
    Ok((svg, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_keeps_inside_and_cuts_crossings() {
        let v = View { radius: 1.0 };
        let (p, q, a, b) = v.clip(C::new(-0.5, 0.0), C::new(0.5, 0.0)).unwrap();
        assert_eq!((p, q, a, b), (C::new(-0.5, 0.0), C::new(0.5, 0.0), false, false));
        let (p, q, a, b) = v.clip(C::new(-3.0, 0.5), C::new(3.0, 0.5)).unwrap();
        assert!(a && b && (p.re + 1.0).abs() < 1e-15 && (q.re - 1.0).abs() < 1e-15);
        assert!(v.clip(C::new(2.0, 2.0), C::new(3.0, -5.0)).is_none());
        // a polyline leaving and coming back is two pieces
        let pts = [C::new(0.0, 0.0), C::new(5.0, 0.0), C::new(5.0, 0.5), C::new(0.0, 0.5)];
        assert_eq!(v.path(&pts).len(), 2);
    }
}
