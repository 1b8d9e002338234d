use std::io::Write;
use std::path::Path;

use foliation_extractor::{extract_pair, ExtractConfig, Extraction, FoliationDescriptor, RegionRec};
use foliation_space::{coords_to_fnm, coords_to_pair, fnm_chart, pair_chart, project_pi};
use graph_moduli::{coords_to_cycle, coords_to_tree, cycle_chart, enumerate_types, tree_chart, CycleGraph, LabelledTree};
use qd_core::{Complex64 as C, FoliationKind, Pole};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use singular_flat_builder::{build_from_pair, extract_leaf_spaces, verify_roundtrip};

use crate::input::{differential, parse_coeffs};
use crate::render::{render_svg, RenderOptions};
use crate::{ChartDir, ChartSpace, CliError, Command, DiffArgs, KindArg, RunConfig};

/// Chart round trips must agree to this, relative to the coordinate size.
pub const CHART_TOLERANCE: f64 = 1e-10;
/// Default discrepancy accepted by `roundtrip` on a differential.
pub const NUMERIC_TOLERANCE: f64 = 1e-4;
/// Default discrepancy accepted by `roundtrip` on random pairs.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorPair {
    pub horizontal: FoliationDescriptor,
    pub vertical: FoliationDescriptor,
}

/// Write next to the target and rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn extract_config(tol: Option<f64>) -> ExtractConfig {
    let mut cfg = ExtractConfig::default();
    if let Some(t) = tol {
        cfg.trace.rtol = t;
        cfg.trace.atol = t;
    }
    cfg
}

fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Input(format!("'{s}' is not a finite number")))
        })
        .collect()
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("{flag} is required here")))
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.command {
        Command::Analyze { diff, out: dir } => analyze(diff, dir.as_deref(), cfg.tol, out),
        Command::Render { diff, kind, svg, grid } => {
            let q = differential(diff.surface, diff.n, diff.m, &parse_coeffs(&diff.coeffs)?)?;
            let kinds = match kind {
                KindArg::H => vec![FoliationKind::Horizontal],
                KindArg::V => vec![FoliationKind::Vertical],
                KindArg::Both => vec![FoliationKind::Horizontal, FoliationKind::Vertical],
            };
            let (text, stats) = render_svg(&q, &RenderOptions { kinds, seed: cfg.seed, grid: *grid })?;
            write_atomic(svg, text.as_bytes())?;
            writeln!(
                out,
                "wrote {}: {} critical paths, {} leaf paths, {} zeros, {} pole directions",
                svg.display(),
                stats.critical,
                stats.leaves,
                stats.zeros,
                stats.pole_marks
            )?;
            Ok(())
        }
        Command::Chart { chart_dir, space, input, coords, n, m, k, tau, batch, out: path } => {
            let shape = Shape { space: *space, n: *n, m: *m, k: *k, tau: *tau };
            if let Some(count) = batch {
                return chart_batch(&shape, *count, cfg.seed, out);
            }
            let text = match chart_dir {
                ChartDir::ToCoords => {
                    let file = need(input.as_ref(), "--input")?;
                    let raw = std::fs::read_to_string(file)?;
                    to_json(&shape.to_coords(&raw)?)
                }
                ChartDir::ToGraph => {
                    let c = parse_vector(need(coords.as_deref(), "--coords")?)?;
                    shape.to_graph(&c)?
                }
            };
            emit(out, path.as_deref(), &text)
        }
        Command::Roundtrip { coeffs, surface, n, m, count, accept } => match coeffs {
            Some(text) => {
                let q = differential(*surface, *n, *m, &parse_coeffs(text)?)?;
                let tol = accept.unwrap_or(NUMERIC_TOLERANCE);
                let r = verify_roundtrip(&q, &extract_config(cfg.tol), tol).map_err(|e| CliError::Extraction(e.to_string()))?;
                writeln!(
                    out,
                    "horizontal {:.3e}  vertical {:.3e}  pieces {}  tolerance {:.1e}  {}",
                    r.horizontal_error,
                    r.vertical_error,
                    r.pieces,
                    tol,
                    if r.passed { "pass" } else { "FAIL" }
                )?;
                if r.passed {
                    Ok(())
                } else {
                    Err(CliError::Check(format!("discrepancy {:.3e} above {tol:.1e}", r.max_error)))
                }
            }
            None => random_build_roundtrips(need(*n, "--n")?, need(*m, "--m")?, *count, accept.unwrap_or(EXACT_TOLERANCE), cfg.seed, out),
        },
        Command::Enumerate { k, list } => {
            let types = enumerate_types(*k);
            writeln!(out, "k = {k}: {} trivalent types", types.len())?;
            if *list {
                for t in &types {
                    writeln!(out, "{}", t.shape())?;
                }
            }
            Ok(())
        }
    }
}

/// Region counts and transverse data of one foliation.
pub fn summary_line(name: &str, ex: &Extraction) -> String {
    let fd = ex.descriptor();
    let rays = |p: Pole| fd.graph.rays_at(p).len();
    let regions = &ex.assembly.regions;
    let halves = regions.iter().filter(|r| matches!(r, RegionRec::HalfPlane { .. })).count();
    let strips = regions.iter().filter(|r| matches!(r, RegionRec::Strip { .. })).count();
    let rings = regions.iter().filter(|r| matches!(r, RegionRec::RingDomain { .. })).count();
    let mut s = format!(
        "{name}: rays at infinity {}, rays at zero {}, half-planes {halves}, strips {strips}, ring domains {rings}, tau {:.10}",
        rays(Pole::Infinity),
        rays(Pole::Zero),
        fd.tau
    );
    if let (Some(j), Some(l0)) = (fd.twist_j, fd.l0) {
        s += &format!(", twist j {j}, l0 {l0:.10}");
    }
    if let Some(h) = fd.ring_height {
        s += &format!(", ring height {h:.10}");
    }
    s
}

fn analyze(diff: &DiffArgs, dir: Option<&Path>, tol: Option<f64>, out: &mut dyn Write) -> Result<(), CliError> {
    let q = differential(diff.surface, diff.n, diff.m, &parse_coeffs(&diff.coeffs)?)?;
    let (h, v) = extract_pair(&q, &extract_config(tol))?;
    if let Some(dir) = dir {
        write_atomic(&dir.join("horizontal.json"), to_json(h.descriptor()).as_bytes())?;
        write_atomic(&dir.join("vertical.json"), to_json(v.descriptor()).as_bytes())?;
    }
    writeln!(out, "zeros {}", q.zeros()?.len())?;
    writeln!(out, "{}", summary_line("horizontal", &h))?;
    writeln!(out, "{}", summary_line("vertical", &v))?;
    writeln!(out, "tau_h {:.10}  tau_v {:.10}", h.descriptor().tau, v.descriptor().tau)?;
    Ok(())
}

/// Which chart, and the sizes it needs.
pub struct Shape {
    pub space: ChartSpace,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub tau: Option<f64>,
}

impl Shape {
    pub fn dimension(&self) -> Result<usize, CliError> {
        Ok(match self.space {
            ChartSpace::Fnm | ChartSpace::Folded => foliation_space::fnm_dimension(need(self.n, "--n")?, need(self.m, "--m")?),
            ChartSpace::Pair => foliation_space::pair_dimension(need(self.n, "--n")?, need(self.m, "--m")?),
            ChartSpace::Tree => need(self.k, "--k")?.saturating_sub(3),
            ChartSpace::Cycle => need(self.k, "--k")?.saturating_sub(1),
        })
    }

    pub fn to_coords(&self, raw: &str) -> Result<Vec<f64>, CliError> {
        Ok(match self.space {
            ChartSpace::Fnm => fnm_chart(&serde_json::from_str(raw)?)?,
            ChartSpace::Folded => {
                let fd: FoliationDescriptor = serde_json::from_str(raw)?;
                let base = project_pi(&fd);
                let mut c = vec![base.x, base.y];
                c.extend_from_slice(&fnm_chart(&fd)?[2..]);
                c
            }
            ChartSpace::Pair => {
                let p: DescriptorPair = serde_json::from_str(raw)?;
                pair_chart(&p.horizontal, &p.vertical)?
            }
            ChartSpace::Tree => tree_chart(&serde_json::from_str::<LabelledTree>(raw)?)?,
            ChartSpace::Cycle => cycle_chart(&serde_json::from_str::<CycleGraph>(raw)?)?,
        })
    }

    pub fn to_graph(&self, c: &[f64]) -> Result<String, CliError> {
        Ok(match self.space {
            ChartSpace::Fnm => to_json(&coords_to_fnm(need(self.n, "--n")?, need(self.m, "--m")?, c)?),
            ChartSpace::Folded => {
                if c.len() < 2 || c[1] < 0.0 {
                    return Err(CliError::Input("folded coordinates start with (x, y), y >= 0".into()));
                }
                let w = C::new(c[0], c[1]);
                let w2 = w * w;
                let mut fc = vec![w2.re, w2.im];
                fc.extend_from_slice(&c[2..]);
                to_json(&coords_to_fnm(need(self.n, "--n")?, need(self.m, "--m")?, &fc)?)
            }
            ChartSpace::Pair => {
                let (horizontal, vertical) = coords_to_pair(need(self.n, "--n")?, need(self.m, "--m")?, c)?;
                to_json(&DescriptorPair { horizontal, vertical })
            }
            ChartSpace::Tree => to_json(&coords_to_tree(need(self.k, "--k")?, c)?),
            ChartSpace::Cycle => {
                let tau = need(self.tau, "--tau")?;
                if !(tau >= 0.0) {
                    return Err(CliError::Input("--tau must be >= 0".into()));
                }
                to_json(&coords_to_cycle(need(self.k, "--k")?, tau, c)?)
            }
        })
    }
}

/// Worst relative error of graph → coords over random coordinate vectors.
pub fn chart_round_trips(shape: &Shape, count: usize, seed: u64) -> Result<(usize, f64), CliError> {
    let dim = shape.dimension()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let mut c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if shape.space == ChartSpace::Folded {
            c[1] = c[1].abs();
        }
        let back = shape.to_coords(&shape.to_graph(&c)?)?;
        let scale = c.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let err = c.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        if back.len() == c.len() && err <= CHART_TOLERANCE {
            passed += 1;
        }
    }
    Ok((passed, worst))
}

fn chart_batch(shape: &Shape, count: usize, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let (passed, worst) = chart_round_trips(shape, count, seed)?;
    writeln!(out, "{:<8} {:>5} {:>7} {:>7} {:>12}", "space", "dim", "count", "passed", "max error")?;
    writeln!(
        out,
        "{:<8} {:>5} {:>7} {:>7} {:>12.3e}",
        format!("{:?}", shape.space).to_lowercase(),
        shape.dimension()?,
        count,
        passed,
        worst
    )?;
    if passed == count {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} of {count} chart round trips failed", count - passed)))
    }
}

/// Build from random pairs and extract again; returns (checked, passed, worst).
pub fn build_round_trips(n: usize, m: usize, count: usize, tol: f64, seed: u64) -> Result<(usize, usize, f64), CliError> {
    let dim = foliation_space::pair_dimension(n, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut passed, mut worst) = (0, 0, 0.0f64);
    for _ in 0..count {
        let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let (gh, gv) = coords_to_pair(n, m, &c)?;
        checked += 1;
        let err = build_from_pair(&gh, &gv)
            .and_then(|sc| extract_leaf_spaces(&sc))
            .and_then(|back| {
                let eh = foliation_space::descriptor_distance(&gh, &back.horizontal)?;
                let ev = foliation_space::descriptor_distance(&gv, &back.vertical)?;
                Ok(eh.max(ev))
            })
            .unwrap_or(f64::INFINITY);
        worst = worst.max(err);
        if err <= tol {
            passed += 1;
        }
    }
    Ok((checked, passed, worst))
}

fn random_build_roundtrips(n: usize, m: usize, count: usize, tol: f64, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let (checked, passed, worst) = build_round_trips(n, m, count, tol, seed)?;
    writeln!(out, "({n},{m}): {passed}/{checked} round trips within {tol:.1e}, worst {worst:.3e}")?;
    if passed == checked {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} round trips failed", checked - passed)))
    }
}
