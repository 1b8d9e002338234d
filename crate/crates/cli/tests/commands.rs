use std::path::Path;
use std::process::{Command, Output};

use foliation_extractor::FoliationDescriptor;

fn foliate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foliate")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_descriptor(p: &Path) -> FoliationDescriptor {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn analyze_writes_both_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = foliate(&["analyze", "--n", "3", "--m", "3", "--coeffs", "1,-i,i", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("horizontal: rays at infinity 1, rays at zero 1"), "{text}");
    assert!(text.contains("vertical: rays at infinity 1, rays at zero 1"), "{text}");
    let h = read_descriptor(&dir.path().join("horizontal.json"));
    let v = read_descriptor(&dir.path().join("vertical.json"));
    assert_eq!((h.n, h.m, v.n, v.m), (3, 3, 3, 3));
    // same input, same bytes
    let again = tempfile::tempdir().unwrap();
    foliate(&["analyze", "--n", "3", "--m", "3", "--coeffs", "1,-i,i", "--out", again.path().to_str().unwrap()]);
    for f in ["horizontal.json", "vertical.json"] {
        assert_eq!(std::fs::read(dir.path().join(f)).unwrap(), std::fs::read(again.path().join(f)).unwrap());
    }
}

#[test]
fn analyze_reports_measures_not_both_zero() {
    let o = foliate(&["analyze", "--n", "3", "--m", "3", "--coeffs", "1,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("tau_h")).unwrap().to_string();
    let nums: Vec<f64> = line.split_whitespace().filter_map(|w| w.parse().ok()).collect();
    assert_eq!(nums.len(), 2);
    assert!(nums[0].max(nums[1]) > 1e-8, "{line}");
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["analyze", "--n", "3", "--m", "3", "--coeffs", "1,1,0"][..],
        &["analyze", "--n", "3", "--m", "3", "--coeffs", "1,x"],
        &["analyze", "--n", "3", "--m", "3", "--coeffs", "2,1,1"],
        &["analyze", "--coeffs", "1,1,1"],
        &["analyze", "--n", "3", "--m", "3", "--coeffs", "1,1,1", "--tol", "-1"],
        &["render", "--surface", "plane", "--coeffs", "1,1", "--svg", "/tmp/never.svg"],
        &["chart", "--chart-dir", "to-graph", "--n", "3", "--m", "3", "--coords", "1,2,3"],
        &["chart", "--chart-dir", "to-graph", "--space", "tree", "--k", "5", "--coords", "1,nan"],
        &["chart", "--chart-dir", "sideways"],
    ] {
        let o = foliate(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn chart_schema_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, r#"{"n": 3}"#).unwrap();
    let o = foliate(&["chart", "--chart-dir", "to-coords", "--n", "3", "--m", "3", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn folded_coordinates_read_as_twist_and_tau() {
    let o = foliate(&["chart", "--chart-dir", "to-graph", "--space", "folded", "--n", "3", "--m", "3", "--coords", "2.3,1"]);
    assert_eq!(o.status.code(), Some(0));
    let fd: FoliationDescriptor = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(fd.tau, 1.0);
    assert_eq!(fd.twist_j, Some(2));
    assert!((fd.l0.unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn chart_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let coords = "0.4,-1.25,0.7,2";
    let o = foliate(&["chart", "--chart-dir", "to-graph", "--n", "4", "--m", "4", "--coords", coords, "--out", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = foliate(&["chart", "--chart-dir", "to-coords", "--n", "4", "--m", "4", "--input", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let back: Vec<f64> = serde_json::from_slice(&o.stdout).unwrap();
    let want = [0.4, -1.25, 0.7, 2.0];
    for (a, b) in back.iter().zip(want) {
        assert!((a - b).abs() < 1e-10);
    }
    for space in ["tree", "cycle"] {
        let g = dir.path().join(format!("{space}.json"));
        let o = foliate(&[
            "chart", "--chart-dir", "to-graph", "--space", space, "--k", "5", "--tau", "1.5", "--coords", "0.3,-0.8,1.9,0.1",
            "--out", g.to_str().unwrap(),
        ]);
        if space == "tree" {
            // T(5) has two coordinates
            assert_eq!(o.status.code(), Some(2));
            continue;
        }
        assert_eq!(o.status.code(), Some(0));
        let o = foliate(&["chart", "--chart-dir", "to-coords", "--space", space, "--input", g.to_str().unwrap()]);
        let back: Vec<f64> = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(back.len(), 4);
    }
}

#[test]
fn chart_batch_summary() {
    let o = foliate(&["chart", "--chart-dir", "to-graph", "--space", "pair", "--n", "3", "--m", "4", "--batch", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("pair") && text.contains("1000"), "{text}");
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let o = foliate(&["render", "--n", "3", "--m", "3", "--coeffs", "1,-i,i", "--kind", "both", "--seed", "5", "--svg", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("<?xml") && text.contains("version=\"1.1\""));
    for class in ["critical", "horizontal-leaf", "vertical-leaf", "zero", "pole-direction"] {
        assert!(text.contains(&format!("class=\"{class}")), "{class}");
    }
}

#[test]
fn render_flat_plane_has_parallel_lines_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.svg");
    let o = foliate(&["render", "--surface", "plane", "--coeffs", "1", "--svg", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(!text.contains("class=\"critical") && !text.contains("class=\"zero"));
    for line in text.lines().filter(|l| l.starts_with("<path")) {
        let d = line.split("d=\"").nth(1).unwrap();
        let ys: Vec<&str> = d.split(['M', 'L', '"']).filter_map(|p| p.trim().split(',').nth(1)).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]), "{line}");
    }
}

#[test]
fn render_z_dz2_has_three_prongs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("z.svg");
    let o = foliate(&["render", "--surface", "plane", "--coeffs", "1,0", "--svg", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text.matches("class=\"critical").count(), 3);
    assert_eq!(text.matches("class=\"pole-direction").count(), 3);
    assert_eq!(text.matches("class=\"zero\"").count(), 1);
}

#[test]
fn roundtrip_and_enumerate() {
    let o = foliate(&["roundtrip", "--n", "3", "--m", "3", "--coeffs", "1,-i,i"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pass"));
    let o = foliate(&["roundtrip", "--n", "3", "--m", "4", "--count", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("50/50"));
    let o = foliate(&["enumerate", "--k", "6", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k = 6: 14 trivalent types"));
    assert_eq!(text.lines().count(), 15);
}
