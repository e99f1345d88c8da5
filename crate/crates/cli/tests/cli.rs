use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const CS: &str = r#"{"alpha1":-0.103,"alpha2":-0.5,"beta":0.05,"delta":0.25,"kappa1":1}"#;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cox-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn cox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cox")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn potential_grid_has_header_and_rows() {
    let d = scratch("pot");
    let cfg = write(&d, "cs.json", CS);
    let o = cox(&["potential", "--config", s(&cfg), "--out", s(&d)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.join("potential.csv")).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,v11,v12,v22");
    assert_eq!(lines.len(), 1001);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    let m = json(d.join("manifest.json"));
    assert_eq!(m["subcommand"], "potential");
    assert_eq!(m["outputs"][0], "potential.csv");
}

#[test]
fn zero_potential_has_zero_columns() {
    // U0 = K gives X0 = 0
    let d = scratch("zero");
    let o = cox(&[
        "potential",
        "--alpha1",
        "1",
        "--alpha2",
        "2",
        "--beta",
        "0",
        "--delta",
        "3",
        "--kappa1",
        "1",
        "--n",
        "50",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(d.join("potential.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert!(v.iter().all(|x| *x == 0.0), "{line}");
    }
}

#[test]
fn irregular_potential_exits_2_with_location() {
    let d = scratch("irr");
    let o = cox(&[
        "potential",
        "--alpha1",
        "-0.103",
        "--alpha2",
        "-0.5",
        "--beta",
        "0.05",
        "--delta",
        "0.25",
        "--kappa1",
        "0.05",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular potential near r ="));
}

fn spectrum_counts(d: &Path, params: &[&str]) -> (u64, u64) {
    let mut args = vec!["spectrum", "--out", s(d)];
    args.extend_from_slice(params);
    let o = cox(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(d.join("spectrum.json"));
    (v["n_b"].as_u64().unwrap(), v["n_r"].as_u64().unwrap())
}

#[test]
fn spectrum_counts_for_inverted_parameter_sets() {
    let d = scratch("spec");
    let one_resonance = [
        "--alpha1",
        "0.7693799343676557",
        "--alpha2",
        "-0.7668526692056796",
        "--beta",
        "0.1",
        "--delta",
        "1",
        "--kappa1",
        "1",
    ];
    assert_eq!(spectrum_counts(&d, &one_resonance), (0, 1));
    let two_bound = [
        "--alpha1",
        "-0.11264893976878576",
        "--alpha2",
        "-1.7955676567914434",
        "--beta",
        "0.1",
        "--delta",
        "1",
        "--kappa1",
        "1.51",
    ];
    assert_eq!(spectrum_counts(&d, &two_bound), (2, 0));
    let uncoupled = [
        "--alpha1", "-0.3", "--alpha2", "0.4", "--beta", "0", "--delta", "1", "--kappa1", "1",
    ];
    assert_eq!(spectrum_counts(&d, &uncoupled), (1, 0));
    let zeros = std::fs::read_to_string(d.join("zeros.csv")).unwrap();
    assert!(zeros.starts_with("re_k,im_k,re_p,im_p,kind,residual\n"));
}

#[test]
fn invert_resonance_and_bound2() {
    let d = scratch("inv");
    let o = cox(&[
        "invert",
        "resonance",
        "--delta",
        "1",
        "--er",
        "0.4",
        "--ei",
        "0.01",
        "--beta",
        "0.1",
        "--kappa1",
        "1",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(d.join("inversion.json"));
    assert!((v["params"]["alpha1"].as_f64().unwrap() - 0.76938).abs() < 5e-6);
    assert!((v["params"]["alpha2"].as_f64().unwrap() + 0.766853).abs() < 5e-6);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 4);

    let o = cox(&[
        "invert",
        "bound2",
        "--l1",
        "0.1",
        "--l2",
        "1.5",
        "--beta",
        "0.1",
        "--delta",
        "1",
        "--branch",
        "upper",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(d.join("inversion.json"));
    assert!((v["params"]["alpha1"].as_f64().unwrap() + 0.112649).abs() < 1e-6);
    assert!((v["params"]["alpha2"].as_f64().unwrap() + 1.79557).abs() < 1e-5);
    assert_eq!(v["params"]["kappa1"].as_f64().unwrap(), 1.51);
}

#[test]
fn invert_restriction_exits_3() {
    let d = scratch("inv3");
    let o = cox(&[
        "invert",
        "bound2",
        "--l1",
        "0.1",
        "--l2",
        "1.5",
        "--beta",
        "0.1",
        "--delta",
        "1",
        "--branch",
        "upper",
        "--kappa1",
        "1.0",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa1 > lambda2 > lambda1"));
    let o = cox(&[
        "invert",
        "resonance",
        "--delta",
        "1",
        "--er",
        "0.4",
        "--ei",
        "0.01",
        "--beta",
        "0.001",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn observables_csv() {
    let d = scratch("obs");
    let cfg = write(&d, "cs.json", CS);
    let o = cox(&["observables", "--config", s(&cfg), "--n", "7", "--out", s(&d)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(d.join("observables.csv")).unwrap();
    assert!(text.starts_with("E,k,re_S,im_S,delta_rad,sigma\n"));
    assert_eq!(text.lines().count(), 8);
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2].hypot(v[3]) - 1.0).abs() < 1e-12);
    }
}

const RB_FIT: &str = r#"{"a_bg": -443.0, "b0": 15.5041, "gamma_b": 1.071, "alpha1": 0.0022,
 "field": {"delta0": 2471.386, "mu_mag": -36.4, "units": "mhz"}, "window": [10, 30]}"#;

#[test]
fn feshbach_fit_then_scan_truncates_at_regularity_limit() {
    let d = scratch("rb");
    let cfg = write(&d, "rb.json", RB_FIT);
    let o = cox(&["feshbach", "fit", "--config", s(&cfg), "--out", s(&d)]);
    assert_eq!(code(&o), 0);
    let fit = json(d.join("fit.json"));
    assert!((fit["params"]["alpha2"].as_f64().unwrap() + 0.239343).abs() < 1e-3);
    assert!((fit["params"]["kappa1"].as_f64().unwrap() - 0.0866).abs() < 1e-4);
    assert!((fit["model_a_bg"].as_f64().unwrap() + 443.0).abs() < 1e-6);

    let scan_dir = d.join("scan");
    let o = cox(&[
        "feshbach",
        "scan",
        "--config",
        s(&d.join("scenario.json")),
        "--out",
        s(&scan_dir),
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trajectory truncated"));
    let ev = json(scan_dir.join("events.json"));
    assert!(ev["truncated_at"].as_f64().unwrap() < 30.0);
}

#[test]
fn feshbach_infeasible_fit_exits_3() {
    let d = scratch("rb3");
    let cfg = write(&d, "rb.json", RB_FIT);
    let o = cox(&[
        "feshbach",
        "fit",
        "--config",
        s(&cfg),
        "--alpha1",
        "-0.5",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn cs_scan_reports_three_events() {
    let d = scratch("cs");
    let cfg = write(
        &d,
        "cs.json",
        r#"{"params": {"alpha1":-0.103,"alpha2":-0.5,"beta":0.05,"delta":0.35,"kappa1":1},
            "field": {"delta0": 0.35, "mu_mag": -1.0, "b0": 0.0, "units": "reduced"},
            "window": [0, 0.3], "steps": 2000}"#,
    );
    let o = cox(&["feshbach", "scan", "--config", s(&cfg), "--out", s(&d)]);
    assert_eq!(code(&o), 0);
    let ev = json(d.join("events.json"));
    let kinds: Vec<&str> = ev["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["resonance_er_zero", "pole_collision", "threshold_crossing"]);
    let traj = std::fs::read_to_string(d.join("trajectory.csv")).unwrap();
    assert!(
        traj.starts_with("B,re_E_1,im_E_1,re_E_2,im_E_2,re_E_3,im_E_3,re_E_4,im_E_4,E_bare_1,E_bare_2,event_flag\n")
    );
    assert_eq!(traj.lines().count(), 2002);
}

#[test]
fn verify_passes_and_detects_corruption() {
    let d = scratch("ver");
    let cfg = write(&d, "cs.json", CS);
    assert_eq!(code(&cox(&["verify", "--config", s(&cfg), "--out", s(&d)])), 0);

    let bad = write(
        &d,
        "bad.json",
        r#"{"alpha1":-0.103,"alpha2":-0.5,"beta":0.05,"delta":0.25,"kappa1":1,
            "reference_params":{"alpha1":-0.102,"alpha2":-0.5,"beta":0.05,"delta":0.25,"kappa1":1}}"#,
    );
    let o = cox(&["verify", "--config", s(&bad), "--out", s(&d)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("worst offender"));

    let o = cox(&[
        "verify",
        "--alpha1",
        "1",
        "--alpha2",
        "2",
        "--beta",
        "0",
        "--delta",
        "3",
        "--kappa1",
        "1",
        "--out",
        s(&d),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_random_suite_from_seed() {
    let d = scratch("seed");
    let o = cox(&["verify", "--seed", "7", "--draws", "3", "--out", s(&d)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(d.join("verify.json"))["cases"].as_array().unwrap().len(), 3);
}

/// 4-connected components of the cells with `n_r = 1` on an `n x n` atlas CSV.
fn resonant_components(csv: &str, n: usize) -> usize {
    let cells: Vec<bool> = csv.lines().skip(1).map(|l| l.split(',').nth(3) == Some("1")).collect();
    assert_eq!(cells.len(), n * n);
    let mut seen = vec![false; n * n];
    let mut count = 0;
    for start in 0..n * n {
        if !cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (r, c) = (i / n, i % n);
            let mut next = Vec::new();
            if r > 0 {
                next.push(i - n);
            }
            if r + 1 < n {
                next.push(i + n);
            }
            if c > 0 {
                next.push(i - 1);
            }
            if c + 1 < n {
                next.push(i + 1);
            }
            for j in next {
                if cells[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

#[test]
fn atlas_smoke_and_topology() {
    let d = scratch("atlas");
    let o = cox(&["atlas", "--n", "2", "--out", s(&d)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(d.join("atlas.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);

    let mut adjacency = Vec::new();
    for delta_d in ["1.2", "5"] {
        let o = cox(&["atlas", "--delta-d", delta_d, "--out", s(&d)]);
        assert_eq!(code(&o), 0);
        let csv = std::fs::read_to_string(d.join("atlas.csv")).unwrap();
        assert_eq!(resonant_components(&csv, 400), 1, "delta_d = {delta_d}");
        adjacency.push(json(d.join("atlas.json"))["adjacency"].clone());
    }
    assert_eq!(adjacency[0], adjacency[1]);
}

#[test]
fn reruns_are_byte_identical() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    for d in [&a, &b] {
        let cfg = write(d, "cs.json", CS);
        assert_eq!(code(&cox(&["spectrum", "--config", s(&cfg), "--out", s(d)])), 0);
        assert_eq!(code(&cox(&["observables", "--config", s(&cfg), "--out", s(d)])), 0);
    }
    for f in ["zeros.csv", "spectrum.json", "observables.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn missing_parameter_is_invalid() {
    let d = scratch("miss");
    let o = cox(&["spectrum", "--alpha1", "0.1", "--out", s(&d)]);
    assert_eq!(code(&o), 2);
}
