use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn kgbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgbeam")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn no_panic(o: &Output) {
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(!err.contains("panicked"), "{err}");
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("report is JSON")
}

/// Header plus rows of numbers (non-numeric cells become NaN).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn default_verify_passes_every_check() {
    let o = kgbeam(&["verify", "--json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = json(&o);
    let map = r.as_object().unwrap();
    for name in [
        "kg_residual",
        "parabolic_residual",
        "envelope_identities",
        "kinetic_momentum",
        "continuity",
        "probability_identity",
        "normalization",
        "current_expectation",
        "potential_expectation",
        "v2_expectation",
        "transverse_kinetic",
        "energy_consistency",
        "lorentz_invariance",
        "hamilton_jacobi",
        "bohm_limit",
    ] {
        let c = &map[name];
        assert_eq!(c["pass"], true, "{name}: {c}");
        for field in ["value", "tolerance", "residual"] {
            assert!(c[field].is_number(), "{name}.{field}");
        }
    }
    // 2 hbar^2 N / w0^2 at the waist of the reference beam
    assert!((map["transverse_kinetic"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn corrupted_gouy_phase_fails_verification() {
    let o = kgbeam(&["verify", "--corrupt", "gouy", "--json"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["kg_residual"]["pass"], false);
    assert!(r["kg_residual"]["residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn text_report_ends_with_overall_status() {
    let o = kgbeam(&["verify", "--mode", "hg:1,0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().last().unwrap() == "overall: PASS");
    assert!(!text.contains("oam_eigenvalue"), "HG(1,0) is not an OAM eigenstate");
}

#[test]
fn lg_verify_reports_unit_oam_eigenvalue() {
    let o = kgbeam(&["verify", "--mode", "lg:1,0", "--json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let l = r["oam_eigenvalue"]["value"].as_f64().unwrap();
    assert!((l - 1.0).abs() < 1e-8, "{l}");
    assert!(r.get("probability_identity").is_none());
    assert!(r.get("bohm_limit").is_none());
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = kgbeam(&["verify", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "overall: PASS");
    let r: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["kg_residual"]["pass"], true);
}

#[test]
fn hermite_node_line_is_zero() {
    let o = kgbeam(&["field", "--mode", "hg:1,0", "--quantity", "psi", "--grid", "9x9"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 81);
    let (x1, re, im) = (col(&h, "xi1"), col(&h, "psi_re"), col(&h, "psi_im"));
    let on_node: Vec<_> = rows.iter().filter(|r| r[x1] == 0.0).collect();
    assert_eq!(on_node.len(), 9);
    for r in on_node {
        assert_eq!((r[re], r[im]), (0.0, 0.0));
    }
    assert!(rows.iter().any(|r| r[x1] != 0.0 && r[re].hypot(r[im]) > 1e-3));
}

#[test]
fn reference_density_at_origin() {
    let o = kgbeam(&["field", "--quantity", "density", "--grid", "9x9"]);
    let (h, rows) = csv(&stdout(&o));
    let (x1, x2, d) = (col(&h, "xi1"), col(&h, "xi2"), col(&h, "density"));
    let origin = rows.iter().find(|r| r[x1] == 0.0 && r[x2] == 0.0).unwrap();
    assert!((origin[d] - 1.0 / (2.0 * PI)).abs() < 1e-12);
}

#[test]
fn scalar_potential_changes_sign_at_sqrt_n_radius() {
    let o = kgbeam(&["field", "--mode", "hg:1,1", "--quantity", "v2", "--grid", "201x9", "--tau", "0.7"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    let (x1, x2, v2, rw) = (col(&h, "xi1"), col(&h, "xi2"), col(&h, "v2"), col(&h, "rho_over_w"));
    let line: Vec<_> = rows.iter().filter(|r| r[x2] == 0.0 && r[x1] > 0.0).collect();
    let root = 3f64.sqrt();
    let spacing = line[1][rw] - line[0][rw];
    for r in &line {
        if r[rw] < root - 1e-12 {
            assert!(r[v2] > 0.0);
        } else if r[rw] > root + 1e-12 {
            assert!(r[v2] < 0.0);
        }
    }
    let crossing = line.windows(2).find(|w| w[0][v2] > 0.0 && w[1][v2] <= 0.0).unwrap();
    let (a, b) = (crossing[0], crossing[1]);
    let zero = a[rw] + (b[rw] - a[rw]) * a[v2] / (a[v2] - b[v2]);
    assert!((zero - root).abs() < spacing);
}

#[test]
fn energy_table_exact_row_and_monotonicity() {
    let o = kgbeam(&["energy", "--max-m", "1", "--max-n", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let (h, rows) = csv(&text);
    assert_eq!(h, ["m", "n", "N", "k4", "E_mode", "E_free", "hbar2_KT"]);
    assert_eq!(rows.len(), 6);
    let exact = [1.0, 2.0, 4.0, 2.0, 2.0, 2f64.sqrt(), 2.0];
    let row = rows.iter().find(|r| r[0] == 1.0 && r[1] == 2.0).unwrap();
    for (a, b) in row.iter().zip(exact) {
        assert!((a - b).abs() < 1e-14, "{row:?}");
    }
    // k4^2 = k3^2 + 2N/w0^2 + m0^2
    assert!((rows[0][3] - 2.5f64.sqrt()).abs() < 1e-15);
    let mut by_order: Vec<_> = rows.iter().map(|r| (r[0] + r[1], r[4])).collect();
    by_order.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in by_order.windows(2) {
        if w[1].0 > w[0].0 {
            assert!(w[1].1 > w[0].1);
        } else {
            assert_eq!(w[1].1, w[0].1);
        }
    }
}

#[test]
fn boost_reaches_comoving_frame() {
    let o = kgbeam(&["boost", "--mode", "hg:1,2", "--beta", "0.5", "--json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["boosted_k3"]["value"].as_f64().unwrap().abs() < 1e-15);
    assert!((r["boosted_k4"]["value"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-15);
    assert_eq!(r["density_invariance"]["pass"], true);
    assert_eq!(r["kg_residual"]["pass"], true);
}

#[test]
fn strong_boost_stays_invariant() {
    let o = kgbeam(&["boost", "--beta", "-0.9", "--json"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["density_invariance"]["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn zero_boost_matches_verify() {
    let b = json(&kgbeam(&["boost", "--beta", "0", "--json"]));
    let v = json(&kgbeam(&["verify", "--json"]));
    assert_eq!(b["kg_residual"], v["kg_residual"]);
}

#[test]
fn superluminal_boost_is_a_usage_error() {
    for beta in ["1", "-1.5", "nan"] {
        let o = kgbeam(&["boost", "--beta", beta]);
        assert_eq!(code(&o), 2, "beta {beta}");
        no_panic(&o);
    }
}

#[test]
fn flowlines_keep_rho_over_w() {
    let o = kgbeam(&["flow", "--seeds", "5", "--steps", "200"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    let (seed, rw, sw) = (col(&h, "seed"), col(&h, "rho_over_w"), col(&h, "s_over_2b"));
    assert_eq!(rows.len(), 5 * 201);
    for k in 0..5 {
        let traj: Vec<_> = rows.iter().filter(|r| r[seed] == k as f64).collect();
        let r0 = traj[0][rw];
        assert!(r0 > 0.0 && r0 <= 2.0);
        for r in &traj {
            assert!((r[rw] - r0).abs() < 1e-8 * r0);
        }
        // the beam spreads while the flowline rides along
        assert!((traj.last().unwrap()[sw] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn axis_seed_stays_on_axis() {
    let o = kgbeam(&["flow", "--seed", "0,0", "--steps", "50"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    let (x1, x2) = (col(&h, "xi1"), col(&h, "xi2"));
    assert!(rows.iter().all(|r| r[x1] == 0.0 && r[x2] == 0.0));
}

#[test]
fn vortex_circulation_is_one_hbar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.csv");
    let o = kgbeam(&["flow", "--mode", "lg:1,0", "--seeds", "3", "--steps", "50", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let summary = json(&o);
    for s in summary.as_array().unwrap() {
        let c = s["circulation"].as_f64().unwrap();
        assert!((c - 1.0).abs() < 0.01, "{c}");
        assert_eq!(s["truncated"], false);
    }
    assert!(fs::read_to_string(path).unwrap().starts_with("seed,step,tau"));
}

#[test]
fn node_seed_is_truncated_and_flagged() {
    let o = kgbeam(&["flow", "--mode", "hg:1,0", "--seed", "0,1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().last().unwrap().ends_with(",truncated"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TRUNCATED"));
}

#[test]
fn seeds_outside_two_waists_are_rejected() {
    let o = kgbeam(&["flow", "--seed", "4.5,0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn csv_is_deterministic_and_plain() {
    let args = ["field", "--mode", "lg:-2,1", "--quantity", "current", "--grid", "12x10", "--tau", "-0.4"];
    let a = kgbeam(&args);
    let b = kgbeam(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.starts_with('\u{feff}'));
    assert!(!text.contains('\r'));
    let (h, rows) = csv(&text);
    assert_eq!(rows.len(), 120);
    assert!(rows.iter().all(|r| r.len() == h.len()));
    // 17 significant digits in every float cell
    let first = text.lines().nth(1).unwrap();
    let cell = first.split(',').nth(1).unwrap();
    assert_eq!(cell.split('e').next().unwrap().trim_start_matches('-').len(), 18);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.cfg");
    fs::write(&path, "# wider beam\nw0 = 4\nk3 = 0\nmax_m = 0\nmax_n = 0\n").unwrap();
    let cfg = path.to_str().unwrap();
    let k4 = |extra: &[&str]| {
        let mut args = vec!["energy", "--config", cfg];
        args.extend_from_slice(extra);
        let (_, rows) = csv(&stdout(&kgbeam(&args)));
        assert_eq!(rows.len(), 1);
        rows[0][3]
    };
    // k4^2 = k3^2 + 2/w0^2 + 1
    assert!((k4(&[]) - (1.0f64 + 2.0 / 16.0).sqrt()).abs() < 1e-15);
    assert!((k4(&["--w0", "1"]) - 3f64.sqrt()).abs() < 1e-15);
    assert!((k4(&["--k3", "1", "--w0", "2"]) - 2.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn bad_input_exits_two_without_panicking() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.cfg");
    fs::write(&bad_cfg, "colour = blue\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--mode", "tem:0,0"],
        vec!["verify", "--grid", "4x4"],
        vec!["verify", "--extent", "0.5"],
        vec!["verify", "--w0", "-1"],
        vec!["verify", "--c", "0"],
        vec!["verify", "--corrupt", "phase"],
        vec!["verify", "--config", bad_cfg.to_str().unwrap()],
        vec!["verify", "--config", "/nonexistent/beam.cfg"],
        vec!["field", "--quantity", "entropy"],
        vec!["field", "--mode", "lg:1,0", "--quantity", "v2"],
        vec!["field", "--quantity", "current", "--m0", "0"],
        vec!["energy", "--max-m", "1000"],
        vec!["boost"],
        vec!["flow", "--steps", "0"],
        vec!["flow", "--tau-range", "1"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = kgbeam(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        no_panic(&o);
    }
}

#[test]
fn massless_beam_verifies() {
    let o = kgbeam(&["verify", "--m0", "0", "--json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r.get("continuity").is_none());
    assert_eq!(r["kg_residual"]["pass"], true);
}
