use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kdv5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdv5")).args(args).output().expect("run kdv5")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn value_after<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap_or_else(|| panic!("no {key:?} in {text}")).trim()
}

#[test]
fn profile_prints_amplitude_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "p");
    let o = kdv5(&["profile", "--family", "fifth-soliton", "--gamma", "1", "--alpha", "1", "--beta", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let amp: f64 = value_after(&stdout(&o), "amplitude = ").parse().unwrap();
    assert!((amp - 105.0 / 169.0).abs() < 1e-15);
    let csv = fs::read_to_string(format!("{out}-profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# family=fifth-soliton"));
    assert_eq!(lines.next().unwrap(), "xi,u");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, u) = l.split_once(',').unwrap();
            (x.parse().unwrap(), u.parse().unwrap())
        })
        .collect();
    assert!(rows.len() >= 1000);
    let peak = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    assert!((peak - 105.0 / 169.0).abs() < 1e-3);
}

#[test]
fn cnoidal_profile_reports_derived_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let o = kdv5(&["profile", "--family", "kdv-cnoidal", "--c", "1", "--A", "1", "--out", &prefix(dir.path(), "c")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let delta: f64 = value_after(&text, "delta = ").parse().unwrap();
    assert_eq!(delta, 33.0);
    let amp: f64 = value_after(&text, "amplitude = ").parse().unwrap();
    assert!((amp - (3.0 + 33f64.sqrt()) / 2.0).abs() < 1e-13);
    for key in ["modulus = ", "wavelength = ", "speed = "] {
        value_after(&text, key).parse::<f64>().unwrap();
    }
}

#[test]
fn usage_errors_exit_two() {
    let missing = kdv5(&["profile"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--family"));

    let degenerate = kdv5(&["profile", "--family", "kdv-cnoidal", "--A", "0"]);
    assert_eq!(degenerate.status.code(), Some(2));
    assert!(stderr(&degenerate).contains("degenerate modulus"), "{}", stderr(&degenerate));

    let grid = kdv5(&["simulate", "--family", "kdv-soliton", "--gridN", "100"]);
    assert_eq!(grid.status.code(), Some(2));
    assert!(stderr(&grid).contains("power of two"));

    assert_eq!(kdv5(&["profile", "--family", "no-such-wave"]).status.code(), Some(2));
    assert_eq!(kdv5(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_is_layered_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# soliton\nfamily = kdv-soliton\nc = 2\ngamma = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = prefix(dir.path(), "k");

    let o = kdv5(&["profile", "--config", cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(value_after(&stdout(&o), "amplitude = "), "6.0");

    let o = kdv5(&["profile", "--config", cfg, "--c", "1", "--out", &out]);
    assert_eq!(value_after(&stdout(&o), "amplitude = "), "3.0");

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "family = kdv-soliton\nspeeed = 1\n").unwrap();
    let o = kdv5(&["profile", "--config", bad.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn verify_passes_and_detects_wrong_speed() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "v");
    for family in ["fifth-soliton", "kdv-soliton", "kdv-cnoidal", "fifth-cnoidal"] {
        let o = kdv5(&["verify", "--family", family, "--out", &out]);
        assert_eq!(o.status.code(), Some(0), "{family}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
    let text = stdout(&kdv5(&["verify", "--family", "kdv-cnoidal", "--out", &out]));
    assert!(text.contains("PASS coefficient match") && text.contains("PASS PF(2)"));
    let coeffs = fs::read_to_string(format!("{out}-coefficients.csv")).unwrap();
    assert_eq!(coeffs.lines().next().unwrap(), "n,analytic,dft,rel_err");
    assert!(Path::new(&format!("{out}-residuals.csv")).exists());

    let o = kdv5(&["verify", "--family", "fifth-soliton", "--speed-scale", "1.1", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL first-law deviation"));
    assert!(stderr(&o).contains("first-law deviation"));
}

#[test]
fn stability_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "s");

    let o = kdv5(&["stability", "--family", "fifth-soliton", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let b0: f64 = value_after(&text, "|b0| = ").parse().unwrap();
    assert!((b0 - 6.14e-5).abs() < 0.01 * 6.14e-5);
    assert!(text.contains("verdict: stable"));
    let table = fs::read_to_string(format!("{out}-gegenbauer.csv")).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 1 + 201);

    let o = kdv5(&["stability", "--family", "fifth-soliton", "--jmax", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: inconclusive"));

    let o = kdv5(&["stability", "--family", "kdv-soliton", "--c", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("d/dc ||phi_c||^2 = 36.0 at c = 1.0"), "{}", stdout(&o));

    let o = kdv5(&["stability", "--family", "kdv-cnoidal", "--mode", "fixed-period", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(format!("{out}-stability.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains("fixed-period") && r.ends_with("stable")));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = prefix(dir.path(), name);
        let o = kdv5(&[
            "simulate", "--family", "kdv-soliton", "--perturb", "scale:0.01", "--seed", "7", "--horizon", "1", "--out",
            &out,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (
            fs::read(format!("{out}-diagnostics.csv")).unwrap(),
            fs::read(format!("{out}-snapshot.csv")).unwrap(),
        )
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let diag = String::from_utf8(a.0).unwrap();
    assert_eq!(diag.lines().next().unwrap(), "time,mass,momentum,distH1,distH2,shift");
    let snap = String::from_utf8(a.1).unwrap();
    assert!(snap.starts_with("# time="));
    assert_eq!(snap.lines().nth(1).unwrap(), "x,u");
}

#[test]
fn unperturbed_fifth_soliton_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "f");
    let o = kdv5(&["simulate", "--family", "fifth-soliton", "--horizon", "0.5", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ratio: f64 = value_after(&stdout(&o), "max distH2 / amplitude = ").parse().unwrap();
    assert!(ratio < 1e-5, "{ratio}");
}
