use std::path::Path;
use std::process::{Command, Output};

use hardylt_cli::report::Report;
use hardylt_cli::spec::load_potential;

fn hardylt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylt"))
        .args(args)
        .current_dir(dir)
        .env("HARDYLT_TOL_PROFILE", "fast")
        .output()
        .unwrap()
}

fn report(out: &Output) -> Report {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    Report::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}\n{}", String::from_utf8_lossy(&out.stderr)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("box.spec"), "# unit box\ntype = piecewise\nsegments = [(1, 2, 4.0)]\n").unwrap();
    dir
}

#[test]
fn bound_report_is_deterministic_and_round_trips() {
    let dir = workspace();
    let a = hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.5"]);
    let b = hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.5"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r.to_json().as_bytes(), &a.stdout[..]);
    let cert = &r.result["certificate"];
    assert_eq!(cert["k"], 3.555);
    assert!(cert["total"].as_f64().unwrap() > 0.0);
    assert!(r.provenance.iter().any(|p| p.name == "k" && p.source == hardylt_cli::report::Source::Paper));
}

#[test]
fn verify_passes_on_a_box() {
    let dir = workspace();
    let out = hardylt(dir.path(), &["verify", "--potential", "box.spec", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert!(r.pass);
    let ratio = r.result["ratio"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio < 1.0, "{ratio}");
}

#[test]
fn spec_errors_exit_2_with_position() {
    let dir = workspace();
    std::fs::write(dir.path().join("bad.spec"), "type = piecewise\nsegments = [(1, 2 4)]\n").unwrap();
    let out = hardylt(dir.path(), &["bound", "--potential", "bad.spec", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2, column 19"), "{}", stderr(&out));

    let out = hardylt(dir.path(), &["bound", "--potential", "missing.spec", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hypotheses_are_named() {
    let dir = workspace();
    let out = hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gamma >="), "{}", stderr(&out));
    let out = hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha < 1"), "{}", stderr(&out));
    let out = hardylt(dir.path(), &["spectrum", "--potential", "box.spec", "--operator", "torus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_layering() {
    let dir = workspace();
    let args = ["constants", "sobolev"];
    let r = report(&hardylt(dir.path(), &args));
    assert_eq!(r.config.tolerances.grid, 1000);

    let out = Command::new(env!("CARGO_BIN_EXE_hardylt"))
        .args(args)
        .current_dir(dir.path())
        .env("HARDYLT_TOL_PROFILE", "strict")
        .output()
        .unwrap();
    assert_eq!(report(&out).config.tolerances.opt_tol, 1e-8);

    std::fs::write(dir.path().join("run.toml"), "seed = 11\n[tolerances]\ngrid = 500\nopt_grid = 40\n").unwrap();
    let r = report(&hardylt(dir.path(), &["--config", "run.toml", "constants", "sobolev", "--opt-grid", "30"]));
    assert_eq!((r.config.tolerances.grid, r.config.tolerances.opt_grid, r.config.seed), (500, 30, 11));
    assert_eq!(r.config.tolerances.opt_tol, 1e-4);

    let r = report(&hardylt(dir.path(), &["--profile", "default", "constants", "sobolev"]));
    assert_eq!(r.config.tolerances.grid, 4000);

    std::fs::write(dir.path().join("bad.toml"), "[tolerances]\ngird = 5\n").unwrap();
    assert_eq!(hardylt(dir.path(), &["--config", "bad.toml", "constants", "sobolev"]).status.code(), Some(2));
}

#[test]
fn table_files_resolve_next_to_the_spec() {
    let dir = workspace();
    std::fs::create_dir(dir.path().join("data")).unwrap();
    std::fs::write(dir.path().join("data/v.csv"), "r,V\n1,0\n1.5,6\n2,0\n").unwrap();
    std::fs::write(dir.path().join("data/tent.spec"), "type = table\nfile = v.csv\n").unwrap();
    let v = load_potential(&dir.path().join("data/tent.spec")).unwrap();
    assert_eq!(v.eval(1.25), 3.0);
    let out = hardylt(dir.path(), &["verify", "--potential", "data/tent.spec", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn interval_operator_sees_constant_mode() {
    let dir = workspace();
    let r = report(&hardylt(dir.path(), &["spectrum", "--potential", "box.spec", "--operator", "interval:1"]));
    let evs = r.result["spectrum"]["eigenvalues"].as_array().unwrap();
    assert!((evs[0].as_f64().unwrap() + 4.0).abs() < 1e-6, "{evs:?}");
}

#[test]
fn delta_box_has_one_bound_state() {
    let dir = workspace();
    // 1/beta at R = 1 is about 0.53, so strength 3 binds once
    let r = report(&hardylt(dir.path(), &["spectrum", "--delta-at", "1", "--delta-strength", "3"]));
    let s = &r.result["spectrum"];
    assert_eq!(s["eigenvalues"].as_array().unwrap().len() + s["unresolved"].as_array().unwrap().len(), 1);
}

#[test]
fn plain_bound_is_smaller() {
    let dir = workspace();
    let with = report(&hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.5"]));
    let plain = report(&hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.5", "--plain"]));
    let t = |r: &Report| r.result["certificate"]["total"].as_f64().unwrap();
    assert!(t(&plain) < t(&with));
}

#[test]
fn curves_and_output_files() {
    let dir = workspace();
    let out = hardylt(dir.path(), &["constants", "lower", "--curve", "lower.csv", "-o", "lower.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("lower.csv")).unwrap();
    assert!(csv.starts_with("R,beta,bound\n"));
    assert_eq!(csv.lines().count(), 402);
    let r = Report::from_json(&std::fs::read_to_string(dir.path().join("lower.json")).unwrap()).unwrap();
    let v = r.result["lower_bound"]["value"].as_f64().unwrap();
    assert!((v - 0.5334).abs() < 1e-3, "{v}");

    let out = hardylt(dir.path(), &["constants", "green", "--curve", "green.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(std::fs::read_to_string(dir.path().join("green.csv")).unwrap().starts_with("x,g\n"));
}

#[test]
fn sigma_map_writes_a_usable_potential() {
    let dir = workspace();
    let out = hardylt(
        dir.path(),
        &["sigma-map", "--sigma", "0.5", "--gamma", "1", "--potential", "box.spec", "--write-potential", "mapped.spec"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert!(r.result["params"]["valid"].as_bool().unwrap());
    // q = 3/4: V_σ(r) = (16/9)·4 on (1, 2^{3/4})
    let mapped = load_potential(&dir.path().join("mapped.spec")).unwrap();
    assert!((mapped.eval(1.3) - 64.0 / 9.0).abs() < 1e-12);
    assert_eq!(mapped.support(), Some((1.0, 2f64.powf(0.75))));

    let out = hardylt(dir.path(), &["sigma-map", "--sigma", "2", "--gamma", "0.5", "--potential", "box.spec"]);
    let r = report(&out);
    let total = r.result["bound"]["total"].as_f64().unwrap();
    // ½ ∫_0^{ln 2} 4 dx
    assert!((total - 2.0 * 2f64.ln()).abs() < 1e-8, "{total}");

    let out = hardylt(dir.path(), &["sigma-map", "--sigma", "2", "--gamma", "1", "--potential", "box.spec"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regress_is_seeded() {
    let dir = workspace();
    let a = hardylt(dir.path(), &["regress", "--cases", "5", "--seed", "9"]);
    let b = hardylt(dir.path(), &["regress", "--cases", "5", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = hardylt(dir.path(), &["regress", "--cases", "5", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn zero_potential_verifies_trivially() {
    let dir = workspace();
    std::fs::write(dir.path().join("zero.spec"), "type = piecewise, segments = []").unwrap();
    let out = hardylt(dir.path(), &["verify", "--potential", "zero.spec", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r.result["ratio"], 0.0);
    assert!(r.pass);
}

#[test]
fn unit_box_total_is_constant_times_mass() {
    let dir = workspace();
    let r = report(&hardylt(dir.path(), &["bound", "--potential", "box.spec", "--gamma", "0.5", "--alpha", "0"]));
    let total = r.result["certificate"]["total"].as_f64().unwrap();
    assert!((total - 1.185 * 4.0).abs() <= 1e-3 * 4.0, "{total}");
}

#[test]
fn help_documents_profiles() {
    let out = Command::new(env!("CARGO_BIN_EXE_hardylt")).arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("strict    1e-12"), "{text}");
}
