use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use liefield::exit;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liefield"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(cfg)
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_run_writes_report_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&scenario("standard"), &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(exit::PASS),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = report(&out);
    assert_eq!(r["failures"], 0);
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "admissibility",
            "first_variation",
            "first_variation_ratio",
            "morphism",
            "structure"
        ]
    );
    let csv = std::fs::read_to_string(out.join("residuals.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "node,x0,x1,adm_0_0,adm_0_1,morph_0_1_0");
    assert_eq!(csv.lines().count(), 1 + 32 * 32);
    assert!(out.join("timing.json").exists());
    let phi = liefield::section_io::load(&out.join("section.lfs")).unwrap();
    assert_eq!(phi.grid().len(), 32 * 32);
}

#[test]
fn mechanics_trajectory_csv_has_time_and_state_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &scenario("rigid_body"),
        tmp.path(),
        &["--override", "params.t_end=1.0"],
    );
    assert_eq!(o.status.code(), Some(exit::PASS));
    let csv = std::fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,y0,y1,y2,energy,casimir,el_residual"
    );
}

#[test]
fn zero_tolerance_fails_with_check_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &scenario("atiyah"),
        tmp.path(),
        &["--override", "checks.morphism.tol=0"],
    );
    assert_eq!(o.status.code(), Some(exit::CHECK_FAILED));
    let r = report(tmp.path());
    assert_eq!(r["failures"], 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL morphism"));
}

#[test]
fn reports_are_deterministic_and_seed_dependent() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    for (out, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        assert_eq!(
            run(&scenario("chern_simons"), out, &["--seed", seed])
                .status
                .code(),
            Some(0)
        );
    }
    let read = |p: &Path| std::fs::read(p.join("report.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(report(&a)["seed"], 5);
}

#[test]
fn malformed_config_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, "{ \"schema\": 1, ").unwrap();
    assert_eq!(
        run(&cfg, &tmp.path().join("o"), &[]).status.code(),
        Some(exit::SCHEMA)
    );
    std::fs::write(
        &cfg,
        r#"{"schema": 1, "id": "x", "kind": "rigid_body", "params": {"dt": 0.1}, "checks": {}}"#,
    )
    .unwrap();
    assert_eq!(
        run(&cfg, &tmp.path().join("o"), &[]).status.code(),
        Some(exit::SCHEMA)
    );
    let o = bin().arg("check-config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(exit::SCHEMA));
}

#[test]
fn unknown_kind_and_missing_file_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("k.json");
    std::fs::write(
        &cfg,
        r#"{"schema": 1, "id": "x", "kind": "warp_drive", "params": {}, "checks": {}}"#,
    )
    .unwrap();
    assert_eq!(
        run(&cfg, &tmp.path().join("o"), &[]).status.code(),
        Some(exit::UNKNOWN_KIND)
    );
    let missing = tmp.path().join("nope.json");
    assert_eq!(
        run(&missing, &tmp.path().join("o"), &[]).status.code(),
        Some(exit::IO)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        bin().arg("frobnicate").output().unwrap().status.code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        bin().arg("run").output().unwrap().status.code(),
        Some(exit::USAGE)
    );
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &scenario("free_particle"),
        tmp.path(),
        &["--override", "no_equals_sign"],
    );
    assert_eq!(o.status.code(), Some(exit::USAGE));
}

#[test]
fn list_names_every_kind() {
    let o = bin().arg("list").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    for kind in [
        "rigid_body",
        "heavy_top",
        "free_particle",
        "standard",
        "chern_simons",
        "atiyah",
    ] {
        assert!(s.contains(kind), "{kind}");
    }
    assert!(s.contains("su2_fourier") && s.contains("kinetic_minus_potential"));
}

#[test]
fn shipped_configs_pass_check_config() {
    for name in [
        "rigid_body",
        "heavy_top",
        "free_particle",
        "standard",
        "chern_simons",
        "atiyah",
    ] {
        let o = bin()
            .arg("check-config")
            .arg(scenario(name))
            .output()
            .unwrap();
        assert_eq!(
            o.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn invalid_parameter_combinations_are_schema_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&str, &str); 3] = [
        (
            "chern_simons",
            r#"params.algebra={"name":"custom","constants":[0,0,0,0,0,0,0,0],"metric":[1,0,0,1]}"#,
        ),
        ("atiyah", "params.grid.boundary=periodic"),
        ("atiyah", "params.omega=[0,0.3,0.3,0]"),
    ];
    for (name, ov) in cases {
        let o = run(&scenario(name), &tmp.path().join("o"), &["--override", ov]);
        assert_eq!(
            o.status.code(),
            Some(exit::SCHEMA),
            "{ov}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}
