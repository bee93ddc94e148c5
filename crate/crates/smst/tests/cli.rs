use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smst(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smst"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = smst(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

const SMALL: [&str; 8] = [
    "--n",
    "3000",
    "--k-max",
    "3",
    "--seeds",
    "4",
    "--sample-dt",
    "0.1",
];

#[test]
fn per_seed_outputs_are_reproducible_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut a = SMALL.to_vec();
    a.extend(["--workers", "1", "--out", "a"]);
    let mut b = SMALL.to_vec();
    b.extend(["--workers", "3", "--out", "b"]);
    ok(d, &[&["simulate"], &a[..]].concat());
    ok(d, &[&["simulate"], &b[..]].concat());
    let (fa, fb) = (files(&d.join("a/seeds")), files(&d.join("b/seeds")));
    assert_eq!(fa.len(), 8);
    assert_eq!(fa, fb);
    assert_eq!(
        fs::read(d.join("a/aggregate.json")).unwrap(),
        fs::read(d.join("b/aggregate.json")).unwrap()
    );
    let trace = String::from_utf8(fa[1].1.clone()).unwrap();
    assert!(trace.starts_with("t,k,c1_frac,edges_frac\n"));
}

#[test]
fn single_seed_reports_no_std_err() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(
        tmp.path(),
        &["simulate", "--n", "500", "--k-max", "2", "--seeds", "9,"],
    );
    assert!(stdout.lines().nth(1).unwrap().starts_with("1,"));
    let agg: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("runs/simulate/aggregate.json")).unwrap())
            .unwrap();
    assert_eq!(agg["seeds"], serde_json::json!([9]));
    assert!(agg["levels"][0]["std_err"].is_null());
    assert!(agg["levels"][0]["mean"].is_f64());
    assert!(tmp.path().join("runs/simulate/seeds/seed-9.json").exists());
}

#[test]
fn susceptibility_column_on_demand() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "simulate",
            "--n",
            "400",
            "--k-max",
            "2",
            "--seeds",
            "1,",
            "--susceptibility",
            "true",
            "--mode",
            "poisson",
        ],
    );
    let text = fs::read_to_string(tmp.path().join("runs/simulate/seeds/seed-1.trace.csv")).unwrap();
    assert!(text.starts_with("t,k,c1_frac,edges_frac,chi_frac\n"));
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.cfg"),
        "n = 800\nk_max = 2\nseeds = 2\nout = fromfile\n",
    )
    .unwrap();
    ok(
        tmp.path(),
        &["simulate", "--config", "run.cfg", "--n", "600"],
    );
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("fromfile/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["config"]["n"], 600);
    assert_eq!(m["config"]["k_max"], 2);
    assert_eq!(m["config"]["seeds"], serde_json::json!([1, 2]));
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert!(m["version"].as_str().unwrap().starts_with("smst "));
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["seed_wall_time_s"].as_object().unwrap().len(), 2);
}

#[test]
fn invalid_arguments_fail() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["simulate", "--n", "1"][..],
        &["simulate", "--mode", "uniform"],
        &["simulate", "--seeds", "0"],
        &["bounds", "--k-max", "0"],
        &["frobnicate"],
    ] {
        assert!(!smst(tmp.path(), args).status.success(), "{args:?}");
    }
}

#[test]
fn report_names_missing_producer() {
    let tmp = tempfile::tempdir().unwrap();
    let out = smst(tmp.path(), &["report"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("smst rho"), "{err}");
}

#[test]
fn report_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let common = ["--k-max", "3", "--n", "2000", "--seeds", "3"];
    ok(d, &[&["rho"], &common[..]].concat());
    ok(d, &[&["bounds", "--dt", "1e-4"], &common[..]].concat());
    // the report computes what is still missing
    ok(d, &[&["report", "--compute-missing"], &common[..]].concat());

    let rep = d.join("runs/report");
    let head = |f: &str| {
        fs::read_to_string(rep.join(f))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(head("gamma_table.csv"), "k,gamma,approximate");
    assert_eq!(
        head("gamma_minus_2km1.csv"),
        "k,mean_minus_2km1,std_err,completed,censored"
    );
    assert_eq!(
        head("Gamma_bounds.csv"),
        "k,Gamma_lower,Gamma_upper,Gamma_bar"
    );
    assert_eq!(head("thresholds.csv"), "k,s_k,sigma_k,assumption_flag");

    let table = fs::read_to_string(rep.join("gamma_table.csv")).unwrap();
    let g1: f64 = table
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((g1 - 1.202).abs() < 1e-3);
    let bounds = fs::read_to_string(rep.join("Gamma_bounds.csv")).unwrap();
    let gb2: f64 = bounds
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((gb2 - 4.5542).abs() < 2e-3);

    let rho = fs::read_to_string(d.join("runs/rho/rho_2.csv")).unwrap();
    assert!(rho.starts_with("t,rho\n"));
    let g = fs::read_to_string(d.join("runs/bounds/g.csv")).unwrap();
    assert!(g.starts_with("t,g1,g2,g3\n"));
    let fam: serde_json::Value =
        serde_json::from_slice(&fs::read(d.join("runs/rho/family.json")).unwrap()).unwrap();
    assert_eq!(fam["levels"].as_array().unwrap().len(), 3);
    assert!(d.join("runs/simulate/aggregate.json").exists());
    assert!(d.join("runs/thresholds/thresholds.json").exists());
}
