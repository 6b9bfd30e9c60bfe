//! End-to-end tests of the `pairlab` binary: exit codes, output formats,
//! file parsing, and the sweep CSVs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pairlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON on stdout")
}

fn assert_exit_2(output: &Output) {
    assert_eq!(
        output.status.code(),
        Some(2),
        "expected exit 2, stdout: {} stderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("field {key} in {v}"))
}

#[test]
fn bounds_reproduces_worked_pair() {
    let out = pairlab(&["bounds", "--gamma-s-db", "10.48", "--gamma-w-db", "4.69"]);
    let v = stdout_json(&out);
    assert!((f(&v, "alpha_upper") - 0.33).abs() <= 0.01);
    assert!((f(&v, "alpha_lower_positivity") - 0.25).abs() <= 0.01);
    assert!((f(&v, "beta_upper_star") - 0.06).abs() <= 0.01);
    assert_eq!(v["pairable"], Value::Bool(true));
}

/// The JSON output re-parses to exactly the in-memory values.
#[test]
fn bounds_json_round_trips_exactly() {
    let out = pairlab(&["bounds", "--gamma-s-db", "10.48", "--gamma-w-db", "4.69", "--beta", "0.02"]);
    let v = stdout_json(&out);
    let gs = pairlab_core::units::db_to_linear(10.48);
    let gw = pairlab_core::units::db_to_linear(4.69);
    assert_eq!(f(&v, "gamma_s_linear"), gs);
    assert_eq!(f(&v, "gamma_w_linear"), gw);
    assert_eq!(
        f(&v, "alpha_upper"),
        pairlab_core::bounds::alpha_upper(gw).unwrap()
    );
    assert_eq!(
        f(&v, "alpha_lower_strong"),
        pairlab_core::bounds::alpha_lower_strong(gs, 0.02).unwrap()
    );
    assert_eq!(
        f(&v, "beta_upper_star"),
        pairlab_core::bounds::beta_upper_star(gs, gw).unwrap()
    );
    assert_eq!(f(&v, "msd"), pairlab_core::bounds::msd(gs, gw).unwrap());
}

#[test]
fn bounds_equal_sinrs_not_pairable() {
    let out = pairlab(&["bounds", "--gamma-s-db", "4.77", "--gamma-w-db", "4.77"]);
    let v = stdout_json(&out);
    assert_eq!(v["pairable"], Value::Bool(false));
    assert_eq!(f(&v, "beta_upper_star"), 0.0);
}

#[test]
fn bounds_rejects_zero_linear_sinr() {
    assert_exit_2(&pairlab(&["bounds", "--gamma-s-linear", "5", "--gamma-w-linear", "0"]));
}

#[test]
fn bounds_rejects_misordered_pair() {
    assert_exit_2(&pairlab(&["bounds", "--gamma-s-db", "1.0", "--gamma-w-db", "6.0"]));
}

#[test]
fn bounds_csv_has_header_and_row() {
    let out = pairlab(&[
        "bounds", "--gamma-s-db", "10.48", "--gamma-w-db", "4.69", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data[0].starts_with("gamma_s_db,gamma_w_db,alpha_s,beta,alpha_upper"));
    assert!(data[1].ends_with("true"));
}

fn write_users(dir: &Path, name: &str, gammas_db: &[f64]) -> String {
    let mut text = String::from("# test fixture\n");
    for (i, g) in gammas_db.iter().enumerate() {
        text.push_str(&format!("u{},{}\n", i + 1, g));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// dB values whose linear SINRs are 4^1..4^8: every aligned pair clears
/// the MSD, so the adaptive plan is the consecutive one.
fn case1_db() -> Vec<f64> {
    (1..=8).map(|i| 10.0 * 4f64.powi(i).log10()).collect()
}

#[test]
fn pair_case1_consecutive_no_singles() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "users.txt", &case1_db());
    let v = stdout_json(&pairlab(&["pair", "--input", &input]));
    let pairs = v["pairs"].as_array().unwrap();
    let got: Vec<(String, String)> = pairs
        .iter()
        .map(|p| {
            (
                p["weak_id"].as_str().unwrap().to_string(),
                p["strong_id"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        got,
        [("u4", "u5"), ("u3", "u6"), ("u2", "u7"), ("u1", "u8")]
            .map(|(w, s)| (w.to_string(), s.to_string()))
    );
    assert!(v["singles"].as_array().unwrap().is_empty());
}

#[test]
fn pair_case3_reports_two_singles() {
    // linear SINRs 0.5, 1, 2, 52, 55, 58, 61, 64 in dB
    let db: Vec<f64> = [0.5f64, 1.0, 2.0, 52.0, 55.0, 58.0, 61.0, 64.0]
        .iter()
        .map(|g| 10.0 * g.log10())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "users.txt", &db);
    let v = stdout_json(&pairlab(&["pair", "--input", &input]));
    let singles: Vec<&str> = v["singles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["user_id"].as_str().unwrap())
        .collect();
    assert_eq!(singles, ["u4", "u5"]);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);
}

#[test]
fn pair_single_user_gets_oma_rate() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "one.txt", &[10.48]);
    let v = stdout_json(&pairlab(&["pair", "--input", &input]));
    let expect = pairlab_core::rates::oma_rate(pairlab_core::units::db_to_linear(10.48)).unwrap();
    assert_eq!(f(&v, "total_rate"), expect);
    assert_eq!(v["users"][0]["role"], "single");
}

#[test]
fn pair_nothing_pairable_is_all_oma_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "flat.txt", &[5.0, 5.01, 5.02, 5.03]);
    let v = stdout_json(&pairlab(&["pair", "--input", &input]));
    assert!(v["pairs"].as_array().unwrap().is_empty());
    assert_eq!(v["singles"].as_array().unwrap().len(), 4);
}

#[test]
fn pair_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "u1;10.0\n").unwrap();
    assert_exit_2(&pairlab(&["pair", "--input", path.to_str().unwrap()]));
}

#[test]
fn pair_baseline_accepts_fixed_split() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "users.txt", &[0.0, 10.0]);
    let v = stdout_json(&pairlab(&[
        "pair", "--input", &input, "--algorithm", "nf", "--split", "fixed:0.3",
    ]));
    assert_eq!(v["pairs"][0]["alpha_s"].as_f64().unwrap(), 0.3);
}

#[test]
fn pair_aup_rejects_fixed_split() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_users(dir.path(), "users.txt", &[0.0, 10.0]);
    assert_exit_2(&pairlab(&[
        "pair", "--input", &input, "--algorithm", "aup", "--split", "fixed:0.3",
    ]));
}

fn read_csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_beta_sweep_crosses_near_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "sweep = beta\ngamma_s_db = 10.48\ngamma_w_db = 4.69\nalpha = 0.32\nsweep_steps = 61\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = pairlab(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("manifest.json").exists());

    let rows = read_csv_rows(&out_dir.join("rate_vs_beta.csv"));
    assert_eq!(rows.len(), 61);
    // locate the sign change of asr_noma - asr_oma
    let mut crossing = None;
    for w in rows.windows(2) {
        let gap = |r: &Vec<String>| r[6].parse::<f64>().unwrap() - r[7].parse::<f64>().unwrap();
        if gap(&w[0]) > 0.0 && gap(&w[1]) <= 0.0 {
            crossing = Some(w[1][1].parse::<f64>().unwrap());
        }
    }
    let crossing = crossing.expect("NOMA-vs-OMA sum rate must change sign");
    assert!(
        (0.05..=0.08).contains(&crossing),
        "crossing at beta = {crossing}"
    );
}

#[test]
fn simulate_alpha_sweep_crosses_at_both_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "sweep = alpha\ngamma_s_db = 10.48\ngamma_w_db = 4.69\nbeta = 0.02\n\
         sweep_start = 0.2\nsweep_stop = 0.4\nsweep_steps = 201\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = pairlab(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_csv_rows(&out_dir.join("rate_vs_alpha.csv"));
    let col = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    let mut weak_cross = None;
    let mut strong_cross = None;
    for w in rows.windows(2) {
        let weak_gap = |r: &Vec<String>| col(r, 3) - col(r, 5);
        let strong_gap = |r: &Vec<String>| col(r, 2) - col(r, 4);
        if weak_gap(&w[0]) > 0.0 && weak_gap(&w[1]) <= 0.0 {
            weak_cross = Some(col(&w[1], 1));
        }
        if strong_gap(&w[0]) < 0.0 && strong_gap(&w[1]) >= 0.0 {
            strong_cross = Some(col(&w[1], 1));
        }
    }
    let weak_cross = weak_cross.expect("weak-user gap must change sign");
    let strong_cross = strong_cross.expect("strong-user gap must change sign");
    assert!((0.32..=0.34).contains(&weak_cross), "weak at {weak_cross}");
    assert!((0.24..=0.27).contains(&strong_cross), "strong at {strong_cross}");
}

#[test]
fn simulate_users_sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.cfg");
    fs::write(
        &cfg,
        "seed = 5\nrealizations = 3\nbs_density = 9\nbeta = 0.13\nusers_per_bs_list = 4\nsplit_policy = grid:21\n",
    )
    .unwrap();

    let run = |out_dir: &Path| {
        let out = pairlab(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--algorithms",
            "aup,oma",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(out_dir.join("asr_vs_users.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"));
    let b = run(&dir.path().join("b"));
    assert_eq!(a, b, "fixed-seed sweep output must be byte-identical");

    let rows = read_csv_rows(&dir.path().join("a").join("asr_vs_users.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "4");
    assert_eq!(rows[0][1], "aup");
    assert_eq!(rows[0][4], "3");
    assert_eq!(rows[0][5], "5");
}

#[test]
fn simulate_rejects_empty_algorithm_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.cfg");
    fs::write(&cfg, "realizations = 1\n").unwrap();
    assert_exit_2(&pairlab(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--algorithms",
        "",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]));
}

#[test]
fn simulate_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.cfg");
    fs::write(&cfg, "mystery_knob = 7\n").unwrap();
    assert_exit_2(&pairlab(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]));
}

#[test]
fn thread_cap_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.cfg");
    fs::write(&cfg, "seed = 5\nrealizations = 2\nbs_density = 9\nusers_per_bs_list = 4\nsplit_policy = grid:11\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pairlab"))
        .env("NOMA_PAIRLAB_THREADS", "1")
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--algorithms",
            "oma",
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = Command::new(env!("CARGO_BIN_EXE_pairlab"))
        .env("NOMA_PAIRLAB_THREADS", "zero")
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("out2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
