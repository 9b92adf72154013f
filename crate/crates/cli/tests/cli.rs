use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pellian_cli::cache::{Cache, CacheRecord, SCHEMA_VERSION};
use pellian_cli::error::CliError;
use pellian_core::pell::fundamental_solution;

fn pellian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pellian"))
        .args(args)
        .env_remove("PELLIAN_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn artifact(args: &[&str]) -> String {
    let mut all = args.to_vec();
    all.extend(["--out", "-"]);
    let o = pellian(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn pell_61() {
    let o = pellian(&["pell", "61"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("t1 = 1766319049\n"), "{s}");
    assert!(s.contains("u1 = 226153980\n"), "{s}");
    assert!(s.contains("norm_pm = -1\n"), "{s}");
    let j: serde_json::Value = serde_json::from_str(&artifact(&["pell", "61"])).unwrap();
    assert_eq!(j["t1"], "1766319049");
    assert_eq!(j["u1"], "226153980");
}

#[test]
fn count_b10() {
    let s = stdout(&pellian(&["count", "--B", "10"]));
    assert_eq!(s, "N(10) = 28\n");
    let csv = artifact(&["count", "--B", "10,100", "--strategy", "brute"]);
    assert!(csv.starts_with("B,N,strategy,seconds\n10,28,brute,\n"), "{csv}");
}

#[test]
fn surface_rank_json_matches_library() {
    let o = pellian(&["surface", "--rank"]);
    assert!(o.status.success());
    let expected = serde_json::to_string(&pellian_core::surface::intersection_rank_check()).unwrap();
    assert_eq!(stdout(&o).trim(), expected);
    let j: serde_json::Value = serde_json::from_str(&expected).unwrap();
    for key in ["rank", "boundary_rank", "rho_U", "b", "exponent"] {
        assert!(j.get(key).is_some(), "{key}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["hooley", "--x", "100", "--alpha", "abc"][..],
        &["classnumber", "--d", "5", "--family", "3"],
        &["surface"],
        &["count"],
        &["frobnicate"],
        &["--partitions", "0", "count", "--B", "10"],
    ] {
        let o = pellian(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = pellian(&["pell", "49"]);
    assert_eq!(o.status.code(), Some(2));
    let body: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(body["error"], "perfect_square");
}

#[test]
fn computation_failures_exit_1_with_json() {
    let o = pellian(&["classnumber", "--d", "1000", "--l-target", "1e-14"]);
    assert_eq!(o.status.code(), Some(1));
    let body: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(body["error"], "precision_unavailable");
    assert!(body["message"].as_str().unwrap().contains("1e-14"));
}

#[test]
fn cli_errors_map_to_codes() {
    let unreachable = CliError::Compute(pellian_core::Error::TargetUnreachable {
        d: 7,
        target: 1e-9,
        needed: 10,
        cap: 5,
    });
    assert_eq!(unreachable.exit_code(), 1);
    assert!(unreachable.to_json().contains("\"target_unreachable\""));
    assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
}

#[test]
fn partitions_do_not_change_artifacts() {
    let cases: [&[&str]; 7] = [
        &["count", "--B", "10,500,3000"],
        &["hooley", "--x", "1000,5000", "--alpha", "1/3"],
        &["classnumber", "--family", "120"],
        &["surface", "--B", "40"],
        &["diagnostics", "--Z", "300"],
        &["surface", "--lift-sweep", "500"],
        &["pell", "2", "--to", "200"],
    ];
    for args in cases {
        let one = artifact(&[args, &["--partitions", "1"][..]].concat());
        let eight = artifact(&[args, &["--partitions", "8"][..]].concat());
        let again = artifact(&[args, &["--partitions", "1"][..]].concat());
        assert_eq!(one, eight, "{args:?}");
        assert_eq!(one, again, "{args:?}");
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("n.csv");
    fs::write(&cfg, format!(r#"{{"partitions": 3, "out": {:?}}}"#, out.to_str().unwrap())).unwrap();
    let o = pellian(&["--config", cfg.to_str().unwrap(), "count", "--B", "10"]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "B,N,strategy,seconds\n10,28,per_d,\n");

    fs::write(&cfg, r#"{"partitions": 2, "colour": "blue"}"#).unwrap();
    let o = pellian(&["--config", cfg.to_str().unwrap(), "count", "--B", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let body: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(body["error"], "config");
}

fn cache_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn cache_empty_file_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.jsonl");
    fs::write(&p, "").unwrap();
    let c = Cache::load(&p).unwrap();
    assert!(c.is_empty());
    assert_eq!(c.rejected, 0);
    assert!(Cache::load(&dir.path().join("missing")).unwrap().is_empty());
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.jsonl");
    let mut c = Cache::load(&p).unwrap();
    for d in [2u64, 13, 61, 94] {
        c.fundamental(d).unwrap();
    }
    c.fundamental(61).unwrap();
    assert_eq!(c.appended, 4);
    let before: Vec<CacheRecord> = c.records().collect();
    let again = Cache::load(&p).unwrap();
    assert_eq!(again.records().collect::<Vec<_>>(), before);
    assert_eq!(again.rejected, 0);
    assert_eq!(again.get(61).unwrap().0, fundamental_solution(61).unwrap());
    assert_eq!(again.get(61).unwrap().1, -1);
    assert_eq!(again.get(94).unwrap().1, 1);
    // reloading twice changes nothing
    assert_eq!(Cache::load(&p).unwrap().records().collect::<Vec<_>>(), before);
    assert_eq!(cache_lines(&p).len(), 4);
}

#[test]
fn cache_rejects_tampered_and_garbage_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.jsonl");
    let mut c = Cache::load(&p).unwrap();
    c.fundamental(61).unwrap();
    c.fundamental(7).unwrap();
    let mut lines = cache_lines(&p);
    // 1766319049 -> 1766319048
    lines[0] = lines[0].replace("1766319049", "1766319048");
    lines.push("{not json".into());
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    let c = Cache::load(&p).unwrap();
    assert_eq!(c.rejected, 2);
    assert!(c.get(61).is_none());
    assert_eq!(c.get(7).unwrap().0.t.to_string(), "8");
}

#[test]
fn cache_version_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.jsonl");
    let rec = format!(
        r#"{{"schema_version":{},"d":7,"t1":"8","u1":"3","norm_pm":1}}"#,
        SCHEMA_VERSION + 1
    );
    fs::write(&p, rec + "\n").unwrap();
    assert!(matches!(Cache::load(&p), Err(CliError::Cache(_))));
    let o = Command::new(env!("CARGO_BIN_EXE_pellian"))
        .args(["pell", "7"])
        .env("PELLIAN_CACHE", &p)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn warm_cache_equals_cold() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.jsonl");
    let cold = artifact(&["pell", "2", "--to", "400"]);
    let filling = artifact(&["pell", "2", "--to", "400", "--cache", p.to_str().unwrap()]);
    let n = cache_lines(&p).len();
    let warm = artifact(&["pell", "2", "--to", "400", "--cache", p.to_str().unwrap()]);
    assert_eq!(cold, filling);
    assert_eq!(cold, warm);
    assert_eq!(cache_lines(&p).len(), n);
    assert_eq!(n, (2..=400u64).filter(|d| !pellian_core::arith::is_square_u64(*d)).count());
    // the environment variable selects the same cache
    let o = Command::new(env!("CARGO_BIN_EXE_pellian"))
        .args(["pell", "2", "--to", "400", "--out", "-"])
        .env("PELLIAN_CACHE", &p)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), cold);
}

#[test]
fn other_commands_run() {
    let s = stdout(&pellian(&["diagnostics", "--golubeva", "1"]));
    assert!(s.contains("rhs = 170 + 39 sqrt(19)"), "{s}");
    let s = stdout(&pellian(&["surface", "--lift", "2"]));
    assert!(s.contains("lift = (2, -3, 2)"), "{s}");
    let s = stdout(&pellian(&["surface", "--membership", "-8,3,2"]));
    assert_eq!(s, "verdict = not_on_any_integer_curve\n");
    let s = stdout(&pellian(&["surface", "--nucirc", "16"]));
    assert!(s.contains(": 1\n"), "{s}");
    let csv = artifact(&["envelope", "--resolution", "12"]);
    assert!(csv.starts_with("k,exponent\n"));
    assert_eq!(csv.lines().count(), 13);
    let j: serde_json::Value = serde_json::from_str(&artifact(&["classnumber", "--d", "19"])).unwrap();
    assert_eq!(j["h_narrow"], 2);
    let s = stdout(&pellian(&["classnumber", "--reconcile", "60"]));
    assert!(s.contains("convention = Narrow"), "{s}");
    let s = stdout(&pellian(&["count", "--B", "64", "--dyadic"]));
    assert!(s.contains("dyadic B = 64"), "{s}");
    let s = stdout(&pellian(&["pell", "7", "--n", "2"]));
    assert!(s.contains("t = 127\nu = 48\n"), "{s}");
}

#[test]
fn growth_diagnostics() {
    let s = stdout(&pellian(&["diagnostics", "--growth", "1000"]));
    let g = pellian_core::pell::log_eps_growth(1000, 1).unwrap();
    assert!(s.contains(&format!("at d = {}", g.argmax_d)), "{s}");
    let csv = artifact(&["diagnostics", "--qf"]);
    assert!(csv.starts_with("s,z,count,ratio\n10,100,"), "{csv}");
    assert_eq!(csv.lines().count(), 10);
}
