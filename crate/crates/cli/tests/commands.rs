use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bellcause_core::pr_box;
use sha2::{Digest, Sha256};

fn bellcause(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellcause")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_polytope_accepts_enumerated_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellcause(dir.path(), &["verify-polytope"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&dir.path().join("verify_polytope.csv"));
    assert_eq!(table.len(), 2);
    for row in table {
        assert_eq!(row[2], "512");
        assert_eq!(num(&row[3]), 4.0);
        assert_eq!(row[4], "0");
    }
}

#[test]
fn corrupted_vertex_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("export");
    let out = bellcause(&export, &["export-vertices", "--scenario", "3,3,2,2", "--format", "coordinates"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(export.join("vertices.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 513);

    // Alice always outputs 0; Bob anti-correlates on the terms with a minus
    // sign, which drives the three-setting functional to 6.
    let minus = [(0, 2), (1, 1), (2, 0)];
    let corrupted: Vec<String> = lines[0]
        .split(',')
        .map(|name| {
            let d: Vec<usize> = name.split('_').skip(1).map(|t| t[1..].parse().unwrap()).collect();
            let (a, b, x, y) = (d[0], d[1], d[2], d[3]);
            let want_b = usize::from(minus.contains(&(x, y)));
            if a == 0 && b == want_b { "1" } else { "0" }.to_string()
        })
        .collect();
    lines[7] = corrupted.join(",");
    let file = dir.path().join("corrupted.csv");
    fs::write(&file, lines.join("\n") + "\n").unwrap();

    let check = dir.path().join("check");
    let out = bellcause(&check, &["verify-polytope", "--vertices", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 7: 6"), "{stderr}");
    let violations = rows(&check.join("violations.csv"));
    assert_eq!(violations.len(), 1);
    assert!((num(&violations[0][1]) - 6.0).abs() < 1e-12);
    assert!(check.join("manifest.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["verify-polytope", "--functional", "chsh"],
        &["noise-floor", "--runs", "10"],
        &["ace-scan", "--gammas", "pie"],
        &["no-such-command"],
    ];
    for args in cases {
        let out = bellcause(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn ace_scan_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellcause(dir.path(), &["ace-scan", "--gammas", "0,pi/4", "--runs", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("ace_scan.csv"));
    let zero = &table[0];
    assert_eq!(num(zero[2].as_str()), 0.0);
    assert_eq!(num(&zero[3]), 0.0);
    let max = &table[1];
    assert!((num(&max[1]) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!((num(&max[2]) - (2f64.sqrt() - 1.0)).abs() < 1e-9);
    assert!((num(&max[3]) - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    for row in &table {
        assert!(num(&row[5]) <= num(&row[4]) && num(&row[4]) <= num(&row[6]));
        assert_eq!(row[7], "optimal");
    }
}

#[test]
fn reruns_are_byte_identical_and_manifest_digests_match() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "--json", "noise-floor", "--runs", "1000", "--counts", "20000"];
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    assert_eq!(bellcause(&first, &args).status.code(), Some(0));
    assert_eq!(bellcause(&second, &args).status.code(), Some(0));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 4);
    for f in files {
        let name = f["name"].as_str().unwrap();
        let bytes = fs::read(first.join(name)).unwrap();
        assert_eq!(bytes, fs::read(second.join(name)).unwrap(), "{name}");
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    assert_eq!(fs::read(first.join("manifest.json")).unwrap(), fs::read(second.join("manifest.json")).unwrap());
    assert_eq!(manifest["seed"], 11);
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bellcause(dir.path(), &["--json", "threshold-scan", "--gammas", "pi/4"]).status.code(), Some(0));
    let csv = rows(&dir.path().join("thresholds.csv"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("thresholds.json")).unwrap()).unwrap();
    let json = json.as_array().unwrap();
    assert_eq!(csv.len(), json.len());
    assert_eq!(num(&csv[0][2]), json[0]["critical_eta"].as_f64().unwrap());
    assert_eq!(num(&csv[0][3]), json[0]["critical_v"].as_f64().unwrap());
    assert_eq!(json[0]["functional"], "s3");
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    let common = ["noise-floor", "--runs", "1500", "--counts", "10000"];
    let mut args1 = vec!["--threads", "1"];
    args1.extend(common);
    let mut args4 = vec!["--threads", "4"];
    args4.extend(common);
    assert_eq!(bellcause(&one, &args1).status.code(), Some(0));
    assert_eq!(bellcause(&four, &args4).status.code(), Some(0));
    for name in ["ace_distribution.csv", "summary.csv"] {
        assert_eq!(fs::read(one.join(name)).unwrap(), fs::read(four.join(name)).unwrap());
    }
}

#[test]
fn s3_scan_fixed_and_optimized() {
    let dir = tempfile::tempdir().unwrap();
    let fixed = dir.path().join("fixed");
    assert_eq!(bellcause(&fixed, &["s3-scan", "--gammas", "pi/4"]).status.code(), Some(0));
    let row = &rows(&fixed.join("s3_scan.csv"))[0];
    assert!((num(&row[1]) - 1.5 * 3f64.sqrt() * 2.0).abs() < 1e-12);
    assert!(row[2].is_empty());

    let opt = dir.path().join("opt");
    let gammas = "pi/64,pi/32,pi/16,pi/8,pi/4,3pi/8,7pi/16";
    assert_eq!(bellcause(&opt, &["s3-scan", "--mode", "optimized", "--gammas", gammas]).status.code(), Some(0));
    for row in rows(&opt.join("s3_scan.csv")) {
        assert!(num(&row[1]) > 4.0, "{row:?}");
    }
}

#[test]
fn min_ace_of_pr_box_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pr.json");
    fs::write(&input, pr_box().to_json().unwrap()).unwrap();
    let out = bellcause(&dir.path().join("run"), &["min-ace", "--behavior", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let row = &rows(&dir.path().join("run/min_ace.csv"))[0];
    assert_eq!(row[0], "optimal");
    assert!((num(&row[1]) - 1.0).abs() < 1e-9);
    assert_eq!(num(&row[2]), 4.0);
    assert_eq!(num(&row[3]), 1.0);
}

#[test]
fn export_vertices_lists_all_strategies() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bellcause(dir.path(), &["export-vertices"]).status.code(), Some(0));
    assert_eq!(rows(&dir.path().join("vertices.csv")).len(), 64);
}

#[test]
fn simulate_writes_interventional_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bellcause(dir.path(), &["simulate", "--intervene"]).status.code(), Some(0));
    let table = rows(&dir.path().join("counts.csv"));
    assert_eq!(table.len(), 32);
    for row in table {
        let count: u64 = row[5].parse().unwrap();
        if row[2] != row[3] {
            assert_eq!(count, 0);
        }
    }
}
