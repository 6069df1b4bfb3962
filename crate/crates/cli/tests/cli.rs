mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{manifest_dir, without_runtime};
use serde_json::Value;

fn primel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primel"))
        .args(args)
        .current_dir(manifest_dir())
        .env_remove("PRIMEL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = primel(&full);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows(args: &[&str]) -> Vec<Value> {
    without_runtime(json(args)["rows"].as_array().unwrap().clone())
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.lines().last().expect("an error record")).unwrap()
}

fn assert_exit(args: &[&str], code: i32) -> Value {
    let out = primel(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let rec = error_record(&out);
    assert_eq!(rec["exit_code"], code);
    rec
}

fn only_file(dir: &Path) -> std::path::PathBuf {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1, "{files:?}");
    files.pop().unwrap()
}

#[test]
fn prime_count_of_degree_three_over_f3() {
    let out = primel(&["primes", "--q", "3", "--deg", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next(), Some("q,deg,census,enumerated"));
    assert_eq!(lines.next(), Some("3,3,8,8"));
}

#[test]
fn coefficient_identity_over_f5() {
    let r = &rows(&["euler-check", "--q", "5"])[0];
    assert_eq!(r["coefficient_identity_lhs"], "8/5");
    assert_eq!(r["coefficient_identity_rhs"], "8/5");
}

#[test]
fn genus_one_second_moment_over_f3_is_five() {
    let r = &rows(&["sweep-moment2", "--q", "3", "--g", "1"])[0];
    assert_eq!(r["census"], 8);
    assert_eq!(
        r["empirical"],
        serde_json::json!({"num": ["5", "0", 0], "den": "1"})
    );
}

#[test]
fn exit_codes() {
    assert_eq!(assert_exit(&["bogus"], 2)["error"], "config");
    assert_exit(&["primes", "--q", "4", "--deg", "3"], 2);
    assert_exit(&["lpoly", "--q", "3", "--g", "1"], 2);
    assert_exit(&["primes", "--q", "3", "--deg", "3", "--threads", "0"], 2);
    assert_eq!(
        assert_exit(&["sweep-moment2", "--q", "7", "--g", "6"], 3)["error"],
        "infeasible"
    );
}

#[test]
fn help_succeeds() {
    let out = primel(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep-moment2"));
}

#[test]
fn provenance_omits_thread_count() {
    let out = primel(&["primes", "--q", "3", "--deg", "2", "--threads", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Value = serde_json::from_str(&text.lines().next().unwrap()[2..]).unwrap();
    assert_eq!(header["command"], "primes");
    assert_eq!(header["q"], 3);
    assert!(header.get("threads").is_none());
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for cmd in [
        &["sweep-moment2", "--q", "3", "--g", "2"][..],
        &["weil-check", "--q", "3", "--g", "2"][..],
        &["ec-twist", "--curve", "curves/c2.json", "--g", "1"][..],
    ] {
        let mut one = cmd.to_vec();
        one.extend(["--threads", "1"]);
        let mut two = cmd.to_vec();
        two.extend(["--threads", "2"]);
        let (a, b) = (json(&one), json(&two));
        assert_eq!(a["provenance"], b["provenance"], "{cmd:?}");
        assert_eq!(rows(&one), rows(&two), "{cmd:?}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = ["primes", "--q", "5", "--deg", "4", "--upto"];
    let stdout = primel(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.display().to_string();
    with_out.extend(["--out", &p]);
    assert!(primel(&with_out).status.success());
    // Same rows; the provenance differs only in recording --out.
    let written = std::fs::read_to_string(&path).unwrap();
    let stdout = String::from_utf8(stdout).unwrap();
    assert_eq!(
        written.lines().skip(1).collect::<Vec<_>>(),
        stdout.lines().skip(1).collect::<Vec<_>>()
    );
    assert!(written.lines().next().unwrap().contains("report.csv"));
}

#[test]
fn dirichlet_cache_round_trip_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let cold = rows(&["sweep-moment2", "--q", "3", "--g", "2", "--no-cache"]);
    let first = rows(&["sweep-moment2", "--q", "3", "--g", "2", "--cache", &d]);
    assert_eq!(cold, first);
    let file = only_file(dir.path());
    let full = std::fs::read(&file).unwrap();

    let warm = rows(&["sweep-moment2", "--q", "3", "--g", "2", "--cache", &d]);
    assert_eq!(warm, first);
    assert_eq!(std::fs::read(&file).unwrap(), full);

    // Keep the first ten records and a correct checksum: an interrupted run.
    let text = String::from_utf8(full.clone()).unwrap();
    let records: Vec<&str> = text.lines().skip(1).take(10).collect();
    let body = records.iter().map(|l| format!("{l}\n")).collect::<String>();
    let mut header: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    header["records"] = 10.into();
    header["sha256"] = hex_sha256(body.as_bytes()).into();
    std::fs::write(&file, format!("{header}\n{body}")).unwrap();

    let resumed = rows(&["sweep-moment2", "--q", "3", "--g", "2", "--cache", &d]);
    assert_eq!(resumed, first);
    assert_eq!(std::fs::read(&file).unwrap(), full);
}

fn hex_sha256(bytes: &[u8]) -> String {
    use sha2::Digest;
    hex::encode(sha2::Sha256::digest(bytes))
}

#[test]
fn corrupt_or_foreign_cache_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let args = ["sweep-moment2", "--q", "3", "--g", "1", "--cache", &d];
    assert!(primel(&args).status.success());
    let file = only_file(dir.path());
    let good = std::fs::read_to_string(&file).unwrap();

    std::fs::write(&file, good.replacen("\"c\":[1,", "\"c\":[2,", 1)).unwrap();
    let rec = assert_exit(&args, 5);
    assert_eq!(rec["error"], "cache");

    std::fs::write(&file, good.replacen("\"v\":1", "\"v\":2", 1)).unwrap();
    let rec = assert_exit(&args, 5);
    assert!(rec["message"].as_str().unwrap().contains("--no-cache"));

    let mut no_cache = args[..5].to_vec();
    no_cache.push("--no-cache");
    assert!(primel(&no_cache).status.success());

    std::fs::write(&file, &good).unwrap();
    assert!(primel(&args).status.success());
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_primel"))
        .args(["sweep-moment2", "--q", "3", "--g", "1"])
        .env("PRIMEL_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let file = only_file(dir.path());
    assert!(file.ends_with("dirichlet-q3-g1-standard.jsonl"));
}

#[test]
fn twist_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let args = [
        "ec-twist",
        "--curve",
        "curves/c1.json",
        "--g",
        "1",
        "--cache",
        &d,
    ];
    let first = rows(&args);
    let file = only_file(dir.path());
    let bytes = std::fs::read(&file).unwrap();
    assert_eq!(rows(&args), first);
    assert_eq!(std::fs::read(&file).unwrap(), bytes);

    let search = rows(&[
        "rank-search",
        "--curve",
        "curves/c1.json",
        "--g",
        "1",
        "--cache",
        &d,
    ]);
    assert_eq!(search[0]["witness"], serde_json::json!([1, 2, 0, 1]));
    assert_eq!(std::fs::read(&file).unwrap(), bytes);
}

#[test]
fn tampered_twist_rank_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let args = [
        "ec-twist",
        "--curve",
        "curves/c1.json",
        "--g",
        "1",
        "--cache",
        &d,
    ];
    rows(&args);
    let file = only_file(dir.path());
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut rec: Value = serde_json::from_str(&lines[1]).unwrap();
    rec["rank"] = (rec["rank"].as_u64().unwrap() + 2).into();
    lines[1] = rec.to_string();
    let body: String = lines[1..].iter().map(|l| format!("{l}\n")).collect();
    let mut header: Value = serde_json::from_str(&lines[0]).unwrap();
    header["sha256"] = hex_sha256(body.as_bytes()).into();
    std::fs::write(&file, format!("{header}\n{body}")).unwrap();
    assert_eq!(assert_exit(&args, 5)["error"], "cache");
}

#[test]
fn curve_arguments_are_validated() {
    assert_exit(&["ec-lpoly", "--q", "5"], 2);
    assert_exit(&["ec-lpoly", "--curve", "curves/c1.json", "--q", "7"], 2);
    assert_exit(&["ec-lpoly", "--curve", "curves/missing.json"], 2);
    let inline = rows(&["ec-lpoly", "--q", "5", "--a", "1", "--b", "1,1"]);
    let file = rows(&["ec-lpoly", "--curve", "curves/c1.json"]);
    assert_eq!(inline, file);
}
