#![allow(dead_code)]

use std::path::{Path, PathBuf};

use clap::Parser;
use primel_cli::{build_artifact, Cli, CliResult};
use serde_json::Value;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the command in-process and returns its rows. Arguments starting
/// with `curves/` are resolved against the crate directory.
pub fn run_rows(argv: &[&str]) -> CliResult<Vec<Value>> {
    let mut full = vec!["primel".to_string()];
    full.extend(argv.iter().map(|a| {
        if a.starts_with("curves/") {
            manifest_dir().join(a).display().to_string()
        } else {
            a.to_string()
        }
    }));
    let cli = Cli::try_parse_from(full).expect("arguments parse");
    Ok(build_artifact(&cli)?.rows)
}

/// Rows with every `runtime_seconds` field removed.
pub fn without_runtime(mut rows: Vec<Value>) -> Vec<Value> {
    for r in &mut rows {
        if let Value::Object(m) = r {
            m.shift_remove("runtime_seconds");
        }
    }
    rows
}

/// Compares `rows` with a committed fixture byte for byte. With
/// `PRIMEL_BLESS=1` the fixture is rewritten instead.
pub fn check_fixture(name: &str, argv: &[&str], rows: &[Value]) -> Result<(), String> {
    let path = manifest_dir()
        .join("fixtures/v1")
        .join(format!("{name}.json"));
    let doc = serde_json::json!({ "argv": argv, "rows": rows });
    let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    if std::env::var_os("PRIMEL_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
        return Ok(());
    }
    let stored = read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if stored == text {
        Ok(())
    } else {
        Err(format!(
            "{} differs from the fresh run:\n{text}",
            path.display()
        ))
    }
}

fn read(path: &Path) -> std::io::Result<String> {
    std::fs::read_to_string(path)
}
