//! Shared plumbing for the acceptance suite: criterion verdict lines that
//! stay visible under the test harness's output capture, and experiment
//! fixtures used by several criteria.

use std::io::Write;
use std::path::{Path, PathBuf};

use autosmote::engine::{make_toy, run, write_toy_csv, ExperimentConfig, RunOutcome, ToyConfig};

/// Print a line directly to the process stdout, bypassing libtest's output
/// capture, so every criterion leaves one visible verdict line even when it
/// passes.
pub fn status(line: impl AsRef<str>) {
    if let Ok(mut out) = std::fs::OpenOptions::new().append(true).open("/dev/stdout") {
        let _ = writeln!(out, "{}", line.as_ref());
    } else {
        println!("{}", line.as_ref());
    }
}

/// Emit the verdict line for one criterion and fail the test if it did not
/// hold.
pub fn verdict(criterion: u32, ok: bool, detail: &str) {
    let word = if ok { "PASS" } else { "FAIL" };
    status(format!("acceptance {criterion:02} {word}  {detail}"));
    assert!(ok, "criterion {criterion:02} failed: {detail}");
}

/// Write the default two-cluster toy dataset (450 majority / 35 minority)
/// into `dir` and return the CSV path.
pub fn toy_csv(dir: &Path) -> PathBuf {
    let ds = make_toy(&ToyConfig::default()).unwrap();
    let path = dir.join("toy.csv");
    write_toy_csv(&ds, &path).unwrap();
    path
}

/// The bundled breast-cancer diagnostic table (569 rows, 30 features).
pub fn breast_cancer_csv() -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "datasets", "breast_cancer.csv"]
        .iter()
        .collect()
}

/// Parse a TOML experiment config and execute it.
pub fn run_toml(text: &str) -> RunOutcome {
    let config = ExperimentConfig::from_toml_str(text).unwrap();
    config.validate().unwrap();
    run(&config).unwrap()
}
