use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::{render, rerun, CliError, Outcome};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One line of a results log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    /// SHA-256 of the command, its parameters and the tool version.
    pub id: String,
    pub command: String,
    /// `{"argv": [...]}`; flags that do not change the result are dropped.
    pub params: Value,
    pub version: String,
    pub seed: Option<u64>,
    pub result: Value,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub elapsed_ms: u64,
}

/// Flags that affect only scheduling or side outputs.
const DROPPED: [&str; 3] = ["--record", "--jobs", "--out"];

fn strip_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if DROPPED.contains(&a.as_str()) {
            skip = true;
            continue;
        }
        if DROPPED.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

pub fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn record_id(command: &str, params: &Value, version: &str) -> String {
    let key = json!({"command": command, "params": params, "version": version});
    hex::encode(Sha256::digest(key.to_string().as_bytes()))
}

impl ExperimentRecord {
    pub fn new(command: &str, argv: &[String], seed: Option<u64>, result: Value, started_at: u64, elapsed_ms: u64) -> Self {
        let params = json!({"argv": strip_argv(argv)});
        ExperimentRecord {
            id: record_id(command, &params, VERSION),
            command: command.into(),
            params,
            version: VERSION.into(),
            seed,
            result,
            started_at,
            elapsed_ms,
        }
    }

    pub fn append(&self, path: &Path) -> Result<(), CliError> {
        let line = serde_json::to_string(self).expect("serializable");
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        writeln!(f, "{line}").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    fn argv(&self) -> Option<Vec<String>> {
        let list = self.params.get("argv")?.as_array()?;
        let mut argv = vec!["rsumset".to_string()];
        for a in list {
            argv.push(a.as_str()?.to_string());
        }
        Some(argv)
    }
}

/// Re-runs every record and compares the serialized results byte for byte.
/// Runs inherit the caller's worker pool.
pub fn replay(path: &Path, format: Format) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("io error: {}: {e}\n", path.display())),
    };
    let mut checked = Vec::new();
    let mut drift = Vec::new();
    let mut mismatched = Vec::new();
    let mut stderr = String::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: ExperimentRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return Outcome::usage(format!("error: line {}: {e}\n", n + 1)),
        };
        if rec.version != VERSION {
            stderr.push_str(&format!("warning: {} was recorded by version {}\n", rec.id, rec.version));
            mismatched.push(json!(rec.id));
        }
        let Some(argv) = rec.argv() else {
            return Outcome::usage(format!("error: line {}: params carry no argv\n", n + 1));
        };
        // Compared as serialized bytes, not as parsed values.
        #[allow(clippy::cmp_owned)]
        let same = match rerun(&argv) {
            Ok(fresh) => fresh.to_string() == rec.result.to_string(),
            Err(e) => {
                stderr.push_str(&format!("{}: {e}\n", rec.id));
                false
            }
        };
        if !same {
            drift.push(json!(rec.id));
        }
        checked.push(json!(rec.id));
    }
    let verdict = if drift.is_empty() { "all-equal" } else { "drift" };
    let v = json!({
        "records": checked.len(),
        "verdict": verdict,
        "drift": drift,
        "versionMismatch": mismatched,
    });
    let failed = verdict != "all-equal";
    let payload = crate::commands::Payload {
        result: v,
        display: None,
        rows: None,
        failed,
    };
    Outcome {
        code: if failed { 1 } else { 0 },
        stdout: render::render(&payload, format),
        stderr,
    }
}
