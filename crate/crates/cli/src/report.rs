use std::io::Write;
use std::path::Path;

use copolarity_core::numkernel::TolerancePolicy;
use copolarity_core::Check;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{CliError, RunConfig};

/// What a command hands back: free-form results plus pass/fail checks.
pub struct Section {
    pub results: Value,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_kind: String,
    pub input_sha256: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: TolerancePolicy,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub(crate) fn new(config: &RunConfig, text: &str, kind: &str, tolerances: TolerancePolicy) -> Self {
        Self {
            command: config.command.name().into(),
            input_kind: kind.into(),
            input_sha256: hex::encode(Sha256::digest(text.as_bytes())),
            seed: config.seed,
            samples: config.samples,
            tolerances,
            results: Value::Null,
            checks: Vec::new(),
            passed: false,
        }
    }

    pub(crate) fn fill(&mut self, section: Section) {
        self.passed = section.checks.iter().all(|c| c.passed);
        self.results = section.results;
        self.checks = section.checks;
    }

    pub(crate) fn fail_with(&mut self, err: &CliError) {
        self.results = serde_json::json!({ "error": err.to_string() });
        self.checks = vec![Check::flag("pipeline_completed", false)];
        self.passed = false;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the report in one step: a temporary file in the target
    /// directory renamed over the destination.
    pub(crate) fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = self.to_json();
        let err = |source| CliError::Write {
            path: path.to_path_buf(),
            source,
        };
        if path == Path::new("-") {
            let mut out = std::io::stdout().lock();
            return out.write_all(text.as_bytes()).map_err(err);
        }
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
        tmp.write_all(text.as_bytes()).map_err(err)?;
        tmp.persist(path).map_err(|e| err(e.error))?;
        Ok(())
    }
}
