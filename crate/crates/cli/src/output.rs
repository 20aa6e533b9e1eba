use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use diracsim::Error;

/// Why a command stopped; each kind has its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// Configuration or input rejected before any computation.
    Config(String),
    /// A solver did not converge or lost admissibility.
    Solver(String),
    /// A computed invariant or consistency check failed.
    Invariant(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Invariant(_) => 4,
            Failure::Io(_) => 1,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config_rejected",
            Failure::Solver(_) => "solver_failure",
            Failure::Invariant(_) => "invariant_failure",
            Failure::Io(_) => "io_error",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) | Failure::Invariant(m) | Failure::Io(m) => m,
        }
    }

    /// Machine-readable one-line JSON record.
    pub fn record(&self) -> String {
        serde_json::json!({ "status": self.status(), "exit_code": self.code(), "error": self.message() }).to_string()
    }

    pub fn write_record(&self, dir: &Path) {
        // Best effort: the record also goes to stderr.
        if fs::create_dir_all(dir).is_ok() {
            let _ = fs::write(dir.join("failure.json"), self.record() + "\n");
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            Error::Io(io) => Failure::Io(io.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn write_lines(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<(), Failure> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}
