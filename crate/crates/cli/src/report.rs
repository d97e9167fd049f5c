//! Errors, exit codes and output files.

use std::fs;
use std::path::{Path, PathBuf};

use saddleloop::{Error, ErrorClass};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub module: &'static str,
    pub operation: &'static str,
    pub kind: String,
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn core(module: &'static str, operation: &'static str, e: Error) -> Self {
        Self {
            module,
            operation,
            kind: e.kind().to_string(),
            class: e.class(),
            message: e.to_string(),
        }
    }

    pub fn validation(module: &'static str, operation: &'static str, message: String) -> Self {
        Self {
            module,
            operation,
            kind: "Precondition".into(),
            class: ErrorClass::Validation,
            message,
        }
    }

    pub fn io(operation: &'static str, path: &Path, e: std::io::Error) -> Self {
        Self {
            module: "cli",
            operation,
            kind: "Io".into(),
            class: ErrorClass::Validation,
            message: format!("{}: {e}", path.display()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Validation => 2,
            ErrorClass::Numeric => 3,
            ErrorClass::Regime => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        let class = match self.class {
            ErrorClass::Validation => "validation",
            ErrorClass::Numeric => "numeric",
            ErrorClass::Regime => "regime",
        };
        json!({
            "error": {
                "module": self.module,
                "operation": self.operation,
                "kind": self.kind,
                "class": class,
                "message": self.message,
                "exit_code": self.exit_code(),
            }
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}::{}: {}", self.module, self.operation, self.message)
    }
}

impl std::error::Error for CliError {}

/// Output directory with deterministic writers.
#[derive(Debug, Clone)]
pub struct OutDir {
    pub root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io("create_output_dir", root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| CliError::io("write_output", &p, e))
    }

    pub fn write_json(&self, name: &str, v: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
        s.push('\n');
        self.write_text(name, &s)
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<(), CliError> {
        let p = self.path(name);
        let err = |e: csv::Error| {
            CliError::validation("cli", "write_output", format!("{}: {e}", p.display()))
        };
        let mut w = csv::Writer::from_path(&p).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(row.iter().map(|v| (v + 0.0).to_string()))
                .map_err(err)?;
        }
        w.flush().map_err(|e| CliError::io("write_output", &p, e))
    }
}

/// JSON number for finite values, `null` otherwise.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
