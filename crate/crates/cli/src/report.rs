//! Report envelope shared by every subcommand.
//!
//! Keys are emitted in sorted order and `elapsed_ms` is `null` unless timing
//! was requested, so identical invocations give byte-identical output.

use serde_json::{json, Map, Value};
use sparse_ctrb::matcore::Complex64;
use sparse_ctrb::{Matrix, ModelWarning, SystemModel, Tolerance};

pub const SCHEMA_VERSION: u32 = 1;

/// The published JSON Schema for reports.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

/// The published JSON Schema for system files.
pub const SYSTEM_SCHEMA: &str = include_str!("../schema/system.schema.json");

pub struct Report {
    command: &'static str,
    fields: Map<String, Value>,
    witnesses: Value,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            fields: Map::new(),
            witnesses: Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.to_owned(), value);
        self
    }

    pub fn witnesses(&mut self, value: Value) -> &mut Self {
        self.witnesses = value;
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) -> &mut Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn finish(
        self,
        name: Option<&str>,
        sys: &SystemModel,
        tol: &Tolerance,
        elapsed_ms: Option<f64>,
    ) -> Value {
        let mut warnings = self.warnings;
        for w in sys.warnings() {
            match w {
                ModelWarning::OutputNotSmallerThanState { m, n } => {
                    warnings.push(format!("output dimension m={m} is not smaller than the state dimension n={n}"))
                }
            }
        }
        let mut out = self.fields;
        out.insert("schema_version".into(), json!(SCHEMA_VERSION));
        out.insert("command".into(), json!(self.command));
        out.insert(
            "system".into(),
            json!({ "name": name, "n": sys.n(), "l": sys.l(), "m": sys.m() }),
        );
        out.insert("tolerance".into(), tolerance(tol));
        out.insert("witnesses".into(), self.witnesses);
        out.insert("warnings".into(), json!(warnings));
        out.insert("elapsed_ms".into(), json!(elapsed_ms));
        Value::Object(out)
    }
}

pub fn tolerance(tol: &Tolerance) -> Value {
    json!({
        "rank_rel": tol.rank_rel,
        "eig_cluster": tol.eig_cluster,
        "residual_abs": tol.residual_abs,
        "exact": tol.exact,
    })
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn matrix(m: &Matrix) -> Value {
    json!(m.to_rows())
}
