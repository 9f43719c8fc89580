//! JSON system description: `{"name": ..., "D": [[..]], "H": [[..]], "A": [[..]]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sparse_ctrb::{Matrix, SystemModel};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid system file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files always serialize")
    }

    pub fn from_model(model: &SystemModel, name: Option<String>) -> Self {
        SystemFile {
            name,
            d: model.d().to_rows(),
            h: model.h().to_rows(),
            a: model.a().map(Matrix::to_rows),
        }
    }

    pub fn model(&self) -> Result<SystemModel, CliError> {
        let d = matrix("D", &self.d)?;
        let h = matrix("H", &self.h)?;
        let a = self.a.as_deref().map(|rows| matrix("A", rows)).transpose()?;
        SystemModel::new(d, h, a).map_err(|e| CliError::Input(format!("inconsistent system: {e}")))
    }
}

fn matrix(key: &str, rows: &[Vec<f64>]) -> Result<Matrix, CliError> {
    Matrix::from_rows(rows).map_err(|e| CliError::Input(format!("\"{key}\": {e}")))
}

/// A state or output vector stored as a JSON array of numbers.
pub fn load_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: expected a JSON array of numbers: {e}", path.display())))
}
