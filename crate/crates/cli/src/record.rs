use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RecordFamily {
    Grid,
    Diag3,
    DiagonalTheorem2,
    Diagonal,
    Fsl,
}

/// One evaluation or optimization run, written as a JSON line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub dim: usize,
    pub family: RecordFamily,
    #[serde(rename = "type")]
    pub type_label: Option<String>,
    pub method: Option<String>,
    pub seed: Option<u64>,
    pub value: f64,
    pub argmax_q: Option<Vec<f64>>,
    pub argmax_p: Option<Vec<f64>>,
    pub evaluations: Option<u64>,
    pub wall_ms: f64,
    pub tool_version: String,
}

impl RunRecord {
    pub fn new(command: &str, dim: usize, family: RecordFamily, value: f64) -> Self {
        RunRecord {
            command: command.to_string(),
            dim,
            family,
            type_label: None,
            method: None,
            seed: None,
            value,
            argmax_q: None,
            argmax_p: None,
            evaluations: None,
            wall_ms: 0.0,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}
