//! Query generation and pattern files.

mod json;
mod provenance;
mod rdf;
mod sparql;

pub use json::{graph_view, pattern_id, serialize_json, Edge, GraphView, Node, PatternFile, PatternRecord};
pub use provenance::{append_selection_provenance, check_lineage, ProvenanceEvent};
pub use rdf::{serialize_rdf, VOCAB};
pub use sparql::{to_sparql, SparqlQuery};

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::miner::{MinerConfig, RunStatus};
use crate::ranges::RangeConfig;

pub const TOOL_VERSION: &str = concat!("gpminer ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InputDigest {
    /// File name without directories.
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        InputDigest {
            name: name.into(),
            sha256: hex(&Sha256::digest(bytes)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hyperparameters {
    #[serde(flatten)]
    pub miner: MinerConfig,
    pub seed: u64,
    pub type_predicate: String,
    pub value_ranges: RangeConfig,
}

/// Where a pattern file came from.
///
/// The run id hashes the tool version, the inputs, and the hyperparameters;
/// worker count and wall-clock times do not enter it, so equal runs get
/// equal ids and byte-identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiscoveryRun {
    pub run_id: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub hyperparameters: Hyperparameters,
    pub last_complete_depth: usize,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished: Option<String>,
}

impl DiscoveryRun {
    pub fn new(inputs: Vec<InputDigest>, hyperparameters: Hyperparameters) -> Self {
        let mut run = DiscoveryRun {
            run_id: String::new(),
            tool_version: TOOL_VERSION.to_string(),
            inputs,
            hyperparameters,
            last_complete_depth: 0,
            status: RunStatus::Running,
            started: None,
            finished: None,
        };
        run.run_id = run.expected_id();
        run
    }

    /// The id this record should carry.
    pub fn expected_id(&self) -> String {
        let identity = serde_json::json!({
            "toolVersion": self.tool_version,
            "inputs": self.inputs,
            "hyperparameters": self.hyperparameters,
        });
        hex(&Sha256::digest(identity.to_string().as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a sibling temporary file so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.partial"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
