//! Hash-chained record of the selections saved from a pattern file.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::hex;
use super::json::{PatternFile, PatternRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProvenanceEvent {
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    /// Facet and search state at the time of saving.
    pub filter: Value,
    pub count_before: usize,
    pub count_after: usize,
    /// Hash of the previous event, or the run id for the first one.
    pub previous: String,
    pub hash: String,
}

impl ProvenanceEvent {
    fn digest(&self) -> String {
        let body = serde_json::json!({
            "action": self.action,
            "timestamp": self.timestamp,
            "filter": self.filter,
            "countBefore": self.count_before,
            "countAfter": self.count_after,
            "previous": self.previous,
        });
        hex(&Sha256::digest(body.to_string().as_bytes()))
    }
}

/// Checks that the file names the run it came from and that its events
/// chain back to that run unaltered.
pub fn check_lineage(file: &PatternFile) -> Result<()> {
    if file.run.run_id.is_empty() {
        return Err(Error::Lineage("run id is missing".into()));
    }
    if file.run.run_id != file.run.expected_id() {
        return Err(Error::Lineage("run id does not match the run record".into()));
    }
    let mut previous = &file.run.run_id;
    for (i, e) in file.provenance.iter().enumerate() {
        if &e.previous != previous || e.hash != e.digest() {
            return Err(Error::Lineage(format!("provenance event {i} is out of chain")));
        }
        previous = &e.hash;
    }
    Ok(())
}

/// Keeps the patterns accepted by `keep`, in order, and records the
/// selection as a new provenance event.
pub fn append_selection_provenance(
    file: &mut PatternFile,
    filter: Value,
    timestamp: Option<String>,
    keep: impl Fn(&PatternRecord) -> bool,
) -> Result<&ProvenanceEvent> {
    check_lineage(file)?;
    let count_before = file.patterns.len();
    file.patterns.retain(|p| keep(p));
    let previous = file
        .provenance
        .last()
        .map_or_else(|| file.run.run_id.clone(), |e| e.hash.clone());
    let mut event = ProvenanceEvent {
        action: "selection".into(),
        timestamp,
        filter,
        count_before,
        count_after: file.patterns.len(),
        previous,
        hash: String::new(),
    };
    event.hash = event.digest();
    file.provenance.push(event);
    Ok(file.provenance.last().expect("just pushed"))
}
