//! Generation-by-generation extension of base patterns.

mod explore;
mod propagate;

pub use explore::{dedup_check, explore, prune, DedupOutcome, Frontier, LayerClause, PruneReason, Verdict};
pub use propagate::{initial_domain, propagate_domain, reduce};

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{Generation, MinedPattern, PatternStore};
use crate::error::{Error, Result};
use crate::rdf::{KnowledgeGraph, ResourceId};

/// How aggressively the search is cut.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Pruning {
    /// Tombstones, size cuts, and the no-reduction cut on stars.
    #[default]
    Full,
    /// Duplicate detection and the size bound only.
    DedupOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MinerConfig {
    pub min_support: usize,
    /// Highest generation produced; 0 keeps base patterns only.
    pub max_depth: usize,
    pub max_length: usize,
    pub max_width: usize,
    /// Only emit patterns whose clauses each shrink the root domain, with one
    /// generation of grace for object-type tails.
    pub require_reduction: bool,
    pub pruning: Pruning,
    /// Worker threads; 0 uses the ambient pool.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            min_support: 2,
            max_depth: 3,
            max_length: 8,
            max_width: 4,
            require_reduction: true,
            pruning: Pruning::Full,
            workers: 0,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_support == 0 {
            return Err(Error::Config("min support must be at least 1".into()));
        }
        if self.max_length == 0 || self.max_width == 0 {
            return Err(Error::Config("max length and max width must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PruneCounts {
    pub support: usize,
    pub no_reduction: usize,
    pub size: usize,
    pub tombstone: usize,
}

/// Counters for one generation.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationTelemetry {
    pub generation: usize,
    pub parents: usize,
    pub candidates: usize,
    pub duplicates: usize,
    pub pruned: PruneCounts,
    pub emitted: usize,
    /// Parents that produced no emitted child.
    pub barren: usize,
}

impl GenerationTelemetry {
    fn absorb(&mut self, o: &GenerationTelemetry) {
        self.parents += o.parents;
        self.candidates += o.candidates;
        self.duplicates += o.duplicates;
        self.pruned.support += o.pruned.support;
        self.pruned.no_reduction += o.pruned.no_reduction;
        self.pruned.size += o.pruned.size;
        self.pruned.tombstone += o.pruned.tombstone;
        self.emitted += o.emitted;
        self.barren += o.barren;
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RunStatus {
    /// More generations may follow.
    Running,
    Complete,
    /// Stopped from outside; generations past the last complete one are dropped.
    Interrupted,
    /// A checkpoint could not be written.
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint {
    pub status: RunStatus,
    pub last_complete_generation: usize,
}

/// Receives the store at every generation boundary.
pub trait CheckpointSink {
    fn checkpoint(&mut self, store: &PatternStore, at: &Checkpoint) -> Result<()>;
}

impl<F> CheckpointSink for F
where
    F: FnMut(&PatternStore, &Checkpoint) -> Result<()>,
{
    fn checkpoint(&mut self, store: &PatternStore, at: &Checkpoint) -> Result<()> {
        self(store, at)
    }
}

/// Discards checkpoints.
pub struct NoCheckpoint;

impl CheckpointSink for NoCheckpoint {
    fn checkpoint(&mut self, _: &PatternStore, _: &Checkpoint) -> Result<()> {
        Ok(())
    }
}

/// Hands complete generations to `sink`.
pub fn anytime_checkpoint(
    store: &PatternStore,
    sink: &mut dyn CheckpointSink,
    status: RunStatus,
) -> Result<Checkpoint> {
    let at = Checkpoint {
        status,
        last_complete_generation: store.generations.len().saturating_sub(1),
    };
    sink.checkpoint(store, &at)?;
    Ok(at)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunOutcome {
    pub status: RunStatus,
    pub last_complete_generation: usize,
    pub telemetry: Vec<GenerationTelemetry>,
    /// Why the run aborted, if it did.
    pub error: Option<String>,
}

/// Extends the base patterns in `store` generation by generation.
///
/// Generation `d + 1` hangs clauses off object-type variables `d` hops below
/// the root of the generation-`d` patterns (both generations 0 and 1 at
/// `d = 1`, since stars and single clauses share their depth). The loop ends
/// after `max_depth` generations or when no parent is left. Setting `stop`
/// ends the run at the next generation boundary; a generation in progress is
/// discarded.
pub fn discover(
    graph: &KnowledgeGraph,
    store: &mut PatternStore,
    config: &MinerConfig,
    stop: &AtomicBool,
    sink: &mut dyn CheckpointSink,
) -> Result<RunOutcome> {
    config.validate()?;
    if store.generations.is_empty() {
        store.generations.push(Generation::new());
    }
    store.truncate(0);
    let pool = if config.workers > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::Config(format!("cannot start workers: {e}")))?,
        )
    } else {
        None
    };

    let mut telemetry = Vec::new();
    let outcome = |store: &PatternStore, status: RunStatus, telemetry: Vec<GenerationTelemetry>, sink: &mut dyn CheckpointSink| {
        let (status, error) = match anytime_checkpoint(store, sink, status) {
            Ok(_) => (status, None),
            Err(e) => (RunStatus::Aborted, Some(e.to_string())),
        };
        RunOutcome {
            status,
            last_complete_generation: store.generations.len() - 1,
            telemetry,
            error,
        }
    };

    if let Err(e) = anytime_checkpoint(store, sink, RunStatus::Running) {
        return Ok(RunOutcome {
            status: RunStatus::Aborted,
            last_complete_generation: 0,
            telemetry,
            error: Some(e.to_string()),
        });
    }
    for d in 0..config.max_depth {
        if stop.load(Ordering::SeqCst) {
            return Ok(outcome(store, RunStatus::Interrupted, telemetry, sink));
        }
        // Stars and single clauses both sit one layer deep.
        let sources: &[usize] = if d == 1 { &[0, 1] } else { std::slice::from_ref(&d) };
        let parents: Vec<(ResourceId, &MinedPattern)> = sources
            .iter()
            .filter_map(|&g| store.generations.get(g))
            .flat_map(|g| g.iter().flat_map(|(&t, ps)| ps.iter().map(move |p| (t, p))))
            .collect();
        if parents.is_empty() {
            break;
        }
        let run = || next_generation(graph, store, &parents, d, config, stop);
        let result = match &pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        let Some((generation, tele)) = result else {
            return Ok(outcome(store, RunStatus::Interrupted, telemetry, sink));
        };
        store.generations.push(generation);
        telemetry.push(tele);
        if d + 1 == config.max_depth {
            break;
        }
        if let Err(e) = anytime_checkpoint(store, sink, RunStatus::Running) {
            return Ok(RunOutcome {
                status: RunStatus::Aborted,
                last_complete_generation: store.generations.len() - 1,
                telemetry,
                error: Some(e.to_string()),
            });
        }
    }
    Ok(outcome(store, RunStatus::Complete, telemetry, sink))
}

fn next_generation(
    graph: &KnowledgeGraph,
    store: &PatternStore,
    parents: &[(ResourceId, &MinedPattern)],
    d: usize,
    config: &MinerConfig,
    stop: &AtomicBool,
) -> Option<(Generation, GenerationTelemetry)> {
    let seen = dashmap::DashSet::new();
    let results: Vec<Option<(ResourceId, Vec<MinedPattern>, GenerationTelemetry)>> = parents
        .par_iter()
        .map(|&(t, parent)| {
            let frontier = Frontier::new(graph, store, parent, d);
            let (patterns, tele) = explore(graph, &frontier, config, &seen, stop)?;
            Some((t, patterns, tele))
        })
        .collect();

    let mut generation = Generation::new();
    let mut tele = GenerationTelemetry {
        generation: d + 1,
        ..Default::default()
    };
    for r in results {
        let (t, patterns, t_tele) = r?;
        tele.absorb(&t_tele);
        if !patterns.is_empty() {
            generation.entry(t).or_default().extend(patterns);
        }
    }
    for ps in generation.values_mut() {
        ps.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    }
    Some((generation, tele))
}
