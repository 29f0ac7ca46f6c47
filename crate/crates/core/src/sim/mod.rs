//! Discrete-event simulation of the colonization and collapse process and of
//! the two comparison processes.
//!
//! A replication starts with one colony at the root. Each colony lives an
//! `Exp(1)` time, grows according to the survivor law's growth part, and on
//! collapse hands its `N` survivors to [`collapse_targets`]. Collapses are
//! processed in time order; ties go to the colony created first.

mod estimate;
mod sampling;
mod tree;

pub use estimate::{
    estimate, estimate_with, outcomes, MeanEstimate, Proportion, SimEstimates, Z_99,
};
pub use sampling::{
    derive_rng, disperse_slots, sample_catastrophe, sample_growth, sample_lifetime,
    sample_survivors, StreamTag, Streams,
};
pub use tree::{LazyTree, VertexId, ROOT};

use crate::error::{invalid, Result};
use crate::offspring::Provenance;
use crate::survivor::SurvivorLaw;
use serde::{Deserialize, Serialize};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// Every vertex, the root included, has `d + 1` neighbours.
    FullTree,
    /// The root has `d` neighbours.
    RootedTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Original,
    /// Survivors only aim at forward neighbours.
    SelfAvoiding,
    /// Survivors aim at all `d + 1` neighbours; those aiming backward die.
    ForwardOrDie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub max_events: u64,
    pub max_colonies_alive: u64,
    pub max_depth: u64,
}

impl Default for Horizon {
    fn default() -> Self {
        Self {
            max_events: 1_000_000,
            max_colonies_alive: 100_000,
            max_depth: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub d: u32,
    pub root_kind: RootKind,
    pub variant: Variant,
    pub law: SurvivorLaw,
    pub horizon: Horizon,
    pub base_seed: u64,
}

impl ProcessConfig {
    pub fn new(d: u32, law: SurvivorLaw) -> Self {
        Self {
            d,
            root_kind: RootKind::FullTree,
            variant: Variant::Original,
            law,
            horizon: Horizon::default(),
            base_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(invalid(format!("d must be at least 2, got {}", self.d)));
        }
        let h = &self.horizon;
        if h.max_events == 0 || h.max_colonies_alive == 0 || h.max_depth == 0 {
            return Err(invalid("horizon limits must be positive"));
        }
        self.law.validate()
    }

    /// Forward neighbours of a vertex; the root has no backward one.
    pub fn forward_degree(&self, is_root: bool) -> usize {
        if is_root && self.root_kind == RootKind::FullTree {
            self.d as usize + 1
        } else {
            self.d as usize
        }
    }

    /// Number of equally likely choices offered to each survivor.
    pub fn slots(&self, is_root: bool) -> usize {
        let fwd = self.forward_degree(is_root);
        match self.variant {
            Variant::Original => {
                if is_root {
                    fwd
                } else {
                    fwd + 1
                }
            }
            Variant::SelfAvoiding => fwd,
            Variant::ForwardOrDie => self.d as usize + 1,
        }
    }
}

/// Where a distinct chosen neighbour lies relative to the collapsing vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Child(u32),
    Parent,
    /// A backward choice in the move-forward-or-die process, or the missing
    /// backward neighbour of a rooted-tree root; whoever picks it dies.
    Lost,
}

/// Distinct neighbours picked by `n` survivors at a vertex.
pub fn collapse_targets(cfg: &ProcessConfig, is_root: bool, n: u64, streams: &mut Streams) -> Vec<Target> {
    let fwd = cfg.forward_degree(is_root);
    disperse_slots(n, cfg.slots(is_root), &mut streams.dispersal)
        .into_iter()
        .map(|i| {
            if i < fwd {
                Target::Child(i as u32)
            } else if cfg.variant == Variant::Original {
                Target::Parent
            } else {
                Target::Lost
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ExtinctExact,
    CensoredAtHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub terminated: Termination,
    /// Colonies ever founded, the root colony included.
    pub colonies_created: u64,
    /// Largest depth of a colonized vertex.
    pub max_depth_reached: u64,
    pub events_processed: u64,
    pub final_alive: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ColonyEvent {
    pub vertex: VertexId,
    pub birth_time: f64,
    pub collapse_time: f64,
    /// Creation order, used to break collapse-time ties.
    pub seq: u64,
}

impl PartialEq for ColonyEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ColonyEvent {}

impl PartialOrd for ColonyEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ColonyEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.collapse_time
            .total_cmp(&other.collapse_time)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Runs replication `rep` of `cfg`. The result depends only on
/// `(cfg, rep)`.
pub fn run_replication(cfg: &ProcessConfig, rep: u64) -> Result<SimOutcome> {
    cfg.validate()?;
    Ok(run_unchecked(cfg, rep))
}

pub(crate) fn run_unchecked(cfg: &ProcessConfig, rep: u64) -> SimOutcome {
    let mut streams = Streams::new(cfg.base_seed, rep);
    let mut tree = LazyTree::new();
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    let mut found = |tree: &mut LazyTree,
                     queue: &mut BinaryHeap<Reverse<ColonyEvent>>,
                     v: VertexId,
                     now: f64,
                     streams: &mut Streams| {
        tree.set_occupied(v, true);
        let life = sample_lifetime(&mut streams.lifetime);
        queue.push(Reverse(ColonyEvent {
            vertex: v,
            birth_time: now,
            collapse_time: now + life,
            seq,
        }));
        seq += 1;
    };
    found(&mut tree, &mut queue, ROOT, 0.0, &mut streams);
    let h = cfg.horizon;
    let mut out = SimOutcome {
        terminated: Termination::ExtinctExact,
        colonies_created: 1,
        max_depth_reached: 0,
        events_processed: 0,
        final_alive: 0,
    };
    while let Some(&Reverse(ev)) = queue.peek() {
        if out.events_processed >= h.max_events {
            out.terminated = Termination::CensoredAtHorizon;
            break;
        }
        queue.pop();
        out.events_processed += 1;
        tree.set_occupied(ev.vertex, false);
        let n = sample_survivors(&cfg.law, ev.collapse_time - ev.birth_time, &mut streams);
        let is_root = ev.vertex == ROOT;
        for target in collapse_targets(cfg, is_root, n, &mut streams) {
            let v = match target {
                Target::Child(i) => tree.child(ev.vertex, i),
                Target::Parent => tree.parent(ev.vertex).expect("non-root vertex"),
                Target::Lost => continue,
            };
            if tree.is_occupied(v) {
                continue;
            }
            found(&mut tree, &mut queue, v, ev.collapse_time, &mut streams);
            out.colonies_created += 1;
            out.max_depth_reached = out.max_depth_reached.max(u64::from(tree.depth(v)));
        }
        debug_assert_eq!(tree.occupied_count(), queue.len());
        if queue.len() as u64 > h.max_colonies_alive || out.max_depth_reached > h.max_depth {
            out.terminated = Termination::CensoredAtHorizon;
            break;
        }
    }
    out.final_alive = queue.len() as u64;
    out
}

/// Process whose single collapse at the given provenance is described by
/// the offspring law of that provenance.
pub fn provenance_config(d: u32, provenance: Provenance, law: SurvivorLaw) -> (ProcessConfig, bool) {
    let mut cfg = ProcessConfig::new(d, law);
    cfg.variant = match provenance {
        Provenance::UInterior | Provenance::URoot => Variant::SelfAvoiding,
        Provenance::LInterior | Provenance::LRoot => Variant::ForwardOrDie,
    };
    (cfg, provenance.is_root())
}

/// Number of colonies founded by one collapse of a fresh colony at the root
/// (`at_root`) or at a vertex of depth 1 with an empty parent.
///
/// Goes through the same lifetime, growth, catastrophe and dispersal code
/// as [`run_replication`]; sample `i` uses replication streams `i`.
pub fn sample_collapse_offspring(cfg: &ProcessConfig, at_root: bool, sample: u64) -> usize {
    let mut streams = Streams::new(cfg.base_seed, sample);
    let life = sample_lifetime(&mut streams.lifetime);
    let n = sample_survivors(&cfg.law, life, &mut streams);
    // forward neighbours and the parent are all empty in this setting
    collapse_targets(cfg, at_root, n, &mut streams)
        .into_iter()
        .filter(|t| !matches!(t, Target::Lost))
        .count()
}
