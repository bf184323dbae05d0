//! Colluding servers, distinguishing games and exact view distances.
//!
//! A coalition pools its members' transcripts after the computation. The
//! built-in adversary learns view frequencies from rehearsal runs and
//! guesses by maximum likelihood; [`exact_view_tv`] gives the optimum any
//! adversary could reach for the same coalition.

mod audit;
mod exact;
mod game;

pub use audit::{
    audit_blindness, default_corpus, template, AuditEntry, AuditReport, CircuitPair, Template, Verdict, TV_TOLERANCE,
};
pub use exact::{exact_view_tv, ViewFilter, STATE_SPACE_CAP};
pub use game::{
    derive_seed, play_game, run_distinguishing_game, Adversary, EmpiricalMl, GameConfig, GameResult,
    DEFAULT_REHEARSALS,
};

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::circuit::PairSlot;
use crate::config::PublicShape;
use crate::error::{Error, Result};
use crate::protocol::{Instruction, RunResult, ServerId, TranscriptEntry};

/// Which servers pool their transcripts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coalition {
    /// At most `K` servers.
    Within(BTreeSet<ServerId>),
    /// Every server. Outside the colluder budget; used to check that the
    /// harness can detect a leak at all.
    All,
}

impl Coalition {
    pub fn of(ids: impl IntoIterator<Item = ServerId>) -> Self {
        Coalition::Within(ids.into_iter().collect())
    }

    /// Parses `"A1,A2,B3"`; `"all"` gives [`Coalition::All`] and an empty
    /// string the empty coalition.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Coalition::All);
        }
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<_>>>()
            .map(Coalition::Within)
    }

    pub fn members(&self, n: usize) -> BTreeSet<ServerId> {
        match self {
            Coalition::Within(ids) => ids.clone(),
            Coalition::All => ServerId::all(n).into_iter().collect(),
        }
    }

    pub fn contains(&self, s: ServerId) -> bool {
        match self {
            Coalition::Within(ids) => ids.contains(&s),
            Coalition::All => true,
        }
    }

    /// Checks the budget `K` and that every member exists among `N` per side.
    pub fn validate(&self, servers: usize, budget: usize) -> Result<()> {
        if let Coalition::Within(ids) = self {
            if ids.len() > budget {
                return Err(Error::BudgetExceeded {
                    size: ids.len(),
                    budget,
                });
            }
            if let Some(bad) = ids.iter().find(|s| s.index > servers) {
                return Err(Error::UnknownServer(bad.to_string()));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Coalition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coalition::All => write!(f, "all"),
            Coalition::Within(ids) => {
                let names: Vec<_> = ids.iter().map(ToString::to_string).collect();
                write!(f, "{}", names.join(","))
            }
        }
    }
}

/// Pooled transcripts of a coalition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollusionView {
    pub colluders: Vec<ServerId>,
    /// Every member's entries, by round; ties keep server order.
    pub entries: Vec<TranscriptEntry>,
    /// Present iff the measuring server colludes.
    pub reported_bits: Option<String>,
    pub shape: PublicShape,
}

pub fn collude(result: &RunResult, coalition: &Coalition) -> Result<CollusionView> {
    let params = &result.config.params;
    coalition.validate(params.servers, params.colluders)?;
    let mut colluders = Vec::new();
    let mut entries = Vec::new();
    let mut reported_bits = None;
    for t in &result.transcripts {
        if !coalition.contains(t.server) {
            continue;
        }
        colluders.push(t.server);
        entries.extend_from_slice(&t.entries);
        if t.reported_bits.is_some() {
            reported_bits.clone_from(&t.reported_bits);
        }
    }
    entries.sort_by_key(|e| e.round);
    Ok(CollusionView {
        colluders,
        entries,
        reported_bits,
        shape: result_shape(result),
    })
}

fn result_shape(result: &RunResult) -> PublicShape {
    PublicShape::new(result.raw.len(), &result.config.params)
}

/// `(round, pair)` entries of one track, by round.
pub type TrackView = Vec<(usize, PairSlot)>;

/// A view with track labels forgotten: per window, the sorted multiset of
/// per-track `(round, pair)` sequences, plus the reported bits.
///
/// Track labels are a uniform shuffle and carry nothing, so two views with
/// equal canonical forms are equally likely under any circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalView {
    pub windows: Vec<(usize, Vec<TrackView>)>,
    pub reported_bits: Option<String>,
}

impl CollusionView {
    pub fn canonical(&self) -> CanonicalView {
        let mut by_window: BTreeMap<usize, BTreeMap<usize, Vec<(usize, PairSlot)>>> = BTreeMap::new();
        for e in &self.entries {
            if let Instruction::ExecutePair { window_id, track_id, pair } = e.instruction {
                by_window
                    .entry(window_id)
                    .or_default()
                    .entry(track_id)
                    .or_default()
                    .push((e.round, pair));
            }
        }
        let windows = by_window
            .into_iter()
            .map(|(id, tracks)| {
                let mut t: Vec<_> = tracks.into_values().collect();
                t.sort_unstable();
                (id, t)
            })
            .collect();
        CanonicalView {
            windows,
            reported_bits: self.reported_bits.clone(),
        }
    }

    /// 64-bit digest of [`Self::canonical`]; stable within one build.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.canonical().hash(&mut h);
        h.finish()
    }
}
