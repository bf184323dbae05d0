//! Simulated delegation across `2N` honest-but-curious servers.
//!
//! `A_i` receives the state from `B_{i−1}`, executes one round of pairs and
//! passes it to `B_i`; `B_N` closes the ring back to `A_1`. Servers only log
//! what they are told to do. Which register an instruction touches is kept
//! by the user and never appears in a transcript.

mod engine;
mod roles;
mod schedule;

pub use engine::{
    exact_output_distribution, exact_raw_distribution, execute, execute_layout, run, RunResult,
};
pub use roles::split_roles;
pub use schedule::{audit_schedule, schedule, RoundPlan, Schedule};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::PairSlot;
use crate::config::Params;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// `A_i` or `B_i`, `i ∈ 1..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ServerId {
    pub side: Side,
    pub index: usize,
}

impl ServerId {
    pub fn a(index: usize) -> Self {
        ServerId { side: Side::A, index }
    }

    pub fn b(index: usize) -> Self {
        ServerId { side: Side::B, index }
    }

    /// All `2N` servers, `A_1..A_N` then `B_1..B_N`.
    pub fn all(n: usize) -> Vec<ServerId> {
        (1..=n).map(ServerId::a).chain((1..=n).map(ServerId::b)).collect()
    }

    /// The A-server active in `round`.
    pub fn for_round(round: usize, n: usize) -> Self {
        ServerId::a(round % n + 1)
    }

    /// Where this server forwards the state.
    pub fn next(self, n: usize) -> Self {
        match self.side {
            Side::A => ServerId::b(self.index),
            Side::B => ServerId::a(self.index % n + 1),
        }
    }
}

impl fmt::Display for ServerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.side, self.index)
    }
}

impl FromStr for ServerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnknownServer(s.to_string());
        let side = match s.chars().next() {
            Some('A') | Some('a') => Side::A,
            Some('B') | Some('b') => Side::B,
            _ => return Err(bad()),
        };
        let index: usize = s[1..].parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(ServerId { side, index })
    }
}

impl Serialize for ServerId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ServerId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// What a server is told to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Instruction {
    ExecutePair {
        window_id: usize,
        track_id: usize,
        pair: PairSlot,
    },
    ApplyCZ {
        rows: (usize, usize),
        layer: usize,
    },
    MeasureAll,
    ForwardState {
        to: ServerId,
    },
}

/// One logged instruction. Serialized as a JSON line
/// `{"round":..,"server":..,"kind":..,...}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub server: ServerId,
    #[serde(flatten)]
    pub instruction: Instruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerTranscript {
    pub server: ServerId,
    pub entries: Vec<TranscriptEntry>,
    /// Masked measurement outcome, if this server measured.
    pub reported_bits: Option<String>,
}

impl ServerTranscript {
    pub fn new(server: ServerId) -> Self {
        ServerTranscript {
            server,
            entries: Vec::new(),
            reported_bits: None,
        }
    }

    pub fn to_json_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("entry serializes") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub params: Params,
    pub seed: u64,
    /// Defaults to the A-server of the final round.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measuring_server: Option<ServerId>,
}

impl ProtocolConfig {
    pub fn new(params: Params, seed: u64) -> Self {
        ProtocolConfig {
            params,
            seed,
            measuring_server: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Some(s) = self.measuring_server {
            if s.index > self.params.servers {
                return Err(Error::UnknownServer(s.to_string()));
            }
        }
        Ok(())
    }
}

/// Per-row XOR of the raw outcome with the mask bits.
pub fn decode_output(raw: &str, bits: &[u8]) -> Result<String> {
    if raw.len() != bits.len() {
        return Err(Error::LengthMismatch(raw.len(), bits.len()));
    }
    raw.chars()
        .zip(bits)
        .map(|(c, &b)| match (c, b & 1) {
            ('0', 0) | ('1', 1) => Ok('0'),
            ('1', 0) | ('0', 1) => Ok('1'),
            _ => Err(Error::LengthMismatch(raw.len(), bits.len())),
        })
        .collect()
}

/// Expected time until the pooled information of `K + 1` leaking servers
/// is available, when leaks arrive every `t` on average: `(K + 1)·t`.
pub fn estimate_leak_time(k: usize, t: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::NonPositiveTime(t));
    }
    Ok((k as f64 + 1.0) * t)
}
