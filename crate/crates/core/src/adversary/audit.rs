//! Batch audit: every colluder template against every circuit pair.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::exact::{exact_view_tv, ViewFilter};
use super::game::{derive_seed, run_distinguishing_game, GameConfig, GameResult};
use super::Coalition;
use crate::circuit::Gate;
use crate::compiler::{LogicalCircuit, LogicalOp};
use crate::error::{Error, Result};
use crate::obfuscate::strip_secrets;
use crate::protocol::{schedule, ServerId};

const TEMPLATE_STREAM: u64 = 4;

/// Exact distances at or below this are reported as zero leakage.
pub const TV_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// Up to `K` consecutive A-servers ending at the measuring server.
    ConsecutiveA,
    /// `B_1..B_K` (capped at `N`).
    ConsecutiveB,
    /// `⌈K/2⌉` consecutive A-servers ending at the measuring server and the
    /// B-servers with the same indices, up to `⌊K/2⌋` of them.
    Mixed,
    /// `K` servers drawn uniformly from all `2N`.
    Random,
}

impl Template {
    pub const ALL: [Template; 4] = [
        Template::ConsecutiveA,
        Template::ConsecutiveB,
        Template::Mixed,
        Template::Random,
    ];
}

/// The coalition a template picks for `N` servers per side and budget `K`.
pub fn template(t: Template, servers: usize, budget: usize, measuring: ServerId, seed: u64) -> Coalition {
    let back_from = |count: usize| -> Vec<usize> {
        (0..count.min(servers))
            .map(|j| (measuring.index + servers - 1 - j) % servers + 1)
            .collect()
    };
    match t {
        Template::ConsecutiveA => Coalition::of(back_from(budget).into_iter().map(ServerId::a)),
        Template::ConsecutiveB => Coalition::of((1..=budget.min(servers)).map(ServerId::b)),
        Template::Mixed => {
            let a = back_from(budget.div_ceil(2));
            let b: Vec<_> = a.iter().take(budget / 2).copied().collect();
            Coalition::of(a.into_iter().map(ServerId::a).chain(b.into_iter().map(ServerId::b)))
        }
        Template::Random => {
            let mut all = ServerId::all(servers);
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, TEMPLATE_STREAM, 0));
            all.shuffle(&mut rng);
            Coalition::of(all.into_iter().take(budget))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitPair {
    pub name: String,
    pub c0: LogicalCircuit,
    pub c1: LogicalCircuit,
}

impl CircuitPair {
    pub fn new(name: &str, c0: LogicalCircuit, c1: LogicalCircuit) -> Self {
        CircuitPair {
            name: name.to_string(),
            c0,
            c1,
        }
    }
}

/// Identity, Pauli, Hadamard and entangling pairs on one and two qubits.
pub fn default_corpus() -> Vec<CircuitPair> {
    let one = |gate: Gate| LogicalCircuit::new(1, vec![LogicalOp::Single { row: 0, gate }]).unwrap();
    let bell = LogicalCircuit::new(
        2,
        vec![
            LogicalOp::Single { row: 0, gate: Gate::H },
            LogicalOp::Cnot { control: 0, target: 1 },
        ],
    )
    .unwrap();
    let plus = LogicalCircuit::new(2, vec![LogicalOp::Single { row: 0, gate: Gate::H }]).unwrap();
    vec![
        CircuitPair::new("identity-vs-identity", one(Gate::I), one(Gate::I)),
        CircuitPair::new("identity-vs-x", one(Gate::I), one(Gate::X)),
        CircuitPair::new("identity-vs-h", one(Gate::I), one(Gate::H)),
        CircuitPair::new("bell-vs-plus", bell, plus),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// No leak measured or possible.
    Blind,
    /// The exact view distance is positive, and the game stays within it.
    Leaky,
    /// The game beat the exact optimum by more than its confidence radius.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub pair: String,
    pub template: Template,
    pub colluders: String,
    pub trials: usize,
    pub advantage: f64,
    pub ci: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_tv: Option<f64>,
    pub gate_window_tv: f64,
    pub verdict: Verdict,
}

impl AuditEntry {
    pub fn judge(game: &GameResult, exact_tv: Option<f64>) -> Verdict {
        match exact_tv {
            Some(tv) if game.advantage > tv / 2.0 + game.ci => Verdict::Violation,
            Some(tv) if tv > TV_TOLERANCE => Verdict::Leaky,
            Some(_) => Verdict::Blind,
            None if game.advantage > game.ci => Verdict::Leaky,
            None => Verdict::Blind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: GameConfig,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict == Verdict::Violation).count()
    }
}

/// Runs the game and, where the enumeration fits, the exact distance for
/// every pair and template.
pub fn audit_blindness(cfg: &GameConfig, corpus: &[CircuitPair]) -> Result<AuditReport> {
    cfg.params.validate()?;
    let mut entries = Vec::new();
    for pair in corpus {
        let measuring = measuring_server(&pair.c0, cfg)?;
        for t in Template::ALL {
            let co = template(t, cfg.params.servers, cfg.params.colluders, measuring, cfg.seed);
            let game = run_distinguishing_game(&pair.c0, &pair.c1, cfg, &co)?;
            let exact_tv = match exact_view_tv(&pair.c0, &pair.c1, cfg, &co, ViewFilter::Full) {
                Ok(tv) => Some(tv),
                Err(Error::StateSpaceTooLarge(_)) => None,
                Err(e) => return Err(e),
            };
            let gate_window_tv = exact_view_tv(&pair.c0, &pair.c1, cfg, &co, ViewFilter::GateWindowsOnly)?;
            entries.push(AuditEntry {
                pair: pair.name.clone(),
                template: t,
                colluders: co.to_string(),
                trials: game.trials,
                advantage: game.advantage,
                ci: game.ci,
                exact_tv,
                gate_window_tv,
                verdict: AuditEntry::judge(&game, exact_tv),
            });
        }
    }
    Ok(AuditReport { config: *cfg, entries })
}

fn measuring_server(c: &LogicalCircuit, cfg: &GameConfig) -> Result<ServerId> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let cc = crate::compiler::compile(c, &cfg.params, &mut rng)?;
    let p = crate::obfuscate::obfuscate(&cc, &mut rng)?;
    Ok(schedule(&strip_secrets(&p), cfg.params.servers, cfg.measuring_server).measuring_server)
}
