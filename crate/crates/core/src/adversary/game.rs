use std::collections::HashMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{collude, Coalition, CollusionView};
use crate::compiler::{build_layout, BrickworkLayout, LogicalCircuit};
use crate::config::{Params, PublicShape};
use crate::error::{Error, Result};
use crate::protocol::{execute_layout, ProtocolConfig, ServerId};

pub const DEFAULT_REHEARSALS: usize = 2000;

const TRIAL_STREAM: u64 = 1;
const REHEARSAL_STREAM: [u64; 2] = [2, 3];

/// Child seed number `index` of `master` for purpose `stream`.
///
/// The rule: seed ChaCha20 with `master`, select stream `stream`, move to
/// word position `2·index`, and read one `u64`. Distinct `(stream, index)`
/// pairs read disjoint keystream words, so children are independent of each
/// other and of the order in which they are drawn.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measuring_server: Option<ServerId>,
    pub trials: usize,
    pub rehearsals: usize,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(params: Params, trials: usize, seed: u64) -> Self {
        GameConfig {
            params,
            measuring_server: None,
            trials,
            rehearsals: DEFAULT_REHEARSALS,
            seed,
        }
    }

    pub fn with_rehearsals(mut self, r: usize) -> Self {
        self.rehearsals = r;
        self
    }

    pub(crate) fn protocol(&self, seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            params: self.params,
            seed,
            measuring_server: self.measuring_server,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub trials: usize,
    pub successes: usize,
    /// `successes / trials − 1/2`.
    pub advantage: f64,
    /// Three binomial standard deviations at success rate 1/2.
    pub ci: f64,
}

impl GameResult {
    pub fn new(trials: usize, successes: usize) -> Self {
        let t = trials.max(1) as f64;
        GameResult {
            trials,
            successes,
            advantage: successes as f64 / t - 0.5,
            ci: 3.0 * 0.5 / t.sqrt(),
        }
    }
}

/// Guesses which circuit produced a view; `None` means no preference and
/// is settled by a fair coin.
pub trait Adversary: Sync {
    fn guess(&self, view: &CollusionView) -> Option<u8>;
}

impl<F: Fn(&CollusionView) -> Option<u8> + Sync> Adversary for F {
    fn guess(&self, view: &CollusionView) -> Option<u8> {
        self(view)
    }
}

/// Maximum likelihood over canonical views, with frequencies learned from
/// rehearsal runs of both circuits.
#[derive(Debug, Clone, Default)]
pub struct EmpiricalMl {
    counts: HashMap<u64, [u32; 2]>,
}

impl EmpiricalMl {
    pub fn train(
        c0: &LogicalCircuit,
        c1: &LogicalCircuit,
        cfg: &GameConfig,
        coalition: &Coalition,
    ) -> Result<Self> {
        let layouts = layouts(c0, c1, &cfg.params)?;
        let mut ml = EmpiricalMl::default();
        for (bit, (layout, q)) in layouts.iter().enumerate() {
            let prints = (0..cfg.rehearsals as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = derive_seed(cfg.seed, REHEARSAL_STREAM[bit], i);
                    let (_, r) = execute_layout(layout, *q, &cfg.protocol(seed))?;
                    Ok(collude(&r, coalition)?.fingerprint())
                })
                .collect::<Result<Vec<_>>>()?;
            for f in prints {
                ml.counts.entry(f).or_default()[bit] += 1;
            }
        }
        Ok(ml)
    }

    pub fn distinct_views(&self) -> usize {
        self.counts.len()
    }
}

impl Adversary for EmpiricalMl {
    fn guess(&self, view: &CollusionView) -> Option<u8> {
        let [n0, n1] = self.counts.get(&view.fingerprint()).copied().unwrap_or_default();
        match n0.cmp(&n1) {
            std::cmp::Ordering::Greater => Some(0),
            std::cmp::Ordering::Less => Some(1),
            std::cmp::Ordering::Equal => None,
        }
    }
}

pub(super) fn layouts(c0: &LogicalCircuit, c1: &LogicalCircuit, params: &Params) -> Result<[(BrickworkLayout, usize); 2]> {
    let s0 = PublicShape::new(c0.qubits, params);
    let s1 = PublicShape::new(c1.qubits, params);
    if s0 != s1 {
        return Err(Error::ShapeMismatch);
    }
    Ok([
        (build_layout(c0, params)?, c0.qubits),
        (build_layout(c1, params)?, c1.qubits),
    ])
}

/// Plays `cfg.trials` rounds: the challenger flips a bit, runs that
/// circuit, and the adversary guesses from the coalition's view.
///
/// Trial `i` draws everything from `derive_seed(cfg.seed, 1, i)`; results
/// are summed, so the outcome does not depend on thread scheduling.
pub fn play_game<A: Adversary + ?Sized>(
    c0: &LogicalCircuit,
    c1: &LogicalCircuit,
    cfg: &GameConfig,
    coalition: &Coalition,
    adversary: &A,
) -> Result<GameResult> {
    cfg.params.validate()?;
    coalition.validate(cfg.params.servers, cfg.params.colluders)?;
    let layouts = layouts(c0, c1, &cfg.params)?;
    let successes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(cfg.seed, TRIAL_STREAM, i));
            let bit = rng.gen_range(0..2u8);
            let (layout, q) = &layouts[bit as usize];
            let (_, r) = execute_layout(layout, *q, &cfg.protocol(rng.next_u64()))?;
            let view = collude(&r, coalition)?;
            let guess = adversary.guess(&view).unwrap_or_else(|| rng.gen_range(0..2u8));
            Ok(usize::from(guess == bit))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(GameResult::new(cfg.trials, successes))
}

/// [`play_game`] with an [`EmpiricalMl`] adversary trained on
/// `cfg.rehearsals` runs of each circuit.
pub fn run_distinguishing_game(
    c0: &LogicalCircuit,
    c1: &LogicalCircuit,
    cfg: &GameConfig,
    coalition: &Coalition,
) -> Result<GameResult> {
    cfg.params.validate()?;
    coalition.validate(cfg.params.servers, cfg.params.colluders)?;
    let ml = EmpiricalMl::train(c0, c1, cfg, coalition)?;
    play_game(c0, c1, cfg, coalition, &ml)
}
