//! Exact total variation between the view distributions of two circuits.
//!
//! The view factorizes into independent parts. Each gate window contributes
//! a uniformly shuffled projection of its track set, whose law depends only
//! on the projected multiset: equal multisets give identical factors and
//! unequal ones give disjoint supports. The remaining part (seen mask pairs
//! and, if the measuring server colludes, the reported bits) is enumerated
//! over every flip bit, rotation count and block placement per row and the
//! exact output distribution of each layout. Enumerated mask windows are
//! handled like gate windows.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::game::{layouts, GameConfig};
use super::Coalition;
use crate::circuit::PairSlot;
use crate::compiler::{compile_with_layout, identity_block, rotation_block, rotation_class, CompiledCircuit};
use crate::config::MaskMode;
use crate::error::{Error, Result};
use crate::obfuscate::{obfuscate, strip_secrets, PublicProgram, PublicWindow, StageKind};
use crate::protocol::schedule;
use crate::sim::OutcomeDistribution;

/// Largest enumeration `exact_view_tv` will attempt.
pub const STATE_SPACE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewFilter {
    /// Everything the coalition sees.
    Full,
    /// Only `ExecutePair` entries of V and U windows.
    GateWindowsOnly,
}

/// Total variation between the coalition's view distributions under `c0`
/// and `c1`. The best possible game advantage is half of it.
pub fn exact_view_tv(
    c0: &crate::compiler::LogicalCircuit,
    c1: &crate::compiler::LogicalCircuit,
    cfg: &GameConfig,
    coalition: &Coalition,
    filter: ViewFilter,
) -> Result<f64> {
    let params = &cfg.params;
    params.validate()?;
    coalition.validate(params.servers, params.colluders)?;
    let [(l0, q0), (l1, q1)] = layouts(c0, c1, params)?;
    let compiled = |layout, q| -> Result<(CompiledCircuit, PublicProgram)> {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        let cc = compile_with_layout(layout, q, params, &mut rng)?;
        let p = obfuscate(&cc, &mut rng)?;
        Ok((cc, strip_secrets(&p)))
    };
    let (cc0, p0) = compiled(l0, q0)?;
    let (cc1, p1) = compiled(l1, q1)?;

    let sched = schedule(&p0, params.servers, cfg.measuring_server);
    let seen: BTreeSet<usize> = sched
        .rounds
        .iter()
        .filter(|r| coalition.contains(r.server))
        .map(|r| r.round)
        .collect();

    let mut mask_seen = Vec::new();
    let mut start = 0;
    for (s0, s1) in p0.stages.iter().zip(&p1.stages) {
        let offsets: Vec<usize> = (0..s0.width).filter(|o| seen.contains(&(start + o))).collect();
        start += s0.width;
        if offsets.is_empty() {
            continue;
        }
        match s0.kind {
            StageKind::Mask { .. } if filter == ViewFilter::GateWindowsOnly => {}
            StageKind::Mask { block } if p0.shape.masks == MaskMode::Replicate => {
                mask_seen.extend(offsets.iter().map(|&o| (block, o)))
            }
            _ => {
                for (w0, w1) in s0.windows.iter().zip(&s1.windows) {
                    if projected(w0, &offsets) != projected(w1, &offsets) {
                        return Ok(1.0);
                    }
                }
            }
        }
    }
    if filter == ViewFilter::GateWindowsOnly {
        return Ok(0.0);
    }
    let reported = coalition.contains(sched.measuring_server);
    mask_output_tv(
        &cc0.layout_distribution()?,
        &cc1.layout_distribution()?,
        p0.shape.n,
        params.servers,
        &mask_seen,
        reported,
    )
}

/// Sorted multiset of the window's tracks restricted to time `offsets`.
fn projected(w: &PublicWindow, offsets: &[usize]) -> Vec<Vec<PairSlot>> {
    let mut v: Vec<Vec<PairSlot>> = w
        .tracks
        .iter()
        .map(|t| offsets.iter().map(|&o| t[t.len() - 1 - o]).collect())
        .collect();
    v.sort_unstable();
    v
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Per row, `P(flip = b, seen mask pairs = pattern)` for every pattern.
fn row_table(blocks: usize, seen: &[(usize, usize)]) -> Result<Vec<[f64; 2]>> {
    if blocks >= 32 || 1u128 << blocks > STATE_SPACE_CAP {
        return Err(Error::StateSpaceTooLarge(1u128 << blocks.min(127)));
    }
    let pair_at = |rot: bool, offset: usize| {
        let b = if rot { rotation_block() } else { identity_block() };
        let pair = b.time_ordered().nth(offset).expect("offset within block");
        pair
    };
    let mut table: BTreeMap<Vec<PairSlot>, [f64; 2]> = BTreeMap::new();
    for b in 0..2u8 {
        let class = rotation_class(b, blocks);
        for &c in &class {
            let weight = 0.5 / class.len() as f64 / binomial(blocks, c);
            for placement in 0u32..1 << blocks {
                if placement.count_ones() as usize != c {
                    continue;
                }
                let pattern = seen
                    .iter()
                    .map(|&(k, o)| pair_at(placement >> k & 1 == 1, o))
                    .collect();
                table.entry(pattern).or_default()[b as usize] += weight;
            }
        }
    }
    Ok(table.into_values().collect())
}

fn dense(d: &OutcomeDistribution, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; 1 << n];
    for (bits, p) in d {
        v[usize::from_str_radix(bits, 2).expect("bitstring")] += p;
    }
    v
}

fn mask_output_tv(
    d0: &OutcomeDistribution,
    d1: &OutcomeDistribution,
    n: usize,
    blocks: usize,
    mask_seen: &[(usize, usize)],
    reported: bool,
) -> Result<f64> {
    let table = row_table(blocks, mask_seen)?;
    let outcomes = 1usize << n;
    let states = (table.len() as u128).pow(n as u32) * outcomes as u128;
    if states > STATE_SPACE_CAP {
        return Err(Error::StateSpaceTooLarge(states));
    }
    let (d0, d1) = (dense(d0, n), dense(d1, n));
    let bit = |x: usize, row: usize| (x >> (n - 1 - row)) & 1;
    let mut pats = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let (mut s0, mut s1) = (0.0, 0.0);
        for raw in 0..outcomes {
            let (mut p0, mut p1) = (0.0, 0.0);
            for y in 0..outcomes {
                if d0[y] == 0.0 && d1[y] == 0.0 {
                    continue;
                }
                let w: f64 = (0..n).map(|r| table[pats[r]][bit(y ^ raw, r)]).product();
                p0 += d0[y] * w;
                p1 += d1[y] * w;
            }
            if reported {
                total += (p0 - p1).abs();
            } else {
                s0 += p0;
                s1 += p1;
            }
        }
        total += (s0 - s1).abs();
        // Next pattern tuple, mixed radix.
        let mut r = 0;
        while r < n {
            pats[r] += 1;
            if pats[r] < table.len() {
                break;
            }
            pats[r] = 0;
            r += 1;
        }
        if r == n {
            break;
        }
    }
    Ok(total / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::compiler::{LogicalCircuit, LogicalOp};
    use crate::config::Params;
    use crate::protocol::ServerId;

    fn one(gate: Gate) -> LogicalCircuit {
        LogicalCircuit::new(1, vec![LogicalOp::Single { row: 0, gate }]).unwrap()
    }

    fn cfg(n: usize, k: usize) -> GameConfig {
        GameConfig::new(Params::new(n, k).with_layers(2), 0, 1)
    }

    #[test]
    fn row_table_is_a_distribution() {
        for n in 4..=10 {
            let t = row_table(n, &[(0, 1), (1, 1), (2, 0)]).unwrap();
            let total: f64 = t.iter().map(|[a, b]| a + b).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let flip: f64 = t.iter().map(|[_, b]| b).sum();
            assert!((flip - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unseen_masks_carry_nothing() {
        let t = row_table(8, &[]).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t[0][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_circuits_have_zero_tv() {
        let co = Coalition::All;
        let tv = exact_view_tv(&one(Gate::X), &one(Gate::X), &cfg(4, 4), &co, ViewFilter::Full).unwrap();
        assert_eq!(tv, 0.0);
    }

    #[test]
    fn gate_windows_never_leak() {
        let co = Coalition::All;
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &cfg(4, 4), &co, ViewFilter::GateWindowsOnly).unwrap();
        assert_eq!(tv, 0.0);
    }

    #[test]
    fn full_view_of_n4_masks_reveals_the_output() {
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &cfg(4, 4), &Coalition::All, ViewFilter::Full).unwrap();
        assert!((tv - 1.0).abs() < 1e-12, "{tv}");
    }

    #[test]
    fn without_the_measuring_server_nothing_leaks() {
        let co = Coalition::of([ServerId::b(1), ServerId::b(2), ServerId::b(3), ServerId::b(4)]);
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &cfg(4, 4), &co, ViewFilter::Full).unwrap();
        assert!(tv.abs() < 1e-12);
    }

    #[test]
    fn enumerated_masks_hide_everything_even_from_all_servers() {
        let g = GameConfig::new(
            Params::new(4, 4).with_layers(2).with_masks(crate::config::MaskMode::Enumerate),
            0,
            1,
        );
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &g, &Coalition::All, ViewFilter::Full).unwrap();
        assert!(tv.abs() < 1e-12, "{tv}");
    }

    #[test]
    fn oversized_enumeration_rejected() {
        let c = LogicalCircuit::new(8, vec![LogicalOp::Single { row: 0, gate: Gate::I }]).unwrap();
        let params = Params::new(8, 8).with_layers(2);
        let g = GameConfig::new(params, 0, 0);
        let co = Coalition::of((1..=8).map(ServerId::a));
        assert!(matches!(
            exact_view_tv(&c, &c, &g, &co, ViewFilter::Full),
            Err(Error::StateSpaceTooLarge(_))
        ));
    }
}
