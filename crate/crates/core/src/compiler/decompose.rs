//! Frozen single-qubit decomposition table over the V alphabet.
//!
//! Every entry is exactly [`TABLE_WIDTH`] pairs, so a gate always occupies
//! the same number of V slots. Width 8 is the smallest width at which all
//! eight supported gates are realizable: X and Z first appear at 8 pairs,
//! and below that H and I never share a width. Entries are the lexicographically first witness
//! in the order `HI < HT < HT†`; the exhaustive search that produced them
//! lives in the tests.

use crate::circuit::{Alphabet, Gate, PairSlot, Segment};
use crate::error::Result;

pub const TABLE_WIDTH: usize = 8;

use PairSlot::{HTdg as D, HI as I, HT as T};

const ID: [PairSlot; 8] = [I, I, I, I, I, I, I, I];
const H: [PairSlot; 8] = [T, T, I, T, T, I, T, T];
const TT: [PairSlot; 8] = [I, I, I, I, I, I, I, T];
const TDG: [PairSlot; 8] = [I, I, I, I, I, I, I, D];
const S: [PairSlot; 8] = [I, I, I, I, I, T, I, T];
const SDG: [PairSlot; 8] = [I, I, I, I, I, D, I, D];
const X: [PairSlot; 8] = [T, I, T, I, T, I, T, I];
const Z: [PairSlot; 8] = [I, T, I, T, I, T, I, T];

fn entry(g: Gate) -> &'static [PairSlot; TABLE_WIDTH] {
    match g {
        Gate::I => &ID,
        Gate::H => &H,
        Gate::T => &TT,
        Gate::Tdg => &TDG,
        Gate::S => &S,
        Gate::Sdg => &SDG,
        Gate::X => &X,
        Gate::Z => &Z,
    }
}

/// V-alphabet segment whose unitary equals `g` up to global phase.
///
/// Every [`Gate`] currently has an entry; the `Result` keeps room for gates
/// the table does not cover.
pub fn decompose_single(g: Gate) -> Result<Segment> {
    Segment::new(Alphabet::V, entry(g).to_vec())
}
