//! Output masking: per row, `N` blocks of `HTHI` (a quarter X rotation up to
//! phase) or `HIHI` (identity). Four rotation blocks make `X`, eight make
//! `I`, so the rotation count `c ≡ 4b (mod 8)` encodes the secret flip `b`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Alphabet, PairSlot, Segment, Unitary2};
use crate::error::{Error, Result};

/// Mask blocks for every output row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskBlockSequence {
    /// `rows[r][k]` is block `k` (in time order) on row `r`.
    pub rows: Vec<Vec<Segment>>,
    /// Secret flip per row.
    pub bits: Vec<u8>,
    /// Rotation-block count per row.
    pub rotations: Vec<usize>,
}

pub fn rotation_block() -> Segment {
    Segment::new(Alphabet::Mask, vec![PairSlot::HT, PairSlot::HI]).unwrap()
}

pub fn identity_block() -> Segment {
    Segment::filler(Alphabet::Mask, 2)
}

/// Admissible rotation counts for flip `b` with `n_blocks` blocks.
pub fn rotation_class(b: u8, n_blocks: usize) -> Vec<usize> {
    (0..=n_blocks).filter(|c| c % 8 == 4 * b as usize).collect()
}

/// Draws `b`, then `c` uniformly from its residue class, then uniformly
/// random positions for the `c` rotation blocks, independently per row.
pub fn make_masks<R: Rng + ?Sized>(rows: usize, n_blocks: usize, rng: &mut R) -> Result<MaskBlockSequence> {
    if n_blocks < 4 {
        return Err(Error::InvalidParams(format!(
            "{n_blocks} mask blocks cannot realize an X flip (needs 4)"
        )));
    }
    let mut seq = MaskBlockSequence {
        rows: Vec::with_capacity(rows),
        bits: Vec::with_capacity(rows),
        rotations: Vec::with_capacity(rows),
    };
    for _ in 0..rows {
        let b = rng.gen_range(0..2u8);
        let class = rotation_class(b, n_blocks);
        let c = class[rng.gen_range(0..class.len())];
        let mut blocks = vec![identity_block(); n_blocks];
        for k in sample(rng, n_blocks, c) {
            blocks[k] = rotation_block();
        }
        seq.rows.push(blocks);
        seq.bits.push(b);
        seq.rotations.push(c);
    }
    Ok(seq)
}

impl MaskBlockSequence {
    /// Product of a row's blocks, in execution order.
    pub fn row_unitary(&self, row: usize) -> Unitary2 {
        self.rows[row]
            .iter()
            .fold(Unitary2::identity(), |acc, b| b.unitary() * acc)
    }
}
