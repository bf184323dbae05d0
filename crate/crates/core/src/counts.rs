//! Slot and physical-gate accounting, with the overhead bounds the layout
//! is expected to respect.

use serde::{Deserialize, Serialize};

use crate::circuit::PairSlot;
use crate::compiler::CompiledCircuit;
use crate::config::PublicShape;
use crate::obfuscate::{strip_secrets, ObfuscatedProgram, PublicProgram, WindowType, U_TRACKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    /// Pair slots over every track of every window.
    pub slots: usize,
    /// Physical gates over every track (`T²` slots count three).
    pub physical_gates: usize,
    /// Pairs of the real V segments (padding included).
    pub real_v_pairs: usize,
    /// Pairs of the real corner units.
    pub real_u_pairs: usize,
    /// Real mask pairs (one register per row).
    pub real_mask_pairs: usize,
    pub added_by_dummies_v: usize,
    pub added_by_dummies_u: usize,
    pub added_by_dummies: usize,
    /// Mask pairs over every register of every row.
    pub added_by_masks: usize,
    pub physical_added_by_masks: usize,
    /// Tracks per V window (1 before obfuscation).
    pub v_tracks: usize,
    /// Registers carrying the mask of each row (1 before obfuscation).
    pub mask_tracks: usize,
}

impl GateCounts {
    fn add_window<'a>(&mut self, kind: WindowType, tracks: impl ExactSizeIterator<Item = &'a [PairSlot]>) {
        let count = tracks.len();
        let mut width = 0;
        for t in tracks {
            width = t.len();
            self.slots += t.len();
            let physical: usize = t.iter().map(|p| p.physical_len()).sum();
            self.physical_gates += physical;
            if kind == WindowType::Mask {
                self.physical_added_by_masks += physical;
            }
        }
        let added = (count - 1) * width;
        match kind {
            WindowType::V => {
                self.real_v_pairs += width;
                self.added_by_dummies_v += added;
                self.v_tracks = count;
            }
            WindowType::U => {
                self.real_u_pairs += width;
                self.added_by_dummies_u += added;
            }
            WindowType::Mask => {
                self.real_mask_pairs += width;
                self.added_by_masks += count * width;
                self.mask_tracks = count;
            }
        }
        self.added_by_dummies = self.added_by_dummies_v + self.added_by_dummies_u;
    }

    pub fn from_public(p: &PublicProgram) -> Self {
        let mut c = GateCounts::default();
        for w in p.windows() {
            c.add_window(w.kind, w.tracks.iter().map(|t| t.as_slice()));
        }
        c
    }

    /// Checks every bound; returns the violated ones by name.
    pub fn check(&self, shape: &PublicShape) -> OverheadCheck {
        let v_factor = 3usize.pow(shape.window as u32) - 1;
        let u_factor = U_TRACKS - 1;
        let tracks = if self.v_tracks <= 1 { 1 } else { shape.mask_tracks() };
        let mask_expected = 2 * shape.servers * tracks * shape.n;
        OverheadCheck {
            v_bound: v_factor * self.real_v_pairs,
            v_ok: self.added_by_dummies_v <= v_factor * self.real_v_pairs,
            u_bound: u_factor * self.real_u_pairs,
            u_ok: self.added_by_dummies_u <= u_factor * self.real_u_pairs,
            mask_expected,
            mask_ok: self.added_by_masks == mask_expected,
            mask_physical_expected: 2 * mask_expected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadCheck {
    /// `(3^W − 1) ×` real V pairs.
    pub v_bound: usize,
    pub v_ok: bool,
    /// `(3² − 1) ×` real corner-unit pairs.
    pub u_bound: usize,
    pub u_ok: bool,
    /// `2N × tracks × n` mask pairs.
    pub mask_expected: usize,
    pub mask_ok: bool,
    /// `4N × tracks × n` physical mask gates (every mask pair has two).
    pub mask_physical_expected: usize,
}

impl OverheadCheck {
    pub fn all_ok(&self) -> bool {
        self.v_ok && self.u_ok && self.mask_ok
    }
}

/// Counts for a compiled circuit, after obfuscation if `obf` is given and
/// with one track per window otherwise.
pub fn gate_counts(cc: &CompiledCircuit, obf: Option<&ObfuscatedProgram>) -> GateCounts {
    if let Some(p) = obf {
        return GateCounts::from_public(&strip_secrets(p));
    }
    let mut c = GateCounts::default();
    for plan in crate::obfuscate::split_windows(cc) {
        for (w, seg) in &plan.windows {
            c.add_window(w.kind, std::iter::once(seg.pairs()));
        }
    }
    c
}
