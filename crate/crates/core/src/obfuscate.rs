//! Dummy-track obfuscation.
//!
//! Every secret V or U segment is cut into windows, and each window runs
//! *all* sequences of its width over its alphabet in parallel, in a
//! uniformly shuffled order. The multiset of tracks is therefore the same
//! for every circuit; only the secret `real_index` says which one matters.
//!
//! Mask blocks are by default not enumerated: the block sequence of a row
//! runs on every register of that row, real and dummy alike, so the mask is
//! visible to whoever executes it. [`MaskMode::Enumerate`] treats mask
//! windows like gate windows instead.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Alphabet, PairSlot, Segment};
use crate::compiler::CompiledCircuit;
use crate::config::{MaskMode, PublicShape};
use crate::error::{Error, Result};

/// Tracks per U window: `3^2`.
pub const U_TRACKS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WindowType {
    V,
    U,
    Mask,
}

impl WindowType {
    pub fn alphabet(self) -> Alphabet {
        match self {
            WindowType::V => Alphabet::V,
            WindowType::U => Alphabet::U,
            WindowType::Mask => Alphabet::Mask,
        }
    }

    pub fn is_gate(self) -> bool {
        self != WindowType::Mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub id: usize,
    pub kind: WindowType,
    pub row: usize,
    pub width: usize,
}

impl Window {
    pub fn alphabet(&self) -> Alphabet {
        self.kind.alphabet()
    }
}

/// Parallel tracks of one window, post-shuffle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackSet {
    pub tracks: Vec<Segment>,
    pub real_index: usize,
}

/// Where a stage sits in the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageKind {
    V { column: usize, part: usize },
    U { layer: usize, half: usize },
    Mask { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CzEvent {
    pub rows: (usize, usize),
    pub layer: usize,
}

/// Windows that run side by side over the same `width` rounds, followed by
/// the CZ events of a brick layer half (if any).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePlan {
    pub kind: StageKind,
    pub width: usize,
    pub windows: Vec<(Window, Segment)>,
    pub cz_after: Vec<CzEvent>,
}

/// Cuts every secret segment of `cc` into windows, in schedule order.
///
/// V columns are cut into `W`-pair windows (the V width is always a
/// multiple of `W`), each corner unit is one 2-pair window, and each mask
/// block is one 2-pair window. CZ events never fall inside a window.
pub fn split_windows(cc: &CompiledCircuit) -> Vec<StagePlan> {
    let shape = cc.shape;
    let layout = &cc.layout;
    let w = shape.window;
    let mut next_id = 0;
    let mut window = |kind: WindowType, row: usize, width: usize| {
        let win = Window {
            id: next_id,
            kind,
            row,
            width,
        };
        next_id += 1;
        win
    };
    let mut stages = Vec::new();

    let push_v = |stages: &mut Vec<StagePlan>, column: usize, window: &mut dyn FnMut(WindowType, usize, usize) -> Window| {
        let segs = &layout.v_segments[column];
        for part in 0..shape.v_width / w {
            let windows = segs
                .iter()
                .enumerate()
                .map(|(row, seg)| (window(WindowType::V, row, w), time_chunk(seg, part * w, w)))
                .collect();
            stages.push(StagePlan {
                kind: StageKind::V { column, part },
                width: w,
                windows,
                cz_after: Vec::new(),
            });
        }
    };

    for column in 0..=layout.layers {
        push_v(&mut stages, column, &mut window);
        if column == layout.layers {
            break;
        }
        let bricks: Vec<_> = layout.bricks_in_layer(column).collect();
        if bricks.is_empty() {
            continue;
        }
        for half in 0..2 {
            let mut windows = Vec::with_capacity(2 * bricks.len());
            for b in &bricks {
                windows.push((window(WindowType::U, b.upper, 2), b.upper_units[half].clone()));
                windows.push((window(WindowType::U, b.lower(), 2), b.lower_units[half].clone()));
            }
            stages.push(StagePlan {
                kind: StageKind::U { layer: column, half },
                width: 2,
                windows,
                cz_after: bricks
                    .iter()
                    .map(|b| CzEvent {
                        rows: (b.upper, b.lower()),
                        layer: column,
                    })
                    .collect(),
            });
        }
    }

    for block in 0..shape.servers {
        let windows = cc
            .masks
            .rows
            .iter()
            .enumerate()
            .map(|(row, blocks)| (window(WindowType::Mask, row, 2), blocks[block].clone()))
            .collect();
        stages.push(StagePlan {
            kind: StageKind::Mask { block },
            width: 2,
            windows,
            cz_after: Vec::new(),
        });
    }
    stages
}

/// The `len` pairs executed at time offsets `start..start+len` of `seg`,
/// as a written-order segment.
fn time_chunk(seg: &Segment, start: usize, len: usize) -> Segment {
    let w = seg.width();
    let pairs = seg.pairs()[w - start - len..w - start].to_vec();
    Segment::new(seg.alphabet(), pairs).expect("sub-segment of a valid segment")
}

/// Full enumeration of the window's alphabet at its width, shuffled.
pub fn make_tracks<R: Rng + ?Sized>(w: &Window, real: &Segment, rng: &mut R) -> Result<TrackSet> {
    let alphabet = w.alphabet();
    if real.width() != w.width || !real.pairs().iter().all(|&p| alphabet.contains(p)) {
        return Err(Error::NotInAlphabet);
    }
    let mut all = alphabet.enumerate(w.width);
    all.shuffle(rng);
    let real_index = all
        .iter()
        .position(|t| t.as_slice() == real.pairs())
        .expect("enumeration contains every sequence");
    let tracks = all
        .into_iter()
        .map(|pairs| Segment::new(alphabet, pairs).expect("enumerated over the alphabet"))
        .collect();
    Ok(TrackSet { tracks, real_index })
}

/// `count` copies of the mask block; the real register is a uniformly
/// random one of them.
pub fn replicate_mask<R: Rng + ?Sized>(w: &Window, block: &Segment, count: usize, rng: &mut R) -> Result<TrackSet> {
    if block.width() != w.width || !block.pairs().iter().all(|&p| Alphabet::Mask.contains(p)) {
        return Err(Error::NotInAlphabet);
    }
    Ok(TrackSet {
        tracks: vec![Segment::new(Alphabet::Mask, block.pairs().to_vec())?; count],
        real_index: rng.gen_range(0..count),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub kind: StageKind,
    pub width: usize,
    pub windows: Vec<(Window, TrackSet)>,
    pub cz_after: Vec<CzEvent>,
}

/// A compiled circuit with every window expanded into its track set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObfuscatedProgram {
    pub shape: PublicShape,
    pub stages: Vec<Stage>,
    pub secret: ProgramSecret,
}

/// What only the user holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramSecret {
    pub logical_qubits: usize,
    pub mask_bits: Vec<u8>,
    /// Indexed by window id.
    pub real_index: Vec<usize>,
}

pub fn obfuscate<R: Rng + ?Sized>(cc: &CompiledCircuit, rng: &mut R) -> Result<ObfuscatedProgram> {
    let mask_tracks = cc.shape.mask_tracks();
    let mut stages = Vec::new();
    let mut real_index = Vec::new();
    for plan in split_windows(cc) {
        let mut windows = Vec::with_capacity(plan.windows.len());
        for (w, real) in plan.windows {
            let set = match w.kind {
                WindowType::Mask if cc.shape.masks == MaskMode::Replicate => {
                    replicate_mask(&w, &real, mask_tracks, rng)?
                }
                _ => make_tracks(&w, &real, rng)?,
            };
            debug_assert_eq!(w.id, real_index.len());
            real_index.push(set.real_index);
            windows.push((w, set));
        }
        stages.push(Stage {
            kind: plan.kind,
            width: plan.width,
            windows,
            cz_after: plan.cz_after,
        });
    }
    Ok(ObfuscatedProgram {
        shape: cc.shape,
        stages,
        secret: ProgramSecret {
            logical_qubits: cc.logical_qubits,
            mask_bits: cc.masks.bits.clone(),
            real_index,
        },
    })
}

impl ObfuscatedProgram {
    pub fn windows(&self) -> impl Iterator<Item = &(Window, TrackSet)> {
        self.stages.iter().flat_map(|s| s.windows.iter())
    }

    pub fn window_count(&self) -> usize {
        self.secret.real_index.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicWindow {
    pub id: usize,
    pub kind: WindowType,
    pub row: usize,
    /// Tracks in shuffled order, pairs in written order.
    pub tracks: Vec<Vec<PairSlot>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicStage {
    #[serde(flatten)]
    pub kind: StageKind,
    pub width: usize,
    pub windows: Vec<PublicWindow>,
    pub cz_after: Vec<CzEvent>,
}

/// The obfuscated program with every secret removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicProgram {
    pub shape: PublicShape,
    pub stages: Vec<PublicStage>,
}

impl PublicProgram {
    /// Byte-exact canonical form.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("public program serializes")
    }

    pub fn windows(&self) -> impl Iterator<Item = &PublicWindow> {
        self.stages.iter().flat_map(|s| s.windows.iter())
    }
}

/// Anything with a secret-free public form.
pub trait StripSecrets {
    fn strip_secrets(&self) -> PublicProgram;
}

impl StripSecrets for ObfuscatedProgram {
    fn strip_secrets(&self) -> PublicProgram {
        PublicProgram {
            shape: self.shape,
            stages: self
                .stages
                .iter()
                .map(|s| PublicStage {
                    kind: s.kind,
                    width: s.width,
                    windows: s
                        .windows
                        .iter()
                        .map(|(w, set)| PublicWindow {
                            id: w.id,
                            kind: w.kind,
                            row: w.row,
                            tracks: set.tracks.iter().map(|t| t.pairs().to_vec()).collect(),
                        })
                        .collect(),
                    cz_after: s.cz_after.clone(),
                })
                .collect(),
        }
    }
}

impl StripSecrets for PublicProgram {
    fn strip_secrets(&self) -> PublicProgram {
        self.clone()
    }
}

pub fn strip_secrets<P: StripSecrets + ?Sized>(p: &P) -> PublicProgram {
    p.strip_secrets()
}
