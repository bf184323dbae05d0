//! Gate alphabet, pair-slot instruction encoding and exact unitary semantics.
//!
//! Every single-qubit instruction the servers ever see is a *pair slot*: an
//! `H` followed by one of `I`, `T`, `T†`, `T²`, `T†²`. Products are written
//! the way they are multiplied: in `H·I·H·T²` the rightmost factor acts first.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, Dim, Matrix, Matrix2, RawStorage};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2×2 single-qubit unitary.
pub type Unitary2 = Matrix2<Complex64>;
/// 2^q × 2^q circuit-level unitary.
pub type UnitaryMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);
/// e^{iπ/4}
const OMEGA: Complex64 = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);

/// Single-qubit gate labels. CZ is never a `Gate`; it is a two-row event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gate {
    I,
    H,
    T,
    Tdg,
    S,
    Sdg,
    X,
    Z,
}

impl Gate {
    pub const ALL: [Gate; 8] = [
        Gate::I,
        Gate::H,
        Gate::T,
        Gate::Tdg,
        Gate::S,
        Gate::Sdg,
        Gate::X,
        Gate::Z,
    ];

    pub fn unitary(self) -> Unitary2 {
        gate_unitary(self)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Exact matrix of a single-qubit gate.
pub fn gate_unitary(g: Gate) -> Unitary2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match g {
        Gate::I => Unitary2::new(ONE, ZERO, ZERO, ONE),
        Gate::H => Unitary2::new(h, h, h, -h),
        Gate::T => Unitary2::new(ONE, ZERO, ZERO, OMEGA),
        Gate::Tdg => Unitary2::new(ONE, ZERO, ZERO, OMEGA.conj()),
        Gate::S => Unitary2::new(ONE, ZERO, ZERO, I_UNIT),
        Gate::Sdg => Unitary2::new(ONE, ZERO, ZERO, -I_UNIT),
        Gate::X => Unitary2::new(ZERO, ONE, ONE, ZERO),
        Gate::Z => Unitary2::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// An `H` followed by one of five diagonal "second" gates.
///
/// `HT2`/`HTdg2` carry two physical T (resp. T†) gates in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairSlot {
    HI,
    HT,
    HTdg,
    HT2,
    HTdg2,
}

impl PairSlot {
    pub const ALL: [PairSlot; 5] = [
        PairSlot::HI,
        PairSlot::HT,
        PairSlot::HTdg,
        PairSlot::HT2,
        PairSlot::HTdg2,
    ];

    /// Physical expansion in written order (always starts with `H`).
    pub fn expand(self) -> Vec<Gate> {
        expand_pair(self)
    }

    /// Number of physical gates in the slot.
    pub fn physical_len(self) -> usize {
        match self {
            PairSlot::HI | PairSlot::HT | PairSlot::HTdg => 2,
            PairSlot::HT2 | PairSlot::HTdg2 => 3,
        }
    }

    pub fn unitary(self) -> Unitary2 {
        product(&self.expand())
    }

    /// Two-letter wire code used in public artifacts and transcripts.
    pub fn code(self) -> &'static str {
        match self {
            PairSlot::HI => "HI",
            PairSlot::HT => "HT",
            PairSlot::HTdg => "Hd",
            PairSlot::HT2 => "H2",
            PairSlot::HTdg2 => "HD",
        }
    }

    pub fn from_code(code: &str) -> Option<PairSlot> {
        PairSlot::ALL.into_iter().find(|p| p.code() == code)
    }
}

impl fmt::Display for PairSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for PairSlot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for PairSlot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let code = String::deserialize(d)?;
        PairSlot::from_code(&code)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown pair code {code:?}")))
    }
}

pub fn expand_pair(p: PairSlot) -> Vec<Gate> {
    match p {
        PairSlot::HI => vec![Gate::H, Gate::I],
        PairSlot::HT => vec![Gate::H, Gate::T],
        PairSlot::HTdg => vec![Gate::H, Gate::Tdg],
        PairSlot::HT2 => vec![Gate::H, Gate::T, Gate::T],
        PairSlot::HTdg2 => vec![Gate::H, Gate::Tdg, Gate::Tdg],
    }
}

/// Which pair slots a segment may draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Alphabet {
    /// `{HI, HT, HT†}`: secret single-qubit segments.
    V,
    /// `{HI, HT², HT†²}`: brick corner units.
    U,
    /// `{HI, HT}`: output mask blocks.
    Mask,
}

impl Alphabet {
    pub fn members(self) -> &'static [PairSlot] {
        match self {
            Alphabet::V => &[PairSlot::HI, PairSlot::HT, PairSlot::HTdg],
            Alphabet::U => &[PairSlot::HI, PairSlot::HT2, PairSlot::HTdg2],
            Alphabet::Mask => &[PairSlot::HI, PairSlot::HT],
        }
    }

    pub fn contains(self, p: PairSlot) -> bool {
        self.members().contains(&p)
    }

    /// Every sequence of `width` pairs over the alphabet, in lexicographic
    /// order of member index.
    pub fn enumerate(self, width: usize) -> Vec<Vec<PairSlot>> {
        let members = self.members();
        let mut out: Vec<Vec<PairSlot>> = vec![Vec::with_capacity(width)];
        for _ in 0..width {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    members.iter().map(move |&m| {
                        let mut next = prefix.clone();
                        next.push(m);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

/// An ordered run of pair slots, written in product order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pairs: Vec<PairSlot>,
    alphabet: Alphabet,
}

impl Segment {
    pub fn new(alphabet: Alphabet, pairs: Vec<PairSlot>) -> Result<Self> {
        if pairs.iter().all(|&p| alphabet.contains(p)) {
            Ok(Segment { pairs, alphabet })
        } else {
            Err(Error::NotInAlphabet)
        }
    }

    /// `[HI; width]` over the given alphabet.
    pub fn filler(alphabet: Alphabet, width: usize) -> Self {
        Segment {
            pairs: vec![PairSlot::HI; width],
            alphabet,
        }
    }

    pub fn pairs(&self) -> &[PairSlot] {
        &self.pairs
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn width(&self) -> usize {
        self.pairs.len()
    }

    /// Pairs in execution order (reverse of written order).
    pub fn time_ordered(&self) -> impl Iterator<Item = PairSlot> + '_ {
        self.pairs.iter().rev().copied()
    }

    pub fn physical_len(&self) -> usize {
        self.pairs.iter().map(|p| p.physical_len()).sum()
    }

    pub fn unitary(&self) -> Unitary2 {
        segment_unitary(self)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            f.write_str(p.code())?;
        }
        Ok(())
    }
}

fn product(gates: &[Gate]) -> Unitary2 {
    gates
        .iter()
        .fold(Unitary2::identity(), |acc, &g| acc * gate_unitary(g))
}

/// Product of the expanded gates in written order.
pub fn segment_unitary(s: &Segment) -> Unitary2 {
    s.pairs
        .iter()
        .fold(Unitary2::identity(), |acc, &p| acc * p.unitary())
}

/// True iff `‖u − e^{iφ}v‖_max ≤ tol` for the phase φ read off the
/// largest-magnitude entry of `v`.
pub fn equal_up_to_global_phase<R1, C1, S1, R2, C2, S2>(
    u: &Matrix<Complex64, R1, C1, S1>,
    v: &Matrix<Complex64, R2, C2, S2>,
    tol: f64,
) -> Result<bool>
where
    R1: Dim,
    C1: Dim,
    S1: RawStorage<Complex64, R1, C1>,
    R2: Dim,
    C2: Dim,
    S2: RawStorage<Complex64, R2, C2>,
{
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let Some((k, vk)) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    else {
        return Ok(true);
    };
    let uk = u.iter().nth(k).copied().unwrap_or(ZERO);
    if vk.norm() == 0.0 {
        return Ok(u.iter().all(|x| x.norm() <= tol));
    }
    let ratio = uk / vk;
    if ratio.norm() == 0.0 {
        return Ok(false);
    }
    let phase = ratio / ratio.norm();
    Ok(u.iter().zip(v.iter()).all(|(a, b)| (a - phase * b).norm() <= tol))
}

/// `‖U†U − I‖_max ≤ tol`.
pub fn is_unitary<R, C, S>(m: &Matrix<Complex64, R, C, S>, tol: f64) -> bool
where
    R: Dim,
    C: Dim,
    S: RawStorage<Complex64, R, C>,
{
    let (rows, cols) = m.shape();
    if rows != cols {
        return false;
    }
    let d = DMatrix::from_iterator(rows, cols, m.iter().copied());
    let prod = d.adjoint() * &d;
    let id = DMatrix::<Complex64>::identity(rows, cols);
    (prod - id).iter().all(|x| x.norm() <= tol)
}

/// `R_x(θ) = exp(−iθX/2)`.
pub fn rx(theta: f64) -> Unitary2 {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(theta / 2.0).sin());
    Unitary2::new(c, s, s, c)
}

/// `R_z(θ) = exp(−iθZ/2)`.
pub fn rz(theta: f64) -> Unitary2 {
    Unitary2::new(
        Complex64::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

/// Largest entrywise distance between two matrices of equal shape.
pub fn max_abs_diff<R, C, S1, S2>(
    a: &Matrix<Complex64, R, C, S1>,
    b: &Matrix<Complex64, R, C, S2>,
) -> f64
where
    R: Dim,
    C: Dim,
    S1: RawStorage<Complex64, R, C>,
    S2: RawStorage<Complex64, R, C>,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
