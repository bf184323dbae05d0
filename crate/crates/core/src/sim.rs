//! Exact statevector simulation for small circuits.
//!
//! Bit order: row 0 is the most significant bit of a basis-state index, so
//! the basis string `"10"` on two rows is index 2.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Unitary2, UnitaryMatrix};
use crate::error::{Error, Result};

/// Largest register simulated as a statevector.
pub const VECTOR_QUBIT_CAP: usize = 14;
/// Largest register for which a full unitary is built.
pub const MATRIX_QUBIT_CAP: usize = 6;

/// Map from q-bit string (row 0 first) to probability.
pub type OutcomeDistribution = BTreeMap<String, f64>;

/// One step of a real-row instruction stream.
#[derive(Debug, Clone, PartialEq)]
pub enum SimOp {
    Single { row: usize, u: Unitary2 },
    Cz { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    q: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `q` rows.
    pub fn new(q: usize) -> Result<Self> {
        Self::with_cap(q, VECTOR_QUBIT_CAP)
    }

    pub fn with_cap(q: usize, cap: usize) -> Result<Self> {
        if q == 0 || q > cap {
            return Err(Error::QubitCount { q, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { q, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(len, len.next_power_of_two()));
        }
        Ok(Statevector {
            q: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn qubits(&self) -> usize {
        self.q
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn mask(&self, row: usize) -> Result<usize> {
        if row >= self.q {
            return Err(Error::RowOutOfRange { row, q: self.q });
        }
        Ok(1 << (self.q - 1 - row))
    }

    pub fn apply_single(&mut self, row: usize, u: &Unitary2) -> Result<()> {
        let bit = self.mask(row)?;
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = u00 * a0 + u01 * a1;
                self.amps[j] = u10 * a0 + u11 * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, row_a: usize, row_b: usize) -> Result<()> {
        if row_a == row_b {
            return Err(Error::SameRow(row_a));
        }
        let both = self.mask(row_a)? | self.mask(row_b)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, op: &SimOp) -> Result<()> {
        match op {
            SimOp::Single { row, u } => self.apply_single(*row, u),
            SimOp::Cz { a, b } => self.apply_cz(*a, *b),
        }
    }

    /// Exact outcome distribution over all rows; zero-probability outcomes
    /// are omitted.
    pub fn distribution(&self) -> OutcomeDistribution {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (bitstring(i, self.q), a.norm_sqr()))
            .collect()
    }

    /// Samples a full measurement outcome. Draws exactly one `f64` from `rng`.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        let x: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            last = i;
            acc += p;
            if x < acc {
                return bitstring(i, self.q);
            }
        }
        bitstring(last, self.q)
    }
}

/// Index to bit string, row 0 first.
pub fn bitstring(index: usize, q: usize) -> String {
    (0..q)
        .map(|r| if index >> (q - 1 - r) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Full unitary of an instruction stream, built from Kronecker products
/// (independently of the in-place state updates).
pub fn circuit_unitary(q: usize, ops: &[SimOp]) -> Result<UnitaryMatrix> {
    if q == 0 || q > MATRIX_QUBIT_CAP {
        return Err(Error::QubitCount {
            q,
            cap: MATRIX_QUBIT_CAP,
        });
    }
    let dim = 1 << q;
    let mut total = UnitaryMatrix::identity(dim, dim);
    for op in ops {
        let step = match op {
            SimOp::Single { row, u } => {
                if *row >= q {
                    return Err(Error::RowOutOfRange { row: *row, q });
                }
                let mut m = DMatrix::<Complex64>::identity(1, 1);
                for r in 0..q {
                    let factor = if r == *row {
                        DMatrix::from_iterator(2, 2, u.iter().copied())
                    } else {
                        DMatrix::identity(2, 2)
                    };
                    m = m.kronecker(&factor);
                }
                m
            }
            SimOp::Cz { a, b } => {
                if a == b {
                    return Err(Error::SameRow(*a));
                }
                for &r in [a, b] {
                    if r >= q {
                        return Err(Error::RowOutOfRange { row: r, q });
                    }
                }
                let both = (1 << (q - 1 - a)) | (1 << (q - 1 - b));
                let diag = (0..dim).map(|i| {
                    if i & both == both {
                        Complex64::new(-1.0, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                });
                UnitaryMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag))
            }
        };
        total = step * total;
    }
    Ok(total)
}

/// `½ Σ |p − r|` over the union of supports.
pub fn total_variation(p: &OutcomeDistribution, r: &OutcomeDistribution) -> f64 {
    let mut sum = 0.0;
    for (k, pv) in p {
        sum += (pv - r.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, rv) in r {
        if !p.contains_key(k) {
            sum += rv.abs();
        }
    }
    0.5 * sum
}
