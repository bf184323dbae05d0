//! The fixed brickwork-like layout and greedy placement of a logical circuit.
//!
//! Time runs over positions `0..=2p`: even position `2j` is V column `j`,
//! odd position `2j+1` is brick layer `j`. Layer `j` pairs rows
//! `(0,1),(2,3),…` when `j` is even and `(1,2),(3,4),…` when `j` is odd,
//! leaving the first and last rows idle. A trailing V column follows the
//! last layer.

use serde::{Deserialize, Serialize};

use crate::circuit::{Alphabet, Gate, PairSlot, Segment};
use crate::compiler::decompose::{decompose_single, TABLE_WIDTH};
use crate::compiler::logical::{LogicalCircuit, LogicalOp};
use crate::config::{Params, PublicShape};
use crate::error::{Error, Result};
use crate::sim::SimOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BrickType {
    Identity,
    /// CNOT between the two rows of the brick.
    Cnot { control_upper: bool },
}

/// Corner units `(U1, U2, U3, U4)` for the canonical orientation: U1 and U3
/// sit on the upper row, U2 and U4 on the lower row, and the brick acts as
/// `CZ·(U3⊗U4)·CZ·(U1⊗U2)`.
pub fn brick_units(t: BrickType) -> [Segment; 4] {
    use PairSlot::{HTdg2, HI, HT2};
    let unit = |pairs: [PairSlot; 2]| Segment::new(Alphabet::U, pairs.to_vec()).unwrap();
    match t {
        BrickType::Identity => std::array::from_fn(|_| unit([HI, HI])),
        BrickType::Cnot { .. } => [
            unit([HI, HT2]),
            unit([HT2, HI]),
            unit([HI, HI]),
            unit([HTdg2, HI]),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brick {
    pub layer: usize,
    pub upper: usize,
    pub kind: BrickType,
    /// Units on the upper row: before the first CZ, between the CZs.
    pub upper_units: [Segment; 2],
    /// Units on the lower row, same order.
    pub lower_units: [Segment; 2],
}

impl Brick {
    pub fn new(layer: usize, upper: usize, kind: BrickType) -> Self {
        let [u1, u2, u3, u4] = brick_units(kind);
        let mirrored = matches!(kind, BrickType::Cnot { control_upper: false });
        let (upper_units, lower_units) = if mirrored {
            ([u2, u4], [u1, u3])
        } else {
            ([u1, u3], [u2, u4])
        };
        Brick {
            layer,
            upper,
            kind,
            upper_units,
            lower_units,
        }
    }

    pub fn lower(&self) -> usize {
        self.upper + 1
    }
}

/// Upper rows of the bricks in layer `j` for `n` rows.
pub fn layer_uppers(layer: usize, n: usize) -> impl Iterator<Item = usize> {
    let start = layer % 2;
    (start..n.saturating_sub(1 + start)).step_by(2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickworkLayout {
    pub rows: usize,
    pub layers: usize,
    pub v_width: usize,
    /// `v_segments[column][row]`, `layers + 1` columns.
    pub v_segments: Vec<Vec<Segment>>,
    /// Every brick of every layer, in layer order then row order.
    pub bricks: Vec<Brick>,
}

impl BrickworkLayout {
    pub fn bricks_in_layer(&self, layer: usize) -> impl Iterator<Item = &Brick> {
        self.bricks.iter().filter(move |b| b.layer == layer)
    }

    /// Real-row instruction stream in execution order (no masks).
    pub fn to_sim_ops(&self) -> Vec<SimOp> {
        let mut ops = Vec::new();
        let push_segment = |ops: &mut Vec<SimOp>, row: usize, seg: &Segment| {
            for p in seg.time_ordered() {
                ops.push(SimOp::Single { row, u: p.unitary() });
            }
        };
        for col in 0..=self.layers {
            for (row, seg) in self.v_segments[col].iter().enumerate() {
                push_segment(&mut ops, row, seg);
            }
            if col == self.layers {
                break;
            }
            for half in 0..2 {
                for b in self.bricks_in_layer(col) {
                    push_segment(&mut ops, b.upper, &b.upper_units[half]);
                    push_segment(&mut ops, b.lower(), &b.lower_units[half]);
                }
                for b in self.bricks_in_layer(col) {
                    ops.push(SimOp::Cz { a: b.upper, b: b.lower() });
                }
            }
        }
        ops
    }
}

/// Places `c` into the layout fixed by `params`.
///
/// Single-qubit gates go into the earliest V column at or after the row's
/// last occupied position; CNOTs go into the earliest brick of matching
/// parity after both rows are free. CZ is lowered to `H·CNOT·H` on the
/// second row first.
pub fn build_layout(c: &LogicalCircuit, params: &Params) -> Result<BrickworkLayout> {
    params.validate()?;
    c.validate()?;
    let shape = PublicShape::new(c.qubits, params);
    let (n, layers, v_width) = (shape.n, shape.p, shape.v_width);
    let capacity = v_width / TABLE_WIDTH;

    // Gates per (column, row) in time order.
    let mut v_gates: Vec<Vec<Vec<Gate>>> = vec![vec![Vec::new(); n]; layers + 1];
    let mut kinds: Vec<Vec<Option<BrickType>>> = vec![vec![None; n]; layers];
    // Last occupied time position per row.
    let mut busy: Vec<Option<usize>> = vec![None; n];

    let mut place_single = |busy: &mut Vec<Option<usize>>, row: usize, gate: Gate| -> Result<()> {
        if capacity == 0 {
            return Err(Error::SegmentOverflow { row, width: v_width });
        }
        let mut pos = match busy[row] {
            None => 0,
            Some(b) if b % 2 == 0 => b,
            Some(b) => b + 1,
        };
        while pos <= 2 * layers && v_gates[pos / 2][row].len() >= capacity {
            pos += 2;
        }
        if pos > 2 * layers {
            return Err(Error::LayoutOverflow { layers });
        }
        v_gates[pos / 2][row].push(gate);
        busy[row] = Some(pos);
        Ok(())
    };

    let mut place_cnot = |busy: &mut Vec<Option<usize>>, control: usize, target: usize| -> Result<()> {
        if control.abs_diff(target) != 1 {
            return Err(Error::NonAdjacentTwoQubitOp(control, target));
        }
        let upper = control.min(target);
        let after = [busy[control], busy[target]]
            .into_iter()
            .flatten()
            .max()
            .map_or(0, |b| b + 1);
        let layer = (0..layers)
            .find(|&j| 2 * j + 1 >= after && j % 2 == upper % 2)
            .ok_or(Error::LayoutOverflow { layers })?;
        kinds[layer][upper] = Some(BrickType::Cnot {
            control_upper: control == upper,
        });
        busy[control] = Some(2 * layer + 1);
        busy[target] = Some(2 * layer + 1);
        Ok(())
    };

    for op in &c.ops {
        match *op {
            LogicalOp::Single { row, gate } => place_single(&mut busy, row, gate)?,
            LogicalOp::Cnot { control, target } => place_cnot(&mut busy, control, target)?,
            LogicalOp::Cz { a, b } => {
                if a.abs_diff(b) != 1 {
                    return Err(Error::NonAdjacentTwoQubitOp(a, b));
                }
                place_single(&mut busy, b, Gate::H)?;
                place_cnot(&mut busy, a, b)?;
                place_single(&mut busy, b, Gate::H)?;
            }
        }
    }

    let v_segments = v_gates
        .iter()
        .map(|column| {
            column
                .iter()
                .map(|gates| v_segment(gates, v_width))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let bricks = (0..layers)
        .flat_map(|j| layer_uppers(j, n).map(move |u| (j, u)))
        .map(|(j, u)| Brick::new(j, u, kinds[j][u].unwrap_or(BrickType::Identity)))
        .collect();

    Ok(BrickworkLayout {
        rows: n,
        layers,
        v_width,
        v_segments,
        bricks,
    })
}

/// Written-order V segment for gates listed in time order, padded with
/// `HI` pairs (always an even number of them).
fn v_segment(gates: &[Gate], width: usize) -> Result<Segment> {
    let mut pairs = Vec::with_capacity(width);
    for &g in gates.iter().rev() {
        pairs.extend_from_slice(decompose_single(g)?.pairs());
    }
    debug_assert!((width - pairs.len()).is_multiple_of(2));
    pairs.resize(width, PairSlot::HI);
    Segment::new(Alphabet::V, pairs)
}

/// Convenience used by tests and reports: the unitary of a single brick,
/// `CZ·(a3⊗b3)·CZ·(a1⊗b1)` with the upper row as the first tensor factor.
pub fn brick_unitary(b: &Brick) -> crate::circuit::UnitaryMatrix {
    let ops = [
        SimOp::Single { row: 0, u: b.upper_units[0].unitary() },
        SimOp::Single { row: 1, u: b.lower_units[0].unitary() },
        SimOp::Cz { a: 0, b: 1 },
        SimOp::Single { row: 0, u: b.upper_units[1].unitary() },
        SimOp::Single { row: 1, u: b.lower_units[1].unitary() },
        SimOp::Cz { a: 0, b: 1 },
    ];
    crate::sim::circuit_unitary(2, &ops).expect("two rows fit in matrix mode")
}
