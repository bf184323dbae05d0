//! Logical circuit → brickwork layout + output masks.

mod decompose;
mod layout;
mod logical;
mod masks;

pub use decompose::{decompose_single, TABLE_WIDTH};
pub use layout::{
    brick_units, brick_unitary, build_layout, layer_uppers, Brick, BrickType, BrickworkLayout,
};
pub use logical::{LogicalCircuit, LogicalOp};
pub use masks::{identity_block, make_masks, rotation_block, rotation_class, MaskBlockSequence};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Params, PublicShape};
use crate::error::Result;
use crate::sim::{OutcomeDistribution, Statevector};

/// Layout plus output masks. Everything but `shape` is secret.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub shape: PublicShape,
    pub logical_qubits: usize,
    pub layout: BrickworkLayout,
    pub masks: MaskBlockSequence,
}

/// Builds the layout and draws the output masks from `rng`.
///
/// The only randomness consumed is the mask draw, which does not depend on
/// the circuit, so two circuits of equal width compiled from equal rng
/// states consume identical streams.
pub fn compile<R: Rng + ?Sized>(c: &LogicalCircuit, params: &Params, rng: &mut R) -> Result<CompiledCircuit> {
    let layout = build_layout(c, params)?;
    compile_with_layout(layout, c.qubits, params, rng)
}

/// Same as [`compile`] for a layout that was already built.
pub fn compile_with_layout<R: Rng + ?Sized>(
    layout: BrickworkLayout,
    logical_qubits: usize,
    params: &Params,
    rng: &mut R,
) -> Result<CompiledCircuit> {
    let shape = PublicShape::new(logical_qubits, params);
    let masks = make_masks(shape.n, params.servers, rng)?;
    Ok(CompiledCircuit {
        shape,
        logical_qubits,
        layout,
        masks,
    })
}

impl CompiledCircuit {
    /// Exact distribution of the unmasked layout over all `n` rows.
    pub fn layout_distribution(&self) -> Result<OutcomeDistribution> {
        let mut s = Statevector::new(self.shape.n)?;
        for op in self.layout.to_sim_ops() {
            s.apply(&op)?;
        }
        Ok(s.distribution())
    }
}
