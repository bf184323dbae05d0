#![allow(dead_code)]

use blindlab_core::circuit::Gate;
use blindlab_core::compiler::{LogicalCircuit, LogicalOp};
use blindlab_core::config::Params;
use blindlab_core::sim::{bitstring, circuit_unitary, OutcomeDistribution};
use rand::Rng;

/// Random circuit on `1..=max_q` qubits with `1..=max_ops` ops; two-qubit
/// ops act on adjacent rows.
pub fn random_circuit<R: Rng>(rng: &mut R, max_q: usize, max_ops: usize) -> LogicalCircuit {
    let q = rng.gen_range(1..=max_q);
    let len = rng.gen_range(1..=max_ops);
    let ops = (0..len)
        .map(|_| {
            if q == 1 || rng.gen_bool(0.6) {
                LogicalOp::Single {
                    row: rng.gen_range(0..q),
                    gate: Gate::ALL[rng.gen_range(0..Gate::ALL.len())],
                }
            } else {
                let a = rng.gen_range(0..q - 1);
                let (x, y) = if rng.gen_bool(0.5) { (a, a + 1) } else { (a + 1, a) };
                if rng.gen_bool(0.75) {
                    LogicalOp::Cnot { control: x, target: y }
                } else {
                    LogicalOp::Cz { a: x, b: y }
                }
            }
        })
        .collect();
    LogicalCircuit::new(q, ops).unwrap()
}

/// Output distribution from the full circuit matrix applied to `|0…0⟩`.
pub fn direct_distribution(c: &LogicalCircuit) -> OutcomeDistribution {
    let u = circuit_unitary(c.qubits, &c.to_sim_ops()).unwrap();
    let mut d = OutcomeDistribution::new();
    for i in 0..u.nrows() {
        let p = u[(i, 0)].norm_sqr();
        if p > 0.0 {
            d.insert(bitstring(i, c.qubits), p);
        }
    }
    d
}

/// Enough layers and V width for any circuit of `random_circuit(_, 4, 12)`.
pub fn roomy(servers: usize, colluders: usize) -> Params {
    Params::new(servers, colluders).with_m(16).with_layers(24)
}
