use serde::{Deserialize, Serialize};

use crate::circuit::{gate_unitary, Gate};
use crate::error::{Error, Result};
use crate::sim::{OutcomeDistribution, SimOp, Statevector};

/// One operation. In JSON: `{"gate":"H","row":0}`, `{"cnot":[control,target]}`
/// or `{"cz":[a,b]}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "OpJson", into = "OpJson")]
pub enum LogicalOp {
    Single { row: usize, gate: Gate },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum OpJson {
    Single { gate: Gate, row: usize },
    Cnot { cnot: [usize; 2] },
    Cz { cz: [usize; 2] },
}

impl From<OpJson> for LogicalOp {
    fn from(op: OpJson) -> Self {
        match op {
            OpJson::Single { gate, row } => LogicalOp::Single { row, gate },
            OpJson::Cnot { cnot: [control, target] } => LogicalOp::Cnot { control, target },
            OpJson::Cz { cz: [a, b] } => LogicalOp::Cz { a, b },
        }
    }
}

impl From<LogicalOp> for OpJson {
    fn from(op: LogicalOp) -> Self {
        match op {
            LogicalOp::Single { row, gate } => OpJson::Single { gate, row },
            LogicalOp::Cnot { control, target } => OpJson::Cnot { cnot: [control, target] },
            LogicalOp::Cz { a, b } => OpJson::Cz { cz: [a, b] },
        }
    }
}

/// A circuit over `{I,H,T,T†,S,S†,X,Z}` plus CNOT and CZ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalCircuit {
    #[serde(rename = "q")]
    pub qubits: usize,
    pub ops: Vec<LogicalOp>,
}

impl LogicalCircuit {
    pub fn new(qubits: usize, ops: Vec<LogicalOp>) -> Result<Self> {
        let c = LogicalCircuit { qubits, ops };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(Error::QubitCount { q: 0, cap: crate::sim::VECTOR_QUBIT_CAP });
        }
        if self.ops.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        let q = self.qubits;
        let check = |row: usize| {
            if row < q {
                Ok(())
            } else {
                Err(Error::RowOutOfRange { row, q })
            }
        };
        for op in &self.ops {
            match *op {
                LogicalOp::Single { row, .. } => check(row)?,
                LogicalOp::Cnot { control: a, target: b } | LogicalOp::Cz { a, b } => {
                    check(a)?;
                    check(b)?;
                    if a == b {
                        return Err(Error::SameRow(a));
                    }
                }
            }
        }
        Ok(())
    }

    /// Real-row instruction stream; CNOT is lowered to `H_t · CZ · H_t`.
    pub fn to_sim_ops(&self) -> Vec<SimOp> {
        let h = gate_unitary(Gate::H);
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            match *op {
                LogicalOp::Single { row, gate } => ops.push(SimOp::Single {
                    row,
                    u: gate_unitary(gate),
                }),
                LogicalOp::Cnot { control, target } => {
                    ops.push(SimOp::Single { row: target, u: h });
                    ops.push(SimOp::Cz { a: control, b: target });
                    ops.push(SimOp::Single { row: target, u: h });
                }
                LogicalOp::Cz { a, b } => ops.push(SimOp::Cz { a, b }),
            }
        }
        ops
    }

    /// Exact output distribution from `|0…0⟩`.
    pub fn distribution(&self) -> Result<OutcomeDistribution> {
        self.validate()?;
        let mut s = Statevector::new(self.qubits)?;
        for op in self.to_sim_ops() {
            s.apply(&op)?;
        }
        Ok(s.distribution())
    }
}
