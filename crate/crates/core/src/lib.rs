//! Multi-server blind delegation of quantum circuits, simulated end to end.
//!
//! A logical circuit is compiled into a fixed brickwork-like layout, every
//! secret single-qubit window is hidden among all of its dummy
//! alternatives, and the output is flipped by a random, hidden X. The
//! resulting program is executed round-robin by `2N` simulated servers whose
//! transcripts can then be pooled and attacked.
//!
//! ```
//! use blindlab_core::prelude::*;
//!
//! let c = LogicalCircuit::new(1, vec![LogicalOp::Single { row: 0, gate: Gate::X }]).unwrap();
//! let cfg = ProtocolConfig::new(Params::new(4, 4), 7);
//! let (_, result) = execute(&c, &cfg).unwrap();
//! assert_eq!(result.decoded, "1");
//! ```

pub mod adversary;
pub mod circuit;
pub mod compiler;
pub mod config;
pub mod counts;
pub mod error;
pub mod obfuscate;
pub mod protocol;
pub mod sim;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::circuit::{Alphabet, Gate, PairSlot, Segment};
    pub use crate::compiler::{compile, LogicalCircuit, LogicalOp};
    pub use crate::config::{Params, PublicShape};
    pub use crate::obfuscate::{obfuscate, strip_secrets, PublicProgram};
    pub use crate::protocol::{execute, run, ProtocolConfig, ServerId};
}
