//! # bellport
//!
//! A small-register state-vector toolkit for studying two-qubit teleportation
//! through a partly entangled four-particle channel.
//!
//! The sender holds particles 1, 2 in an unknown state and shares the channel
//! state on particles 3–6 with the receiver. Two Bell-state measurements (on
//! pairs (1,4) and (2,3)) collapse the receiver's particles 5, 6 to
//! `(1/4)·σⁱʲ|χ⟩`, where the 4×4 transformation operator σⁱʲ depends only on
//! the channel and the outcome pair, never on the teleported state. The crate
//!
//! - extracts all 16 σⁱʲ by direct Bell-pair projection and checks them
//!   against their closed forms ([`expansion`]),
//! - factorizes each σⁱʲ into a Pauli pair times a positive diagonal
//!   ([`expansion::factorize`]),
//! - simulates the full probabilistic protocol, including the ancilla-assisted
//!   8×8 collective-unitary correction ([`protocol`]),
//! - verifies the alternative two-CNOT ancilla expansion of the
//!   identity-outcome state ([`cnot_path`]),
//! - and exposes all of it through a deterministic CLI ([`cli`]).
//!
//! Registers hold at most [`MAX_QUBITS`] qubits; everything is dense complex
//! `f64` arithmetic. States and operators are immutable values and all
//! operations are pure functions, so the whole crate is trivially thread-safe.

pub mod cli;
pub mod cnot_path;
pub mod error;
pub mod expansion;
pub mod operators;
pub mod protocol;
pub mod report;
pub mod statevec;
pub mod verify;

pub use error::{Error, Result};
pub use expansion::{
    ChannelSpec, Factorization, InputState, Invertibility, TransformationOperator,
};
pub use operators::{Operator, OperatorClass, PauliKind};
pub use protocol::{CorrectionPlan, OutcomeMessage, RunMode, TeleportReport};
pub use statevec::{Label, StateVector};

/// Absolute tolerance for amplitude/entry equality checks.
pub const AMP_TOL: f64 = 1e-12;
/// Tolerance on |Σ|amp|² − 1| for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;
/// Max-norm tolerance on ‖U·U† − I‖ for the unitarity test.
pub const UNITARY_TOL: f64 = 1e-10;
/// |det| at or below this counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Tolerance for end-to-end fidelity checks.
pub const FIDELITY_TOL: f64 = 1e-9;
/// Hard cap on register size (6 protocol qubits + 2 ancillas).
pub const MAX_QUBITS: usize = 8;
/// Hard cap on operator dimension (2^MAX_QUBITS).
pub const MAX_OPERATOR_DIM: usize = 256;

/// Register labels used by the teleportation protocol.
pub mod labels {
    use crate::statevec::Label;

    pub const Q1: Label = Label('1');
    pub const Q2: Label = Label('2');
    pub const Q3: Label = Label('3');
    pub const Q4: Label = Label('4');
    pub const Q5: Label = Label('5');
    pub const Q6: Label = Label('6');
    /// Receiver-side ancilla for the collective-unitary correction.
    pub const ANC_A: Label = Label('a');
    /// Second ancilla, used only by the two-CNOT comparison path.
    pub const ANC_B: Label = Label('b');
}
