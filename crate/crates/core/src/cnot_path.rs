//! The two-CNOT ancilla expansion of the identity-outcome state.
//!
//! An alternative correction route: after the (1,1) Bell outcome the receiver
//! adjoins two ancillas in |00⟩_ab and applies CNOTs with particles 5 and 6 as
//! controls and a, b as targets. The result splits into four branches, each a
//! sign-flipped copy of the input on (5,6) tensored with the matching
//! sign-flipped channel vector on (a,b): the state a POVM would then have to
//! discriminate. This module verifies that expansion and the underlying
//! operator identity; the POVM itself is out of scope.
//!
//! Both identities hold with a global 1/2 on the Pauli-string side (1/8 for
//! the four-branch state form). The four sign patterns are the characters of
//! Z₂², which is what makes the branch sum collapse back to the CNOT image.

use crate::error::Result;
use crate::expansion::{sigma_extract, ChannelSpec, InputState};
use crate::labels::{ANC_A, ANC_B, Q5, Q6};
use crate::operators::{cnot, pauli, Operator, PauliKind};
use crate::protocol::{outcome_state, prepare_joint, OutcomeMessage};
use crate::statevec::{embed, StateVector};

/// Sign patterns of the four branches over the basis (|00⟩,|01⟩,|10⟩,|11⟩);
/// group k pairs the k-th Z-string on (5,6) with these signs on the channel
/// coefficients.
pub const SIGN_PATTERNS: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Verified global prefactor of the four-branch state expansion.
pub const BRANCH_SCALE: f64 = 0.125;

/// One branch: a sign-flipped system state on (5,6) and its matching
/// sign-flipped ancilla vector on (a,b).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub system: StateVector,
    pub ancilla: StateVector,
}

/// The four branches plus the global scale; their weighted sum reconstructs
/// the full (5,6,a,b) state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    pub branches: [Branch; 4],
    pub scale: f64,
}

impl BranchDecomposition {
    /// scale · Σ system ⊗ ancilla.
    pub fn reconstruct(&self) -> Result<StateVector> {
        let mut sum: Option<StateVector> = None;
        for branch in &self.branches {
            let term = branch.system.tensor(&branch.ancilla)?;
            sum = Some(match sum {
                Some(acc) => acc.add(&term)?,
                None => term,
            });
        }
        Ok(sum
            .expect("four branches always present")
            .scaled(self.scale))
    }
}

/// The unnormalized (1,1)-outcome state on (5,6), straight from the double
/// Bell projection.
pub fn identity_outcome_state(input: &InputState, channel: &ChannelSpec) -> Result<StateVector> {
    let joint = prepare_joint(input, channel)?;
    let (residual, _) = outcome_state(&joint, OutcomeMessage::new(1, 1)?)?;
    Ok(residual)
}

/// (CN)₅ₐ(CN)₆ᵦ applied to the (1,1)-outcome state with ancillas |00⟩_ab,
/// over labels (5,6,a,b).
pub fn cnot_expand(input: &InputState, channel: &ChannelSpec) -> Result<StateVector> {
    let psi = identity_outcome_state(input, channel)?;
    let ab = StateVector::basis_on(&[ANC_A, ANC_B], "00")?;
    let full = psi.tensor(&ab)?;
    let cn = cnot();
    full.apply(&cn, &[Q5, ANC_A])?.apply(&cn, &[Q6, ANC_B])
}

/// Builds the four branches explicitly from the sign patterns.
pub fn branch_decomposition(
    input: &InputState,
    channel: &ChannelSpec,
) -> Result<BranchDecomposition> {
    let chi = input.amplitudes();
    let kappa = channel.coeffs();
    let mut branches = Vec::with_capacity(4);
    for signs in SIGN_PATTERNS {
        let system = StateVector::from_amplitudes(
            vec![Q5, Q6],
            (0..4).map(|s| chi[s] * signs[s]).collect(),
        )?;
        let ancilla = StateVector::from_amplitudes(
            vec![ANC_A, ANC_B],
            (0..4)
                .map(|t| num_complex::Complex64::new(kappa[t] * signs[t], 0.0))
                .collect(),
        )?;
        branches.push(Branch { system, ancilla });
    }
    let branches: [Branch; 4] = branches.try_into().expect("exactly four sign patterns");
    Ok(BranchDecomposition {
        branches,
        scale: BRANCH_SCALE,
    })
}

/// Max-norm difference between the CNOT image and the reconstructed
/// four-branch expansion. Contract: < 1e-12 for valid inputs.
pub fn verify_branch_expansion(input: &InputState, channel: &ChannelSpec) -> Result<f64> {
    let lhs = cnot_expand(input, channel)?;
    let rhs = branch_decomposition(input, channel)?.reconstruct()?;
    lhs.max_abs_diff(&rhs)
}

/// Verifies the operator identity behind the expansion on the |00⟩_ab sector:
///
/// (CN)₅ₐ(CN)₆ᵦ·(σ¹¹ ⊗ I_ab) = ½ Σₖ Z-string(5,6) ⊗ (Σₜ ±κₜ X-string(a,b)),
///
/// both sides built independently as 16×16 operators; returns the max
/// entrywise difference over the sector columns.
pub fn verify_operator_identity(channel: &ChannelSpec) -> Result<f64> {
    let register = [Q5, Q6, ANC_A, ANC_B];
    let cn = cnot();
    let sigma11 = sigma_extract(channel, 1, 1)?;
    let lhs = embed(&cn, &[Q5, ANC_A], &register)?
        .mul(&embed(&cn, &[Q6, ANC_B], &register)?)?
        .mul(&sigma11.matrix.kron(&Operator::identity(4))?)?;

    let id = pauli(PauliKind::I);
    let z = pauli(PauliKind::Z);
    let x = pauli(PauliKind::X);
    let z_strings = [id.kron(&id)?, id.kron(&z)?, z.kron(&id)?, z.kron(&z)?];
    let x_strings = [id.kron(&id)?, id.kron(&x)?, x.kron(&id)?, x.kron(&x)?];
    let kappa = channel.coeffs();
    let mut rhs = Operator::zeros(16);
    for (group, signs) in SIGN_PATTERNS.iter().enumerate() {
        let mut x_sum = Operator::zeros(4);
        for t in 0..4 {
            x_sum = x_sum.add(&x_strings[t].scaled(signs[t] * kappa[t]))?;
        }
        rhs = rhs.add(&z_strings[group].kron(&x_sum)?)?;
    }
    let rhs = rhs.scaled(0.5);

    // compare only on columns with both ancillas in |0>
    let mut max_diff: f64 = 0.0;
    for col in [0usize, 4, 8, 12] {
        for row in 0..16 {
            max_diff = max_diff.max((lhs.get(row, col) - rhs.get(row, col)).norm());
        }
    }
    Ok(max_diff)
}
