//! End-to-end teleportation: joint-state preparation, the sender's double
//! Bell measurement, and the receiver's two-stage correction.
//!
//! Stage 1 applies the inverse of the outcome's Pauli pair, reducing the
//! residual action on (5,6) to the positive diagonal factor Aⁱʲ. Stage 2
//! adjoins an ancilla in |0⟩ and applies the 8×8 collective unitary
//!
//! ```text
//! U₂ = [ A₁  A₂ ]      A₁ = diag(a₁..a₄),  A₂ = diag(√(1−a₁²)..√(1−a₄²))
//!      [ A₂ −A₁ ]
//! ```
//!
//! with a_l = k/d_l and k = min d_l, so the |0⟩-ancilla block applies the
//! rescaled inverse of Aⁱʲ. Measuring the ancilla decides success: outcome 0
//! reconstructs the input exactly, outcome 1 is a failure. Choosing the
//! largest admissible k maximizes the success probability; any smaller k
//! strictly reduces it and any larger one makes A₂ complex.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::expansion::{
    factorize, invertibility_check, sigma_extract, ChannelSpec, InputState, Invertibility,
};
use crate::labels::{ANC_A, Q1, Q2, Q3, Q4, Q5, Q6};
use crate::operators::{bell_state, pauli, Operator, PauliKind};
use crate::statevec::StateVector;
use crate::SINGULAR_TOL;

/// The classical two-index message the sender transmits: `i` for the (1,4)
/// Bell outcome, `j` for the (2,3) one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeMessage {
    i: u8,
    j: u8,
}

impl OutcomeMessage {
    pub fn new(i: u8, j: u8) -> Result<Self> {
        if !(1..=4).contains(&i) || !(1..=4).contains(&j) {
            return Err(Error::Index(format!("outcome ({i},{j}) outside 1..=4")));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> u8 {
        self.i
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// Row-major position in the 16-entry outcome table.
    pub fn index(&self) -> usize {
        ((self.i - 1) * 4 + (self.j - 1)) as usize
    }

    /// All 16 outcomes in table order.
    pub fn all() -> impl Iterator<Item = Self> {
        (1..=4u8).flat_map(|i| (1..=4u8).map(move |j| Self { i, j }))
    }
}

/// How the sender's measurement outcome is chosen.
#[derive(Debug, Clone, Copy)]
pub enum OutcomeChoice {
    /// Post-select a specific outcome.
    Fixed(OutcomeMessage),
    /// Draw from the exact 16-way distribution with this seed.
    Random(u64),
}

/// How the stage-2 ancilla measurement result is chosen.
#[derive(Debug, Clone, Copy)]
pub enum AncillaChoice {
    /// Post-select ancilla bit 0 or 1.
    Fixed(u8),
    /// Draw from the exact binary distribution with this seed.
    Random(u64),
}

/// Receiver-side correction recipe for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionPlan {
    /// Pauli pair of the stage-1 unitary (applied inverted).
    pub stage1: (PauliKind, PauliKind),
    /// Diagonal of A₁: a_l = k / d_l, all in (0, 1].
    pub a_coeffs: [f64; 4],
    /// The scale constant k = min_l d_l.
    pub k: f64,
}

/// Simulation mode of [`run_protocol`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Enumerate all 16 outcomes with exact probabilities and both ancilla
    /// branches.
    Exhaustive,
    /// Seeded Monte-Carlo over outcomes and ancilla results.
    Sampled { seed: u64, trials: u64 },
}

/// Per-outcome row of a [`TeleportReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub message: OutcomeMessage,
    pub probability: f64,
    pub success_given_outcome: f64,
}

/// Result of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub mode: RunMode,
    /// Seed of the sampled run, recorded for reproducibility.
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub invertibility: Invertibility,
    pub per_outcome: Vec<OutcomeRecord>,
    /// Σ p(i,j)·p(success|i,j); 0 for singular channels.
    pub total_success: f64,
    /// Worst-case reconstruction fidelity across success branches.
    pub fidelity_on_success: f64,
}

/// |φ⟩_w = |χ⟩₁₂ ⊗ |φ⟩₃₄₅₆, the normalized six-particle state.
pub fn prepare_joint(input: &InputState, channel: &ChannelSpec) -> Result<StateVector> {
    input.state_on([Q1, Q2])?.tensor(&channel.state())
}

/// Projects the joint state onto Bell `i` on (1,4) and Bell `j` on (2,3).
///
/// Returns the unnormalized residual on (5,6), equal to (1/4)·σⁱʲ|χ⟩, and
/// the outcome probability ‖residual‖². Zero-probability outcomes are
/// returned as-is; see [`alice_measure`] for the erroring variant.
pub fn outcome_state(joint: &StateVector, message: OutcomeMessage) -> Result<(StateVector, f64)> {
    let (after_first, _) = joint.project(&bell_state(message.i)?, &[Q1, Q4])?;
    let (residual, probability) = after_first.project(&bell_state(message.j)?, &[Q2, Q3])?;
    Ok((residual, probability))
}

/// The sender's double Bell measurement.
///
/// Returns the chosen or sampled outcome, the unnormalized residual on (5,6),
/// and the outcome probability. Post-selecting an outcome of probability zero
/// is reported as [`Error::ZeroProbabilityOutcome`].
pub fn alice_measure(
    joint: &StateVector,
    choice: OutcomeChoice,
) -> Result<(OutcomeMessage, StateVector, f64)> {
    match choice {
        OutcomeChoice::Fixed(message) => {
            let (residual, probability) = outcome_state(joint, message)?;
            if probability <= 0.0 {
                return Err(Error::ZeroProbabilityOutcome(format!(
                    "outcome ({},{}) has probability 0",
                    message.i, message.j
                )));
            }
            Ok((message, residual, probability))
        }
        OutcomeChoice::Random(seed) => {
            let outcomes: Vec<(OutcomeMessage, StateVector, f64)> = OutcomeMessage::all()
                .map(|m| outcome_state(joint, m).map(|(r, p)| (m, r, p)))
                .collect::<Result<_>>()?;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let draw: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = outcomes.len() - 1;
            for (n, (_, _, p)) in outcomes.iter().enumerate() {
                acc += p;
                if draw < acc {
                    chosen = n;
                    break;
                }
            }
            // guard against a final-slot pick with zero probability
            while outcomes[chosen].2 <= 0.0 {
                chosen = chosen.checked_sub(1).ok_or_else(|| {
                    Error::Validation("joint state has no outcome with nonzero probability".into())
                })?;
            }
            Ok(outcomes[chosen].clone())
        }
    }
}

/// Builds the correction plan for one outcome: the Table Pauli pair and the
/// rescaled inverse diagonal, with k = min_l d_l so that max_l a_l = 1.
pub fn plan_correction(message: OutcomeMessage, channel: &ChannelSpec) -> Result<CorrectionPlan> {
    let sigma = sigma_extract(channel, message.i, message.j)?;
    if sigma.matrix.determinant().norm() <= SINGULAR_TOL {
        return Err(Error::Singular(format!(
            "channel {:?} is not invertible; no correction exists",
            channel.coeffs()
        )));
    }
    let factors = factorize(&sigma)?;
    let d = factors.diagonal_reals();
    let k = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut a_coeffs = [0.0; 4];
    for (l, a) in a_coeffs.iter_mut().enumerate() {
        *a = k / d[l];
    }
    Ok(CorrectionPlan {
        stage1: (factors.pauli_i, factors.pauli_j),
        a_coeffs,
        k,
    })
}

/// Stage-1 correction: applies the inverse of the outcome's Pauli pair to
/// (5,6), leaving a state proportional to Aⁱʲ|χ⟩ (purely diagonal action).
pub fn bob_stage1(residual56: &StateVector, plan: &CorrectionPlan) -> Result<StateVector> {
    let pair = pauli(plan.stage1.0).kron(&pauli(plan.stage1.1))?;
    residual56.apply(&pair.inverse()?, &[Q5, Q6])
}

/// The 8×8 collective unitary of the plan, in block form over
/// {|φ₀⟩₅₆|0⟩_a, |φ₀⟩₅₆|1⟩_a}; apply it with targets `[a, 5, 6]` so the
/// ancilla indexes the blocks while it sits as the least significant register
/// qubit.
pub fn build_u2(plan: &CorrectionPlan) -> Result<Operator> {
    for &a in &plan.a_coeffs {
        if !a.is_finite() || !(0.0..=1.0).contains(&a) {
            return Err(Error::Validation(format!(
                "dilation coefficient {a} outside [0, 1]"
            )));
        }
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); 64];
    for (s, &a) in plan.a_coeffs.iter().enumerate() {
        let b = (1.0 - a * a).max(0.0).sqrt();
        entries[s * 8 + s] = Complex64::new(a, 0.0);
        entries[s * 8 + (4 + s)] = Complex64::new(b, 0.0);
        entries[(4 + s) * 8 + s] = Complex64::new(b, 0.0);
        entries[(4 + s) * 8 + (4 + s)] = Complex64::new(-a, 0.0);
    }
    let u = Operator::new(8, entries)?;
    let defect = u.unitarity_defect();
    if defect > crate::AMP_TOL {
        return Err(Error::Validation(format!(
            "collective unitary failed its unitarity check: defect {defect:.3e}"
        )));
    }
    Ok(u)
}

/// Stage-2 correction: adjoin the ancilla in |0⟩, apply U₂, measure the
/// ancilla. Outcome 0 means success and the (5,6) state collapses to the
/// teleported input; outcome 1 means failure.
///
/// Returns (success, renormalized post-measurement state on (5,6),
/// p(success | this outcome) = ‖A₁·state‖²).
pub fn bob_stage2(
    state56: &StateVector,
    plan: &CorrectionPlan,
    ancilla: AncillaChoice,
) -> Result<(bool, StateVector, f64)> {
    if !state56.is_normalized() {
        return Err(Error::Normalization(
            "stage-2 input state must be normalized".into(),
        ));
    }
    let with_ancilla = state56.tensor(&StateVector::basis_on(&[ANC_A], "0")?)?;
    let u2 = build_u2(plan)?;
    let applied = with_ancilla.apply(&u2, &[ANC_A, Q5, Q6])?;

    let zero = StateVector::basis_state(1, "0")?;
    let one = StateVector::basis_state(1, "1")?;
    let (res0, p0) = applied.project(&zero, &[ANC_A])?;
    let (res1, p1) = applied.project(&one, &[ANC_A])?;

    let bit = match ancilla {
        AncillaChoice::Fixed(b) if b <= 1 => b,
        AncillaChoice::Fixed(b) => {
            return Err(Error::Validation(format!("ancilla outcome {b} not 0/1")))
        }
        AncillaChoice::Random(seed) => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            u8::from(rng.gen::<f64>() >= p0)
        }
    };
    let (residual, p_branch) = if bit == 0 { (res0, p0) } else { (res1, p1) };
    if p_branch <= 0.0 {
        return Err(Error::ZeroProbabilityOutcome(format!(
            "ancilla outcome {bit} has probability 0"
        )));
    }
    Ok((bit == 0, residual.normalized()?, p0))
}

struct OutcomeAnalysis {
    probability: f64,
    p_success: f64,
    fidelity: f64,
    has_success_branch: bool,
}

/// Exact per-outcome analysis shared by both run modes.
fn analyze_outcomes(
    input: &InputState,
    channel: &ChannelSpec,
    invertibility: Invertibility,
) -> Result<Vec<OutcomeAnalysis>> {
    let joint = prepare_joint(input, channel)?;
    let target = input.state_on([Q5, Q6])?;
    let mut rows = Vec::with_capacity(16);
    for message in OutcomeMessage::all() {
        let (residual, probability) = outcome_state(&joint, message)?;
        if invertibility == Invertibility::Impossible || probability <= 0.0 {
            rows.push(OutcomeAnalysis {
                probability,
                p_success: 0.0,
                fidelity: 0.0,
                has_success_branch: false,
            });
            continue;
        }
        let plan = plan_correction(message, channel)?;
        let corrected = bob_stage1(&residual, &plan)?.normalized()?;
        let (success, final56, p_success) = bob_stage2(&corrected, &plan, AncillaChoice::Fixed(0))?;
        debug_assert!(success);
        let fidelity = final56.fidelity(&target)?;
        rows.push(OutcomeAnalysis {
            probability,
            p_success,
            fidelity,
            has_success_branch: true,
        });
    }
    Ok(rows)
}

/// Runs the full protocol; see [`RunMode`] for the two modes.
///
/// Singular channels do not abort: they produce a report flagged
/// [`Invertibility::Impossible`] with zero success probability, since the
/// measurement itself is still well-defined.
pub fn run_protocol(
    input: &InputState,
    channel: &ChannelSpec,
    mode: RunMode,
) -> Result<TeleportReport> {
    let invertibility = invertibility_check(channel)?;
    let analysis = analyze_outcomes(input, channel, invertibility)?;

    match mode {
        RunMode::Exhaustive => {
            let per_outcome = OutcomeMessage::all()
                .zip(&analysis)
                .map(|(message, row)| OutcomeRecord {
                    message,
                    probability: row.probability,
                    success_given_outcome: row.p_success,
                })
                .collect();
            let total_success = analysis
                .iter()
                .map(|row| row.probability * row.p_success)
                .sum();
            let fidelity_on_success = analysis
                .iter()
                .filter(|row| row.has_success_branch && row.probability > 0.0)
                .map(|row| row.fidelity)
                .fold(f64::INFINITY, f64::min);
            Ok(TeleportReport {
                mode,
                seed: None,
                trials: None,
                invertibility,
                per_outcome,
                total_success,
                fidelity_on_success: if fidelity_on_success.is_finite() {
                    fidelity_on_success
                } else {
                    0.0
                },
            })
        }
        RunMode::Sampled { seed, trials } => {
            if trials == 0 {
                return Err(Error::Validation(
                    "sampled mode needs at least 1 trial".into(),
                ));
            }
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut counts = [0u64; 16];
            let mut successes = [0u64; 16];
            for _ in 0..trials {
                let draw: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = 15;
                for (n, row) in analysis.iter().enumerate() {
                    acc += row.probability;
                    if draw < acc {
                        chosen = n;
                        break;
                    }
                }
                counts[chosen] += 1;
                if rng.gen::<f64>() < analysis[chosen].p_success {
                    successes[chosen] += 1;
                }
            }
            let per_outcome = OutcomeMessage::all()
                .enumerate()
                .map(|(n, message)| OutcomeRecord {
                    message,
                    probability: counts[n] as f64 / trials as f64,
                    success_given_outcome: if counts[n] > 0 {
                        successes[n] as f64 / counts[n] as f64
                    } else {
                        0.0
                    },
                })
                .collect();
            let total_success = successes.iter().sum::<u64>() as f64 / trials as f64;
            let fidelity_on_success = analysis
                .iter()
                .enumerate()
                .filter(|(n, _)| successes[*n] > 0)
                .map(|(_, row)| row.fidelity)
                .fold(f64::INFINITY, f64::min);
            Ok(TeleportReport {
                mode,
                seed: Some(seed),
                trials: Some(trials),
                invertibility,
                per_outcome,
                total_success,
                fidelity_on_success: if fidelity_on_success.is_finite() {
                    fidelity_on_success
                } else {
                    0.0
                },
            })
        }
    }
}
