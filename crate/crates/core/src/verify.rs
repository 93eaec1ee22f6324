//! The `verify` mode's check battery: every structural claim about a channel,
//! run numerically and reported with its worst-case error.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::cnot_path::{verify_branch_expansion, verify_operator_identity};
use crate::error::Result;
use crate::expansion::{
    closed_form, completeness_check, factorize, invertibility_check, sigma_table, ChannelSpec,
    InputState, Invertibility,
};
use crate::labels::{Q1, Q2, Q3, Q4};
use crate::operators::{bell_state, pauli};
use crate::protocol::{build_u2, plan_correction, OutcomeMessage};
use crate::AMP_TOL;

/// One named numeric check: passes when `value` stays within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// Runs the whole battery for one channel/input pair. The random sweeps are
/// seeded so the output is reproducible.
pub fn run_checks(
    channel: &ChannelSpec,
    input: &InputState,
    seed: u64,
) -> Result<(Invertibility, Vec<Check>)> {
    let invertibility = invertibility_check(channel)?;
    let table = sigma_table(channel)?;
    let mut checks = Vec::new();

    // extraction vs closed forms, entrywise over all 16
    let mut worst = 0f64;
    for sigma in &table {
        let template = closed_form(channel, sigma.i, sigma.j)?;
        worst = worst.max(sigma.matrix.max_abs_diff(&template)?);
    }
    checks.push(Check::new(
        "sigma extraction matches closed forms",
        worst,
        AMP_TOL,
    ));

    // operator independence from the teleported state
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for _ in 0..20 {
        let probe = InputState::random(&mut rng);
        let joint = probe.state_on([Q1, Q2])?.tensor(&channel.state())?;
        for sigma in &table {
            let (after_first, _) = joint.project(&bell_state(sigma.i)?, &[Q1, Q4])?;
            let (residual, _) = after_first.project(&bell_state(sigma.j)?, &[Q2, Q3])?;
            let image = sigma.matrix.mul_vec(&probe.amplitudes())?;
            for (r, img) in image.iter().enumerate() {
                worst = worst.max((residual.amp(r) - img * 0.25).norm());
            }
        }
    }
    checks.push(Check::new(
        "sigma independent of input state",
        worst,
        AMP_TOL,
    ));

    // completeness of the 16-outcome expansion
    let total = completeness_check(input, channel)?;
    checks.push(Check::new(
        "expansion completeness",
        (total - 1.0).abs(),
        AMP_TOL,
    ));

    // Pauli-pair times diagonal factorization
    if invertibility != Invertibility::Impossible {
        let mut worst = 0f64;
        for sigma in &table {
            let f = factorize(sigma)?;
            let recon = pauli(f.pauli_i).kron(&pauli(f.pauli_j))?.mul(&f.diag)?;
            worst = worst
                .max(recon.max_abs_diff(&sigma.matrix)?)
                .max(f.diag.off_diagonal_mass());
        }
        checks.push(Check::new(
            "factorization reconstructs sigma",
            worst,
            AMP_TOL,
        ));

        // collective-unitary unitarity for all outcome plans
        let mut worst = 0f64;
        for message in OutcomeMessage::all() {
            let plan = plan_correction(message, channel)?;
            worst = worst.max(build_u2(&plan)?.unitarity_defect());
        }
        checks.push(Check::new("collective unitary is unitary", worst, AMP_TOL));
    }

    // determinant follows the product of the diagonal magnitudes
    let [al, be, ga, de] = channel.coeffs();
    let expect = 16.0 * al * be * ga * de;
    let det = table[0].matrix.determinant();
    let scale = expect.abs().max(1e-3);
    checks.push(Check::new(
        "sigma11 determinant equals 16*alpha*beta*gamma*delta",
        (det.norm() - expect).abs() / scale,
        1e-10,
    ));

    // two-CNOT comparison path
    checks.push(Check::new(
        "two-CNOT branch expansion",
        verify_branch_expansion(input, channel)?,
        AMP_TOL,
    ));
    checks.push(Check::new(
        "two-CNOT operator identity (ancilla-zero sector)",
        verify_operator_identity(channel)?,
        AMP_TOL,
    ));

    Ok((invertibility, checks))
}
