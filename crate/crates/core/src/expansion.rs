//! Extraction and verification of the 16 transformation operators σⁱʲ.
//!
//! Writing the joint six-particle state in the double Bell basis on pairs
//! (1,4) and (2,3) leaves the receiver's pair (5,6) in `(1/4)·σⁱʲ|χ⟩` for
//! outcome (i,j). The operators depend only on the four channel coefficients.
//!
//! Two independent routes to each σⁱʲ live here:
//!
//! - [`sigma_extract`], the ground truth: sweep the four computational basis
//!   inputs through the actual double Bell projection and assemble the scaled
//!   residuals as matrix columns;
//! - [`closed_form`], the claimed closed form: `2·diag(α,β,γ,δ)·(Pᵢ ⊗ Pⱼ)`
//!   written out entry by entry from the Bell-state sign structure.
//!
//! The golden tests assert they agree to 1e-12. Each σⁱʲ then factors as a
//! Pauli pair times a positive diagonal ([`factorize`]), which is what makes
//! the two-stage receiver correction work.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::labels::{Q1, Q2, Q3, Q4, Q5, Q6};
use crate::operators::{bell_state, pauli, Operator, OperatorClass, PauliKind};
use crate::statevec::{Label, StateVector};
use crate::{AMP_TOL, NORM_TOL};

/// The four channel coefficients (α, β, γ, δ).
///
/// Coefficients are nonnegative reals with unit square sum. Zero entries are
/// allowed; they describe a valid but singular channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl ChannelSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let coeffs = [alpha, beta, gamma, delta];
        for (name, &v) in ["alpha", "beta", "gamma", "delta"].iter().zip(&coeffs) {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{name} = {v} is not finite")));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} = {v} is negative; channel coefficients must be nonnegative reals"
                )));
            }
        }
        let sq: f64 = coeffs.iter().map(|v| v * v).sum();
        if (sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "channel coefficients have square sum {sq}, expected 1"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Rescales an arbitrary nonnegative vector to unit norm first.
    pub fn from_unnormalized(coeffs: [f64; 4]) -> Result<Self> {
        let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation(
                "channel vector has zero or non-finite norm".into(),
            ));
        }
        Self::new(
            coeffs[0] / norm,
            coeffs[1] / norm,
            coeffs[2] / norm,
            coeffs[3] / norm,
        )
    }

    /// The maximally entangled channel (½, ½, ½, ½).
    pub fn uniform() -> Self {
        Self::new(0.5, 0.5, 0.5, 0.5).expect("the uniform channel is valid")
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn min_coeff(&self) -> f64 {
        self.coeffs().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The channel state α|0000⟩ + β|1001⟩ + γ|0110⟩ + δ|1111⟩ on (3,4,5,6).
    pub fn state(&self) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0b0000] = Complex64::new(self.alpha, 0.0);
        amps[0b1001] = Complex64::new(self.beta, 0.0);
        amps[0b0110] = Complex64::new(self.gamma, 0.0);
        amps[0b1111] = Complex64::new(self.delta, 0.0);
        StateVector::from_amplitudes(vec![Q3, Q4, Q5, Q6], amps)
            .expect("channel state shape is fixed")
    }
}

/// The unknown two-qubit state a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩ to teleport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    amps: [Complex64; 4],
}

impl InputState {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let amps = [a, b, c, d];
        if amps.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Validation("non-finite input amplitude".into()));
        }
        let sq: f64 = amps.iter().map(|v| v.norm_sqr()).sum();
        if (sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!(
                "input amplitudes have square sum {sq}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    pub fn from_array(amps: [Complex64; 4]) -> Result<Self> {
        Self::new(amps[0], amps[1], amps[2], amps[3])
    }

    /// A random normalized state drawn from the given generator.
    pub fn random<R: rand::Rng>(rng: &mut R) -> Self {
        loop {
            let raw: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            let amps = [raw[0] / norm, raw[1] / norm, raw[2] / norm, raw[3] / norm];
            return Self { amps };
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amps
    }

    /// The state as a two-qubit vector on the given labels.
    pub fn state_on(&self, labels: [Label; 2]) -> Result<StateVector> {
        StateVector::from_amplitudes(labels.to_vec(), self.amps.to_vec())
    }
}

/// A σⁱʲ together with the Bell outcome pair that induces it.
///
/// `i` indexes the (1,4) measurement, `j` the (2,3) one. When all channel
/// coefficients are nonzero the matrix is monomial: exactly one nonzero entry
/// per row and per column.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationOperator {
    pub i: u8,
    pub j: u8,
    pub matrix: Operator,
}

/// σⁱʲ = kron(pauli_i, pauli_j) · diag, with `diag` positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub pauli_i: PauliKind,
    pub pauli_j: PauliKind,
    pub diag: Operator,
}

impl Factorization {
    /// The four diagonal entries as reals (they are real positive whenever
    /// the source operator came from a valid channel).
    pub fn diagonal_reals(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (l, o) in out.iter_mut().enumerate() {
            *o = self.diag.get(l, l).re;
        }
        out
    }
}

/// Teleportability verdict for a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invertibility {
    /// All σⁱʲ unitary: the plain inverse correction always succeeds.
    Deterministic,
    /// All σⁱʲ invertible but not unitary: correction succeeds with
    /// probability < 1 via the ancilla dilation.
    Probabilistic,
    /// Some channel coefficient vanishes: no inverse exists, teleportation
    /// cannot be completed.
    Impossible,
}

impl Invertibility {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Deterministic => "deterministic",
            Self::Probabilistic => "probabilistic",
            Self::Impossible => "impossible",
        }
    }
}

fn check_bell_index(k: u8) -> Result<()> {
    if (1..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::Index(format!("Bell index {k} outside 1..=4")))
    }
}

/// Extracts σⁱʲ by projection: for each computational basis input on (1,2),
/// build the joint state with the channel, project Bell state `i` on (1,4)
/// and `j` on (2,3), scale the residual by 4, and use it as a matrix column.
pub fn sigma_extract(channel: &ChannelSpec, i: u8, j: u8) -> Result<TransformationOperator> {
    check_bell_index(i)?;
    check_bell_index(j)?;
    let channel_state = channel.state();
    let bell_i = bell_state(i)?;
    let bell_j = bell_state(j)?;

    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    for col in 0..4usize {
        let pattern = format!("{}{}", (col >> 1) & 1, col & 1);
        let input = StateVector::basis_on(&[Q1, Q2], &pattern)?;
        let joint = input.tensor(&channel_state)?;
        let (after_first, _) = joint.project(&bell_i, &[Q1, Q4])?;
        let (residual, _) = after_first.project(&bell_j, &[Q2, Q3])?;
        debug_assert_eq!(residual.labels(), &[Q5, Q6]);
        for row in 0..4 {
            entries[row * 4 + col] = residual.amp(row) * 4.0;
        }
    }
    Ok(TransformationOperator {
        i,
        j,
        matrix: Operator::new(4, entries)?,
    })
}

/// The closed form of σⁱʲ, written directly from the Bell-state structure.
///
/// Row r (channel coefficient `coeffs[r]`) has its single entry at the column
/// obtained by flipping the row bits for ψ-type outcomes, with the sign given
/// by the product of the two Bell coefficients involved; equivalently
/// `2·diag(α,β,γ,δ)·(Pᵢ ⊗ Pⱼ)`.
pub fn closed_form(channel: &ChannelSpec, i: u8, j: u8) -> Result<Operator> {
    check_bell_index(i)?;
    check_bell_index(j)?;
    // sign of the surviving <bell k| component with sender bit x, channel bit y
    fn bell_sign(k: u8, x: usize, y: usize) -> f64 {
        match k {
            2 if x == 1 && y == 1 => -1.0,
            4 if x == 1 && y == 0 => -1.0,
            _ => 1.0,
        }
    }
    let flip_i = usize::from(i >= 3);
    let flip_j = usize::from(j >= 3);
    let coeffs = channel.coeffs();
    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    for row in 0..4usize {
        let (r1, r2) = (row >> 1, row & 1);
        let c1 = r1 ^ flip_i;
        let c2 = r2 ^ flip_j;
        let sign = bell_sign(i, c1, r1) * bell_sign(j, c2, r2);
        entries[row * 4 + ((c1 << 1) | c2)] = Complex64::new(2.0 * sign * coeffs[row], 0.0);
    }
    Operator::new(4, entries)
}

/// All 16 transformation operators, ordered (1,1), (1,2), ..., (4,4).
pub fn sigma_table(channel: &ChannelSpec) -> Result<Vec<TransformationOperator>> {
    let mut table = Vec::with_capacity(16);
    for i in 1..=4u8 {
        for j in 1..=4u8 {
            table.push(sigma_extract(channel, i, j)?);
        }
    }
    Ok(table)
}

/// Σᵢⱼ ‖(1/4)·σⁱʲ|χ⟩‖², the total probability of the 16 Bell outcomes.
/// Equals 1 for any normalized input and channel.
pub fn completeness_check(input: &InputState, channel: &ChannelSpec) -> Result<f64> {
    let chi = input.amplitudes();
    let mut total = 0.0;
    for sigma in sigma_table(channel)? {
        let image = sigma.matrix.mul_vec(&chi)?;
        total += image.iter().map(|v| v.norm_sqr()).sum::<f64>() / 16.0;
    }
    Ok(total)
}

/// Splits σⁱʲ into its Bell-indexed Pauli pair and the diagonal remainder
/// `kron(pauli_i, pauli_j)⁻¹ · σⁱʲ`, asserting both the diagonality of the
/// remainder and exact reconstruction.
pub fn factorize(sigma: &TransformationOperator) -> Result<Factorization> {
    let pauli_i = PauliKind::for_bell_index(sigma.i)?;
    let pauli_j = PauliKind::for_bell_index(sigma.j)?;
    let pair = pauli(pauli_i).kron(&pauli(pauli_j))?;
    let diag = pair.inverse()?.mul(&sigma.matrix)?;

    let off = diag.off_diagonal_mass();
    if off > AMP_TOL {
        return Err(Error::Factorization(format!(
            "residual factor has off-diagonal mass {off:.3e}"
        )));
    }
    let imag: f64 = (0..4).map(|l| diag.get(l, l).im.abs()).fold(0.0, f64::max);
    if imag > AMP_TOL {
        return Err(Error::Factorization(format!(
            "residual diagonal has imaginary part {imag:.3e}"
        )));
    }
    let recon = pair.mul(&diag)?;
    let diff = recon.max_abs_diff(&sigma.matrix)?;
    if diff > AMP_TOL {
        return Err(Error::Factorization(format!(
            "Pauli-pair times diagonal misses the source by {diff:.3e}"
        )));
    }
    Ok(Factorization {
        pauli_i,
        pauli_j,
        diag,
    })
}

/// Classifies the channel by the shared verdict of its 16 operators.
///
/// The monomial structure forces all 16 to classify identically; this is
/// asserted rather than assumed.
pub fn invertibility_check(channel: &ChannelSpec) -> Result<Invertibility> {
    let table = sigma_table(channel)?;
    let first = table[0].matrix.classify();
    for sigma in &table {
        let class = sigma.matrix.classify();
        assert_eq!(
            class, first,
            "classification must be uniform across outcomes, got {class:?} vs {first:?} at ({}, {})",
            sigma.i, sigma.j
        );
    }
    Ok(match first {
        OperatorClass::Unitary => Invertibility::Deterministic,
        OperatorClass::InvertibleNonunitary => Invertibility::Probabilistic,
        OperatorClass::Singular => Invertibility::Impossible,
    })
}

/// Random valid channel with every coefficient at least `min_coeff`;
/// rejection-sampled from uniform nonnegative vectors. Test support.
#[cfg(test)]
pub(crate) fn random_channel<R: rand::Rng>(rng: &mut R, min_coeff: f64) -> ChannelSpec {
    loop {
        let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let coeffs: Vec<f64> = raw.iter().map(|v| v / norm).collect();
        if coeffs.iter().all(|&v| v >= min_coeff) {
            return ChannelSpec::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3]).unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference_channel() -> ChannelSpec {
        ChannelSpec::new(0.6, 0.4, 0.5, 0.23f64.sqrt()).unwrap()
    }

    #[test]
    fn channel_validation() {
        assert!(matches!(
            ChannelSpec::new(-0.5, 0.5, 0.5, 0.5),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ChannelSpec::new(0.5, 0.5, 0.5, 0.6),
            Err(Error::Validation(_))
        ));
        // zero coefficients are allowed: a valid, singular channel
        let norm = 3f64.sqrt();
        assert!(ChannelSpec::new(1.0 / norm, 1.0 / norm, 1.0 / norm, 0.0).is_ok());
        assert!(ChannelSpec::from_unnormalized([3.0, 2.0, 1.0, 4.0]).is_ok());
        assert!(matches!(
            ChannelSpec::from_unnormalized([0.0; 4]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            InputState::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::Normalization(_))
        ));
        let s = 0.5;
        assert!(InputState::new(c(s, 0.0), c(0.0, s), c(-s, 0.0), c(0.0, -s)).is_ok());
    }

    #[test]
    fn sigma_11_is_twice_the_coefficient_diagonal() {
        let ch = reference_channel();
        let sigma = sigma_extract(&ch, 1, 1).unwrap();
        let coeffs = ch.coeffs();
        for r in 0..4 {
            for cidx in 0..4 {
                let expect = if r == cidx { 2.0 * coeffs[r] } else { 0.0 };
                assert!((sigma.matrix.get(r, cidx) - c(expect, 0.0)).norm() < AMP_TOL);
            }
        }
    }

    #[test]
    fn sigma_33_is_the_antidiagonal_of_coefficients() {
        let ch = reference_channel();
        let sigma = sigma_extract(&ch, 3, 3).unwrap();
        let coeffs = ch.coeffs();
        for r in 0..4 {
            for cidx in 0..4 {
                let expect = if r + cidx == 3 { 2.0 * coeffs[r] } else { 0.0 };
                assert!((sigma.matrix.get(r, cidx) - c(expect, 0.0)).norm() < AMP_TOL);
            }
        }
    }

    #[test]
    fn sigma_11_of_uniform_channel_is_identity() {
        let sigma = sigma_extract(&ChannelSpec::uniform(), 1, 1).unwrap();
        assert!(sigma.matrix.max_abs_diff(&Operator::identity(4)).unwrap() < AMP_TOL);
    }

    #[test]
    fn sigma_entry_spot_checks() {
        let ch = reference_channel();
        let [al, _, ga, de] = ch.coeffs();
        let table = sigma_table(&ch).unwrap();
        let at = |i: u8, j: u8| &table[((i - 1) * 4 + (j - 1)) as usize].matrix;
        assert!((at(1, 4).get(0, 1) - c(-2.0 * al, 0.0)).norm() < AMP_TOL);
        assert!((at(3, 2).get(2, 0) - c(2.0 * ga, 0.0)).norm() < AMP_TOL);
        // the gamma row always carries gamma, the delta row delta
        assert!((at(1, 3).get(2, 3) - c(2.0 * ga, 0.0)).norm() < AMP_TOL);
        assert!((at(1, 3).get(3, 2) - c(2.0 * de, 0.0)).norm() < AMP_TOL);
    }

    #[test]
    fn sigma_rows_carry_their_own_coefficient() {
        // each row r of every sigma has exactly one nonzero entry, of
        // magnitude twice the r-th channel coefficient
        let ch = reference_channel();
        let coeffs = ch.coeffs();
        for sigma in sigma_table(&ch).unwrap() {
            for r in 0..4 {
                let nonzero: Vec<f64> = (0..4)
                    .map(|cidx| sigma.matrix.get(r, cidx).norm())
                    .filter(|&v| v > AMP_TOL)
                    .collect();
                assert_eq!(nonzero.len(), 1, "sigma{}{} row {r}", sigma.i, sigma.j);
                assert!((nonzero[0] - 2.0 * coeffs[r]).abs() < AMP_TOL);
            }
        }
    }

    #[test]
    fn extraction_matches_closed_form_on_the_reference_channel() {
        let ch = reference_channel();
        for sigma in sigma_table(&ch).unwrap() {
            let template = closed_form(&ch, sigma.i, sigma.j).unwrap();
            let diff = sigma.matrix.max_abs_diff(&template).unwrap();
            assert!(
                diff < AMP_TOL,
                "sigma{}{} differs by {diff:.3e}",
                sigma.i,
                sigma.j
            );
        }
    }

    #[test]
    fn extraction_matches_closed_form_on_random_channels() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..50 {
            let ch = random_channel(&mut rng, 0.0);
            for sigma in sigma_table(&ch).unwrap() {
                let template = closed_form(&ch, sigma.i, sigma.j).unwrap();
                assert!(sigma.matrix.max_abs_diff(&template).unwrap() < AMP_TOL);
            }
        }
    }

    #[test]
    fn sigma_is_monomial_for_nonzero_channels() {
        let ch = reference_channel();
        for sigma in sigma_table(&ch).unwrap() {
            for r in 0..4 {
                let row_nonzero = (0..4)
                    .filter(|&cidx| sigma.matrix.get(r, cidx).norm() > AMP_TOL)
                    .count();
                let col_nonzero = (0..4)
                    .filter(|&ridx| sigma.matrix.get(ridx, r).norm() > AMP_TOL)
                    .count();
                assert_eq!((row_nonzero, col_nonzero), (1, 1));
            }
        }
    }

    #[test]
    fn all_sixteen_operators_are_distinct() {
        let table = sigma_table(&reference_channel()).unwrap();
        for (n, a) in table.iter().enumerate() {
            for b in &table[n + 1..] {
                assert!(
                    a.matrix.max_abs_diff(&b.matrix).unwrap() > 1e-3,
                    "sigma{}{} equals sigma{}{}",
                    a.i,
                    a.j,
                    b.i,
                    b.j
                );
            }
        }
    }

    #[test]
    fn sigma_determinants() {
        let ch = reference_channel();
        let [al, be, ga, de] = ch.coeffs();
        let expect = 16.0 * al * be * ga * de;
        for sigma in sigma_table(&ch).unwrap() {
            let det = sigma.matrix.determinant();
            assert!(
                (det - c(expect, 0.0)).norm() < 1e-12,
                "det sigma{}{} = {det}",
                sigma.i,
                sigma.j
            );
        }
        // at the uniform channel every determinant is exactly +1
        let sigma13 = sigma_extract(&ChannelSpec::uniform(), 1, 3).unwrap();
        assert!((sigma13.matrix.determinant() - c(1.0, 0.0)).norm() < AMP_TOL);
    }

    #[test]
    fn completeness_is_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let ch = random_channel(&mut rng, 0.0);
            let input = InputState::random(&mut rng);
            let total = completeness_check(&input, &ch).unwrap();
            assert!((total - 1.0).abs() < AMP_TOL);
        }
    }

    #[test]
    fn completeness_terms_are_equal_on_the_uniform_channel() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let ch = ChannelSpec::uniform();
        let input = InputState::random(&mut rng);
        let chi = input.amplitudes();
        for sigma in sigma_table(&ch).unwrap() {
            let image = sigma.matrix.mul_vec(&chi).unwrap();
            let term = image.iter().map(|v| v.norm_sqr()).sum::<f64>() / 16.0;
            assert!((term - 1.0 / 16.0).abs() < AMP_TOL);
        }
    }

    #[test]
    fn completeness_survives_a_singular_channel() {
        let norm = (0.36f64 + 0.16 + 0.48).sqrt();
        let ch = ChannelSpec::new(0.6 / norm, 0.4 / norm, 0.48f64.sqrt() / norm, 0.0).unwrap();
        let input = InputState::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let total = completeness_check(&input, &ch).unwrap();
        assert!((total - 1.0).abs() < AMP_TOL);
    }

    #[test]
    fn factorize_examples() {
        let ch = reference_channel();
        let [al, be, ga, de] = ch.coeffs();

        let f = factorize(&sigma_extract(&ch, 1, 1).unwrap()).unwrap();
        assert_eq!((f.pauli_i, f.pauli_j), (PauliKind::I, PauliKind::I));
        let d = f.diagonal_reals();
        for (l, &coeff) in [al, be, ga, de].iter().enumerate() {
            assert!((d[l] - 2.0 * coeff).abs() < AMP_TOL);
        }

        // sigma12 = (I (x) Z) times the same diagonal as sigma11
        let f = factorize(&sigma_extract(&ch, 1, 2).unwrap()).unwrap();
        assert_eq!((f.pauli_i, f.pauli_j), (PauliKind::I, PauliKind::Z));
        let d = f.diagonal_reals();
        for (l, &coeff) in [al, be, ga, de].iter().enumerate() {
            assert!((d[l] - 2.0 * coeff).abs() < AMP_TOL);
        }

        // sigma13 = (I (x) X) times diag(beta, alpha, delta, gamma): the X
        // conjugation swaps within both coefficient pairs
        let f = factorize(&sigma_extract(&ch, 1, 3).unwrap()).unwrap();
        assert_eq!((f.pauli_i, f.pauli_j), (PauliKind::I, PauliKind::X));
        let d = f.diagonal_reals();
        for (l, &coeff) in [be, al, de, ga].iter().enumerate() {
            assert!((d[l] - 2.0 * coeff).abs() < AMP_TOL);
        }
    }

    #[test]
    fn factorization_reconstructs_for_random_channels() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..50 {
            let ch = random_channel(&mut rng, 1e-3);
            for sigma in sigma_table(&ch).unwrap() {
                let f = factorize(&sigma).unwrap();
                let recon = pauli(f.pauli_i)
                    .kron(&pauli(f.pauli_j))
                    .unwrap()
                    .mul(&f.diag)
                    .unwrap();
                assert!(recon.max_abs_diff(&sigma.matrix).unwrap() < AMP_TOL);
                assert!(f.diag.off_diagonal_mass() < AMP_TOL);
                assert!(f.diagonal_reals().iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn invertibility_examples() {
        assert_eq!(
            invertibility_check(&ChannelSpec::uniform()).unwrap(),
            Invertibility::Deterministic
        );
        assert_eq!(
            invertibility_check(&reference_channel()).unwrap(),
            Invertibility::Probabilistic
        );
        // each single-zero pattern is impossible
        for zero_at in 0..4 {
            let mut raw = [0.6, 0.5, 0.4, 0.2];
            raw[zero_at] = 0.0;
            let ch = ChannelSpec::from_unnormalized(raw).unwrap();
            assert_eq!(
                invertibility_check(&ch).unwrap(),
                Invertibility::Impossible,
                "zero at {zero_at}"
            );
        }
    }

    #[test]
    fn classification_is_uniform_across_outcomes() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 0.0);
            let table = sigma_table(&ch).unwrap();
            let first = table[0].matrix.classify();
            assert!(table.iter().all(|s| s.matrix.classify() == first));
        }
    }

    /// The operator recovered from the residual is the same for arbitrary
    /// inputs, not just the basis sweep: residual = (1/4)·σⁱʲ|χ⟩.
    #[test]
    fn sigma_does_not_depend_on_the_teleported_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let ch = reference_channel();
        let table = sigma_table(&ch).unwrap();
        for _ in 0..20 {
            let input = InputState::random(&mut rng);
            let joint = input
                .state_on([Q1, Q2])
                .unwrap()
                .tensor(&ch.state())
                .unwrap();
            for sigma in &table {
                let (after_first, _) = joint
                    .project(&bell_state(sigma.i).unwrap(), &[Q1, Q4])
                    .unwrap();
                let (residual, _) = after_first
                    .project(&bell_state(sigma.j).unwrap(), &[Q2, Q3])
                    .unwrap();
                let image = sigma.matrix.mul_vec(&input.amplitudes()).unwrap();
                for r in 0..4 {
                    assert!((residual.amp(r) - image[r] * 0.25).norm() < AMP_TOL);
                }
            }
        }
    }

    #[test]
    fn bad_bell_indices_are_rejected() {
        let ch = ChannelSpec::uniform();
        assert!(matches!(sigma_extract(&ch, 0, 1), Err(Error::Index(_))));
        assert!(matches!(sigma_extract(&ch, 1, 5), Err(Error::Index(_))));
        assert!(matches!(closed_form(&ch, 5, 1), Err(Error::Index(_))));
    }

    fn channel_strategy() -> impl Strategy<Value = ChannelSpec> {
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
            .prop_filter_map("channel vector must be nonzero", |(a, b, g, d)| {
                ChannelSpec::from_unnormalized([a, b, g, d]).ok()
            })
    }

    fn input_strategy() -> impl Strategy<Value = InputState> {
        prop::array::uniform8(-1.0f64..1.0).prop_filter_map(
            "input vector must be well away from zero",
            |raw| {
                let amps = [
                    c(raw[0], raw[1]),
                    c(raw[2], raw[3]),
                    c(raw[4], raw[5]),
                    c(raw[6], raw[7]),
                ];
                let norm = amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    return None;
                }
                InputState::from_array([
                    amps[0] / norm,
                    amps[1] / norm,
                    amps[2] / norm,
                    amps[3] / norm,
                ])
                .ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_extraction_matches_closed_form(ch in channel_strategy()) {
            for sigma in sigma_table(&ch).unwrap() {
                let template = closed_form(&ch, sigma.i, sigma.j).unwrap();
                prop_assert!(sigma.matrix.max_abs_diff(&template).unwrap() < AMP_TOL);
            }
        }

        #[test]
        fn prop_completeness_is_one(input in input_strategy(), ch in channel_strategy()) {
            let total = completeness_check(&input, &ch).unwrap();
            prop_assert!((total - 1.0).abs() < AMP_TOL);
        }

        #[test]
        fn prop_factorization_reconstructs(ch in channel_strategy()) {
            prop_assume!(ch.min_coeff() > 1e-3);
            for sigma in sigma_table(&ch).unwrap() {
                let f = factorize(&sigma).unwrap();
                let recon = pauli(f.pauli_i)
                    .kron(&pauli(f.pauli_j))
                    .unwrap()
                    .mul(&f.diag)
                    .unwrap();
                prop_assert!(recon.max_abs_diff(&sigma.matrix).unwrap() < AMP_TOL);
                prop_assert!(f.diag.off_diagonal_mass() < AMP_TOL);
            }
        }

        #[test]
        fn prop_classification_is_uniform(ch in channel_strategy()) {
            let table = sigma_table(&ch).unwrap();
            let first = table[0].matrix.classify();
            prop_assert!(table.iter().all(|s| s.matrix.classify() == first));
        }
    }
}
