//! Complex state vectors over small labelled qubit registers.
//!
//! A [`StateVector`] carries `2^n` amplitudes over an ordered list of distinct
//! qubit labels. The first label is the most significant bit of the amplitude
//! index, so for two qubits `|00⟩ = (1,0,0,0)ᵀ`, `|01⟩ = (0,1,0,0)ᵀ` and so on;
//! the same convention extends uniformly to larger registers.
//!
//! Unnormalized vectors are first-class citizens: projection returns the raw
//! partial inner product and its squared norm, and normalization is always an
//! explicit call. This keeps scale factors like the 1/4 of a double Bell
//! projection visible instead of silently absorbed.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::operators::Operator;
use crate::{MAX_QUBITS, NORM_TOL};

/// A qubit name, e.g. `'1'`..`'6'` for protocol particles or `'a'`, `'b'` for
/// ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub char);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense complex state vector over an ordered qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

fn check_labels(labels: &[Label]) -> Result<()> {
    for (n, l) in labels.iter().enumerate() {
        if labels[..n].contains(l) {
            return Err(Error::Label(format!("duplicate label '{l}'")));
        }
    }
    Ok(())
}

impl StateVector {
    /// Builds a state from explicit labels and amplitudes.
    pub fn from_amplitudes(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Size(format!(
                "register size {n} outside 1..={MAX_QUBITS}"
            )));
        }
        check_labels(&labels)?;
        if amps.len() != 1 << n {
            return Err(Error::Shape(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1 << n,
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Validation("non-finite amplitude".into()));
        }
        Ok(Self { labels, amps })
    }

    /// Computational basis state with default labels `'1'`, `'2'`, ...
    ///
    /// The amplitude 1 sits at the index whose binary expansion (first label
    /// most significant) equals `bit_pattern`.
    pub fn basis_state(num_qubits: usize, bit_pattern: &str) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Size(format!(
                "register size {num_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let labels: Vec<Label> = (0..num_qubits)
            .map(|p| Label(char::from(b'1' + p as u8)))
            .collect();
        Self::basis_on(&labels, bit_pattern)
    }

    /// Computational basis state on the given labels.
    pub fn basis_on(labels: &[Label], bit_pattern: &str) -> Result<Self> {
        let n = labels.len();
        if bit_pattern.len() != n {
            return Err(Error::Shape(format!(
                "bit pattern '{bit_pattern}' does not match register size {n}"
            )));
        }
        let mut index = 0usize;
        for ch in bit_pattern.chars() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                other => {
                    return Err(Error::Validation(format!(
                        "bit pattern may only contain 0/1, got '{other}'"
                    )))
                }
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(labels.to_vec(), amps)
    }

    /// Internal constructor for operation results (may have 0 qubits after a
    /// full projection).
    pub(crate) fn raw(labels: Vec<Label>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << labels.len());
        Self { labels, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// 0-based position of `label` in the register ordering.
    pub fn position_of(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn target_positions(&self, targets: &[Label]) -> Result<Vec<usize>> {
        check_labels(targets)?;
        targets
            .iter()
            .map(|&t| {
                self.position_of(t)
                    .ok_or_else(|| Error::Label(format!("label '{t}' not in register")))
            })
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Explicitly rescales to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Normalization(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled<F: Into<Complex64>>(&self, factor: F) -> Self {
        let f = factor.into();
        Self::raw(
            self.labels.clone(),
            self.amps.iter().map(|a| a * f).collect(),
        )
    }

    /// Componentwise sum; both states must share the same register.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::Label("register mismatch in state addition".into()));
        }
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::raw(self.labels.clone(), amps))
    }

    /// Kronecker product; `self`'s labels precede `other`'s.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(Error::Label(format!("label '{l}' present in both factors")));
            }
        }
        let n = self.labels.len() + other.labels.len();
        if n > MAX_QUBITS {
            return Err(Error::Size(format!(
                "tensor product has {n} qubits, cap is {MAX_QUBITS}"
            )));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let m = other.amps.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len() * m];
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * m + j] = a * b;
            }
        }
        Ok(Self::raw(labels, amps))
    }

    /// Applies `op` to the tensor factor spanned by `targets` (in the given
    /// order, first target = most significant bit of the operator index) and
    /// the identity elsewhere.
    pub fn apply(&self, op: &Operator, targets: &[Label]) -> Result<Self> {
        let n = self.num_qubits();
        let t = targets.len();
        if t == 0 || op.dim() != 1 << t {
            return Err(Error::Shape(format!(
                "operator dimension {} does not match {t} targets",
                op.dim()
            )));
        }
        let positions = self.target_positions(targets)?;

        // offset[k]: register-index bits contributed by operator index k
        let mut offset = vec![0usize; 1 << t];
        for (k, off) in offset.iter_mut().enumerate() {
            for (u, &p) in positions.iter().enumerate() {
                *off |= ((k >> (t - 1 - u)) & 1) << (n - 1 - p);
            }
        }
        let mask: usize = positions.iter().map(|&p| 1usize << (n - 1 - p)).sum();

        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut gathered = vec![Complex64::new(0.0, 0.0); 1 << t];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (k, g) in gathered.iter_mut().enumerate() {
                *g = self.amps[base | offset[k]];
            }
            for r in 0..1 << t {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, g) in gathered.iter().enumerate() {
                    acc += op.get(r, c) * g;
                }
                out[base | offset[r]] = acc;
            }
        }
        Ok(Self::raw(self.labels.clone(), out))
    }

    /// Projects the `targets` factor onto `pattern` (which must be normalized
    /// over exactly `targets.len()` qubits; its own labels are ignored).
    ///
    /// Returns the unnormalized residual on the remaining labels, in their
    /// original order, together with its squared norm: the probability of
    /// observing `pattern`.
    pub fn project(&self, pattern: &Self, targets: &[Label]) -> Result<(Self, f64)> {
        let n = self.num_qubits();
        let t = targets.len();
        if pattern.num_qubits() != t {
            return Err(Error::Shape(format!(
                "pattern has {} qubits but {t} targets were given",
                pattern.num_qubits()
            )));
        }
        if !pattern.is_normalized() {
            return Err(Error::Normalization(
                "projection pattern must be normalized".into(),
            ));
        }
        let positions = self.target_positions(targets)?;
        let rem: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        let rem_labels: Vec<Label> = rem.iter().map(|&p| self.labels[p]).collect();
        let m = rem.len();

        let mut res = vec![Complex64::new(0.0, 0.0); 1 << m];
        for (i, amp) in self.amps.iter().enumerate() {
            let mut k = 0usize;
            for (u, &p) in positions.iter().enumerate() {
                k |= ((i >> (n - 1 - p)) & 1) << (t - 1 - u);
            }
            let mut j = 0usize;
            for (v, &p) in rem.iter().enumerate() {
                j |= ((i >> (n - 1 - p)) & 1) << (m - 1 - v);
            }
            res[j] += pattern.amps[k].conj() * amp;
        }
        let residual = Self::raw(rem_labels, res);
        let probability = residual.norm_sqr();
        Ok((residual, probability))
    }

    /// ⟨self|other⟩ over identical registers.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.labels != other.labels {
            return Err(Error::Label("register mismatch in inner product".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|² for normalized states over the same register.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if !self.is_normalized() || !other.is_normalized() {
            return Err(Error::Normalization(
                "fidelity requires normalized states".into(),
            ));
        }
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest componentwise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::Label("register mismatch in state comparison".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Expands `op` on `targets` to a full matrix over `register`, column by
/// column. Used to compare operator identities on multi-qubit registers.
pub fn embed(op: &Operator, targets: &[Label], register: &[Label]) -> Result<Operator> {
    check_labels(register)?;
    let n = register.len();
    let dim = 1 << n;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for c in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[c] = Complex64::new(1.0, 0.0);
        let col = StateVector::raw(register.to_vec(), amps).apply(op, targets)?;
        for r in 0..dim {
            entries[r * dim + c] = col.amp(r);
        }
    }
    Operator::new(dim, entries)
}
