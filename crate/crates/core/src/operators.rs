//! Fixed operators of the protocol (the Pauli correction set, Bell states,
//! CNOT) plus generic dense complex matrix algebra: Kronecker products,
//! LU determinant, inverse, and unitarity/diagonality classification.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::statevec::StateVector;
use crate::{MAX_OPERATOR_DIM, SINGULAR_TOL, UNITARY_TOL};

/// Dense complex square matrix; dimension a power of two, at most 256.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

/// Verdict of [`Operator::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorClass {
    /// ‖U·U† − I‖_max within tolerance: exactly reversible by the adjoint.
    Unitary,
    /// Nonzero determinant but not unitary: reversible only probabilistically.
    InvertibleNonunitary,
    /// Determinant zero within tolerance: no inverse exists.
    Singular,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() || dim > MAX_OPERATOR_DIM {
            return Err(Error::Size(format!(
                "operator dimension {dim} must be a power of two in 1..={MAX_OPERATOR_DIM}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::Validation("non-finite matrix entry".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self::new(dim, entries)
    }

    /// Convenience constructor from real entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        })
        .expect("identity dimensions are valid by construction")
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
            .expect("zero dimensions are valid by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.dim, self.dim, rhs.dim, rhs.dim
            )));
        }
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Self::new(d, entries)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector length {} does not match dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Shape("dimension mismatch in operator sum".into()));
        }
        Self::new(
            self.dim,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scaled<F: Into<Complex64>>(&self, factor: F) -> Self {
        let f = factor.into();
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * f).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
            .expect("adjoint preserves a valid shape")
    }

    /// Standard Kronecker product; dimensions multiply.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let d = self.dim * rhs.dim;
        if d > MAX_OPERATOR_DIM {
            return Err(Error::Size(format!(
                "Kronecker product dimension {d} exceeds {MAX_OPERATOR_DIM}"
            )));
        }
        let (da, db) = (self.dim, rhs.dim);
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.get(ra, ca);
                for rb in 0..db {
                    for cb in 0..db {
                        entries[(ra * db + rb) * d + (ca * db + cb)] = a * rhs.get(rb, cb);
                    }
                }
            }
        }
        Self::new(d, entries)
    }

    /// Determinant via LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&a, &b| {
                    m[a * d + col]
                        .norm()
                        .partial_cmp(&m[b * d + col].norm())
                        .expect("finite entries are comparable")
                })
                .expect("non-empty pivot range");
            if m[pivot * d + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for k in 0..d {
                    m.swap(col * d + k, pivot * d + k);
                }
                det = -det;
            }
            let diag = m[col * d + col];
            det *= diag;
            for r in col + 1..d {
                let factor = m[r * d + col] / diag;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in col..d {
                    let sub = factor * m[col * d + k];
                    m[r * d + k] -= sub;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] when |det| falls at or below the
    /// singularity threshold.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det.norm() <= SINGULAR_TOL {
            return Err(Error::Singular(format!(
                "|det| = {:.3e} is below the invertibility threshold",
                det.norm()
            )));
        }
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut inv = Operator::identity(d).entries;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&a, &b| {
                    m[a * d + col]
                        .norm()
                        .partial_cmp(&m[b * d + col].norm())
                        .expect("finite entries are comparable")
                })
                .expect("non-empty pivot range");
            if pivot != col {
                for k in 0..d {
                    m.swap(col * d + k, pivot * d + k);
                    inv.swap(col * d + k, pivot * d + k);
                }
            }
            let diag = m[col * d + col];
            for k in 0..d {
                m[col * d + k] /= diag;
                inv[col * d + k] /= diag;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = m[r * d + col];
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..d {
                    let (ms, is) = (factor * m[col * d + k], factor * inv[col * d + k]);
                    m[r * d + k] -= ms;
                    inv[r * d + k] -= is;
                }
            }
        }
        Self::new(d, inv)
    }

    /// ‖self·self† − I‖ in the entrywise max norm.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self
            .mul(&self.adjoint())
            .expect("self-adjoint product dimensions always match");
        let mut defect: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expect = Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0);
                defect = defect.max((product.get(r, c) - expect).norm());
            }
        }
        defect
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY_TOL
    }

    /// Sum of |entry| over off-diagonal positions.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut mass = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    mass += self.get(r, c).norm();
                }
            }
        }
        mass
    }

    /// Unitary / invertible-but-not-unitary / singular, in that precedence.
    pub fn classify(&self) -> OperatorClass {
        if self.is_unitary() {
            OperatorClass::Unitary
        } else if self.determinant().norm() <= SINGULAR_TOL {
            OperatorClass::Singular
        } else {
            OperatorClass::InvertibleNonunitary
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Shape("dimension mismatch in comparison".into()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// The four single-qubit correction operators, indexed by Bell outcome.
///
/// The fourth entry is the real matrix `[[0,-1],[1,0]]`, the protocol's
/// convention for the ψ⁻ outcome, rather than the conventional complex
/// Pauli-Y. All numeric checks are run against this exact convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliKind {
    I,
    Z,
    X,
    YReal,
}

impl PauliKind {
    /// Maps Bell index 1..4 (φ⁺, φ⁻, ψ⁺, ψ⁻) to the correction operator.
    pub fn for_bell_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Self::I),
            2 => Ok(Self::Z),
            3 => Ok(Self::X),
            4 => Ok(Self::YReal),
            other => Err(Error::Index(format!("Bell index {other} outside 1..=4"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::I => "I",
            Self::Z => "Z",
            Self::X => "X",
            Self::YReal => "Y",
        }
    }
}

/// The 2×2 matrix for a [`PauliKind`].
pub fn pauli(kind: PauliKind) -> Operator {
    let rows: [f64; 4] = match kind {
        PauliKind::I => [1.0, 0.0, 0.0, 1.0],
        PauliKind::Z => [1.0, 0.0, 0.0, -1.0],
        PauliKind::X => [0.0, 1.0, 1.0, 0.0],
        PauliKind::YReal => [0.0, -1.0, 1.0, 0.0],
    };
    Operator::from_real(2, &rows).expect("2x2 real operators are always valid")
}

/// Bell state `k`: 1 = (|00⟩+|11⟩)/√2, 2 = (|00⟩−|11⟩)/√2,
/// 3 = (|01⟩+|10⟩)/√2, 4 = (|01⟩−|10⟩)/√2.
pub fn bell_state(k: u8) -> Result<StateVector> {
    let s = FRAC_1_SQRT_2;
    let amps: [f64; 4] = match k {
        1 => [s, 0.0, 0.0, s],
        2 => [s, 0.0, 0.0, -s],
        3 => [0.0, s, s, 0.0],
        4 => [0.0, s, -s, 0.0],
        other => return Err(Error::Index(format!("Bell index {other} outside 1..=4"))),
    };
    StateVector::from_amplitudes(
        vec![crate::statevec::Label('1'), crate::statevec::Label('2')],
        amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    )
}

/// Controlled-NOT, control = first qubit, target = second.
pub fn cnot() -> Operator {
    Operator::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .expect("CNOT is a valid 4x4 operator")
}
