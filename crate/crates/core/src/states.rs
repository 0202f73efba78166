//! Pauli operators, the system Hamiltonian and the canonical three-qubit
//! states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, DensityMatrix, Qubit, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let v = match self {
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_vec(2, 2, v.to_vec()).expect("2x2 Pauli")
    }
}

/// `I ⊗ … ⊗ σ ⊗ … ⊗ I` with `σ` on `target`.
pub fn pauli_embedded(kind: Pauli, target: Qubit, n_qubits: usize) -> Result<ComplexMatrix> {
    if target.0 >= n_qubits {
        return Err(Error::QubitOutOfRange { index: target.0, n_qubits });
    }
    let id = ComplexMatrix::identity(2);
    let sigma = kind.matrix();
    let mut out = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        out = kron(&out, if q == target.0 { &sigma } else { &id });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_qubits: usize,
    /// Transition frequency, in units of the local rate.
    pub omega: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { n_qubits: 3, omega: 0.0 }
    }
}

impl SystemConfig {
    pub fn with_omega(omega: f64) -> Self {
        Self { omega, ..Self::default() }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::OutOfRange("n_qubits must be positive".into()));
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::OutOfRange(format!("omega must be finite and >= 0, got {}", self.omega)));
        }
        Ok(())
    }
}

/// `(ω/2) Σ_i σ_z^i`, diagonal in the computational basis.
pub fn hamiltonian_sys(cfg: &SystemConfig) -> ComplexMatrix {
    let n = cfg.n_qubits;
    let diag: Vec<C64> = (0..cfg.dim())
        .map(|k| {
            let ones = k.count_ones() as f64;
            let zeros = n as f64 - ones;
            C64::new(0.5 * cfg.omega * (zeros - ones), 0.0)
        })
        .collect();
    ComplexMatrix::diagonal(&diag)
}

fn ket(amplitudes: &[(usize, f64)]) -> Vec<C64> {
    let mut psi = vec![ZERO; 8];
    for &(k, a) in amplitudes {
        psi[k] += C64::new(a, 0.0);
    }
    psi
}

pub fn ghz_vector() -> Vec<C64> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    ket(&[(0b000, a), (0b111, a)])
}

pub fn w_vector() -> Vec<C64> {
    let a = 1.0 / 3f64.sqrt();
    ket(&[(0b001, a), (0b010, a), (0b100, a)])
}

/// `(|000⟩ + |111⟩)/√2`
pub fn ghz_state() -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&ghz_vector()))
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`
pub fn w_state() -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&w_vector()))
}

/// Weight of the GHZ component in `√(1−p)|W⟩ + √p|GHZ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub p: f64,
}

impl SuperpositionSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("superposition weight p = {p} outside [0, 1]")));
        }
        Ok(Self { p })
    }
}

pub fn ghzw_vector(spec: SuperpositionSpec) -> Result<Vec<C64>> {
    let SuperpositionSpec { p } = SuperpositionSpec::new(spec.p)?;
    let (cw, cg) = ((1.0 - p).sqrt(), p.sqrt());
    Ok(w_vector().iter().zip(ghz_vector()).map(|(w, g)| w * cw + g * cg).collect())
}

pub fn ghzw_superposition(spec: SuperpositionSpec) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&ghzw_vector(spec)?)))
}
