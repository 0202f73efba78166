//! Negativity-based entanglement measures.
//!
//! The negativity of a cut is `‖ρ^T‖₁ − 1`. For a Hermitian trace-one
//! state this equals twice the summed magnitude of the negative eigenvalues
//! of the partial transpose, which is how it is evaluated here: the
//! subtraction `Σ|λ| − 1` cancels catastrophically once the entanglement
//! drops below ~1e-12, while the negative eigenvalues keep their relative
//! precision.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{hermitian_eigenvalues, partial_trace, partial_transpose, ComplexMatrix, DensityMatrix, Qubit};

/// All negativities of a three-qubit state at one time point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NegativityReport {
    pub t: f64,
    /// Tripartite negativity `N_ABC`.
    pub n_tri: f64,
    /// `N_A|BC`, `N_B|AC`, `N_C|AB`.
    pub n_bipart: [f64; 3],
    /// `N_A|B`, `N_A|C`, `N_B|C`.
    pub n_pair: [f64; 3],
}

impl NegativityReport {
    pub const PAIRS: [(Qubit, Qubit); 3] = [(Qubit::A, Qubit::B), (Qubit::A, Qubit::C), (Qubit::B, Qubit::C)];
}

/// `2 Σ_{λ<0} |λ|` over the eigenvalues of the partial transpose.
fn negativity_of_transpose(pt: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(pt)?;
    Ok(-2.0 * ev.iter().filter(|&&x| x < 0.0).sum::<f64>())
}

fn three_qubit(rho: &DensityMatrix) -> Result<&ComplexMatrix> {
    let m = rho.matrix();
    if m.n_qubits()? != 3 {
        return Err(Error::DimensionMismatch { expected: 8, got: m.rows() });
    }
    Ok(m)
}

/// Negativity of the cut `i | rest`.
pub fn bipartition_negativity(rho: &DensityMatrix, i: Qubit) -> Result<f64> {
    let m = three_qubit(rho)?;
    if i.0 >= 3 {
        return Err(Error::QubitOutOfRange { index: i.0, n_qubits: 3 });
    }
    check_hermitian(m)?;
    negativity_of_transpose(&partial_transpose(&m.hermitian_part(), &[i])?)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > crate::qmat::HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

fn bipartitions(rho: &DensityMatrix) -> Result<[f64; 3]> {
    Ok([
        bipartition_negativity(rho, Qubit::A)?,
        bipartition_negativity(rho, Qubit::B)?,
        bipartition_negativity(rho, Qubit::C)?,
    ])
}

fn geometric_mean(v: [f64; 3]) -> f64 {
    (v[0] * v[1] * v[2]).cbrt()
}

/// `∛(N_A|BC · N_B|AC · N_C|AB)`
pub fn tripartite_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(geometric_mean(bipartitions(rho)?))
}

/// Negativity of the two-qubit reduction onto `{i, j}`, transposing `j`.
pub fn pairwise_negativity(rho: &DensityMatrix, i: Qubit, j: Qubit) -> Result<f64> {
    let m = three_qubit(rho)?;
    if i == j {
        return Err(Error::OutOfRange(format!("pairwise negativity needs distinct qubits, got {i} twice")));
    }
    check_hermitian(m)?;
    let reduced = partial_trace(&m.hermitian_part(), &[i, j])?;
    // The reduction lists kept qubits in ascending order.
    let j_local = if j > i { Qubit(1) } else { Qubit(0) };
    negativity_of_transpose(&partial_transpose(&reduced, &[j_local])?)
}

pub fn full_report(rho: &DensityMatrix, t: f64) -> Result<NegativityReport> {
    let n_bipart = bipartitions(rho)?;
    let mut n_pair = [0.0; 3];
    for (slot, (i, j)) in n_pair.iter_mut().zip(NegativityReport::PAIRS) {
        *slot = pairwise_negativity(rho, i, j)?;
    }
    Ok(NegativityReport { t, n_tri: geometric_mean(n_bipart), n_bipart, n_pair })
}
