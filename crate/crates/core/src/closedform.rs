//! Analytic negativities under dephasing noise.

use crate::qmat::Qubit;

/// Inputs of the dephasing closed forms. No validity check is applied to
/// the correlations; the formulas are evaluated as written.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingParams {
    pub gamma: f64,
    /// `(Γ_AB, Γ_AC, Γ_BC)`
    pub gammas: [f64; 3],
    pub t: f64,
}

impl DephasingParams {
    pub fn new(gamma: f64, gammas: [f64; 3], t: f64) -> Self {
        Self { gamma, gammas, t }
    }

    fn pair(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.gammas[0],
            (0, 2) => self.gammas[1],
            (1, 2) => self.gammas[2],
            _ => panic!("no correlation between qubits {i} and {j}"),
        }
    }
}

/// GHZ tripartite (and every bipartition) negativity:
/// `exp(−6γt − 4(Γ_AB + Γ_AC + Γ_BC)t)`.
pub fn ghz_negativity_dephasing(p: &DephasingParams) -> f64 {
    let sum: f64 = p.gammas.iter().sum();
    (-6.0 * p.gamma * p.t - 4.0 * sum * p.t).exp()
}

/// `ln(e^a + e^b)` without overflow.
fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln N_i|jk` for the W state.
fn ln_w_bipartition(p: &DephasingParams, i: usize) -> f64 {
    let (j, k) = match i {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("qubit index {i} out of range"),
    };
    let t = p.t;
    (2.0f64 / 3.0).ln() - 4.0 * p.gamma * t + 0.5 * log_sum_exp(8.0 * p.pair(i, j) * t, 8.0 * p.pair(i, k) * t)
}

/// W-state bipartition negativity
/// `(2/3) e^{−4γt} √(e^{8Γ_ij t} + e^{8Γ_ik t})`.
pub fn w_bipartition_negativity_dephasing(p: &DephasingParams, i: Qubit) -> f64 {
    ln_w_bipartition(p, i.0).exp()
}

/// W-state tripartite negativity
/// `(2/3) e^{−4γt} Π_i (e^{8Γ_ij t} + e^{8Γ_ik t})^{1/6}`.
pub fn w_tripartite_negativity_dephasing(p: &DephasingParams) -> f64 {
    let t = p.t;
    let pairs = [(0, 1, 2), (1, 0, 2), (2, 0, 1)];
    let ln_prod: f64 = pairs.iter().map(|&(i, j, k)| log_sum_exp(8.0 * p.pair(i, j) * t, 8.0 * p.pair(i, k) * t) / 6.0).sum();
    ((2.0f64 / 3.0).ln() - 4.0 * p.gamma * t + ln_prod).exp()
}

/// W-state pairwise negativity `N_i|j` under dephasing.
///
/// The two-qubit reduction keeps populations 1/3 on `|00⟩, |01⟩, |10⟩` and a
/// single coherence `c = (1/3) e^{−4(γ−Γ_ij)t}`, so the negativity is
/// `√(1/9 + 4c²) − 1/3`.
pub fn w_pairwise_negativity_dephasing(p: &DephasingParams, i: Qubit, j: Qubit) -> f64 {
    let x = 4.0 * (-8.0 * (p.gamma - p.pair(i.0, j.0)) * p.t).exp();
    // (√(1+x) − 1)/3 without cancellation.
    x / (3.0 * ((1.0 + x).sqrt() + 1.0))
}
