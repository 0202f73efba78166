//! Stochastic unraveling of the correlated-noise master equation.
//!
//! Each trajectory evolves a pure state under `H_sys` plus white-noise
//! kicks `exp(−i σ_i ΔW_i)`, where the increments have covariance `K·dt`
//! (`K_ii = γ`, `K_ij = Γ_ij`). Averaging `|ψ⟩⟨ψ|` over trajectories
//! reproduces the master-equation state up to O(dt) splitting bias and
//! O(1/√M) sampling error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liouville::{EvolutionProblem, Monomial};
use crate::noise::CorrelationSpec;
use crate::qmat::{ComplexMatrix, DensityMatrix, Qubit, C64, ZERO};
use crate::states::{hamiltonian_sys, pauli_embedded};

const PURITY_TOL: f64 = 1e-10;
/// Pivots below this fraction of γ are treated as exact zeros.
const CHOLESKY_TOL: f64 = 1e-12;

/// Correlated Gaussian increments with covariance `K·dt`.
#[derive(Clone, Debug)]
pub struct NoiseSampler {
    pub corr: CorrelationSpec,
    /// Lower-triangular `L` with `L Lᵀ = K`.
    pub cholesky_factor: [[f64; 3]; 3],
}

impl NoiseSampler {
    pub fn new(corr: CorrelationSpec) -> Result<Self> {
        corr.validate()?;
        Ok(Self { cholesky_factor: cholesky_psd(&corr.covariance(), CHOLESKY_TOL * corr.gamma), corr })
    }

    /// Sampler that produces no noise at all.
    pub fn silent() -> Self {
        Self { corr: CorrelationSpec::new(0.0, 0.0, 0.0, 0.0), cholesky_factor: [[0.0; 3]; 3] }
    }
}

/// Cholesky factor of a positive semi-definite matrix. Zero pivots zero
/// out their column, which is exact when the input is PSD.
fn cholesky_psd(k: &[[f64; 3]; 3], tol: f64) -> [[f64; 3]; 3] {
    let mut l = [[0.0; 3]; 3];
    for j in 0..3 {
        let d = k[j][j] - (0..j).map(|m| l[j][m] * l[j][m]).sum::<f64>();
        if d <= tol {
            continue;
        }
        let pivot = d.sqrt();
        l[j][j] = pivot;
        for i in (j + 1)..3 {
            l[i][j] = (k[i][j] - (0..j).map(|m| l[i][m] * l[j][m]).sum::<f64>()) / pivot;
        }
    }
    l
}

/// `ΔW = L z √dt` with `z` three independent standard normals.
pub fn sample_increments<R: rand::Rng + ?Sized>(sampler: &NoiseSampler, dt: f64, rng: &mut R) -> [f64; 3] {
    let z: [f64; 3] = [StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng)];
    let s = dt.sqrt();
    let l = &sampler.cholesky_factor;
    [l[0][0] * z[0] * s, (l[1][0] * z[0] + l[1][1] * z[1]) * s, (l[2][0] * z[0] + l[2][1] * z[1] + l[2][2] * z[2]) * s]
}

/// Generator for trajectory `index` of an ensemble seeded with `master`:
/// one ChaCha stream per trajectory.
pub fn trajectory_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Pure states sampled along one trajectory.
#[derive(Clone, Debug)]
pub struct StatePath {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    /// Largest `|‖ψ‖ − 1|` over all steps.
    pub max_norm_drift: f64,
}

struct Propagator {
    phases: Vec<C64>,
    sigmas: Vec<Monomial>,
    dt: f64,
}

impl Propagator {
    fn new(problem: &EvolutionProblem) -> Result<Self> {
        let h = hamiltonian_sys(&problem.sys);
        let phases = (0..h.rows()).map(|k| C64::from_polar(1.0, -h[(k, k)].re * problem.dt)).collect();
        let sigmas = (0..problem.sys.n_qubits)
            .map(|q| Monomial::from_matrix(&pauli_embedded(problem.channel.pauli(), Qubit(q), problem.sys.n_qubits)?))
            .collect::<Result<_>>()?;
        Ok(Self { phases, sigmas, dt: problem.dt })
    }

    fn step(&self, psi: &mut [C64], scratch: &mut [C64], dw: &[f64; 3]) {
        for (a, p) in psi.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        for (sigma, &w) in self.sigmas.iter().zip(dw) {
            if w == 0.0 {
                continue;
            }
            let (s, c) = w.sin_cos();
            sigma.apply_into(psi, scratch);
            for (a, b) in psi.iter_mut().zip(scratch.iter()) {
                *a = *a * c + C64::new(0.0, -s) * b;
            }
        }
    }
}

fn initial_vector(problem: &EvolutionProblem) -> Result<Vec<C64>> {
    problem.validate()?;
    problem.rho0.pure_vector(PURITY_TOL).map_err(|_| Error::InvalidState("trajectory initial state must be pure".into()))
}

/// Propagates one noise realization and records the state at the grid
/// step nearest to each sample time.
pub fn propagate_trajectory(
    problem: &EvolutionProblem,
    sampler: &NoiseSampler,
    seed: u64,
    sample_times: &[f64],
) -> Result<StatePath> {
    let psi0 = initial_vector(problem)?;
    let mut rng = trajectory_rng(seed, 0);
    run_path(problem, &Propagator::new(problem)?, sampler, &mut rng, psi0, sample_times)
}

fn run_path(
    problem: &EvolutionProblem,
    prop: &Propagator,
    sampler: &NoiseSampler,
    rng: &mut ChaCha8Rng,
    mut psi: Vec<C64>,
    sample_times: &[f64],
) -> Result<StatePath> {
    if sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::OutOfRange("sample times must be ascending".into()));
    }
    let mut scratch = vec![ZERO; psi.len()];
    let mut path = StatePath { times: Vec::new(), states: Vec::new(), max_norm_drift: 0.0 };
    let mut step = 0usize;
    for &t in sample_times {
        let target = problem.steps_to(t);
        while step < target {
            let dw = sample_increments(sampler, prop.dt, rng);
            prop.step(&mut psi, &mut scratch, &dw);
            step += 1;
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            path.max_norm_drift = path.max_norm_drift.max((norm - 1.0).abs());
        }
        path.times.push(step as f64 * prop.dt);
        path.states.push(psi.clone());
    }
    Ok(path)
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub mean_rho: DensityMatrix,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Frobenius-norm standard error of `mean_rho`.
    pub standard_error: f64,
}

/// Average of `|ψ⟩⟨ψ|` at `t_sample` over `n_trajectories` realizations.
/// Trajectory `k` draws from [`trajectory_rng`]`(seed, k)`; the reduction is
/// sequential in `k`, so results are bit-for-bit reproducible.
pub fn ensemble_average(problem: &EvolutionProblem, n_trajectories: usize, seed: u64, t_sample: f64) -> Result<EnsembleResult> {
    let sampler = NoiseSampler::new(problem.corr)?;
    ensemble_with_sampler(problem, &sampler, n_trajectories, seed, t_sample)
}

pub fn ensemble_with_sampler(
    problem: &EvolutionProblem,
    sampler: &NoiseSampler,
    n_trajectories: usize,
    seed: u64,
    t_sample: f64,
) -> Result<EnsembleResult> {
    Ok(ensemble_path(problem, sampler, n_trajectories, seed, &[t_sample])?.pop().expect("one sample"))
}

/// Ensemble averages at several sample times from the same trajectories.
pub fn ensemble_path(
    problem: &EvolutionProblem,
    sampler: &NoiseSampler,
    n_trajectories: usize,
    seed: u64,
    sample_times: &[f64],
) -> Result<Vec<EnsembleResult>> {
    if n_trajectories == 0 {
        return Err(Error::OutOfRange("at least one trajectory is required".into()));
    }
    if let Some(t) = sample_times.iter().find(|&&t| !(0.0..=problem.t_max * (1.0 + 1e-12)).contains(&t)) {
        return Err(Error::OutOfRange(format!("sample time {t} outside [0, {}]", problem.t_max)));
    }
    let psi0 = initial_vector(problem)?;
    let prop = Propagator::new(problem)?;
    let paths: Vec<StatePath> = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k);
            run_path(problem, &prop, sampler, &mut rng, psi0.clone(), sample_times)
        })
        .collect::<Result<_>>()?;

    let dim = psi0.len();
    let m = n_trajectories as f64;
    let mut out = Vec::with_capacity(sample_times.len());
    for idx in 0..sample_times.len() {
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut sum_sq_norm = 0.0;
        for path in &paths {
            let outer = ComplexMatrix::outer(&path.states[idx]);
            sum_sq_norm += outer.frobenius_norm().powi(2);
            sum.add_scaled(C64::new(1.0, 0.0), &outer);
        }
        let mean = sum.scale_real(1.0 / m);
        let standard_error = if n_trajectories > 1 {
            let var = (sum_sq_norm / m - mean.frobenius_norm().powi(2)).max(0.0) * m / (m - 1.0);
            (var / m).sqrt()
        } else {
            0.0
        };
        out.push(EnsembleResult {
            mean_rho: DensityMatrix::from_matrix_unchecked(mean.hermitian_part()),
            n_trajectories,
            seed,
            standard_error,
        });
    }
    Ok(out)
}
