//! Correlated-noise master equation and its fixed-step RK4 integration.
//!
//! For coupling operators `σ_j` and noise covariance `K` (diagonal `γ_j`,
//! off-diagonal `Γ_jk`) the generator is
//!
//! ```text
//! ρ' = −i[H, ρ] − Σ_j γ_j (ρ − σ_j ρ σ_j)
//!      − Σ_{j<k} Γ_jk (σ_j σ_k ρ + ρ σ_j σ_k − σ_j ρ σ_k − σ_k ρ σ_j)
//! ```
//!
//! which equals `−½ Σ_jk K_jk [σ_j, [σ_k, ρ]]` for commuting `σ_j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entangle;
use crate::error::{Error, Result};
use crate::noise::CorrelationSpec;
use crate::qmat::{ComplexMatrix, DensityMatrix, Qubit, C64, ONE, ZERO};
use crate::states::{hamiltonian_sys, pauli_embedded, Pauli, SystemConfig};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_ESD_THRESHOLD: f64 = 1e-6;

/// Tolerance on the initial state of a problem.
const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseChannel {
    /// `σ_z` couplings.
    Dephasing,
    /// `σ_x` couplings.
    Amplitude,
}

impl NoiseChannel {
    pub fn pauli(self) -> Pauli {
        match self {
            NoiseChannel::Dephasing => Pauli::Z,
            NoiseChannel::Amplitude => Pauli::X,
        }
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseChannel::Dephasing => "dephasing",
            NoiseChannel::Amplitude => "amplitude",
        })
    }
}

impl FromStr for NoiseChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dephasing" | "z" => Ok(NoiseChannel::Dephasing),
            "amplitude" | "x" => Ok(NoiseChannel::Amplitude),
            other => Err(Error::Config(format!("unknown noise channel {other:?}"))),
        }
    }
}

/// Matrix with exactly one entry per row: `m[r][col[r]] = val[r]`.
/// Pauli strings and diagonal Hamiltonians have this shape.
#[derive(Clone, Debug)]
pub(crate) struct Monomial {
    col: Vec<usize>,
    val: Vec<C64>,
    // Inverse view: column c has its entry in row `row_of[c]` with value `val_of[c]`.
    row_of: Vec<usize>,
    val_of: Vec<C64>,
}

impl Monomial {
    pub(crate) fn identity(dim: usize) -> Self {
        Self { col: (0..dim).collect(), val: vec![ONE; dim], row_of: (0..dim).collect(), val_of: vec![ONE; dim] }
    }

    pub(crate) fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        let dim = m.rows();
        let mut col = Vec::with_capacity(dim);
        let mut val = Vec::with_capacity(dim);
        let mut row_of = vec![usize::MAX; dim];
        let mut val_of = vec![ZERO; dim];
        for r in 0..dim {
            let nz: Vec<usize> = (0..dim).filter(|&c| m[(r, c)] != ZERO).collect();
            // An all-zero row is stored as a zero entry on the diagonal.
            let c = match nz.as_slice() {
                [] => r,
                [c] => *c,
                _ => return Err(Error::Config("coupling operator is not a signed permutation".into())),
            };
            if row_of[c] != usize::MAX {
                return Err(Error::Config("coupling operator is not a signed permutation".into()));
            }
            col.push(c);
            val.push(m[(r, c)]);
            row_of[c] = r;
            val_of[c] = m[(r, c)];
        }
        Ok(Self { col, val, row_of, val_of })
    }

    fn matmul(&self, other: &Monomial) -> Monomial {
        let dim = self.col.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            let k = self.col[r];
            m[(r, other.col[k])] = self.val[r] * other.val[k];
        }
        Monomial::from_matrix(&m).expect("product of monomial matrices is monomial")
    }

    /// `out = m v`
    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        for ((o, &c), &x) in out.iter_mut().zip(&self.col).zip(&self.val) {
            *o = x * v[c];
        }
    }

    /// `out += s · a ρ b`
    fn sandwich_acc(out: &mut ComplexMatrix, s: C64, a: &Monomial, rho: &ComplexMatrix, b: &Monomial) {
        let dim = a.col.len();
        for r in 0..dim {
            let ar = a.val[r] * s;
            if ar == ZERO {
                continue;
            }
            let k = a.col[r];
            for c in 0..dim {
                let bv = b.val_of[c];
                if bv == ZERO {
                    continue;
                }
                out[(r, c)] += ar * rho[(k, b.row_of[c])] * bv;
            }
        }
    }
}

/// The master-equation generator for a fixed Hamiltonian, coupling
/// operators and noise covariance.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    h: Monomial,
    identity: Monomial,
    sigmas: Vec<Monomial>,
    // (j, k, Γ_jk, σ_j σ_k) for j < k with Γ_jk ≠ 0.
    pairs: Vec<(usize, usize, f64, Monomial)>,
    rates: Vec<f64>,
}

impl Generator {
    /// General n-qubit generator. `h` must be diagonal or otherwise
    /// monomial; `covariance` is n×n with local rates on the diagonal.
    pub fn new(h: &ComplexMatrix, sigmas: &[ComplexMatrix], covariance: &[Vec<f64>]) -> Result<Self> {
        let dim = h.rows();
        let n = sigmas.len();
        if covariance.len() != n || covariance.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: covariance.len() });
        }
        if let Some(s) = sigmas.iter().find(|s| s.rows() != dim || !s.is_square()) {
            return Err(Error::DimensionMismatch { expected: dim, got: s.rows() });
        }
        let sig: Vec<Monomial> = sigmas.iter().map(Monomial::from_matrix).collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        for j in 0..n {
            for k in (j + 1)..n {
                let g = covariance[j][k];
                if g != 0.0 {
                    pairs.push((j, k, g, sig[j].matmul(&sig[k])));
                }
            }
        }
        Ok(Self {
            dim,
            h: Monomial::from_matrix(h)?,
            identity: Monomial::identity(dim),
            rates: (0..n).map(|j| covariance[j][j]).collect(),
            sigmas: sig,
            pairs,
        })
    }

    /// Generator of a three-qubit problem.
    pub fn for_problem(sys: &SystemConfig, channel: NoiseChannel, corr: &CorrelationSpec) -> Result<Self> {
        let sigmas: Vec<ComplexMatrix> =
            (0..sys.n_qubits).map(|q| pauli_embedded(channel.pauli(), Qubit(q), sys.n_qubits)).collect::<Result<_>>()?;
        if sys.n_qubits != 3 {
            return Err(Error::Config(format!("correlation spec describes 3 qubits, system has {}", sys.n_qubits)));
        }
        let cov: Vec<Vec<f64>> = corr.covariance().iter().map(|r| r.to_vec()).collect();
        Self::new(&hamiltonian_sys(sys), &sigmas, &cov)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `dρ/dt` into `out`.
    pub fn apply_into(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        out.data_mut().fill(ZERO);
        let id = &self.identity;
        let minus_i = C64::new(0.0, -1.0);
        Monomial::sandwich_acc(out, minus_i, &self.h, rho, id);
        Monomial::sandwich_acc(out, -minus_i, id, rho, &self.h);
        for (sigma, &g) in self.sigmas.iter().zip(&self.rates) {
            if g == 0.0 {
                continue;
            }
            out.add_scaled(C64::new(-g, 0.0), rho);
            Monomial::sandwich_acc(out, C64::new(g, 0.0), sigma, rho, sigma);
        }
        for (j, k, g, prod) in &self.pairs {
            let m = C64::new(-g, 0.0);
            let p = C64::new(*g, 0.0);
            Monomial::sandwich_acc(out, m, prod, rho, id);
            Monomial::sandwich_acc(out, m, id, rho, prod);
            Monomial::sandwich_acc(out, p, &self.sigmas[*j], rho, &self.sigmas[*k]);
            Monomial::sandwich_acc(out, p, &self.sigmas[*k], rho, &self.sigmas[*j]);
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        self.apply_into(rho, &mut out);
        out
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    pub sys: SystemConfig,
    pub channel: NoiseChannel,
    pub corr: CorrelationSpec,
    pub rho0: DensityMatrix,
    /// In units of 1/γ.
    pub t_max: f64,
    pub dt: f64,
}

impl EvolutionProblem {
    pub fn new(
        sys: SystemConfig,
        channel: NoiseChannel,
        corr: CorrelationSpec,
        rho0: DensityMatrix,
        t_max: f64,
        dt: f64,
    ) -> Result<Self> {
        let p = Self { sys, channel, corr, rho0, t_max, dt };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.sys.validate()?;
        self.corr.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::OutOfRange(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::OutOfRange(format!("t_max must be >= 0, got {}", self.t_max)));
        }
        if self.rho0.dim() != self.sys.dim() {
            return Err(Error::DimensionMismatch { expected: self.sys.dim(), got: self.rho0.dim() });
        }
        DensityMatrix::new(self.rho0.matrix().clone(), STATE_TOL)?;
        Ok(())
    }

    pub fn generator(&self) -> Result<Generator> {
        Generator::for_problem(&self.sys, self.channel, &self.corr)
    }

    /// Number of RK4 steps that reach `t` on this problem's grid.
    pub fn steps_to(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

/// Right-hand side of the master equation at `rho`.
pub fn rhs(rho: &ComplexMatrix, problem: &EvolutionProblem) -> Result<ComplexMatrix> {
    if rho.rows() != problem.sys.dim() || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: problem.sys.dim(), got: rho.rows() });
    }
    Ok(problem.generator()?.apply(rho))
}

/// Classical RK4 on a dense density matrix, without any projection back
/// onto the physical set.
#[derive(Clone, Debug)]
pub struct Rk4 {
    generator: Generator,
    dt: f64,
    state: ComplexMatrix,
    steps: usize,
    k: [ComplexMatrix; 4],
    tmp: ComplexMatrix,
}

impl Rk4 {
    pub fn new(generator: Generator, rho0: ComplexMatrix, dt: f64) -> Self {
        let d = generator.dim();
        let z = ComplexMatrix::zeros(d, d);
        Self { generator, dt, state: rho0, steps: 0, k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    pub fn for_problem(problem: &EvolutionProblem) -> Result<Self> {
        Ok(Self::new(problem.generator()?, problem.rho0.matrix().clone(), problem.dt))
    }

    pub fn state(&self) -> &ComplexMatrix {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// Restarts from `state` at step `steps`.
    pub fn reset(&mut self, state: ComplexMatrix, steps: usize) {
        self.state = state;
        self.steps = steps;
    }

    pub fn step(&mut self) {
        let h = self.dt;
        let [k1, k2, k3, k4] = &mut self.k;
        let g = &self.generator;
        g.apply_into(&self.state, k1);
        stage(&mut self.tmp, &self.state, 0.5 * h, k1);
        g.apply_into(&self.tmp, k2);
        stage(&mut self.tmp, &self.state, 0.5 * h, k2);
        g.apply_into(&self.tmp, k3);
        stage(&mut self.tmp, &self.state, h, k3);
        g.apply_into(&self.tmp, k4);
        let w = h / 6.0;
        for (((s, a), (b, c)), d) in self
            .state
            .data_mut()
            .iter_mut()
            .zip(k1.data())
            .zip(k2.data().iter().zip(k3.data()))
            .zip(k4.data())
        {
            *s += (a + (b + c) * 2.0 + d) * w;
        }
        self.steps += 1;
    }

    pub fn advance_to(&mut self, steps: usize) {
        while self.steps < steps {
            self.step();
        }
    }
}

fn stage(out: &mut ComplexMatrix, base: &ComplexMatrix, h: f64, k: &ComplexMatrix) {
    for ((o, b), kk) in out.data_mut().iter_mut().zip(base.data()).zip(k.data()) {
        *o = b + kk * h;
    }
}

/// Symmetrizes and renormalizes a raw integrator state.
pub fn project_state(raw: &ComplexMatrix) -> DensityMatrix {
    let mut m = raw.hermitian_part();
    let tr = m.trace().re;
    if (tr - 1.0).abs() > 1e-12 {
        m = m.scale_real(1.0 / tr);
    }
    DensityMatrix::from_matrix_unchecked(m)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Grid times `k·dt` nearest to the requested samples.
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest `|tr ρ − 1|` of the raw samples, before projection.
    pub max_trace_drift: f64,
    /// Largest entrywise `|ρ − ρ†|` of the raw samples.
    pub max_hermitian_drift: f64,
}

/// Integrates `problem` and records the state nearest to each sample time.
pub fn integrate(problem: &EvolutionProblem, sample_times: &[f64]) -> Result<Trajectory> {
    problem.validate()?;
    if sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::OutOfRange("sample times must be ascending".into()));
    }
    if let Some(t) = sample_times.iter().find(|&&t| !(0.0..=problem.t_max * (1.0 + 1e-12)).contains(&t)) {
        return Err(Error::OutOfRange(format!("sample time {t} outside [0, {}]", problem.t_max)));
    }
    let mut rk = Rk4::for_problem(problem)?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(sample_times.len()),
        states: Vec::with_capacity(sample_times.len()),
        max_trace_drift: 0.0,
        max_hermitian_drift: 0.0,
    };
    for &t in sample_times {
        rk.advance_to(problem.steps_to(t));
        let raw = rk.state();
        traj.max_trace_drift = traj.max_trace_drift.max((raw.trace() - ONE).norm());
        traj.max_hermitian_drift = traj.max_hermitian_drift.max(raw.hermitian_deviation());
        traj.times.push(rk.time());
        traj.states.push(project_state(raw));
    }
    Ok(traj)
}

/// Spacing of the coarse scan used by [`esd_time`], in units of 1/γ.
const ESD_SCAN_SPACING: f64 = 0.01;

/// Earliest time after which the tripartite negativity stays below
/// `threshold` up to `t_max`, resolved to one integrator step.
///
/// Returns `None` when the negativity is still at or above the threshold
/// at `t_max`.
pub fn esd_time(problem: &EvolutionProblem, threshold: f64, t_max: f64) -> Result<Option<f64>> {
    problem.validate()?;
    if !(threshold > 0.0) {
        return Err(Error::OutOfRange(format!("ESD threshold must be positive, got {threshold}")));
    }
    let negativity = |raw: &ComplexMatrix| entangle::tripartite_negativity(&project_state(raw));
    let stride = ((ESD_SCAN_SPACING / problem.dt).round() as usize).max(1);
    let last = problem.steps_to(t_max);

    let mut rk = Rk4::for_problem(problem)?;
    // Most recent coarse sample with negativity >= threshold.
    let mut last_above: Option<(usize, ComplexMatrix)> = None;
    let mut checkpoints = vec![0];
    if negativity(rk.state())? >= threshold {
        last_above = Some((0, rk.state().clone()));
    }
    while rk.steps() < last {
        rk.advance_to((rk.steps() + stride).min(last));
        checkpoints.push(rk.steps());
        if negativity(rk.state())? >= threshold {
            last_above = Some((rk.steps(), rk.state().clone()));
        }
    }
    let Some((above_step, above_state)) = last_above else {
        return Ok(Some(0.0));
    };
    if above_step == last {
        return Ok(None);
    }
    let below_step = checkpoints.into_iter().find(|&k| k > above_step).expect("a later checkpoint exists");

    // Bisection on the step index inside (above_step, below_step].
    let (mut lo, mut hi) = (above_step, below_step);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        rk.reset(above_state.clone(), above_step);
        rk.advance_to(mid);
        if negativity(rk.state())? >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi as f64 * problem.dt))
}
