//! Scenario orchestration: correlation points or paths × time grids,
//! evaluated by the master equation, the closed forms or trajectories.

mod config;
mod csv;
mod svg;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use config::{preset, ConfigFile, FigurePreset, RunOutput, RunPlan, ScanKind, DEFAULT_NTRAJ, FIGURES};
pub use csv::{csv_string, emit_csv, format_sig9, CSV_HEADER};
pub use svg::{emit_superposition_svg, emit_svg, emit_svg_quantity, Quantity, SvgKind};

use crate::closedform::{
    ghz_negativity_dephasing, w_bipartition_negativity_dephasing, w_pairwise_negativity_dephasing,
    w_tripartite_negativity_dephasing, DephasingParams,
};
use crate::entangle::{full_report, NegativityReport};
use crate::error::{Error, Result};
use crate::liouville::{integrate, EvolutionProblem, NoiseChannel, DEFAULT_DT};
use crate::noise::{path_grid, path_pqrs, CorrelationSpec, NamedPoint};
use crate::qmat::{DensityMatrix, Qubit};
use crate::states::{ghz_state, ghzw_superposition, w_state, SuperpositionSpec, SystemConfig};
use crate::unravel::{ensemble_path, NoiseSampler};

pub const DEFAULT_PATH_SAMPLES: usize = 41;
pub const DEFAULT_TIME_SAMPLES: usize = 201;
pub const DEFAULT_P_SAMPLES: usize = 41;
pub const DEFAULT_T_EVAL: f64 = 10.0;

/// Asymptote proxy: value at `ASYMPTOTE_T` counts as the long-time limit
/// when it differs from the value at `ASYMPTOTE_CHECK_T` by at most
/// `ASYMPTOTE_FLATNESS`.
pub const ASYMPTOTE_T: f64 = 20.0;
pub const ASYMPTOTE_CHECK_T: f64 = 15.0;
pub const ASYMPTOTE_FLATNESS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Ghz,
    W,
    /// `√(1−p)|W⟩ + √p|GHZ⟩`
    GhzW(f64),
}

impl InitialState {
    pub fn density(self) -> Result<DensityMatrix> {
        match self {
            InitialState::Ghz => Ok(ghz_state()),
            InitialState::W => Ok(w_state()),
            InitialState::GhzW(p) => ghzw_superposition(SuperpositionSpec::new(p)?),
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "ghz" => Ok(InitialState::Ghz),
            "w" => Ok(InitialState::W),
            _ => {
                let p = s
                    .strip_prefix("ghzw:")
                    .ok_or_else(|| Error::Config(format!("unknown state {s:?} (expected ghz, w or ghzw:<p>)")))?;
                let p: f64 = p.parse().map_err(|_| Error::Config(format!("bad superposition weight {p:?}")))?;
                SuperpositionSpec::new(p)?;
                Ok(InitialState::GhzW(p))
            }
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Ghz => write!(f, "ghz"),
            InitialState::W => write!(f, "w"),
            InitialState::GhzW(p) => write!(f, "ghzw:{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CorrelationSelection {
    /// Explicit correlation points, each with a display label.
    Points(Vec<(String, CorrelationSpec)>),
    /// Uniform samples of the PQRS path (plus the named points).
    Path { samples: usize, gamma: f64 },
}

impl CorrelationSelection {
    pub fn point(spec: CorrelationSpec) -> Self {
        CorrelationSelection::Points(vec![(format!("{spec}"), spec)])
    }

    pub fn named(points: &[NamedPoint], gamma: f64) -> Self {
        CorrelationSelection::Points(points.iter().map(|p| (p.to_string(), p.spec(gamma))).collect())
    }

    /// Parses `"a,b,c"` (absolute Γ values) or a named point, several
    /// separated by `;`.
    pub fn parse_points(text: &str, gamma: f64) -> Result<Self> {
        let mut points = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Ok(named) = item.parse::<NamedPoint>() {
                points.push((named.to_string(), named.spec(gamma)));
                continue;
            }
            let vals: Vec<f64> = item
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config(format!("bad correlation triple {item:?}")))?;
            let [ab, ac, bc] = vals[..] else {
                return Err(Error::Config(format!("correlation triple needs three values, got {item:?}")));
            };
            let spec = CorrelationSpec::new(gamma, ab, ac, bc);
            points.push((format!("({ab}, {ac}, {bc})"), spec));
        }
        if points.is_empty() {
            return Err(Error::Config("empty correlation list".into()));
        }
        Ok(CorrelationSelection::Points(points))
    }

    fn axis(&self) -> Result<(AxisKind, Vec<AxisPoint>)> {
        match self {
            CorrelationSelection::Points(points) => Ok((
                AxisKind::Point,
                points
                    .iter()
                    .enumerate()
                    .map(|(k, (label, corr))| AxisPoint { value: k as f64, label: label.clone(), corr: *corr })
                    .collect(),
            )),
            CorrelationSelection::Path { samples, gamma } => {
                let points = path_grid(*samples)
                    .into_iter()
                    .map(|s| {
                        let pp = path_pqrs(s)?;
                        let label = NamedPoint::ALL
                            .iter()
                            .find(|n| n.path_s() == Some(s))
                            .map_or_else(|| format!("s={s:.4}"), |n| n.to_string());
                        Ok(AxisPoint { value: s, label, corr: pp.spec(*gamma) })
                    })
                    .collect::<Result<_>>()?;
                Ok((AxisKind::Path, points))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Master,
    ClosedForm,
    Trajectories { n: usize, seed: u64 },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Master => write!(f, "master"),
            Method::ClosedForm => write!(f, "closedform"),
            Method::Trajectories { n, seed } => write!(f, "traj(n={n}, seed={seed})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_samples: usize) -> Self {
        Self { t_max, dt: DEFAULT_DT, n_samples }
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.n_samples;
        (0..n).map(|k| self.t_max * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub state: InitialState,
    pub channel: NoiseChannel,
    pub correlation: CorrelationSelection,
    pub time: TimeGrid,
    pub method: Method,
    pub omega: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.time.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.time.dt)));
        }
        if !(self.time.t_max >= 0.0) || !self.time.t_max.is_finite() {
            return Err(Error::Config(format!("t_max must be >= 0, got {}", self.time.t_max)));
        }
        if self.time.n_samples < 2 {
            return Err(Error::Config(format!("need at least 2 time samples, got {}", self.time.n_samples)));
        }
        SystemConfig::with_omega(self.omega).validate().map_err(|e| Error::Config(e.to_string()))?;
        match &self.correlation {
            CorrelationSelection::Points(points) => {
                if points.is_empty() {
                    return Err(Error::Config("no correlation points".into()));
                }
                for (_, spec) in points {
                    spec.validate()?;
                }
            }
            CorrelationSelection::Path { samples, gamma } => {
                CorrelationSpec::uncorrelated(*gamma).validate()?;
                if *samples < 2 {
                    return Err(Error::Config(format!("need at least 2 path samples, got {samples}")));
                }
            }
        }
        if let Method::Trajectories { n, .. } = self.method {
            if n == 0 {
                return Err(Error::Config("trajectory count must be positive".into()));
            }
        }
        if self.method == Method::ClosedForm {
            if self.channel != NoiseChannel::Dephasing {
                return Err(Error::Config("closed forms exist only for dephasing noise".into()));
            }
            if matches!(self.state, InitialState::GhzW(_)) {
                return Err(Error::Config("closed forms exist only for the GHZ and W states".into()));
            }
        }
        Ok(())
    }

    fn problem(&self, corr: CorrelationSpec, rho0: DensityMatrix, t_max: f64) -> Result<EvolutionProblem> {
        EvolutionProblem::new(SystemConfig::with_omega(self.omega), self.channel, corr, rho0, t_max, self.time.dt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisKind {
    /// Path parameter `s`.
    Path,
    /// Index into an explicit list of correlation points.
    Point,
    /// GHZ weight `p`.
    Superposition,
}

impl AxisKind {
    pub fn label(self) -> &'static str {
        match self {
            AxisKind::Path => "path parameter s (P → Q → R → S)",
            AxisKind::Point => "correlation point",
            AxisKind::Superposition => "GHZ weight p",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisPoint {
    pub value: f64,
    pub label: String,
    pub corr: CorrelationSpec,
}

/// Grid of negativity reports: `cells[axis][time]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub kind: AxisKind,
    pub axis: Vec<AxisPoint>,
    pub times: Vec<f64>,
    pub cells: Vec<Vec<NegativityReport>>,
}

impl ScanResult {
    pub fn is_empty(&self) -> bool {
        self.axis.is_empty() || self.times.is_empty()
    }

    /// Sub-result restricted to the given axis indices.
    pub fn select(&self, indices: &[usize]) -> ScanResult {
        ScanResult {
            kind: self.kind,
            axis: indices.iter().map(|&k| self.axis[k].clone()).collect(),
            times: self.times.clone(),
            cells: indices.iter().map(|&k| self.cells[k].clone()).collect(),
        }
    }

    /// Index of the axis entry closest to `value`.
    pub fn axis_index(&self, value: f64) -> Option<usize> {
        self.axis
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.value - value).abs().total_cmp(&(b.1.value - value).abs()))
            .map(|(k, _)| k)
    }
}

fn closed_form_report(state: InitialState, corr: &CorrelationSpec, t: f64) -> NegativityReport {
    let p = DephasingParams::new(corr.gamma, [corr.gamma_ab, corr.gamma_ac, corr.gamma_bc], t);
    match state {
        InitialState::Ghz => {
            let n = ghz_negativity_dephasing(&p);
            NegativityReport { t, n_tri: n, n_bipart: [n; 3], n_pair: [0.0; 3] }
        }
        InitialState::W => NegativityReport {
            t,
            n_tri: w_tripartite_negativity_dephasing(&p),
            n_bipart: [Qubit::A, Qubit::B, Qubit::C].map(|q| w_bipartition_negativity_dephasing(&p, q)),
            n_pair: NegativityReport::PAIRS.map(|(i, j)| w_pairwise_negativity_dephasing(&p, i, j)),
        },
        InitialState::GhzW(_) => unreachable!("rejected by validate"),
    }
}

/// Reports at `times` for one correlation point.
fn evaluate_point(cfg: &ScenarioConfig, state: InitialState, corr: CorrelationSpec, times: &[f64]) -> Result<Vec<NegativityReport>> {
    let t_max = times.last().copied().unwrap_or(0.0);
    match cfg.method {
        Method::ClosedForm => Ok(times.iter().map(|&t| closed_form_report(state, &corr, t)).collect()),
        Method::Master => {
            let traj = integrate(&cfg.problem(corr, state.density()?, t_max)?, times)?;
            times.iter().zip(&traj.states).map(|(&t, rho)| full_report(rho, t)).collect()
        }
        Method::Trajectories { n, seed } => {
            let problem = cfg.problem(corr, state.density()?, t_max)?;
            let sampler = NoiseSampler::new(corr)?;
            let ens = ensemble_path(&problem, &sampler, n, seed, times)?;
            times.iter().zip(&ens).map(|(&t, e)| full_report(&e.mean_rho, t)).collect()
        }
    }
}

/// Full negativity report at every (correlation point, sample time).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let (kind, axis) = cfg.correlation.axis()?;
    let times = cfg.time.times();
    let cells = axis
        .par_iter()
        .map(|a| evaluate_point(cfg, cfg.state, a.corr, &times))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { kind, axis, times, cells })
}

/// One p-scan per correlation point, all at the same evaluation time.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionScan {
    pub points: Vec<AxisPoint>,
    pub t_eval: f64,
    /// `results[k]` scans `p` at `points[k]`.
    pub results: Vec<ScanResult>,
}

impl SuperpositionScan {
    /// Tripartite negativity at `(point, p-index)`.
    pub fn n_tri(&self, point: usize, p_index: usize) -> f64 {
        self.results[point].cells[p_index][0].n_tri
    }
}

pub fn p_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

/// `N_ABC(t_eval)` of `√(1−p)|W⟩ + √p|GHZ⟩` for each `p` and correlation
/// point. The state in `cfg` is ignored; the master equation is used
/// unless trajectories are requested.
pub fn run_superposition_scan(cfg: &ScenarioConfig, p_values: &[f64], t_eval: f64) -> Result<SuperpositionScan> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Config(format!("superposition weight {p} outside [0, 1]")));
    }
    if !(t_eval >= 0.0) {
        return Err(Error::Config(format!("evaluation time must be >= 0, got {t_eval}")));
    }
    let mut cfg = cfg.clone();
    cfg.state = InitialState::GhzW(0.0);
    if cfg.method == Method::ClosedForm {
        return Err(Error::Config("closed forms are unavailable for superposition states".into()));
    }
    cfg.validate()?;
    let (_, points) = cfg.correlation.axis()?;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|a| (0..p_values.len()).map(move |k| (a, k))).collect();
    let reports = jobs
        .par_iter()
        .map(|&(a, k)| {
            let state = InitialState::GhzW(p_values[k]);
            Ok(evaluate_point(&cfg, state, points[a].corr, &[t_eval])?.remove(0))
        })
        .collect::<Result<Vec<NegativityReport>>>()?;

    let results = points
        .iter()
        .enumerate()
        .map(|(a, point)| ScanResult {
            kind: AxisKind::Superposition,
            axis: p_values
                .iter()
                .map(|&p| AxisPoint { value: p, label: format!("p={p}"), corr: point.corr })
                .collect(),
            times: vec![reports[a * p_values.len()].t],
            cells: (0..p_values.len()).map(|k| vec![reports[a * p_values.len() + k]]).collect(),
        })
        .collect();
    Ok(SuperpositionScan { points, t_eval, results })
}

/// Long-time value of `N_ABC` with a flatness verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    pub check_value: f64,
    pub flat: bool,
}

/// `N_ABC` at `ASYMPTOTE_T`, reported flat when within
/// `ASYMPTOTE_FLATNESS` of its value at `ASYMPTOTE_CHECK_T`.
pub fn estimate_asymptote(
    state: InitialState,
    channel: NoiseChannel,
    corr: CorrelationSpec,
    omega: f64,
    dt: f64,
) -> Result<Asymptote> {
    let problem = EvolutionProblem::new(SystemConfig::with_omega(omega), channel, corr, state.density()?, ASYMPTOTE_T, dt)?;
    let traj = integrate(&problem, &[ASYMPTOTE_CHECK_T, ASYMPTOTE_T])?;
    let check_value = crate::entangle::tripartite_negativity(&traj.states[0])?;
    let value = crate::entangle::tripartite_negativity(&traj.states[1])?;
    Ok(Asymptote { value, check_value, flat: (value - check_value).abs() <= ASYMPTOTE_FLATNESS })
}
