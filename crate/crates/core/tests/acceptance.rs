//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (with indented detail lines), and exits non-zero if any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tripneg::closedform::{
    ghz_negativity_dephasing, w_bipartition_negativity_dephasing, w_tripartite_negativity_dephasing, DephasingParams,
};
use tripneg::entangle::{full_report, NegativityReport};
use tripneg::liouville::{esd_time, integrate, EvolutionProblem, NoiseChannel, Rk4, DEFAULT_DT, DEFAULT_ESD_THRESHOLD};
use tripneg::noise::{path_pqrs, psd_value, CorrelationSpec, NamedPoint};
use tripneg::qmat::{hermitian_eigenvalues, kron, ComplexMatrix, DensityMatrix, Qubit, C64};
use tripneg::runner::{
    estimate_asymptote, p_grid, run_superposition_scan, CorrelationSelection, InitialState, Method, ScenarioConfig,
    TimeGrid, DEFAULT_P_SAMPLES,
};
use tripneg::states::{ghz_state, ghzw_superposition, w_state, SuperpositionSpec, SystemConfig};
use tripneg::unravel::ensemble_average;

const W0: f64 = 0.942_809_041_582_063_4;
const PATH_S: [f64; 9] = [0.0, 1.0 / 7.0, 2.0 / 7.0, 3.0 / 7.0, 4.0 / 7.0, 5.0 / 7.0, 6.0 / 7.0, 13.0 / 14.0, 1.0];
const ORACLE_TIMES: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];
const ASYMPTOTE_TARGET: f64 = 0.3802;
const ASYMPTOTE_BAND: f64 = 0.01;
const OMEGA_CANDIDATES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

type Outcome = Result<(bool, Vec<String>), tripneg::Error>;

fn problem(channel: NoiseChannel, corr: CorrelationSpec, rho0: DensityMatrix, omega: f64, t_max: f64) -> EvolutionProblem {
    EvolutionProblem::new(SystemConfig::with_omega(omega), channel, corr, rho0, t_max, DEFAULT_DT).expect("valid problem")
}

fn rel_err(x: f64, reference: f64) -> f64 {
    if reference == 0.0 { x.abs() } else { (x - reference).abs() / reference.abs() }
}

fn params(corr: &CorrelationSpec, t: f64) -> DephasingParams {
    DephasingParams::new(corr.gamma, [corr.gamma_ab, corr.gamma_ac, corr.gamma_bc], t)
}

fn dephasing_reports(rho0: DensityMatrix, corr: CorrelationSpec) -> Result<Vec<NegativityReport>, tripneg::Error> {
    let traj = integrate(&problem(NoiseChannel::Dephasing, corr, rho0, 0.0, 2.0), &ORACLE_TIMES)?;
    traj.states.iter().zip(ORACLE_TIMES).map(|(rho, t)| full_report(rho, t)).collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in PATH_S {
        let corr = path_pqrs(s)?.spec(1.0);
        for r in dephasing_reports(ghz_state(), corr)? {
            let exact = ghz_negativity_dephasing(&params(&corr, r.t));
            worst = worst.max(rel_err(r.n_tri, exact));
            for b in r.n_bipart {
                worst = worst.max(rel_err(b, exact));
            }
        }
    }
    Ok((worst <= 1e-6, vec![format!("max relative error {worst:.3e} over 9 path points x 5 times (tol 1e-6)")]))
}

fn criterion_2() -> Outcome {
    let (mut worst_bi, mut worst_tri): (f64, f64) = (0.0, 0.0);
    for s in PATH_S {
        let corr = path_pqrs(s)?.spec(1.0);
        for r in dephasing_reports(w_state(), corr)? {
            let p = params(&corr, r.t);
            worst_tri = worst_tri.max(rel_err(r.n_tri, w_tripartite_negativity_dephasing(&p)));
            for (k, q) in [Qubit::A, Qubit::B, Qubit::C].into_iter().enumerate() {
                worst_bi = worst_bi.max(rel_err(r.n_bipart[k], w_bipartition_negativity_dephasing(&p, q)));
            }
        }
    }
    Ok((
        worst_bi <= 1e-6 && worst_tri <= 1e-6,
        vec![format!("max relative error: bipartitions {worst_bi:.3e}, tripartite {worst_tri:.3e} (tol 1e-6)")],
    ))
}

fn preservation(rho0: DensityMatrix, point: NamedPoint, target: f64) -> Outcome {
    let times: Vec<f64> = (0..=500).map(|k| k as f64 * 0.01).collect();
    let traj = integrate(&problem(NoiseChannel::Dephasing, point.spec(1.0), rho0, 0.0, 5.0), &times)?;
    let mut worst: f64 = 0.0;
    for (rho, t) in traj.states.iter().zip(&times) {
        worst = worst.max((full_report(rho, *t)?.n_tri - target).abs());
    }
    Ok((worst <= 1e-8, vec![format!("max |N_ABC - {target:.10}| = {worst:.3e} on 501 times in [0, 5] (tol 1e-8)")]))
}

fn fmt_esd(t: Option<f64>) -> String {
    t.map_or("none".into(), |t| format!("{t:.3}"))
}

fn ghz_amplitude_esd(omega: f64) -> Result<(bool, Vec<String>), tripneg::Error> {
    let mut lines = Vec::new();
    let mut all_finite = true;
    let mut times = Vec::new();
    for s in PATH_S {
        let pr = problem(NoiseChannel::Amplitude, path_pqrs(s)?.spec(1.0), ghz_state(), omega, 5.0);
        let t = esd_time(&pr, DEFAULT_ESD_THRESHOLD, 5.0)?;
        all_finite &= t.is_some();
        times.push(format!("s={s:.4}: {}", fmt_esd(t)));
    }
    let esd = |p: NamedPoint| esd_time(&problem(NoiseChannel::Amplitude, p.spec(1.0), ghz_state(), omega, 5.0), DEFAULT_ESD_THRESHOLD, 5.0);
    let (q, r, o) = (esd(NamedPoint::Q)?, esd(NamedPoint::R)?, esd(NamedPoint::Origin)?);
    let delayed = matches!((q, r, o), (Some(q), Some(r), Some(o)) if q > o && r > o);
    lines.push(format!("omega={omega}: ESD times {}", times.join(", ")));
    lines.push(format!("omega={omega}: ESD at Q={}, R={}, origin={}", fmt_esd(q), fmt_esd(r), fmt_esd(o)));
    Ok((all_finite && delayed, lines))
}

struct Calibration {
    omega: Option<f64>,
    lines: Vec<String>,
    asymptote_ok: bool,
}

/// Tries the candidate ω values in order and keeps the first whose W
/// asymptote at R lands in the target band.
fn calibrate_omega() -> Result<Calibration, tripneg::Error> {
    let mut lines = Vec::new();
    for omega in OMEGA_CANDIDATES {
        let a = estimate_asymptote(InitialState::W, NoiseChannel::Amplitude, NamedPoint::R.spec(1.0), omega, DEFAULT_DT)?;
        let in_band = (a.value - ASYMPTOTE_TARGET).abs() <= ASYMPTOTE_BAND;
        lines.push(format!(
            "omega={omega}: N_ABC(20)={:.5}, N_ABC(15)={:.5}, flat={}, in band {ASYMPTOTE_TARGET}±{ASYMPTOTE_BAND}: {in_band}",
            a.value, a.check_value, a.flat
        ));
        if in_band && a.flat {
            return Ok(Calibration { omega: Some(omega), lines, asymptote_ok: a.value > 0.0 });
        }
    }
    Ok(Calibration { omega: None, lines, asymptote_ok: false })
}

fn criterion_6(cal: &Calibration) -> Outcome {
    let mut lines = cal.lines.clone();
    let Some(omega) = cal.omega else {
        lines.push("no candidate omega reproduces the asymptote".into());
        return Ok((false, lines));
    };
    if omega != 0.0 {
        lines.push(format!("omega=0 misses the band; contingency selects omega={omega}"));
    }
    let mut esd_ok = true;
    for p in [NamedPoint::P, NamedPoint::Q, NamedPoint::S, NamedPoint::Origin] {
        let t = esd_time(&problem(NoiseChannel::Amplitude, p.spec(1.0), w_state(), omega, 20.0), DEFAULT_ESD_THRESHOLD, 20.0)?;
        esd_ok &= t.is_some();
        lines.push(format!("omega={omega}: W ESD at {p} (t <= 20): {}", fmt_esd(t)));
    }
    let r = esd_time(&problem(NoiseChannel::Amplitude, NamedPoint::R.spec(1.0), w_state(), omega, 20.0), DEFAULT_ESD_THRESHOLD, 20.0)?;
    lines.push(format!("omega={omega}: W ESD at R (t <= 20): {}", fmt_esd(r)));
    Ok((cal.asymptote_ok && esd_ok && r.is_none(), lines))
}

fn criterion_7() -> Outcome {
    let seeds = [0u64, 1, 2, 3];
    let tol = 5.0 / 2000f64.sqrt();
    let mut lines = Vec::new();
    let mut ok = true;
    let cases = [
        ("GHZ/dephasing/Q", NoiseChannel::Dephasing, NamedPoint::Q, ghz_state()),
        ("W/amplitude/origin", NoiseChannel::Amplitude, NamedPoint::Origin, w_state()),
    ];
    for (name, channel, point, rho0) in cases {
        let pr = problem(channel, point.spec(1.0), rho0, 0.0, 1.0);
        let exact = integrate(&pr, &[1.0])?.states.remove(0);
        let mut rms = Vec::new();
        for m in [500usize, 2000, 8000] {
            let errs: Vec<f64> = seeds
                .iter()
                .map(|&seed| {
                    let ens = ensemble_average(&pr, m, seed, 1.0)?;
                    Ok((ens.mean_rho.matrix() - exact.matrix()).frobenius_norm())
                })
                .collect::<Result<_, tripneg::Error>>()?;
            if m == 2000 {
                let worst = errs.iter().copied().fold(0.0, f64::max);
                ok &= worst <= tol;
                lines.push(format!("{name}: M=2000 Frobenius errors {errs:.4?} (tol {tol:.4})"));
            }
            rms.push((errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt());
        }
        let ratios = [rms[0] / rms[1], rms[1] / rms[2]];
        let scaling_ok = ratios.iter().all(|r| (1.0..=4.0).contains(r));
        ok &= scaling_ok;
        lines.push(format!(
            "{name}: RMS error over {} seeds at M=500/2000/8000 = {:.4}/{:.4}/{:.4}; ratios {:.2}, {:.2} (expect 2, within x2)",
            seeds.len(), rms[0], rms[1], rms[2], ratios[0], ratios[1]
        ));
    }
    Ok((ok, lines))
}

/// 3×3 determinant by Gaussian elimination with partial pivoting.
fn det_oracle(mut m: [[f64; 3]; 3]) -> f64 {
    let mut det = 1.0;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

fn criterion_8() -> Outcome {
    let mut worst_path: f64 = 0.0;
    let n = 10_001;
    for k in 0..n {
        let s = k as f64 / (n - 1) as f64;
        worst_path = worst_path.max(psd_value(&path_pqrs(s)?.spec(1.0)).abs());
    }
    for gamma in [0.5, 2.0] {
        for s in PATH_S {
            let v = psd_value(&path_pqrs(s)?.spec(gamma)).abs() / gamma.powi(3);
            worst_path = worst_path.max(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..10_000 {
        let gamma = 2.0 * (1.0 - rng.random::<f64>());
        let mut pick = || gamma * rng.random_range(-1.0..=1.0);
        let spec = CorrelationSpec::new(gamma, pick(), pick(), pick());
        worst_oracle = worst_oracle.max((psd_value(&spec) - det_oracle(spec.covariance())).abs());
    }
    Ok((
        worst_path <= 1e-12 && worst_oracle <= 1e-12,
        vec![
            format!("max |psd_value|/gamma^3 on the path: {worst_path:.3e} (tol 1e-12)"),
            format!("max |psd_value - det oracle| on 10^4 random specs, gamma in (0, 2]: {worst_oracle:.3e} (tol 1e-12)"),
        ],
    ))
}

fn superposition_cfg(channel: NoiseChannel, points: &[NamedPoint], omega: f64) -> ScenarioConfig {
    ScenarioConfig {
        state: InitialState::GhzW(0.0),
        channel,
        correlation: CorrelationSelection::named(points, 1.0),
        time: TimeGrid::new(10.0, 2),
        method: Method::Master,
        omega,
    }
}

fn criterion_9() -> Outcome {
    let ps = p_grid(DEFAULT_P_SAMPLES);
    let last = ps.len() - 1;
    let points = [NamedPoint::S, NamedPoint::Q, NamedPoint::R];
    let scan = run_superposition_scan(&superposition_cfg(NoiseChannel::Dephasing, &points, 0.0), &ps, 10.0)?;
    let ghz_s = scan.n_tri(0, last);
    let ghz_s_exact = ghz_negativity_dephasing(&params(&NamedPoint::S.spec(1.0), 10.0));
    let w_q = scan.n_tri(1, 0);
    let w_q_exact = w_tripartite_negativity_dephasing(&params(&NamedPoint::Q.spec(1.0), 10.0));
    let (k_max, interior_max) =
        (1..last).map(|k| (k, scan.n_tri(2, k))).max_by(|a, b| a.1.total_cmp(&b.1)).expect("interior points");
    let (r0, r1) = (scan.n_tri(2, 0), scan.n_tri(2, last));
    let endpoints_ok = (ghz_s - ghz_s_exact).abs() <= 1e-6 && (w_q - w_q_exact).abs() <= 1e-6 && ghz_s > 0.0 && w_q > 0.0;
    Ok((
        endpoints_ok && interior_max > r0 && interior_max > r1,
        vec![
            format!("GHZ endpoint (p=1) at S: {ghz_s:.9} vs {ghz_s_exact:.9}"),
            format!("W endpoint (p=0) at Q: {w_q:.9} vs {w_q_exact:.9}"),
            format!("R: interior max {interior_max:.4e} at p={}, endpoints p=0: {r0:.3e}, p=1: {r1:.3e}", ps[k_max]),
        ],
    ))
}

fn criterion_10(omega: f64) -> Outcome {
    let ps = p_grid(DEFAULT_P_SAMPLES);
    let last = ps.len() - 1;
    let scan = run_superposition_scan(&superposition_cfg(NoiseChannel::Amplitude, &[NamedPoint::R], omega), &ps, 10.0)?;
    let values: Vec<f64> = (0..ps.len()).map(|k| scan.n_tri(0, k)).collect();
    let survive = |v: f64| v >= 1e-3;
    let threshold = ps.iter().zip(&values).take_while(|(_, v)| survive(**v)).last().map(|(p, _)| *p);
    Ok((
        survive(values[0]) && values[last] < 1e-3,
        vec![
            format!("omega={omega}: W endpoint (p=0) N_ABC(10)={:.5}, GHZ endpoint (p=1) N_ABC(10)={:.3e}", values[0], values[last]),
            format!(
                "survival (N_ABC >= 1e-3) holds for p <= {} on the 41-point grid (reported, not asserted)",
                threshold.map_or("none".into(), |p| format!("{p}"))
            ),
        ],
    ))
}

fn criterion_11() -> Outcome {
    let mut lines = Vec::new();
    let times: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
    let (mut trace, mut herm, mut min_eig, mut sym): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for channel in [NoiseChannel::Dephasing, NoiseChannel::Amplitude] {
        for s in PATH_S {
            let corr = path_pqrs(s)?.spec(1.0);
            for rho0 in [ghz_state(), w_state(), ghzw_superposition(SuperpositionSpec::new(0.5)?)?] {
                let traj = integrate(&problem(channel, corr, rho0, 0.5, 5.0), &times)?;
                trace = trace.max(traj.max_trace_drift);
                herm = herm.max(traj.max_hermitian_drift);
                for rho in &traj.states {
                    min_eig = min_eig.min(hermitian_eigenvalues(rho.matrix())?[0]);
                    let r = full_report(rho, 0.0)?;
                    sym = sym.max((r.n_bipart[1] - r.n_bipart[2]).abs()).max((r.n_pair[0] - r.n_pair[1]).abs());
                }
            }
        }
    }
    lines.push(format!("trace drift {trace:.2e} (tol 1e-10), Hermiticity drift {herm:.2e} (tol 1e-10), min eigenvalue {min_eig:.2e} (tol -1e-8)"));
    lines.push(format!("Gamma_AB=Gamma_AC identities: max |N_B|AC - N_C|AB|, |N_A|B - N_A|C| = {sym:.2e} (tol 1e-8)"));

    let mut ratios = Vec::new();
    for channel in [NoiseChannel::Dephasing, NoiseChannel::Amplitude] {
        let at = |dt: f64| -> Result<ComplexMatrix, tripneg::Error> {
            let p = EvolutionProblem::new(SystemConfig::with_omega(1.0), channel, CorrelationSpec::new(1.0, 0.3, -0.2, 0.1), w_state(), 1.0, dt)?;
            let mut rk = Rk4::for_problem(&p)?;
            rk.advance_to(p.steps_to(1.0));
            Ok(rk.state().clone())
        };
        let (a, b, c) = (at(0.04)?, at(0.02)?, at(0.01)?);
        ratios.push((&a - &b).frobenius_norm() / (&b - &c).frobenius_norm());
    }
    let order_ok = ratios.iter().all(|r| (14.0..=18.0).contains(r));
    lines.push(format!("RK4 step-halving error ratios at t=1: {:.2} (dephasing), {:.2} (amplitude); order 4 expects 16", ratios[0], ratios[1]));

    let rz = |theta: f64| ComplexMatrix::diagonal(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)]);
    let id = ComplexMatrix::identity(2);
    let mut lu: f64 = 0.0;
    let evolved = integrate(
        &problem(NoiseChannel::Amplitude, NamedPoint::R.spec(1.0), ghzw_superposition(SuperpositionSpec::new(0.4)?)?, 0.5, 1.0),
        &[1.0],
    )?
    .states
    .remove(0);
    for rho in [ghz_state(), w_state(), evolved] {
        let base = full_report(&rho, 0.0)?;
        for theta in [0.3, 1.0, 2.5] {
            for q in 0..3 {
                let u = rz(theta);
                let ops: Vec<&ComplexMatrix> = (0..3).map(|k| if k == q { &u } else { &id }).collect();
                let big = kron(&kron(ops[0], ops[1]), ops[2]);
                let rotated = DensityMatrix::from_matrix_unchecked(big.matmul(rho.matrix()).matmul(&big.dagger()));
                let r = full_report(&rotated, 0.0)?;
                let pairs = [(r.n_tri, base.n_tri)]
                    .into_iter()
                    .chain(r.n_bipart.into_iter().zip(base.n_bipart))
                    .chain(r.n_pair.into_iter().zip(base.n_pair));
                for (x, y) in pairs {
                    lu = lu.max((x - y).abs());
                }
            }
        }
    }
    lines.push(format!("local-unitary invariance: max change {lu:.2e} (tol 1e-10)"));

    let ok = trace <= 1e-10 && herm <= 1e-10 && min_eig >= -1e-8 && sym <= 1e-8 && order_ok && lu <= 1e-10;
    Ok((ok, lines))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome, started: Instant| {
        let (pass, lines) = outcome.unwrap_or_else(|e| (false, vec![format!("error: {e}")]));
        if !pass {
            failures += 1;
        }
        println!("[{}] {id:>2}. {name} ({:.1}s)", if pass { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64());
        for line in lines {
            println!("         {line}");
        }
    };

    let t = Instant::now();
    report(1, "Dephasing GHZ oracle equivalence", criterion_1(), t);
    let t = Instant::now();
    report(2, "Dephasing W oracle equivalence", criterion_2(), t);
    let t = Instant::now();
    report(3, "Full preservation at S (GHZ, dephasing)", preservation(ghz_state(), NamedPoint::S, 1.0), t);
    let t = Instant::now();
    report(4, "Full preservation at Q (W, dephasing)", preservation(w_state(), NamedPoint::Q, W0), t);

    // The amplitude criteria share the ω chosen by the asymptote calibration.
    let t = Instant::now();
    let cal = calibrate_omega();
    let omega = cal.as_ref().ok().and_then(|c| c.omega);
    let t5 = Instant::now();
    let outcome5 = match omega {
        Some(omega) => ghz_amplitude_esd(0.0).and_then(|(pass0, mut lines0)| {
            lines0.iter_mut().for_each(|l| l.insert_str(0, "(record) "));
            lines0.push(format!("(record) criterion holds at omega=0: {pass0}"));
            if omega == 0.0 {
                return Ok((pass0, lines0));
            }
            let (pass, lines) = ghz_amplitude_esd(omega)?;
            Ok((pass, lines0.into_iter().chain(lines).collect()))
        }),
        None => Ok((false, vec!["no calibrated omega available".into()])),
    };
    report(5, "Amplitude-noise GHZ ESD", outcome5, t5);
    let outcome6 = cal.and_then(|c| criterion_6(&c));
    report(6, "W amplitude-noise asymptote at R", outcome6, t);

    let t = Instant::now();
    report(7, "Trajectory-master consistency", criterion_7(), t);
    let t = Instant::now();
    report(8, "Correlation geometry", criterion_8(), t);
    let t = Instant::now();
    report(9, "Superposition scan (dephasing, t=10)", criterion_9(), t);
    let t = Instant::now();
    let outcome10 = match omega {
        Some(omega) => criterion_10(omega),
        None => Ok((false, vec!["no calibrated omega available".into()])),
    };
    report(10, "Superposition scan (amplitude, t=10, R)", outcome10, t);
    let t = Instant::now();
    report(11, "Invariant suite", criterion_11(), t);

    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
