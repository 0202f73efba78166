use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tripneg::liouville::NoiseChannel;
use tripneg::noise::psd_value;
use tripneg::runner::{self, ConfigFile, CorrelationSelection, RunOutput, RunPlan, ScanKind, SvgKind, FIGURES};
use tripneg::Error;

#[derive(Parser, Debug)]
#[command(name = "tripneg", version, about = "Three-qubit entanglement under cross-correlated Markov noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one state at a single correlation point.
    Simulate(ScenarioArgs),
    /// Scan the P -> Q -> R -> S correlation path.
    ScanPath(ScenarioArgs),
    /// N_ABC(t_eval) of sqrt(1-p)|W> + sqrt(p)|GHZ> against p.
    ScanSuperposition {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Number of p values on [0, 1].
        #[arg(long)]
        p_samples: Option<usize>,
        /// Evaluation time in units of 1/gamma.
        #[arg(long)]
        t_eval: Option<f64>,
    },
    /// Check correlation triples against the positivity constraint.
    ValidateCorr {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// `a,b,c` absolute correlations or a named point; `;` separates several.
        #[arg(long)]
        corr: String,
    },
    /// Ensemble of stochastic trajectories at a single correlation point.
    Trajectories(ScenarioArgs),
    /// Regenerate the data behind one figure from its checked-in preset.
    Reproduce {
        /// One of fig3 .. fig10.
        figure: String,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        /// Override the preset's omega.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Override the preset's path sample count.
        #[arg(long)]
        path_samples: Option<usize>,
        /// Override the preset's time sample count.
        #[arg(long)]
        nsamples: Option<usize>,
    },
}

#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// Scenario file (flat TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ghz | w | ghzw:<p>
    #[arg(long)]
    state: Option<String>,
    #[arg(long, value_parser = parse_channel)]
    channel: Option<NoiseChannel>,
    #[arg(long)]
    gamma: Option<f64>,
    /// `a,b,c` absolute correlations or a named point (P, Q, R, S, O);
    /// `;` separates several.
    #[arg(long)]
    corr: Option<String>,
    #[arg(long)]
    path_samples: Option<usize>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of output time samples.
    #[arg(long)]
    nsamples: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    /// master | closedform | traj
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    ntraj: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output; printed to stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_parser = parse_svg_kind)]
    svg_kind: Option<SvgKind>,
    /// Column plotted in the SVG, e.g. N_ABC, N_A_BC, N_BC.
    #[arg(long)]
    quantity: Option<String>,
}

fn parse_channel(s: &str) -> Result<NoiseChannel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_svg_kind(s: &str) -> Result<SvgKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl ScenarioArgs {
    fn to_config(&self, scan: ScanKind) -> tripneg::Result<ConfigFile> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            scan: Some(scan),
            state: self.state.clone(),
            channel: self.channel,
            gamma: self.gamma,
            corr: self.corr.clone(),
            path_samples: self.path_samples,
            t_max: self.tmax,
            dt: self.dt,
            n_samples: self.nsamples,
            method: self.method.clone(),
            ntraj: self.ntraj,
            seed: self.seed,
            omega: self.omega,
            csv: self.csv.clone(),
            svg: self.svg.clone(),
            svg_kind: self.svg_kind,
            quantity: self.quantity.clone(),
            ..Default::default()
        };
        Ok(base.overlay(&flags))
    }
}

fn single_point(cfg: &ConfigFile) -> tripneg::Result<()> {
    match cfg.corr.as_deref() {
        None => Err(Error::Config("--corr is required for a single-point run".into())),
        Some(text) if text.split(';').filter(|s| !s.trim().is_empty()).count() != 1 => {
            Err(Error::Config("exactly one correlation point is expected".into()))
        }
        Some(_) => Ok(()),
    }
}

fn execute(plan: &RunPlan) -> tripneg::Result<()> {
    let output = plan.run()?;
    for path in plan.emit(&output)? {
        eprintln!("wrote {}", path.display());
    }
    if plan.csv.is_none() {
        let mut stdout = std::io::stdout().lock();
        let text = match &output {
            RunOutput::Grid(result) => runner::csv_string(result),
            RunOutput::Superposition(scan) => scan
                .points
                .iter()
                .zip(&scan.results)
                .map(|(p, r)| format!("# {}\n{}", p.label, runner::csv_string(r)))
                .collect(),
        };
        stdout.write_all(text.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?;
    }
    Ok(())
}

fn validate_corr(gamma: f64, text: &str) -> tripneg::Result<()> {
    let mut invalid = 0;
    let CorrelationSelection::Points(points) = CorrelationSelection::parse_points(text, gamma)? else {
        unreachable!("parse_points returns explicit points")
    };
    for (label, spec) in points {
        let verdict = match spec.validate() {
            Ok(()) => "valid".to_string(),
            Err(e) => {
                invalid += 1;
                format!("INVALID ({e})")
            }
        };
        println!("{label}: coords={:?} psd={:e} {verdict}", spec.coords(), psd_value(&spec));
    }
    if invalid > 0 {
        return Err(Error::InvalidCorrelation(format!("{invalid} of the given points violate the constraint")));
    }
    Ok(())
}

fn run(cli: Cli) -> tripneg::Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.to_config(ScanKind::Points)?;
            single_point(&cfg)?;
            execute(&cfg.resolve()?)
        }
        Command::Trajectories(args) => {
            let mut cfg = args.to_config(ScanKind::Points)?;
            single_point(&cfg)?;
            cfg.method = Some("traj".into());
            execute(&cfg.resolve()?)
        }
        Command::ScanPath(args) => execute(&args.to_config(ScanKind::Path)?.resolve()?),
        Command::ScanSuperposition { scenario, p_samples, t_eval } => {
            let mut cfg = scenario.to_config(ScanKind::Superposition)?;
            cfg.p_samples = p_samples.or(cfg.p_samples);
            cfg.t_eval = t_eval.or(cfg.t_eval);
            execute(&cfg.resolve()?)
        }
        Command::ValidateCorr { gamma, corr } => validate_corr(gamma, &corr),
        Command::Reproduce { figure, out_dir, omega, dt, path_samples, nsamples } => {
            let fig = runner::preset(&figure).ok_or_else(|| {
                let names: Vec<&str> = FIGURES.iter().map(|f| f.name).collect();
                Error::Config(format!("unknown figure {figure:?} (expected one of {})", names.join(", ")))
            })?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io { path: out_dir.clone(), source: e })?;
            let overrides = ConfigFile { omega, dt, path_samples, n_samples: nsamples, ..Default::default() };
            eprintln!("{}: {}", fig.name, fig.description);
            for (_, plan) in fig.plans(&out_dir, &overrides)? {
                execute(&plan)?;
            }
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidCorrelation(_) => 2,
        Error::Config(_) | Error::OutOfRange(_) | Error::InvalidState(_) | Error::EmptyGrid => 3,
        Error::Io { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
