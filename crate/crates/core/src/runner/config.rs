use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    emit_csv, emit_superposition_svg, emit_svg_quantity, p_grid, run_scenario, run_superposition_scan,
    CorrelationSelection, InitialState, Method, Quantity, ScanResult, ScenarioConfig, SuperpositionScan, SvgKind,
    TimeGrid, DEFAULT_PATH_SAMPLES, DEFAULT_P_SAMPLES, DEFAULT_TIME_SAMPLES, DEFAULT_T_EVAL,
};
use crate::error::{Error, Result};
use crate::liouville::{NoiseChannel, DEFAULT_DT};
use crate::noise::NamedPoint;

pub const DEFAULT_NTRAJ: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// Explicit correlation point(s) × time.
    Points,
    /// PQRS path × time.
    Path,
    /// GHZ weight `p` at a fixed time, per correlation point.
    Superposition,
}

/// Flat key-value scenario file. Every field is optional; unset fields
/// take their defaults when the file is resolved.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scan: Option<ScanKind>,
    pub state: Option<String>,
    pub channel: Option<NoiseChannel>,
    pub gamma: Option<f64>,
    /// `"a,b,c"` absolute correlations or a named point, `;`-separated.
    pub corr: Option<String>,
    pub path_samples: Option<usize>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub n_samples: Option<usize>,
    pub method: Option<String>,
    pub ntraj: Option<usize>,
    pub seed: Option<u64>,
    pub omega: Option<f64>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub svg_kind: Option<SvgKind>,
    pub quantity: Option<String>,
    pub p_samples: Option<usize>,
    pub t_eval: Option<f64>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &ConfigFile) -> Self {
        let base = &mut self;
        overlay_fields!(base, top; scan, state, channel, gamma, corr, path_samples, t_max, dt, n_samples,
            method, ntraj, seed, omega, csv, svg, svg_kind, quantity, p_samples, t_eval);
        self
    }

    pub fn resolve(&self) -> Result<RunPlan> {
        let channel = self.channel.unwrap_or(NoiseChannel::Dephasing);
        let gamma = self.gamma.unwrap_or(1.0);
        let scan = self.scan.unwrap_or(if self.corr.is_some() { ScanKind::Points } else { ScanKind::Path });
        let correlation = match (scan, &self.corr) {
            (ScanKind::Path, _) => {
                CorrelationSelection::Path { samples: self.path_samples.unwrap_or(DEFAULT_PATH_SAMPLES), gamma }
            }
            (_, Some(text)) => CorrelationSelection::parse_points(text, gamma)?,
            (ScanKind::Points, None) => return Err(Error::Config("a point scan needs `corr`".into())),
            (ScanKind::Superposition, None) => CorrelationSelection::named(&NamedPoint::ALL, gamma),
        };
        let default_t_max = match channel {
            NoiseChannel::Dephasing => 2.0,
            NoiseChannel::Amplitude => 5.0,
        };
        let method = match self.method.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None | Some("master") => Method::Master,
            Some("closedform") | Some("closed-form") => Method::ClosedForm,
            Some("traj") | Some("trajectories") => {
                Method::Trajectories { n: self.ntraj.unwrap_or(DEFAULT_NTRAJ), seed: self.seed.unwrap_or(0) }
            }
            Some(other) => return Err(Error::Config(format!("unknown method {other:?}"))),
        };
        let state = match scan {
            ScanKind::Superposition => InitialState::GhzW(0.0),
            _ => self.state.as_deref().unwrap_or("ghz").parse()?,
        };
        let scenario = ScenarioConfig {
            state,
            channel,
            correlation,
            time: TimeGrid {
                t_max: self.t_max.unwrap_or(default_t_max),
                dt: self.dt.unwrap_or(DEFAULT_DT),
                n_samples: self.n_samples.unwrap_or(DEFAULT_TIME_SAMPLES),
            },
            method,
            omega: self.omega.unwrap_or(0.0),
        };
        let quantity = self.quantity.as_deref().map(str::parse).transpose()?.unwrap_or(Quantity::Tri);
        let svg_kind = self.svg_kind.unwrap_or(match scan {
            ScanKind::Path => SvgKind::Heatmap,
            _ => SvgKind::Lines,
        });
        let p_samples = self.p_samples.unwrap_or(DEFAULT_P_SAMPLES);
        if scan == ScanKind::Superposition && p_samples < 2 {
            return Err(Error::Config(format!("need at least 2 p samples, got {p_samples}")));
        }
        let plan = RunPlan {
            scan,
            scenario,
            p_values: p_grid(p_samples),
            t_eval: self.t_eval.unwrap_or(DEFAULT_T_EVAL),
            csv: self.csv.clone(),
            svg: self.svg.clone(),
            svg_kind,
            quantity,
        };
        plan.scenario.validate()?;
        Ok(plan)
    }
}

/// A resolved, validated scenario plus its output targets.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub scan: ScanKind,
    pub scenario: ScenarioConfig,
    pub p_values: Vec<f64>,
    pub t_eval: f64,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub svg_kind: SvgKind,
    pub quantity: Quantity,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Grid(ScanResult),
    Superposition(SuperpositionScan),
}

/// `base` with `_suffix` inserted before the extension.
fn suffixed(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    base.with_file_name(name)
}

fn file_label(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

impl RunPlan {
    pub fn run(&self) -> Result<RunOutput> {
        match self.scan {
            ScanKind::Points | ScanKind::Path => Ok(RunOutput::Grid(run_scenario(&self.scenario)?)),
            ScanKind::Superposition => {
                Ok(RunOutput::Superposition(run_superposition_scan(&self.scenario, &self.p_values, self.t_eval)?))
            }
        }
    }

    /// Writes the configured CSV and SVG targets and returns the paths
    /// written. A superposition scan over several points writes one CSV
    /// per point, suffixed with the point label.
    pub fn emit(&self, output: &RunOutput) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        match output {
            RunOutput::Grid(result) => {
                if let Some(path) = &self.csv {
                    emit_csv(result, path)?;
                    written.push(path.clone());
                }
                if let Some(path) = &self.svg {
                    emit_svg_quantity(result, self.svg_kind, self.quantity, path)?;
                    written.push(path.clone());
                }
            }
            RunOutput::Superposition(scan) => {
                if let Some(path) = &self.csv {
                    for (point, result) in scan.points.iter().zip(&scan.results) {
                        let target =
                            if scan.points.len() == 1 { path.clone() } else { suffixed(path, &file_label(&point.label)) };
                        emit_csv(result, &target)?;
                        written.push(target);
                    }
                }
                if let Some(path) = &self.svg {
                    emit_superposition_svg(scan, path)?;
                    written.push(path.clone());
                }
            }
        }
        Ok(written)
    }
}

/// A checked-in figure reproduction: one or more panels, each a scenario
/// file whose outputs are named `<figure><panel>.{csv,svg}`.
#[derive(Clone, Copy, Debug)]
pub struct FigurePreset {
    pub name: &'static str,
    pub description: &'static str,
    pub panels: &'static [(&'static str, &'static str)],
}

impl FigurePreset {
    /// Plans for every panel, writing into `out_dir`. `overrides` apply on
    /// top of each panel file (output paths excepted).
    pub fn plans(&self, out_dir: &Path, overrides: &ConfigFile) -> Result<Vec<(String, RunPlan)>> {
        self.panels
            .iter()
            .map(|(panel, text)| {
                let name = format!("{}{}", self.name, panel);
                let mut cfg = ConfigFile::parse(text)?.overlay(overrides);
                cfg.csv = Some(out_dir.join(format!("{name}.csv")));
                cfg.svg = Some(out_dir.join(format!("{name}.svg")));
                Ok((name, cfg.resolve()?))
            })
            .collect()
    }
}

pub const FIGURES: &[FigurePreset] = &[
    FigurePreset {
        name: "fig3",
        description: "GHZ, dephasing: N_ABC along the path",
        panels: &[("", include_str!("../../configs/fig3.toml"))],
    },
    FigurePreset {
        name: "fig4",
        description: "W, dephasing: pairwise N_A|B (= N_A|C) and N_B|C along the path",
        panels: &[("a", include_str!("../../configs/fig4a.toml")), ("b", include_str!("../../configs/fig4b.toml"))],
    },
    FigurePreset {
        name: "fig5",
        description: "W, dephasing: N_ABC along the path",
        panels: &[("", include_str!("../../configs/fig5.toml"))],
    },
    FigurePreset {
        name: "fig6",
        description: "GHZ, amplitude: N_ABC along the path and at P, Q, R, S, O",
        panels: &[("a", include_str!("../../configs/fig6a.toml")), ("b", include_str!("../../configs/fig6b.toml"))],
    },
    FigurePreset {
        name: "fig7",
        description: "W, amplitude: N_ABC along the path and at P, Q, R, S, O",
        panels: &[("a", include_str!("../../configs/fig7a.toml")), ("b", include_str!("../../configs/fig7b.toml"))],
    },
    FigurePreset {
        name: "fig8",
        description: "W, amplitude: pairwise N_A|B (= N_A|C) and N_B|C along the path",
        panels: &[("a", include_str!("../../configs/fig8a.toml")), ("b", include_str!("../../configs/fig8b.toml"))],
    },
    FigurePreset {
        name: "fig9",
        description: "W, amplitude: bipartitions N_A|BC and N_B|AC (= N_C|AB) along the path",
        panels: &[("a", include_str!("../../configs/fig9a.toml")), ("b", include_str!("../../configs/fig9b.toml"))],
    },
    FigurePreset {
        name: "fig10",
        description: "GHZ-W superpositions: N_ABC(t = 10) against p, dephasing and amplitude",
        panels: &[("a", include_str!("../../configs/fig10a.toml")), ("b", include_str!("../../configs/fig10b.toml"))],
    },
];

pub fn preset(name: &str) -> Option<&'static FigurePreset> {
    let name = name.trim().to_ascii_lowercase();
    FIGURES.iter().find(|f| f.name == name)
}
