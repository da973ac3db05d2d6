//! Built-in experiment recipes: the damping sweeps, basin runs and
//! conservative phase portraits for the quadratic, double-well and
//! exponential potentials, with their original parameter sets. Each recipe
//! emits one CSV per trajectory plus one phase portrait, deterministically.

use crate::config::trim_float;
use crate::csvio::write_trajectory_csv;
use crate::error::{io_err, CliError};
use crate::svg::{phase_points, render_phase_svg, PlotSeries};
use grad2_core::integrators::integrate_adaptive;
use grad2_core::{IntegratorSettings, PotentialSpec, State, SystemConfig, Trajectory};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    QuadSweep,
    QuadConservative,
    DwDamped,
    DwConservative,
    ExpDamped,
    ExpConservative,
    ExpSweep,
}

pub const ALL_FIGURES: [FigureId; 7] = [
    FigureId::QuadSweep,
    FigureId::QuadConservative,
    FigureId::DwDamped,
    FigureId::DwConservative,
    FigureId::ExpDamped,
    FigureId::ExpConservative,
    FigureId::ExpSweep,
];

impl FigureId {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "quad_sweep" => FigureId::QuadSweep,
            "quad_conservative" => FigureId::QuadConservative,
            "dw_damped" => FigureId::DwDamped,
            "dw_conservative" => FigureId::DwConservative,
            "exp_damped" => FigureId::ExpDamped,
            "exp_conservative" => FigureId::ExpConservative,
            "exp_sweep" => FigureId::ExpSweep,
            other => {
                return Err(CliError::validation(
                    "figure",
                    format!("unknown figure id '{other}'"),
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::QuadSweep => "quad_sweep",
            FigureId::QuadConservative => "quad_conservative",
            FigureId::DwDamped => "dw_damped",
            FigureId::DwConservative => "dw_conservative",
            FigureId::ExpDamped => "exp_damped",
            FigureId::ExpConservative => "exp_conservative",
            FigureId::ExpSweep => "exp_sweep",
        }
    }
}

enum Variation {
    /// One initial condition, several damping values.
    Damping {
        ic: (f64, f64),
        a_values: &'static [f64],
    },
    /// One damping value, several initial conditions.
    InitialConditions { a: f64, ics: &'static [(f64, f64)] },
}

struct Recipe {
    potential: fn() -> PotentialSpec,
    u_star: f64,
    variation: Variation,
    t_max: f64,
    stride: f64,
}

fn quadratic() -> PotentialSpec {
    PotentialSpec::quadratic(1).expect("dim 1")
}

fn double_well() -> PotentialSpec {
    PotentialSpec::double_well()
}

fn exponential() -> PotentialSpec {
    PotentialSpec::exponential(1).expect("dim 1")
}

fn recipe(figure: FigureId) -> Recipe {
    match figure {
        FigureId::QuadSweep => Recipe {
            potential: quadratic,
            u_star: 0.0,
            variation: Variation::Damping {
                ic: (2.0, 0.0),
                a_values: &[0.0, 0.5, 1.0, 2.0, 3.5, 6.0],
            },
            t_max: 15.0,
            stride: 0.05,
        },
        FigureId::QuadConservative => Recipe {
            potential: quadratic,
            u_star: 0.0,
            variation: Variation::InitialConditions {
                a: 0.0,
                ics: &[(-0.5, -1.0), (2.0, 0.0), (-2.0, -1.0), (0.0, 2.5)],
            },
            t_max: 25.0,
            stride: 0.05,
        },
        FigureId::DwDamped => Recipe {
            potential: double_well,
            u_star: -1.0,
            variation: Variation::InitialConditions {
                a: 0.3,
                ics: &[
                    (-1.5, 0.5),
                    (1.5, -0.2),
                    (0.01, 0.0),
                    (-0.01, 0.0),
                    (0.0, 2.0),
                ],
            },
            t_max: 40.0,
            stride: 0.05,
        },
        FigureId::DwConservative => Recipe {
            potential: double_well,
            u_star: -1.0,
            variation: Variation::InitialConditions {
                a: 0.0,
                ics: &[(1.0, 0.5), (-1.0, -0.5), (0.0, 1.2), (0.0, 0.72)],
            },
            t_max: 30.0,
            stride: 0.05,
        },
        FigureId::ExpDamped => Recipe {
            potential: exponential,
            u_star: 0.0,
            variation: Variation::InitialConditions {
                a: 0.5,
                ics: &[(1.5, 1.0), (-1.5, -0.5), (0.0, 2.0), (0.5, -2.0)],
            },
            t_max: 25.0,
            stride: 0.05,
        },
        FigureId::ExpConservative => Recipe {
            potential: exponential,
            u_star: 0.0,
            variation: Variation::InitialConditions {
                a: 0.0,
                ics: &[(0.3, 0.0), (0.8, 0.0), (1.3, 0.0), (0.0, 1.5)],
            },
            t_max: 15.0,
            stride: 0.01,
        },
        FigureId::ExpSweep => Recipe {
            potential: exponential,
            u_star: 0.0,
            variation: Variation::Damping {
                ic: (1.5, 0.0),
                a_values: &[0.5, 1.0, 2.0, 3.5, 5.0],
            },
            t_max: 20.0,
            stride: 0.05,
        },
    }
}

pub struct FigureRun {
    pub label: String,
    pub slug: String,
    pub a: f64,
    pub system: SystemConfig,
    pub trajectory: Trajectory,
}

/// Integrates every trajectory of one figure without touching the
/// filesystem; `reproduce_figure` adds the CSV/SVG emission.
pub fn run_figure(figure: FigureId) -> Result<Vec<FigureRun>, CliError> {
    let r = recipe(figure);
    let settings = IntegratorSettings {
        sample_stride: r.stride,
        ..IntegratorSettings::default()
    };
    let mut runs = Vec::new();
    let cases: Vec<(f64, (f64, f64), String, String)> = match r.variation {
        Variation::Damping { ic, a_values } => a_values
            .iter()
            .map(|&a| {
                (
                    a,
                    ic,
                    format!("a = {}", trim_float(a)),
                    format!("a{}", trim_float(a)),
                )
            })
            .collect(),
        Variation::InitialConditions { a, ics } => ics
            .iter()
            .enumerate()
            .map(|(k, &ic)| {
                (
                    a,
                    ic,
                    format!("({}, {})", trim_float(ic.0), trim_float(ic.1)),
                    format!("ic{}", k + 1),
                )
            })
            .collect(),
    };
    for (a, ic, label, slug) in cases {
        let system = SystemConfig::new((r.potential)(), a, vec![r.u_star])
            .map_err(|e| CliError::validation("system", e))?;
        let z0 = State::new(vec![ic.0], vec![ic.1]);
        let trajectory = integrate_adaptive(&system, &z0, r.t_max, &settings)?;
        runs.push(FigureRun {
            label,
            slug,
            a,
            system,
            trajectory,
        });
    }
    Ok(runs)
}

/// Emits `trajectory_<figure>_<slug>.csv` per run plus `phase_<figure>.svg`,
/// and returns the written paths with the report lines for this figure.
pub fn reproduce_figure(
    figure: FigureId,
    out_dir: &Path,
) -> Result<(Vec<PathBuf>, Vec<String>), CliError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let runs = run_figure(figure)?;
    let mut written = Vec::new();
    let mut report = vec![format!("figure {}", figure.name())];
    let mut series = Vec::new();
    for run in &runs {
        let path = out_dir.join(format!("trajectory_{}_{}.csv", figure.name(), run.slug));
        write_trajectory_csv(&path, &run.trajectory, &run.system)?;
        written.push(path);
        series.push(PlotSeries {
            label: run.label.clone(),
            points: phase_points(&run.trajectory),
        });
        let zf = run.trajectory.final_state();
        let mut line = String::new();
        let _ = write!(
            line,
            "  {}: final state ({}, {})",
            run.label, zf.x[0], zf.y[0]
        );
        report.push(line);
    }
    if figure == FigureId::DwDamped {
        // the (0, 2) start has no theory-decided destination; record the
        // empirical well
        let zf = runs.last().expect("five runs").trajectory.final_state();
        let well = if zf.x[0] > 0.0 { "(1, 0)" } else { "(-1, 0)" };
        report.push(format!("  empirical destination of (0, 2): {well}"));
    }
    let svg_path = out_dir.join(format!("phase_{}.svg", figure.name()));
    std::fs::write(&svg_path, render_phase_svg(&series)?).map_err(io_err(&svg_path))?;
    written.push(svg_path);
    Ok((written, report))
}
