//! Command implementations: each maps validated options onto library calls
//! and writes `trajectory_*.csv`, `report.txt` and optional `phase_*.svg`
//! into the output directory.

use crate::args::*;
use crate::config::{build_context, parse_grid_axis, trim_float, RunContext, RunMethod};
use crate::csvio::write_trajectory_csv;
use crate::error::{io_err, CliError};
use crate::reproduce::{reproduce_figure, FigureId, ALL_FIGURES};
use crate::svg::{phase_points, render_phase_svg, PlotSeries};
use grad2_core::analysis::{
    basin_map, classify_regime, closed_orbit_check, damping_sweep, find_critical_damping,
    fit_decay_rate, verify_energy_dissipation, verify_lyapunov_monotonicity_within, GridSpec,
    RegimeClass,
};
use grad2_core::dynamics::decay_constants;
use grad2_core::integrators::{integrate_adaptive, integrate_leapfrog, integrate_rk4, Trajectory};
use grad2_core::potentials::{estimate_local_constants, probe_coercivity, CoercivityVerdict};
use grad2_core::State;
use std::fmt::Write as _;
use std::path::Path;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Basin(args) => basin(args),
        Command::Decay(args) => decay(args),
        Command::Critical(args) => critical(args),
        Command::Conserve(args) => conserve(args),
        Command::Verify(args) => verify(args),
        Command::Reproduce(args) => reproduce(args),
    }
}

fn ensure_out(ctx: &RunContext) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out).map_err(io_err(&ctx.out))
}

fn write_report(out_dir: &Path, lines: &[String]) -> Result<(), CliError> {
    let path = out_dir.join("report.txt");
    let mut body = lines.join("\n");
    body.push('\n');
    std::fs::write(&path, body).map_err(io_err(&path))
}

fn run_trajectory(ctx: &RunContext, z0: &State) -> Result<Trajectory, CliError> {
    Ok(match ctx.method {
        RunMethod::Adaptive => integrate_adaptive(&ctx.system, z0, ctx.t_max, &ctx.settings)?,
        RunMethod::Rk4 => integrate_rk4(
            &ctx.system,
            z0,
            ctx.t_max,
            ctx.h,
            ctx.settings.sample_stride,
        )?,
        RunMethod::Leapfrog => integrate_leapfrog(
            &ctx.system,
            z0,
            ctx.t_max,
            ctx.h,
            ctx.settings.sample_stride,
        )?,
    })
}

fn state_str(z: &State) -> String {
    let xs: Vec<String> = z.x.iter().map(|v| format!("{v}")).collect();
    let ys: Vec<String> = z.y.iter().map(|v| format!("{v}")).collect();
    format!("x = [{}], y = [{}]", xs.join(", "), ys.join(", "))
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let z0 = ctx.require_ic()?.clone();
    ensure_out(&ctx)?;
    let traj = run_trajectory(&ctx, &z0)?;

    let csv = ctx.out.join(format!("trajectory_{}.csv", ctx.label));
    write_trajectory_csv(&csv, &traj, &ctx.system)?;

    let mut report = vec![
        format!("simulate {}", ctx.label),
        format!("samples: {}", traj.len()),
        format!(
            "steps: {} accepted, {} rejected",
            traj.steps_accepted, traj.steps_rejected
        ),
        format!("terminal event: {:?}", traj.terminal_event),
        format!("final t = {}", traj.final_time()),
        format!("final state: {}", state_str(traj.final_state())),
    ];
    let e_rep = verify_energy_dissipation(&traj, &ctx.system)?;
    report.push(format!(
        "energy balance residual: {:.6e}",
        e_rep.max_residual
    ));

    if ctx.plot {
        let svg = ctx.out.join(format!("phase_{}.svg", ctx.label));
        let series = vec![PlotSeries {
            label: ctx.label.clone(),
            points: phase_points(&traj),
        }];
        std::fs::write(&svg, render_phase_svg(&series)?).map_err(io_err(&svg))?;
    }
    write_report(&ctx.out, &report)
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let z0 = ctx.require_ic()?.clone();
    let a_values = match (&args.a_values, &ctx.file.a_values) {
        (Some(s), _) => crate::config::parse_reals("a-values", s)?,
        (None, Some(v)) => v.clone(),
        (None, None) => return Err(CliError::validation("a-values", "required for sweep")),
    };
    if a_values.iter().any(|a| *a < 0.0) {
        return Err(CliError::validation(
            "a-values",
            "damping values must be >= 0",
        ));
    }
    let conv_tol = args.conv_tol.or(ctx.file.conv_tol).unwrap_or(1e-3);
    ensure_out(&ctx)?;

    let report_data = damping_sweep(
        ctx.system.potential(),
        ctx.system.u_star(),
        &z0,
        &a_values,
        ctx.t_max,
        conv_tol,
        &ctx.settings,
    )?;

    let base = crate::config::kind_slug(ctx.system.potential());
    let mut report = vec![format!("sweep {base} over a = {a_values:?}")];
    let mut series = Vec::new();
    for entry in &report_data.entries {
        match &entry.outcome {
            Ok(out) => {
                let label = format!("a = {}", trim_float(entry.a));
                let slug = format!("a{}", trim_float(entry.a));
                let csv = ctx.out.join(format!("trajectory_{base}_{slug}.csv"));
                // the CSV lyapunov column needs the matching damping value
                let sys = grad2_core::SystemConfig::new(
                    ctx.system.potential().clone(),
                    entry.a,
                    ctx.system.u_star().to_vec(),
                )
                .map_err(|e| CliError::Numeric(e.to_string()))?;
                write_trajectory_csv(&csv, &out.trajectory, &sys)?;
                series.push(PlotSeries {
                    label: label.clone(),
                    points: phase_points(&out.trajectory),
                });
                let gamma = out
                    .decay
                    .as_ref()
                    .map(|f| format!("{:.6}", f.gamma_fit))
                    .unwrap_or_else(|| "n/a".into());
                report.push(format!(
                    "  {label}: regime {:?}, crossings {}, gamma_fit {gamma}, event {:?}",
                    out.regime.classification, out.regime.crossings, out.trajectory.terminal_event
                ));
            }
            Err(e) => report.push(format!("  a = {}: failed: {e}", entry.a)),
        }
    }
    report.push(format!(
        "sup over damped runs of |x - u*| + |y|: {:.6}",
        report_data.sup_displacement_damped
    ));
    if report_data.gamma_by_a.len() >= 2 {
        let mut trend = String::from("gamma_fit by a:");
        for (a, g) in &report_data.gamma_by_a {
            let _ = write!(trend, " ({}, {:.6})", trim_float(*a), g);
        }
        report.push(trend);
    }

    if ctx.plot && !series.is_empty() {
        let svg = ctx.out.join(format!("phase_{base}_sweep.svg"));
        std::fs::write(&svg, render_phase_svg(&series)?).map_err(io_err(&svg))?;
    }
    write_report(&ctx.out, &report)
}

fn basin(args: BasinArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let axes_raw: Vec<String> = if !args.grid.is_empty() {
        args.grid.clone()
    } else {
        ctx.file.grid.clone().unwrap_or_default()
    };
    if axes_raw.is_empty() {
        return Err(CliError::validation(
            "grid",
            "required for basin (lo:hi:count per axis)",
        ));
    }
    let axes: Result<Vec<_>, _> = axes_raw
        .iter()
        .map(|s| parse_grid_axis("grid", s))
        .collect();
    let grid = GridSpec { axes: axes? };
    let conv_tol = args.conv_tol.or(ctx.file.conv_tol).unwrap_or(1e-3);
    ensure_out(&ctx)?;

    let map = basin_map(&ctx.system, &grid, ctx.t_max, conv_tol, &ctx.settings)?;

    // cell table: center coordinates then assigned basin index (-1 when
    // unresolved)
    let n = ctx.system.dim();
    let mut csv = String::new();
    for i in 1..=n {
        let _ = write!(csv, "x{i},");
    }
    for i in 1..=n {
        let _ = write!(csv, "y{i},");
    }
    csv.push_str("basin\n");
    for (flat, assigned) in map.assignment.iter().enumerate() {
        let center = map.grid.center(flat);
        for c in &center {
            let _ = write!(csv, "{c},");
        }
        let _ = writeln!(csv, "{}", assigned.map(|i| i as i64).unwrap_or(-1));
    }
    let csv_path = ctx.out.join(format!("basin_{}.csv", ctx.label));
    std::fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;

    let mut report = vec![format!(
        "basin {} over {} cells",
        ctx.label,
        map.assignment.len()
    )];
    for (i, m) in map.minima.iter().enumerate() {
        let count = map.assignment.iter().filter(|a| **a == Some(i)).count();
        report.push(format!("  basin {i} at {:?}: {count} cells", m));
    }
    let unresolved = map.assignment.iter().filter(|a| a.is_none()).count();
    report.push(format!("  unresolved: {unresolved} cells"));
    if map.equilibria.continuum_suspected {
        report.push("  note: equilibrium continuum suspected".into());
    }
    write_report(&ctx.out, &report)
}

fn decay(args: DecayArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let z0 = ctx.require_ic()?.clone();
    let window = args.window.or(ctx.file.window).unwrap_or(0.5);
    if !(window > 0.0 && window < 1.0) {
        return Err(CliError::validation(
            "window",
            format!("must lie in (0, 1), got {window}"),
        ));
    }
    ensure_out(&ctx)?;

    let traj = run_trajectory(&ctx, &z0)?;
    let csv = ctx.out.join(format!("trajectory_{}.csv", ctx.label));
    write_trajectory_csv(&csv, &traj, &ctx.system)?;

    let fit = fit_decay_rate(&traj, ctx.system.u_star(), window)?;
    let report = vec![
        format!("decay {}", ctx.label),
        format!("window: t in [{}, {}]", fit.window.0, fit.window.1),
        format!("gamma_fit: {}", fit.gamma_fit),
        format!("c_fit: {}", fit.c_fit),
        format!("rms log residual: {:.6e}", fit.rms_residual),
    ];
    if ctx.plot {
        let svg = ctx.out.join(format!("phase_{}.svg", ctx.label));
        let series = vec![PlotSeries {
            label: ctx.label.clone(),
            points: phase_points(&traj),
        }];
        std::fs::write(&svg, render_phase_svg(&series)?).map_err(io_err(&svg))?;
    }
    write_report(&ctx.out, &report)
}

fn critical(args: CriticalArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let z0 = ctx.require_ic()?.clone();
    let a_lo = args.a_lo.or(ctx.file.a_lo).unwrap_or(0.5);
    let a_hi = args.a_hi.or(ctx.file.a_hi).unwrap_or(6.0);
    let tol = args.tol.or(ctx.file.tol).unwrap_or(1e-2);
    ensure_out(&ctx)?;

    let a_star = find_critical_damping(
        ctx.system.potential(),
        ctx.system.u_star(),
        &z0,
        (a_lo, a_hi),
        tol,
        ctx.t_max,
        &ctx.settings,
    )?;
    let report = vec![
        format!(
            "critical damping search on {}",
            crate::config::kind_slug(ctx.system.potential())
        ),
        format!("bracket: ({a_lo}, {a_hi}), tol {tol}, t_max {}", ctx.t_max),
        format!("a_star: {a_star}"),
        "note: measured oscillation threshold; asserted theory exists only for the linear case"
            .into(),
    ];
    write_report(&ctx.out, &report)
}

fn conserve(args: ConserveArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    if !ctx.system.is_conservative() {
        return Err(CliError::validation(
            "a",
            "conserve requires the conservative case a = 0",
        ));
    }
    let z0 = ctx.require_ic()?.clone();
    let tol = args.tol.or(ctx.file.tol).unwrap_or(1e-6);
    ensure_out(&ctx)?;

    let orbit = closed_orbit_check(&ctx.system, &z0, ctx.t_max, tol)?;
    let t_plot = orbit.period.unwrap_or(ctx.t_max);
    let traj = integrate_leapfrog(&ctx.system, &z0, t_plot, ctx.h, ctx.settings.sample_stride)?;
    let csv = ctx.out.join(format!("trajectory_{}.csv", ctx.label));
    write_trajectory_csv(&csv, &traj, &ctx.system)?;

    let mut report = vec![format!("conserve {}", ctx.label)];
    match orbit.period {
        Some(p) => report.push(format!("period: {p}")),
        None => report.push(format!("no return within t_max = {}", ctx.t_max)),
    }
    report.push(format!("return distance: {:.6e}", orbit.return_distance));
    let e_rep = verify_energy_dissipation(&traj, &ctx.system)?;
    report.push(format!("energy drift |E - E0|: {:.6e}", e_rep.max_residual));

    if ctx.plot {
        let svg = ctx.out.join(format!("phase_{}.svg", ctx.label));
        let series = vec![PlotSeries {
            label: ctx.label.clone(),
            points: phase_points(&traj),
        }];
        std::fs::write(&svg, render_phase_svg(&series)?).map_err(io_err(&svg))?;
    }
    write_report(&ctx.out, &report)
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let ctx = build_context(&args.common)?;
    let z0 = ctx.require_ic()?.clone();
    ensure_out(&ctx)?;
    let traj = run_trajectory(&ctx, &z0)?;
    let csv = ctx.out.join(format!("trajectory_{}.csv", ctx.label));
    write_trajectory_csv(&csv, &traj, &ctx.system)?;

    let mut report = vec![format!("verify {}", ctx.label)];
    let e0 = ctx
        .system
        .energy(&z0)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let e_rep = verify_energy_dissipation(&traj, &ctx.system)?;
    let e_tol = 1e-4 * (1.0 + e0);
    report.push(format!(
        "energy balance residual {:.6e} vs {:.3e}: {}",
        e_rep.max_residual,
        e_tol,
        pass_fail(e_rep.max_residual <= e_tol)
    ));

    let radius = args.radius.or(ctx.file.radius);
    if ctx.system.damping() > 0.0 {
        let scan_radius = radius.unwrap_or(f64::INFINITY);
        let mono = verify_lyapunov_monotonicity_within(&traj, &ctx.system, 1e-7, scan_radius)?;
        report.push(format!(
            "lyapunov monotonicity (radius {}): max increase {:.6e}: {}",
            radius
                .map(|r| format!("{r}"))
                .unwrap_or_else(|| "unrestricted".into()),
            mono.max_increase,
            pass_fail(mono.pass)
        ));
    }

    let coercivity = probe_coercivity(ctx.system.potential(), &[1.0, 2.0, 4.0, 8.0], 16)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    report.push(format!(
        "coercivity probe at radii [1, 2, 4, 8]: {}",
        match coercivity.verdict {
            CoercivityVerdict::ConsistentWithCoercive => "consistent with coercive",
            CoercivityVerdict::Inconclusive => "inconclusive",
        }
    ));

    if let Some(r) = radius {
        let samples = args.samples.or(ctx.file.samples).unwrap_or(256);
        let seed = args.seed.or(ctx.file.seed).unwrap_or(0);
        match estimate_local_constants(
            ctx.system.potential(),
            ctx.system.u_star(),
            r,
            samples,
            seed,
        ) {
            Ok(lc) => {
                report.push(format!(
                    "quadratic-control constants on radius {r}: alpha {:.6}, beta {:.6}, mu {:.6}",
                    lc.alpha, lc.beta, lc.mu
                ));
                if ctx.system.damping() > 0.0 {
                    let dc = decay_constants(&ctx.system, &lc)
                        .map_err(|e| CliError::Numeric(e.to_string()))?;
                    report.push(format!(
                        "decay constants: m1 {:.6}, m2 {:.6}, gamma {:.6}",
                        dc.m1, dc.m2, dc.gamma
                    ));
                    let v0 = ctx
                        .system
                        .lyapunov(&z0)
                        .map_err(|e| CliError::Numeric(e.to_string()))?;
                    report.push(format!(
                        "per-trajectory constant V(z0)/m1 = {:.6}",
                        v0 / dc.m1
                    ));
                    let mut v_ok = true;
                    let mut n_ok = true;
                    for (t, z) in traj.times.iter().zip(&traj.states) {
                        let v = ctx
                            .system
                            .lyapunov(z)
                            .map_err(|e| CliError::Numeric(e.to_string()))?;
                        let bound = v0 * (-dc.gamma * t).exp() * (1.0 + 1e-6);
                        v_ok &= v <= bound;
                        let n2 = z.phase_norm(ctx.system.u_star()).powi(2);
                        n_ok &= n2 <= v0 / dc.m1 * (-dc.gamma * t).exp() * (1.0 + 1e-6);
                    }
                    report.push(format!("V(t) <= V(z0) e^(-gamma t): {}", pass_fail(v_ok)));
                    report.push(format!(
                        "|z(t)|^2 <= V(z0)/m1 e^(-gamma t): {}",
                        pass_fail(n_ok)
                    ));
                }
            }
            Err(e) => report.push(format!("quadratic-control probe failed: {e}")),
        }
    }

    match fit_decay_rate(&traj, ctx.system.u_star(), 0.5) {
        Ok(fit) => report.push(format!(
            "fitted decay: gamma {:.6}, c {:.6}, rms log residual {:.3e}",
            fit.gamma_fit, fit.c_fit, fit.rms_residual
        )),
        Err(e) => report.push(format!("decay fit unavailable: {e}")),
    }

    if ctx.system.damping() > 0.0 {
        let dir = vec![1.0 / (ctx.system.dim() as f64).sqrt(); ctx.system.dim()];
        let regime = classify_regime(&traj, ctx.system.u_star(), &dir)?;
        let class = match regime.classification {
            RegimeClass::OscillatoryNondecaying => "oscillatory nondecaying",
            RegimeClass::Underdamped => "underdamped",
            RegimeClass::NonoscillatoryDecaying => "nonoscillatory decaying",
        };
        report.push(format!("regime: {class} ({} crossings)", regime.crossings));
    }

    write_report(&ctx.out, &report)
}

fn reproduce(args: ReproduceArgs) -> Result<(), CliError> {
    let ctx = build_context(&ReproduceArgsCommon(&args).common())?;
    let figure_sel = args
        .figure
        .clone()
        .or_else(|| ctx.file.figure.clone())
        .unwrap_or_else(|| "all".into());
    let figures: Vec<FigureId> = if figure_sel == "all" {
        ALL_FIGURES.to_vec()
    } else {
        vec![FigureId::parse(&figure_sel)?]
    };
    std::fs::create_dir_all(&ctx.out).map_err(io_err(&ctx.out))?;
    let mut report = Vec::new();
    for figure in figures {
        let (_, lines) = reproduce_figure(figure, &ctx.out)?;
        report.extend(lines);
    }
    write_report(&ctx.out, &report)
}

/// `reproduce` takes no potential; inject a placeholder so the shared
/// context builder can run (only `out`, `threads` and `figure` are used).
struct ReproduceArgsCommon<'a>(&'a ReproduceArgs);

impl ReproduceArgsCommon<'_> {
    fn common(&self) -> CommonArgs {
        let mut c = self.0.common.clone();
        if c.potential.is_none() && c.config.is_none() {
            c.potential = Some("quadratic".into());
        }
        c
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
