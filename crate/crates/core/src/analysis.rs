//! Turns trajectories into verdicts: Lyapunov monotonicity, energy-balance
//! residuals, exponential decay fits, damping-regime classification,
//! critical-damping search, basin-of-attraction maps, closed-orbit
//! detection, and damping sweeps.

use crate::dynamics::{DynamicsError, State, SystemConfig};
use crate::integrators::{
    integrate_adaptive, integrate_leapfrog, integrate_until, integrate_until_near, IntegrateError,
    IntegratorSettings, TerminalEvent, Trajectory,
};
use crate::linalg::{dot, norm, sub};
use crate::potentials::{find_equilibria, EquilibriumSet, PotentialError, PotentialSpec};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate fit: displacement norm below floor throughout the window")]
    DegenerateFit,
    #[error("trajectory does not decay (norm at end is not below norm at start)")]
    NonDecaying,
    #[error("bisection bracket invalid: {0}")]
    Bracket(String),
    #[error("no classified minima found for the potential; cannot map basins")]
    NoMinima,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

// ---------------------------------------------------------------------------
// Lyapunov and energy verdicts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    /// Largest increase of V_a between consecutive samples (negative when
    /// strictly decreasing throughout).
    pub max_increase: f64,
    pub pass: bool,
}

/// Scans V_a along the trajectory; passes when no consecutive-sample
/// increase exceeds `slack`.
pub fn verify_lyapunov_monotonicity(
    traj: &Trajectory,
    s: &SystemConfig,
    slack: f64,
) -> Result<MonotonicityReport, AnalysisError> {
    verify_lyapunov_monotonicity_within(traj, s, slack, f64::INFINITY)
}

/// Restricts the scan to sample pairs whose positions both lie in the ball
/// ‖x − u*‖ ≤ radius, matching the local domain on which V_a is a strict
/// Lyapunov functional for non-convex potentials.
pub fn verify_lyapunov_monotonicity_within(
    traj: &Trajectory,
    s: &SystemConfig,
    slack: f64,
    radius: f64,
) -> Result<MonotonicityReport, AnalysisError> {
    if s.is_conservative() {
        return Err(AnalysisError::Input(
            "lyapunov monotonicity requires a damped system (a > 0)".into(),
        ));
    }
    if slack < 0.0 {
        return Err(AnalysisError::Input("slack must be nonnegative".into()));
    }
    check_traj(traj, s.dim())?;
    let in_ball = |z: &State| -> bool { norm(&sub(&z.x, s.u_star())) <= radius };
    let mut max_increase = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    let mut scanned = false;
    for z in &traj.states {
        if !in_ball(z) {
            prev = None;
            continue;
        }
        let v = s.lyapunov(z)?;
        if let Some(p) = prev {
            max_increase = max_increase.max(v - p);
            scanned = true;
        }
        prev = Some(v);
    }
    if !scanned {
        max_increase = 0.0;
    }
    Ok(MonotonicityReport {
        max_increase,
        pass: max_increase <= slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// max over samples k of |E(z_k) − E(z_0) + a·∫₀^{t_k} ‖y‖² dt| with the
    /// integral taken by trapezoid quadrature on the output grid.
    pub max_residual: f64,
}

pub fn verify_energy_dissipation(
    traj: &Trajectory,
    s: &SystemConfig,
) -> Result<EnergyReport, AnalysisError> {
    check_traj(traj, s.dim())?;
    let e0 = s.energy(&traj.states[0])?;
    let speed_sq = |z: &State| -> f64 { dot(&z.y, &z.y) };
    let mut integral = 0.0;
    let mut max_residual = 0.0f64;
    for k in 1..traj.len() {
        let dt = traj.times[k] - traj.times[k - 1];
        integral += 0.5 * dt * (speed_sq(&traj.states[k - 1]) + speed_sq(&traj.states[k]));
        let e = s.energy(&traj.states[k])?;
        max_residual = max_residual.max((e - e0 + s.damping() * integral).abs());
    }
    Ok(EnergyReport { max_residual })
}

// ---------------------------------------------------------------------------
// Decay fitting
// ---------------------------------------------------------------------------

/// Least-squares exponential fit ‖x − u*‖ + ‖y‖ ≈ c_fit·e^{−gamma_fit·t}
/// over a tail window of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub c_fit: f64,
    pub gamma_fit: f64,
    pub window: (f64, f64),
    /// RMS residual of the straight-line fit in log space.
    pub rms_residual: f64,
}

/// Floor below which displacement norms are considered numerical noise and
/// excluded from the log fit.
pub const DECAY_FIT_FLOOR: f64 = 1e-12;

pub fn fit_decay_rate(
    traj: &Trajectory,
    u_star: &[f64],
    window_fraction: f64,
) -> Result<DecayFit, AnalysisError> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(AnalysisError::Input(
            "window_fraction must lie in (0, 1)".into(),
        ));
    }
    check_traj(traj, u_star.len())?;
    let norms: Vec<f64> = traj
        .states
        .iter()
        .map(|z| z.displacement_norm(u_star))
        .collect();

    let start = ((traj.len() as f64) * (1.0 - window_fraction)).floor() as usize;
    let window: Vec<usize> = (start..traj.len())
        .filter(|&k| norms[k] > DECAY_FIT_FLOOR)
        .collect();
    if window.len() < 2 {
        return Err(AnalysisError::DegenerateFit);
    }
    if !(norms[traj.len() - 1] < norms[0]) {
        return Err(AnalysisError::NonDecaying);
    }

    let n = window.len() as f64;
    let (mut st, mut sl, mut stt, mut stl) = (0.0, 0.0, 0.0, 0.0);
    for &k in &window {
        let t = traj.times[k];
        let l = norms[k].ln();
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(AnalysisError::DegenerateFit);
    }
    let slope = (n * stl - st * sl) / denom;
    let intercept = (sl - slope * st) / n;
    let mut ss = 0.0;
    for &k in &window {
        let r = norms[k].ln() - (intercept + slope * traj.times[k]);
        ss += r * r;
    }
    Ok(DecayFit {
        c_fit: intercept.exp(),
        gamma_fit: -slope,
        window: (traj.times[window[0]], traj.times[*window.last().unwrap()]),
        rms_residual: (ss / n).sqrt(),
    })
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeClass {
    OscillatoryNondecaying,
    Underdamped,
    NonoscillatoryDecaying,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// Strict sign changes of ⟨x(t) − u*, d⟩ along the probe direction d.
    pub crossings: usize,
    pub classification: RegimeClass,
}

/// Samples whose projection magnitude falls below this floor are ignored by
/// the crossing counter; below it the adaptive solution (abs_tol 1e-12) no
/// longer resolves signs reliably.
pub const CROSSING_FLOOR: f64 = 1e-9;

/// A trajectory counts as converged when it stopped on the convergence
/// event or its final displacement dropped below this fraction of the
/// initial displacement.
pub const CONVERGED_RATIO: f64 = 0.2;

pub fn classify_regime(
    traj: &Trajectory,
    u_star: &[f64],
    probe_direction: &[f64],
) -> Result<RegimeReport, AnalysisError> {
    check_traj(traj, u_star.len())?;
    if probe_direction.len() != u_star.len() {
        return Err(AnalysisError::Input(
            "probe direction has wrong dimension".into(),
        ));
    }
    if norm(probe_direction) <= 0.0 {
        return Err(AnalysisError::Input(
            "probe direction must be nonzero".into(),
        ));
    }
    let crossings = count_crossings(traj, u_star, probe_direction, CROSSING_FLOOR);
    let initial = traj.states[0].displacement_norm(u_star);
    let final_ = traj.final_state().displacement_norm(u_star);
    let converged = traj.terminal_event == Some(TerminalEvent::Converged)
        || final_ <= CONVERGED_RATIO * initial
        || initial == 0.0;
    let classification = if crossings >= 2 {
        if converged {
            RegimeClass::Underdamped
        } else {
            RegimeClass::OscillatoryNondecaying
        }
    } else {
        RegimeClass::NonoscillatoryDecaying
    };
    Ok(RegimeReport {
        crossings,
        classification,
    })
}

/// Strict sign changes of the probe projection, skipping samples with
/// magnitude below `floor` (and exact zeros).
fn count_crossings(traj: &Trajectory, u_star: &[f64], dir: &[f64], floor: f64) -> usize {
    let mut crossings = 0;
    let mut last_sign = 0i8;
    for z in &traj.states {
        let p = dot(&sub(&z.x, u_star), dir);
        if !p.is_finite() || p == 0.0 || p.abs() < floor {
            continue;
        }
        let sign = if p > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            crossings += 1;
        }
        last_sign = sign;
    }
    crossings
}

// ---------------------------------------------------------------------------
// Critical damping search
// ---------------------------------------------------------------------------

/// Bisects the damping coefficient over the oscillation predicate
/// (crossings ≥ 2) between an underdamped and an overdamped endpoint.
///
/// The probe runs integrate with a near-zero absolute tolerance so the
/// solution keeps relative accuracy at tiny amplitudes, and crossings are
/// counted with no magnitude floor: near the threshold the second crossing
/// occurs at amplitudes far below any fixed floor, and under pure-relative
/// stepping its sign is still trustworthy.
pub fn find_critical_damping(
    potential: &PotentialSpec,
    u_star: &[f64],
    ic: &State,
    a_range: (f64, f64),
    tol: f64,
    t_max: f64,
    settings: &IntegratorSettings,
) -> Result<f64, AnalysisError> {
    let (a_lo, a_hi) = a_range;
    if !(a_lo > 0.0 && a_hi > a_lo) {
        return Err(AnalysisError::Input("need 0 < a_lo < a_hi".into()));
    }
    if !(tol > 0.0) {
        return Err(AnalysisError::Input("tol must be positive".into()));
    }
    let probe_settings = IntegratorSettings {
        abs_tol: 1e-290,
        ..*settings
    };
    let dir = probe_direction(ic, u_star);
    let run = |a: f64| -> Result<Trajectory, AnalysisError> {
        let sys = SystemConfig::new(potential.clone(), a, u_star.to_vec())?;
        Ok(integrate_adaptive(&sys, ic, t_max, &probe_settings)?)
    };
    let oscillates = |traj: &Trajectory| count_crossings(traj, u_star, &dir, 0.0) >= 2;

    let lo_class = classify_regime(&run(a_lo)?, u_star, &dir)?.classification;
    let hi_class = classify_regime(&run(a_hi)?, u_star, &dir)?.classification;
    if lo_class != RegimeClass::Underdamped {
        return Err(AnalysisError::Bracket(format!(
            "a_lo = {a_lo} is not underdamped (classified {lo_class:?})"
        )));
    }
    if hi_class != RegimeClass::NonoscillatoryDecaying {
        return Err(AnalysisError::Bracket(format!(
            "a_hi = {a_hi} is not nonoscillatory (classified {hi_class:?})"
        )));
    }

    let (mut lo, mut hi) = (a_lo, a_hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if oscillates(&run(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn probe_direction(ic: &State, u_star: &[f64]) -> Vec<f64> {
    let disp = sub(&ic.x, u_star);
    let n = norm(&disp);
    if n > 1e-12 {
        disp.iter().map(|c| c / n).collect()
    } else {
        let mut e1 = vec![0.0; u_star.len()];
        e1[0] = 1.0;
        e1
    }
}

// ---------------------------------------------------------------------------
// Basin mapping
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Rectangular grid over phase space (position axes first, then velocity
/// axes). Cells are sampled at their centers.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn total_cells(&self) -> usize {
        self.axes.iter().map(|ax| ax.count).product()
    }

    /// Cell center; the convex-combination form keeps centers exactly
    /// antisymmetric on sign-symmetric boxes.
    pub fn center(&self, mut flat: usize) -> Vec<f64> {
        let mut pt = Vec::with_capacity(self.axes.len());
        for ax in &self.axes {
            let i = flat % ax.count;
            flat /= ax.count;
            let n = ax.count as f64;
            let w_hi = i as f64 + 0.5;
            let w_lo = n - w_hi;
            pt.push((ax.lo * w_lo + ax.hi * w_hi) / n);
        }
        pt
    }
}

#[derive(Debug, Clone)]
pub struct BasinMap {
    pub grid: GridSpec,
    pub equilibria: EquilibriumSet,
    /// Per-cell index into `minima`, or None for unresolved cells; ordered
    /// by the flat grid index.
    pub assignment: Vec<Option<usize>>,
    /// Positions of the classified minima, in assignment-index order.
    pub minima: Vec<Vec<f64>>,
}

const BASIN_ESCAPE_RADIUS: f64 = 1e9;

/// Integrates from every cell center and assigns each cell to the nearest
/// classified minimum within `conv_tol` of the terminal state. Unresolved
/// cells (separatrix neighborhoods, saddle starts) stay visibly unassigned.
/// Cells are integrated in parallel and merged in grid order, so the result
/// does not depend on scheduling.
pub fn basin_map(
    s: &SystemConfig,
    grid: &GridSpec,
    t_max: f64,
    conv_tol: f64,
    settings: &IntegratorSettings,
) -> Result<BasinMap, AnalysisError> {
    if s.is_conservative() {
        return Err(AnalysisError::Input(
            "basin mapping requires a damped system (a > 0)".into(),
        ));
    }
    let n = s.dim();
    if grid.axes.len() != 2 * n {
        return Err(AnalysisError::Input(format!(
            "grid must have {} axes (positions then velocities), got {}",
            2 * n,
            grid.axes.len()
        )));
    }
    if grid
        .axes
        .iter()
        .any(|ax| ax.count == 0 || !(ax.hi >= ax.lo))
    {
        return Err(AnalysisError::Input(
            "grid axes must have count >= 1 and hi >= lo".into(),
        ));
    }
    if !(conv_tol > 0.0 && t_max > 0.0) {
        return Err(AnalysisError::Input(
            "conv_tol and t_max must be positive".into(),
        ));
    }

    // Equilibria are searched on the position box, inflated so minima just
    // outside the sampled window are still found.
    let search_box: Vec<(f64, f64)> = grid.axes[..n]
        .iter()
        .map(|ax| {
            let mid = 0.5 * (ax.lo + ax.hi);
            let half = 0.75 * (ax.hi - ax.lo).max(1.0);
            (mid - half, mid + half)
        })
        .collect();
    let equilibria = find_equilibria(s.potential(), &search_box, 41, 1e-10)?;
    let minima = equilibria.minima();
    if minima.is_empty() {
        return Err(AnalysisError::NoMinima);
    }

    let assignment: Vec<Option<usize>> = (0..grid.total_cells())
        .into_par_iter()
        .map(|flat| {
            let center = grid.center(flat);
            let z0 = State::new(center[..n].to_vec(), center[n..].to_vec());
            let traj = match integrate_until_near(
                s,
                &z0,
                t_max,
                settings,
                conv_tol,
                BASIN_ESCAPE_RADIUS,
                &minima,
            ) {
                Ok(t) => t,
                Err(_) => return None,
            };
            let zf = traj.final_state();
            minima
                .iter()
                .enumerate()
                .map(|(i, m)| (i, zf.displacement_norm(m)))
                .filter(|(_, d)| *d <= conv_tol)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
        })
        .collect();

    Ok(BasinMap {
        grid: grid.clone(),
        equilibria,
        assignment,
        minima,
    })
}

// ---------------------------------------------------------------------------
// Closed orbits (conservative case)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitReport {
    /// First-return time, present when the orbit came back within `tol`
    /// of the initial state.
    pub period: Option<f64>,
    /// Distance of the closest (refined) approach to the initial state.
    pub return_distance: f64,
}

/// Leapfrog step used for orbit detection; small enough that the symplectic
/// period bias (O(h²)) stays below the reporting tolerance.
pub const ORBIT_STEP: f64 = 0.005;

/// Integrates the conservative system with leapfrog and looks for the first
/// return of the phase point to within `tol` of the start (after leaving a
/// ball of radius 10·tol), refining the crossing time by minimizing a cubic
/// Hermite interpolant between bracketing samples.
pub fn closed_orbit_check(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    tol: f64,
) -> Result<OrbitReport, AnalysisError> {
    if !s.is_conservative() {
        return Err(AnalysisError::Input(
            "closed orbits require the conservative case a = 0".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(AnalysisError::Input("tol must be positive".into()));
    }
    let f0 = s.vector_field(z0)?;
    if norm(&f0.to_flat()) == 0.0 {
        return Err(AnalysisError::Input(
            "initial state is an equilibrium; no orbit".into(),
        ));
    }

    let traj = integrate_leapfrog(s, z0, t_max, ORBIT_STEP, ORBIT_STEP)?;
    let z0f = z0.to_flat();
    let dist: Vec<f64> = traj
        .states
        .iter()
        .map(|z| norm(&sub(&z.to_flat(), &z0f)))
        .collect();

    let leave_radius = 10.0 * tol;
    let mut left_ball = false;
    let mut best = f64::INFINITY;
    for k in 1..traj.len().saturating_sub(1) {
        if !left_ball {
            left_ball = dist[k] > leave_radius;
            continue;
        }
        if dist[k] <= dist[k - 1] && dist[k] <= dist[k + 1] {
            let (t_star, d_star) = refine_closest_approach(s, &traj, k, &z0f)?;
            best = best.min(d_star);
            if d_star <= tol {
                return Ok(OrbitReport {
                    period: Some(t_star),
                    return_distance: d_star,
                });
            }
        }
    }
    if !left_ball {
        best = dist
            .iter()
            .skip(1)
            .fold(f64::INFINITY, |acc, d| acc.min(*d));
    }
    Ok(OrbitReport {
        period: None,
        return_distance: best,
    })
}

/// Minimizes the Hermite-interpolated distance to `z0f` over the two sample
/// segments around index k by golden-section search.
fn refine_closest_approach(
    s: &SystemConfig,
    traj: &Trajectory,
    k: usize,
    z0f: &[f64],
) -> Result<(f64, f64), AnalysisError> {
    let mut best_t = traj.times[k];
    let mut best_d = f64::INFINITY;
    for seg in [k - 1, k] {
        let (t0, t1) = (traj.times[seg], traj.times[seg + 1]);
        let h = t1 - t0;
        let za = traj.states[seg].to_flat();
        let zb = traj.states[seg + 1].to_flat();
        let mut fa = vec![0.0; za.len()];
        let mut fb = vec![0.0; zb.len()];
        s.rhs_flat(&za, &mut fa)?;
        s.rhs_flat(&zb, &mut fb)?;
        let dist_at = |theta: f64| -> f64 {
            let z = hermite_point(&za, &fa, &zb, &fb, h, theta);
            norm(&sub(&z, z0f))
        };
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut m1 = hi - INV_PHI * (hi - lo);
        let mut m2 = lo + INV_PHI * (hi - lo);
        let (mut d1, mut d2) = (dist_at(m1), dist_at(m2));
        for _ in 0..80 {
            if d1 <= d2 {
                hi = m2;
                m2 = m1;
                d2 = d1;
                m1 = hi - INV_PHI * (hi - lo);
                d1 = dist_at(m1);
            } else {
                lo = m1;
                m1 = m2;
                d1 = d2;
                m2 = lo + INV_PHI * (hi - lo);
                d2 = dist_at(m2);
            }
        }
        let theta = 0.5 * (lo + hi);
        let d = dist_at(theta);
        if d < best_d {
            best_d = d;
            best_t = t0 + theta * h;
        }
    }
    Ok((best_t, best_d))
}

fn hermite_point(z0: &[f64], f0: &[f64], z1: &[f64], f1: &[f64], h: f64, theta: f64) -> Vec<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    z0.iter()
        .zip(f0)
        .zip(z1.iter().zip(f1))
        .map(|((a, fa), (b, fb))| h00 * a + h * h10 * fa + h01 * b + h * h11 * fb)
        .collect()
}

// ---------------------------------------------------------------------------
// Damping sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub trajectory: Trajectory,
    pub regime: RegimeReport,
    pub decay: Option<DecayFit>,
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub a: f64,
    pub outcome: Result<SweepOutcome, IntegrateError>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// sup over t and over the damped runs (a > 0) of ‖x − u*‖ + ‖y‖.
    pub sup_displacement_damped: f64,
    /// (a, gamma_fit) for the entries whose decay fit succeeded.
    pub gamma_by_a: Vec<(f64, f64)>,
}

const SWEEP_ESCAPE_RADIUS: f64 = 1e9;

/// Runs the same initial condition across damping values. Integrator
/// failures are recorded per entry and the sweep continues. Entries are
/// integrated in parallel and reported in input order.
pub fn damping_sweep(
    potential: &PotentialSpec,
    u_star: &[f64],
    ic: &State,
    a_values: &[f64],
    t_max: f64,
    conv_tol: f64,
    settings: &IntegratorSettings,
) -> Result<SweepReport, AnalysisError> {
    if a_values.is_empty() {
        return Err(AnalysisError::Input("a_values must be non-empty".into()));
    }
    let dir = probe_direction(ic, u_star);
    let entries: Vec<SweepEntry> = a_values
        .par_iter()
        .map(|&a| {
            let outcome = (|| -> Result<SweepOutcome, IntegrateError> {
                let sys = SystemConfig::new(potential.clone(), a, u_star.to_vec())
                    .map_err(|e| IntegrateError::Input(e.to_string()))?;
                let trajectory =
                    integrate_until(&sys, ic, t_max, settings, conv_tol, SWEEP_ESCAPE_RADIUS)?;
                let regime = classify_regime(&trajectory, u_star, &dir)
                    .map_err(|e| IntegrateError::Input(e.to_string()))?;
                let decay = fit_decay_rate(&trajectory, u_star, 0.5).ok();
                Ok(SweepOutcome {
                    trajectory,
                    regime,
                    decay,
                })
            })();
            SweepEntry { a, outcome }
        })
        .collect();

    let mut sup = 0.0f64;
    let mut gamma_by_a = Vec::new();
    for entry in &entries {
        if let Ok(out) = &entry.outcome {
            if entry.a > 0.0 {
                for z in &out.trajectory.states {
                    sup = sup.max(z.displacement_norm(u_star));
                }
                if let Some(fit) = &out.decay {
                    gamma_by_a.push((entry.a, fit.gamma_fit));
                }
            }
        }
    }
    Ok(SweepReport {
        entries,
        sup_displacement_damped: sup,
        gamma_by_a,
    })
}

fn check_traj(traj: &Trajectory, dim: usize) -> Result<(), AnalysisError> {
    if traj.len() < 2 {
        return Err(AnalysisError::Input(
            "trajectory needs at least two samples".into(),
        ));
    }
    if traj.states.iter().any(|z| z.dim() != dim) {
        return Err(AnalysisError::Input(format!(
            "trajectory dimension does not match expected dimension {dim}"
        )));
    }
    Ok(())
}
