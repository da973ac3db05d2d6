//! Time-stepping for the phase-space system (ẋ, ẏ) = (y, −a·y − ∇W(x)):
//! classical RK4, an adaptive Dormand–Prince 5(4) embedded pair with cubic
//! Hermite dense output, and a Störmer–Verlet leapfrog reserved for the
//! conservative case a = 0.

use crate::dynamics::{DynamicsError, State, SystemConfig};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("non-finite state encountered near t = {t:.6}")]
    Overflow { t: f64 },
    #[error("step size underflow (h < h_min = {h_min:.1e}) near t = {t:.6}; system too stiff for the requested tolerance")]
    StepUnderflow { t: f64, h_min: f64 },
    #[error("leapfrog requires the conservative case (a = 0), got a = {0}")]
    LeapfrogRequiresConservative(f64),
    #[error("invalid integrator settings: {0}")]
    BadSettings(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Adaptive,
    Leapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalEvent {
    Converged,
    Escaped,
    TMaxReached,
}

/// A sampled solution: strictly increasing times starting at 0, one state
/// per time, and step-accounting metadata. `states[0]` is the requested
/// initial condition, bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub method: Method,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub terminal_event: Option<TerminalEvent>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory has at least two samples")
    }

    pub fn final_state(&self) -> &State {
        self.states
            .last()
            .expect("trajectory has at least two samples")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Output spacing of the sampled trajectory.
    pub sample_stride: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        // Tolerances tight enough that integrator error never masks the
        // Lyapunov-monotonicity checks downstream.
        IntegratorSettings {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 0.1,
            sample_stride: 0.05,
        }
    }
}

impl IntegratorSettings {
    fn validate(&self) -> Result<(), IntegrateError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(IntegrateError::BadSettings(
                "tolerances must be positive".into(),
            ));
        }
        if !(self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(IntegrateError::BadSettings(
                "step sizes must satisfy h_min <= h_init <= h_max".into(),
            ));
        }
        if !(self.sample_stride > 0.0) {
            return Err(IntegrateError::BadSettings(
                "sample_stride must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One classical 4-stage Runge–Kutta step.
pub fn step_rk4(s: &SystemConfig, z: &State, h: f64) -> Result<State, IntegrateError> {
    if !(h > 0.0) {
        return Err(IntegrateError::Input("step size must be positive".into()));
    }
    if z.dim() != s.dim() {
        return Err(IntegrateError::Input(format!(
            "state dimension {} does not match system dimension {}",
            z.dim(),
            s.dim()
        )));
    }
    let z0 = z.to_flat();
    let m = z0.len();
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut tmp = vec![0.0; m];

    s.rhs_flat(&z0, &mut k1)?;
    for i in 0..m {
        tmp[i] = z0[i] + 0.5 * h * k1[i];
    }
    s.rhs_flat(&tmp, &mut k2)?;
    for i in 0..m {
        tmp[i] = z0[i] + 0.5 * h * k2[i];
    }
    s.rhs_flat(&tmp, &mut k3)?;
    for i in 0..m {
        tmp[i] = z0[i] + h * k3[i];
    }
    s.rhs_flat(&tmp, &mut k4)?;

    let mut out = vec![0.0; m];
    for i in 0..m {
        out[i] = z0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(IntegrateError::Overflow { t: 0.0 });
    }
    Ok(State::from_flat(&out))
}

/// One Störmer–Verlet (kick–drift–kick) step; only valid for a = 0, where
/// the system is the separable Hamiltonian flow of E = ½‖y‖² + W(x).
pub fn step_leapfrog(s: &SystemConfig, z: &State, h: f64) -> Result<State, IntegrateError> {
    if !s.is_conservative() {
        return Err(IntegrateError::LeapfrogRequiresConservative(s.damping()));
    }
    if z.dim() != s.dim() {
        return Err(IntegrateError::Input(format!(
            "state dimension {} does not match system dimension {}",
            z.dim(),
            s.dim()
        )));
    }
    let grad = s.potential().gradient(&z.x).map_err(DynamicsError::from)?;
    let y_half: Vec<f64> =
        z.y.iter()
            .zip(&grad)
            .map(|(y, g)| y - 0.5 * h * g)
            .collect();
    let x_new: Vec<f64> = z.x.iter().zip(&y_half).map(|(x, v)| x + h * v).collect();
    let grad_new = s
        .potential()
        .gradient(&x_new)
        .map_err(DynamicsError::from)?;
    let y_new: Vec<f64> = y_half
        .iter()
        .zip(&grad_new)
        .map(|(v, g)| v - 0.5 * h * g)
        .collect();
    if x_new.iter().chain(&y_new).any(|v| !v.is_finite()) {
        return Err(IntegrateError::Overflow { t: 0.0 });
    }
    Ok(State { x: x_new, y: y_new })
}

/// Early-stop rule for the adaptive driver: converged once the displacement
/// metric ‖x − target‖ + ‖y‖ stays within `conv_tol` at three consecutive
/// output samples (same target), escaped once the phase norm relative to
/// the first target reaches `escape_radius`.
struct EventSpec {
    targets: Vec<Vec<f64>>,
    conv_tol: f64,
    escape_radius: f64,
}

/// Integrates to `t_max`, sampling at multiples of `sample_stride` plus the
/// exact final time.
pub fn integrate_adaptive(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory, IntegrateError> {
    adaptive_driver(s, z0, t_max, settings, None)
}

/// Adaptive integration that stops early on convergence to the reference
/// equilibrium or on escape from the ball of radius `escape_radius`.
pub fn integrate_until(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    settings: &IntegratorSettings,
    conv_tol: f64,
    escape_radius: f64,
) -> Result<Trajectory, IntegrateError> {
    if !(conv_tol > 0.0) {
        return Err(IntegrateError::Input("conv_tol must be positive".into()));
    }
    if !(escape_radius > conv_tol) {
        return Err(IntegrateError::Input(
            "escape_radius must exceed conv_tol".into(),
        ));
    }
    let events = EventSpec {
        targets: vec![s.u_star().to_vec()],
        conv_tol,
        escape_radius,
    };
    adaptive_driver(s, z0, t_max, settings, Some(&events))
}

/// Like [`integrate_until`] but converges on the first of several targets;
/// used by basin mapping so mirror-image cells stop symmetrically.
pub fn integrate_until_near(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    settings: &IntegratorSettings,
    conv_tol: f64,
    escape_radius: f64,
    targets: &[Vec<f64>],
) -> Result<Trajectory, IntegrateError> {
    if targets.is_empty() {
        return Err(IntegrateError::Input(
            "at least one convergence target required".into(),
        ));
    }
    let events = EventSpec {
        targets: targets.to_vec(),
        conv_tol,
        escape_radius,
    };
    adaptive_driver(s, z0, t_max, settings, Some(&events))
}

// Dormand–Prince 5(4) tableau; stage times are irrelevant because the
// system is autonomous. k[6] is the FSAL stage.
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn adaptive_driver(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    settings: &IntegratorSettings,
    events: Option<&EventSpec>,
) -> Result<Trajectory, IntegrateError> {
    settings.validate()?;
    if !(t_max > 0.0) {
        return Err(IntegrateError::Input("t_max must be positive".into()));
    }
    if z0.dim() != s.dim() {
        return Err(IntegrateError::Input(format!(
            "initial state dimension {} does not match system dimension {}",
            z0.dim(),
            s.dim()
        )));
    }

    let stride = settings.sample_stride;
    let m = 2 * s.dim();
    let mut t = 0.0;
    let mut z = z0.to_flat();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; m]; 7];
    s.rhs_flat(&z, &mut k[0])?;
    if z.iter().chain(k[0].iter()).any(|v| !v.is_finite()) {
        return Err(IntegrateError::Overflow { t });
    }

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![z0.clone()],
        method: Method::Adaptive,
        steps_accepted: 0,
        steps_rejected: 0,
        terminal_event: None,
    };
    // Sample index bookkeeping: next output time is sample_idx * stride,
    // computed from the integer index so long runs do not accumulate error.
    let mut sample_idx: u64 = 1;
    let mut consecutive_converged = 0usize;
    let mut converged_target: Option<usize> = None;
    let time_slack = 1e-7 * stride;

    let mut h = settings.h_init.min(t_max);
    let mut tmp = vec![0.0; m];

    'outer: while t < t_max {
        let landing = h >= t_max - t;
        let h_step = if landing { t_max - t } else { h };

        // six derivative stages on top of the stored FSAL stage
        for stage in 1..7 {
            for i in 0..m {
                let mut acc = 0.0;
                for (j, a) in DP_A[stage][..stage].iter().enumerate() {
                    acc += a * k[j][i];
                }
                tmp[i] = z[i] + h_step * acc;
            }
            let (_, rest) = k.split_at_mut(stage);
            s.rhs_flat(&tmp, &mut rest[0])?;
            if rest[0].iter().any(|v| !v.is_finite()) {
                return Err(IntegrateError::Overflow { t });
            }
        }
        // 5th-order solution is the last stage evaluation point (FSAL)
        let mut z_new = vec![0.0; m];
        for i in 0..m {
            let mut acc = 0.0;
            for (j, a) in DP_A[6].iter().enumerate() {
                acc += a * k[j][i];
            }
            z_new[i] = z[i] + h_step * acc;
        }
        if z_new.iter().any(|v| !v.is_finite()) {
            return Err(IntegrateError::Overflow { t });
        }

        // embedded 4th-order error estimate, componentwise against
        // abs_tol + rel_tol * ||state||
        let scale = settings.abs_tol + settings.rel_tol * vec_norm(&z).max(vec_norm(&z_new));
        let err = (0..m)
            .map(|i| {
                let e: f64 = DP_E.iter().enumerate().map(|(j, c)| c * k[j][i]).sum();
                (h_step * e).abs()
            })
            .fold(0.0f64, f64::max)
            / scale;

        if err <= 1.0 {
            traj.steps_accepted += 1;
            let t_new = t + h_step;
            let f_new = k[6].clone();

            // dense output on [t, t_new] via cubic Hermite
            while (sample_idx as f64) * stride <= t_new + time_slack {
                let ts = sample_idx as f64 * stride;
                let theta = ((ts - t) / h_step).clamp(0.0, 1.0);
                let zi = hermite(&z, &k[0], &z_new, &f_new, h_step, theta);
                let state = State::from_flat(&zi);
                traj.times.push(ts);
                traj.states.push(state);
                sample_idx += 1;
                if let Some(ev) = events {
                    if let Some(event) =
                        check_events(&traj, ev, &mut consecutive_converged, &mut converged_target)
                    {
                        traj.terminal_event = Some(event);
                        break 'outer;
                    }
                }
            }

            t = t_new;
            z = z_new;
            k.swap(0, 6); // FSAL: reuse the last stage as the next first stage

            if t >= t_max {
                break;
            }
        } else {
            traj.steps_rejected += 1;
        }

        let factor = (0.9 * err.max(1e-30).powf(-0.2)).clamp(0.2, 5.0);
        h = (h_step * factor).min(settings.h_max);
        if h < settings.h_min {
            return Err(IntegrateError::StepUnderflow {
                t,
                h_min: settings.h_min,
            });
        }
    }

    if traj.terminal_event.is_none() {
        // land exactly on t_max unless a stride sample already covered it
        if traj.final_time() < t_max - time_slack {
            traj.times.push(t_max);
            traj.states.push(State::from_flat(&z));
        }
        traj.terminal_event = Some(TerminalEvent::TMaxReached);
    }
    if traj.len() < 2 {
        // t_max below one stride with immediate convergence; keep the
        // final point so the trajectory is well-formed
        traj.times.push(t);
        traj.states.push(State::from_flat(&z));
    }
    Ok(traj)
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn hermite(z0: &[f64], f0: &[f64], z1: &[f64], f1: &[f64], h: f64, theta: f64) -> Vec<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    z0.iter()
        .zip(f0)
        .zip(z1.iter().zip(f1))
        .map(|((z0i, f0i), (z1i, f1i))| h00 * z0i + h * h10 * f0i + h01 * z1i + h * h11 * f1i)
        .collect()
}

/// Checks the newest sample against the stop rule. Events are evaluated
/// from the second sample on so every trajectory keeps at least two rows.
fn check_events(
    traj: &Trajectory,
    ev: &EventSpec,
    consecutive: &mut usize,
    converged_target: &mut Option<usize>,
) -> Option<TerminalEvent> {
    let state = traj.states.last().unwrap();
    if state.phase_norm(&ev.targets[0]) >= ev.escape_radius {
        return Some(TerminalEvent::Escaped);
    }
    let near = ev
        .targets
        .iter()
        .enumerate()
        .find(|(_, tgt)| state.displacement_norm(tgt) <= ev.conv_tol)
        .map(|(i, _)| i);
    match near {
        Some(idx) if *converged_target == Some(idx) => *consecutive += 1,
        Some(idx) => {
            *converged_target = Some(idx);
            *consecutive = 1;
        }
        None => {
            *converged_target = None;
            *consecutive = 0;
        }
    }
    (*consecutive >= 3).then_some(TerminalEvent::Converged)
}

/// Fixed-step RK4 run sampled at multiples of `stride`; the step is rounded
/// down so that an integer number of substeps lands exactly on each sample.
pub fn integrate_rk4(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    h: f64,
    stride: f64,
) -> Result<Trajectory, IntegrateError> {
    fixed_driver(s, z0, t_max, h, stride, Method::Rk4)
}

/// Fixed-step leapfrog run (conservative case only).
pub fn integrate_leapfrog(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    h: f64,
    stride: f64,
) -> Result<Trajectory, IntegrateError> {
    if !s.is_conservative() {
        return Err(IntegrateError::LeapfrogRequiresConservative(s.damping()));
    }
    fixed_driver(s, z0, t_max, h, stride, Method::Leapfrog)
}

fn fixed_driver(
    s: &SystemConfig,
    z0: &State,
    t_max: f64,
    h: f64,
    stride: f64,
    method: Method,
) -> Result<Trajectory, IntegrateError> {
    if !(t_max > 0.0) {
        return Err(IntegrateError::Input("t_max must be positive".into()));
    }
    if !(h > 0.0) || !(stride > 0.0) {
        return Err(IntegrateError::Input(
            "step and stride must be positive".into(),
        ));
    }
    if z0.dim() != s.dim() {
        return Err(IntegrateError::Input(format!(
            "initial state dimension {} does not match system dimension {}",
            z0.dim(),
            s.dim()
        )));
    }
    let step = |z: &State, hh: f64| -> Result<State, IntegrateError> {
        match method {
            Method::Rk4 => step_rk4(s, z, hh),
            Method::Leapfrog => step_leapfrog(s, z, hh),
            Method::Adaptive => unreachable!("fixed driver only handles fixed-step methods"),
        }
    };

    let n_sub = (stride / h).ceil().max(1.0) as usize;
    let h_eff = stride / n_sub as f64;
    let full_intervals = (t_max / stride).floor() as u64;

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![z0.clone()],
        method,
        steps_accepted: 0,
        steps_rejected: 0,
        terminal_event: None,
    };
    let mut z = z0.clone();
    for idx in 1..=full_intervals {
        for _ in 0..n_sub {
            z = step(&z, h_eff)?;
        }
        traj.steps_accepted += n_sub;
        traj.times.push(idx as f64 * stride);
        traj.states.push(z.clone());
    }
    let covered = full_intervals as f64 * stride;
    let remainder = t_max - covered;
    if remainder > 1e-9 * stride {
        let m = (remainder / h_eff).ceil().max(1.0) as usize;
        let h_last = remainder / m as f64;
        for _ in 0..m {
            z = step(&z, h_last)?;
        }
        traj.steps_accepted += m;
        traj.times.push(t_max);
        traj.states.push(z);
    }
    if traj.len() < 2 {
        return Err(IntegrateError::Input(
            "t_max too short to produce two samples; reduce stride".into(),
        ));
    }
    traj.terminal_event = Some(TerminalEvent::TMaxReached);
    Ok(traj)
}
