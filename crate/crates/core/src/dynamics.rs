//! The first-order phase-space formulation of ü + a·ů + ∇W(u) = 0:
//! vector field, mechanical energy, the strict Lyapunov functional V_a,
//! its dissipation identity, closed-form decay constants, and the
//! absorbing-set radius from the energy sublevel geometry.

use crate::linalg::{dot, norm, norm_sq, sub};
use crate::potentials::{LocalConstants, PotentialError, PotentialSpec, CRITICAL_POINT_TOL};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("dimension mismatch: system has dimension {expected}, state has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("damping coefficient must be nonnegative, got {0}")]
    NegativeDamping(f64),
    #[error("u_star is not an equilibrium: |grad W(u_star)| = {grad_norm:.3e} exceeds {tol:.1e}")]
    NotEquilibrium { grad_norm: f64, tol: f64 },
    #[error("conservative case has no decay rate (a = 0)")]
    ConservativeNoDecay,
    #[error("energy sublevel set reaches the probe-box boundary; probe box too small")]
    ProbeBoxTooSmall,
    #[error("no probed point lies in the energy sublevel set; bound below inf W?")]
    EmptySublevel,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Phase-space state (x, y) = (position, velocity).
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl State {
    /// Panics if `x` and `y` differ in length; states are always square.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(
            x.len(),
            y.len(),
            "position and velocity must have equal dimension"
        );
        State { x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn zeros(dim: usize) -> Self {
        State {
            x: vec![0.0; dim],
            y: vec![0.0; dim],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(2 * self.dim());
        z.extend_from_slice(&self.x);
        z.extend_from_slice(&self.y);
        z
    }

    pub fn from_flat(z: &[f64]) -> Self {
        let n = z.len() / 2;
        State {
            x: z[..n].to_vec(),
            y: z[n..].to_vec(),
        }
    }

    /// ‖x − u*‖ + ‖y‖, the displacement metric used for convergence checks.
    pub fn displacement_norm(&self, u_star: &[f64]) -> f64 {
        norm(&sub(&self.x, u_star)) + norm(&self.y)
    }

    /// Euclidean norm of (x − u*, y) in ℝ²ᴺ.
    pub fn phase_norm(&self, u_star: &[f64]) -> f64 {
        (norm_sq(&sub(&self.x, u_star)) + norm_sq(&self.y)).sqrt()
    }
}

/// A potential, a damping coefficient a ≥ 0 and a reference equilibrium u*.
/// `a = 0` selects the conservative case.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    potential: PotentialSpec,
    a: f64,
    u_star: Vec<f64>,
}

impl SystemConfig {
    pub fn new(potential: PotentialSpec, a: f64, u_star: Vec<f64>) -> Result<Self, DynamicsError> {
        if !(a >= 0.0) {
            return Err(DynamicsError::NegativeDamping(a));
        }
        if u_star.len() != potential.dimension() {
            return Err(DynamicsError::DimensionMismatch {
                expected: potential.dimension(),
                got: u_star.len(),
            });
        }
        let grad_norm = norm(&potential.gradient(&u_star)?);
        if grad_norm > CRITICAL_POINT_TOL {
            return Err(DynamicsError::NotEquilibrium {
                grad_norm,
                tol: CRITICAL_POINT_TOL,
            });
        }
        Ok(SystemConfig {
            potential,
            a,
            u_star,
        })
    }

    /// Reference equilibrium at the origin.
    pub fn at_origin(potential: PotentialSpec, a: f64) -> Result<Self, DynamicsError> {
        let dim = potential.dimension();
        SystemConfig::new(potential, a, vec![0.0; dim])
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn damping(&self) -> f64 {
        self.a
    }

    pub fn u_star(&self) -> &[f64] {
        &self.u_star
    }

    pub fn dim(&self) -> usize {
        self.potential.dimension()
    }

    pub fn is_conservative(&self) -> bool {
        self.a == 0.0
    }

    fn check_state(&self, z: &State) -> Result<(), DynamicsError> {
        if z.x.len() != self.dim() || z.y.len() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                got: z.x.len().max(z.y.len()),
            });
        }
        Ok(())
    }

    /// F_a(x, y) = (y, −a·y − ∇W(x)).
    pub fn vector_field(&self, z: &State) -> Result<State, DynamicsError> {
        self.check_state(z)?;
        let grad = self.potential.gradient(&z.x)?;
        let ydot: Vec<f64> =
            z.y.iter()
                .zip(&grad)
                .map(|(y, g)| -self.a * y - g)
                .collect();
        Ok(State {
            x: z.y.clone(),
            y: ydot,
        })
    }

    /// Vector field on the flattened state [x, y]; used by the integrators.
    pub(crate) fn rhs_flat(&self, z: &[f64], out: &mut [f64]) -> Result<(), DynamicsError> {
        let n = self.dim();
        let (x, y) = z.split_at(n);
        let grad = self.potential.gradient(x)?;
        out[..n].copy_from_slice(y);
        for i in 0..n {
            out[n + i] = -self.a * y[i] - grad[i];
        }
        Ok(())
    }

    /// Total energy E(x, y) = ½‖y‖² + W(x).
    pub fn energy(&self, z: &State) -> Result<f64, DynamicsError> {
        self.check_state(z)?;
        Ok(0.5 * norm_sq(&z.y) + self.potential.evaluate(&z.x)?)
    }

    /// Lyapunov functional V_a(x, y) = ½‖y‖² + 2W(x) + ½‖y + a(x − u*)‖².
    pub fn lyapunov(&self, z: &State) -> Result<f64, DynamicsError> {
        self.check_state(z)?;
        let mixed_sq: f64 =
            z.y.iter()
                .zip(&z.x)
                .zip(&self.u_star)
                .map(|((y, x), us)| {
                    let m = y + self.a * (x - us);
                    m * m
                })
                .sum();
        Ok(0.5 * norm_sq(&z.y) + 2.0 * self.potential.evaluate(&z.x)? + 0.5 * mixed_sq)
    }

    /// ⟨∇V_a, F_a⟩ in closed form: −a‖y‖² − a⟨∇W(x), x − u*⟩.
    pub fn lyapunov_dissipation(&self, z: &State) -> Result<f64, DynamicsError> {
        self.check_state(z)?;
        let grad = self.potential.gradient(&z.x)?;
        let offset = sub(&z.x, &self.u_star);
        Ok(-self.a * norm_sq(&z.y) - self.a * dot(&grad, &offset))
    }
}

/// Norm-equivalence and exponential-rate constants:
/// m₁ = min{½, 2α}, m₂(a) = max{3/2, 2β + a²}, γ(a) = a·min{1, μ}/m₂(a),
/// so that m₁‖z‖² ≤ V_a(z) ≤ m₂‖z‖² and V_a decays at rate γ(a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConstants {
    pub m1: f64,
    pub m2: f64,
    pub gamma: f64,
}

pub fn decay_constants(
    s: &SystemConfig,
    lc: &LocalConstants,
) -> Result<DecayConstants, DynamicsError> {
    if s.is_conservative() {
        return Err(DynamicsError::ConservativeNoDecay);
    }
    let a = s.damping();
    let m1 = 0.5f64.min(2.0 * lc.alpha);
    let m2 = 1.5f64.max(2.0 * lc.beta + a * a);
    let gamma = a * 1.0f64.min(lc.mu) / m2;
    Ok(DecayConstants { m1, m2, gamma })
}

/// Phase-space norm bound R = √(C_B + 2·energy_bound) with
/// C_B = sup{‖x‖² : W(x) ≤ energy_bound}, estimated by a grid scan over
/// the probe box with local refinement around the maximizer.
pub fn absorbing_radius(
    s: &SystemConfig,
    energy_bound: f64,
    probe_box: &[(f64, f64)],
) -> Result<f64, DynamicsError> {
    if s.is_conservative() {
        return Err(DynamicsError::InvalidArgument(
            "absorbing-set estimate requires a damped system (a > 0)".into(),
        ));
    }
    if probe_box.len() != s.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: s.dim(),
            got: probe_box.len(),
        });
    }
    if probe_box.iter().any(|(lo, hi)| !(hi > lo)) {
        return Err(DynamicsError::InvalidArgument(
            "probe box must be nondegenerate".into(),
        ));
    }

    const GRID: usize = 201;
    let potential = s.potential();
    let scan = |bbox: &[(f64, f64)],
                check_boundary: bool|
     -> Result<Option<(f64, Vec<f64>)>, DynamicsError> {
        let n = bbox.len();
        let total = GRID.pow(n as u32);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for flat in 0..total {
            let mut idx = flat;
            let mut pt = Vec::with_capacity(n);
            let mut on_boundary = false;
            for (lo, hi) in bbox {
                let i = idx % GRID;
                idx /= GRID;
                if i == 0 || i == GRID - 1 {
                    on_boundary = true;
                }
                pt.push(lo + (hi - lo) * i as f64 / (GRID - 1) as f64);
            }
            let w = potential.evaluate(&pt)?;
            if w <= energy_bound {
                if check_boundary && on_boundary {
                    return Err(DynamicsError::ProbeBoxTooSmall);
                }
                let r2 = norm_sq(&pt);
                if best.as_ref().is_none_or(|(b, _)| r2 > *b) {
                    best = Some((r2, pt));
                }
            }
        }
        Ok(best)
    };

    let (mut c_b, mut argmax) = scan(probe_box, true)?.ok_or(DynamicsError::EmptySublevel)?;
    let mut cells: Vec<f64> = probe_box
        .iter()
        .map(|(lo, hi)| (hi - lo) / (GRID - 1) as f64)
        .collect();
    for _ in 0..3 {
        let refined_box: Vec<(f64, f64)> = argmax
            .iter()
            .zip(&cells)
            .zip(probe_box)
            .map(|((c, cell), (lo, hi))| ((c - 2.0 * cell).max(*lo), (c + 2.0 * cell).min(*hi)))
            .collect();
        if let Some((r2, pt)) = scan(&refined_box, false)? {
            if r2 > c_b {
                c_b = r2;
                argmax = pt;
            }
        }
        cells = refined_box
            .iter()
            .map(|(lo, hi)| (hi - lo) / (GRID - 1) as f64)
            .collect();
    }

    Ok((c_b + 2.0 * energy_bound).sqrt())
}
