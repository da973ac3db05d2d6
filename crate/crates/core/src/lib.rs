//! Numerical toolkit for damped second-order gradient systems
//!
//! ```text
//! ü + a·ů + ∇W(u) = 0,      a ≥ 0,
//! ```
//!
//! viewed as the first-order system (ẋ, ẏ) = (y, −a·y − ∇W(x)) on phase
//! space ℝ²ᴺ. The crate provides:
//!
//! * [`potentials`] — built-in potentials W, numeric probes for the local
//!   quadratic-control and coercivity hypotheses, and equilibrium search;
//! * [`dynamics`] — the vector field, the mechanical energy E, the strict
//!   Lyapunov functional V_a with its dissipation identity, closed-form
//!   decay constants, and absorbing-set radii;
//! * [`integrators`] — fixed-step RK4, an adaptive Dormand–Prince 5(4)
//!   pair with dense output, and a Störmer–Verlet leapfrog for the
//!   conservative case a = 0;
//! * [`analysis`] — trajectory-level verdicts: Lyapunov monotonicity,
//!   energy-balance residuals, exponential decay fits, damping-regime
//!   classification, critical-damping search, basin-of-attraction maps,
//!   closed-orbit detection, and damping sweeps.

// validation guards are written `!(x > 0.0)` so NaN inputs fail them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod integrators;
pub mod potentials;

mod linalg;
mod sampling;

pub use dynamics::{DecayConstants, State, SystemConfig};
pub use integrators::{IntegratorSettings, Method, TerminalEvent, Trajectory};
pub use potentials::{EquilibriumSet, LocalConstants, PotentialSpec};
