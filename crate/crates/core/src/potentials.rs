//! Potentials W : ℝᴺ → ℝ, their analytic gradients, and numeric probes for
//! the structural hypotheses the stability theory relies on: local quadratic
//! control near a minimizer, radial monotonicity of ∇W, and coercivity.
//!
//! The probes are sampling-based. They produce evidence, never certificates:
//! a verdict of "consistent" means the hypothesis held on every sampled
//! point, and a violation report pinpoints a sample where it failed.

use crate::linalg::{dot, norm, norm_sq, sub};
use crate::sampling;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("dimension mismatch: potential has dimension {expected}, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid potential construction: {0}")]
    Construction(String),
    #[error("reference point is not a critical point: |grad| = {grad_norm:.3e} exceeds {tol:.1e}")]
    NotCritical { grad_norm: f64, tol: f64 },
    #[error("quadratic-control hypothesis fails on the probed ball: {0}")]
    HypothesisViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A potential on ℝᴺ with closed-form value and gradient.
///
/// * `Quadratic`: W(x) = ½‖x‖²
/// * `DoubleWell` (N = 1): W(u) = ¼(u² − 1)²
/// * `QuarticSymmetric` (N = 1): W(u) = u²(u² − 1)²
/// * `GinzburgLandau`: W(x) = ¼(‖x‖² − 1)²
/// * `Exponential`: W(x) = ½(e^{‖x‖²} − 1)
/// * `Shifted`: W(x) = inner(x − shift)
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Quadratic {
        dim: usize,
    },
    DoubleWell,
    QuarticSymmetric,
    GinzburgLandau {
        dim: usize,
    },
    Exponential {
        dim: usize,
    },
    Shifted {
        inner: Box<PotentialSpec>,
        shift: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn quadratic(dim: usize) -> Result<Self, PotentialError> {
        if dim == 0 {
            return Err(PotentialError::Construction(
                "dimension must be positive".into(),
            ));
        }
        Ok(PotentialSpec::Quadratic { dim })
    }

    pub fn double_well() -> Self {
        PotentialSpec::DoubleWell
    }

    pub fn quartic_symmetric() -> Self {
        PotentialSpec::QuarticSymmetric
    }

    pub fn ginzburg_landau(dim: usize) -> Result<Self, PotentialError> {
        if dim == 0 {
            return Err(PotentialError::Construction(
                "dimension must be positive".into(),
            ));
        }
        Ok(PotentialSpec::GinzburgLandau { dim })
    }

    pub fn exponential(dim: usize) -> Result<Self, PotentialError> {
        if dim == 0 {
            return Err(PotentialError::Construction(
                "dimension must be positive".into(),
            ));
        }
        Ok(PotentialSpec::Exponential { dim })
    }

    pub fn shifted(inner: PotentialSpec, shift: Vec<f64>) -> Result<Self, PotentialError> {
        if shift.len() != inner.dimension() {
            return Err(PotentialError::Construction(format!(
                "shift has length {} but inner potential has dimension {}",
                shift.len(),
                inner.dimension()
            )));
        }
        Ok(PotentialSpec::Shifted {
            inner: Box::new(inner),
            shift,
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            PotentialSpec::Quadratic { dim }
            | PotentialSpec::GinzburgLandau { dim }
            | PotentialSpec::Exponential { dim } => *dim,
            PotentialSpec::DoubleWell | PotentialSpec::QuarticSymmetric => 1,
            PotentialSpec::Shifted { inner, .. } => inner.dimension(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), PotentialError> {
        if x.len() != self.dimension() {
            return Err(PotentialError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// W(x).
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, PotentialError> {
        self.check_dim(x)?;
        Ok(match self {
            PotentialSpec::Quadratic { .. } => 0.5 * norm_sq(x),
            PotentialSpec::DoubleWell => {
                let u = x[0];
                let s = u * u - 1.0;
                0.25 * s * s
            }
            PotentialSpec::QuarticSymmetric => {
                let u = x[0];
                let s = u * u - 1.0;
                u * u * s * s
            }
            PotentialSpec::GinzburgLandau { .. } => {
                let s = norm_sq(x) - 1.0;
                0.25 * s * s
            }
            PotentialSpec::Exponential { .. } => 0.5 * (norm_sq(x).exp() - 1.0),
            PotentialSpec::Shifted { inner, shift } => inner.evaluate(&sub(x, shift))?,
        })
    }

    /// ∇W(x).
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, PotentialError> {
        self.check_dim(x)?;
        Ok(match self {
            PotentialSpec::Quadratic { .. } => x.to_vec(),
            PotentialSpec::DoubleWell => {
                let u = x[0];
                vec![u * (u * u - 1.0)]
            }
            PotentialSpec::QuarticSymmetric => {
                let u = x[0];
                let s = u * u - 1.0;
                vec![2.0 * u * s * (3.0 * u * u - 1.0)]
            }
            PotentialSpec::GinzburgLandau { .. } => {
                let s = norm_sq(x) - 1.0;
                x.iter().map(|c| s * c).collect()
            }
            PotentialSpec::Exponential { .. } => {
                let e = norm_sq(x).exp();
                x.iter().map(|c| c * e).collect()
            }
            PotentialSpec::Shifted { inner, shift } => inner.gradient(&sub(x, shift))?,
        })
    }
}

/// Tolerance below which a gradient norm counts as "critical point".
pub const CRITICAL_POINT_TOL: f64 = 1e-8;

/// Quadratic-control constants probed on a ball B_radius(u*):
/// α‖x−u*‖² ≤ W(x) ≤ β‖x−u*‖² and ⟨∇W(x), x−u*⟩ ≥ μ‖x−u*‖².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalConstants {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub radius: f64,
}

/// Safety margin applied to probed constants: α and μ shrink, β grows, so
/// downstream decay-rate estimates err small rather than large.
const CONSERVATIVE_MARGIN: f64 = 0.01;

/// Estimates the quadratic-control constants by sampling concentric shells
/// of B_radius(u_star). Deterministic given `seed`.
pub fn estimate_local_constants(
    p: &PotentialSpec,
    u_star: &[f64],
    radius: f64,
    sample_count: usize,
    seed: u64,
) -> Result<LocalConstants, PotentialError> {
    p.check_dim(u_star)?;
    if radius <= 0.0 {
        return Err(PotentialError::InvalidArgument(
            "radius must be positive".into(),
        ));
    }
    if sample_count == 0 {
        return Err(PotentialError::InvalidArgument(
            "sample_count must be positive".into(),
        ));
    }
    let grad_norm = norm(&p.gradient(u_star)?);
    if grad_norm > CRITICAL_POINT_TOL {
        return Err(PotentialError::NotCritical {
            grad_norm,
            tol: CRITICAL_POINT_TOL,
        });
    }

    let n = p.dimension();
    let shells = sample_count.clamp(1, 16);
    let per_shell = sample_count.div_ceil(shells);
    let mut rng = sampling::rng_from_seed(seed);

    let mut alpha = f64::INFINITY;
    let mut beta = f64::NEG_INFINITY;
    let mut mu = f64::INFINITY;
    for shell in 1..=shells {
        let rho = radius * shell as f64 / shells as f64;
        for _ in 0..per_shell {
            let dir = sampling::unit_vector(&mut rng, n);
            let x: Vec<f64> = u_star.iter().zip(&dir).map(|(c, d)| c + rho * d).collect();
            let offset = sub(&x, u_star);
            let r2 = norm_sq(&offset);
            let w = p.evaluate(&x)?;
            let g = p.gradient(&x)?;
            let value_ratio = w / r2;
            let slope_ratio = dot(&g, &offset) / r2;
            if value_ratio <= 0.0 {
                return Err(PotentialError::HypothesisViolation(format!(
                    "W(x)/|x-u*|^2 = {value_ratio:.3e} <= 0 at |x-u*| = {rho:.3e}"
                )));
            }
            if slope_ratio <= 0.0 {
                return Err(PotentialError::HypothesisViolation(format!(
                    "<grad W, x-u*>/|x-u*|^2 = {slope_ratio:.3e} <= 0 at |x-u*| = {rho:.3e}"
                )));
            }
            alpha = alpha.min(value_ratio);
            beta = beta.max(value_ratio);
            mu = mu.min(slope_ratio);
        }
    }

    Ok(LocalConstants {
        alpha: alpha * (1.0 - CONSERVATIVE_MARGIN),
        beta: beta * (1.0 + CONSERVATIVE_MARGIN),
        mu: mu * (1.0 - CONSERVATIVE_MARGIN),
        radius,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoercivityVerdict {
    ConsistentWithCoercive,
    Inconclusive,
}

/// Per-radius sphere minima of W plus a growth verdict. Report-only; a
/// finite probe cannot certify a limit statement.
#[derive(Debug, Clone)]
pub struct CoercivityReport {
    /// (radius, min over sampled directions of W on that sphere)
    pub minima: Vec<(f64, f64)>,
    pub verdict: CoercivityVerdict,
    pub growth_factor: f64,
}

pub const DEFAULT_COERCIVITY_GROWTH_FACTOR: f64 = 10.0;

pub fn probe_coercivity(
    p: &PotentialSpec,
    radii: &[f64],
    directions_per_radius: usize,
) -> Result<CoercivityReport, PotentialError> {
    probe_coercivity_with(
        p,
        radii,
        directions_per_radius,
        DEFAULT_COERCIVITY_GROWTH_FACTOR,
    )
}

pub fn probe_coercivity_with(
    p: &PotentialSpec,
    radii: &[f64],
    directions_per_radius: usize,
    growth_factor: f64,
) -> Result<CoercivityReport, PotentialError> {
    if radii.is_empty() {
        return Err(PotentialError::InvalidArgument(
            "radii must be non-empty".into(),
        ));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(PotentialError::InvalidArgument(
            "radii must be positive and strictly ascending".into(),
        ));
    }
    if directions_per_radius == 0 {
        return Err(PotentialError::InvalidArgument(
            "directions_per_radius must be positive".into(),
        ));
    }
    let n = p.dimension();
    // Fixed seed: the probe has no seed parameter but must stay deterministic.
    let mut rng = sampling::rng_from_seed(0x5EED);
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[axis] = sign;
            directions.push(d);
        }
    }
    while directions.len() < directions_per_radius.max(2 * n) {
        directions.push(sampling::unit_vector(&mut rng, n));
    }

    let mut minima = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut min_w = f64::INFINITY;
        for d in &directions {
            let x: Vec<f64> = d.iter().map(|c| c * r).collect();
            min_w = min_w.min(p.evaluate(&x)?);
        }
        minima.push((r, min_w));
    }

    let tail = if minima.len() >= 3 {
        &minima[minima.len() - 3..]
    } else {
        &minima[..]
    };
    let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    let first = minima[0].1;
    let last = minima[minima.len() - 1].1;
    let grew = last > growth_factor * first;
    let verdict = if increasing && grew {
        CoercivityVerdict::ConsistentWithCoercive
    } else {
        CoercivityVerdict::Inconclusive
    };
    Ok(CoercivityReport {
        minima,
        verdict,
        growth_factor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Minimum,
    SaddleOrMaximum,
    Unresolved,
}

/// Discrete equilibria found by the grid-seeded search, with a flag for a
/// suspected continuum of equilibria (e.g. a sphere of minima) whose sample
/// points are reported separately.
#[derive(Debug, Clone)]
pub struct EquilibriumSet {
    pub points: Vec<Vec<f64>>,
    pub classifications: Vec<Classification>,
    pub continuum_suspected: bool,
    pub continuum_samples: Vec<Vec<f64>>,
    pub note: Option<String>,
}

impl EquilibriumSet {
    pub fn minima(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .zip(&self.classifications)
            .filter(|(_, c)| **c == Classification::Minimum)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EquilibriaOptions {
    /// Points are merged when closer than `merge_radius_factor * tol`.
    pub merge_radius_factor: f64,
    /// More than this many mutually distinct points at one W level trips
    /// the continuum flag.
    pub continuum_count: usize,
    pub max_newton_iters: usize,
    pub max_descent_iters: usize,
}

impl Default for EquilibriaOptions {
    fn default() -> Self {
        // merge radius 10·tol separates the double-well triple at any
        // tol <= 1e-3 while absorbing solver jitter
        EquilibriaOptions {
            merge_radius_factor: 10.0,
            continuum_count: 8,
            max_newton_iters: 80,
            max_descent_iters: 400,
        }
    }
}

pub fn find_equilibria(
    p: &PotentialSpec,
    search_box: &[(f64, f64)],
    grid_per_axis: usize,
    tol: f64,
) -> Result<EquilibriumSet, PotentialError> {
    find_equilibria_with(
        p,
        search_box,
        grid_per_axis,
        tol,
        EquilibriaOptions::default(),
    )
}

pub fn find_equilibria_with(
    p: &PotentialSpec,
    search_box: &[(f64, f64)],
    grid_per_axis: usize,
    tol: f64,
    opts: EquilibriaOptions,
) -> Result<EquilibriumSet, PotentialError> {
    let n = p.dimension();
    if search_box.len() != n {
        return Err(PotentialError::DimensionMismatch {
            expected: n,
            got: search_box.len(),
        });
    }
    if search_box.iter().any(|(lo, hi)| !(hi > lo)) {
        return Err(PotentialError::InvalidArgument(
            "search box must be nondegenerate".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(PotentialError::InvalidArgument(
            "tol must be positive".into(),
        ));
    }
    if grid_per_axis == 0 {
        return Err(PotentialError::InvalidArgument(
            "grid_per_axis must be positive".into(),
        ));
    }
    let seeds = grid_points(search_box, grid_per_axis);

    let mut converged: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        if let Some(pt) = refine_to_critical_point(p, &seed, tol, &opts) {
            converged.push(pt);
        }
    }
    if converged.is_empty() {
        return Ok(EquilibriumSet {
            points: Vec::new(),
            classifications: Vec::new(),
            continuum_suspected: false,
            continuum_samples: Vec::new(),
            note: Some("no seed converged; equilibria unresolved".into()),
        });
    }

    // Merge within 10·tol, keeping the first representative of each cluster.
    let merge_radius = opts.merge_radius_factor * tol;
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for pt in converged {
        if reps.iter().all(|r| norm(&sub(&pt, r)) > merge_radius) {
            reps.push(pt);
        }
    }
    reps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    // Group representatives by W level; an oversized level set suggests a
    // continuum of equilibria rather than isolated critical points.
    let mut values: Vec<f64> = Vec::with_capacity(reps.len());
    for r in &reps {
        values.push(p.evaluate(r)?);
    }
    let mut continuum_samples = Vec::new();
    let mut keep = vec![true; reps.len()];
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut group_start = 0;
    while group_start < order.len() {
        let mut group_end = group_start + 1;
        let w0 = values[order[group_start]];
        while group_end < order.len()
            && (values[order[group_end]] - w0).abs() <= 1e-8 * (1.0 + w0.abs())
        {
            group_end += 1;
        }
        if group_end - group_start > opts.continuum_count {
            for &idx in &order[group_start..group_end] {
                keep[idx] = false;
                continuum_samples.push(reps[idx].clone());
            }
        }
        group_start = group_end;
    }
    let continuum_suspected = !continuum_samples.is_empty();
    let points: Vec<Vec<f64>> = reps
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(r, _)| r.clone())
        .collect();

    let class_radius = (100.0 * tol).clamp(1e-5, 0.05);
    let mut classifications = Vec::with_capacity(points.len());
    for pt in &points {
        classifications.push(classify_point(p, pt, class_radius)?);
    }

    Ok(EquilibriumSet {
        points,
        classifications,
        continuum_suspected,
        continuum_samples,
        note: None,
    })
}

fn grid_points(search_box: &[(f64, f64)], grid_per_axis: usize) -> Vec<Vec<f64>> {
    let n = search_box.len();
    let mut points = Vec::new();
    let total = grid_per_axis.pow(n as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut pt = Vec::with_capacity(n);
        for (lo, hi) in search_box {
            let i = idx % grid_per_axis;
            idx /= grid_per_axis;
            let t = if grid_per_axis == 1 {
                0.5
            } else {
                i as f64 / (grid_per_axis - 1) as f64
            };
            pt.push(lo + t * (hi - lo));
        }
        points.push(pt);
    }
    points
}

/// Damped Newton on ∇W = 0 with a finite-difference Hessian; falls back to
/// backtracking gradient descent on ½‖∇W‖² when the Newton step stalls.
fn refine_to_critical_point(
    p: &PotentialSpec,
    seed: &[f64],
    tol: f64,
    opts: &EquilibriaOptions,
) -> Option<Vec<f64>> {
    let mut x = seed.to_vec();
    for _ in 0..opts.max_newton_iters {
        let grad = p.gradient(&x).ok()?;
        let gnorm = norm(&grad);
        if !gnorm.is_finite() {
            return None;
        }
        if gnorm <= tol {
            return Some(x);
        }
        let mut advanced = false;
        if let Some(hess) = fd_hessian(p, &x) {
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            if let Some(step) = crate::linalg::solve_dense(hess, rhs) {
                let mut damping = 1.0;
                for _ in 0..30 {
                    let cand: Vec<f64> =
                        x.iter().zip(&step).map(|(c, s)| c + damping * s).collect();
                    if let Ok(g2) = p.gradient(&cand) {
                        let gn2 = norm(&g2);
                        if gn2.is_finite() && gn2 < gnorm {
                            x = cand;
                            advanced = true;
                            break;
                        }
                    }
                    damping *= 0.5;
                }
            }
        }
        if !advanced && !descend_grad_norm(p, &mut x, opts.max_descent_iters) {
            return None;
        }
    }
    let grad = p.gradient(&x).ok()?;
    (norm(&grad) <= tol).then_some(x)
}

/// Backtracking gradient descent on g(x) = ½‖∇W(x)‖². Returns false when no
/// descent step of any size improves g (stalled).
fn descend_grad_norm(p: &PotentialSpec, x: &mut Vec<f64>, max_iters: usize) -> bool {
    let g = |pt: &[f64]| -> Option<f64> { Some(0.5 * norm_sq(&p.gradient(pt).ok()?)) };
    let mut improved_any = false;
    for _ in 0..max_iters {
        let g0 = match g(x) {
            Some(v) if v.is_finite() => v,
            _ => return false,
        };
        let descent = match fd_gradient_of(|pt| g(pt), x) {
            Some(d) => d,
            None => return improved_any,
        };
        let dnorm = norm(&descent);
        if dnorm < 1e-300 {
            return improved_any;
        }
        let mut step = 1.0 / dnorm.max(1.0);
        let mut stepped = false;
        for _ in 0..50 {
            let cand: Vec<f64> = x.iter().zip(&descent).map(|(c, d)| c - step * d).collect();
            if let Some(gc) = g(&cand) {
                if gc < g0 {
                    *x = cand;
                    stepped = true;
                    improved_any = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !stepped {
            return improved_any;
        }
    }
    improved_any
}

fn fd_gradient_of<F: Fn(&[f64]) -> Option<f64>>(f: F, x: &[f64]) -> Option<Vec<f64>> {
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        grad.push((f(&xp)? - f(&xm)?) / (2.0 * h));
    }
    Some(grad)
}

/// Central-difference Hessian columns from the analytic gradient.
fn fd_hessian(p: &PotentialSpec, x: &[f64]) -> Option<Vec<Vec<f64>>> {
    let n = x.len();
    let mut hess = vec![vec![0.0; n]; n];
    for j in 0..n {
        let h = 1e-5 * (1.0 + x[j].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let gp = p.gradient(&xp).ok()?;
        let gm = p.gradient(&xm).ok()?;
        for i in 0..n {
            hess[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            if !hess[i][j].is_finite() {
                return None;
            }
        }
    }
    Some(hess)
}

/// Minimum iff W at the point lies strictly below W at every probe on a
/// small surrounding sphere.
fn classify_point(
    p: &PotentialSpec,
    pt: &[f64],
    radius: f64,
) -> Result<Classification, PotentialError> {
    let n = pt.len();
    let w0 = p.evaluate(pt)?;
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[axis] = sign;
            directions.push(d);
        }
    }
    let mut rng = sampling::rng_from_seed(0xC1A55);
    for _ in 0..(4 * n) {
        directions.push(sampling::unit_vector(&mut rng, n));
    }
    let mut all_above = true;
    let mut any_nonfinite = false;
    for d in &directions {
        let x: Vec<f64> = pt.iter().zip(d).map(|(c, dc)| c + radius * dc).collect();
        let w = p.evaluate(&x)?;
        if !w.is_finite() {
            any_nonfinite = true;
            continue;
        }
        if w <= w0 {
            all_above = false;
        }
    }
    if any_nonfinite {
        return Ok(Classification::Unresolved);
    }
    Ok(if all_above {
        Classification::Minimum
    } else {
        Classification::SaddleOrMaximum
    })
}
