#![allow(dead_code)] // each test target uses a subset

//! Shared oracles for the integration tests. Everything here is computed
//! independently of the library's solvers: closed forms from characteristic
//! roots and plain quadrature.

/// Exact solution of ü + a·ů + u = 0 (unit quadratic potential) from the
/// roots of λ² + aλ + 1 = 0. Returns (x(t), y(t)).
pub fn linear_oracle(a: f64, x0: f64, y0: f64, t: f64) -> (f64, f64) {
    assert!(a >= 0.0);
    if a == 2.0 {
        // double root λ = −1
        let c = y0 + x0;
        let e = (-t).exp();
        ((x0 + c * t) * e, (y0 - c * t) * e)
    } else if a < 2.0 {
        let sigma = a / 2.0;
        let omega = (1.0 - sigma * sigma).sqrt();
        let b = (y0 + sigma * x0) / omega;
        let e = (-sigma * t).exp();
        let (s, c) = (omega * t).sin_cos();
        let x = e * (x0 * c + b * s);
        let y = e * ((-sigma * x0 + omega * b) * c + (-sigma * b - omega * x0) * s);
        (x, y)
    } else {
        let d = (a * a / 4.0 - 1.0).sqrt();
        let l1 = -a / 2.0 + d;
        let l2 = -a / 2.0 - d;
        let ca = (y0 - l2 * x0) / (l1 - l2);
        let cb = x0 - ca;
        let (e1, e2) = ((l1 * t).exp(), (l2 * t).exp());
        (ca * e1 + cb * e2, ca * l1 * e1 + cb * l2 * e2)
    }
}

/// Period of the conservative one-dimensional orbit at energy `energy`:
/// T = 2 ∫ dx / √(2(E − W(x))) over the turning interval, computed with the
/// substitution x = mid + amp·sin(s) which removes the endpoint
/// singularities, then composite Simpson.
pub fn period_quadrature<W: Fn(f64) -> f64>(w: W, energy: f64, x_lo: f64, x_hi: f64) -> f64 {
    let mid = 0.5 * (x_lo + x_hi);
    let amp = 0.5 * (x_hi - x_lo);
    let integrand = |s: f64| -> f64 {
        let x = mid + amp * s.sin();
        let v2 = 2.0 * (energy - w(x));
        if v2 <= 0.0 {
            // only possible by rounding at the endpoints; the cos factor
            // vanishes there anyway
            return 0.0;
        }
        amp * s.cos() / v2.sqrt()
    };
    let n = 20_000;
    let (a, b) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let h = (b - a) / n as f64;
    let mut sum = integrand(a) + integrand(b);
    for k in 1..n {
        let coeff = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += coeff * integrand(a + k as f64 * h);
    }
    2.0 * sum * h / 3.0
}

/// Bisection for the turning point W(x) = energy on [lo, hi].
pub fn turning_point<W: Fn(f64) -> f64>(w: W, energy: f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(
        (w(lo) - energy) * (w(hi) - energy) < 0.0,
        "turning point not bracketed"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (w(lo) - energy) * (w(mid) - energy) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Deterministic point in the unit ball of ℝ²ᴺ, split into (x, y).
pub fn random_phase_point(
    rng: &mut rand_chacha::ChaCha8Rng,
    n: usize,
    radius: f64,
) -> (Vec<f64>, Vec<f64>) {
    use rand::Rng;
    loop {
        let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().map(|c| c * c).sum();
        if norm2 <= 1.0 && norm2 > 1e-6 {
            let x = v[..n].iter().map(|c| c * radius).collect();
            let y = v[n..].iter().map(|c| c * radius).collect();
            return (x, y);
        }
    }
}
