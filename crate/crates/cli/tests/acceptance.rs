//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test -- --nocapture`). Tolerances
//! are pinned in code next to each check.

use grad2_core::analysis::{
    basin_map, closed_orbit_check, find_critical_damping, fit_decay_rate,
    verify_energy_dissipation, verify_lyapunov_monotonicity, GridAxis, GridSpec,
};
use grad2_core::dynamics::{absorbing_radius, decay_constants};
use grad2_core::integrators::{integrate_adaptive, integrate_leapfrog};
use grad2_core::potentials::LocalConstants;
use grad2_core::{IntegratorSettings, PotentialSpec, State, SystemConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quadratic() -> PotentialSpec {
    PotentialSpec::quadratic(1).unwrap()
}

fn quad_sys(a: f64) -> SystemConfig {
    SystemConfig::at_origin(quadratic(), a).unwrap()
}

/// Exact quadratic-control constants of W = ½x²: α = β = ½, μ = 1.
fn exact_quad_constants() -> LocalConstants {
    LocalConstants {
        alpha: 0.5,
        beta: 0.5,
        mu: 1.0,
        radius: f64::INFINITY,
    }
}

/// Closed form for ü + a·ů + u = 0 from the roots of λ² + aλ + 1 = 0.
fn linear_oracle(a: f64, x0: f64, y0: f64, t: f64) -> (f64, f64) {
    if a == 2.0 {
        let c = y0 + x0;
        let e = (-t).exp();
        ((x0 + c * t) * e, (y0 - c * t) * e)
    } else if a < 2.0 {
        let sigma = a / 2.0;
        let omega = (1.0 - sigma * sigma).sqrt();
        let b = (y0 + sigma * x0) / omega;
        let e = (-sigma * t).exp();
        let (s, c) = (omega * t).sin_cos();
        (
            e * (x0 * c + b * s),
            e * ((-sigma * x0 + omega * b) * c + (-sigma * b - omega * x0) * s),
        )
    } else {
        let d = (a * a / 4.0 - 1.0).sqrt();
        let (l1, l2) = (-a / 2.0 + d, -a / 2.0 - d);
        let ca = (y0 - l2 * x0) / (l1 - l2);
        let cb = x0 - ca;
        (
            ca * (l1 * t).exp() + cb * (l2 * t).exp(),
            ca * l1 * (l1 * t).exp() + cb * l2 * (l2 * t).exp(),
        )
    }
}

/// Tight settings shared by the criterion-1/2 runs so the a = 0 energy
/// drift target (1e-8) is attainable.
fn tight_settings() -> IntegratorSettings {
    IntegratorSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        ..IntegratorSettings::default()
    }
}

const SWEEP_DAMPINGS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 3.5, 6.0];

#[test]
fn criterion_01_linear_oracle() {
    let mut worst = 0.0f64;
    for &a in &SWEEP_DAMPINGS {
        let s = quad_sys(a);
        let z0 = State::new(vec![2.0], vec![0.0]);
        let traj = integrate_adaptive(&s, &z0, 15.0, &tight_settings()).unwrap();
        for (t, z) in traj.times.iter().zip(&traj.states) {
            let (x, y) = linear_oracle(a, 2.0, 0.0, *t);
            worst = worst.max((z.x[0] - x).abs()).max((z.y[0] - y).abs());
        }
    }
    assert!(
        worst <= 1e-6,
        "criterion 1 (linear oracle): FAIL - max state error {worst:.3e} > 1e-6"
    );
    println!("criterion 1 (linear oracle): PASS - max state error {worst:.3e}");
}

#[test]
fn criterion_02_energy_dissipation() {
    let settings = IntegratorSettings {
        sample_stride: 0.01,
        ..tight_settings()
    };
    let z0 = State::new(vec![2.0], vec![0.0]);
    // damped runs: |E(t) - E(0) + a * integral of |y|^2| <= 1e-4 (1 + E0)
    let mut worst_damped = 0.0f64;
    for &a in SWEEP_DAMPINGS.iter().filter(|a| **a > 0.0) {
        let s = quad_sys(a);
        let traj = integrate_adaptive(&s, &z0, 15.0, &settings).unwrap();
        let res = verify_energy_dissipation(&traj, &s).unwrap().max_residual;
        let e0 = s.energy(&z0).unwrap();
        assert!(
            res <= 1e-4 * (1.0 + e0),
            "criterion 2 (energy dissipation): FAIL - a = {a}: residual {res:.3e}"
        );
        worst_damped = worst_damped.max(res);
    }
    // conservative adaptive run: |E(t) - E(0)| <= 1e-8
    let s = quad_sys(0.0);
    let traj = integrate_adaptive(&s, &z0, 15.0, &settings).unwrap();
    let e0 = s.energy(&z0).unwrap();
    let mut drift_adaptive = 0.0f64;
    for z in &traj.states {
        drift_adaptive = drift_adaptive.max((s.energy(z).unwrap() - e0).abs());
    }
    assert!(
        drift_adaptive <= 1e-8,
        "criterion 2 (energy dissipation): FAIL - adaptive a = 0 drift {drift_adaptive:.3e} > 1e-8"
    );
    // leapfrog over 1000 periods at h = 0.01: |E - E0| <= 1e-3 E0
    let t_max = 1000.0 * std::f64::consts::TAU;
    let traj = integrate_leapfrog(&s, &z0, t_max, 0.01, 0.1).unwrap();
    let mut drift_leapfrog = 0.0f64;
    for z in &traj.states {
        drift_leapfrog = drift_leapfrog.max((s.energy(z).unwrap() - e0).abs());
    }
    assert!(
        drift_leapfrog <= 1e-3 * e0,
        "criterion 2 (energy dissipation): FAIL - leapfrog drift {drift_leapfrog:.3e}"
    );
    println!(
        "criterion 2 (energy dissipation): PASS - damped residual {worst_damped:.3e}, \
         adaptive drift {drift_adaptive:.3e}, leapfrog drift {drift_leapfrog:.3e}"
    );
}

#[test]
fn criterion_03_strict_lyapunov_decrease() {
    let settings = IntegratorSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(30303);
    let mut worst = f64::NEG_INFINITY;
    for &a in &[0.5, 1.0, 2.0] {
        let s = quad_sys(a);
        for _ in 0..100 {
            // random IC in the unit phase ball
            let z0 = loop {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let y: f64 = rng.gen_range(-1.0..1.0);
                if x * x + y * y <= 1.0 && x * x + y * y > 1e-8 {
                    break State::new(vec![x], vec![y]);
                }
            };
            let traj = integrate_adaptive(&s, &z0, 30.0, &settings).unwrap();
            let rep = verify_lyapunov_monotonicity(&traj, &s, 1e-7).unwrap();
            assert!(
                rep.pass,
                "criterion 3 (strict Lyapunov decrease): FAIL - a = {a}: max increase {:.3e}",
                rep.max_increase
            );
            worst = worst.max(rep.max_increase);
        }
    }
    println!("criterion 3 (strict Lyapunov decrease): PASS - max per-sample increase {worst:.3e}");
}

#[test]
fn criterion_04_exponential_bound() {
    let lc = exact_quad_constants();
    // pinned rates from the closed-form constants
    let expected = [(0.5, 1.0 / 3.0), (1.0, 0.5), (2.0, 0.4)];
    let mut rng = ChaCha8Rng::seed_from_u64(40404);
    let settings = IntegratorSettings::default();
    for (a, gamma_expected) in expected {
        let s = quad_sys(a);
        let dc = decay_constants(&s, &lc).unwrap();
        assert!(
            (dc.gamma - gamma_expected).abs() < 1e-15,
            "criterion 4 (exponential bound): FAIL - gamma({a}) = {} != {gamma_expected}",
            dc.gamma
        );
        for _ in 0..10 {
            let z0 = loop {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let y: f64 = rng.gen_range(-1.0..1.0);
                if x * x + y * y <= 1.0 && x * x + y * y > 1e-8 {
                    break State::new(vec![x], vec![y]);
                }
            };
            let v0 = s.lyapunov(&z0).unwrap();
            let traj = integrate_adaptive(&s, &z0, 30.0, &settings).unwrap();
            for (t, z) in traj.times.iter().zip(&traj.states) {
                let decay = (-dc.gamma * t).exp() * (1.0 + 1e-6);
                let v = s.lyapunov(z).unwrap();
                assert!(
                    v <= v0 * decay,
                    "criterion 4 (exponential bound): FAIL - a = {a}, t = {t}: V = {v:.6e} > {:.6e}",
                    v0 * decay
                );
                let n2 = z.x[0] * z.x[0] + z.y[0] * z.y[0];
                assert!(
                    n2 <= v0 / dc.m1 * decay,
                    "criterion 4 (exponential bound): FAIL - a = {a}, t = {t}: |z|^2 = {n2:.6e} > {:.6e}",
                    v0 / dc.m1 * decay
                );
            }
        }
    }
    println!("criterion 4 (exponential bound): PASS - gamma = 1/3, 1/2, 2/5 certified on 30 runs");
}

#[test]
fn criterion_05_double_well_basins() {
    let cases: [((f64, f64), f64); 4] = [
        ((-1.5, 0.5), -1.0),
        ((-0.01, 0.0), -1.0),
        ((1.5, -0.2), 1.0),
        ((0.01, 0.0), 1.0),
    ];
    let settings = tight_settings();

    // destinations at t = 40
    let mut distances = Vec::new();
    for ((x0, y0), well) in cases {
        let s = SystemConfig::new(PotentialSpec::double_well(), 0.3, vec![well]).unwrap();
        let z0 = State::new(vec![x0], vec![y0]);
        let traj = integrate_adaptive(&s, &z0, 40.0, &settings).unwrap();
        let zf = traj.final_state();
        let nearest = if zf.x[0] > 0.0 { 1.0 } else { -1.0 };
        assert!(
            nearest == well,
            "criterion 5 (double-well basins): FAIL - IC ({x0}, {y0}) landed near {nearest}, expected {well}"
        );
        distances.push(((x0, y0), zf.displacement_norm(&[well])));
    }

    // basin symmetry on the 21x21 grid over [-2, 2] x [-2, 2]
    let s = SystemConfig::new(PotentialSpec::double_well(), 0.3, vec![-1.0]).unwrap();
    let grid = GridSpec {
        axes: vec![
            GridAxis {
                lo: -2.0,
                hi: 2.0,
                count: 21,
            },
            GridAxis {
                lo: -2.0,
                hi: 2.0,
                count: 21,
            },
        ],
    };
    let map = basin_map(&s, &grid, 60.0, 1e-3, &IntegratorSettings::default()).unwrap();
    let n = 21;
    for i in 0..n {
        for j in 0..n {
            let here = map.assignment[i + n * j];
            let mirror = map.assignment[(n - 1 - i) + n * (n - 1 - j)];
            let symmetric = match (here, mirror) {
                (Some(a), Some(b)) => (map.minima[a][0] + map.minima[b][0]).abs() < 1e-6,
                (None, None) => true,
                _ => false,
            };
            assert!(
                symmetric,
                "criterion 5 (double-well basins): FAIL - symmetry broken at cell ({i}, {j})"
            );
        }
    }

    // terminal distance <= 1e-3 by t = 40: the true solution does not meet
    // this; its distance at t = 40 is ~3.2e-3..4.8e-3 and first drops below
    // 1e-3 near t = 48.3 (see the report below for measured values)
    let worst = distances.iter().map(|(_, d)| *d).fold(0.0f64, f64::max);
    assert!(
        worst <= 1e-3,
        "criterion 5 (double-well basins): FAIL - destinations and 21x21 symmetry hold, but the \
         terminal distances at t = 40 are {} (exact-dynamics property: the slowest mode decays at \
         rate a/2 = 0.15, putting the first sub-1e-3 time near t = 48.3; no integrator setting can \
         reach 1e-3 by t = 40)",
        distances
            .iter()
            .map(|((x, y), d)| format!("IC ({x}, {y}): {d:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("criterion 5 (double-well basins): PASS");
}

#[test]
fn criterion_06_critical_damping() {
    let settings = IntegratorSettings::default();
    let ic = State::new(vec![2.0], vec![0.0]);
    let a_star = find_critical_damping(
        &quadratic(),
        &[0.0],
        &ic,
        (0.5, 6.0),
        1e-2,
        200.0,
        &settings,
    )
    .unwrap();
    assert!(
        (a_star - 2.0).abs() <= 0.01,
        "criterion 6 (critical damping): FAIL - quadratic a* = {a_star}"
    );
    // nonlinear potential: the search must terminate and its value is
    // recorded, not asserted against theory
    let expo = PotentialSpec::exponential(1).unwrap();
    let ic = State::new(vec![1.5], vec![0.0]);
    let a_exp =
        find_critical_damping(&expo, &[0.0], &ic, (0.5, 5.0), 1e-2, 200.0, &settings).unwrap();
    assert!(
        (0.5..=5.0).contains(&a_exp),
        "criterion 6 (critical damping): FAIL - exponential search left its bracket: {a_exp}"
    );
    println!(
        "criterion 6 (critical damping): PASS - quadratic a* = {a_star:.4}, \
         exponential threshold recorded at {a_exp:.4}"
    );
}

#[test]
fn criterion_07_conservative_orbits() {
    let s = quad_sys(0.0);
    let rep = closed_orbit_check(&s, &State::new(vec![2.0], vec![0.0]), 20.0, 1e-6).unwrap();
    let period = rep.period.unwrap_or(f64::NAN);
    assert!(
        (period - std::f64::consts::TAU).abs() <= 1e-4 && rep.return_distance <= 1e-6,
        "criterion 7 (conservative orbits): FAIL - quadratic period {period}, return {:.3e}",
        rep.return_distance
    );

    let dw = SystemConfig::new(PotentialSpec::double_well(), 0.0, vec![1.0]).unwrap();
    let rep_dw = closed_orbit_check(&dw, &State::new(vec![0.0], vec![0.72]), 30.0, 1e-5).unwrap();
    assert!(
        rep_dw.period.is_some() && rep_dw.return_distance <= 1e-5,
        "criterion 7 (conservative orbits): FAIL - double-well period {:?}, return {:.3e}",
        rep_dw.period,
        rep_dw.return_distance
    );

    let expo = SystemConfig::at_origin(PotentialSpec::exponential(1).unwrap(), 0.0).unwrap();
    let rep_exp = closed_orbit_check(&expo, &State::new(vec![0.3], vec![0.0]), 30.0, 1e-5).unwrap();
    assert!(
        rep_exp.period.is_some() && rep_exp.return_distance <= 1e-5,
        "criterion 7 (conservative orbits): FAIL - exponential period {:?}, return {:.3e}",
        rep_exp.period,
        rep_exp.return_distance
    );
    println!(
        "criterion 7 (conservative orbits): PASS - periods {period:.6}, {:.6}, {:.6}",
        rep_dw.period.unwrap(),
        rep_exp.period.unwrap()
    );
}

#[test]
fn criterion_08_singular_limit() {
    let settings = IntegratorSettings::default();
    let dampings = [0.5, 0.25, 0.125, 0.0625];
    let mut gammas = Vec::new();
    for &a in &dampings {
        let s = quad_sys(a);
        let z0 = State::new(vec![2.0], vec![0.0]);
        let traj = integrate_adaptive(&s, &z0, 120.0, &settings).unwrap();
        let fit = fit_decay_rate(&traj, &[0.0], 0.5).unwrap();
        assert!(
            (fit.gamma_fit - a / 2.0).abs() <= 0.05 * (a / 2.0),
            "criterion 8 (singular limit): FAIL - a = {a}: gamma_fit {} vs a/2 = {}",
            fit.gamma_fit,
            a / 2.0
        );
        gammas.push(fit.gamma_fit);
    }
    for w in gammas.windows(2) {
        assert!(
            w[1] < w[0],
            "criterion 8 (singular limit): FAIL - rates not strictly decreasing: {gammas:?}"
        );
    }
    // trend toward zero: the smallest fitted rate sits within 5% of
    // 0.03125, consistent with gamma -> 0 as a -> 0
    assert!(
        *gammas.last().unwrap() <= 0.05 * 1.05,
        "criterion 8 (singular limit): FAIL - tail rate not near zero: {gammas:?}"
    );
    println!("criterion 8 (singular limit): PASS - fitted rates {gammas:?}");
}

#[test]
fn criterion_09_absorption() {
    let settings = IntegratorSettings::default();
    let bound = 8.0f64.sqrt() + 1e-9;
    // the library's own absorbing-radius estimate agrees with sqrt(8)
    let r = absorbing_radius(&quad_sys(1.0), 2.0, &[(-3.0, 3.0)]).unwrap();
    assert!(
        (r - 8.0f64.sqrt()).abs() <= 1e-3,
        "criterion 9 (absorption): FAIL - absorbing radius {r}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(90909);
    for &a in &[0.5, 1.0, 3.0] {
        let s = quad_sys(a);
        let mut runs = 0;
        while runs < 50 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let y: f64 = rng.gen_range(-2.0..2.0);
            let z0 = State::new(vec![x], vec![y]);
            if s.energy(&z0).unwrap() > 2.0 {
                continue;
            }
            runs += 1;
            let traj = integrate_adaptive(&s, &z0, 20.0, &settings).unwrap();
            for z in &traj.states {
                let norm = z.phase_norm(&[0.0]);
                assert!(
                    norm <= bound,
                    "criterion 9 (absorption): FAIL - a = {a}, IC ({x}, {y}): |z| = {norm}"
                );
            }
        }
    }
    println!("criterion 9 (absorption): PASS - 150 runs stay inside |z| <= sqrt(8) + 1e-9");
}

#[test]
fn criterion_10_reproduction_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    for dir in [&dir_a, &dir_b] {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_grad2"))
            .args(["reproduce", "--out", dir.to_str().unwrap()])
            .output()
            .expect("binary runs");
        assert_eq!(
            out.status.code(),
            Some(0),
            "criterion 10 (reproduction suite): FAIL - reproduce exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut files_a: Vec<std::path::PathBuf> = std::fs::read_dir(&dir_a)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files_a.sort();
    // 32 trajectory CSVs + 7 SVGs + report.txt
    assert_eq!(
        files_a.len(),
        40,
        "criterion 10 (reproduction suite): FAIL - expected 40 output files, got {}",
        files_a.len()
    );
    for path in &files_a {
        let name = path.file_name().unwrap();
        let a = std::fs::read(path).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(
            a, b,
            "criterion 10 (reproduction suite): FAIL - {name:?} not byte-identical across runs"
        );
    }

    // quad_sweep terminal states match the linear oracle (criterion 1 link)
    for (a, slug) in [
        (0.0, "a0"),
        (0.5, "a0.5"),
        (1.0, "a1"),
        (2.0, "a2"),
        (3.5, "a3.5"),
        (6.0, "a6"),
    ] {
        let parsed = grad2_cli::csvio::read_trajectory_csv(
            &dir_a.join(format!("trajectory_quad_sweep_{slug}.csv")),
        )
        .unwrap();
        let t = *parsed.times.last().unwrap();
        let zf = parsed.states.last().unwrap();
        let (x, y) = linear_oracle(a, 2.0, 0.0, t);
        assert!(
            (zf.x[0] - x).abs() <= 1e-6 && (zf.y[0] - y).abs() <= 1e-6,
            "criterion 10 (reproduction suite): FAIL - quad_sweep {slug} terminal off the oracle"
        );
    }

    // dw_damped terminal wells match the basin destinations of criterion 5
    let expected_wells = [-1.0, 1.0, 1.0, -1.0]; // ic1..ic4
    for (k, well) in expected_wells.iter().enumerate() {
        let parsed = grad2_cli::csvio::read_trajectory_csv(
            &dir_a.join(format!("trajectory_dw_damped_ic{}.csv", k + 1)),
        )
        .unwrap();
        let zf = parsed.states.last().unwrap();
        let landed = if zf.x[0] > 0.0 { 1.0 } else { -1.0 };
        assert!(
            landed == *well,
            "criterion 10 (reproduction suite): FAIL - dw_damped ic{} landed near {landed}",
            k + 1
        );
    }
    // the undecided fifth start lands in one of the wells
    let parsed =
        grad2_cli::csvio::read_trajectory_csv(&dir_a.join("trajectory_dw_damped_ic5.csv")).unwrap();
    let zf = parsed.states.last().unwrap();
    let dist = (zf.x[0].abs() - 1.0).abs() + zf.y[0].abs();
    assert!(
        dist <= 0.05,
        "criterion 10 (reproduction suite): FAIL - dw_damped ic5 not settled near a well: {dist}"
    );

    // exponential potential: every damped trajectory decays to the origin
    for name in [
        "exp_damped_ic1",
        "exp_damped_ic2",
        "exp_damped_ic3",
        "exp_damped_ic4",
        "exp_sweep_a0.5",
        "exp_sweep_a1",
        "exp_sweep_a2",
        "exp_sweep_a3.5",
        "exp_sweep_a5",
    ] {
        let parsed =
            grad2_cli::csvio::read_trajectory_csv(&dir_a.join(format!("trajectory_{name}.csv")))
                .unwrap();
        let zf = parsed.states.last().unwrap();
        let norm = (zf.x[0] * zf.x[0] + zf.y[0] * zf.y[0]).sqrt();
        assert!(
            norm <= 0.05,
            "criterion 10 (reproduction suite): FAIL - {name} final norm {norm}"
        );
    }
    println!("criterion 10 (reproduction suite): PASS - 7 figures, deterministic bytes, terminal states consistent");
}
