//! End-to-end tests of the `grad2` binary: exit codes, file outputs, CSV
//! round-trips, SVG well-formedness and reproduce determinism.

use std::path::Path;
use std::process::Command;

fn grad2() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grad2"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    grad2()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn validation_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "simulate",
            "--potential",
            "quadratic",
            "--a",
            "-1",
            "--ic",
            "2,0",
        ],
        vec!["simulate", "--potential", "nosuch", "--ic", "2,0"],
        vec!["simulate", "--potential", "quadratic"], // missing ic
        vec!["simulate", "--potential", "quadratic", "--ic", "2,0,0"], // wrong arity
        vec![
            "simulate",
            "--potential",
            "double_well",
            "--param",
            "dim=2",
            "--ic",
            "1,0",
        ],
        vec![
            "basin",
            "--potential",
            "double_well",
            "--a",
            "0.3",
            "--ustar",
            "-1",
        ], // no grid
        vec![
            "conserve",
            "--potential",
            "quadratic",
            "--a",
            "1",
            "--ic",
            "2,0",
        ],
        vec!["reproduce", "--figure", "bogus"],
    ];
    for args in cases {
        let out = run_in(tmp.path(), &args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: expected exit 2, got {:?}\nstderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "diagnostic expected for {args:?}");
    }
}

#[test]
fn numeric_failures_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    // exponential potential blow-up: non-finite state
    let out = run_in(
        tmp.path(),
        &[
            "simulate",
            "--potential",
            "exponential",
            "--a",
            "0",
            "--ic",
            "27,0",
            "--t-max",
            "1",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_double_well_reaches_the_left_well() {
    // by t = 60 the trajectory sits within 1e-3 of (-1, 0) componentwise
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "simulate",
            "--potential",
            "double_well",
            "--a",
            "0.3",
            "--ustar",
            "-1",
            "--ic",
            "-1.5,0.5",
            "--t-max",
            "60",
            "--out",
            "run",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed = grad2_cli::csvio::read_trajectory_csv(
        &tmp.path().join("run/trajectory_double_well_a0.3.csv"),
    )
    .unwrap();
    let zf = parsed.states.last().unwrap();
    assert!((zf.x[0] + 1.0).abs() <= 1e-3, "final x {}", zf.x[0]);
    assert!(zf.y[0].abs() <= 1e-3, "final y {}", zf.y[0]);
}

#[test]
fn simulate_leapfrog_closes_after_one_period() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "simulate",
            "--potential",
            "quadratic",
            "--a",
            "0",
            "--ic",
            "2,0",
            "--t-max",
            "6.2832",
            "--method",
            "leapfrog",
            "--out",
            "run",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed =
        grad2_cli::csvio::read_trajectory_csv(&tmp.path().join("run/trajectory_quadratic_a0.csv"))
            .unwrap();
    let z0 = &parsed.states[0];
    let zf = parsed.states.last().unwrap();
    assert!(
        (zf.x[0] - z0.x[0]).abs() <= 1e-4,
        "x gap {}",
        (zf.x[0] - z0.x[0]).abs()
    );
    assert!(
        (zf.y[0] - z0.y[0]).abs() <= 1e-4,
        "y gap {}",
        (zf.y[0] - z0.y[0]).abs()
    );
}

#[test]
fn simulate_rk4_matches_half_period() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "simulate",
            "--potential",
            "quadratic",
            "--a",
            "0",
            "--ic",
            "2,0",
            "--t-max",
            "3.14159265358979",
            "--method",
            "rk4",
            "--out",
            "run",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed =
        grad2_cli::csvio::read_trajectory_csv(&tmp.path().join("run/trajectory_quadratic_a0.csv"))
            .unwrap();
    let zf = parsed.states.last().unwrap();
    assert!(
        (zf.x[0] + 2.0).abs() <= 1e-6 && zf.y[0].abs() <= 1e-6,
        "final {zf:?}"
    );
}

#[test]
fn bad_decay_window_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "decay",
            "--potential",
            "quadratic",
            "--a",
            "0.5",
            "--ic",
            "2,0",
            "--window",
            "1.5",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emitted_csv_round_trips_to_full_precision() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "simulate",
            "--potential",
            "quadratic",
            "--a",
            "0.7",
            "--ic",
            "1.3,-0.4",
            "--t-max",
            "5",
            "--out",
            "run",
        ],
    );
    assert!(out.status.success());
    let path = tmp.path().join("run/trajectory_quadratic_a0.7.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = grad2_cli::csvio::parse_trajectory_csv(&text).unwrap();
    // re-serialize from the parsed samples and compare byte for byte
    let mut re = String::from("t,x1,y1,E,V\n");
    for (k, t) in parsed.times.iter().enumerate() {
        let z = &parsed.states[k];
        re.push_str(&format!(
            "{t},{},{},{},{}\n",
            z.x[0], z.y[0], parsed.energy[k], parsed.lyapunov[k]
        ));
    }
    assert_eq!(text, re, "formatting did not round-trip");
}

/// Minimal XML well-formedness check: declaration, balanced tags, quoted
/// attributes consumed opaquely.
fn assert_well_formed_xml(text: &str) {
    let mut rest = text.trim_start();
    if rest.starts_with("<?xml") {
        let end = rest.find("?>").expect("declaration closed");
        rest = &rest[end + 2..];
    }
    let mut stack: Vec<String> = Vec::new();
    let mut chars = rest.char_indices().peekable();
    let bytes = rest;
    while let Some((i, c)) = chars.next() {
        if c != '<' {
            continue;
        }
        let close = bytes[i..].find('>').expect("tag closed") + i;
        let tag = &bytes[i + 1..close];
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack
                .pop()
                .unwrap_or_else(|| panic!("stray closing tag </{name}>"));
            assert_eq!(open, name, "mismatched tag");
        } else if !tag.ends_with('/') && !tag.starts_with('!') {
            let name: String = tag
                .chars()
                .take_while(|ch| !ch.is_whitespace() && *ch != '>')
                .collect();
            stack.push(name);
        }
        while let Some(&(j, _)) = chars.peek() {
            if j <= close {
                chars.next();
            } else {
                break;
            }
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

#[test]
fn sweep_emits_well_formed_svg_with_one_polyline_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "sweep",
            "--potential",
            "quadratic",
            "--ic",
            "2,0",
            "--a-values",
            "0,0.5,1,2,3.5,6",
            "--t-max",
            "15",
            "--out",
            "run",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(tmp.path().join("run/phase_quadratic_sweep.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert_eq!(svg.matches("<polyline").count(), 6);
    assert_eq!(svg.matches("<circle").count(), 6);
    for a in ["a = 0", "a = 0.5", "a = 1", "a = 2", "a = 3.5", "a = 6"] {
        assert!(svg.contains(a), "legend missing {a}");
    }
    // six CSVs, one per damping value
    for slug in ["a0", "a0.5", "a1", "a2", "a3.5", "a6"] {
        assert!(tmp
            .path()
            .join(format!("run/trajectory_quadratic_{slug}.csv"))
            .exists());
    }
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cfg.json"),
        r#"{"potential": {"kind": "quadratic"}, "a": 0.5, "ic": [2.0, 0.0], "t_max": 10.0, "out": "from_file"}"#,
    )
    .unwrap();
    // flag --out overrides the file's out dir
    let out = run_in(
        tmp.path(),
        &["simulate", "--config", "cfg.json", "--out", "from_flag"],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("from_flag/report.txt").exists());
    assert!(!tmp.path().join("from_file").exists());

    // unknown config keys are named
    std::fs::write(
        tmp.path().join("bad.json"),
        r#"{"potental": {"kind": "quadratic"}}"#,
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["simulate", "--config", "bad.json", "--ic", "2,0"],
    );
    assert_eq!(out.status.code(), Some(2));

    // nested shifted potential from config: W(x) = inner(x - shift)
    std::fs::write(
        tmp.path().join("shifted.json"),
        r#"{"potential": {"kind": "shifted", "inner": {"kind": "quadratic"}, "shift": [1.0]},
            "a": 0.5, "ustar": [1.0], "ic": [3.0, 0.0], "t_max": 40.0}"#,
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["simulate", "--config", "shifted.json", "--out", "sh"],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed = grad2_cli::csvio::read_trajectory_csv(
        &tmp.path().join("sh/trajectory_shifted_quadratic_a0.5.csv"),
    )
    .unwrap();
    let zf = parsed.states.last().unwrap();
    assert!(
        (zf.x[0] - 1.0).abs() < 1e-3,
        "shifted system should settle at x = 1"
    );
}

#[test]
fn reproduce_single_figure_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = run_in(
            tmp.path(),
            &["reproduce", "--figure", "quad_conservative", "--out", dir],
        );
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in [
        "trajectory_quad_conservative_ic1.csv",
        "trajectory_quad_conservative_ic2.csv",
        "trajectory_quad_conservative_ic3.csv",
        "trajectory_quad_conservative_ic4.csv",
        "phase_quad_conservative.svg",
    ] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between invocations");
    }
    let svg = std::fs::read_to_string(tmp.path().join("a/phase_quad_conservative.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert_eq!(svg.matches("<polyline").count(), 4);
    // conservative orbits close: first and last polyline points nearly agree
    let parsed = grad2_cli::csvio::read_trajectory_csv(
        &tmp.path().join("a/trajectory_quad_conservative_ic2.csv"),
    )
    .unwrap();
    let z0 = &parsed.states[0];
    // (2, 0) has period 2pi; at t = 25 it is 0.867 rad into its fourth turn,
    // so scan for the closest return instead of the final row
    let min_gap = parsed
        .states
        .iter()
        .skip(50)
        .map(|z| ((z.x[0] - z0.x[0]).powi(2) + (z.y[0] - z0.y[0]).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap <= 1e-3, "orbit gap {min_gap}");
}

#[test]
fn threads_env_var_is_honored() {
    let tmp = tempfile::tempdir().unwrap();
    let out = grad2()
        .current_dir(tmp.path())
        .env("GRAD2_THREADS", "2")
        .args([
            "sweep",
            "--potential",
            "quadratic",
            "--ic",
            "2,0",
            "--a-values",
            "0.5,1",
            "--t-max",
            "10",
            "--out",
            "run",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    // invalid env value is a named validation error
    let out = grad2()
        .current_dir(tmp.path())
        .env("GRAD2_THREADS", "zero")
        .args([
            "simulate",
            "--potential",
            "quadratic",
            "--ic",
            "2,0",
            "--out",
            "run2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
