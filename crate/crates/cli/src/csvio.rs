//! Trajectory CSV format: header `t,x1..xN,y1..yN,E,V`, one row per sample,
//! `.` decimal and `\n` line endings. Values print in Rust's shortest
//! round-trip form, so parsing an emitted file reproduces the samples
//! bit for bit.

use crate::error::{io_err, CliError};
use grad2_core::{State, SystemConfig, Trajectory};
use std::fmt::Write as _;
use std::path::Path;

pub fn trajectory_csv(traj: &Trajectory, sys: &SystemConfig) -> Result<String, CliError> {
    let n = sys.dim();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",y{i}");
    }
    out.push_str(",E,V\n");
    for (t, z) in traj.times.iter().zip(&traj.states) {
        let e = sys
            .energy(z)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let v = sys
            .lyapunov(z)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let _ = write!(out, "{t}");
        for c in &z.x {
            let _ = write!(out, ",{c}");
        }
        for c in &z.y {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{e},{v}");
    }
    Ok(out)
}

pub fn write_trajectory_csv(
    path: &Path,
    traj: &Trajectory,
    sys: &SystemConfig,
) -> Result<(), CliError> {
    let body = trajectory_csv(traj, sys)?;
    std::fs::write(path, body).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub energy: Vec<f64>,
    pub lyapunov: Vec<f64>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<ParsedTrajectory, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_trajectory_csv(&text)
}

pub fn parse_trajectory_csv(text: &str) -> Result<ParsedTrajectory, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::validation("csv", "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 4
        || cols[0] != "t"
        || cols[cols.len() - 2] != "E"
        || cols[cols.len() - 1] != "V"
    {
        return Err(CliError::validation(
            "csv",
            format!("unexpected header '{header}'"),
        ));
    }
    let n = (cols.len() - 3) / 2;
    if cols.len() != 2 * n + 3 {
        return Err(CliError::validation(
            "csv",
            "header column count is not 2N+3",
        ));
    }

    let mut parsed = ParsedTrajectory {
        times: vec![],
        states: vec![],
        energy: vec![],
        lyapunov: vec![],
    };
    for (row_idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, CliError> = line
            .split(',')
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    CliError::validation(
                        "csv",
                        format!("row {}: '{tok}' is not a number", row_idx + 2),
                    )
                })
            })
            .collect();
        let vals = vals?;
        if vals.len() != 2 * n + 3 {
            return Err(CliError::validation(
                "csv",
                format!(
                    "row {}: expected {} fields, got {}",
                    row_idx + 2,
                    2 * n + 3,
                    vals.len()
                ),
            ));
        }
        parsed.times.push(vals[0]);
        parsed.states.push(State::new(
            vals[1..=n].to_vec(),
            vals[n + 1..=2 * n].to_vec(),
        ));
        parsed.energy.push(vals[2 * n + 1]);
        parsed.lyapunov.push(vals[2 * n + 2]);
    }
    Ok(parsed)
}
