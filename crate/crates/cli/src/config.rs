//! Config-file schema, flag/file merging, and construction of validated
//! run contexts. Every validation error names the offending field.

use crate::args::CommonArgs;
use crate::error::{io_err, CliError};
use grad2_core::{IntegratorSettings, PotentialSpec, State, SystemConfig};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Deserialize, Debug, Clone)]
pub struct PotentialConfig {
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub inner: Option<Box<PotentialConfig>>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
}

/// All fields a config file may carry; commands read the subset they use.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub potential: Option<PotentialConfig>,
    pub a: Option<f64>,
    pub ustar: Option<Vec<f64>>,
    pub ic: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub stride: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub h: Option<f64>,
    pub method: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: Option<bool>,
    pub threads: Option<usize>,
    pub a_values: Option<Vec<f64>>,
    pub conv_tol: Option<f64>,
    pub grid: Option<Vec<String>>,
    pub window: Option<f64>,
    pub a_lo: Option<f64>,
    pub a_hi: Option<f64>,
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub figure: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMethod {
    Adaptive,
    Rk4,
    Leapfrog,
}

/// Fully validated common run parameters.
pub struct RunContext {
    pub system: SystemConfig,
    pub ic: Option<State>,
    pub t_max: f64,
    pub settings: IntegratorSettings,
    pub h: f64,
    pub method: RunMethod,
    pub out: PathBuf,
    pub plot: bool,
    pub label: String,
    pub file: FileConfig,
}

pub fn build_context(common: &CommonArgs) -> Result<RunContext, CliError> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    configure_threads(common.threads.or(file.threads))?;

    let potential = resolve_potential(common, &file)?;
    let n = potential.dimension();

    let a = common.a.or(file.a).unwrap_or(0.0);
    if !(a >= 0.0) {
        return Err(CliError::validation("a", format!("must be >= 0, got {a}")));
    }

    let u_star = match (&common.ustar, &file.ustar) {
        (Some(s), _) => parse_reals("ustar", s)?,
        (None, Some(v)) => v.clone(),
        (None, None) => vec![0.0; n],
    };
    if u_star.len() != n {
        return Err(CliError::validation(
            "ustar",
            format!("expected {n} components, got {}", u_star.len()),
        ));
    }

    let system =
        SystemConfig::new(potential, a, u_star).map_err(|e| CliError::validation("system", e))?;

    let ic = match (&common.ic, &file.ic) {
        (Some(s), _) => Some(parse_reals("ic", s)?),
        (None, Some(v)) => Some(v.clone()),
        (None, None) => None,
    };
    let ic = match ic {
        Some(v) => {
            if v.len() != 2 * n {
                return Err(CliError::validation(
                    "ic",
                    format!(
                        "expected {} components (positions then velocities), got {}",
                        2 * n,
                        v.len()
                    ),
                ));
            }
            Some(State::new(v[..n].to_vec(), v[n..].to_vec()))
        }
        None => None,
    };

    let t_max = common.t_max.or(file.t_max).unwrap_or(20.0);
    if !(t_max > 0.0) {
        return Err(CliError::validation(
            "t-max",
            format!("must be positive, got {t_max}"),
        ));
    }

    let defaults = IntegratorSettings::default();
    let stride = common
        .stride
        .or(file.stride)
        .unwrap_or(defaults.sample_stride);
    let rel_tol = common.rel_tol.or(file.rel_tol).unwrap_or(defaults.rel_tol);
    let abs_tol = common.abs_tol.or(file.abs_tol).unwrap_or(defaults.abs_tol);
    for (name, v) in [
        ("stride", stride),
        ("rel-tol", rel_tol),
        ("abs-tol", abs_tol),
    ] {
        if !(v > 0.0) {
            return Err(CliError::validation(
                name,
                format!("must be positive, got {v}"),
            ));
        }
    }
    let settings = IntegratorSettings {
        rel_tol,
        abs_tol,
        sample_stride: stride,
        ..defaults
    };

    let h = common.h.or(file.h).unwrap_or(1e-3);
    if !(h > 0.0) {
        return Err(CliError::validation(
            "h",
            format!("must be positive, got {h}"),
        ));
    }

    let method = match common
        .method
        .as_deref()
        .or(file.method.as_deref())
        .unwrap_or("adaptive")
    {
        "adaptive" => RunMethod::Adaptive,
        "rk4" => RunMethod::Rk4,
        "leapfrog" => RunMethod::Leapfrog,
        other => {
            return Err(CliError::validation(
                "method",
                format!("unknown method '{other}' (expected adaptive, rk4 or leapfrog)"),
            ))
        }
    };

    let out = common
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let plot = if common.no_plot {
        false
    } else if common.plot {
        true
    } else {
        file.plot.unwrap_or(true)
    };

    let label = format!("{}_a{}", kind_slug(system.potential()), trim_float(a));

    Ok(RunContext {
        system,
        ic,
        t_max,
        settings,
        h,
        method,
        out,
        plot,
        label,
        file,
    })
}

impl RunContext {
    pub fn require_ic(&self) -> Result<&State, CliError> {
        self.ic
            .as_ref()
            .ok_or_else(|| CliError::validation("ic", "required for this command"))
    }
}

fn resolve_potential(common: &CommonArgs, file: &FileConfig) -> Result<PotentialSpec, CliError> {
    let params = parse_params(&common.params)?;
    if let Some(kind) = &common.potential {
        let cfg = PotentialConfig {
            kind: kind.clone(),
            dim: params.dim,
            inner: None,
            shift: None,
        };
        return build_potential(&cfg);
    }
    if let Some(cfg) = &file.potential {
        let mut cfg = cfg.clone();
        if params.dim.is_some() {
            cfg.dim = params.dim;
        }
        return build_potential(&cfg);
    }
    Err(CliError::validation(
        "potential",
        "required (flag --potential or config file)",
    ))
}

struct PotentialParams {
    dim: Option<usize>,
}

fn parse_params(params: &[String]) -> Result<PotentialParams, CliError> {
    let mut dim = None;
    for p in params {
        let (key, value) = p.split_once('=').ok_or_else(|| {
            CliError::validation("param", format!("expected key=value, got '{p}'"))
        })?;
        match key {
            "dim" => {
                dim = Some(value.parse::<usize>().map_err(|_| {
                    CliError::validation(
                        "param",
                        format!("dim must be a positive integer, got '{value}'"),
                    )
                })?)
            }
            other => {
                return Err(CliError::validation(
                    "param",
                    format!("unknown parameter key '{other}'"),
                ))
            }
        }
    }
    Ok(PotentialParams { dim })
}

pub fn build_potential(cfg: &PotentialConfig) -> Result<PotentialSpec, CliError> {
    let dim = cfg.dim.unwrap_or(1);
    let require_dim_one = |kind: &str| -> Result<(), CliError> {
        if cfg.dim.unwrap_or(1) != 1 {
            return Err(CliError::validation(
                "potential",
                format!("{kind} is one-dimensional; dim must be 1"),
            ));
        }
        Ok(())
    };
    let constructed = |field: Result<PotentialSpec, grad2_core::potentials::PotentialError>| {
        field.map_err(|e| CliError::validation("potential", e))
    };
    match cfg.kind.as_str() {
        "quadratic" => constructed(PotentialSpec::quadratic(dim)),
        "double_well" => {
            require_dim_one("double_well")?;
            Ok(PotentialSpec::double_well())
        }
        "quartic_symmetric" => {
            require_dim_one("quartic_symmetric")?;
            Ok(PotentialSpec::quartic_symmetric())
        }
        "ginzburg_landau" => constructed(PotentialSpec::ginzburg_landau(dim)),
        "exponential" => constructed(PotentialSpec::exponential(dim)),
        "shifted" => {
            let inner = cfg.inner.as_ref().ok_or_else(|| {
                CliError::validation("potential", "shifted requires an 'inner' potential")
            })?;
            let shift = cfg.shift.clone().ok_or_else(|| {
                CliError::validation("potential", "shifted requires a 'shift' vector")
            })?;
            let inner = build_potential(inner)?;
            constructed(PotentialSpec::shifted(inner, shift))
        }
        other => Err(CliError::validation(
            "potential",
            format!("unknown kind '{other}'"),
        )),
    }
}

pub fn parse_reals(field: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(field, format!("'{tok}' is not a number")))
        })
        .collect()
}

pub fn parse_grid_axis(field: &str, s: &str) -> Result<grad2_core::analysis::GridAxis, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::validation(
            field,
            format!("expected lo:hi:count, got '{s}'"),
        ));
    }
    let lo = parts[0]
        .parse::<f64>()
        .map_err(|_| CliError::validation(field, format!("'{}' is not a number", parts[0])))?;
    let hi = parts[1]
        .parse::<f64>()
        .map_err(|_| CliError::validation(field, format!("'{}' is not a number", parts[1])))?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|_| CliError::validation(field, format!("'{}' is not a count", parts[2])))?;
    if count == 0 || hi < lo {
        return Err(CliError::validation(
            field,
            format!("need lo <= hi and count >= 1 in '{s}'"),
        ));
    }
    Ok(grad2_core::analysis::GridAxis { lo, hi, count })
}

pub fn kind_slug(p: &PotentialSpec) -> String {
    match p {
        PotentialSpec::Quadratic { .. } => "quadratic".into(),
        PotentialSpec::DoubleWell => "double_well".into(),
        PotentialSpec::QuarticSymmetric => "quartic_symmetric".into(),
        PotentialSpec::GinzburgLandau { .. } => "ginzburg_landau".into(),
        PotentialSpec::Exponential { .. } => "exponential".into(),
        PotentialSpec::Shifted { inner, .. } => format!("shifted_{}", kind_slug(inner)),
    }
}

/// Compact float for labels and file names ("2" not "2.0").
pub fn trim_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn configure_threads(requested: Option<usize>) -> Result<(), CliError> {
    let n = match requested {
        Some(n) => Some(n),
        None => match std::env::var("GRAD2_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                CliError::validation("GRAD2_THREADS", format!("'{v}' is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::validation("threads", "must be at least 1"));
        }
        // best effort: a second configuration attempt in one process is a no-op
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}
