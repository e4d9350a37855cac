//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::basis::MAX_DEGREE;
use crate::physics::{SurfaceFlux, VolumeFlux};
use crate::problems::{Params, ProblemId};
use crate::stepper::{NonconsInterface, Scheme, StepperKind};
use crate::tableau;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("key `{key}` given more than once")]
    Duplicate { key: String },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("invalid value for {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
}

const REQUIRED: [&str; 4] = ["problem", "nx", "degree", "t_final"];

const KEYS: [&str; 20] = [
    "problem",
    "gamma",
    "g_grav",
    "nx",
    "ny",
    "degree",
    "tableau",
    "stepper",
    "volume_flux",
    "surface_flux",
    "noncons_interface",
    "cfl",
    "t_final",
    "dt",
    "dt_max",
    "diagnostics_interval",
    "snapshot_interval",
    "out_dir",
    "seed",
    "order_variable",
];

/// A validated run configuration with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub gamma: f64,
    pub g_grav: f64,
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
    pub tableau: String,
    pub stepper: StepperKind,
    pub volume_flux: VolumeFlux,
    pub surface_flux: SurfaceFlux,
    pub noncons_interface: NonconsInterface,
    pub cfl: f64,
    pub t_final: f64,
    /// Fixed step size; when absent the step follows the CFL condition.
    pub dt: Option<f64>,
    pub dt_max: f64,
    /// Steps between diagnostics rows.
    pub diagnostics_interval: usize,
    /// Steps between snapshots; 0 writes only the initial and final state.
    pub snapshot_interval: usize,
    pub out_dir: PathBuf,
    /// Reserved; no part of a run is random.
    pub seed: u64,
    /// Variable whose errors are reported by convergence studies.
    pub order_variable: usize,
}

impl RunConfig {
    /// Parses config text, then applies `overrides` as if they were
    /// appended lines.
    pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut map = parse_pairs(text)?;
        for (k, v) in overrides {
            check_key(k)?;
            map.insert(k.clone(), v.clone());
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        for k in map.keys() {
            check_key(k)?;
        }
        let missing: Vec<&'static str> = REQUIRED.into_iter().filter(|k| !map.contains_key(*k)).collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        let get = |k: &str| map.get(k).map(String::as_str);

        let problem: ProblemId = parse_with("problem", get("problem"), |s| s.parse().map_err(|e: crate::problems::ProblemError| e.to_string()))?
            .expect("required");
        let nx: usize = parse_num("nx", get("nx"))?.expect("required");
        if nx == 0 {
            return Err(invalid("nx", "must be at least 1"));
        }
        let ny = match parse_num::<usize>("ny", get("ny"))? {
            Some(0) => return Err(invalid("ny", "must be at least 1")),
            Some(n) => n,
            None => problem.default_ny(nx),
        };
        let degree: usize = parse_num("degree", get("degree"))?.expect("required");
        if degree > MAX_DEGREE {
            return Err(invalid("degree", format!("must be at most {MAX_DEGREE}")));
        }
        let t_final: f64 = parse_num("t_final", get("t_final"))?.expect("required");
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(invalid("t_final", "must be finite and non-negative"));
        }
        let gamma: f64 = parse_num("gamma", get("gamma"))?.unwrap_or(1.4);
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(invalid("gamma", "must be greater than 1"));
        }
        let g_grav: f64 = parse_num("g_grav", get("g_grav"))?.unwrap_or(9.812);
        if !(g_grav > 0.0 && g_grav.is_finite()) {
            return Err(invalid("g_grav", "must be positive"));
        }
        let tableau = get("tableau").unwrap_or("rk4").to_string();
        tableau::standard_tableau(&tableau).map_err(|e| invalid("tableau", e.to_string()))?;
        let stepper = parse_with("stepper", get("stepper"), StepperKind::from_str)?.unwrap_or(StepperKind::Crkfr);
        let volume_flux = parse_with("volume_flux", get("volume_flux"), VolumeFlux::from_str)?.unwrap_or(VolumeFlux::Ec);
        let surface_flux = parse_with("surface_flux", get("surface_flux"), SurfaceFlux::from_str)?.unwrap_or(SurfaceFlux::Rusanov);
        let noncons_interface =
            parse_with("noncons_interface", get("noncons_interface"), NonconsInterface::from_str)?.unwrap_or(NonconsInterface::Reduced);
        let cfl: f64 = parse_num("cfl", get("cfl"))?.unwrap_or(0.5);
        if !(cfl > 0.0 && cfl.is_finite()) {
            return Err(invalid("cfl", "must be positive"));
        }
        let dt = parse_num::<f64>("dt", get("dt"))?;
        if let Some(dt) = dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt", "must be positive"));
            }
        }
        let dt_max = parse_num("dt_max", get("dt_max"))?.unwrap_or(f64::INFINITY);
        if !(dt_max > 0.0) {
            return Err(invalid("dt_max", "must be positive"));
        }
        let default_interval = if problem.dim() == 1 { 1 } else { 10 };
        let diagnostics_interval = parse_num("diagnostics_interval", get("diagnostics_interval"))?.unwrap_or(default_interval);
        if diagnostics_interval == 0 {
            return Err(invalid("diagnostics_interval", "must be at least 1"));
        }
        let snapshot_interval = parse_num("snapshot_interval", get("snapshot_interval"))?.unwrap_or(0);
        let out_dir = PathBuf::from(get("out_dir").unwrap_or("out"));
        let seed = parse_num("seed", get("seed"))?.unwrap_or(0);
        let order_variable = parse_num("order_variable", get("order_variable"))?.unwrap_or(0);

        Ok(RunConfig {
            problem,
            gamma,
            g_grav,
            nx,
            ny,
            degree,
            tableau,
            stepper,
            volume_flux,
            surface_flux,
            noncons_interface,
            cfl,
            t_final,
            dt,
            dt_max,
            diagnostics_interval,
            snapshot_interval,
            out_dir,
            seed,
            order_variable,
        })
    }

    pub fn params(&self) -> Params {
        Params {
            gamma: self.gamma,
            gravity: self.g_grav,
        }
    }

    pub fn scheme(&self) -> Scheme {
        Scheme {
            volume: self.volume_flux,
            surface: self.surface_flux,
            noncons_interface: self.noncons_interface,
        }
    }

    /// Every resolved key in parseable `key = value` form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("problem", self.problem.to_string());
        put("gamma", self.gamma.to_string());
        put("g_grav", self.g_grav.to_string());
        put("nx", self.nx.to_string());
        put("ny", self.ny.to_string());
        put("degree", self.degree.to_string());
        put("tableau", self.tableau.clone());
        put("stepper", self.stepper.as_str().into());
        put("volume_flux", self.volume_flux.to_string());
        put("surface_flux", self.surface_flux.as_str().into());
        put("noncons_interface", self.noncons_interface.as_str().into());
        put("cfl", self.cfl.to_string());
        put("t_final", self.t_final.to_string());
        if let Some(dt) = self.dt {
            put("dt", dt.to_string());
        }
        put("dt_max", self.dt_max.to_string());
        put("diagnostics_interval", self.diagnostics_interval.to_string());
        put("snapshot_interval", self.snapshot_interval.to_string());
        put("out_dir", self.out_dir.display().to_string());
        put("seed", self.seed.to_string());
        put("order_variable", self.order_variable.to_string());
        s
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        RunConfig::parse_with_overrides(text, &[])
    }
}

/// Splits `key=value` as given on the command line.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Syntax {
            line: 0,
            text: s.to_string(),
        }),
    }
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        check_key(k)?;
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate { key: k.to_string() });
        }
    }
    Ok(map)
}

fn check_key(k: &str) -> Result<(), ConfigError> {
    if KEYS.contains(&k) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey { key: k.to_string() })
    }
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

fn parse_with<T>(key: &'static str, v: Option<&str>, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
    v.map(|s| f(s).map_err(|reason| invalid(key, reason))).transpose()
}

fn parse_num<T: FromStr>(key: &'static str, v: Option<&str>) -> Result<Option<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    parse_with(key, v, |s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
}
