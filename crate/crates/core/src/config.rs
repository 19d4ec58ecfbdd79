//! JSON configuration and run manifests.
//!
//! Every key is optional; `{}` is a complete configuration. Unknown keys are
//! rejected so typos do not silently fall back to defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::energy::ProblemParams;
use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::grid::GridSpec;
use crate::scan::ScanSettings;

/// Integrator and termination settings of [`FlowConfig`], without the
/// problem parameters and grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSettings {
    pub local_error_tol: f64,
    pub steady_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub spread_shell_fraction: f64,
    pub spread_mass_threshold: f64,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub safety: f64,
    pub growth_cap: f64,
    pub dealias: bool,
    pub stabilization: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        let placeholder = ProblemParams {
            p: 3.0,
            c: 1.0,
            theta: 1.0,
            sigma: 1.0,
        };
        FlowConfig::new(placeholder, 1.0).settings()
    }
}

impl FlowConfig {
    pub fn settings(&self) -> FlowSettings {
        FlowSettings {
            local_error_tol: self.local_error_tol,
            steady_tol: self.steady_tol,
            max_time: self.max_time,
            max_steps: self.max_steps,
            spread_shell_fraction: self.spread_shell_fraction,
            spread_mass_threshold: self.spread_mass_threshold,
            h0: self.h0,
            h_min: self.h_min,
            h_max: self.h_max,
            safety: self.safety,
            growth_cap: self.growth_cap,
            dealias: self.dealias,
            stabilization: self.stabilization,
        }
    }

    pub fn from_settings(params: ProblemParams, sigma_bar: f64, grid: GridSpec, s: &FlowSettings) -> Self {
        FlowConfig {
            params,
            sigma_bar,
            grid,
            local_error_tol: s.local_error_tol,
            steady_tol: s.steady_tol,
            max_time: s.max_time,
            max_steps: s.max_steps,
            spread_shell_fraction: s.spread_shell_fraction,
            spread_mass_threshold: s.spread_mass_threshold,
            h0: s.h0,
            h_min: s.h_min,
            h_max: s.h_max,
            safety: s.safety,
            growth_cap: s.growth_cap,
            dealias: s.dealias,
            stabilization: s.stabilization,
        }
    }
}

/// Mass range of the `e_min(c)` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveSettings {
    pub c_min: f64,
    pub c_max: f64,
    pub points: usize,
}

impl Default for CurveSettings {
    fn default() -> Self {
        Self {
            c_min: 1.0,
            c_max: 400.0,
            points: 200,
        }
    }
}

/// `(p, c)` of the semilinear/quasi-linear comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSettings {
    pub p: f64,
    pub c: f64,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self { p: 2.0, c: 70.0 }
    }
}

/// The full configuration tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub p: f64,
    /// Mass for `seed`, `flow` and `bounds`; `flow` requires it.
    pub c: Option<f64>,
    pub theta: f64,
    pub grid: GridSpec,
    pub flow: FlowSettings,
    pub scan: ScanSettings,
    /// Exponents for `scan`; defaults to `[p]`.
    pub p_list: Option<Vec<f64>>,
    pub curve: CurveSettings,
    pub compare: CompareSettings,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            p: 3.0,
            c: None,
            theta: 1.0,
            grid: GridSpec::default(),
            flow: FlowSettings::default(),
            scan: ScanSettings::default(),
            p_list: None,
            curve: CurveSettings::default(),
            compare: CompareSettings::default(),
        }
    }
}

/// CLI subcommands; validation rules differ per command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Bounds,
    Seed,
    Flow,
    Scan,
    Compare,
}

/// Exponents of the default sweep, `7/3, 8/3, …, 12/3`.
pub fn default_p_list() -> Vec<f64> {
    (7..=12).map(|k| k as f64 / 3.0).collect()
}

const P_THRESHOLD_RANGE: (f64, f64) = (7.0 / 3.0, 13.0 / 3.0);

fn in_threshold_range(p: f64) -> bool {
    p >= P_THRESHOLD_RANGE.0 - 1e-12 && p < P_THRESHOLD_RANGE.1
}

impl Config {
    pub fn scan_p_list(&self) -> Vec<f64> {
        self.p_list.clone().unwrap_or_else(|| vec![self.p])
    }

    pub fn validate(&self, command: Command) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if !(self.p > 1.0 && self.p < 11.0) {
            return fail(format!("p must lie in (1, 11), got {}", self.p));
        }
        if self.theta != 0.0 && self.theta != 1.0 {
            return fail(format!("theta must be 0 or 1, got {}", self.theta));
        }
        if let Some(c) = self.c {
            if !(c.is_finite() && c > 0.0) {
                return fail(format!("c must be positive, got {c}"));
            }
        }
        let probe = FlowConfig::from_settings(ProblemParams::new(3.0, 1.0, 1.0, 1.0)?, 1.0, self.grid, &self.flow);
        probe.validate().map_err(|e| Error::Validation(e.to_string()))?;
        match command {
            Command::Bounds => {
                if !in_threshold_range(self.p) {
                    return fail(format!("bounds need 7/3 <= p < 13/3, got p = {}", self.p));
                }
                let cv = &self.curve;
                if !(cv.c_min > 0.0 && cv.c_max > cv.c_min && cv.points >= 2) {
                    return fail("curve needs 0 < c_min < c_max and at least 2 points".into());
                }
            }
            Command::Seed => {}
            Command::Flow => {
                if self.c.is_none() {
                    return fail("flow needs a mass c".into());
                }
            }
            Command::Scan => {
                let list = self.scan_p_list();
                if list.is_empty() {
                    return fail("scan needs at least one p".into());
                }
                if let Some(p) = list.iter().find(|&&p| !in_threshold_range(p)) {
                    return fail(format!("scan needs every p in [7/3, 13/3), got p = {p}"));
                }
                let s = &self.scan;
                if !(s.floor_fraction > 0.0 && s.floor_fraction < 1.0) {
                    return fail("scan.floor_fraction must lie in (0, 1)".into());
                }
                if !(s.rel_width > 0.0) || s.max_iters == 0 {
                    return fail("scan needs rel_width > 0 and max_iters >= 1".into());
                }
            }
            Command::Compare => {
                let c = &self.compare;
                if !(c.p > 1.0 && c.p < 7.0 / 3.0 && c.c > 0.0) {
                    return fail(format!(
                        "compare needs 1 < p < 7/3 and c > 0, got p = {}, c = {}",
                        c.p, c.c
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parses a configuration from JSON text. Errors name the offending key
/// path and the line/column.
pub fn parse_config_str(text: &str) -> Result<Config> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Config(format!("at `{path}`: {inner}"))
    })
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses `"7/3"` or `"2.5"`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Validation(format!("not a number or fraction: {s:?}"));
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parses a comma-separated list of numbers or fractions.
pub fn parse_number_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_number).collect()
}

/// Written next to every set of artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Only set by synthetic tests that draw random numbers.
    pub seed_of_randomness: Option<u64>,
    pub version: String,
    pub threads: usize,
    /// The resolved configuration, so the run can be repeated from the
    /// manifest alone.
    pub config: Config,
}

impl RunManifest {
    pub fn new(command: Command, config_path: Option<PathBuf>, output_dir: PathBuf, config: Config) -> Self {
        Self {
            command,
            config_path,
            output_dir,
            seed_of_randomness: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            config,
        }
    }
}
