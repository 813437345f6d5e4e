//! Run configuration: a JSON object whose keys mirror the long flags with
//! underscores. The file is read first, flags are laid over it, and every key
//! is then checked on its own so each problem names the key it came from.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dynamics::Integrator;
use crate::ensemble::{EnsembleConfig, DEFAULT_TAU_GRID};
use crate::operators::{Protocol, MAX_DENSE_QUBITS};
use crate::optimizer::OptimizerConfig;

/// Why a configuration was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigErrorKind {
    UnknownKey,
    TypeMismatch,
    Range,
    Conflict,
    Syntax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    /// The offending key; `None` for file-level problems.
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(kind: ConfigErrorKind, key: &str, message: impl Into<String>) -> Self {
        Self { kind, key: Some(key.to_string()), message: message.into() }
    }

    fn range(key: &str, message: impl Into<String>) -> Self {
        Self::new(ConfigErrorKind::Range, key, message)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.key) {
            (ConfigErrorKind::UnknownKey, Some(k)) => write!(f, "unknown key \"{k}\": {}", self.message),
            (ConfigErrorKind::TypeMismatch, Some(k)) => write!(f, "wrong type for \"{k}\": {}", self.message),
            (ConfigErrorKind::Range, Some(k)) => write!(f, "value out of range for \"{k}\": {}", self.message),
            (ConfigErrorKind::Conflict, Some(k)) => write!(f, "conflicting setting \"{k}\": {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// An explicit drive endpoint, or the per-instance optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Value(f64),
    Optimize,
}

impl Serialize for LambdaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LambdaSpec::Value(v) => s.serialize_f64(*v),
            LambdaSpec::Optimize => s.serialize_str("optimize"),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n.as_f64().map(LambdaSpec::Value).ok_or_else(|| serde::de::Error::custom("bad number")),
            Value::String(s) if s == "optimize" => Ok(LambdaSpec::Optimize),
            other => Err(serde::de::Error::custom(format!("expected a number or \"optimize\", got {other}"))),
        }
    }
}

impl std::str::FromStr for LambdaSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "optimize" {
            return Ok(LambdaSpec::Optimize);
        }
        s.parse().map(LambdaSpec::Value).map_err(|_| format!("expected a number or \"optimize\", got '{s}'"))
    }
}

/// Every accepted key and the type it takes.
pub const KEYS: &[(&str, &str)] = &[
    ("n_logical", "an integer"),
    ("seed", "an unsigned integer"),
    ("instance_file", "a path string"),
    ("h0", "a number"),
    ("c", "a number"),
    ("aux_pin", "a number"),
    ("tau", "a number"),
    ("protocol", "one of \"annealing\", \"cd\", \"cd_real\""),
    ("lambda_f", "a number or \"optimize\""),
    ("lambda_bounds", "a two-element array of numbers"),
    ("n_grid", "an integer"),
    ("optimizer_tol", "a number"),
    ("integrator", "one of \"midpoint_exponential\", \"split_operator\""),
    ("sweep_tolerance", "a number"),
    ("n_samples", "an integer"),
    ("steps", "an integer"),
    ("n_times", "an integer"),
    ("n_levels", "an integer"),
    ("output_dir", "a path string"),
    ("emit_gnuplot", "a boolean"),
    ("n_instances", "an integer"),
    ("base_seed", "an unsigned integer"),
    ("tau_grid", "an array of numbers"),
    ("protocols", "an array of protocol names"),
    ("histogram_bins", "an integer"),
];

/// The file/flag layer: any subset of keys.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Partial {
    n_logical: Option<usize>,
    seed: Option<u64>,
    instance_file: Option<PathBuf>,
    h0: Option<f64>,
    c: Option<f64>,
    aux_pin: Option<f64>,
    tau: Option<f64>,
    protocol: Option<Protocol>,
    lambda_f: Option<LambdaSpec>,
    lambda_bounds: Option<(f64, f64)>,
    n_grid: Option<usize>,
    optimizer_tol: Option<f64>,
    integrator: Option<Integrator>,
    sweep_tolerance: Option<f64>,
    n_samples: Option<usize>,
    steps: Option<usize>,
    n_times: Option<usize>,
    n_levels: Option<usize>,
    output_dir: Option<PathBuf>,
    emit_gnuplot: Option<bool>,
    n_instances: Option<usize>,
    base_seed: Option<u64>,
    tau_grid: Option<Vec<f64>>,
    protocols: Option<Vec<Protocol>>,
    histogram_bins: Option<usize>,
}

/// Where the instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    Seed(u64),
    File(PathBuf),
}

/// Fully resolved settings for any command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_logical: usize,
    pub instance: InstanceSource,
    pub h0: f64,
    pub c: f64,
    pub aux_pin: f64,
    /// Sweep time. Unset means 1 for seeded instances and the stored value
    /// for instance files.
    pub tau: Option<f64>,
    pub protocol: Protocol,
    pub lambda_f: LambdaSpec,
    pub lambda_bounds: (f64, f64),
    pub n_grid: usize,
    pub optimizer_tol: f64,
    /// `None` lets each stage use its own default: midpoint for single
    /// sweeps, split-operator inside the optimiser.
    pub integrator: Option<Integrator>,
    pub sweep_tolerance: f64,
    pub n_samples: usize,
    pub steps: Option<usize>,
    pub n_times: usize,
    pub n_levels: usize,
    pub output_dir: PathBuf,
    pub emit_gnuplot: bool,
    pub n_instances: usize,
    pub base_seed: u64,
    pub tau_grid: Vec<f64>,
    pub protocols: Vec<Protocol>,
    pub histogram_bins: usize,
}

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LHZ_CD_OUTPUT_DIR";

/// Parse the text of a config file into its key map.
pub fn parse_file_text(text: &str) -> Result<Map<String, Value>, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError {
        kind: ConfigErrorKind::Syntax,
        key: None,
        message: format!("config is not valid JSON: {e}"),
    })?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(ConfigError {
            kind: ConfigErrorKind::Syntax,
            key: None,
            message: "config must be a JSON object".into(),
        }),
    }
}

/// Lay `flags` over `file` and resolve. A flag choosing one instance source
/// drops the other source from the file.
pub fn resolve(
    mut file: Map<String, Value>,
    flags: Map<String, Value>,
    default_output_dir: Option<PathBuf>,
) -> Result<RunConfig, ConfigError> {
    let file_has_both = file.contains_key("seed") && file.contains_key("instance_file");
    if flags.contains_key("seed") || flags.contains_key("instance_file") {
        file.remove("seed");
        file.remove("instance_file");
    } else if file_has_both {
        return Err(ConfigError::new(ConfigErrorKind::Conflict, "instance_file", "seed and instance_file are mutually exclusive"));
    }
    if flags.contains_key("seed") && flags.contains_key("instance_file") {
        return Err(ConfigError::new(ConfigErrorKind::Conflict, "instance_file", "seed and instance_file are mutually exclusive"));
    }
    file.extend(flags);

    let mut p = Partial::default();
    for (key, value) in file {
        let Some((_, expected)) = KEYS.iter().find(|(k, _)| *k == key) else {
            return Err(unknown(&key));
        };
        let mut one = Map::new();
        one.insert(key.clone(), value.clone());
        let single: Partial = serde_json::from_value(Value::Object(one))
            .map_err(|_| ConfigError::new(ConfigErrorKind::TypeMismatch, &key, format!("expected {expected}, got {value}")))?;
        merge(&mut p, single);
    }
    finish(p, default_output_dir)
}

fn unknown(key: &str) -> ConfigError {
    let names: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
    ConfigError::new(ConfigErrorKind::UnknownKey, key, format!("accepted keys are {}", names.join(", ")))
}

fn merge(into: &mut Partial, from: Partial) {
    macro_rules! take {
        ($($f:ident),*) => { $( if from.$f.is_some() { into.$f = from.$f; } )* };
    }
    take!(
        n_logical, seed, instance_file, h0, c, aux_pin, tau, protocol, lambda_f, lambda_bounds, n_grid,
        optimizer_tol, integrator, sweep_tolerance, n_samples, steps, n_times, n_levels, output_dir, emit_gnuplot,
        n_instances, base_seed, tau_grid, protocols, histogram_bins
    );
}

fn finish(p: Partial, default_output_dir: Option<PathBuf>) -> Result<RunConfig, ConfigError> {
    let opt = OptimizerConfig::default();
    let ens = EnsembleConfig::default();
    let cfg = RunConfig {
        n_logical: p.n_logical.unwrap_or(4),
        instance: match (p.seed, p.instance_file) {
            (_, Some(path)) => InstanceSource::File(path),
            (seed, None) => InstanceSource::Seed(seed.unwrap_or(0)),
        },
        h0: p.h0.unwrap_or(1.0),
        c: p.c.unwrap_or(2.0),
        aux_pin: p.aux_pin.unwrap_or(10.0),
        tau: p.tau,
        protocol: p.protocol.unwrap_or(Protocol::Cd),
        lambda_f: p.lambda_f.unwrap_or(LambdaSpec::Optimize),
        lambda_bounds: p.lambda_bounds.unwrap_or(ens.lambda_bounds),
        n_grid: p.n_grid.unwrap_or(opt.n_grid),
        optimizer_tol: p.optimizer_tol.unwrap_or(opt.tol),
        integrator: p.integrator,
        sweep_tolerance: p.sweep_tolerance.unwrap_or(opt.sweep_tolerance),
        n_samples: p.n_samples.unwrap_or(200),
        steps: p.steps,
        n_times: p.n_times.unwrap_or(201),
        n_levels: p.n_levels.unwrap_or(4),
        output_dir: p.output_dir.or(default_output_dir).unwrap_or_else(|| PathBuf::from(".")),
        emit_gnuplot: p.emit_gnuplot.unwrap_or(false),
        n_instances: p.n_instances.unwrap_or(ens.n_instances),
        base_seed: p.base_seed.unwrap_or(ens.base_seed),
        tau_grid: p.tau_grid.unwrap_or_else(|| DEFAULT_TAU_GRID.to_vec()),
        protocols: p.protocols.unwrap_or(ens.protocols),
        histogram_bins: p.histogram_bins.unwrap_or(ens.histogram_bins),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn physical_qubits(n_logical: usize) -> usize {
    n_logical * (n_logical + 1) / 2 - 2
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::range(key, format!("must be positive and finite, got {v}")))
            }
        };
        let at_least = |key: &str, v: usize, min: usize| {
            if v >= min {
                Ok(())
            } else {
                Err(ConfigError::range(key, format!("must be at least {min}, got {v}")))
            }
        };
        let max_n = (3..).take_while(|&n| physical_qubits(n) <= MAX_DENSE_QUBITS).last().unwrap_or(3);
        if !(3..=max_n).contains(&self.n_logical) {
            return Err(ConfigError::range("n_logical", format!("must lie in [3, {max_n}], got {}", self.n_logical)));
        }
        positive("h0", self.h0)?;
        positive("c", self.c)?;
        if !self.aux_pin.is_finite() {
            return Err(ConfigError::range("aux_pin", "must be finite"));
        }
        if let Some(t) = self.tau {
            positive("tau", t)?;
        }
        if let LambdaSpec::Value(v) = self.lambda_f {
            if !v.is_finite() {
                return Err(ConfigError::range("lambda_f", "must be finite"));
            }
        }
        let (lo, hi) = self.lambda_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ConfigError::range("lambda_bounds", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        at_least("n_grid", self.n_grid, 3)?;
        positive("optimizer_tol", self.optimizer_tol)?;
        positive("sweep_tolerance", self.sweep_tolerance)?;
        at_least("n_samples", self.n_samples, 2)?;
        if let Some(s) = self.steps {
            at_least("steps", s, 1)?;
        }
        at_least("n_times", self.n_times, 3)?;
        at_least("n_levels", self.n_levels, 2)?;
        if self.n_levels > 1 << physical_qubits(self.n_logical) {
            return Err(ConfigError::range("n_levels", "exceeds the Hilbert space dimension"));
        }
        at_least("n_instances", self.n_instances, 1)?;
        if self.tau_grid.is_empty() {
            return Err(ConfigError::range("tau_grid", "must not be empty"));
        }
        for &t in &self.tau_grid {
            positive("tau_grid", t)?;
        }
        if self.tau_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::range("tau_grid", "must be strictly ascending"));
        }
        if self.protocols.is_empty() {
            return Err(ConfigError::range("protocols", "must not be empty"));
        }
        let mut p = self.protocols.clone();
        p.sort();
        p.dedup();
        if p.len() != self.protocols.len() {
            return Err(ConfigError::range("protocols", "must not repeat"));
        }
        at_least("histogram_bins", self.histogram_bins, 1)?;
        Ok(())
    }

    /// Optimiser settings; the optimiser keeps split-operator unless an
    /// integrator was chosen explicitly.
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            n_grid: self.n_grid,
            tol: self.optimizer_tol,
            integrator: self.integrator.unwrap_or(Integrator::SplitOperator),
            sweep_tolerance: self.sweep_tolerance,
        }
    }

    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_logical: self.n_logical,
            n_instances: self.n_instances,
            base_seed: self.base_seed,
            tau_grid: self.tau_grid.clone(),
            lambda_bounds: self.lambda_bounds,
            protocols: self.protocols.clone(),
            optimizer: self.optimizer(),
            h0: self.h0,
            c: self.c,
            aux_pin: self.aux_pin,
            histogram_bins: self.histogram_bins,
        }
    }
}
