//! The `lhz-cd` command line: single sweeps, `lambda_f` scans, spectra and
//! ensembles, each writing CSV series plus a JSON manifest into an output
//! directory.

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dynamics::{min_gap_scan, propagate, Integrator, SweepOptions};
use crate::ensemble::{persist, run_ensemble_with_progress};
use crate::error::Error;
use crate::operators::{cd_terms, Protocol};
use crate::optimizer::{gaussian_fit, GaussianFit, optimize_lambda_f, scan_lambda_f};
use crate::output::{create_dir, csv_bytes, fmt_f64, read_file, sha256_hex, to_json, write_file};
use crate::{LhzLayout, PhysicalInstance, VERSION};

pub use config::{ConfigError, ConfigErrorKind, InstanceSource, LambdaSpec, RunConfig, OUTPUT_DIR_ENV};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid configuration or command line
  3  lattice or instance error
  4  schedule or operator error
  5  dynamics error (propagation, spectrum, resource limits)
  6  optimizer error (scan point failure, no peak, fit failure)
  7  ensemble error (too many failed runs)
  8  I/O or file format error

On failure a single JSON object {\"error\": {...}} is written to stderr.
The default output directory is taken from LHZ_CD_OUTPUT_DIR, else the current directory.";

#[derive(Debug, Parser)]
#[command(name = "lhz-cd", version, about = "Counter-diabatic annealing in the LHZ parity encoding", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one instance and write the time series.
    Sweep(SweepArgs),
    /// Final CD fidelity over a grid of lambda_f, with a Gaussian fit.
    ScanLambda(ScanArgs),
    /// Lowest instantaneous eigenvalues along the sweep and the minimal gap.
    Spectrum(SpectrumArgs),
    /// Random-instance ensemble over a grid of sweep times.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_logical: Option<usize>,
    /// Seed of the random instance.
    #[arg(long, conflicts_with = "instance_file")]
    pub seed: Option<u64>,
    /// Instance JSON as written by the other commands.
    #[arg(long)]
    pub instance_file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub h0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub aux_pin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// midpoint_exponential or split_operator.
    #[arg(long)]
    pub integrator: Option<Integrator>,
    #[arg(long)]
    pub sweep_tolerance: Option<f64>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also write gnuplot scripts next to the data.
    #[arg(long)]
    pub emit_gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// LO,HI
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda_bounds: Option<Vec<f64>>,
    #[arg(long)]
    pub n_grid: Option<usize>,
    #[arg(long)]
    pub optimizer_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// annealing, cd or cd_real.
    #[arg(long)]
    pub protocol: Option<Protocol>,
    /// A number, or "optimize".
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_f: Option<LambdaSpec>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Initial step count (doubled until converged).
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long)]
    pub protocol: Option<Protocol>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_f: Option<LambdaSpec>,
    #[arg(long)]
    pub n_times: Option<usize>,
    #[arg(long)]
    pub n_levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long)]
    pub n_instances: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Comma-separated sweep times.
    #[arg(long, value_delimiter = ',')]
    pub tau_grid: Option<Vec<f64>>,
    /// Comma-separated protocol names.
    #[arg(long, value_delimiter = ',')]
    pub protocols: Option<Vec<Protocol>>,
    #[arg(long)]
    pub histogram_bins: Option<usize>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    pub quiet: bool,
}

/// Anything that stops a command.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Run(Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Run(e) => e.fmt(f),
        }
    }
}

impl CliError {
    /// Category name and exit code.
    pub fn category(&self) -> (&'static str, u8) {
        use Error::*;
        match self {
            CliError::Config(_) => ("config", 2),
            CliError::Run(e) => match e {
                DegenerateSize(_) | IncompleteProblem(..) | InvalidProblem(_) | InvalidInstance(_) | Shape { .. }
                | NotASpin { .. } | ConstraintViolation { .. } => ("lattice", 3),
                Domain { .. } | QubitOutOfRange { .. } | EmptyPauliString | Singular(_) | DegenerateSpectrum { .. }
                | EndpointIndeterminate { .. } => ("operator", 4),
                ResourceLimit { .. } | Eigen(_) | NonConvergence { .. } | InvalidArgument(_) => ("dynamics", 5),
                ScanPoint { .. } | InvalidOptimizer(_) | NoPeak | FitFailure { .. } => ("optimizer", 6),
                Ensemble(_) | TooManyFailures { .. } => ("ensemble", 7),
                Io { .. } | Format { .. } => ("io", 8),
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.category().1
    }

    /// The machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let (kind, code) = self.category();
        let mut body = json!({ "kind": kind, "exit_code": code, "message": self.to_string() });
        if let CliError::Config(c) = self {
            body["config_error"] = serde_json::to_value(c.kind).expect("enum serialises");
            if let Some(k) = &c.key {
                body["key"] = json!(k);
            }
        }
        json!({ "error": body })
    }
}

/// On-disk instance format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n_logical: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tau: f64,
    pub h_start: Vec<f64>,
    pub j_final: Vec<f64>,
    pub c_final: Vec<f64>,
    /// Qubit indices of every constraint, in layout order. Must match the
    /// layout for `n_logical`.
    pub constraints: Vec<[usize; 4]>,
}

impl InstanceFile {
    pub fn from_instance(instance: &PhysicalInstance) -> Self {
        Self {
            n_logical: instance.layout().n_logical(),
            seed: instance.seed(),
            tau: instance.tau(),
            h_start: instance.h_start().to_vec(),
            j_final: instance.j_final().to_vec(),
            c_final: instance.c_final().to_vec(),
            constraints: instance.layout().constraints().to_vec(),
        }
    }

    pub fn into_instance(self) -> Result<PhysicalInstance, Error> {
        let layout = LhzLayout::new(self.n_logical)?;
        if self.constraints != layout.constraints() {
            return Err(Error::InvalidInstance(format!(
                "constraint list does not match the layout for n_logical = {}",
                self.n_logical
            )));
        }
        Ok(PhysicalInstance::new(layout, self.h_start, self.j_final, self.c_final, self.tau)?.with_seed(self.seed))
    }

    pub fn read(path: &Path) -> Result<PhysicalInstance, Error> {
        let file: InstanceFile = serde_json::from_str(&read_file(path)?)
            .map_err(|e| Error::Format { path: path.to_path_buf(), message: e.to_string() })?;
        file.into_instance()
    }
}

/// Parse arguments, run, and report. Returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprint!("{e}");
            let err = json!({ "error": { "kind": "config", "exit_code": 2, "config_error": "usage", "message": e.kind().to_string() } });
            eprintln!("{err}");
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(a) => {
            let mut flags = common_flags(&a.common);
            optimizer_flags(&mut flags, &a.optimizer);
            put(&mut flags, "protocol", a.protocol);
            put(&mut flags, "lambda_f", a.lambda_f);
            put(&mut flags, "n_samples", a.n_samples);
            put(&mut flags, "steps", a.steps);
            run_sweep(&load_config(a.common.config.as_deref(), flags)?)
        }
        Command::ScanLambda(a) => {
            let mut flags = common_flags(&a.common);
            optimizer_flags(&mut flags, &a.optimizer);
            run_scan(&load_config(a.common.config.as_deref(), flags)?)
        }
        Command::Spectrum(a) => {
            let mut flags = common_flags(&a.common);
            optimizer_flags(&mut flags, &a.optimizer);
            put(&mut flags, "protocol", a.protocol);
            put(&mut flags, "lambda_f", a.lambda_f);
            put(&mut flags, "n_times", a.n_times);
            put(&mut flags, "n_levels", a.n_levels);
            run_spectrum(&load_config(a.common.config.as_deref(), flags)?)
        }
        Command::Ensemble(a) => {
            let mut flags = common_flags(&a.common);
            optimizer_flags(&mut flags, &a.optimizer);
            put(&mut flags, "n_instances", a.n_instances);
            put(&mut flags, "base_seed", a.base_seed);
            put(&mut flags, "tau_grid", a.tau_grid);
            put(&mut flags, "protocols", a.protocols);
            put(&mut flags, "histogram_bins", a.histogram_bins);
            run_ensemble_command(&load_config(a.common.config.as_deref(), flags)?, a.quiet)
        }
    }
}

fn put<T: Serialize>(flags: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        flags.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialise"));
    }
}

fn common_flags(a: &CommonArgs) -> Map<String, Value> {
    let mut f = Map::new();
    put(&mut f, "n_logical", a.n_logical);
    put(&mut f, "seed", a.seed);
    put(&mut f, "instance_file", a.instance_file.clone());
    put(&mut f, "h0", a.h0);
    put(&mut f, "c", a.c);
    put(&mut f, "aux_pin", a.aux_pin);
    put(&mut f, "tau", a.tau);
    put(&mut f, "integrator", a.integrator);
    put(&mut f, "sweep_tolerance", a.sweep_tolerance);
    put(&mut f, "output_dir", a.output_dir.clone());
    if a.emit_gnuplot {
        f.insert("emit_gnuplot".into(), Value::Bool(true));
    }
    f
}

fn optimizer_flags(f: &mut Map<String, Value>, a: &OptimizerArgs) {
    put(f, "lambda_bounds", a.lambda_bounds.clone());
    put(f, "n_grid", a.n_grid);
    put(f, "optimizer_tol", a.optimizer_tol);
}

/// Read the optional config file and lay the flags over it.
pub fn load_config(path: Option<&Path>, flags: Map<String, Value>) -> Result<RunConfig, CliError> {
    let file = match path {
        Some(p) => config::parse_file_text(&read_file(p)?)?,
        None => Map::new(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    Ok(config::resolve(file, flags, env_dir)?)
}

pub fn load_instance(cfg: &RunConfig) -> Result<PhysicalInstance, Error> {
    match &cfg.instance {
        InstanceSource::Seed(seed) => {
            PhysicalInstance::random(cfg.n_logical, *seed, cfg.h0, cfg.c, cfg.aux_pin, cfg.tau.unwrap_or(1.0))
        }
        InstanceSource::File(path) => {
            let instance = InstanceFile::read(path)?;
            match cfg.tau {
                Some(t) => instance.with_tau(t),
                None => Ok(instance),
            }
        }
    }
}

fn resolve_lambda(cfg: &RunConfig, instance: &PhysicalInstance, protocol: Protocol) -> Result<f64, Error> {
    match (protocol, cfg.lambda_f) {
        (Protocol::Annealing, _) => Ok(0.0),
        (_, LambdaSpec::Value(v)) => Ok(v),
        (_, LambdaSpec::Optimize) => Ok(optimize_lambda_f(instance, cfg.lambda_bounds, &cfg.optimizer())?.lambda_f),
    }
}

/// Collects written files and their hashes for the manifest.
struct OutputSet {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl OutputSet {
    fn new(dir: &Path) -> Result<Self, Error> {
        create_dir(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Error> {
        write_file(&self.dir.join(name), bytes)?;
        self.files.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn manifest(self, name: &str, command: &str, cfg: &RunConfig, results: Value) -> Result<PathBuf, Error> {
        let manifest = json!({
            "version": VERSION,
            "command": command,
            "config": cfg,
            "results": results,
            "files": self.files,
        });
        let path = self.dir.join(name);
        write_file(&path, to_json(&manifest).as_bytes())?;
        Ok(path)
    }
}

fn sweep_header(protocol: Protocol, n_physical: usize) -> Vec<String> {
    let mut h: Vec<String> =
        ["t", "t_over_tau", "fidelity_sq", "energy", "excess_energy", "norm"].iter().map(|s| s.to_string()).collect();
    if protocol == Protocol::Cd {
        h.extend((0..n_physical).map(|k| format!("y_{k}")));
    }
    h
}

fn run_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let instance = load_instance(cfg)?;
    let protocol = cfg.protocol;
    let lambda_f = resolve_lambda(cfg, &instance, protocol)?;
    let mut opts = SweepOptions::new(protocol, lambda_f)
        .with_samples(cfg.n_samples)
        .with_integrator(cfg.integrator.unwrap_or(Integrator::MidpointExponential));
    opts.tolerance = cfg.sweep_tolerance;
    opts.steps = cfg.steps;
    let result = propagate(&instance, &opts)?;

    let header = sweep_header(protocol, instance.n_physical());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::with_capacity(result.samples.len());
    for s in &result.samples {
        let mut row: Vec<String> = [s.t, s.t / instance.tau(), s.fidelity_sq, s.energy, s.excess_energy, s.norm]
            .into_iter()
            .map(fmt_f64)
            .collect();
        if protocol == Protocol::Cd {
            row.extend(cd_terms(&instance, s.t, lambda_f)?.y.into_iter().map(fmt_f64));
        }
        rows.push(row);
    }

    let stem = format!("sweep_{protocol}");
    let mut out = OutputSet::new(&cfg.output_dir)?;
    out.write("instance.json", to_json(&InstanceFile::from_instance(&instance)).as_bytes())?;
    out.write(&format!("{stem}.csv"), &csv_bytes(&header_refs, &rows))?;
    if cfg.emit_gnuplot {
        out.write(&format!("{stem}.gp"), gnuplot_sweep(&stem).as_bytes())?;
    }
    let results = json!({
        "protocol": protocol,
        "lambda_f": lambda_f,
        "tau": instance.tau(),
        "integrator": result.integrator,
        "steps": result.steps,
        "final_fidelity_sq": result.final_fidelity_sq,
        "final_excess_energy": result.final_excess_energy,
        "max_norm_drift": result.max_norm_drift(),
    });
    let path = out.manifest(&format!("{stem}.json"), "sweep", cfg, results)?;
    println!(
        "{protocol} sweep: lambda_f = {lambda_f:.6}, F^2 = {:.6}, excess energy = {:.6} ({} steps); manifest {}",
        result.final_fidelity_sq,
        result.final_excess_energy,
        result.steps,
        path.display()
    );
    Ok(())
}

fn run_scan(cfg: &RunConfig) -> Result<(), CliError> {
    let instance = load_instance(cfg)?;
    let curve = scan_lambda_f(&instance, cfg.lambda_bounds, &cfg.optimizer())?;
    let rows: Vec<Vec<String>> = curve
        .lambda_values
        .iter()
        .zip(&curve.fidelities)
        .map(|(l, f)| vec![fmt_f64(*l), fmt_f64(*f)])
        .collect();
    let mut out = OutputSet::new(&cfg.output_dir)?;
    out.write("instance.json", to_json(&InstanceFile::from_instance(&instance)).as_bytes())?;
    out.write("scan.csv", &csv_bytes(&["lambda_f", "fidelity_sq"], &rows))?;
    let fit = gaussian_fit(&curve);
    if let Ok(f) = &fit {
        out.write("scan_fit.json", to_json(f).as_bytes())?;
    }
    if cfg.emit_gnuplot {
        out.write("scan.gp", gnuplot_scan(fit.as_ref().ok()).as_bytes())?;
    }
    let best = curve
        .fidelities
        .iter()
        .enumerate()
        .fold(0, |b, (i, f)| if *f > curve.fidelities[b] { i } else { b });
    let results = json!({
        "tau": instance.tau(),
        "best_grid_lambda_f": curve.lambda_values[best],
        "best_grid_fidelity_sq": curve.fidelities[best],
        "fit": fit.as_ref().ok(),
        "fit_error": fit.as_ref().err().map(|e| e.to_string()),
    });
    let path = out.manifest("scan.json", "scan-lambda", cfg, results)?;
    let fit = fit?;
    println!(
        "scan: best grid point lambda_f = {:.6} (F^2 = {:.6}); Gaussian mean {:.6}, FWHM {:.6}; manifest {}",
        curve.lambda_values[best],
        curve.fidelities[best],
        fit.mean,
        fit.fwhm,
        path.display()
    );
    Ok(())
}

fn run_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let instance = load_instance(cfg)?;
    let protocol = cfg.protocol;
    let lambda_f = resolve_lambda(cfg, &instance, protocol)?;
    let series = min_gap_scan(&instance, protocol, lambda_f, cfg.n_times, cfg.n_levels)?;
    let mut header = vec!["t".to_string(), "t_over_tau".to_string()];
    header.extend((0..cfg.n_levels).map(|i| format!("e_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = series
        .times
        .iter()
        .zip(&series.levels)
        .map(|(t, levels)| {
            let mut row = vec![fmt_f64(*t), fmt_f64(t / series.tau)];
            row.extend(levels.iter().copied().map(fmt_f64));
            row
        })
        .collect();
    let stem = format!("spectrum_{protocol}");
    let mut out = OutputSet::new(&cfg.output_dir)?;
    out.write("instance.json", to_json(&InstanceFile::from_instance(&instance)).as_bytes())?;
    out.write(&format!("{stem}.csv"), &csv_bytes(&header_refs, &rows))?;
    if cfg.emit_gnuplot {
        out.write(&format!("{stem}.gp"), gnuplot_spectrum(&stem, cfg.n_levels).as_bytes())?;
    }
    let results = json!({
        "protocol": protocol,
        "lambda_f": lambda_f,
        "tau": series.tau,
        "min_gap": series.min_gap,
        "min_gap_position": series.min_gap_position,
    });
    let path = out.manifest(&format!("{stem}.json"), "spectrum", cfg, results)?;
    println!(
        "{protocol} spectrum: minimal gap {:.6} at t/tau = {:.4}; manifest {}",
        series.min_gap,
        series.min_gap_position,
        path.display()
    );
    Ok(())
}

fn run_ensemble_command(cfg: &RunConfig, quiet: bool) -> Result<(), CliError> {
    if let InstanceSource::File(_) = cfg.instance {
        return Err(ConfigError {
            kind: ConfigErrorKind::Conflict,
            key: Some("instance_file".into()),
            message: "ensembles draw their own instances from base_seed".into(),
        }
        .into());
    }
    let ens = cfg.ensemble();
    let last = std::sync::atomic::AtomicUsize::new(0);
    let stats = run_ensemble_with_progress(&ens, |done, total| {
        // about twenty progress lines per run
        let bucket = done * 20 / total;
        if !quiet && last.fetch_max(bucket, std::sync::atomic::Ordering::Relaxed) < bucket {
            eprintln!("ensemble: {done}/{total} instance-tau items done");
        }
    })?;
    let manifest = persist(&stats, &cfg.output_dir)?;
    if cfg.emit_gnuplot {
        write_file(&cfg.output_dir.join("ratios.gp"), GNUPLOT_RATIOS.as_bytes())?;
    }
    println!("{:>10} {:>10} {:>8} {:>14} {:>14}", "tau", "protocol", "count", "mean_F2", "mean_dE");
    for c in &stats.cells {
        println!(
            "{:>10} {:>10} {:>8} {:>14.6} {:>14.6}",
            c.tau, c.protocol, c.count, c.mean_fidelity_sq, c.mean_excess_energy
        );
    }
    println!("{} failures; {} files written to {}", stats.failures.len(), manifest.files.len() + 1, cfg.output_dir.display());
    Ok(())
}

fn gnuplot_sweep(stem: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't / tau'\nset ylabel 'F^2'\n\
         set yrange [0:1]\nplot '{stem}.csv' using 2:3 with lines\n"
    )
}

fn gnuplot_scan(fit: Option<&GaussianFit>) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'lambda_f'\nset ylabel 'F^2'\n",
    );
    match fit {
        Some(f) => s.push_str(&format!(
            "A = {}\nm = {}\ns = {}\nb = {}\n\
             plot 'scan.csv' using 1:2 with points, A*exp(-(x-m)**2/(2*s**2)) + b title 'Gaussian fit'\n",
            fmt_f64(f.amplitude),
            fmt_f64(f.mean),
            fmt_f64(f.sigma),
            fmt_f64(f.baseline)
        )),
        None => s.push_str("plot 'scan.csv' using 1:2 with linespoints\n"),
    }
    s
}

fn gnuplot_spectrum(stem: &str, n_levels: usize) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't / tau'\nset ylabel 'E'\n\
         plot for [i=3:{}] '{stem}.csv' using 2:i with lines\n",
        n_levels + 2
    )
}

const GNUPLOT_RATIOS: &str = "set datafile separator ','\nset key autotitle columnhead\nset logscale x\n\
set xlabel 'tau'\nplot 'ratios.csv' using 1:2 with linespoints, '' using 1:3 with linespoints\n";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_file_roundtrip() {
        let inst = PhysicalInstance::random(4, 9, 1.0, 2.0, 10.0, 0.5).unwrap();
        let text = to_json(&InstanceFile::from_instance(&inst));
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_instance().unwrap(), inst);
    }

    #[test]
    fn mismatched_constraints_are_rejected() {
        let inst = PhysicalInstance::random(4, 9, 1.0, 2.0, 10.0, 0.5).unwrap();
        let mut f = InstanceFile::from_instance(&inst);
        f.constraints.swap(0, 1);
        assert!(matches!(f.into_instance(), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn exit_codes_are_distinct_per_module() {
        let cases: Vec<CliError> = vec![
            ConfigError { kind: ConfigErrorKind::Range, key: Some("tau".into()), message: String::new() }.into(),
            Error::DegenerateSize(2).into(),
            Error::Singular(0).into(),
            Error::NonConvergence { steps: 1, previous: 0.0, last: 0.0 }.into(),
            Error::NoPeak.into(),
            Error::TooManyFailures { failed: 9, total: 10 }.into(),
            Error::Format { path: "x".into(), message: String::new() }.into(),
        ];
        let codes: Vec<u8> = cases.iter().map(CliError::exit_code).collect();
        assert_eq!(codes, vec![2, 3, 4, 5, 6, 7, 8]);
        let j = cases[0].to_json();
        assert_eq!(j["error"]["key"], "tau");
        assert_eq!(j["error"]["config_error"], "range");
    }
}
