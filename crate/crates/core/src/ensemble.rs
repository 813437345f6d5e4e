//! Ensembles of random instances swept at several sweep times: per-instance
//! records, per-cell statistics, fidelity histograms, CD/annealing ratios and
//! byte-reproducible persistence.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate, SweepOptions, SweepResult};
use crate::error::{Error, Result};
use crate::lattice::PhysicalInstance;
use crate::operators::Protocol;
use crate::optimizer::{fit_gaussian, optimize_lambda_f, GaussianFit, OptimizerConfig};
use crate::output::{create_dir, csv_bytes, fmt_f64, parse_f64, read_file, sha256_hex, to_json, write_file};

pub const DEFAULT_TAU_GRID: [f64; 9] = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0];

/// Largest tolerated fraction of failed runs.
pub const FAILURE_CEILING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_logical: usize,
    pub n_instances: usize,
    /// Instance `i` is generated from seed `base_seed + i`.
    pub base_seed: u64,
    pub tau_grid: Vec<f64>,
    pub lambda_bounds: (f64, f64),
    pub protocols: Vec<Protocol>,
    pub optimizer: OptimizerConfig,
    pub h0: f64,
    pub c: f64,
    pub aux_pin: f64,
    pub histogram_bins: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_logical: 4,
            n_instances: 100,
            base_seed: 0,
            tau_grid: DEFAULT_TAU_GRID.to_vec(),
            lambda_bounds: (-10.0, 10.0),
            protocols: vec![Protocol::Annealing, Protocol::Cd],
            optimizer: OptimizerConfig::default(),
            h0: 1.0,
            c: 2.0,
            aux_pin: 10.0,
            histogram_bins: 20,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Ensemble(m));
        if self.n_instances == 0 {
            return bad("n_instances must be at least 1".into());
        }
        if self.tau_grid.is_empty() {
            return bad("tau_grid must not be empty".into());
        }
        if self.tau_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad(format!("tau_grid entries must be positive, got {:?}", self.tau_grid));
        }
        if self.tau_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("tau_grid must be strictly ascending, got {:?}", self.tau_grid));
        }
        let (lo, hi) = self.lambda_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("lambda_bounds must satisfy lo < hi, got [{lo}, {hi}]"));
        }
        if self.protocols.is_empty() {
            return bad("protocols must not be empty".into());
        }
        let mut seen = self.protocols.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.protocols.len() {
            return bad("protocols must not repeat".into());
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be at least 1".into());
        }
        if self.optimizer.n_grid < 3 || !(self.optimizer.tol > 0.0) {
            return bad("optimizer needs n_grid >= 3 and tol > 0".into());
        }
        crate::lattice::LhzLayout::new(self.n_logical)?;
        Ok(())
    }

    pub fn instance(&self, index: usize, tau: f64) -> Result<PhysicalInstance> {
        PhysicalInstance::random(self.n_logical, self.base_seed + index as u64, self.h0, self.c, self.aux_pin, tau)
    }

    fn sweep(&self, protocol: Protocol, lambda_f: f64) -> SweepOptions {
        let mut opts = SweepOptions::new(protocol, lambda_f).with_samples(2).with_integrator(self.optimizer.integrator);
        opts.tolerance = self.optimizer.sweep_tolerance;
        opts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: usize,
    pub seed: u64,
    pub tau: f64,
    pub protocol: Protocol,
    /// Optimised endpoint; 0 for annealing.
    pub lambda_f: f64,
    pub fidelity_sq: f64,
    pub excess_energy: f64,
    pub steps: usize,
    /// `max |norm - 1|` over the sampled times of the sweep.
    pub norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance: usize,
    pub seed: u64,
    pub tau: f64,
    pub protocol: Protocol,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub tau: f64,
    pub protocol: Protocol,
    pub count: usize,
    pub failures: usize,
    pub mean_fidelity_sq: f64,
    /// Sample standard deviation (0 for a single record).
    pub std_fidelity_sq: f64,
    pub mean_excess_energy: f64,
    pub std_excess_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub config: EnsembleConfig,
    /// Ordered by instance, then tau, then protocol order in the config.
    pub records: Vec<InstanceRecord>,
    pub failures: Vec<FailureRecord>,
    /// Ordered by tau, then protocol order in the config.
    pub cells: Vec<CellSummary>,
}

impl EnsembleStats {
    pub fn cell(&self, tau: f64, protocol: Protocol) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.tau == tau && c.protocol == protocol)
    }

    pub fn records_for(&self, tau: f64, protocol: Protocol) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(move |r| r.tau == tau && r.protocol == protocol)
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn summarize(config: &EnsembleConfig, records: &[InstanceRecord], failures: &[FailureRecord]) -> Vec<CellSummary> {
    let mut cells = Vec::new();
    for &tau in &config.tau_grid {
        for &protocol in &config.protocols {
            let rs: Vec<&InstanceRecord> = records.iter().filter(|r| r.tau == tau && r.protocol == protocol).collect();
            let f: Vec<f64> = rs.iter().map(|r| r.fidelity_sq).collect();
            let e: Vec<f64> = rs.iter().map(|r| r.excess_energy).collect();
            let (mf, sf) = mean_std(&f);
            let (me, se) = mean_std(&e);
            cells.push(CellSummary {
                tau,
                protocol,
                count: rs.len(),
                failures: failures.iter().filter(|x| x.tau == tau && x.protocol == protocol).count(),
                mean_fidelity_sq: mf,
                std_fidelity_sq: sf,
                mean_excess_energy: me,
                std_excess_energy: se,
            });
        }
    }
    cells
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleStats> {
    run_ensemble_with_progress(config, |_, _| {})
}

/// As [`run_ensemble`], calling `progress(done, total)` as (instance, tau)
/// work items finish. Items run on the rayon pool; results are reduced in
/// (instance, tau) order so the output does not depend on scheduling.
pub fn run_ensemble_with_progress<P>(config: &EnsembleConfig, progress: P) -> Result<EnsembleStats>
where
    P: Fn(usize, usize) + Sync,
{
    config.validate()?;
    let items: Vec<(usize, f64)> =
        (0..config.n_instances).flat_map(|i| config.tau_grid.iter().map(move |&tau| (i, tau))).collect();
    let done = AtomicUsize::new(0);
    let outcomes: Vec<Result<Vec<std::result::Result<InstanceRecord, FailureRecord>>>> = items
        .par_iter()
        .map(|&(i, tau)| {
            let out = run_item(config, i, tau);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, items.len());
            out
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        for r in outcome? {
            match r {
                Ok(rec) => records.push(rec),
                Err(fail) => failures.push(fail),
            }
        }
    }
    let total = items.len() * config.protocols.len();
    if failures.len() as f64 > FAILURE_CEILING * total as f64 {
        return Err(Error::TooManyFailures { failed: failures.len(), total });
    }
    let cells = summarize(config, &records, &failures);
    Ok(EnsembleStats { config: config.clone(), records, failures, cells })
}

fn run_item(
    config: &EnsembleConfig,
    i: usize,
    tau: f64,
) -> Result<Vec<std::result::Result<InstanceRecord, FailureRecord>>> {
    let seed = config.base_seed + i as u64;
    let instance = config.instance(i, tau)?;
    // the CD optimum is shared by cd and cd_real
    let mut optimum = None;
    Ok(config
        .protocols
        .iter()
        .map(|&protocol| match run_cell(config, &instance, protocol, &mut optimum) {
            Ok((lambda_f, r)) => Ok(InstanceRecord {
                instance: i,
                seed,
                tau,
                protocol,
                lambda_f,
                fidelity_sq: r.final_fidelity_sq,
                excess_energy: r.final_excess_energy,
                steps: r.steps,
                norm_drift: r.max_norm_drift(),
            }),
            Err(error) => Err(FailureRecord { instance: i, seed, tau, protocol, error }),
        })
        .collect())
}

fn run_cell(
    config: &EnsembleConfig,
    instance: &PhysicalInstance,
    protocol: Protocol,
    optimum: &mut Option<std::result::Result<f64, String>>,
) -> std::result::Result<(f64, SweepResult), String> {
    let lambda_f = match protocol {
        Protocol::Annealing => 0.0,
        Protocol::Cd | Protocol::CdReal => optimum
            .get_or_insert_with(|| {
                optimize_lambda_f(instance, config.lambda_bounds, &config.optimizer)
                    .map(|o| o.lambda_f)
                    .map_err(|e| e.to_string())
            })
            .clone()?,
    };
    let result = propagate(instance, &config.sweep(protocol, lambda_f)).map_err(|e| e.to_string())?;
    Ok((lambda_f, result))
}

/// Counts of final fidelities in equal bins over `[0, 1]` and a Gaussian fit to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub tau: f64,
    pub protocol: Protocol,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub fit: Option<GaussianFit>,
    /// Why no fit was produced, if it was not.
    pub fit_error: Option<String>,
}

pub fn fidelity_histogram(stats: &EnsembleStats, tau: f64, protocol: Protocol, n_bins: usize) -> Result<Histogram> {
    if n_bins == 0 {
        return Err(Error::Ensemble("histogram needs at least one bin".into()));
    }
    if stats.cell(tau, protocol).is_none() {
        return Err(Error::Ensemble(format!("no cell for tau = {tau}, protocol {protocol}")));
    }
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for r in stats.records_for(tau, protocol) {
        let b = ((r.fidelity_sq * n_bins as f64).floor() as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let heights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (fit, fit_error) = match fit_gaussian(&centers, &heights) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Histogram { tau, protocol, edges, counts, fit, fit_error })
}

/// Ratios of cell means, CD over annealing. `None` where the annealing mean is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub tau: f64,
    pub fidelity_ratio: Option<f64>,
    pub excess_energy_ratio: Option<f64>,
}

pub fn ratio_curves(stats: &EnsembleStats) -> Result<Vec<RatioPoint>> {
    let ratio = |a: f64, b: f64| if b != 0.0 && a.is_finite() && b.is_finite() { Some(a / b) } else { None };
    stats
        .config
        .tau_grid
        .iter()
        .map(|&tau| {
            let (Some(cd), Some(ann)) = (stats.cell(tau, Protocol::Cd), stats.cell(tau, Protocol::Annealing)) else {
                return Err(Error::Ensemble(format!("ratios need annealing and cd cells at tau = {tau}")));
            };
            Ok(RatioPoint {
                tau,
                fidelity_ratio: ratio(cd.mean_fidelity_sq, ann.mean_fidelity_sq),
                excess_energy_ratio: ratio(cd.mean_excess_energy, ann.mean_excess_energy),
            })
        })
        .collect()
}

pub const RECORDS_FILE: &str = "records.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const RATIOS_FILE: &str = "ratios.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const RECORD_HEADER: [&str; 9] =
    ["instance", "seed", "tau", "protocol", "lambda_f", "fidelity_sq", "excess_energy", "steps", "norm_drift"];
const FAILURE_HEADER: [&str; 5] = ["instance", "seed", "tau", "protocol", "error"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: EnsembleConfig,
    /// File name to SHA-256 of its contents.
    pub files: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct Summary {
    cells: Vec<CellSummary>,
    histograms: Vec<Histogram>,
    ratios: Vec<RatioPoint>,
}

/// Write every artefact of an ensemble into `dir`, then a manifest hashing them.
pub fn persist(stats: &EnsembleStats, dir: &Path) -> Result<Manifest> {
    create_dir(dir)?;
    let mut files = BTreeMap::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        write_file(&dir.join(name), &bytes)?;
        files.insert(name.to_string(), sha256_hex(&bytes));
        Ok(())
    };

    let rows: Vec<Vec<String>> = stats
        .records
        .iter()
        .map(|r| {
            vec![
                r.instance.to_string(),
                r.seed.to_string(),
                fmt_f64(r.tau),
                r.protocol.to_string(),
                fmt_f64(r.lambda_f),
                fmt_f64(r.fidelity_sq),
                fmt_f64(r.excess_energy),
                r.steps.to_string(),
                fmt_f64(r.norm_drift),
            ]
        })
        .collect();
    put(RECORDS_FILE, csv_bytes(&RECORD_HEADER, &rows))?;

    let rows: Vec<Vec<String>> = stats
        .failures
        .iter()
        .map(|f| vec![f.instance.to_string(), f.seed.to_string(), fmt_f64(f.tau), f.protocol.to_string(), f.error.clone()])
        .collect();
    put(FAILURES_FILE, csv_bytes(&FAILURE_HEADER, &rows))?;

    let mut histograms = Vec::new();
    for &tau in &stats.config.tau_grid {
        for &protocol in &stats.config.protocols {
            histograms.push(fidelity_histogram(stats, tau, protocol, stats.config.histogram_bins)?);
        }
    }
    let rows: Vec<Vec<String>> = histograms
        .iter()
        .flat_map(|h| {
            h.counts.iter().enumerate().map(move |(b, c)| {
                vec![fmt_f64(h.tau), h.protocol.to_string(), fmt_f64(h.edges[b]), fmt_f64(h.edges[b + 1]), c.to_string()]
            })
        })
        .collect();
    put(HISTOGRAM_FILE, csv_bytes(&["tau", "protocol", "bin_lo", "bin_hi", "count"], &rows))?;

    let both = stats.config.protocols.contains(&Protocol::Cd) && stats.config.protocols.contains(&Protocol::Annealing);
    let ratios = if both { ratio_curves(stats)? } else { Vec::new() };
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let rows: Vec<Vec<String>> = ratios
        .iter()
        .map(|r| vec![fmt_f64(r.tau), opt(r.fidelity_ratio), opt(r.excess_energy_ratio)])
        .collect();
    put(RATIOS_FILE, csv_bytes(&["tau", "fidelity_ratio", "excess_energy_ratio"], &rows))?;

    let summary = Summary { cells: stats.cells.clone(), histograms, ratios };
    put(SUMMARY_FILE, to_json(&summary).into_bytes())?;

    let manifest = Manifest { version: crate::VERSION.to_string(), config: stats.config.clone(), files };
    write_file(&dir.join(MANIFEST_FILE), to_json(&manifest).as_bytes())?;
    Ok(manifest)
}

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), message: message.into() }
}

fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let text = read_file(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let got = reader.headers().map_err(|e| format_err(path, e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(format_err(path, format!("unexpected header {got:?}")));
    }
    reader.records().map(|r| r.map_err(|e| format_err(path, e.to_string()))).collect()
}

/// Read back what [`persist`] wrote, checking every hash in the manifest.
pub fn load(dir: &Path) -> Result<EnsembleStats> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest: Manifest =
        serde_json::from_str(&read_file(&manifest_path)?).map_err(|e| format_err(&manifest_path, e.to_string()))?;
    for (name, hash) in &manifest.files {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if &sha256_hex(&bytes) != hash {
            return Err(format_err(&path, "content does not match the manifest hash"));
        }
    }
    let path = dir.join(RECORDS_FILE);
    let field = |rec: &csv::StringRecord, i: usize| rec.get(i).unwrap_or_default().to_string();
    let num = |path: &Path, s: String| parse_f64(&s).ok_or_else(|| format_err(path, format!("bad number '{s}'")));
    let int = |path: &Path, s: String| s.parse::<u64>().map_err(|_| format_err(path, format!("bad integer '{s}'")));
    let proto = |path: &Path, s: String| s.parse::<Protocol>().map_err(|e| format_err(path, e));
    let mut records = Vec::new();
    for rec in read_csv(&path, &RECORD_HEADER)? {
        records.push(InstanceRecord {
            instance: int(&path, field(&rec, 0))? as usize,
            seed: int(&path, field(&rec, 1))?,
            tau: num(&path, field(&rec, 2))?,
            protocol: proto(&path, field(&rec, 3))?,
            lambda_f: num(&path, field(&rec, 4))?,
            fidelity_sq: num(&path, field(&rec, 5))?,
            excess_energy: num(&path, field(&rec, 6))?,
            steps: int(&path, field(&rec, 7))? as usize,
            norm_drift: num(&path, field(&rec, 8))?,
        });
    }
    let path = dir.join(FAILURES_FILE);
    let mut failures = Vec::new();
    for rec in read_csv(&path, &FAILURE_HEADER)? {
        failures.push(FailureRecord {
            instance: int(&path, field(&rec, 0))? as usize,
            seed: int(&path, field(&rec, 1))?,
            tau: num(&path, field(&rec, 2))?,
            protocol: proto(&path, field(&rec, 3))?,
            error: field(&rec, 4),
        });
    }
    let path = dir.join(SUMMARY_FILE);
    let summary: Summary = serde_json::from_str(&read_file(&path)?).map_err(|e| format_err(&path, e.to_string()))?;
    Ok(EnsembleStats { config: manifest.config, records, failures, cells: summary.cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> EnsembleConfig {
        EnsembleConfig {
            n_logical: 3,
            n_instances: 3,
            base_seed: 40,
            tau_grid: vec![0.05, 2.0],
            lambda_bounds: (-2.0, 2.0),
            optimizer: OptimizerConfig { n_grid: 5, tol: 0.05, ..Default::default() },
            histogram_bins: 10,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(EnsembleConfig::default().validate().is_ok());
        let mut c = small_config();
        c.tau_grid = vec![1.0, 0.5];
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.n_instances = 0;
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.protocols = vec![Protocol::Cd, Protocol::Cd];
        assert!(c.validate().is_err());
    }

    #[test]
    fn ensemble_cells_and_dominance() {
        let stats = run_ensemble(&small_config()).unwrap();
        assert_eq!(stats.records.len(), 3 * 2 * 2);
        assert!(stats.failures.is_empty());
        for cell in &stats.cells {
            assert_eq!(cell.count, 3);
        }
        for i in 0..3 {
            for tau in [0.05, 2.0] {
                let get = |p| stats.records.iter().find(|r| r.instance == i && r.tau == tau && r.protocol == p).unwrap();
                assert!(get(Protocol::Cd).fidelity_sq >= get(Protocol::Annealing).fidelity_sq - 1e-12);
                assert_eq!(get(Protocol::Cd).seed, 40 + i as u64);
            }
        }
        let h = fidelity_histogram(&stats, 2.0, Protocol::Cd, 10).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 3);
        assert_eq!(ratio_curves(&stats).unwrap().len(), 2);
    }

    #[test]
    fn histogram_of_identical_values_has_no_fit() {
        let config = EnsembleConfig { n_instances: 4, tau_grid: vec![1.0], ..small_config() };
        let records = (0..4)
            .map(|i| InstanceRecord {
                instance: i,
                seed: i as u64,
                tau: 1.0,
                protocol: Protocol::Cd,
                lambda_f: 0.0,
                fidelity_sq: 0.5,
                excess_energy: 1.0,
                steps: 1,
                norm_drift: 0.0,
            })
            .collect::<Vec<_>>();
        let cells = summarize(&config, &records, &[]);
        let stats = EnsembleStats { config, records, failures: vec![], cells };
        let h = fidelity_histogram(&stats, 1.0, Protocol::Cd, 10).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert!(h.fit.is_none() && h.fit_error.is_some());
    }

    #[test]
    fn zero_denominator_is_excluded() {
        let config = EnsembleConfig { n_instances: 1, tau_grid: vec![1.0], ..small_config() };
        let rec = |p, f| InstanceRecord {
            instance: 0,
            seed: 0,
            tau: 1.0,
            protocol: p,
            lambda_f: 0.0,
            fidelity_sq: f,
            excess_energy: 0.0,
            steps: 1,
            norm_drift: 0.0,
        };
        let records = vec![rec(Protocol::Annealing, 0.0), rec(Protocol::Cd, 0.4)];
        let cells = summarize(&config, &records, &[]);
        let stats = EnsembleStats { config, records, failures: vec![], cells };
        let r = ratio_curves(&stats).unwrap();
        assert_eq!(r[0].fidelity_ratio, None);
        assert_eq!(r[0].excess_energy_ratio, None);
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }
}
