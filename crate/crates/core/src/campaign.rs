//! Benchmark campaigns: instance generation, runs, records and reports.
//!
//! A run evolves the ideal state once per instance, then draws each repeat
//! with its own seed `splitmix64(base_seed + repeat)`, passes the shots
//! through the SPAM channel, post-selects and scores them. Records and CSV
//! files are written to a temporary name and renamed into place.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceFile, DeviceSpec};
use crate::error::{invalid, Error, Result};
use crate::evolve::{Simulator, DEFAULT_DT_US};
use crate::hamiltonian::{build_rydberg_terms, calibrate_spacing, CostModel, DEFAULT_CUTOFF_SPACINGS, DEFAULT_PENALTY};
use crate::instance::{generate_dugg, DuggInstance};
use crate::metrics::MetricsReport;
use crate::mis::{all_maximum_sets, solve_mis_exact_capped, solve_mis_greedy, DEFAULT_ORACLE_CAP};
use crate::rng::splitmix64;
use crate::samples::Bitstring;
use crate::schedule::{build_qaa_schedule, build_qaoa_schedule, validate_schedule, QaaParams, QaoaParams};
use crate::spam::{apply_spam, post_select, SpamParams};
use crate::state::{sample, StateVector, SIMULATOR_CAP};
use crate::waveform::{Interpolation, Waveform, WaveformFile};

const TABLE2_JSON: &str = include_str!("../data/table2_reference.json");
const MAX_EMPTY_RETRIES: usize = 100;

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|source| Error::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, path).map_err(io)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        line: source.line(),
        source,
    })
}

// ---------------------------------------------------------------------------
// gen

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverUsed {
    Exact,
    Greedy,
}

/// Instance file contents: the instance plus how its cost was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub instance: DuggInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverUsed>,
    /// Greedy independent-set size when the exact oracle was not run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<u64>,
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

#[derive(Debug, Clone)]
pub struct GenRequest {
    pub rows: usize,
    pub cols: usize,
    pub occupation_prob: f64,
    pub spacing_um: f64,
    pub count: usize,
    pub seed: u64,
    pub oracle_cap: usize,
}

/// Generates `count` instances from consecutive seeds `seed, seed + 1, ...`;
/// seeds that give an empty grid are skipped (at most 100 in a row).
pub fn generate_instances(req: &GenRequest) -> Result<Vec<InstanceFile>> {
    let mut out = Vec::with_capacity(req.count);
    let mut next = req.seed;
    while out.len() < req.count {
        let mut empties = 0;
        let inst = loop {
            let s = next;
            next = next.wrapping_add(1);
            match generate_dugg(req.rows, req.cols, req.occupation_prob, req.spacing_um, s) {
                Ok(inst) => break inst,
                Err(Error::EmptyInstance) if empties < MAX_EMPTY_RETRIES => empties += 1,
                Err(e) => return Err(e),
            }
        };
        let mut inst = inst;
        inst.id = format!("dugg_{}x{}_{:03}_s{}", req.rows, req.cols, out.len(), inst.seed);
        let file = if inst.n_qubits() <= req.oracle_cap {
            let sol = solve_mis_exact_capped(&inst, req.oracle_cap)?;
            inst.optimal_cost = Some(sol.cost);
            InstanceFile { instance: inst, solver: Some(SolverUsed::Exact), lower_bound: None }
        } else {
            let bound = solve_mis_greedy(&inst).cost;
            InstanceFile { instance: inst, solver: Some(SolverUsed::Greedy), lower_bound: Some(bound) }
        };
        out.push(file);
    }
    Ok(out)
}

pub fn cmd_gen(req: &GenRequest, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let files = generate_instances(req)?;
    let mut paths = Vec::with_capacity(files.len());
    for f in files {
        let path = out_dir.join(format!("{}.json", f.instance.id));
        write_atomic(&path, &serde_json::to_string_pretty(&f)?)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Fills in exact optima (or greedy bounds past the cap) for existing files.
pub fn cmd_solve(paths: &[PathBuf], oracle_cap: usize) -> Result<Vec<InstanceFile>> {
    let mut out = Vec::new();
    for path in paths {
        let mut f = InstanceFile::load(path)?;
        if f.instance.n_qubits() <= oracle_cap {
            f.instance.optimal_cost = Some(solve_mis_exact_capped(&f.instance, oracle_cap)?.cost);
            f.solver = Some(SolverUsed::Exact);
            f.lower_bound = None;
        } else {
            f.lower_bound = Some(solve_mis_greedy(&f.instance).cost);
            f.solver = Some(SolverUsed::Greedy);
        }
        write_atomic(path, &serde_json::to_string_pretty(&f)?)?;
        out.push(f);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// run

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Qaa,
    Qaoa,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::Qaa => "qaa",
            Protocol::Qaoa => "qaoa",
        })
    }
}

/// Reference device whose nearest-neighbour interaction should be matched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRef {
    pub c6: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub device: DeviceFile,
    pub protocol: Protocol,
    /// QAA parameters (also fixes the total time for QAA runs).
    pub qaa: QaaParams,
    /// Trained parameters, required for QAOA.
    pub qaoa: Option<QaoaParams>,
    pub interpolation: Interpolation,
    pub n_shots: u64,
    pub n_repeats: usize,
    pub dt_us: f64,
    pub seed: u64,
    pub spam: SpamParams,
    pub penalty: f64,
    pub cutoff_spacings: f64,
    pub oracle_cap: usize,
    /// When set, instance spacings are rescaled from this C6 to the device's.
    pub calibrate_from: Option<CalibrationRef>,
}

impl BenchmarkConfig {
    pub fn qaa(device: &DeviceSpec, t_tot: f64) -> Self {
        Self {
            device: device.into(),
            protocol: Protocol::Qaa,
            qaa: QaaParams::standard(t_tot),
            qaoa: None,
            interpolation: Interpolation::Linear,
            n_shots: 500,
            n_repeats: 3,
            dt_us: DEFAULT_DT_US,
            seed: 0,
            spam: SpamParams::default(),
            penalty: DEFAULT_PENALTY,
            cutoff_spacings: DEFAULT_CUTOFF_SPACINGS,
            oracle_cap: DEFAULT_ORACLE_CAP,
            calibrate_from: None,
        }
    }

    pub fn qaoa(device: &DeviceSpec, params: QaoaParams) -> Self {
        Self {
            protocol: Protocol::Qaoa,
            qaa: QaaParams::standard(params.t_tot),
            qaoa: Some(params),
            ..Self::qaa(device, 1.0)
        }
    }

    pub fn check(&self) -> Result<DeviceSpec> {
        if self.n_shots == 0 {
            return Err(invalid("n_shots must be at least 1"));
        }
        if self.n_repeats == 0 {
            return Err(invalid("n_repeats must be at least 1"));
        }
        if !(self.dt_us > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        self.spam.check()?;
        if self.protocol == Protocol::Qaoa && self.qaoa.is_none() {
            return Err(invalid("QAOA runs need trained parameters"));
        }
        self.device.clone().try_into()
    }

    pub fn t_tot(&self) -> f64 {
        match (&self.protocol, &self.qaoa) {
            (Protocol::Qaoa, Some(p)) => p.t_tot,
            _ => self.qaa.t_tot(),
        }
    }

    pub fn waveform(&self) -> Result<Waveform> {
        match self.protocol {
            Protocol::Qaa => build_qaa_schedule(&self.qaa),
            Protocol::Qaoa => build_qaoa_schedule(
                self.qaoa.as_ref().ok_or_else(|| invalid("missing QAOA parameters"))?,
                self.interpolation,
            ),
        }
    }

    /// Seed of repeat `k`.
    pub fn repeat_seed(&self, k: usize) -> u64 {
        splitmix64(self.seed.wrapping_add(k as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Stat {
    /// Mean and sample standard deviation (0 for a single value).
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub approximation_ratio: Option<Stat>,
    pub valid_fraction: Option<Stat>,
    pub success_probability: Option<Stat>,
    pub best_cost: Option<Stat>,
}

impl Aggregate {
    pub fn of(reports: &[&MetricsReport]) -> Self {
        let pick = |f: &dyn Fn(&MetricsReport) -> Option<f64>| {
            Stat::of(&reports.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
        };
        Self {
            approximation_ratio: pick(&|r| r.approximation_ratio),
            valid_fraction: pick(&|r| Some(r.valid_fraction)),
            success_probability: pick(&|r| Some(r.success_probability)),
            best_cost: pick(&|r| r.best_cost),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub seed: u64,
    pub sample_digest: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub n_qubits: usize,
    pub optimal_cost: u64,
    pub spacing_um: f64,
    pub config: BenchmarkConfig,
    pub waveform: WaveformFile,
    pub repeats: Vec<RepeatRecord>,
    pub aggregate: Aggregate,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

/// Runs every repeat of one instance.
pub fn run_instance(config: &BenchmarkConfig, instance: &DuggInstance) -> Result<RunRecord> {
    let device = config.check()?;
    let n = instance.n_qubits();
    if n > SIMULATOR_CAP {
        return Err(Error::SimulatorCapExceeded { n_qubits: n, cap: SIMULATOR_CAP });
    }
    let waveform = config.waveform()?;
    let violations = validate_schedule(&waveform, &device);
    if !violations.is_empty() {
        return Err(Error::ScheduleViolations(violations));
    }
    let instance = match config.calibrate_from {
        Some(r) => instance.with_spacing(calibrate_spacing(r.c6, instance.spacing_um, device.c6)?),
        None => instance.clone(),
    };

    let optimal_sets = all_maximum_sets(&instance, config.oracle_cap)?;
    let optimal: HashSet<Bitstring> = optimal_sets.into_iter().map(Bitstring).collect();
    let c_opt = optimal.iter().next().map_or(0, |b| b.popcount()) as u64;
    if let Some(stored) = instance.optimal_cost {
        if stored != c_opt {
            return Err(invalid(format!(
                "{}: stored optimal cost {stored} disagrees with oracle {c_opt}",
                instance.id
            )));
        }
    }
    let cost = CostModel::mis(&instance, config.penalty)?;

    let terms = build_rydberg_terms(&instance, &device, config.cutoff_spacings * instance.spacing_um)?;
    let sim = Simulator::new(&terms)?;
    let state = sim.evolve(&waveform, config.dt_us, StateVector::ground(n)?)?;

    let mut repeats = Vec::with_capacity(config.n_repeats);
    for k in 0..config.n_repeats {
        let seed = config.repeat_seed(k);
        let raw = sample(&state, config.n_shots, seed)?;
        let measured = apply_spam(&raw, &config.spam, splitmix64(seed))?;
        let kept = post_select(&measured);
        let metrics = if c_opt == 0 {
            return Err(invalid("instance has no vertices"));
        } else {
            MetricsReport::score(&kept, &instance, &cost, c_opt as f64, &optimal)?
        };
        repeats.push(RepeatRecord { repeat: k, seed, sample_digest: measured.digest(), metrics });
    }
    let aggregate = Aggregate::of(&repeats.iter().map(|r| &r.metrics).collect::<Vec<_>>());
    Ok(RunRecord {
        instance_id: instance.id.clone(),
        n_qubits: n,
        optimal_cost: c_opt,
        spacing_um: instance.spacing_um,
        config: config.clone(),
        waveform: waveform.to_file(),
        repeats,
        aggregate,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x}"))
}

pub const RUN_CSV_HEADER: &str =
    "instance,n_qubits,protocol,t_tot_us,repeat,r,valid_fraction,p_success,best_cost";

/// Per-repeat CSV rows followed by `mean` and `std` rows.
pub fn run_csv_rows(record: &RunRecord) -> Vec<String> {
    let prefix = format!(
        "{},{},{},{}",
        record.instance_id,
        record.n_qubits,
        record.config.protocol,
        record.config.t_tot()
    );
    let mut rows: Vec<String> = record
        .repeats
        .iter()
        .map(|r| {
            format!(
                "{prefix},{},{},{},{},{}",
                r.repeat,
                fmt_opt(r.metrics.approximation_ratio),
                r.metrics.valid_fraction,
                r.metrics.success_probability,
                fmt_opt(r.metrics.best_cost)
            )
        })
        .collect();
    let a = &record.aggregate;
    for (label, f) in [("mean", (|s: Stat| s.mean) as fn(Stat) -> f64), ("std", |s: Stat| s.std)] {
        rows.push(format!(
            "{prefix},{label},{},{},{},{}",
            fmt_opt(a.approximation_ratio.map(f)),
            fmt_opt(a.valid_fraction.map(f)),
            fmt_opt(a.success_probability.map(f)),
            fmt_opt(a.best_cost.map(f))
        ));
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub instance_id: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct CampaignOutput {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub record_paths: Vec<PathBuf>,
    pub csv_path: PathBuf,
}

/// Runs all instances (in parallel) and writes `records/<id>.json`,
/// `runs.csv` and, if anything failed, `failures.json` under `out_dir`.
pub fn run_campaign(
    config: &BenchmarkConfig,
    instances: &[DuggInstance],
    out_dir: &Path,
) -> Result<CampaignOutput> {
    config.check()?;
    let results: Vec<Result<RunRecord>> =
        instances.par_iter().map(|inst| run_instance(config, inst)).collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut record_paths = Vec::new();
    let mut csv = String::from(RUN_CSV_HEADER);
    csv.push('\n');
    for (inst, res) in instances.iter().zip(results) {
        match res {
            Ok(rec) => {
                let path = out_dir.join("records").join(format!("{}.json", rec.instance_id));
                write_atomic(&path, &serde_json::to_string_pretty(&rec)?)?;
                for row in run_csv_rows(&rec) {
                    csv.push_str(&row);
                    csv.push('\n');
                }
                record_paths.push(path);
                records.push(rec);
            }
            Err(e) => failures.push(RunFailure { instance_id: inst.id.clone(), error: e.to_string() }),
        }
    }
    let csv_path = out_dir.join("runs.csv");
    write_atomic(&csv_path, &csv)?;
    if !failures.is_empty() {
        write_atomic(&out_dir.join("failures.json"), &serde_json::to_string_pretty(&failures)?)?;
    }
    Ok(CampaignOutput { records, failures, record_paths, csv_path })
}

// ---------------------------------------------------------------------------
// report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub n_qubits: usize,
    pub r: BTreeMap<String, f64>,
    pub valid: BTreeMap<String, f64>,
}

/// Published hardware numbers used for side-by-side comparison only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub description: String,
    pub protocol: Protocol,
    pub t_tot_us: f64,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn bundled() -> Self {
        serde_json::from_str(TABLE2_JSON).expect("bundled reference table parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn devices(&self) -> Vec<String> {
        let mut names: Vec<String> = self.rows.iter().flat_map(|r| r.r.keys().cloned()).collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn row(&self, n_qubits: usize) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.n_qubits == n_qubits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n_qubits: usize,
    pub instances: usize,
    pub optimal_cost: Stat,
    pub aggregate: Aggregate,
}

/// Per-size aggregates over every repeat of every record, ascending in size.
pub fn summarize(records: &[RunRecord]) -> Vec<SizeSummary> {
    let mut by_size: BTreeMap<usize, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_size.entry(r.n_qubits).or_default().push(r);
    }
    by_size
        .into_iter()
        .map(|(n, recs)| {
            let reports: Vec<&MetricsReport> =
                recs.iter().flat_map(|r| r.repeats.iter().map(|x| &x.metrics)).collect();
            let opts: Vec<f64> = recs.iter().map(|r| r.optimal_cost as f64).collect();
            SizeSummary {
                n_qubits: n,
                instances: recs.len(),
                optimal_cost: Stat::of(&opts).expect("group is non-empty"),
                aggregate: Aggregate::of(&reports),
            }
        })
        .collect()
}

fn stat_cols(s: Option<Stat>) -> String {
    match s {
        Some(s) => format!("{},{}", s.mean, s.std),
        None => ",".to_string(),
    }
}

/// Summary CSV and a plain-text comparison table.
pub fn render_report(summary: &[SizeSummary], reference: Option<&ReferenceTable>) -> (String, String) {
    let devices = reference.map(|r| r.devices()).unwrap_or_default();
    let mut csv = String::from(
        "n_qubits,instances,r_mean,r_std,valid_mean,valid_std,p_success_mean,p_success_std,best_cost_mean,best_cost_std,optimal_cost_mean",
    );
    for d in &devices {
        let _ = write!(csv, ",ref_r_{d},ref_valid_{d}");
    }
    csv.push('\n');

    let mut table = String::new();
    let _ = write!(table, "{:>4} {:>5} {:>17} {:>17} {:>17} {:>15} {:>7}", "N_q", "inst", "r", "valid", "p_success", "best_cost", "C_opt");
    for d in &devices {
        let _ = write!(table, " {:>22}", format!("{d} r/valid"));
    }
    table.push('\n');

    let pm = |s: Option<Stat>| s.map_or("-".to_string(), |s| format!("{:.4}±{:.4}", s.mean, s.std));
    for s in summary {
        let a = &s.aggregate;
        let _ = write!(
            csv,
            "{},{},{},{},{},{},{}",
            s.n_qubits,
            s.instances,
            stat_cols(a.approximation_ratio),
            stat_cols(a.valid_fraction),
            stat_cols(a.success_probability),
            stat_cols(a.best_cost),
            s.optimal_cost.mean
        );
        let _ = write!(
            table,
            "{:>4} {:>5} {:>17} {:>17} {:>17} {:>15} {:>7}",
            s.n_qubits,
            s.instances,
            pm(a.approximation_ratio),
            pm(a.valid_fraction),
            pm(a.success_probability),
            a.best_cost.map_or("-".to_string(), |b| format!("{:.2}±{:.2}", b.mean, b.std)),
            s.optimal_cost.mean
        );
        let row = reference.and_then(|r| r.row(s.n_qubits));
        for d in &devices {
            let r = row.and_then(|row| row.r.get(d)).copied();
            let v = row.and_then(|row| row.valid.get(d)).copied();
            let _ = write!(csv, ",{},{}", fmt_opt(r), fmt_opt(v));
            let cell = match (r, v) {
                (Some(r), Some(v)) => format!("{r:.4}/{v:.3}"),
                _ => "-".to_string(),
            };
            let _ = write!(table, " {cell:>22}");
        }
        csv.push('\n');
        table.push('\n');
    }
    (csv, table)
}

pub fn cmd_report(record_paths: &[PathBuf], reference: Option<&ReferenceTable>) -> Result<(String, String)> {
    let records = record_paths.iter().map(|p| RunRecord::load(p)).collect::<Result<Vec<_>>>()?;
    Ok(render_report(&summarize(&records), reference))
}
