//! `rydbench`: generate DUGG instances, train QAOA parameters, run benchmark
//! campaigns and summarize them.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rydbench::campaign::{
    cmd_gen, cmd_report, cmd_solve, run_campaign, write_atomic, BenchmarkConfig, CalibrationRef, GenRequest,
    InstanceFile, ReferenceTable,
};
use rydbench::evolve::DEFAULT_DT_US;
use rydbench::mis::DEFAULT_ORACLE_CAP;
use rydbench::train::TrainedParamsFile;
use rydbench::{train_transfer_params, DeviceSpec, DuggInstance, OptimizerConfig, SpamParams, TrainSettings};

#[derive(Parser)]
#[command(name = "rydbench", version, about = "Rydberg-atom MIS benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded DUGG instances and solve them.
    Gen(GenArgs),
    /// (Re)compute optimal costs of existing instance files in place.
    Solve(SolveArgs),
    /// Train transferable QAOA parameters on a set of instances.
    Train(TrainArgs),
    /// Run a benchmark campaign over instance files.
    Run(RunArgs),
    /// Summarize run records per problem size.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// Site occupation probability.
    #[arg(long = "p-occ", default_value_t = 0.8)]
    p_occ: f64,
    /// Lattice spacing in um.
    #[arg(long, default_value_t = 5.0)]
    spacing: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance files or directories of them.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Device file or bundled name (`fresnel`, `aquila`).
    #[arg(long, default_value = "fresnel")]
    device: String,
    /// Number of QAOA layers.
    #[arg(long, default_value_t = 10)]
    p: usize,
    #[arg(long = "t-tot", default_value_t = 2.0)]
    t_tot: f64,
    #[arg(long, default_value_t = DEFAULT_DT_US)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Output directory; the parameters go to `trained_params.json`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Qaa,
    Qaoa,
}

#[derive(Args)]
struct RunArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    #[arg(long, default_value = "fresnel")]
    device: String,
    #[arg(long, value_enum, default_value = "qaa")]
    protocol: ProtocolArg,
    /// QAA total time in us (QAOA takes it from the parameter file).
    #[arg(long = "t-tot", default_value_t = 4.0)]
    t_tot: f64,
    #[arg(long, default_value_t = DEFAULT_DT_US)]
    dt: f64,
    #[arg(long, default_value_t = 500)]
    shots: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Readout errors as `eta,eps,eps_prime,flag_prob`.
    #[arg(long)]
    spam: Option<String>,
    /// Trained parameter file (QAOA only).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Rescale instance spacings from this device's C6 to the target device.
    #[arg(long)]
    calibrate_from: Option<String>,
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Run record files or directories of them.
    #[arg(required = true)]
    records: Vec<PathBuf>,
    /// Reference table to compare against (defaults to the bundled one).
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    no_reference: bool,
    #[arg(long, default_value = "report")]
    out: PathBuf,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Run(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

trait ConfigErr<T> {
    fn config(self) -> Result<T, Failure>;
}

impl<T> ConfigErr<T> for Result<T> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(Failure::Config)
    }
}

fn run_err<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Run)
}

fn load_device(arg: &str) -> Result<DeviceSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return DeviceSpec::load(path).with_context(|| format!("loading device {arg}"));
    }
    DeviceSpec::bundled(arg).with_context(|| format!("no device file or bundled device named `{arg}`"))
}

fn parse_spam(text: &str) -> Result<SpamParams> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad --spam value `{s}`")))
        .collect::<Result<_>>()?;
    let [eta, eps, eps_prime, flag] = values[..] else {
        bail!("--spam expects eta,eps,eps_prime,flag_prob, got {} values", values.len());
    };
    Ok(SpamParams::new(eta, eps, eps_prime, flag)?)
}

/// Expands directories into their `*.json` files, sorted by name.
fn expand_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else if p.exists() {
            out.push(p.clone());
        } else {
            bail!("{} does not exist", p.display());
        }
    }
    Ok(out)
}

fn load_instances(inputs: &[PathBuf]) -> Result<Vec<DuggInstance>> {
    let paths = expand_paths(inputs)?;
    if paths.is_empty() {
        bail!("no instance files given");
    }
    paths.iter().map(|p| Ok(InstanceFile::load(p)?.instance)).collect()
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let req = GenRequest {
        rows: a.rows,
        cols: a.cols,
        occupation_prob: a.p_occ,
        spacing_um: a.spacing,
        count: a.count,
        seed: a.seed,
        oracle_cap: a.oracle_cap,
    };
    let paths = match cmd_gen(&req, &a.out) {
        Ok(p) => p,
        Err(e @ rydbench::Error::Io { .. }) => return run_err(Err(e.into())),
        Err(e) => return Err(Failure::Config(e.into())),
    };
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let paths = expand_paths(&a.instances).config()?;
    let files = run_err(cmd_solve(&paths, a.oracle_cap).map_err(Into::into))?;
    for (path, f) in paths.iter().zip(files) {
        match (f.instance.optimal_cost, f.lower_bound) {
            (Some(c), _) => println!("{}: optimal {c}", path.display()),
            (None, Some(b)) => println!("{}: greedy lower bound {b}", path.display()),
            _ => println!("{}: unsolved", path.display()),
        }
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<(), Failure> {
    let device = load_device(&a.device).config()?;
    let instances = load_instances(&a.instances).config()?;
    let mut settings = TrainSettings::new(a.p, a.t_tot);
    settings.dt_us = a.dt;
    let mut config = OptimizerConfig::default();
    if let Some(m) = a.max_evals {
        config.max_evals = m;
    }
    let out = train_transfer_params(&instances, &settings, &device, &config, a.seed).map_err(|e| match e {
        rydbench::Error::InvalidArgument(_)
        | rydbench::Error::SimulatorCapExceeded { .. }
        | rydbench::Error::DeviceConstraint(_) => Failure::Config(e.into()),
        e => Failure::Run(e.into()),
    })?;
    let file = TrainedParamsFile::from(&out);
    let path = a.out.join("trained_params.json");
    let text = serde_json::to_string_pretty(&file).map_err(|e| Failure::Run(e.into()))?;
    run_err(write_atomic(&path, &text).map_err(Into::into))?;
    println!(
        "objective {:.6} -> {:.6} after {} evaluations (converged: {})",
        out.initial_objective, out.final_objective, out.evals, out.converged
    );
    println!("{}", path.display());
    Ok(())
}

fn build_config(a: &RunArgs) -> Result<BenchmarkConfig> {
    let device = load_device(&a.device)?;
    let mut config = match a.protocol {
        ProtocolArg::Qaa => {
            if a.params.is_some() {
                bail!("--params only applies to --protocol qaoa");
            }
            BenchmarkConfig::qaa(&device, a.t_tot)
        }
        ProtocolArg::Qaoa => {
            let path = a.params.as_ref().context("--protocol qaoa needs --params <trained file>")?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: TrainedParamsFile =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            BenchmarkConfig::qaoa(&device, file.params()?)
        }
    };
    config.dt_us = a.dt;
    config.n_shots = a.shots;
    config.n_repeats = a.repeats;
    config.seed = a.seed;
    if let Some(s) = &a.spam {
        config.spam = parse_spam(s)?;
    }
    if let Some(src) = &a.calibrate_from {
        config.calibrate_from = Some(CalibrationRef { c6: load_device(src)?.c6 });
    }
    config.check()?;
    Ok(config)
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let config = build_config(&a).config()?;
    let instances = load_instances(&a.instances).config()?;
    let out = run_err(run_campaign(&config, &instances, &a.out).map_err(Into::into))?;
    let snapshot = serde_json::to_string_pretty(&config).map_err(|e| Failure::Run(e.into()))?;
    run_err(write_atomic(&a.out.join("config.json"), &snapshot).map_err(Into::into))?;
    for rec in &out.records {
        let a = &rec.aggregate;
        let r = a.approximation_ratio.map_or("n/a".to_string(), |s| format!("{:.4}", s.mean));
        let v = a.valid_fraction.map_or("n/a".to_string(), |s| format!("{:.3}", s.mean));
        println!("{} (N = {}): r {r}, valid {v}", rec.instance_id, rec.n_qubits);
    }
    println!("{}", out.csv_path.display());
    if !out.failures.is_empty() {
        for f in &out.failures {
            eprintln!("failed: {}: {}", f.instance_id, f.error);
        }
        return Err(Failure::Run(anyhow::anyhow!("{} of {} instances failed", out.failures.len(), instances.len())));
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let reference = match (&a.reference, a.no_reference) {
        (_, true) => None,
        (Some(p), false) => Some(ReferenceTable::load(p).map_err(|e| Failure::Config(e.into()))?),
        (None, false) => Some(ReferenceTable::bundled()),
    };
    let paths = expand_paths(&a.records).config()?;
    let (csv, table) = cmd_report(&paths, reference.as_ref()).map_err(|e| Failure::Config(e.into()))?;
    run_err(write_atomic(&a.out.join("summary.csv"), &csv).map_err(Into::into))?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Train(a) => train(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(e) | Failure::Run(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
