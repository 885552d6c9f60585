//! `rfox`: command-line front end for the workbench. Subcommands cover
//! instance generation, ground-truth oracles, single runs, gap studies,
//! full ensembles, the effective-Hamiltonian verifier, and SVG plotting.
//!
//! Exit codes: 0 success, 1 invalid input, 2 resource limit exceeded,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rfox_core::{
    brute_force_ground, cell_instance, load_instance, magnus_check, plot_gap_profiles,
    plot_summary_bars, readout, run_experiment, run_gap_study, save_instance, simulate_driver,
    Driver, Error, ExperimentConfig, GeneratorModel, MetricsReport, Result, ScheduleParams,
};

#[derive(Parser)]
#[command(
    name = "rfox",
    version,
    about = "Statevector workbench for oscillatory-exchange annealing on random-field Ising models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded problem instances and write them as JSON files
    Gen(GenArgs),
    /// Brute-force ground truth for an instance file
    Oracle(OracleArgs),
    /// Simulate one driver on one instance and print its metrics
    Run(RunArgs),
    /// Per-slice spectral gap profile for one instance and driver
    Gap(GapArgs),
    /// Full ensemble experiment over a (size, field range) grid
    Bench(BenchArgs),
    /// One-period propagator check of the effective Hamiltonian
    MagnusCheck(MagnusArgs),
    /// Render CSV artifacts as SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Graph model: er (Erdos-Renyi) or ws (Watts-Strogatz)
    #[arg(long, default_value = "er")]
    model: String,
    /// Edge probability (er)
    #[arg(long, default_value_t = 0.8)]
    p_edge: f64,
    /// Ring-lattice degree (ws)
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Rewiring probability (ws)
    #[arg(long, default_value_t = 0.7)]
    p_rewire: f64,
}

impl ModelArgs {
    fn parse(&self) -> Result<GeneratorModel> {
        match self.model.as_str() {
            "er" => Ok(GeneratorModel::ErdosRenyi { p_edge: self.p_edge }),
            "ws" => Ok(GeneratorModel::WattsStrogatz { k: self.k, p_rewire: self.p_rewire }),
            other => Err(Error::InvalidInput(format!(
                "unknown model '{other}' (expected er or ws)"
            ))),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of vertices
    #[arg(long)]
    n: usize,
    /// Field range: fields drawn uniformly from [-range, range]
    #[arg(long, default_value_t = 3.0)]
    range: f64,
    /// How many instances to emit
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Master seed; per-instance seeds are derived from it
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance JSON file
    #[arg(long)]
    instance: PathBuf,
    /// Include the full sorted energy table (n <= 20)
    #[arg(long)]
    table: bool,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Number of time slices p
    #[arg(long, default_value_t = 100)]
    p: usize,
    /// Oscillation amplitude delta
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Instance JSON file
    #[arg(long)]
    instance: PathBuf,
    /// Driver: rfox, x, xx, or x_plus_sxx
    #[arg(long, default_value = "rfox")]
    driver: String,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Trotter step for baseline drivers
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    /// Finite shot count; omit for exact probabilities
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for shot sampling
    #[arg(long, default_value_t = 0)]
    shot_seed: u64,
}

#[derive(Args)]
struct GapArgs {
    /// Instance JSON file
    #[arg(long)]
    instance: PathBuf,
    /// Driver: rfox, x, xx, or x_plus_sxx
    #[arg(long, default_value = "rfox")]
    driver: String,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Vertex counts, comma separated
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Field ranges, comma separated
    #[arg(long, value_delimiter = ',')]
    ranges: Option<Vec<f64>>,
    /// Instances per (size, range) cell
    #[arg(long)]
    instances: Option<usize>,
    /// Drivers, comma separated
    #[arg(long, value_delimiter = ',')]
    drivers: Option<Vec<String>>,
    /// Number of time slices p
    #[arg(long)]
    p: Option<usize>,
    /// Oscillation amplitude delta
    #[arg(long)]
    delta: Option<f64>,
    /// Trotter step for baseline drivers
    #[arg(long)]
    dt: Option<f64>,
    /// Finite shot count; omit for exact probabilities
    #[arg(long)]
    shots: Option<u64>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the gap study instead of the metric ensemble
    #[arg(long)]
    gaps: bool,
}

#[derive(Args)]
struct MagnusArgs {
    /// Instance JSON file (n <= 6)
    #[arg(long)]
    instance: PathBuf,
    /// Oscillation amplitude delta
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Integration substeps per period
    #[arg(long, default_value_t = 2048)]
    steps: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// gap: polylines from gap CSVs; summary: grouped bars from a summary CSV
    #[arg(long)]
    kind: String,
    /// Input CSV paths (gap: one per series)
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
    /// Series labels for gap plots (defaults to file stems)
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    /// Summary column to plot
    #[arg(long, default_value = "median_cost_diff")]
    column: String,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct GenManifest<'a> {
    tool: &'static str,
    version: &'static str,
    model: GeneratorModel,
    n: usize,
    range: f64,
    count: usize,
    master_seed: u64,
    files: &'a [String],
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let model = args.model.parse()?;
    std::fs::create_dir_all(&args.out)?;
    let mut files = Vec::new();
    for index in 0..args.count as u64 {
        let inst = cell_instance(model, args.n, args.range, args.seed, 0, index)?;
        let name = format!("instance_{index}.json");
        save_instance(&inst, &args.out.join(&name))?;
        files.push(name);
    }
    let manifest = GenManifest {
        tool: "rfox",
        version: env!("CARGO_PKG_VERSION"),
        model,
        n: args.n,
        range: args.range,
        count: args.count,
        master_seed: args.seed,
        files: &files,
    };
    std::fs::write(
        args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Schema(e.to_string()))?,
    )?;
    println!("wrote {} instance(s) to {}", args.count, args.out.display());
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let mut gt = brute_force_ground(&inst)?;
    if !args.table {
        gt.table = None;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&gt).map_err(|e| Error::Schema(e.to_string()))?
    );
    Ok(())
}

#[derive(Serialize)]
struct RunOutput {
    driver: Driver,
    p: usize,
    delta: f64,
    shots: Option<u64>,
    winner: String,
    winner_energy: f64,
    e_min: f64,
    cost_difference: f64,
    eev: f64,
    hamming_to_gs: usize,
    f_overlap: f64,
    d_js: f64,
    avg_hamming: f64,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let driver = Driver::parse(&args.driver)?;
    let params = ScheduleParams { delta: args.schedule.delta, slices: args.schedule.p };
    let gt = brute_force_ground(&inst)?;
    let state = simulate_driver(&inst, driver, &params, args.dt)?;
    let dist = readout(&state, args.shots, args.shot_seed)?;
    let report: MetricsReport = MetricsReport::compute(&inst, &dist, &gt)?;
    let out = RunOutput {
        driver,
        p: params.slices,
        delta: params.delta,
        shots: args.shots,
        winner: report.winner,
        winner_energy: report.winner_energy,
        e_min: report.e_min,
        cost_difference: report.cost_difference,
        eev: report.eev,
        hamming_to_gs: report.hamming_to_gs,
        f_overlap: report.f_overlap,
        d_js: report.d_js,
        avg_hamming: report.avg_hamming,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).map_err(|e| Error::Schema(e.to_string()))?
    );
    Ok(())
}

fn cmd_gap(args: &GapArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let driver = Driver::parse(&args.driver)?;
    let params = ScheduleParams { delta: args.schedule.delta, slices: args.schedule.p };
    let profile = rfox_core::gap_profile(driver, &inst, &params)?;
    let csv = profile.to_csv();
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv)?;
            eprintln!(
                "delta_min={:.6e} at k={} -> {}",
                profile.delta_min,
                profile.argmin_k,
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Error::Schema(format!("bad config {}: {e}", path.display())))?
        }
        None => ExperimentConfig::desk_preset(
            args.model.parse()?,
            1,
            args.out.clone().unwrap_or_else(|| PathBuf::from("bench_out")),
        ),
    };
    if let Some(v) = &args.sizes {
        config.sizes = v.clone();
    }
    if let Some(v) = &args.ranges {
        config.field_ranges = v.clone();
    }
    if let Some(v) = args.instances {
        config.instances_per_cell = v;
    }
    if let Some(v) = &args.drivers {
        config.drivers = v.iter().map(|d| Driver::parse(d)).collect::<Result<_>>()?;
    }
    if let Some(v) = args.p {
        config.params.slices = v;
    }
    if let Some(v) = args.delta {
        config.params.delta = v;
    }
    if let Some(v) = args.dt {
        config.dt = v;
    }
    if args.shots.is_some() {
        config.shots = args.shots;
    }
    if let Some(v) = args.seed {
        config.master_seed = v;
    }
    if let Some(v) = &args.out {
        config.out_dir = v.clone();
    }

    if args.gaps {
        let summary = run_gap_study(&config)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).map_err(|e| Error::Schema(e.to_string()))?
        );
    } else {
        let summary = run_experiment(&config)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).map_err(|e| Error::Schema(e.to_string()))?
        );
    }
    Ok(())
}

fn cmd_magnus(args: &MagnusArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let report = magnus_check(&inst, args.delta, args.steps)?;
    if !report.step_converged {
        eprintln!("warning: err1 moved by more than 1e-9 under step doubling; increase --steps");
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| Error::Schema(e.to_string()))?
    );
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    match args.kind.as_str() {
        "gap" => {
            let labels: Vec<String> = match &args.labels {
                Some(l) => {
                    if l.len() != args.inputs.len() {
                        return Err(Error::InvalidInput(format!(
                            "{} labels for {} inputs",
                            l.len(),
                            args.inputs.len()
                        )));
                    }
                    l.clone()
                }
                None => args
                    .inputs
                    .iter()
                    .map(|p| {
                        p.file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| "series".into())
                    })
                    .collect(),
            };
            let inputs: Vec<(String, PathBuf)> =
                labels.into_iter().zip(args.inputs.iter().cloned()).collect();
            plot_gap_profiles(&inputs, &args.out)?;
        }
        "summary" => {
            if args.inputs.len() != 1 {
                return Err(Error::InvalidInput(
                    "summary plots take exactly one input CSV".into(),
                ));
            }
            plot_summary_bars(&args.inputs[0], &args.out, &args.column)?;
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown plot kind '{other}' (expected gap or summary)"
            )))
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Run(a) => cmd_run(a),
        Command::Gap(a) => cmd_gap(a),
        Command::Bench(a) => cmd_bench(a),
        Command::MagnusCheck(a) => cmd_magnus(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit codes clash with the resource-limit code;
            // help/version print normally, anything else is invalid input
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
