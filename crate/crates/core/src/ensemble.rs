//! Ensemble experiment harness: seeded instance generation over a grid of
//! (size, field range) cells, all-driver simulation, metric aggregation,
//! and artifact emission (per-run CSV, summary CSV, manifest).
//!
//! Determinism contract: one master seed deterministically derives every
//! per-instance seed, so an exact-mode rerun produces byte-identical CSVs.
//! Real wall-clock timings go to the manifest only; the CSV wall-time
//! column is zeroed in exact mode for that reason.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gen_erdos_renyi, gen_watts_strogatz};
use crate::hamiltonian::{Driver, ScheduleParams};
use crate::circuit::{build_baseline_circuit, build_rfox_circuit, run};
use crate::instance::{assign_fields_with_generator, GeneratorModel, RfimInstance};
use crate::metrics::{metrics_csv_row, MetricsReport, METRICS_CSV_HEADER};
use crate::oracle::brute_force_ground;
use crate::spectral::{gap_profile, runtime_estimate, GapProfile};
use crate::statevector::{OutputDistribution, Statevector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: GeneratorModel,
    pub sizes: Vec<usize>,
    pub field_ranges: Vec<f64>,
    pub instances_per_cell: usize,
    pub drivers: Vec<Driver>,
    pub params: ScheduleParams,
    pub dt: f64,
    /// None = exact-probability mode (the default for simulation).
    pub shots: Option<u64>,
    pub master_seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Desk-scale preset mirroring the headline experiment grid:
    /// 20 instances per (n, field range) cell, all four drivers,
    /// p = 100, delta = 1e-3, exact mode.
    pub fn desk_preset(model: GeneratorModel, master_seed: u64, out_dir: PathBuf) -> Self {
        ExperimentConfig {
            model,
            sizes: vec![7, 9, 12],
            field_ranges: vec![1.0, 3.0, 5.0],
            instances_per_cell: 20,
            drivers: Driver::ALL.to_vec(),
            params: ScheduleParams::default(),
            dt: 1.0,
            shots: None,
            master_seed,
            out_dir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.field_ranges.is_empty() || self.drivers.is_empty() {
            return Err(Error::InvalidParameter(
                "sizes, field_ranges, and drivers must be non-empty".into(),
            ));
        }
        if self.instances_per_cell == 0 {
            return Err(Error::InvalidParameter("instances_per_cell must be >= 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt {}", self.dt)));
        }
        if self.params.slices == 0 {
            return Err(Error::InvalidParameter("slice count must be >= 1".into()));
        }
        for r in &self.field_ranges {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::InvalidParameter(format!("field range {r}")));
            }
        }
        Ok(())
    }
}

/// splitmix64 finalizer; the standard avalanche step for deriving
/// uncorrelated child seeds from (master, indices).
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic per-instance seed: hash of master seed, cell index, and
/// instance index, with a stream tag separating graph/field/shot use.
pub fn derive_seed(master: u64, cell: u64, index: u64, stream: u64) -> u64 {
    mix(mix(mix(mix(master) ^ cell) ^ index) ^ stream)
}

/// Generates the seeded instance for one grid slot.
pub fn cell_instance(
    model: GeneratorModel,
    n: usize,
    field_range: f64,
    master_seed: u64,
    cell: u64,
    index: u64,
) -> Result<RfimInstance> {
    let graph_seed = derive_seed(master_seed, cell, index, 0);
    let field_seed = derive_seed(master_seed, cell, index, 1);
    let graph = match model {
        GeneratorModel::ErdosRenyi { p_edge } => gen_erdos_renyi(n, p_edge, graph_seed)?,
        GeneratorModel::WattsStrogatz { k, p_rewire } => {
            gen_watts_strogatz(n, k, p_rewire, graph_seed)?
        }
        GeneratorModel::Custom => {
            return Err(Error::InvalidParameter(
                "custom instances cannot be generated from a grid; load them from files".into(),
            ))
        }
    };
    assign_fields_with_generator(graph, field_range, field_seed, model, graph_seed)
}

/// Builds and runs the circuit for one driver on one instance.
pub fn simulate_driver(
    instance: &RfimInstance,
    driver: Driver,
    params: &ScheduleParams,
    dt: f64,
) -> Result<Statevector> {
    let plan = match driver {
        Driver::Rfox => build_rfox_circuit(instance, params)?,
        _ => build_baseline_circuit(driver, instance, params.slices, dt)?,
    };
    run(&plan)
}

/// Final-state readout: exact probabilities or seeded finite shots.
pub fn readout(state: &Statevector, shots: Option<u64>, shot_seed: u64) -> Result<OutputDistribution> {
    match shots {
        None => Ok(OutputDistribution::Exact(state.exact_distribution())),
        Some(s) => Ok(OutputDistribution::Shots(state.sample(s, shot_seed)?)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellAggregate {
    pub n: usize,
    pub field_range: f64,
    pub driver: Driver,
    pub runs: usize,
    pub mean_cost_diff: f64,
    pub median_cost_diff: f64,
    pub mean_eev: f64,
    pub median_eev: f64,
    pub mean_hamming: f64,
    pub median_hamming: f64,
}

/// Ordinary least-squares fit of per-cell medians against cell index;
/// the "tendency line" drawn through the grid.
#[derive(Debug, Clone, Serialize)]
pub struct TrendLine {
    pub driver: Driver,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub cells: Vec<CellAggregate>,
    pub trends: Vec<TrendLine>,
    pub completed_runs: usize,
    pub failed_runs: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn ols(ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    let xbar = (ys.len() as f64 - 1.0) / 2.0;
    let ybar = mean(ys);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xbar;
        num += dx * (y - ybar);
        den += dx * dx;
    }
    if den == 0.0 || n < 2.0 {
        (0.0, ybar)
    } else {
        (num / den, ybar - (num / den) * xbar)
    }
}

fn model_tag(model: &GeneratorModel) -> &'static str {
    match model {
        GeneratorModel::ErdosRenyi { .. } => "er",
        GeneratorModel::WattsStrogatz { .. } => "ws",
        GeneratorModel::Custom => "custom",
    }
}

fn instance_id(model: &GeneratorModel, n: usize, range: f64, index: u64) -> String {
    format!("{}_n{}_r{}_i{}", model_tag(model), n, range, index)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    completed_runs: usize,
    failed_runs: usize,
    wall_time_ms: u128,
}

fn write_manifest(
    dir: &Path,
    config: &ExperimentConfig,
    completed: usize,
    failed: usize,
    wall_ms: u128,
) -> Result<()> {
    let manifest = Manifest {
        tool: "rfox",
        version: env!("CARGO_PKG_VERSION"),
        config,
        completed_runs: completed,
        failed_runs: failed,
        wall_time_ms: wall_ms,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Schema(e.to_string()))?;
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

/// Runs the full grid: generate, oracle, simulate every driver, append
/// metric rows, aggregate. Per-run failures are logged and skipped;
/// resource-limit errors abort after flushing partial output.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EnsembleSummary> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    let started = Instant::now();

    let mut runs_csv = format!("# schema=1\n{METRICS_CSV_HEADER}\n");
    let mut failures = String::new();
    let mut completed = 0usize;
    let mut failed = 0usize;
    // (n, range, driver) -> per-run metric triples
    let mut by_cell: BTreeMap<(usize, u64, Driver), Vec<(f64, f64, f64)>> = BTreeMap::new();

    let mut cell = 0u64;
    for &n in &config.sizes {
        for &range in &config.field_ranges {
            for index in 0..config.instances_per_cell as u64 {
                let id = instance_id(&config.model, n, range, index);
                let prep = cell_instance(config.model, n, range, config.master_seed, cell, index)
                    .and_then(|inst| brute_force_ground(&inst).map(|gt| (inst, gt)));
                let (inst, gt) = match prep {
                    Ok(pair) => pair,
                    Err(e @ Error::ResourceLimit(_)) => {
                        flush_experiment(config, &runs_csv, &failures, completed, failed, &started)?;
                        return Err(e);
                    }
                    Err(e) => {
                        failed += config.drivers.len();
                        let _ = writeln!(failures, "{id},setup,{e}");
                        continue;
                    }
                };
                for &driver in &config.drivers {
                    let t0 = Instant::now();
                    let shot_seed = derive_seed(config.master_seed, cell, index, 2)
                        ^ mix(driver.tag().len() as u64 ^ driver as u64);
                    let outcome = simulate_driver(&inst, driver, &config.params, config.dt)
                        .and_then(|state| readout(&state, config.shots, shot_seed))
                        .and_then(|dist| MetricsReport::compute(&inst, &dist, &gt));
                    match outcome {
                        Ok(report) => {
                            let wall = if config.shots.is_none() {
                                0
                            } else {
                                t0.elapsed().as_millis() as u64
                            };
                            runs_csv.push_str(&metrics_csv_row(
                                &id,
                                driver.tag(),
                                config.params.slices,
                                config.params.delta,
                                config.shots,
                                &report,
                                wall,
                            ));
                            runs_csv.push('\n');
                            by_cell
                                .entry((n, range.to_bits(), driver))
                                .or_default()
                                .push((report.cost_difference, report.eev, report.hamming_to_gs as f64));
                            completed += 1;
                        }
                        Err(e @ Error::ResourceLimit(_)) => {
                            flush_experiment(
                                config, &runs_csv, &failures, completed, failed, &started,
                            )?;
                            return Err(e);
                        }
                        Err(e) => {
                            failed += 1;
                            let _ = writeln!(failures, "{id},{},{e}", driver.tag());
                        }
                    }
                }
            }
            cell += 1;
        }
    }

    let mut cells = Vec::new();
    for ((n, range_bits, driver), rows) in &by_cell {
        let cost: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let eev: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let ham: Vec<f64> = rows.iter().map(|r| r.2).collect();
        cells.push(CellAggregate {
            n: *n,
            field_range: f64::from_bits(*range_bits),
            driver: *driver,
            runs: rows.len(),
            mean_cost_diff: mean(&cost),
            median_cost_diff: median(&cost),
            mean_eev: mean(&eev),
            median_eev: median(&eev),
            mean_hamming: mean(&ham),
            median_hamming: median(&ham),
        });
    }
    let mut trends = Vec::new();
    for &driver in &config.drivers {
        let medians: Vec<f64> = cells
            .iter()
            .filter(|c| c.driver == driver)
            .map(|c| c.median_cost_diff)
            .collect();
        if !medians.is_empty() {
            let (slope, intercept) = ols(&medians);
            trends.push(TrendLine { driver, slope, intercept });
        }
    }

    let mut summary_csv = String::from(
        "# schema=1\nn,field_range,driver,runs,mean_cost_diff,median_cost_diff,mean_eev,median_eev,mean_hamming,median_hamming\n",
    );
    for c in &cells {
        let _ = writeln!(
            summary_csv,
            "{},{},{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}",
            c.n,
            c.field_range,
            c.driver.tag(),
            c.runs,
            c.mean_cost_diff,
            c.median_cost_diff,
            c.mean_eev,
            c.median_eev,
            c.mean_hamming,
            c.median_hamming
        );
    }
    fs::write(config.out_dir.join("summary.csv"), &summary_csv)?;
    flush_experiment(config, &runs_csv, &failures, completed, failed, &started)?;

    Ok(EnsembleSummary {
        cells,
        trends,
        completed_runs: completed,
        failed_runs: failed,
    })
}

fn flush_experiment(
    config: &ExperimentConfig,
    runs_csv: &str,
    failures: &str,
    completed: usize,
    failed: usize,
    started: &Instant,
) -> Result<()> {
    fs::write(config.out_dir.join("runs.csv"), runs_csv)?;
    if !failures.is_empty() {
        fs::write(config.out_dir.join("failures.log"), failures)?;
    }
    write_manifest(
        &config.out_dir,
        config,
        completed,
        failed,
        started.elapsed().as_millis(),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct GapStudyRow {
    pub instance_id: String,
    pub driver: Driver,
    pub delta_min: f64,
    pub argmin_k: usize,
    pub spread: f64,
    pub runtime_est: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapStudySummary {
    pub rows: Vec<GapStudyRow>,
    /// Instances where a baseline minimum gap matched or beat the
    /// oscillatory driver's; expected to stay near zero.
    pub hierarchy_violations: usize,
    /// Instances whose oscillatory-driver gap spread exceeded the
    /// 4 * delta * |E| perturbation bound; expected zero.
    pub flatness_violations: usize,
}

/// Diagonalizes every slice for every (instance, driver) pair in the grid
/// and writes one gap CSV per pair plus a study summary.
pub fn run_gap_study(config: &ExperimentConfig) -> Result<GapStudySummary> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    let started = Instant::now();
    let mut rows = Vec::new();
    let mut hierarchy_violations = 0usize;
    let mut flatness_violations = 0usize;
    let mut completed = 0usize;

    let mut cell = 0u64;
    for &n in &config.sizes {
        for &range in &config.field_ranges {
            for index in 0..config.instances_per_cell as u64 {
                let id = instance_id(&config.model, n, range, index);
                let inst = cell_instance(config.model, n, range, config.master_seed, cell, index)?;
                let e_count = inst.graph.edge_count() as f64;
                let mut profiles: BTreeMap<Driver, GapProfile> = BTreeMap::new();
                for &driver in &config.drivers {
                    let prof = gap_profile(driver, &inst, &config.params)?;
                    let csv_path = config
                        .out_dir
                        .join(format!("gap_{id}_{}.csv", driver.tag()));
                    fs::write(&csv_path, prof.to_csv())?;
                    rows.push(GapStudyRow {
                        instance_id: id.clone(),
                        driver,
                        delta_min: prof.delta_min,
                        argmin_k: prof.argmin_k,
                        spread: prof.spread(),
                        runtime_est: runtime_estimate(prof.delta_min)?,
                    });
                    completed += 1;
                    profiles.insert(driver, prof);
                }
                if let Some(rfox) = profiles.get(&Driver::Rfox) {
                    if rfox.spread() > 4.0 * config.params.delta * e_count {
                        flatness_violations += 1;
                    }
                    if let Some(xx) = profiles.get(&Driver::Xx) {
                        if rfox.delta_min <= xx.delta_min {
                            hierarchy_violations += 1;
                        }
                    }
                }
            }
            cell += 1;
        }
    }

    let mut csv = String::from(
        "# schema=1\ninstance_id,driver,delta_min,argmin_k,spread,runtime_est\n",
    );
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{:.12},{},{:.12},{:.12}",
            r.instance_id,
            r.driver.tag(),
            r.delta_min,
            r.argmin_k,
            r.spread,
            r.runtime_est
        );
    }
    fs::write(config.out_dir.join("gap_summary.csv"), &csv)?;
    write_manifest(&config.out_dir, config, completed, 0, started.elapsed().as_millis())?;

    Ok(GapStudySummary {
        rows,
        hierarchy_violations,
        flatness_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn tiny_config(out_dir: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            model: GeneratorModel::ErdosRenyi { p_edge: 0.8 },
            sizes: vec![4],
            field_ranges: vec![1.0, 3.0],
            instances_per_cell: 2,
            drivers: vec![Driver::Rfox, Driver::Xx],
            params: ScheduleParams { delta: 1e-3, slices: 6 },
            dt: 1.0,
            shots: None,
            master_seed: 99,
            out_dir,
        }
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a = derive_seed(1, 0, 0, 0);
        assert_eq!(a, derive_seed(1, 0, 0, 0));
        let mut seen = std::collections::HashSet::new();
        for cell in 0..10 {
            for idx in 0..10 {
                for stream in 0..3 {
                    assert!(seen.insert(derive_seed(1, cell, idx, stream)));
                }
            }
        }
    }

    #[test]
    fn experiment_writes_all_artifacts() {
        let dir = tempdir().unwrap();
        let config = tiny_config(dir.path().to_path_buf());
        let summary = run_experiment(&config).unwrap();
        assert_eq!(summary.completed_runs, 2 * 2 * 2);
        assert_eq!(summary.failed_runs, 0);
        assert_eq!(summary.cells.len(), 2 * 2);
        assert_eq!(summary.trends.len(), 2);
        let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
        assert!(runs.starts_with("# schema=1\ninstance_id,driver,"));
        // header comment + column row + one line per completed run
        assert_eq!(runs.lines().count(), 2 + 8);
        assert!(dir.path().join("summary.csv").exists());
        assert!(dir.path().join("manifest.json").exists());
        assert!(!dir.path().join("failures.log").exists());
    }

    #[test]
    fn exact_mode_reruns_are_byte_identical() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let a = tiny_config(dir_a.path().to_path_buf());
        let b = tiny_config(dir_b.path().to_path_buf());
        run_experiment(&a).unwrap();
        run_experiment(&b).unwrap();
        let runs_a = fs::read_to_string(dir_a.path().join("runs.csv")).unwrap();
        let runs_b = fs::read_to_string(dir_b.path().join("runs.csv")).unwrap();
        assert_eq!(runs_a, runs_b);
        let sum_a = fs::read_to_string(dir_a.path().join("summary.csv")).unwrap();
        let sum_b = fs::read_to_string(dir_b.path().join("summary.csv")).unwrap();
        assert_eq!(sum_a, sum_b);
    }

    #[test]
    fn different_master_seeds_differ() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let a = tiny_config(dir_a.path().to_path_buf());
        let mut b = tiny_config(dir_b.path().to_path_buf());
        b.master_seed = 100;
        run_experiment(&a).unwrap();
        run_experiment(&b).unwrap();
        let runs_a = fs::read_to_string(dir_a.path().join("runs.csv")).unwrap();
        let runs_b = fs::read_to_string(dir_b.path().join("runs.csv")).unwrap();
        assert_ne!(runs_a, runs_b);
    }

    #[test]
    fn edgeless_graph_still_yields_metrics() {
        let dir = tempdir().unwrap();
        let mut config = tiny_config(dir.path().to_path_buf());
        config.model = GeneratorModel::ErdosRenyi { p_edge: 0.0 };
        config.sizes = vec![3];
        config.field_ranges = vec![2.0];
        config.instances_per_cell = 1;
        config.drivers = vec![Driver::Rfox];
        let summary = run_experiment(&config).unwrap();
        assert_eq!(summary.completed_runs, 1);
        assert_eq!(summary.failed_runs, 0);
    }

    #[test]
    fn shots_mode_is_seed_deterministic() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let mut a = tiny_config(dir_a.path().to_path_buf());
        let mut b = tiny_config(dir_b.path().to_path_buf());
        a.shots = Some(256);
        b.shots = Some(256);
        let sa = run_experiment(&a).unwrap();
        let sb = run_experiment(&b).unwrap();
        for (ca, cb) in sa.cells.iter().zip(&sb.cells) {
            assert_eq!(ca.median_cost_diff, cb.median_cost_diff);
            assert_eq!(ca.mean_eev, cb.mean_eev);
        }
    }

    #[test]
    fn gap_study_writes_profiles_and_summary() {
        let dir = tempdir().unwrap();
        let mut config = tiny_config(dir.path().to_path_buf());
        config.sizes = vec![4];
        config.field_ranges = vec![3.0];
        config.instances_per_cell = 2;
        let summary = run_gap_study(&config).unwrap();
        assert_eq!(summary.rows.len(), 2 * 2);
        assert_eq!(summary.flatness_violations, 0);
        let first = fs::read_to_string(
            dir.path().join("gap_er_n4_r3_i0_rfox.csv"),
        )
        .unwrap();
        assert!(first.lines().nth(1).unwrap().starts_with("k,s_or_t"));
        assert!(dir.path().join("gap_summary.csv").exists());
    }

    #[test]
    fn invalid_config_rejected() {
        let dir = tempdir().unwrap();
        let mut config = tiny_config(dir.path().to_path_buf());
        config.instances_per_cell = 0;
        assert!(matches!(
            run_experiment(&config),
            Err(Error::InvalidParameter(_))
        ));
    }
}
