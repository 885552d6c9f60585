//! Statevector simulation and benchmarking workbench for oscillatory
//! exchange-driven annealing on random-field Ising models.
//!
//! The crate covers the full pipeline: seeded graph and instance
//! generation, Pauli-sum Hamiltonians, circuit construction for the
//! oscillatory protocol and three Trotterized baselines, exact
//! statevector simulation, brute-force ground truth, spectral gap
//! profiles, an effective-Hamiltonian verifier, evaluation metrics, and
//! an ensemble harness with CSV/SVG artifacts.

pub mod circuit;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod instance;
pub mod magnus;
pub mod metrics;
pub mod oracle;
pub mod pauli;
pub mod plot;
pub mod spectral;
pub mod statevector;

pub use circuit::{build_baseline_circuit, build_rfox_circuit, build_rfox_circuit_opts, run, CircuitPlan, GateOp};
pub use ensemble::{
    cell_instance, derive_seed, readout, run_experiment, run_gap_study, simulate_driver,
    CellAggregate, EnsembleSummary, ExperimentConfig, GapStudySummary,
};
pub use error::{Error, Result};
pub use graph::{gen_erdos_renyi, gen_watts_strogatz, rng_from_seed, Graph};
pub use hamiltonian::{
    build_hb, build_problem_hamiltonian, build_slice_hamiltonian, phase_map, phases, rfox_angles,
    Driver, ScheduleParams,
};
pub use instance::{
    assign_fields, assign_fields_with_generator, classical_energy, load_instance, save_instance,
    GeneratorInfo, GeneratorModel, RfimInstance, SpinConfig,
};
pub use magnus::{commutator_identity_defect, magnus_check, MagnusReport, MAGNUS_QUBIT_LIMIT};
pub use metrics::{
    avg_hamming, cost_difference, eev, hamming, js_distance, metrics_csv_row,
    string_overlap_fidelity, winner, MetricsReport, METRICS_CSV_HEADER,
};
pub use oracle::{brute_force_ground, GroundTruth, BRUTE_FORCE_LIMIT, TABLE_LIMIT};
pub use pauli::{Pauli, PauliString, PauliSum, DENSE_LIMIT};
pub use plot::{plot_gap_profiles, plot_summary_bars};
pub use spectral::{
    gap_profile, hermitian_eigenvalues, lowest_two_eigs, runtime_estimate, GapProfile, SliceGap,
};
pub use statevector::{
    bitstring_to_index, index_to_bitstring, ExactDistribution, OutputDistribution,
    ShotDistribution, Statevector, QUBIT_LIMIT,
};
