//! Circuit construction and execution: the oscillatory-exchange protocol
//! circuit (field phase encoding followed by p slices of RXX/RZX per
//! edge) and first-order Trotter circuits for the three annealing
//! baselines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_slice_hamiltonian, phases, rfox_angles, Driver, ScheduleParams};
use crate::instance::RfimInstance;
use crate::statevector::Statevector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    HadamardAll,
    Phase { q: usize, angle: f64 },
    Rxx { u: usize, v: usize, angle: f64 },
    Rzx { u: usize, v: usize, angle: f64 },
    Rx { q: usize, angle: f64 },
    Rz { q: usize, angle: f64 },
    Rzz { u: usize, v: usize, angle: f64 },
}

impl GateOp {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Rxx { .. } | GateOp::Rzx { .. } | GateOp::Rzz { .. })
    }

    fn check(&self, n: usize) -> Result<()> {
        let ok = |q: usize| q < n;
        let (valid, angle) = match self {
            GateOp::HadamardAll => (true, 0.0),
            GateOp::Phase { q, angle } | GateOp::Rx { q, angle } | GateOp::Rz { q, angle } => {
                (ok(*q), *angle)
            }
            GateOp::Rxx { u, v, angle } | GateOp::Rzx { u, v, angle } | GateOp::Rzz { u, v, angle } => {
                (ok(*u) && ok(*v) && u != v, *angle)
            }
        };
        if !valid {
            return Err(Error::InvalidInput(format!("gate operands out of range: {self:?}")));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite gate angle: {self:?}")));
        }
        Ok(())
    }

    fn dump_line(&self) -> String {
        match self {
            GateOp::HadamardAll => "h_all".to_string(),
            GateOp::Phase { q, angle } => format!("phase {q} {angle:.17e}"),
            GateOp::Rx { q, angle } => format!("rx {q} {angle:.17e}"),
            GateOp::Rz { q, angle } => format!("rz {q} {angle:.17e}"),
            GateOp::Rxx { u, v, angle } => format!("rxx {u} {v} {angle:.17e}"),
            GateOp::Rzx { u, v, angle } => format!("rzx {u} {v} {angle:.17e}"),
            GateOp::Rzz { u, v, angle } => format!("rzz {u} {v} {angle:.17e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitPlan {
    pub n: usize,
    pub gates: Vec<GateOp>,
    pub driver: Driver,
    pub params: ScheduleParams,
    /// Hash of the instance the plan was built from.
    pub provenance: u64,
}

impl CircuitPlan {
    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// One gate per line, for cross-implementation diffing.
    pub fn dump(&self) -> String {
        self.gates.iter().map(|g| g.dump_line() + "\n").collect()
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.check(self.n)?;
        }
        Ok(())
    }
}

/// The protocol circuit: one field-encoding block (H, per-qubit phases,
/// H), then for each slice k and each edge in sorted order an
/// RXX(theta_xx) followed by RZX(theta_zx) with Z on the smaller
/// endpoint. Two-qubit gate count is exactly 2 p |E|.
pub fn build_rfox_circuit(instance: &RfimInstance, params: &ScheduleParams) -> Result<CircuitPlan> {
    build_rfox_circuit_opts(instance, params, false)
}

/// `encode_per_slice` re-applies the single-qubit encoding block at the
/// start of every slice instead of once at the head.
pub fn build_rfox_circuit_opts(
    instance: &RfimInstance,
    params: &ScheduleParams,
    encode_per_slice: bool,
) -> Result<CircuitPlan> {
    instance.validate()?;
    if params.slices == 0 {
        return Err(Error::InvalidParameter("slice count must be >= 1".into()));
    }
    let n = instance.n();
    let phi = phases(instance)?;
    let mut gates = Vec::new();
    let encoding = |gates: &mut Vec<GateOp>| {
        gates.push(GateOp::HadamardAll);
        for (j, &angle) in phi.iter().enumerate() {
            gates.push(GateOp::Phase { q: j, angle });
        }
        gates.push(GateOp::HadamardAll);
    };
    if !encode_per_slice {
        encoding(&mut gates);
    }
    for k in 0..params.slices {
        if encode_per_slice {
            encoding(&mut gates);
        }
        let (theta_xx, theta_zx) = rfox_angles(k, params.slices, n, params.delta)?;
        for &(u, v) in &instance.graph.edges {
            gates.push(GateOp::Rxx { u, v, angle: theta_xx });
            gates.push(GateOp::Rzx { u, v, angle: theta_zx });
        }
    }
    let plan = CircuitPlan {
        n,
        gates,
        driver: Driver::Rfox,
        params: *params,
        provenance: instance.content_hash(),
    };
    plan.validate()?;
    Ok(plan)
}

/// First-order Trotter circuit for one of the annealing baselines. Every
/// Pauli term c * P of the slice Hamiltonian becomes the rotation
/// R_P(2 c dt); slices are emitted with driver terms first, then problem
/// terms, edges sorted, nodes ascending. All baselines start from
/// |+...+> via a Hadamard layer.
pub fn build_baseline_circuit(
    driver: Driver,
    instance: &RfimInstance,
    p: usize,
    dt: f64,
) -> Result<CircuitPlan> {
    if driver == Driver::Rfox {
        return Err(Error::InvalidInput(
            "rfox is not a Trotterized baseline; use build_rfox_circuit".into(),
        ));
    }
    instance.validate()?;
    if p == 0 {
        return Err(Error::InvalidParameter("slice count must be >= 1".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let n = instance.n();
    let params = ScheduleParams { delta: 0.0, slices: p };
    let mut gates = vec![GateOp::HadamardAll];
    for k in 0..p {
        let s = k as f64 / p as f64;
        let driver_x = match driver {
            Driver::X => 1.0 - s,
            Driver::XPlusSxx => -(1.0 - s),
            _ => 0.0,
        };
        let driver_xx = match driver {
            Driver::Xx => 1.0 - s,
            Driver::XPlusSxx => s * (1.0 - s),
            _ => 0.0,
        };
        let problem_sign = match driver {
            Driver::X => s,
            Driver::Xx | Driver::XPlusSxx => -s,
            Driver::Rfox => unreachable!(),
        };
        // driver terms
        if driver_x != 0.0 {
            for j in 0..n {
                gates.push(GateOp::Rx { q: j, angle: 2.0 * driver_x * dt });
            }
        }
        if driver_xx != 0.0 {
            for &(u, v) in &instance.graph.edges {
                gates.push(GateOp::Rxx { u, v, angle: 2.0 * driver_xx * dt });
            }
        }
        // problem terms: coefficient problem_sign * J on ZZ, problem_sign * h on Z
        if problem_sign != 0.0 {
            for (idx, &(u, v)) in instance.graph.edges.iter().enumerate() {
                let c = problem_sign * instance.couplings[idx];
                gates.push(GateOp::Rzz { u, v, angle: 2.0 * c * dt });
            }
            for (j, &h) in instance.fields.iter().enumerate() {
                let c = problem_sign * h;
                gates.push(GateOp::Rz { q: j, angle: 2.0 * c * dt });
            }
        }
    }
    let plan = CircuitPlan {
        n,
        gates,
        driver,
        params,
        provenance: instance.content_hash(),
    };
    plan.validate()?;
    Ok(plan)
}

/// Applies the plan to |0...0> and returns the final state.
pub fn run(plan: &CircuitPlan) -> Result<Statevector> {
    plan.validate()?;
    let mut state = Statevector::init_zero(plan.n)?;
    for g in &plan.gates {
        match *g {
            GateOp::HadamardAll => state.hadamard_all(),
            GateOp::Phase { q, angle } => state.phase(q, angle)?,
            GateOp::Rx { q, angle } => state.rx(q, angle)?,
            GateOp::Rz { q, angle } => state.rz(q, angle)?,
            GateOp::Rxx { u, v, angle } => state.rxx(u, v, angle)?,
            GateOp::Rzx { u, v, angle } => state.rzx(u, v, angle)?,
            GateOp::Rzz { u, v, angle } => state.rzz(u, v, angle)?,
        }
    }
    Ok(state)
}

/// Sanity helper used by tests and the gap study: the slice Hamiltonian a
/// baseline slice Trotterizes, for cross-checking gate coefficients.
pub fn baseline_slice_hamiltonian(
    driver: Driver,
    instance: &RfimInstance,
    k: usize,
    p: usize,
) -> Result<crate::pauli::PauliSum> {
    build_slice_hamiltonian(driver, instance, k, &ScheduleParams { delta: 0.0, slices: p })
}
