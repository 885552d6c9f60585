//! Every Hamiltonian the workbench needs: the field-encoding X sum, the
//! diagonal cost Hamiltonian, and the per-slice Hamiltonians of the four
//! drivers (the oscillatory-exchange protocol plus three annealing
//! baselines).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::RfimInstance;
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Schedule settings shared by slice Hamiltonians and circuit builders.
/// The drive frequency convention is omega = 2*pi*N with N the qubit
/// count, so the slice phase is 2*pi*N*k/p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub delta: f64,
    pub slices: usize,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            delta: 1e-3,
            slices: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Driver {
    Rfox,
    X,
    Xx,
    XPlusSxx,
}

impl Driver {
    pub const ALL: [Driver; 4] = [Driver::Rfox, Driver::X, Driver::Xx, Driver::XPlusSxx];

    pub fn tag(self) -> &'static str {
        match self {
            Driver::Rfox => "rfox",
            Driver::X => "x",
            Driver::Xx => "xx",
            Driver::XPlusSxx => "x_plus_sxx",
        }
    }

    pub fn parse(s: &str) -> Result<Driver> {
        match s {
            "rfox" => Ok(Driver::Rfox),
            "x" => Ok(Driver::X),
            "xx" => Ok(Driver::Xx),
            "x_plus_sxx" | "x+sxx" | "xsxx" => Ok(Driver::XPlusSxx),
            other => Err(Error::InvalidInput(format!("unknown driver '{other}'"))),
        }
    }
}

/// Maps a field value into [0, pi]: phi = pi * (1 - h / h_max) / 2.
/// The encoded single-qubit marginal is P(bit 1) = sin^2(phi / 2), so a
/// strongly positive field (which favors spin +1, i.e. bit 0, under the
/// energy convention E = -sum J ss - sum h s) maps to phi near 0 and a
/// strongly negative field to phi near pi. Orienting the map the other
/// way anti-aligns the encoding with the field term of the energy and
/// measurably degrades the rotated-field protocol on every ensemble.
pub fn phase_map(h: f64, h_max: f64) -> Result<f64> {
    if !(h_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "h_max = {h_max} must be positive"
        )));
    }
    if h.abs() > h_max {
        return Err(Error::InvalidInput(format!(
            "|h| = {} exceeds h_max = {h_max}",
            h.abs()
        )));
    }
    Ok(std::f64::consts::PI * (1.0 - h / h_max) / 2.0)
}

/// Per-node phases for an instance. An all-zero field vector has no
/// largest field to normalize by; every phase is then pi/2, the h -> 0
/// limit of the map.
pub fn phases(instance: &RfimInstance) -> Result<Vec<f64>> {
    let h_max = instance
        .fields
        .iter()
        .fold(0.0f64, |m, h| m.max(h.abs()));
    if h_max == 0.0 {
        return Ok(vec![std::f64::consts::FRAC_PI_2; instance.n()]);
    }
    instance.fields.iter().map(|&h| phase_map(h, h_max)).collect()
}

/// Field-encoding Hamiltonian: sum_j phi_j X_j.
pub fn build_hb(instance: &RfimInstance) -> Result<PauliSum> {
    let n = instance.n();
    let terms = phases(instance)?
        .into_iter()
        .enumerate()
        .map(|(j, phi)| (phi, PauliString::single(n, j, Pauli::X)))
        .collect();
    PauliSum::from_terms(n, terms)
}

/// Cost Hamiltonian: -sum_E J_uv Z_u Z_v - sum_i h_i Z_i. Diagonal in the
/// computational basis; its diagonal reproduces the classical energy.
pub fn build_problem_hamiltonian(instance: &RfimInstance) -> Result<PauliSum> {
    let n = instance.n();
    let mut terms = Vec::with_capacity(instance.graph.edges.len() + n);
    for (idx, &(u, v)) in instance.graph.edges.iter().enumerate() {
        terms.push((
            -instance.couplings[idx],
            PauliString::two(n, (u, Pauli::Z), (v, Pauli::Z)),
        ));
    }
    for (i, &h) in instance.fields.iter().enumerate() {
        terms.push((-h, PauliString::single(n, i, Pauli::Z)));
    }
    PauliSum::from_terms(n, terms)
}

/// Slice-k envelope pair: theta_xx = 1 - delta*cos(2*pi*N*k/p) on XX,
/// theta_zx = delta*sin(2*pi*N*k/p) on ZX.
pub fn rfox_angles(k: usize, p: usize, n_qubits: usize, delta: f64) -> Result<(f64, f64)> {
    if k >= p {
        return Err(Error::InvalidInput(format!("slice {k} out of range 0..{p}")));
    }
    let phase = 2.0 * std::f64::consts::PI * (n_qubits as f64) * (k as f64) / (p as f64);
    Ok((1.0 - delta * phase.cos(), delta * phase.sin()))
}

fn xx_sum(instance: &RfimInstance, weight: f64) -> Vec<(f64, PauliString)> {
    let n = instance.n();
    instance
        .graph
        .edges
        .iter()
        .map(|&(u, v)| (weight, PauliString::two(n, (u, Pauli::X), (v, Pauli::X))))
        .collect()
}

/// ZX terms with Z on the smaller endpoint u of each stored edge.
fn zx_sum(instance: &RfimInstance, weight: f64) -> Vec<(f64, PauliString)> {
    let n = instance.n();
    instance
        .graph
        .edges
        .iter()
        .map(|&(u, v)| (weight, PauliString::two(n, (u, Pauli::Z), (v, Pauli::X))))
        .collect()
}

fn x_field_sum(n: usize, weight: f64) -> Vec<(f64, PauliString)> {
    (0..n)
        .map(|j| (weight, PauliString::single(n, j, Pauli::X)))
        .collect()
}

/// Problem-side terms of the baseline slices: sum_E J Z_u Z_v + sum_j h_j Z_j,
/// scaled by `weight`.
fn problem_side(instance: &RfimInstance, weight: f64) -> Vec<(f64, PauliString)> {
    let n = instance.n();
    let mut terms = Vec::with_capacity(instance.graph.edges.len() + n);
    for (idx, &(u, v)) in instance.graph.edges.iter().enumerate() {
        terms.push((
            weight * instance.couplings[idx],
            PauliString::two(n, (u, Pauli::Z), (v, Pauli::Z)),
        ));
    }
    for (i, &h) in instance.fields.iter().enumerate() {
        terms.push((weight * h, PauliString::single(n, i, Pauli::Z)));
    }
    terms
}

/// Instantaneous Hamiltonian of slice k for the chosen driver, with
/// s_k = k/p for the annealing baselines.
pub fn build_slice_hamiltonian(
    driver: Driver,
    instance: &RfimInstance,
    k: usize,
    params: &ScheduleParams,
) -> Result<PauliSum> {
    let p = params.slices;
    if k >= p {
        return Err(Error::InvalidInput(format!("slice {k} out of range 0..{p}")));
    }
    let n = instance.n();
    let s = k as f64 / p as f64;
    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    match driver {
        Driver::Rfox => {
            let (theta_xx, theta_zx) = rfox_angles(k, p, n, params.delta)?;
            terms.extend(build_hb(instance)?.terms().to_vec());
            terms.extend(xx_sum(instance, theta_xx));
            terms.extend(zx_sum(instance, theta_zx));
        }
        Driver::X => {
            terms.extend(x_field_sum(n, 1.0 - s));
            terms.extend(problem_side(instance, s));
        }
        Driver::Xx => {
            terms.extend(xx_sum(instance, 1.0 - s));
            terms.extend(problem_side(instance, -s));
        }
        Driver::XPlusSxx => {
            terms.extend(x_field_sum(n, -(1.0 - s)));
            terms.extend(xx_sum(instance, s * (1.0 - s)));
            terms.extend(problem_side(instance, -s));
        }
    }
    PauliSum::from_terms(n, terms)
}
