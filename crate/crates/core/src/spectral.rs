//! Per-slice spectral analysis: lowest two eigenvalues, gap profiles per
//! driver schedule, and the adiabatic runtime heuristic.
//!
//! Dense systems go through faer's self-adjoint eigensolver, with a real
//! fast path when the Hamiltonian has no (odd-Y) imaginary structure.
//! Above the dense limit a matrix-free block Krylov solver finds the two
//! extremal eigenvalues; the block size of two keeps doubly degenerate
//! ground levels honest.

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::rng_from_seed;
use crate::hamiltonian::{build_slice_hamiltonian, Driver, ScheduleParams};
use crate::instance::RfimInstance;
use crate::pauli::{PauliSum, DENSE_LIMIT};
use rand::Rng;

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    let mut max_im = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            max_im = max_im.max(m[(i, j)].im.abs());
        }
    }
    let mut evs = if max_im < 1e-14 {
        let mut r = Mat::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                r[(i, j)] = m[(i, j)].re;
            }
        }
        r.self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?
    } else {
        let mut c = Mat::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                c[(i, j)] = m[(i, j)];
            }
        }
        c.self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?
    };
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(evs)
}

/// Two smallest eigenvalues (E0 <= E1) of a Pauli-sum Hamiltonian.
pub fn lowest_two_eigs(h: &PauliSum) -> Result<(f64, f64)> {
    if h.n() <= DENSE_LIMIT {
        let evs = hermitian_eigenvalues(&h.to_matrix()?)?;
        if evs.len() < 2 {
            return Err(Error::InvalidInput("system has fewer than 2 levels".into()));
        }
        Ok((evs[0], evs[1]))
    } else {
        krylov_lowest_two(h, 1e-8, 240)
    }
}

/// Matrix-free block Krylov (block size 2, full reorthogonalization).
/// Converges when both Ritz residuals drop below `tol` relative to the
/// coefficient L1 norm of the Hamiltonian.
fn krylov_lowest_two(h: &PauliSum, tol: f64, max_basis: usize) -> Result<(f64, f64)> {
    let dim = 1usize << h.n();
    let scale = h.coeff_l1().max(1.0);
    let mut rng = rng_from_seed(0x5eed_1a2b);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    // projected matrix entries t[i][j] = q_i^H H q_j (Hermitian)
    let mut t: Vec<Vec<Complex64>> = Vec::new();

    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let norm = |a: &[Complex64]| -> f64 { dot(a, a).re.sqrt() };

    let push_orthonormal = |basis: &mut Vec<Vec<Complex64>>, mut v: Vec<Complex64>| -> bool {
        for _ in 0..2 {
            for q in basis.iter() {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv < 1e-12 {
            return false;
        }
        for vi in v.iter_mut() {
            *vi /= Complex64::new(nv, 0.0);
        }
        basis.push(v);
        true
    };

    // two random start vectors
    for _ in 0..2 {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        push_orthonormal(&mut basis, v);
    }

    let cap = max_basis.min(dim);
    let mut next_to_expand = 0usize;
    loop {
        // apply H to the oldest unexpanded basis vector; grow the basis
        // with the orthogonalized image while capacity remains
        if next_to_expand < basis.len() {
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            h.apply(&basis[next_to_expand], &mut w);
            // fill projected row/column for the source vector
            while t.len() < basis.len() {
                t.push(vec![Complex64::new(0.0, 0.0); cap]);
            }
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                t[i][next_to_expand] = c;
                t[next_to_expand][i] = c.conj();
            }
            next_to_expand += 1;
            if basis.len() < cap {
                push_orthonormal(&mut basis, w);
            }
        }

        let m = next_to_expand;
        let exhausted = next_to_expand >= basis.len();
        if m >= 4 && (m % 8 == 0 || exhausted) {
            // Ritz extraction from the m x m projected matrix
            let mut proj = Mat::<Complex64>::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    proj[(i, j)] = t[i][j];
                }
            }
            let eig = proj
                .self_adjoint_eigen(faer::Side::Lower)
                .map_err(|e| Error::Numerical(format!("projected eigensolver: {e:?}")))?;
            let mut order: Vec<usize> = (0..m).collect();
            let s = eig.S();
            order.sort_by(|&a, &b| s[a].re.partial_cmp(&s[b].re).unwrap());
            let mut vals = [0.0f64; 2];
            let mut worst_residual = 0.0f64;
            for (slot, &idx) in order.iter().take(2).enumerate() {
                let theta = s[idx].re;
                vals[slot] = theta;
                // y = Q s_idx ; residual = || H y - theta y ||
                let mut y = vec![Complex64::new(0.0, 0.0); dim];
                for (col, q) in basis.iter().take(m).enumerate() {
                    let c = eig.U()[(col, idx)];
                    for (yi, qi) in y.iter_mut().zip(q) {
                        *yi += c * qi;
                    }
                }
                let mut hy = vec![Complex64::new(0.0, 0.0); dim];
                h.apply(&y, &mut hy);
                let mut res = 0.0f64;
                for (a, b) in hy.iter().zip(&y) {
                    res += (a - Complex64::new(theta, 0.0) * b).norm_sqr();
                }
                worst_residual = worst_residual.max(res.sqrt());
            }
            if worst_residual <= tol * scale {
                return Ok((vals[0], vals[1]));
            }
            if exhausted {
                return Err(Error::Numerical(format!(
                    "Krylov solver stalled at basis {m}; residual {worst_residual:.3e} \
                     above tolerance {:.3e}",
                    tol * scale
                )));
            }
        }
        if exhausted && m < 4 {
            return Err(Error::Numerical("Krylov basis collapsed".into()));
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceGap {
    pub k: usize,
    pub s_or_t: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapProfile {
    pub driver: Driver,
    pub records: Vec<SliceGap>,
    pub delta_min: f64,
    pub argmin_k: usize,
    pub params: ScheduleParams,
}

impl GapProfile {
    pub fn spread(&self) -> f64 {
        let max = self.records.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.gap));
        max - self.delta_min
    }

    /// CSV with columns k, s_or_t, E0, E1, gap.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# schema=1 driver={} delta={} p={}\nk,s_or_t,E0,E1,gap\n",
            self.driver.tag(),
            self.params.delta,
            self.params.slices
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.12},{:.12},{:.12},{:.12}\n",
                r.k, r.s_or_t, r.e0, r.e1, r.gap
            ));
        }
        out
    }
}

/// Diagonalizes every slice Hamiltonian of the schedule and collects the
/// gap profile.
pub fn gap_profile(
    driver: Driver,
    instance: &RfimInstance,
    params: &ScheduleParams,
) -> Result<GapProfile> {
    let p = params.slices;
    let mut records = Vec::with_capacity(p);
    for k in 0..p {
        let h = build_slice_hamiltonian(driver, instance, k, params)?;
        let (e0, e1) = lowest_two_eigs(&h)
            .map_err(|e| Error::Numerical(format!("slice {k}: {e}")))?;
        records.push(SliceGap {
            k,
            s_or_t: k as f64 / p as f64,
            e0,
            e1,
            gap: e1 - e0,
        });
    }
    let (argmin_k, delta_min) = records
        .iter()
        .map(|r| (r.k, r.gap))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("p >= 1");
    Ok(GapProfile {
        driver,
        records,
        delta_min,
        argmin_k,
        params: *params,
    })
}

/// Adiabatic runtime heuristic: delta_min^-2. A closed gap reports the
/// unbounded sentinel.
pub fn runtime_estimate(delta_min: f64) -> Result<f64> {
    if delta_min < 0.0 {
        return Err(Error::InvalidInput(format!(
            "negative gap {delta_min}"
        )));
    }
    if delta_min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(delta_min.powi(-2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_erdos_renyi, Graph};
    use crate::instance::{assign_fields, GeneratorInfo, GeneratorModel, RfimInstance};
    use crate::pauli::{Pauli, PauliString};

    #[test]
    fn single_x_spectrum() {
        for c in [0.5, 1.7] {
            let h = PauliSum::from_terms(1, vec![(c, PauliString::single(1, 0, Pauli::X))]).unwrap();
            let (e0, e1) = lowest_two_eigs(&h).unwrap();
            assert!((e0 + c).abs() < 1e-12);
            assert!((e1 - c).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_zz_gap_zero() {
        let h = PauliSum::from_terms(
            2,
            vec![(1.0, PauliString::two(2, (0, Pauli::Z), (1, Pauli::Z)))],
        )
        .unwrap();
        let (e0, e1) = lowest_two_eigs(&h).unwrap();
        assert!((e0 + 1.0).abs() < 1e-12);
        assert!((e1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn transverse_sum_spectrum() {
        // H = sum_j X_j on 3 qubits: E0 = -3, E1 = -1.
        let terms = (0..3)
            .map(|j| (1.0, PauliString::single(3, j, Pauli::X)))
            .collect();
        let h = PauliSum::from_terms(3, terms).unwrap();
        let (e0, e1) = lowest_two_eigs(&h).unwrap();
        assert!((e0 + 3.0).abs() < 1e-12);
        assert!((e1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn krylov_matches_dense() {
        for seed in 0..6u64 {
            let g = gen_erdos_renyi(7, 0.6, seed).unwrap();
            let inst = assign_fields(g, 3.0, seed + 50).unwrap();
            let h = build_slice_hamiltonian(Driver::Rfox, &inst, 3, &ScheduleParams::default())
                .unwrap();
            let dense = lowest_two_eigs(&h).unwrap();
            let krylov = krylov_lowest_two(&h, 1e-9, 128).unwrap();
            assert!((dense.0 - krylov.0).abs() < 1e-7, "seed {seed}: E0");
            assert!((dense.1 - krylov.1).abs() < 1e-7, "seed {seed}: E1");
        }
    }

    #[test]
    fn krylov_resolves_degeneracy() {
        let h = PauliSum::from_terms(
            2,
            vec![(1.0, PauliString::two(2, (0, Pauli::Z), (1, Pauli::Z)))],
        )
        .unwrap();
        let (e0, e1) = krylov_lowest_two(&h, 1e-9, 4).unwrap();
        assert!((e1 - e0).abs() < 1e-8, "degenerate gap reported as {}", e1 - e0);
    }

    #[test]
    fn slice_trace_vanishes() {
        let g = gen_erdos_renyi(5, 0.7, 2).unwrap();
        let inst = assign_fields(g, 2.0, 3).unwrap();
        for driver in Driver::ALL {
            let h = build_slice_hamiltonian(driver, &inst, 7, &ScheduleParams::default()).unwrap();
            let m = h.to_matrix().unwrap();
            let trace: Complex64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
            assert!(trace.norm() < 1e-9, "driver {driver:?} trace {trace}");
        }
    }

    #[test]
    fn xx_slice_zero_gap_matches_pure_xx() {
        let g = gen_erdos_renyi(5, 0.8, 4).unwrap();
        let inst = assign_fields(g, 2.0, 5).unwrap();
        let profile_h = build_slice_hamiltonian(Driver::Xx, &inst, 0, &ScheduleParams::default())
            .unwrap();
        let n = inst.n();
        let pure_xx = PauliSum::from_terms(
            n,
            inst.graph
                .edges
                .iter()
                .map(|&(u, v)| (1.0, PauliString::two(n, (u, Pauli::X), (v, Pauli::X))))
                .collect(),
        )
        .unwrap();
        let a = lowest_two_eigs(&profile_h).unwrap();
        let b = lowest_two_eigs(&pure_xx).unwrap();
        assert!((a.0 - b.0).abs() < 1e-10);
        assert!((a.1 - b.1).abs() < 1e-10);
    }

    #[test]
    fn rfox_profile_flatness_small() {
        let g = gen_erdos_renyi(5, 0.7, 11).unwrap();
        let e_count = g.edge_count() as f64;
        let inst = assign_fields(g, 3.0, 12).unwrap();
        let params = ScheduleParams { delta: 1e-3, slices: 25 };
        let prof = gap_profile(Driver::Rfox, &inst, &params).unwrap();
        assert!(prof.spread() <= 4.0 * params.delta * e_count);
        assert!(prof.records.iter().all(|r| r.gap >= 0.0));
    }

    #[test]
    fn delta_zero_profile_constant() {
        let graph = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = RfimInstance {
            graph,
            couplings: vec![1.0, 1.0],
            fields: vec![0.4, -0.2, 0.9],
            field_range: 1.0,
            generator: GeneratorInfo {
                model: GeneratorModel::Custom,
                graph_seed: 0,
                field_seed: 0,
            },
        };
        let params = ScheduleParams { delta: 0.0, slices: 10 };
        let prof = gap_profile(Driver::Rfox, &inst, &params).unwrap();
        let g0 = prof.records[0].gap;
        for r in &prof.records {
            assert!((r.gap - g0).abs() < 1e-12);
        }
    }

    #[test]
    fn runtime_estimate_cases() {
        assert_eq!(runtime_estimate(1.0).unwrap(), 1.0);
        assert!((runtime_estimate(0.1).unwrap() - 100.0).abs() < 1e-9);
        assert!(runtime_estimate(0.0).unwrap().is_infinite());
        assert!(runtime_estimate(-0.1).is_err());
        // ratio quoted for a 2.0 vs 0.03 gap pair: three to four orders
        let ratio = runtime_estimate(0.03).unwrap() / runtime_estimate(2.0).unwrap();
        assert!(ratio > 1e3 && ratio < 1e4);
    }

    #[test]
    fn gap_csv_shape() {
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        let inst = RfimInstance {
            graph,
            couplings: vec![1.0],
            fields: vec![0.3, -0.8],
            field_range: 1.0,
            generator: GeneratorInfo {
                model: GeneratorModel::Custom,
                graph_seed: 0,
                field_seed: 0,
            },
        };
        let prof = gap_profile(Driver::X, &inst, &ScheduleParams { delta: 0.0, slices: 4 }).unwrap();
        let csv = prof.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# schema=1 driver=x"));
        assert_eq!(lines[1], "k,s_or_t,E0,E1,gap");
        assert_eq!(lines.len(), 2 + 4);
    }
}
