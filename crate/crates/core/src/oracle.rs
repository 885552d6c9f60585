//! Exact brute-force ground-state oracle: enumerates all 2^n spin
//! configurations through the classical energy function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{energy_of_index, RfimInstance};
use crate::statevector::index_to_bitstring;

/// Enumeration cap; 2^24 energy evaluations is still desk-feasible.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Cap for retaining the full sorted energy table.
pub const TABLE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    /// Lexicographically smallest bitstring among degenerate minima.
    pub x_min: String,
    pub e_min: f64,
    pub degeneracy: usize,
    /// Full energy table sorted ascending by energy (ties by bitstring),
    /// kept only when requested and n <= TABLE_LIMIT.
    pub table: Option<Vec<(String, f64)>>,
}

pub fn brute_force_ground(instance: &RfimInstance) -> Result<GroundTruth> {
    brute_force_ground_opts(instance, false)
}

pub fn brute_force_ground_opts(instance: &RfimInstance, with_table: bool) -> Result<GroundTruth> {
    instance.validate()?;
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "brute force over n = {n} > {BRUTE_FORCE_LIMIT}"
        )));
    }
    let dim = 1usize << n;
    let mut e_min = f64::INFINITY;
    let mut argmin = 0usize;
    let mut degeneracy = 0usize;
    let mut table: Option<Vec<(String, f64)>> = if with_table && n <= TABLE_LIMIT {
        Some(Vec::with_capacity(dim))
    } else {
        None
    };
    for x in 0..dim {
        let e = energy_of_index(instance, x);
        if let Some(t) = table.as_mut() {
            t.push((index_to_bitstring(x, n), e));
        }
        if e < e_min {
            e_min = e;
            argmin = x;
            degeneracy = 1;
        } else if e == e_min {
            degeneracy += 1;
            // tie-break: lexicographically smallest bitstring
            let cand = index_to_bitstring(x, n);
            if cand < index_to_bitstring(argmin, n) {
                argmin = x;
            }
        }
    }
    if let Some(t) = table.as_mut() {
        t.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    }
    Ok(GroundTruth {
        x_min: index_to_bitstring(argmin, n),
        e_min,
        degeneracy,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_erdos_renyi;
    use crate::hamiltonian::build_problem_hamiltonian;
    use crate::instance::{assign_fields, single_edge_instance};

    #[test]
    fn degenerate_single_edge() {
        let inst = single_edge_instance(0.0, 0.0, 1.0);
        let gt = brute_force_ground(&inst).unwrap();
        assert_eq!(gt.e_min, -1.0);
        assert_eq!(gt.degeneracy, 2);
        assert_eq!(gt.x_min, "00");
    }

    #[test]
    fn fielded_single_edge() {
        let inst = single_edge_instance(2.0, -0.5, 3.0);
        let gt = brute_force_ground(&inst).unwrap();
        assert_eq!(gt.x_min, "00");
        assert_eq!(gt.e_min, -2.5);
        assert_eq!(gt.degeneracy, 1);
    }

    #[test]
    fn table_sorted() {
        let inst = single_edge_instance(2.0, -0.5, 3.0);
        let gt = brute_force_ground_opts(&inst, true).unwrap();
        let t = gt.table.unwrap();
        assert_eq!(t[0], ("00".into(), -2.5));
        assert!(t.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn matches_problem_hamiltonian_diagonal() {
        for seed in 0..10u64 {
            let g = gen_erdos_renyi(6, 0.6, seed).unwrap();
            let inst = assign_fields(g, 3.0, seed + 100).unwrap();
            let gt = brute_force_ground(&inst).unwrap();
            let diag = build_problem_hamiltonian(&inst).unwrap().diagonal();
            let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            // same term multiset, different summation order: agreement is
            // up to floating-point reassociation
            assert!((gt.e_min - min).abs() < 1e-12, "seed {seed}: {} vs {min}", gt.e_min);
        }
    }
}
