//! Evaluation metrics computed from output distributions: winner cost
//! difference, expected energy value, Hamming distance, string-overlap
//! fidelity, Jensen-Shannon distance, and average Hamming distance.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{classical_energy, RfimInstance, SpinConfig};
use crate::oracle::GroundTruth;
use crate::statevector::OutputDistribution;

/// Most frequent bitstring; ties broken by lexicographically smallest.
pub fn winner(dist: &OutputDistribution) -> Result<String> {
    if dist.is_empty() {
        return Err(Error::InvalidInput("empty distribution".into()));
    }
    let probs = dist.probabilities();
    let mut best: Option<(&String, f64)> = None;
    for (k, &p) in &probs {
        match best {
            Some((_, bp)) if p <= bp => {}
            // BTreeMap iterates keys in ascending order, so strictly
            // greater keeps the lexicographically smallest on ties.
            _ => best = Some((k, p)),
        }
    }
    Ok(best.expect("non-empty").0.clone())
}

/// Energy of the winner relative to the exact minimum; >= 0.
pub fn cost_difference(
    instance: &RfimInstance,
    dist: &OutputDistribution,
    gt: &GroundTruth,
) -> Result<f64> {
    let w = winner(dist)?;
    let e = classical_energy(instance, &SpinConfig::from_bits(&w)?)?;
    Ok(e - gt.e_min)
}

/// Expected energy value: sum_x p_x E(x).
pub fn eev(instance: &RfimInstance, dist: &OutputDistribution) -> Result<f64> {
    let mut total = 0.0;
    for (bits, p) in dist.probabilities() {
        total += p * classical_energy(instance, &SpinConfig::from_bits(&bits)?)?;
    }
    Ok(total)
}

pub fn hamming(a: &str, b: &str) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.chars().zip(b.chars()).filter(|(x, y)| x != y).count())
}

/// 1 - d_H(winner, ground) / n.
pub fn string_overlap_fidelity(winner: &str, x_min: &str, n: usize) -> Result<f64> {
    Ok(1.0 - hamming(winner, x_min)? as f64 / n as f64)
}

fn check_normalized(p: &BTreeMap<String, f64>) -> Result<()> {
    let total: f64 = p.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "distribution sums to {total}, not 1"
        )));
    }
    if p.values().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput("negative probability".into()));
    }
    Ok(())
}

/// Jensen-Shannon divergence with base-2 logarithms, so the value lies in
/// [0, 1]. Supports are merged with implicit zeros; 0 log 0 := 0.
pub fn js_distance(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> Result<f64> {
    check_normalized(p)?;
    check_normalized(q)?;
    let mut keys: Vec<&String> = p.keys().chain(q.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut d = 0.0;
    for k in keys {
        let pk = p.get(k).copied().unwrap_or(0.0);
        let qk = q.get(k).copied().unwrap_or(0.0);
        let m = 0.5 * (pk + qk);
        if pk > 0.0 {
            d += 0.5 * pk * (pk / m).log2();
        }
        if qk > 0.0 {
            d += 0.5 * qk * (qk / m).log2();
        }
    }
    // clamp tiny negative rounding away
    Ok(d.max(0.0))
}

/// Average Hamming distance to the ground-state bitstring:
/// sum_x p_x d_H(x, x_min).
pub fn avg_hamming(dist: &OutputDistribution, x_min: &str) -> Result<f64> {
    let mut total = 0.0;
    for (bits, p) in dist.probabilities() {
        total += p * hamming(&bits, x_min)? as f64;
    }
    Ok(total)
}

/// One-hot reference distribution on the ground-state bitstring, used as
/// the comparison target for the Jensen-Shannon column in simulation
/// benchmarks (the original hardware-vs-simulator comparison needs two
/// machines; against the ideal one-hot target the distance measures how
/// far the output is from a deterministic ground-state read-out).
pub fn ground_state_reference(x_min: &str) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert(x_min.to_string(), 1.0);
    m
}

/// Everything the bench CSV logs for one (instance, driver) run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub winner: String,
    pub winner_energy: f64,
    pub e_min: f64,
    pub cost_difference: f64,
    pub eev: f64,
    pub hamming_to_gs: usize,
    pub f_overlap: f64,
    pub d_js: f64,
    pub avg_hamming: f64,
}

impl MetricsReport {
    pub fn compute(
        instance: &RfimInstance,
        dist: &OutputDistribution,
        gt: &GroundTruth,
    ) -> Result<MetricsReport> {
        let w = winner(dist)?;
        let winner_energy = classical_energy(instance, &SpinConfig::from_bits(&w)?)?;
        let n = instance.n();
        let reference = ground_state_reference(&gt.x_min);
        Ok(MetricsReport {
            winner_energy,
            e_min: gt.e_min,
            cost_difference: winner_energy - gt.e_min,
            eev: eev(instance, dist)?,
            hamming_to_gs: hamming(&w, &gt.x_min)?,
            f_overlap: string_overlap_fidelity(&w, &gt.x_min, n)?,
            d_js: js_distance(&dist.probabilities(), &reference)?,
            avg_hamming: avg_hamming(dist, &gt.x_min)?,
            winner: w,
        })
    }
}

/// Fixed CSV schema for per-run metrics rows.
pub const METRICS_CSV_HEADER: &str = "instance_id,driver,p,delta,shots,winner,winner_energy,e_min,cost_diff,eev,hamming,f_overlap,d_js,avg_hamming,wall_time_ms";

pub fn metrics_csv_row(
    instance_id: &str,
    driver: &str,
    p: usize,
    delta: f64,
    shots: Option<u64>,
    report: &MetricsReport,
    wall_time_ms: u64,
) -> String {
    let shots_text = match shots {
        Some(s) => s.to_string(),
        None => "exact".to_string(),
    };
    format!(
        "{instance_id},{driver},{p},{delta},{shots_text},{},{:.12},{:.12},{:.12},{:.12},{},{:.12},{:.12},{:.12},{wall_time_ms}",
        report.winner,
        report.winner_energy,
        report.e_min,
        report.cost_difference,
        report.eev,
        report.hamming_to_gs,
        report.f_overlap,
        report.d_js,
        report.avg_hamming,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::single_edge_instance;
    use crate::oracle::brute_force_ground;
    use crate::statevector::{ExactDistribution, ShotDistribution, Statevector};

    fn shots(pairs: &[(&str, u64)]) -> OutputDistribution {
        let counts: BTreeMap<String, u64> =
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let total = counts.values().sum();
        OutputDistribution::Shots(ShotDistribution { counts, shots: total })
    }

    fn exact(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn winner_and_ties() {
        assert_eq!(winner(&shots(&[("01", 10), ("10", 3)])).unwrap(), "01");
        assert_eq!(winner(&shots(&[("01", 5), ("10", 5)])).unwrap(), "01");
        let mut s = Statevector::init_zero(2).unwrap();
        s.rx(0, std::f64::consts::PI).unwrap();
        let d = OutputDistribution::Exact(s.exact_distribution());
        assert_eq!(winner(&d).unwrap(), "10");
        assert!(winner(&OutputDistribution::Exact(ExactDistribution {
            probs: BTreeMap::new()
        }))
        .is_err());
    }

    #[test]
    fn cost_difference_cases() {
        let inst = single_edge_instance(0.0, 0.0, 1.0);
        let gt = brute_force_ground(&inst).unwrap();
        let d = shots(&[("00", 10)]);
        assert_eq!(cost_difference(&inst, &d, &gt).unwrap(), 0.0);
        let d = shots(&[("01", 10)]);
        assert_eq!(cost_difference(&inst, &d, &gt).unwrap(), 2.0);

        let inst = single_edge_instance(2.0, -0.5, 3.0);
        let gt = brute_force_ground(&inst).unwrap();
        let d = shots(&[("11", 1)]);
        assert_eq!(cost_difference(&inst, &d, &gt).unwrap(), 3.0);
    }

    #[test]
    fn eev_cases() {
        let inst = single_edge_instance(0.0, 0.0, 1.0);
        let d = shots(&[("00", 7)]);
        assert_eq!(eev(&inst, &d).unwrap(), -1.0);
        let d = shots(&[("00", 1), ("01", 1), ("10", 1), ("11", 1)]);
        assert_eq!(eev(&inst, &d).unwrap(), 0.0);
    }

    #[test]
    fn hamming_cases() {
        assert_eq!(hamming("0110", "0110").unwrap(), 0);
        assert_eq!(hamming("0000", "1111").unwrap(), 4);
        assert_eq!(hamming("0110", "0011").unwrap(), 2);
        assert!(hamming("01", "011").is_err());
    }

    #[test]
    fn overlap_fidelity_cases() {
        assert_eq!(string_overlap_fidelity("0101", "0101", 4).unwrap(), 1.0);
        assert_eq!(string_overlap_fidelity("0101", "1010", 4).unwrap(), 0.0);
        // matches in 7 of 12 positions (last 5 bits flipped)
        let f = string_overlap_fidelity("110101010101", "110101001010", 12).unwrap();
        assert!((f - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn js_distance_cases() {
        let p = exact(&[("0", 0.5), ("1", 0.5)]);
        assert_eq!(js_distance(&p, &p).unwrap(), 0.0);

        let a = exact(&[("0", 1.0)]);
        let b = exact(&[("1", 1.0)]);
        assert!((js_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);

        // Direct evaluation for p = (1, 0), q = (1/2, 1/2):
        // m = (3/4, 1/4); JS = 1/2 [ log2(4/3) + 1/2 log2(2/3) + 1/2 ].
        let a = exact(&[("0", 1.0)]);
        let b = exact(&[("0", 0.5), ("1", 0.5)]);
        let want = 0.5 * ((4.0f64 / 3.0).log2() + 0.5 * (2.0f64 / 3.0).log2() + 0.5);
        let got = js_distance(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.311278124459133).abs() < 1e-12);

        // symmetry
        let c = exact(&[("0", 0.3), ("1", 0.7)]);
        let d2 = exact(&[("0", 0.9), ("1", 0.1)]);
        assert!((js_distance(&c, &d2).unwrap() - js_distance(&d2, &c).unwrap()).abs() < 1e-12);

        let bad = exact(&[("0", 0.4)]);
        assert!(js_distance(&bad, &b).is_err());
    }

    #[test]
    fn avg_hamming_cases() {
        let d = shots(&[("0000", 10)]);
        assert_eq!(avg_hamming(&d, "0000").unwrap(), 0.0);
        let d = shots(&[("0000", 1), ("1111", 1)]);
        assert_eq!(avg_hamming(&d, "0000").unwrap(), 2.0);
        // uniform over all 2^4 bitstrings: n/2 by full enumeration
        let pairs: Vec<(String, u64)> = (0..16)
            .map(|x| (crate::statevector::index_to_bitstring(x, 4), 1))
            .collect();
        let counts: BTreeMap<String, u64> = pairs.into_iter().collect();
        let d = OutputDistribution::Shots(ShotDistribution { counts, shots: 16 });
        assert_eq!(avg_hamming(&d, "0110").unwrap(), 2.0);
    }

    #[test]
    fn avg_hamming_two_routes_agree() {
        // per-bitstring sum vs per-bit marginal sum on an exact circuit output
        let mut s = Statevector::init_zero(3).unwrap();
        s.hadamard_all();
        s.rzx(0, 2, 0.9).unwrap();
        s.rxx(1, 2, 0.4).unwrap();
        let dist = OutputDistribution::Exact(s.exact_distribution());
        let x_min = "010";
        let direct = avg_hamming(&dist, x_min).unwrap();
        let probs = s.probabilities();
        let mut marginal = 0.0;
        for (j, want) in x_min.chars().enumerate() {
            let want_bit = if want == '1' { 1 } else { 0 };
            marginal += probs
                .iter()
                .enumerate()
                .filter(|(x, _)| (x >> j) & 1 != want_bit)
                .map(|(_, p)| p)
                .sum::<f64>();
        }
        assert!((direct - marginal).abs() < 1e-10);
    }
}
