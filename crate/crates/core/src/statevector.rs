//! Dense statevector engine with exactly the gate set the circuits need:
//! Hadamard, single-qubit phase, RXX, RZX, plus the RX/RZ/RZZ rotations
//! used by the Trotterized baselines. Gates update amplitudes in place
//! with stride-based pair indexing, O(2^n) each.

use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::rng_from_seed;

/// Default cap on statevector size (2^16 amplitudes).
pub const QUBIT_LIMIT: usize = 16;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Renders a basis-state index with site i as character i (qubit 0 = LSB
/// of the index, leftmost character of the string).
pub fn index_to_bitstring(x: usize, n: usize) -> String {
    (0..n).map(|j| if (x >> j) & 1 == 0 { '0' } else { '1' }).collect()
}

pub fn bitstring_to_index(bits: &str) -> Result<usize> {
    let mut x = 0usize;
    for (j, c) in bits.chars().enumerate() {
        match c {
            '0' => {}
            '1' => x |= 1 << j,
            _ => return Err(Error::InvalidInput(format!("bad bit '{c}'"))),
        }
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// |0...0> on n qubits.
    pub fn init_zero(n: usize) -> Result<Self> {
        if n == 0 || n > QUBIT_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "qubit count {n} outside 1..={QUBIT_LIMIT}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    /// Builds a state from explicit amplitudes; the vector must have
    /// length 2^n for some n within the qubit limit and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > QUBIT_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "qubit count {n} outside 1..={QUBIT_LIMIT}"
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "state norm^2 {norm_sq} deviates from 1"
            )));
        }
        Ok(Statevector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::InvalidInput(format!(
                "qubit {j} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Hadamard on every qubit.
    pub fn hadamard_all(&mut self) {
        for j in 0..self.n {
            self.hadamard(j);
        }
    }

    pub fn hadamard(&mut self, j: usize) {
        let bit = 1usize << j;
        for x in 0..self.amps.len() {
            if x & bit != 0 {
                continue;
            }
            let y = x | bit;
            let a = self.amps[x];
            let b = self.amps[y];
            self.amps[x] = (a + b) * SQRT_HALF;
            self.amps[y] = (a - b) * SQRT_HALF;
        }
    }

    /// P(phi): amplitudes with bit j set pick up e^{i phi}.
    pub fn phase(&mut self, j: usize, phi: f64) -> Result<()> {
        self.check_qubit(j)?;
        let f = Complex64::from_polar(1.0, phi);
        let bit = 1usize << j;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & bit != 0 {
                *a *= f;
            }
        }
        Ok(())
    }

    /// RXX(theta) = exp(-i theta/2 X_u X_v).
    pub fn rxx(&mut self, u: usize, v: usize, theta: f64) -> Result<()> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(Error::InvalidInput("rxx requires distinct qubits".into()));
        }
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let mix = Complex64::new(0.0, -s);
        let bu = 1usize << u;
        let mask = bu | (1usize << v);
        // Each unordered pair (x, x ^ mask) has exactly one member with
        // bit u clear.
        for x in 0..self.amps.len() {
            if x & bu != 0 {
                continue;
            }
            let y = x ^ mask;
            let a = self.amps[x];
            let b = self.amps[y];
            self.amps[x] = c * a + mix * b;
            self.amps[y] = c * b + mix * a;
        }
        Ok(())
    }

    /// RZX(phi) = exp(-i phi/2 Z_u X_v): flips bit v with mixing amplitude
    /// -i sin(phi/2) in the bit_u = 0 sector and +i sin(phi/2) in the
    /// bit_u = 1 sector.
    pub fn rzx(&mut self, u: usize, v: usize, phi: f64) -> Result<()> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(Error::InvalidInput("rzx requires distinct qubits".into()));
        }
        let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
        let bu = 1usize << u;
        let bv = 1usize << v;
        for x in 0..self.amps.len() {
            if x & bv != 0 {
                continue;
            }
            let y = x | bv;
            let mix = if x & bu == 0 {
                Complex64::new(0.0, -s)
            } else {
                Complex64::new(0.0, s)
            };
            let a = self.amps[x];
            let b = self.amps[y];
            self.amps[x] = c * a + mix * b;
            self.amps[y] = c * b + mix * a;
        }
        Ok(())
    }

    /// RX(theta) = exp(-i theta/2 X_j).
    pub fn rx(&mut self, j: usize, theta: f64) -> Result<()> {
        self.check_qubit(j)?;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let mix = Complex64::new(0.0, -s);
        let bit = 1usize << j;
        for x in 0..self.amps.len() {
            if x & bit != 0 {
                continue;
            }
            let y = x | bit;
            let a = self.amps[x];
            let b = self.amps[y];
            self.amps[x] = c * a + mix * b;
            self.amps[y] = c * b + mix * a;
        }
        Ok(())
    }

    /// RZ(theta) = exp(-i theta/2 Z_j).
    pub fn rz(&mut self, j: usize, theta: f64) -> Result<()> {
        self.check_qubit(j)?;
        let f0 = Complex64::from_polar(1.0, -theta / 2.0);
        let f1 = Complex64::from_polar(1.0, theta / 2.0);
        let bit = 1usize << j;
        for (x, a) in self.amps.iter_mut().enumerate() {
            *a *= if x & bit == 0 { f0 } else { f1 };
        }
        Ok(())
    }

    /// RZZ(theta) = exp(-i theta/2 Z_u Z_v).
    pub fn rzz(&mut self, u: usize, v: usize, theta: f64) -> Result<()> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(Error::InvalidInput("rzz requires distinct qubits".into()));
        }
        let aligned = Complex64::from_polar(1.0, -theta / 2.0);
        let anti = Complex64::from_polar(1.0, theta / 2.0);
        let bu = 1usize << u;
        let bv = 1usize << v;
        for (x, a) in self.amps.iter_mut().enumerate() {
            let parity = ((x & bu != 0) as u8) ^ ((x & bv != 0) as u8);
            *a *= if parity == 0 { aligned } else { anti };
        }
        Ok(())
    }

    /// |amp|^2 for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Exact output distribution, keyed by bitstring; zero-probability
    /// states are skipped.
    pub fn exact_distribution(&self) -> ExactDistribution {
        let mut probs = BTreeMap::new();
        for (x, p) in self.probabilities().into_iter().enumerate() {
            if p > 0.0 {
                probs.insert(index_to_bitstring(x, self.n), p);
            }
        }
        ExactDistribution { probs }
    }

    /// Multinomial draw from the measurement distribution; deterministic
    /// for a fixed seed.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<ShotDistribution> {
        if shots == 0 {
            return Err(Error::InvalidInput("shots must be >= 1".into()));
        }
        let probs = self.probabilities();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = rng_from_seed(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c < r).min(probs.len() - 1);
            *counts.entry(index_to_bitstring(idx, self.n)).or_insert(0) += 1;
        }
        Ok(ShotDistribution { counts, shots })
    }
}

/// Finite-shot measurement record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotDistribution {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

/// Noiseless probability weights, the default for simulation metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub probs: BTreeMap<String, f64>,
}

/// Either kind of output distribution, normalized on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputDistribution {
    Shots(ShotDistribution),
    Exact(ExactDistribution),
}

impl OutputDistribution {
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        match self {
            OutputDistribution::Shots(d) => {
                let total = d.shots as f64;
                d.counts
                    .iter()
                    .map(|(k, v)| (k.clone(), *v as f64 / total))
                    .collect()
            }
            OutputDistribution::Exact(d) => d.probs.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OutputDistribution::Shots(d) => d.counts.is_empty(),
            OutputDistribution::Exact(d) => d.probs.is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn init_zero_states() {
        let s = Statevector::init_zero(1).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let s = Statevector::init_zero(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_eq!(s.amplitudes()[1], Complex64::new(0.0, 0.0));
        let s = Statevector::init_zero(16).unwrap();
        assert_eq!(s.amplitudes().len(), 65536);
        assert!((s.norm_sq() - 1.0).abs() < 1e-15);
        assert!(Statevector::init_zero(17).is_err());
        assert!(Statevector::init_zero(0).is_err());
    }

    #[test]
    fn hadamard_uniform_and_involution() {
        let mut s = Statevector::init_zero(2).unwrap();
        s.hadamard_all();
        for a in s.amplitudes() {
            assert!(close(*a, Complex64::new(0.5, 0.0), 1e-14));
        }
        s.hadamard_all();
        assert!(close(s.amplitudes()[0], Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn phase_gate_action() {
        let mut s = Statevector::init_zero(1).unwrap();
        s.hadamard_all();
        s.phase(0, std::f64::consts::PI).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(-SQRT_HALF, 0.0), 1e-14));

        let mut s = Statevector::init_zero(1).unwrap();
        s.rx(0, std::f64::consts::PI).unwrap(); // |1> up to phase -i
        s.phase(0, std::f64::consts::FRAC_PI_2).unwrap();
        // amplitude was -i, times e^{i pi/2} = i gives 1
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0), 1e-14));
    }

    #[test]
    fn rxx_on_basis_states() {
        let mut s = Statevector::init_zero(2).unwrap();
        s.rxx(0, 1, std::f64::consts::PI).unwrap();
        assert!(close(s.amplitudes()[3], Complex64::new(0.0, -1.0), 1e-14));

        let mut s = Statevector::init_zero(2).unwrap();
        s.rxx(0, 1, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(SQRT_HALF, 0.0), 1e-14));
        assert!(close(s.amplitudes()[3], Complex64::new(0.0, -SQRT_HALF), 1e-14));
    }

    #[test]
    fn rzx_sector_signs() {
        // |00>: u = 0 sector, flip v with -i.
        let mut s = Statevector::init_zero(2).unwrap();
        s.rzx(0, 1, std::f64::consts::PI).unwrap();
        assert!(close(s.amplitudes()[2], Complex64::new(0.0, -1.0), 1e-14));

        // |10> (bit u = 0 set): +i sector. Index of "10" is 1.
        let mut s = Statevector::init_zero(2).unwrap();
        s.rx(0, std::f64::consts::PI).unwrap(); // -i|1>_0
        s.rzx(0, 1, std::f64::consts::PI).unwrap();
        // state: (-i)(+i)|11> = |11>
        assert!(close(s.amplitudes()[3], Complex64::new(1.0, 0.0), 1e-14));
    }

    #[test]
    fn rzx_not_symmetric_rxx_symmetric() {
        let theta = 0.813;
        let mut a = Statevector::init_zero(2).unwrap();
        a.hadamard(0);
        let mut b = a.clone();
        a.rxx(0, 1, theta).unwrap();
        b.rxx(1, 0, theta).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*x, *y, 1e-14));
        }

        let mut a = Statevector::init_zero(2).unwrap();
        a.hadamard(0);
        let mut b = a.clone();
        a.rzx(0, 1, theta).unwrap();
        b.rzx(1, 0, theta).unwrap();
        let differs = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .any(|(x, y)| (x - y).norm() > 1e-6);
        assert!(differs, "rzx should not be swap-symmetric");
    }

    #[test]
    fn inverse_rotations() {
        let mut s = Statevector::init_zero(3).unwrap();
        s.hadamard_all();
        s.phase(1, 0.7).unwrap();
        let before = s.clone();
        s.rxx(0, 2, 1.3).unwrap();
        s.rxx(0, 2, -1.3).unwrap();
        s.rzx(1, 2, 0.9).unwrap();
        s.rzx(1, 2, -0.9).unwrap();
        s.phase(0, 0.4).unwrap();
        s.phase(0, -0.4).unwrap();
        s.rzz(0, 1, 1.1).unwrap();
        s.rzz(0, 1, -1.1).unwrap();
        for (x, y) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn probabilities_cases() {
        let mut s = Statevector::init_zero(2).unwrap();
        s.hadamard_all();
        for p in s.probabilities() {
            assert!((p - 0.25).abs() < 1e-14);
        }
        let s = Statevector::init_zero(2).unwrap();
        assert_eq!(s.probabilities()[0], 1.0);

        let mut s = Statevector::init_zero(2).unwrap();
        s.rxx(0, 1, std::f64::consts::FRAC_PI_2).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!(p[1].abs() < 1e-14 && p[2].abs() < 1e-14);
        assert!((p[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampling_behavior() {
        let s = Statevector::init_zero(2).unwrap();
        let d = s.sample(100, 1).unwrap();
        assert_eq!(d.counts.get("00"), Some(&100));

        let mut s = Statevector::init_zero(2).unwrap();
        s.hadamard_all();
        let a = s.sample(4096, 7).unwrap();
        let b = s.sample(4096, 7).unwrap();
        assert_eq!(a, b);
        assert!(s.sample(0, 7).is_err());
    }

    #[test]
    fn sampling_binomial_statistics() {
        let mut s = Statevector::init_zero(2).unwrap();
        s.hadamard_all();
        let shots = 1_000_000u64;
        let d = s.sample(shots, 42).unwrap();
        let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
        for key in ["00", "10", "01", "11"] {
            let c = *d.counts.get(key).unwrap() as f64;
            assert!(
                (c - 250_000.0).abs() <= 5.0 * sigma,
                "count {c} for {key} outside 5 sigma"
            );
        }
        let total: u64 = d.counts.values().sum();
        assert_eq!(total, shots);
    }

    #[test]
    fn norm_preserved_over_long_random_sequence() {
        let mut rng = rng_from_seed(5);
        let mut s = Statevector::init_zero(4).unwrap();
        s.hadamard_all();
        for _ in 0..10_000 {
            let angle = rng.gen::<f64>() * 6.0 - 3.0;
            let u = rng.gen_range(0..4);
            let mut v = rng.gen_range(0..4);
            if v == u {
                v = (v + 1) % 4;
            }
            match rng.gen_range(0..6) {
                0 => s.rxx(u, v, angle).unwrap(),
                1 => s.rzx(u, v, angle).unwrap(),
                2 => s.rzz(u, v, angle).unwrap(),
                3 => s.rx(u, angle).unwrap(),
                4 => s.rz(u, angle).unwrap(),
                _ => s.phase(u, angle).unwrap(),
            }
        }
        assert!((s.norm_sq() - 1.0).abs() <= 1e-10);
    }
}
