//! Weighted Pauli-string sums: the universal Hamiltonian representation,
//! with dense materialization and a matrix-free vector apply.
//!
//! Qubit 0 is the least-significant bit of the basis-state index. This
//! convention is shared by matrices, statevectors, and bitstrings.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count for which dense 2^n matrices are materialized.
pub const DENSE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A length-n word over {I, X, Y, Z}; position j acts on qubit j.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; n],
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[qubit] = p;
        s
    }

    pub fn two(n: usize, a: (usize, Pauli), b: (usize, Pauli)) -> Self {
        let mut s = Self::identity(n);
        s.letters[a.0] = a.1;
        s.letters[b.0] = b.1;
        s
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Bitmask of qubits whose basis bit is flipped by this string (X, Y).
    fn flip_mask(&self) -> usize {
        let mut m = 0usize;
        for (j, p) in self.letters.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                m |= 1 << j;
            }
        }
        m
    }

    /// Scalar factor of P|x> = factor * |x ^ flip_mask>.
    fn phase_on(&self, x: usize) -> Complex64 {
        let mut f = Complex64::new(1.0, 0.0);
        for (j, p) in self.letters.iter().enumerate() {
            let bit = (x >> j) & 1;
            match p {
                Pauli::I | Pauli::X => {}
                Pauli::Z => {
                    if bit == 1 {
                        f = -f;
                    }
                }
                // Y|0> = i|1>, Y|1> = -i|0>
                Pauli::Y => {
                    f *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
            }
        }
        f
    }

    pub fn to_text(&self) -> String {
        self.letters.iter().map(|p| p.letter()).collect()
    }
}

/// A real-weighted sum of Pauli strings on n qubits, canonical at rest:
/// terms sorted by string, duplicates merged, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, s) in &terms {
            if s.n() != n {
                return Err(Error::InvalidInput(format!(
                    "term length {} does not match n = {n}",
                    s.n()
                )));
            }
        }
        let mut sum = PauliSum { n, terms };
        sum.canonicalize();
        Ok(sum)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn push(&mut self, coeff: f64, s: PauliString) {
        assert_eq!(s.n(), self.n, "term length mismatch");
        self.terms.push((coeff, s));
        self.canonicalize();
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::InvalidInput("qubit count mismatch".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PauliSum::from_terms(self.n, terms)
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| (c * factor, s.clone()))
            .collect();
        PauliSum::from_terms(self.n, terms).expect("lengths unchanged")
    }

    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(f64, PauliString)> = Vec::with_capacity(self.terms.len());
        for (c, s) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((mc, ms)) if *ms == s => *mc += c,
                _ => merged.push((c, s)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        self.terms = merged;
    }

    /// Sum of |coefficients|; upper bound on the operator norm.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Dense 2^n x 2^n matrix. Refuses above [`DENSE_LIMIT`]; the
    /// matrix-free [`PauliSum::apply`] covers larger systems.
    pub fn to_matrix(&self) -> Result<Mat<Complex64>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "dense matrix for n = {} exceeds limit {DENSE_LIMIT}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for (coeff, s) in &self.terms {
            let mask = s.flip_mask();
            for x in 0..dim {
                let y = x ^ mask;
                let f = s.phase_on(x);
                m[(y, x)] += Complex64::new(*coeff, 0.0) * f;
            }
        }
        Ok(m)
    }

    /// True when every term is real in the computational basis (even
    /// count of Y letters), so the dense matrix is real symmetric.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, s)| {
            s.letters.iter().filter(|p| matches!(p, Pauli::Y)).count() % 2 == 0
        })
    }

    /// y += H x, without materializing the matrix.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let dim = 1usize << self.n;
        assert_eq!(x.len(), dim);
        assert_eq!(y.len(), dim);
        for (coeff, s) in &self.terms {
            let mask = s.flip_mask();
            let c = Complex64::new(*coeff, 0.0);
            for i in 0..dim {
                let f = s.phase_on(i);
                y[i ^ mask] += c * f * x[i];
            }
        }
    }

    /// Diagonal entries, valid generally (off-diagonal terms contribute
    /// nothing to the diagonal only when they flip at least one bit, which
    /// holds for any term containing X or Y).
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n;
        let mut d = vec![0.0; dim];
        for (coeff, s) in &self.terms {
            if s.flip_mask() != 0 {
                continue;
            }
            for (x, slot) in d.iter_mut().enumerate() {
                *slot += coeff * s.phase_on(x).re;
            }
        }
        d
    }

    /// Debug dump: one "coefficient<TAB>letters" line per term.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.terms {
            out.push_str(&format!("{c:.17e}\t{}\n", s.to_text()));
        }
        out
    }
}
