//! Pauli words, sparse real Pauli expansions, and the dense bridge.
//!
//! A Hermitian operator on n qubits is stored as the real coefficient map
//! I -> s_I of its expansion rho = sum_I s_I sigma_I over Pauli words
//! sigma_I = sigma_{i_1} x ... x sigma_{i_n}. Hermiticity of rho is exactly
//! realness of every s_I. The dense route exists as an independent oracle
//! for everything computed on coefficients.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{Tolerances, MAX_QUBITS};

/// A Pauli word on n qubits, digits in {0,1,2,3} for {Id, x, y, z}.
///
/// Packed two bits per qubit with qubit 0 in the highest pair, so the derived
/// ordering is lexicographic in the digit string.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliIndex {
    n: u8,
    packed: u64,
}

impl PauliIndex {
    /// The all-identity word on n qubits.
    pub fn zeros(n: usize) -> Self {
        assert!((1..=31).contains(&n), "qubit count {n} out of range");
        PauliIndex { n: n as u8, packed: 0 }
    }

    pub fn from_digits(digits: &[u8]) -> Self {
        let mut idx = PauliIndex::zeros(digits.len());
        for (k, &d) in digits.iter().enumerate() {
            idx = idx.with_digit(k, d);
        }
        idx
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    fn shift(&self, k: usize) -> u32 {
        debug_assert!(k < self.n());
        (2 * (self.n() - 1 - k)) as u32
    }

    pub fn digit(&self, k: usize) -> u8 {
        ((self.packed >> self.shift(k)) & 0b11) as u8
    }

    pub fn with_digit(&self, k: usize, d: u8) -> Self {
        assert!(d < 4, "Pauli digit {d} out of range");
        let s = self.shift(k);
        PauliIndex {
            n: self.n,
            packed: (self.packed & !(0b11 << s)) | ((d as u64) << s),
        }
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.n()).map(|k| self.digit(k)).collect()
    }

    /// Number of non-identity digits.
    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&k| self.digit(k) != 0).count()
    }

    /// Counts of each digit value, indexed by digit.
    pub fn digit_counts(&self) -> [usize; 4] {
        let mut c = [0usize; 4];
        for k in 0..self.n() {
            c[self.digit(k) as usize] += 1;
        }
        c
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n() {
            f.write_str(match self.digit(k) {
                0 => "i",
                1 => "x",
                2 => "y",
                3 => "z",
                _ => unreachable!(),
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliIndex({self})")
    }
}

/// Sparse real Pauli expansion of a Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator {
    n: usize,
    coeffs: BTreeMap<PauliIndex, f64>,
}

impl PauliOperator {
    pub fn new(n: usize) -> Self {
        assert!((1..=31).contains(&n), "qubit count {n} out of range");
        PauliOperator { n, coeffs: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, idx: &PauliIndex) -> f64 {
        debug_assert_eq!(idx.n(), self.n);
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    /// Sets one coefficient, dropping it if negligible.
    pub fn set(&mut self, idx: PauliIndex, value: f64) {
        assert_eq!(idx.n(), self.n, "index arity mismatch");
        if value != 0.0 {
            self.coeffs.insert(idx, value);
        } else {
            self.coeffs.remove(&idx);
        }
    }

    /// Accumulates into one coefficient.
    pub fn add_term(&mut self, idx: PauliIndex, value: f64) {
        assert_eq!(idx.n(), self.n, "index arity mismatch");
        let v = self.coeffs.entry(idx).or_insert(0.0);
        *v += value;
        if *v == 0.0 {
            self.coeffs.remove(&idx);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliIndex, &f64)> {
        self.coeffs.iter()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drops coefficients with |s_I| <= eps.
    pub fn prune(&mut self, eps: f64) {
        self.coeffs.retain(|_, v| v.abs() > eps);
    }

    pub fn trace(&self) -> f64 {
        self.coeff(&PauliIndex::zeros(self.n)) * (1u64 << self.n) as f64
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= factor;
        }
        out
    }

    /// self += factor * other.
    pub fn add_scaled(&mut self, factor: f64, other: &PauliOperator) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        for (idx, v) in other.terms() {
            self.add_term(*idx, factor * v);
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliOperator) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &PauliOperator) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    /// Largest |s_I|.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest coefficient difference against another operator.
    pub fn linf_diff(&self, other: &PauliOperator) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut d: f64 = 0.0;
        for (idx, v) in self.terms() {
            d = d.max((v - other.coeff(idx)).abs());
        }
        for (idx, v) in other.terms() {
            d = d.max((v - self.coeff(idx)).abs());
        }
        d
    }

    /// Euclidean norm of the coefficient vector. The Hilbert-Schmidt norm of
    /// the operator is 2^(n/2) times this.
    pub fn coeff_l2(&self) -> f64 {
        self.coeffs.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Expands into a dense 2^n x 2^n matrix.
    ///
    /// Each Pauli word has exactly one nonzero entry per row, so the cost is
    /// O(support * 2^n * n) with no Kronecker intermediates.
    pub fn to_dense(&self) -> Result<DenseHermitian> {
        if self.n > MAX_QUBITS {
            return Err(Error::ResourceLimit { n: self.n, max: MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
        for (idx, &s) in self.terms() {
            for r in 0..dim {
                let mut c = 0usize;
                let mut f = Complex64::new(s, 0.0);
                for k in 0..self.n {
                    let bit = 1usize << (self.n - 1 - k);
                    let rk = (r & bit) != 0;
                    match idx.digit(k) {
                        0 => {
                            if rk {
                                c |= bit;
                            }
                        }
                        3 => {
                            if rk {
                                c |= bit;
                                f = -f;
                            }
                        }
                        1 => {
                            if !rk {
                                c |= bit;
                            }
                        }
                        2 => {
                            if !rk {
                                c |= bit;
                                f *= Complex64::new(0.0, -1.0);
                            } else {
                                f *= Complex64::new(0.0, 1.0);
                            }
                        }
                        _ => unreachable!(),
                    }
                }
                mat[(r, c)] += f;
            }
        }
        Ok(DenseHermitian { n: self.n, mat })
    }

    /// Reads the Pauli expansion off a dense Hermitian matrix.
    ///
    /// Butterfly transform: one pass per qubit over a 4^n scratch vector,
    /// replacing the (row bit, column bit) pair by the four Pauli components
    /// of that qubit. Rejects matrices whose Hermiticity defect exceeds
    /// tol.herm; drops coefficients below tol.sparse.
    pub fn from_dense(dense: &DenseHermitian, tol: &Tolerances) -> Result<Self> {
        let n = dense.n;
        if n > MAX_QUBITS {
            return Err(Error::ResourceLimit { n, max: MAX_QUBITS });
        }
        let defect = dense.hermiticity_defect();
        if defect > tol.herm {
            return Err(Error::HermiticityViolation { defect, limit: tol.herm });
        }
        let dim = 1usize << n;
        let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut addr = 0usize;
                for k in 0..n {
                    let bit = 1usize << (n - 1 - k);
                    let d = (((r & bit) != 0) as usize) * 2 + (((c & bit) != 0) as usize);
                    addr = addr * 4 + d;
                }
                buf[addr] = dense.mat[(r, c)];
            }
        }
        let i = Complex64::new(0.0, 1.0);
        for k in 0..n {
            let place = 1usize << (2 * (n - 1 - k));
            let outer = 1usize << (2 * k);
            for hi in 0..outer {
                for lo in 0..place {
                    let base = hi * place * 4 + lo;
                    let v00 = buf[base];
                    let v01 = buf[base + place];
                    let v10 = buf[base + 2 * place];
                    let v11 = buf[base + 3 * place];
                    buf[base] = (v00 + v11) * 0.5;
                    buf[base + place] = (v01 + v10) * 0.5;
                    buf[base + 2 * place] = i * (v01 - v10) * 0.5;
                    buf[base + 3 * place] = (v00 - v11) * 0.5;
                }
            }
        }
        let mut out = PauliOperator::new(n);
        for (addr, v) in buf.iter().enumerate() {
            if v.norm() > tol.sparse {
                let mut digits = vec![0u8; n];
                let mut a = addr;
                for k in (0..n).rev() {
                    digits[k] = (a & 0b11) as u8;
                    a >>= 2;
                }
                out.set(PauliIndex::from_digits(&digits), v.re);
            }
        }
        Ok(out)
    }
}

/// Dense 2^n x 2^n complex matrix, expected Hermitian.
#[derive(Clone, Debug)]
pub struct DenseHermitian {
    pub n: usize,
    pub mat: DMatrix<Complex64>,
}

impl DenseHermitian {
    pub fn new(n: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: mat.nrows() });
        }
        Ok(DenseHermitian { n, mat })
    }

    /// Largest entry of M - M^dagger.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.mat.nrows();
        let mut d: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                d = d.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        d
    }

    /// Largest entry of the difference against another matrix.
    pub fn linf_diff(&self, other: &DenseHermitian) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut d: f64 = 0.0;
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            d = d.max((a - b).norm());
        }
        d
    }
}
