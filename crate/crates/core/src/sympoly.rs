//! Permutation-invariant operators and their polynomial picture.
//!
//! A symmetric operator on n qubits is determined by one coefficient per
//! digit-count orbit, and the linear map F_n sends the symmetrized word with
//! counts (n0, n1, n2, n3) of (Id, x, y, z) to the monomial x^n1 y^n2 z^n3.
//! Normalization: F_n(rho) = sum over orbits of s_O |O| 2^n x^.. y^.. z^..,
//! chosen so F_n(Sym(u x u x ... )) = 2^n (ux x + uy y + uz z)^n for a unit
//! vector u, and local rotations act on the polynomial by linear substitution.

use std::collections::BTreeMap;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::pauli::{PauliIndex, PauliOperator};
use crate::su2::{phi, Unitary2};

/// Real polynomial in (x, y, z), sparse over monomial exponents.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial3 {
    terms: BTreeMap<(u8, u8, u8), f64>,
}

impl Polynomial3 {
    pub fn zero() -> Self {
        Polynomial3::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Polynomial3::zero();
        p.add_term((0, 0, 0), c);
        p
    }

    pub fn monomial(e: (u8, u8, u8), c: f64) -> Self {
        let mut p = Polynomial3::zero();
        p.add_term(e, c);
        p
    }

    pub fn add_term(&mut self, e: (u8, u8, u8), c: f64) {
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: (u8, u8, u8)) -> f64 {
        self.terms.get(&e).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, u8, u8), &f64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|&(a, b, c)| (a + b + c) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, f: f64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= f;
        }
        out
    }

    pub fn add(&self, other: &Polynomial3) -> Self {
        let mut out = self.clone();
        for (&e, &c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial3) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial3) -> Self {
        let mut out = Polynomial3::zero();
        for (&(a1, b1, c1), &v1) in self.terms() {
            for (&(a2, b2, c2), &v2) in other.terms() {
                out.add_term((a1 + a2, b1 + b2, c1 + c2), v1 * v2);
            }
        }
        out
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b, c), &v)| v * x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn linf_diff(&self, other: &Polynomial3) -> f64 {
        let mut d: f64 = 0.0;
        for (&e, &v) in self.terms() {
            d = d.max((v - other.coeff(e)).abs());
        }
        for (&e, &v) in other.terms() {
            d = d.max((v - self.coeff(e)).abs());
        }
        d
    }

    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, v| v.abs() > eps);
    }
}

/// A symmetric state in polynomial form.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    pub n: usize,
    pub poly: Polynomial3,
}

impl SymmetricState {
    pub fn from_operator(rho: &PauliOperator, tol: &crate::Tolerances) -> Result<Self> {
        Ok(SymmetricState { n: rho.n(), poly: f_n(rho, tol)? })
    }

    pub fn to_operator(&self) -> Result<PauliOperator> {
        f_n_inv(&self.poly, self.n)
    }
}

fn multinomial(counts: [usize; 4]) -> f64 {
    let n = counts.iter().sum::<usize>();
    let mut v = 1.0f64;
    let mut used = 0usize;
    for &c in &counts {
        for j in 1..=c {
            used += 1;
            v = v * used as f64 / j as f64;
        }
    }
    debug_assert_eq!(used, n);
    v.round()
}

/// All words on n qubits with the given digit counts, lexicographic.
fn orbit_indices(counts: [usize; 4]) -> Vec<PauliIndex> {
    let n: usize = counts.iter().sum();
    let mut out = Vec::new();
    let mut digits = vec![0u8; n];
    fn rec(digits: &mut Vec<u8>, pos: usize, remaining: &mut [usize; 4], out: &mut Vec<PauliIndex>) {
        if pos == digits.len() {
            out.push(PauliIndex::from_digits(digits));
            return;
        }
        for d in 0..4u8 {
            if remaining[d as usize] > 0 {
                remaining[d as usize] -= 1;
                digits[pos] = d;
                rec(digits, pos + 1, remaining, out);
                remaining[d as usize] += 1;
            }
        }
    }
    let mut rem = counts;
    rec(&mut digits, 0, &mut rem, &mut out);
    out
}

/// Projects onto the permutation-invariant subspace: every coefficient is
/// replaced by the mean over its digit-count orbit.
pub fn symmetrize(rho: &PauliOperator) -> PauliOperator {
    let mut sums: BTreeMap<[usize; 4], f64> = BTreeMap::new();
    for (idx, &s) in rho.terms() {
        *sums.entry(idx.digit_counts()).or_insert(0.0) += s;
    }
    let mut out = PauliOperator::new(rho.n());
    for (counts, total) in sums {
        let size = multinomial(counts);
        let mean = total / size;
        if mean != 0.0 {
            for idx in orbit_indices(counts) {
                out.set(idx, mean);
            }
        }
    }
    out
}

/// Largest deviation of any coefficient from its orbit mean.
pub fn symmetry_spread(rho: &PauliOperator) -> f64 {
    let mut groups: BTreeMap<[usize; 4], Vec<f64>> = BTreeMap::new();
    for (idx, &s) in rho.terms() {
        groups.entry(idx.digit_counts()).or_default().push(s);
    }
    let mut spread: f64 = 0.0;
    for (counts, vals) in groups {
        let size = multinomial(counts);
        let mean = vals.iter().sum::<f64>() / size;
        for v in &vals {
            spread = spread.max((v - mean).abs());
        }
        // Orbit members missing from the sparse map are zeros.
        if (vals.len() as f64) < size {
            spread = spread.max(mean.abs());
        }
    }
    spread
}

/// The polynomial of a symmetric operator. Fails with NotSymmetric if any
/// orbit spread exceeds tol.num.
pub fn f_n(rho: &PauliOperator, tol: &crate::Tolerances) -> Result<Polynomial3> {
    let spread = symmetry_spread(rho);
    if spread > tol.num {
        return Err(Error::NotSymmetric { spread, limit: tol.num });
    }
    let n = rho.n();
    let scale = (1u64 << n) as f64;
    let mut sums: BTreeMap<[usize; 4], f64> = BTreeMap::new();
    for (idx, &s) in rho.terms() {
        *sums.entry(idx.digit_counts()).or_insert(0.0) += s;
    }
    let mut poly = Polynomial3::zero();
    for (counts, total) in sums {
        // total = s_O * |O|; the monomial coefficient is s_O |O| 2^n.
        poly.add_term((counts[1] as u8, counts[2] as u8, counts[3] as u8), total * scale);
    }
    poly.prune(tol.sparse * scale);
    Ok(poly)
}

/// Inverse of f_n: distributes each monomial coefficient uniformly over its
/// orbit. Fails with DegreeTooHigh when a monomial needs more than n qubits.
pub fn f_n_inv(poly: &Polynomial3, n: usize) -> Result<PauliOperator> {
    let scale = (1u64 << n) as f64;
    let mut out = PauliOperator::new(n);
    for (&(ex, ey, ez), &coeff) in poly.terms() {
        let deg = ex as usize + ey as usize + ez as usize;
        if deg > n {
            return Err(Error::DegreeTooHigh { degree: deg, n });
        }
        let counts = [n - deg, ex as usize, ey as usize, ez as usize];
        let s = coeff / (scale * multinomial(counts));
        if s != 0.0 {
            for idx in orbit_indices(counts) {
                out.add_term(idx, s);
            }
        }
    }
    Ok(out)
}

/// Substitutes (x, y, z) -> (x, y, z) R into the polynomial: the action on
/// polynomials matching conjugation of the state by a uniform local unitary
/// with per-qubit rotation R.
pub fn r_rotation(r: &Matrix3<f64>, poly: &Polynomial3) -> Polynomial3 {
    // Images of the coordinate functions: x -> r00 x + r10 y + r20 z, etc.,
    // i.e. the new variable vector is (x, y, z) applied to columns of R.
    let axis = |j: usize| {
        let mut p = Polynomial3::zero();
        p.add_term((1, 0, 0), r[(0, j)]);
        p.add_term((0, 1, 0), r[(1, j)]);
        p.add_term((0, 0, 1), r[(2, j)]);
        p
    };
    let images = [axis(0), axis(1), axis(2)];
    let mut out = Polynomial3::zero();
    for (&(ex, ey, ez), &coeff) in poly.terms() {
        let mut term = Polynomial3::constant(coeff);
        for (e, img) in [(ex, &images[0]), (ey, &images[1]), (ez, &images[2])] {
            for _ in 0..e {
                term = term.mul(img);
            }
        }
        out = out.add(&term);
    }
    out.prune(0.0);
    out
}

/// R_g: substitution by the rotation Phi(g).
pub fn r_g(g: &Unitary2, poly: &Polynomial3) -> Polynomial3 {
    r_rotation(&phi(g), poly)
}

/// Dimensions of the irreducible pieces of the degree-p harmonic split:
/// 2(p - 2j) + 1 for j = 0 .. floor(p/2).
pub fn homogeneous_irrep_dims(p: usize) -> Vec<usize> {
    (0..=p / 2).map(|j| 2 * (p - 2 * j) + 1).collect()
}

/// Number of trivial representations of the diagonal U(1) inside the
/// degree-p homogeneous polynomials: floor(p/2) + 1.
pub fn trivial_u1_dim(p: usize) -> usize {
    p / 2 + 1
}
