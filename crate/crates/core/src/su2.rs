//! The local algebra su(2)^n, its group, and their actions on states.
//!
//! Basis of one su(2) summand: A = i sigma_z, B = i sigma_y, C = i sigma_x.
//! An element is stored by its real coordinates (a, b, c) in that basis; the
//! rescaled Hilbert-Schmidt norm |M| = (2 tr M^dag M)^(1/2) equals
//! 2 sqrt(a^2+b^2+c^2), and the matching global inner product on n-tuples is
//! <M, N> = 4 sum_k (a_k a'_k + b_k b'_k + c_k c'_k).
//!
//! Bracket table used throughout (M = aA + bB + cC acting on one qubit):
//!   [M, sigma_x] = -2a sigma_y + 2b sigma_z
//!   [M, sigma_y] =  2a sigma_x - 2c sigma_z
//!   [M, sigma_z] = -2b sigma_x + 2c sigma_y

use nalgebra::{DMatrix, Matrix2, Matrix3, Rotation3, UnitQuaternion};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{DenseHermitian, PauliOperator};
use crate::{Tolerances, MAX_QUBITS};

const ROTATION_DEFECT_LIMIT: f64 = 1e-6;

/// One su(2) summand element, coordinates in the (A, B, C) basis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Su2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Su2 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Su2 { a, b, c }
    }

    pub fn zero() -> Self {
        Su2::default()
    }

    pub fn axis_a() -> Self {
        Su2::new(1.0, 0.0, 0.0)
    }

    pub fn axis_b() -> Self {
        Su2::new(0.0, 1.0, 0.0)
    }

    pub fn axis_c() -> Self {
        Su2::new(0.0, 0.0, 1.0)
    }

    /// [self, other] = 2 (self x other) in (a, b, c) coordinates.
    pub fn bracket(&self, other: &Su2) -> Su2 {
        Su2 {
            a: 2.0 * (self.b * other.c - self.c * other.b),
            b: 2.0 * (self.c * other.a - self.a * other.c),
            c: 2.0 * (self.a * other.b - self.b * other.a),
        }
    }

    pub fn dot(&self, other: &Su2) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c
    }

    pub fn coord_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rescaled Hilbert-Schmidt norm, twice the coordinate norm.
    pub fn hs_norm(&self) -> f64 {
        2.0 * self.coord_norm()
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.coord_norm() <= eps
    }

    pub fn scale(&self, f: f64) -> Su2 {
        Su2::new(f * self.a, f * self.b, f * self.c)
    }

    pub fn add(&self, other: &Su2) -> Su2 {
        Su2::new(self.a + other.a, self.b + other.b, self.c + other.c)
    }

    pub fn sub(&self, other: &Su2) -> Su2 {
        Su2::new(self.a - other.a, self.b - other.b, self.c - other.c)
    }

    /// Expansion over (sigma_x, sigma_y, sigma_z): M = i (x sx + y sy + z sz).
    pub fn pauli_vec(&self) -> [f64; 3] {
        [self.c, self.b, self.a]
    }

    pub fn from_pauli_vec(v: [f64; 3]) -> Su2 {
        Su2::new(v[2], v[1], v[0])
    }

    pub fn dense(&self) -> Matrix2<Complex64> {
        // i (a sz + b sy + c sx)
        Matrix2::new(
            Complex64::new(0.0, self.a),
            Complex64::new(self.b, self.c),
            Complex64::new(-self.b, self.c),
            Complex64::new(0.0, -self.a),
        )
    }

    /// exp(t M) in closed form; M^2 = -theta^2 Id with theta the coordinate norm.
    pub fn exp(&self, t: f64) -> Unitary2 {
        let theta = self.coord_norm();
        if theta == 0.0 {
            return Unitary2::identity();
        }
        let (s, c) = (t * theta).sin_cos();
        let f = s / theta;
        Unitary2 {
            a: Complex64::new(c, f * self.a),
            b: Complex64::new(-f * self.b, f * self.c),
        }
    }
}

/// Element of su(2)^n: one Su2 part per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalAlgebraElement {
    parts: Vec<Su2>,
}

impl LocalAlgebraElement {
    pub fn zero(n: usize) -> Self {
        LocalAlgebraElement { parts: vec![Su2::zero(); n] }
    }

    pub fn from_parts(parts: Vec<Su2>) -> Self {
        assert!(!parts.is_empty());
        LocalAlgebraElement { parts }
    }

    /// Element supported on a single qubit.
    pub fn single(n: usize, k: usize, m: Su2) -> Self {
        let mut e = LocalAlgebraElement::zero(n);
        e.parts[k] = m;
        e
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, k: usize) -> &Su2 {
        &self.parts[k]
    }

    pub fn parts(&self) -> &[Su2] {
        &self.parts
    }

    pub fn set_part(&mut self, k: usize, m: Su2) {
        self.parts[k] = m;
    }

    /// Number of qubits with a nonzero part.
    pub fn weight(&self, eps: f64) -> usize {
        self.parts.iter().filter(|p| !p.is_zero(eps)).count()
    }

    pub fn global_dot(&self, other: &LocalAlgebraElement) -> f64 {
        debug_assert_eq!(self.n(), other.n());
        4.0 * self
            .parts
            .iter()
            .zip(other.parts.iter())
            .map(|(p, q)| p.dot(q))
            .sum::<f64>()
    }

    pub fn global_norm(&self) -> f64 {
        self.global_dot(self).sqrt()
    }

    pub fn scale(&self, f: f64) -> Self {
        LocalAlgebraElement { parts: self.parts.iter().map(|p| p.scale(f)).collect() }
    }

    pub fn add_scaled(&self, f: f64, other: &LocalAlgebraElement) -> Self {
        debug_assert_eq!(self.n(), other.n());
        LocalAlgebraElement {
            parts: self
                .parts
                .iter()
                .zip(other.parts.iter())
                .map(|(p, q)| p.add(&q.scale(f)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &LocalAlgebraElement) -> Self {
        self.add_scaled(-1.0, other)
    }

    /// Componentwise bracket; su(2)^n is a direct sum.
    pub fn bracket(&self, other: &LocalAlgebraElement) -> Self {
        debug_assert_eq!(self.n(), other.n());
        LocalAlgebraElement {
            parts: self
                .parts
                .iter()
                .zip(other.parts.iter())
                .map(|(p, q)| p.bracket(q))
                .collect(),
        }
    }

    /// Flattened coordinates [a_0, b_0, c_0, a_1, ...].
    pub fn to_coords(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.n());
        for p in &self.parts {
            v.extend_from_slice(&[p.a, p.b, p.c]);
        }
        v
    }

    pub fn from_coords(coords: &[f64]) -> Self {
        assert!(coords.len().is_multiple_of(3) && !coords.is_empty());
        LocalAlgebraElement {
            parts: coords
                .chunks_exact(3)
                .map(|c| Su2::new(c[0], c[1], c[2]))
                .collect(),
        }
    }

    /// Dense embedding sum_k Id x ... x M_k x ... x Id, for oracle tests.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n();
        if n > MAX_QUBITS {
            return Err(Error::ResourceLimit { n, max: MAX_QUBITS });
        }
        let dim = 1usize << n;
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        let id2 = DMatrix::<Complex64>::identity(2, 2);
        for k in 0..n {
            let mut term = DMatrix::<Complex64>::identity(1, 1);
            for j in 0..n {
                let factor = if j == k {
                    DMatrix::from_fn(2, 2, |r, c| self.parts[k].dense()[(r, c)])
                } else {
                    id2.clone()
                };
                term = term.kronecker(&factor);
            }
            out += term;
        }
        Ok(out)
    }
}

/// Element of SU(2) stored by its first column: matrix ((a, -conj b), (b, conj a)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Unitary2 {
    pub fn identity() -> Self {
        Unitary2 { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// i sigma_x, the antidiagonal generator used by twin transformations.
    pub fn ix() -> Self {
        Unitary2 { a: Complex64::new(0.0, 0.0), b: Complex64::new(0.0, 1.0) }
    }

    /// i sigma_z = exp((pi/2) A).
    pub fn iz() -> Self {
        Unitary2 { a: Complex64::new(0.0, 1.0), b: Complex64::new(0.0, 0.0) }
    }

    /// diag(e^{it}, e^{-it}) = exp(t A).
    pub fn diag_phase(t: f64) -> Self {
        Unitary2 { a: Complex64::from_polar(1.0, t), b: Complex64::new(0.0, 0.0) }
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.a, -self.b.conj(), self.b, self.a.conj())
    }

    /// Matrix product self * rhs.
    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        Unitary2 {
            a: self.a * rhs.a - self.b.conj() * rhs.b,
            b: self.b * rhs.a + self.a.conj() * rhs.b,
        }
    }

    pub fn adjoint(&self) -> Unitary2 {
        Unitary2 { a: self.a.conj(), b: -self.b }
    }

    pub fn det(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn unit_defect(&self) -> f64 {
        (self.det() - 1.0).abs()
    }

    pub fn is_diagonal(&self, eps: f64) -> bool {
        self.b.norm() <= eps
    }

    pub fn is_antidiagonal(&self, eps: f64) -> bool {
        self.a.norm() <= eps
    }

    /// Flips the global sign so the first significant component of
    /// (Re a, Im a, Re b, Im b) is positive. Conjugation is insensitive to
    /// the sign, so reports print this representative.
    pub fn sign_normalized(&self) -> Unitary2 {
        for v in [self.a.re, self.a.im, self.b.re, self.b.im] {
            if v.abs() > 1e-12 {
                if v < 0.0 {
                    return Unitary2 { a: -self.a, b: -self.b };
                }
                return *self;
            }
        }
        *self
    }
}

/// Local unitary U_1 x ... x U_n.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    factors: Vec<Unitary2>,
}

impl LocalUnitary {
    pub fn identity(n: usize) -> Self {
        LocalUnitary { factors: vec![Unitary2::identity(); n] }
    }

    pub fn from_factors(factors: Vec<Unitary2>) -> Self {
        assert!(!factors.is_empty());
        LocalUnitary { factors }
    }

    pub fn uniform(g: Unitary2, n: usize) -> Self {
        LocalUnitary { factors: vec![g; n] }
    }

    /// (i sigma_x)^{x n}: z -> -z on every qubit.
    pub fn ix_all(n: usize) -> Self {
        LocalUnitary::uniform(Unitary2::ix(), n)
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, k: usize) -> &Unitary2 {
        &self.factors[k]
    }

    pub fn factors(&self) -> &[Unitary2] {
        &self.factors
    }

    /// Factorwise product self . inner: applying the result means applying
    /// inner first, then self.
    pub fn compose(&self, inner: &LocalUnitary) -> LocalUnitary {
        debug_assert_eq!(self.n(), inner.n());
        LocalUnitary {
            factors: self
                .factors
                .iter()
                .zip(inner.factors.iter())
                .map(|(g, h)| g.mul(h))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> LocalUnitary {
        LocalUnitary { factors: self.factors.iter().map(Unitary2::adjoint).collect() }
    }

    pub fn sign_normalized(&self) -> LocalUnitary {
        LocalUnitary { factors: self.factors.iter().map(Unitary2::sign_normalized).collect() }
    }

    /// Per-qubit rotations Phi(g_k).
    pub fn rotations(&self) -> Vec<Matrix3<f64>> {
        self.factors.iter().map(phi).collect()
    }

    /// U rho U^dag on Pauli coefficients: one 3x3 rotation pass per qubit.
    pub fn conjugate(&self, rho: &PauliOperator) -> Result<PauliOperator> {
        if rho.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: rho.n() });
        }
        let mut cur = rho.clone();
        for (k, g) in self.factors.iter().enumerate() {
            let r = phi(g);
            if (r - Matrix3::identity()).amax() < 1e-15 {
                continue;
            }
            let mut next = PauliOperator::new(cur.n());
            for (idx, &s) in cur.terms() {
                let d = idx.digit(k);
                if d == 0 {
                    next.add_term(*idx, s);
                    continue;
                }
                for i in 1..=3u8 {
                    let f = r[(i as usize - 1, d as usize - 1)];
                    if f != 0.0 {
                        next.add_term(idx.with_digit(k, i), f * s);
                    }
                }
            }
            cur = next;
        }
        cur.prune(1e-15);
        Ok(cur)
    }

    /// Adjoint action on the algebra: parts rotate by Phi(g_k).
    pub fn conjugate_algebra(&self, m: &LocalAlgebraElement) -> LocalAlgebraElement {
        debug_assert_eq!(self.n(), m.n());
        let parts = self
            .factors
            .iter()
            .zip(m.parts().iter())
            .map(|(g, p)| {
                let r = phi(g);
                let v = p.pauli_vec();
                let w = r * nalgebra::Vector3::new(v[0], v[1], v[2]);
                Su2::from_pauli_vec([w[0], w[1], w[2]])
            })
            .collect();
        LocalAlgebraElement { parts }
    }

    /// Dense Kronecker product, for oracle tests.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n() > MAX_QUBITS {
            return Err(Error::ResourceLimit { n: self.n(), max: MAX_QUBITS });
        }
        let mut out = DMatrix::<Complex64>::identity(1, 1);
        for g in &self.factors {
            let m = g.matrix();
            let f = DMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
            out = out.kronecker(&f);
        }
        Ok(out)
    }
}

/// The covering map Phi: SU(2) -> SO(3) in (x, y, z) coordinates:
/// g sigma_j g^dag = sum_k Phi(g)_{kj} sigma_k, so column j is the image of
/// axis j.
pub fn phi(g: &Unitary2) -> Matrix3<f64> {
    // Quaternion components of g = w Id - i (x sx + y sy + z sz).
    let w = g.a.re;
    let z = -g.a.im;
    let y = g.b.re;
    let x = -g.b.im;
    let s = w * w + x * x + y * y + z * z;
    debug_assert!(s > 0.25, "factor far from unitary");
    let f = 2.0 / s;
    Matrix3::new(
        1.0 - f * (y * y + z * z),
        f * (x * y - w * z),
        f * (x * z + w * y),
        f * (x * y + w * z),
        1.0 - f * (x * x + z * z),
        f * (y * z - w * x),
        f * (x * z - w * y),
        f * (y * z + w * x),
        1.0 - f * (x * x + y * y),
    )
}

/// Lifts a proper rotation through Phi. Rejects improper or non-orthogonal
/// input instead of absorbing it.
pub fn su2_from_rotation(r: &Matrix3<f64>, tol: &Tolerances) -> Result<Unitary2> {
    let defect = (r.transpose() * r - Matrix3::identity()).amax();
    let det = r.determinant();
    if defect > ROTATION_DEFECT_LIMIT || (det - 1.0).abs() > ROTATION_DEFECT_LIMIT {
        return Err(Error::NotRotation { defect, det });
    }
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    let g = Unitary2 {
        a: Complex64::new(q.w, -q.k),
        b: Complex64::new(q.j, -q.i),
    };
    let err = (phi(&g) - r).amax();
    if err > (100.0 * tol.num).max(10.0 * defect) {
        return Err(Error::NotRotation { defect: err, det });
    }
    Ok(g)
}

/// [M, rho] on Pauli coefficients via the per-qubit bracket table.
pub fn ad_action(m: &LocalAlgebraElement, rho: &PauliOperator) -> Result<PauliOperator> {
    if m.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: rho.n() });
    }
    let n = rho.n();
    let mut out = PauliOperator::new(n);
    for (idx, &s) in rho.terms() {
        for k in 0..n {
            let p = m.part(k);
            if p.a == 0.0 && p.b == 0.0 && p.c == 0.0 {
                continue;
            }
            match idx.digit(k) {
                0 => {}
                1 => {
                    out.add_term(idx.with_digit(k, 2), -2.0 * p.a * s);
                    out.add_term(idx.with_digit(k, 3), 2.0 * p.b * s);
                }
                2 => {
                    out.add_term(idx.with_digit(k, 1), 2.0 * p.a * s);
                    out.add_term(idx.with_digit(k, 3), -2.0 * p.c * s);
                }
                3 => {
                    out.add_term(idx.with_digit(k, 1), -2.0 * p.b * s);
                    out.add_term(idx.with_digit(k, 2), 2.0 * p.c * s);
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(out)
}

/// [sum_l a_l A^(l), rho] on dense entries: the diagonal generator scales each
/// entry by the eigenvalue difference.
pub fn zeta_coeffs(a: &[f64], rho: &DenseHermitian) -> Result<DenseHermitian> {
    let n = rho.n;
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    let dim = 1usize << n;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = rho.mat[(r, c)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut sum = 0.0;
            for (l, &al) in a.iter().enumerate() {
                let bit = 1usize << (n - 1 - l);
                if (r & bit) != (c & bit) {
                    sum += if (r & bit) == 0 { al } else { -al };
                }
            }
            mat[(r, c)] = Complex64::new(0.0, 2.0 * sum) * v;
        }
    }
    Ok(DenseHermitian { n, mat })
}

/// [sum_l c_l C^(l), rho] on dense entries: one bit-flip sum for rows, one
/// for columns.
pub fn eta_coeffs(c: &[f64], rho: &DenseHermitian) -> Result<DenseHermitian> {
    let n = rho.n;
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let dim = 1usize << n;
    let i = Complex64::new(0.0, 1.0);
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for (l, &cl) in c.iter().enumerate() {
                let bit = 1usize << (n - 1 - l);
                sum += cl * (rho.mat[(r ^ bit, col)] - rho.mat[(r, col ^ bit)]);
            }
            mat[(r, col)] = i * sum;
        }
    }
    Ok(DenseHermitian { n, mat })
}

/// XY - YX for dense matrices, the oracle side of every algebra action.
pub fn commutator(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    x * y - y * x
}
