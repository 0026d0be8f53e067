//! Named state constructors: completely mixed, Dicke, GHZ, Werner, and the
//! canonical-basis building blocks used by the classifier.
//!
//! All constructors produce permutation-invariant Pauli expansions directly;
//! the dense route is used only where an outer product is genuinely simpler
//! (pure Dicke states). Everything is exact up to floating arithmetic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliIndex, PauliOperator};
use crate::sympoly::symmetrize;
use crate::Tolerances;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0f64;
    for j in 0..k {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v.round()
}

/// Id / 2^n.
pub fn completely_mixed(n: usize) -> PauliOperator {
    let mut rho = PauliOperator::new(n);
    rho.set(PauliIndex::zeros(n), 0.5f64.powi(n as i32));
    rho
}

/// Iterator over all words with digits restricted to {lo, hi}.
fn two_digit_words(n: usize, lo: u8, hi: u8) -> impl Iterator<Item = (PauliIndex, usize)> {
    (0..(1usize << n)).map(move |mask| {
        let mut digits = vec![lo; n];
        let mut count = 0;
        for (k, d) in digits.iter_mut().enumerate() {
            if (mask >> (n - 1 - k)) & 1 == 1 {
                *d = hi;
                count += 1;
            }
        }
        (PauliIndex::from_digits(&digits), count)
    })
}

/// |0^n><0^n|.
pub fn product_zero(n: usize) -> PauliOperator {
    let scale = 0.5f64.powi(n as i32);
    let mut rho = PauliOperator::new(n);
    for (idx, _) in two_digit_words(n, 0, 3) {
        rho.set(idx, scale);
    }
    rho
}

/// Sym |psi(n,k)><psi(n,k)| for the k-excitation basis string: the uniform
/// diagonal mixture of all weight-k strings. Coefficients depend only on the
/// number m of z-digits, via the alternating sum K(m) = sum_t (-1)^t C(m,t) C(n-m,k-t).
pub fn dicke_rho(n: usize, k: usize) -> Result<PauliOperator> {
    if k > n {
        return Err(Error::ParamOutOfRange(format!("dicke_rho: k = {k} exceeds n = {n}")));
    }
    let scale = 0.5f64.powi(n as i32) / binomial(n, k);
    let mut kraw = vec![0.0f64; n + 1];
    for (m, slot) in kraw.iter_mut().enumerate() {
        let mut acc = 0.0;
        for t in 0..=m.min(k) {
            let other = binomial(n - m, k - t);
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(m, t) * other;
        }
        *slot = acc;
    }
    let mut rho = PauliOperator::new(n);
    for (idx, m) in two_digit_words(n, 0, 3) {
        let v = scale * kraw[m];
        if v != 0.0 {
            rho.set(idx, v);
        }
    }
    Ok(rho)
}

/// Projector onto the symmetric Dicke superposition of all weight-k strings.
pub fn dicke_pure(n: usize, k: usize) -> Result<PauliOperator> {
    if k > n {
        return Err(Error::ParamOutOfRange(format!("dicke_pure: k = {k} exceeds n = {n}")));
    }
    let dim = 1usize << n;
    let norm = 1.0 / binomial(n, k).sqrt();
    let mut vec = nalgebra::DVector::<Complex64>::zeros(dim);
    for b in 0..dim {
        if (b as u32).count_ones() as usize == k {
            vec[b] = Complex64::new(norm, 0.0);
        }
    }
    let mat = &vec * vec.adjoint();
    let dense = crate::pauli::DenseHermitian::new(n, mat)?;
    PauliOperator::from_dense(&dense, &Tolerances::default())
}

/// Density operator of alpha |0^n> + beta |1^n>.
pub fn ghz_rho(n: usize, alpha: Complex64, beta: Complex64) -> Result<PauliOperator> {
    if n < 2 {
        return Err(Error::ParamOutOfRange(format!("ghz_rho: n = {n} must be at least 2")));
    }
    let deficit = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
    if deficit > 1e-9 {
        return Err(Error::NotNormalized { deficit });
    }
    let scale = 0.5f64.powi(n as i32);
    let (pa, pb) = (alpha.norm_sqr(), beta.norm_sqr());
    let mut rho = PauliOperator::new(n);
    for (idx, m) in two_digit_words(n, 0, 3) {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let v = scale * (pa + sign * pb);
        if v.abs() > 1e-18 {
            rho.set(idx, v);
        }
    }
    let cross = alpha * beta.conj();
    if cross.norm() > 1e-18 {
        // |0^n><1^n| = 2^{-n} sum over words in {x,y}^n of i^{#y} sigma_I.
        let i = Complex64::new(0.0, 1.0);
        for (idx, m2) in two_digit_words(n, 1, 2) {
            let v = 2.0 * scale * (cross * i.powu(m2 as u32)).re;
            if v.abs() > 1e-18 {
                rho.set(idx, v);
            }
        }
    }
    Ok(rho)
}

/// The Hermitian corner pair |0^n><1^n| + |1^n><0^n|.
pub fn ghz_corner(n: usize) -> PauliOperator {
    let scale = 0.5f64.powi(n as i32);
    let i = Complex64::new(0.0, 1.0);
    let mut op = PauliOperator::new(n);
    for (idx, m2) in two_digit_words(n, 1, 2) {
        let v = 2.0 * scale * i.powu(m2 as u32).re;
        if v != 0.0 {
            op.set(idx, v);
        }
    }
    op
}

/// Sym(u^{x k} x Id^{x (n-2k)}) with u = xx + yy + zz, unnormalized.
pub fn werner_basis(n: usize, k: usize) -> Result<PauliOperator> {
    if 2 * k > n {
        return Err(Error::ParamOutOfRange(format!("werner_basis: 2k = {} exceeds n = {n}", 2 * k)));
    }
    let mut raw = PauliOperator::new(n);
    // u^{x k}: digits paired equal on the first k pairs.
    let mut choice = vec![1u8; k];
    loop {
        let mut digits = vec![0u8; n];
        for (p, &d) in choice.iter().enumerate() {
            digits[2 * p] = d;
            digits[2 * p + 1] = d;
        }
        raw.add_term(PauliIndex::from_digits(&digits), 1.0);
        // Next assignment in {1,2,3}^k.
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(symmetrize(&raw));
            }
            if choice[pos] < 3 {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 1;
            pos += 1;
        }
    }
}

/// Sym(sigma_z^{x k} x Id^{x (n-k)}): the Product-class basis element whose
/// polynomial is 2^n z^k.
pub fn product_basis(n: usize, k: usize) -> Result<PauliOperator> {
    if k > n {
        return Err(Error::ParamOutOfRange(format!("product_basis: k = {k} exceeds n = {n}")));
    }
    let mut raw = PauliOperator::new(n);
    let mut digits = vec![0u8; n];
    for d in digits.iter_mut().take(k) {
        *d = 3;
    }
    raw.set(PauliIndex::from_digits(&digits), 1.0);
    Ok(symmetrize(&raw))
}

/// Sym((xx + yy)^{x s} x sigma_z^{x r} x Id^{x (n-r-2s)}): the Dicke-class
/// basis element whose polynomial is 2^n z^r (x^2+y^2)^s.
pub fn dicke_basis(n: usize, r: usize, s: usize) -> Result<PauliOperator> {
    if r + 2 * s > n {
        return Err(Error::ParamOutOfRange(format!(
            "dicke_basis: r + 2s = {} exceeds n = {n}",
            r + 2 * s
        )));
    }
    let mut raw = PauliOperator::new(n);
    for mask in 0..(1usize << s) {
        let mut digits = vec![0u8; n];
        for p in 0..s {
            let d = if (mask >> p) & 1 == 0 { 1u8 } else { 2u8 };
            digits[2 * p] = d;
            digits[2 * p + 1] = d;
        }
        for d in digits.iter_mut().skip(2 * s).take(r) {
            *d = 3;
        }
        raw.add_term(PauliIndex::from_digits(&digits), 1.0);
    }
    Ok(symmetrize(&raw))
}

/// sum_k c_k dicke_rho(n,k) + d ghz_rho(n, alpha, beta).
pub fn ghz_mixture(
    n: usize,
    c: &[f64],
    d: f64,
    alpha: Complex64,
    beta: Complex64,
) -> Result<PauliOperator> {
    if c.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: c.len() });
    }
    if d < -1e-12 || c.iter().any(|&w| w < -1e-12) {
        return Err(Error::ParamOutOfRange("ghz_mixture: negative weight".into()));
    }
    let deficit = (c.iter().sum::<f64>() + d - 1.0).abs();
    if deficit > 1e-9 {
        return Err(Error::NotNormalized { deficit });
    }
    let mut rho = PauliOperator::new(n);
    for (k, &w) in c.iter().enumerate() {
        if w != 0.0 {
            rho.add_scaled(w, &dicke_rho(n, k)?)?;
        }
    }
    if d != 0.0 {
        rho.add_scaled(d, &ghz_rho(n, alpha, beta)?)?;
    }
    Ok(rho)
}

/// Projector onto (|01> - |10|)/sqrt(2): (Id - xx - yy - zz)/4.
pub fn singlet() -> PauliOperator {
    let mut rho = PauliOperator::new(2);
    rho.set(PauliIndex::from_digits(&[0, 0]), 0.25);
    rho.set(PauliIndex::from_digits(&[1, 1]), -0.25);
    rho.set(PauliIndex::from_digits(&[2, 2]), -0.25);
    rho.set(PauliIndex::from_digits(&[3, 3]), -0.25);
    rho
}

/// Id/8 + a zzz on three qubits, the standard twin-pair fixture.
pub fn zz_example(a: f64) -> PauliOperator {
    let mut rho = completely_mixed(3);
    rho.set(PauliIndex::from_digits(&[3, 3, 3]), a);
    rho
}
