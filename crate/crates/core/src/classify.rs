//! Classification of symmetric mixed states by their stabilizer algebra.
//!
//! For a permutation-invariant state the pair (per-qubit projection dim p,
//! stabilizer dim d) lands in one of six rows: (3,3n) full algebra, (3,3)
//! Werner, (1,n) product-diagonal, (1,n-1) GHZ, (1,1) Dicke, (0,0) zero.
//! At n = 2 the (1,1) row splits by whether the spanning element's two
//! parts are equal (Dicke) or opposite (GHZ).
//!
//! Each class carries an aligner: a local unitary moving the stabilizer to
//! its standard position, after which canonical coefficients are read off
//! the polynomial image (or the matrix, for GHZ). canonical_form composes
//! the remaining discrete freedoms (sign, phase, orientation) into the
//! transformer and re-extracts, so the reported data is a true normal form.
//! lu_equivalent compares canonical data up to the per-class twin and
//! returns a verified witness.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::stabilizer::{projection_dim, stabilizer_basis, AlgebraBasis, RankDiagnostics};
use crate::states;
use crate::su2::{su2_from_rotation, LocalUnitary, Unitary2};
use crate::sympoly::{f_n, symmetry_spread, Polynomial3};
use crate::Tolerances;

/// Canonical data agreeing within 100 * tol.num * scale counts as equal.
const CMP_SCALE: f64 = 100.0;
/// Coefficients below 10 * tol.num * scale are treated as zero in sign and
/// orientation decisions.
const SIGN_SCALE: f64 = 10.0;
/// Expansion and witness residuals above 100 * tol.num * scale abort.
const RESIDUAL_SCALE: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassTag {
    FullLG,
    Werner,
    Product,
    Ghz,
    Dicke,
    Zero,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::FullLG => "FullLG",
            ClassTag::Werner => "Werner",
            ClassTag::Product => "Product",
            ClassTag::Ghz => "GHZ",
            ClassTag::Dicke => "Dicke",
            ClassTag::Zero => "Zero",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub tag: ClassTag,
    /// Per-qubit projection dimension, uniform by the symmetry of the state.
    pub proj: usize,
    pub basis: AlgebraBasis,
    /// Moves the stabilizer onto its standard position for the tag.
    pub aligner: LocalUnitary,
    pub diagnostics: RankDiagnostics,
}

impl Classification {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Canonical coefficients per class; the state is the matching combination
/// of invariant basis operators.
#[derive(Clone, Debug)]
pub enum CanonicalData {
    FullLG,
    /// rho = sum c_k * werner_basis(n, k), k = 0..=n/2.
    Werner { c: Vec<f64> },
    /// rho = sum c_k * product_basis(n, k), k = 0..=n.
    Product { c: Vec<f64> },
    /// Dicke-sector diagonal weights d_0..=d_n plus corner coherence gamma.
    Ghz { d: Vec<f64>, gamma: f64 },
    /// rho = sum b_{r,s} * dicke_basis(n, r, s) over r + 2s <= n.
    Dicke { b: BTreeMap<(usize, usize), f64> },
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub tag: ClassTag,
    pub data: CanonicalData,
    /// The other representative of the same LU class; None when unique.
    pub twin: Option<CanonicalData>,
    /// Full canonicalizing unitary: transformer * rho * transformer^dagger
    /// is the canonical representative.
    pub transformer: LocalUnitary,
    /// Leftover after expanding in the class basis.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub enum EquivOutcome {
    Equivalent(LocalUnitary),
    Inequivalent,
    Unknown,
}

pub fn classify(rho: &PauliOperator, tol: &Tolerances) -> Result<Classification> {
    let spread = symmetry_spread(rho);
    if spread > tol.num {
        return Err(Error::NotSymmetric { spread, limit: tol.num });
    }
    let n = rho.n();
    let (basis, diagnostics) = stabilizer_basis(rho, tol)?;
    let d = basis.dim();
    let mut dims = Vec::with_capacity(n);
    for q in 0..n {
        dims.push(projection_dim(&basis, q, tol)?);
    }
    let p = dims.first().copied().unwrap_or(0);
    if dims.iter().any(|&x| x != p) {
        return Err(Error::NonUniformProjections { dims });
    }

    let tag = if d == 0 {
        ClassTag::Zero
    } else if p == 3 && d == 3 * n {
        ClassTag::FullLG
    } else if p == 3 && d == 3 {
        ClassTag::Werner
    } else if p == 1 && d == n {
        ClassTag::Product
    } else if p == 1 && d == n - 1 && n >= 3 {
        ClassTag::Ghz
    } else if p == 1 && d == 1 && n >= 3 {
        ClassTag::Dicke
    } else if p == 1 && d == 1 && n == 2 {
        // Symmetry forces the spanning element's parts equal or opposite.
        let m = basis.element(0);
        if m.part(0).dot(m.part(1)) > 0.0 {
            ClassTag::Dicke
        } else {
            ClassTag::Ghz
        }
    } else {
        return Err(Error::UnclassifiableDimension { n, dim: d, proj: p });
    };

    let aligner = match tag {
        ClassTag::Zero | ClassTag::FullLG => LocalUnitary::identity(n),
        // K equals the diagonal algebra already for n >= 3; only the
        // two-qubit case admits a twisted coupling.
        ClassTag::Werner if n == 2 => werner_two_qubit_aligner(&basis, tol)?,
        ClassTag::Werner => LocalUnitary::identity(n),
        ClassTag::Product | ClassTag::Ghz | ClassTag::Dicke => {
            uniform_axis_aligner(&basis, tol)?
        }
    };

    Ok(Classification { tag, proj: p, basis, aligner, diagnostics })
}

/// Uniform g with Phi(g) N = z, N the dominant direction of the stabilizer
/// parts. The leftover N vs -N freedom is absorbed by the sign conventions
/// of canonical_form.
fn uniform_axis_aligner(basis: &AlgebraBasis, tol: &Tolerances) -> Result<LocalUnitary> {
    let n = basis.n();
    let mut rows = Vec::new();
    for e in basis.elements() {
        for q in 0..n {
            let p = e.part(q).pauli_vec();
            if p.iter().any(|x| x.abs() > tol.sparse) {
                rows.push(p);
            }
        }
    }
    let mut mat = DMatrix::<f64>::zeros(rows.len().max(3), 3);
    for (r, p) in rows.iter().enumerate() {
        for c in 0..3 {
            mat[(r, c)] = p[c];
        }
    }
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("V^T requested");
    let axis = Vector3::new(v_t[(0, 0)], v_t[(0, 1)], v_t[(0, 2)]);
    let g = su2_from_rotation(&rotation_onto_z(&axis), tol)?;
    Ok(LocalUnitary::uniform(g, n))
}

/// Proper rotation carrying the unit vector v onto z (Rodrigues form).
fn rotation_onto_z(v: &Vector3<f64>) -> Matrix3<f64> {
    let z = Vector3::z();
    let c = v.dot(&z);
    if c > 1.0 - 1e-12 {
        return Matrix3::identity();
    }
    if c < -1.0 + 1e-12 {
        // Half turn about x.
        return Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0);
    }
    let axis = v.cross(&z);
    let s = axis.norm();
    let k = axis / s;
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * s + kx * kx * (1.0 - c)
}

/// Two-qubit Werner aligner. The stabilizer is {(u, Tu)} for a symmetric
/// rotation involution T; diagonalize T, rotate both qubits into its
/// eigenframe, and flip the two negative directions on one side so the
/// coupling becomes the identity.
fn werner_two_qubit_aligner(basis: &AlgebraBasis, tol: &Tolerances) -> Result<LocalUnitary> {
    let mut u = Matrix3::<f64>::zeros();
    let mut v = Matrix3::<f64>::zeros();
    for (i, e) in basis.elements().iter().enumerate() {
        let pu = e.part(0).pauli_vec();
        let pv = e.part(1).pauli_vec();
        for r in 0..3 {
            u[(r, i)] = pu[r];
            v[(r, i)] = pv[r];
        }
    }
    let t = v * u
        .try_inverse()
        .ok_or(Error::NotRotation { defect: 1.0, det: 0.0 })?;
    let defect = (t * t.transpose() - Matrix3::identity())
        .norm()
        .max((t - t.transpose()).norm());
    if defect > 1e-6 {
        return Err(Error::NotRotation { defect, det: t.determinant() });
    }
    let eig = SymmetricEigen::new((t + t.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut q = Matrix3::<f64>::zeros();
    let mut lambda = [0.0f64; 3];
    for (pos, &idx) in order.iter().enumerate() {
        lambda[pos] = eig.eigenvalues[idx];
        for r in 0..3 {
            q[(r, pos)] = eig.eigenvectors[(r, idx)];
        }
    }
    if q.determinant() < 0.0 {
        for r in 0..3 {
            q[(r, 2)] = -q[(r, 2)];
        }
    }
    // Involution eigenvalues are +-1 with an even count of -1.
    let signs = lambda.map(|l| if l < 0.0 { -1.0 } else { 1.0 });
    if signs.iter().product::<f64>() < 0.0 {
        return Err(Error::NotRotation { defect: lambda[1].abs().min(lambda[2].abs()), det: -1.0 });
    }
    let d = Matrix3::from_diagonal(&Vector3::new(signs[0], signs[1], signs[2]));
    let r1 = d * q.transpose();
    let r2 = q.transpose();
    Ok(LocalUnitary::from_factors(vec![
        su2_from_rotation(&r1, tol)?,
        su2_from_rotation(&r2, tol)?,
    ]))
}

pub fn canonical_form(rho: &PauliOperator, tol: &Tolerances) -> Result<CanonicalForm> {
    let class = classify(rho, tol)?;
    canonicalize(rho, &class, tol)
}

fn sign_eps(tol: &Tolerances, scale: f64) -> f64 {
    SIGN_SCALE * tol.num * (1.0 + scale)
}

fn cmp_eps(tol: &Tolerances, scale: f64) -> f64 {
    CMP_SCALE * tol.num * (1.0 + scale)
}

/// Canonical data of rho given its classification; composes the remaining
/// discrete freedoms into the transformer and re-extracts after each one.
pub(crate) fn canonicalize(
    rho: &PauliOperator,
    class: &Classification,
    tol: &Tolerances,
) -> Result<CanonicalForm> {
    let n = rho.n();
    match class.tag {
        ClassTag::Zero => Err(Error::ZeroClassUnsupported),
        ClassTag::FullLG => {
            let residual = rho.linf_diff(&states::completely_mixed(n));
            guard_residual(residual, 1.0, tol)?;
            Ok(CanonicalForm {
                tag: class.tag,
                data: CanonicalData::FullLG,
                twin: None,
                transformer: class.aligner.clone(),
                residual,
            })
        }
        ClassTag::Werner => {
            let aligned = class.aligner.conjugate(rho)?;
            let f = f_n(&aligned, tol)?;
            let (c, residual) = extract_werner(&f, n);
            guard_residual(residual, linf(&c), tol)?;
            Ok(CanonicalForm {
                tag: class.tag,
                data: CanonicalData::Werner { c },
                twin: None,
                transformer: class.aligner.clone(),
                residual,
            })
        }
        ClassTag::Product => {
            let mut tr = class.aligner.clone();
            let (mut c, mut residual) = extract_product(&f_n(&tr.conjugate(rho)?, tol)?, n);
            let eps = sign_eps(tol, linf(&c));
            if let Some(k) = (1..=n).step_by(2).find(|&k| c[k].abs() > eps) {
                if c[k] < 0.0 {
                    tr = LocalUnitary::ix_all(n).compose(&tr);
                    (c, residual) = extract_product(&f_n(&tr.conjugate(rho)?, tol)?, n);
                }
            } else if n == 2 && c[2] < -eps {
                // With no odd coefficient the one-sided flip stays symmetric
                // and fixes the sign of c_2.
                tr = one_sided_ix(n).compose(&tr);
                (c, residual) = extract_product(&f_n(&tr.conjugate(rho)?, tol)?, n);
            }
            guard_residual(residual, linf(&c), tol)?;
            let twin: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(k, v)| if k % 2 == 1 { -v } else { *v })
                .collect();
            Ok(CanonicalForm {
                tag: class.tag,
                data: CanonicalData::Product { c },
                twin: Some(CanonicalData::Product { c: twin }),
                transformer: tr,
                residual,
            })
        }
        ClassTag::Ghz => {
            let mut tr = class.aligner.clone();
            let (mut d, mut corner) = extract_ghz_sectors(&tr.conjugate(rho)?)?;
            let eps = sign_eps(tol, linf(&d).max(corner.norm()));
            // Orientation: keep the lexicographically larger sector list.
            if lex_less(&d, eps) {
                tr = LocalUnitary::ix_all(n).compose(&tr);
                (d, corner) = extract_ghz_sectors(&tr.conjugate(rho)?)?;
            }
            // Phase: rotate the corner onto the positive real axis.
            if corner.norm() > eps && corner.im.abs() > tol.num * (1.0 + corner.norm()) {
                let t = -corner.arg() / (2.0 * n as f64);
                tr = LocalUnitary::uniform(Unitary2::diag_phase(t), n).compose(&tr);
                (d, corner) = extract_ghz_sectors(&tr.conjugate(rho)?)?;
            }
            let gamma = corner.re.max(0.0);
            let aligned = tr.conjugate(rho)?;
            let residual = ghz_residual(&aligned, &d, gamma)?.max(corner.im.abs());
            guard_residual(residual, linf(&d).max(gamma), tol)?;
            let twin = CanonicalData::Ghz { d: d.iter().rev().copied().collect(), gamma };
            Ok(CanonicalForm {
                tag: class.tag,
                data: CanonicalData::Ghz { d, gamma },
                twin: Some(twin),
                transformer: tr,
                residual,
            })
        }
        ClassTag::Dicke => {
            let mut tr = class.aligner.clone();
            let (mut b, mut residual) = extract_dicke(&f_n(&tr.conjugate(rho)?, tol)?, n);
            let eps = sign_eps(tol, map_linf(&b));
            let first_odd = |b: &BTreeMap<(usize, usize), f64>| {
                b.iter().find(|((r, _), v)| r % 2 == 1 && v.abs() > eps).map(|(k, v)| (*k, *v))
            };
            if let Some((_, v)) = first_odd(&b) {
                if v < 0.0 {
                    tr = LocalUnitary::ix_all(n).compose(&tr);
                    (b, residual) = extract_dicke(&f_n(&tr.conjugate(rho)?, tol)?, n);
                }
            }
            if n == 2 && b.get(&(0, 1)).is_some_and(|&v| v < -eps) {
                // A half-turn phase on one qubit flips the xx + yy coupling
                // while preserving symmetry; only available at n = 2.
                tr = one_sided_phase(n).compose(&tr);
                (b, residual) = extract_dicke(&f_n(&tr.conjugate(rho)?, tol)?, n);
            }
            guard_residual(residual, map_linf(&b), tol)?;
            let twin: BTreeMap<(usize, usize), f64> = b
                .iter()
                .map(|(&(r, s), &v)| ((r, s), if r % 2 == 1 { -v } else { v }))
                .collect();
            Ok(CanonicalForm {
                tag: class.tag,
                data: CanonicalData::Dicke { b },
                twin: Some(CanonicalData::Dicke { b: twin }),
                transformer: tr,
                residual,
            })
        }
    }
}

fn guard_residual(residual: f64, scale: f64, tol: &Tolerances) -> Result<()> {
    if residual > RESIDUAL_SCALE * tol.num * (1.0 + scale) {
        return Err(Error::BasisExpansionResidual { residual });
    }
    Ok(())
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn map_linf(b: &BTreeMap<(usize, usize), f64>) -> f64 {
    b.values().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// True when the reversed sector list is lexicographically larger.
fn lex_less(d: &[f64], eps: f64) -> bool {
    for k in 0..d.len() {
        let rev = d[d.len() - 1 - k];
        if (d[k] - rev).abs() > eps {
            return d[k] < rev;
        }
    }
    false
}

fn one_sided_ix(n: usize) -> LocalUnitary {
    let mut factors = vec![Unitary2::identity(); n];
    factors[n - 1] = Unitary2::ix();
    LocalUnitary::from_factors(factors)
}

fn one_sided_phase(n: usize) -> LocalUnitary {
    let mut factors = vec![Unitary2::identity(); n];
    factors[n - 1] = Unitary2::diag_phase(std::f64::consts::FRAC_PI_2);
    LocalUnitary::from_factors(factors)
}

fn pow2(n: usize) -> f64 {
    (1u64 << n) as f64
}

/// Coefficients of f in {R^{2k}}, peeled from the top z-degree down.
fn extract_werner(f: &Polynomial3, n: usize) -> (Vec<f64>, f64) {
    let kmax = n / 2;
    let r2 = {
        let mut p = Polynomial3::zero();
        p.add_term((2, 0, 0), 1.0);
        p.add_term((0, 2, 0), 1.0);
        p.add_term((0, 0, 2), 1.0);
        p
    };
    let mut rem = f.clone();
    let mut c = vec![0.0; kmax + 1];
    for k in (0..=kmax).rev() {
        let v = rem.coeff((0, 0, 2 * k as u8));
        if v != 0.0 {
            let mut basis = Polynomial3::constant(1.0);
            for _ in 0..k {
                basis = basis.mul(&r2);
            }
            rem = rem.sub(&basis.scale(v));
        }
        c[k] = v / pow2(n);
    }
    (c, rem.max_abs() / pow2(n))
}

/// Coefficients of f in {z^k}.
fn extract_product(f: &Polynomial3, n: usize) -> (Vec<f64>, f64) {
    let mut rem = f.clone();
    let mut c = vec![0.0; n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let v = rem.coeff((0, 0, k as u8));
        if v != 0.0 {
            let mut basis = Polynomial3::zero();
            basis.add_term((0, 0, k as u8), 1.0);
            rem = rem.sub(&basis.scale(v));
        }
        *ck = v / pow2(n);
    }
    (c, rem.max_abs() / pow2(n))
}

/// Coefficients of f in {z^r (x^2+y^2)^s}: b_{r,s} is the coefficient of
/// the monomial x^{2s} z^r, which no other basis member contains.
fn extract_dicke(f: &Polynomial3, n: usize) -> (BTreeMap<(usize, usize), f64>, f64) {
    let mut b = BTreeMap::new();
    let mut rem = f.clone();
    for r in 0..=n {
        for s in 0..=(n - r) / 2 {
            let v = rem.coeff((2 * s as u8, 0, r as u8));
            if v != 0.0 {
                let mut basis = Polynomial3::zero();
                basis.add_term((0, 0, r as u8), 1.0);
                let mut xy = Polynomial3::zero();
                xy.add_term((2, 0, 0), 1.0);
                xy.add_term((0, 2, 0), 1.0);
                for _ in 0..s {
                    basis = basis.mul(&xy);
                }
                rem = rem.sub(&basis.scale(v));
            }
            b.insert((r, s), v / pow2(n));
        }
    }
    (b, rem.max_abs() / pow2(n))
}

/// Dicke-sector sums of the diagonal and the 0^n..1^n corner entry.
fn extract_ghz_sectors(rho: &PauliOperator) -> Result<(Vec<f64>, Complex64)> {
    let n = rho.n();
    let mat = rho.to_dense()?;
    let dim = 1usize << n;
    let mut d = vec![0.0; n + 1];
    for x in 0..dim {
        d[x.count_ones() as usize] += mat.mat[(x, x)].re;
    }
    Ok((d, mat.mat[(0, dim - 1)]))
}

/// Deviation of rho from the state its GHZ data describes.
fn ghz_residual(rho: &PauliOperator, d: &[f64], gamma: f64) -> Result<f64> {
    let n = rho.n();
    let mut recon = PauliOperator::new(n);
    for (k, &dk) in d.iter().enumerate() {
        recon = recon.add(&states::dicke_rho(n, k)?.scale(dk))?;
    }
    recon = recon.add(&states::ghz_corner(n).scale(gamma))?;
    Ok(rho.linf_diff(&recon))
}

/// The twin rule per class; None for the unique classes.
pub fn twin_of(data: &CanonicalData) -> Option<CanonicalData> {
    match data {
        CanonicalData::FullLG | CanonicalData::Werner { .. } => None,
        CanonicalData::Product { c } => Some(CanonicalData::Product {
            c: c.iter()
                .enumerate()
                .map(|(k, v)| if k % 2 == 1 { -v } else { *v })
                .collect(),
        }),
        CanonicalData::Ghz { d, gamma } => Some(CanonicalData::Ghz {
            d: d.iter().rev().copied().collect(),
            gamma: *gamma,
        }),
        CanonicalData::Dicke { b } => Some(CanonicalData::Dicke {
            b: b.iter()
                .map(|(&(r, s), &v)| ((r, s), if r % 2 == 1 { -v } else { v }))
                .collect(),
        }),
    }
}

/// Componentwise agreement within eps; false across different variants.
pub fn data_close(a: &CanonicalData, b: &CanonicalData, eps: f64) -> bool {
    match (a, b) {
        (CanonicalData::FullLG, CanonicalData::FullLG) => true,
        (CanonicalData::Werner { c: x }, CanonicalData::Werner { c: y })
        | (CanonicalData::Product { c: x }, CanonicalData::Product { c: y }) => {
            x.len() == y.len() && x.iter().zip(y).all(|(a, b)| (a - b).abs() <= eps)
        }
        (CanonicalData::Ghz { d: x, gamma: gx }, CanonicalData::Ghz { d: y, gamma: gy }) => {
            x.len() == y.len()
                && (gx - gy).abs() <= eps
                && x.iter().zip(y).all(|(a, b)| (a - b).abs() <= eps)
        }
        (CanonicalData::Dicke { b: x }, CanonicalData::Dicke { b: y }) => {
            x.len() == y.len()
                && x.iter().zip(y.iter()).all(|((ka, va), (kb, vb))| {
                    ka == kb && (va - vb).abs() <= eps
                })
        }
        _ => false,
    }
}

fn data_scale(data: &CanonicalData) -> f64 {
    match data {
        CanonicalData::FullLG => 1.0,
        CanonicalData::Werner { c } | CanonicalData::Product { c } => linf(c),
        CanonicalData::Ghz { d, gamma } => linf(d).max(*gamma),
        CanonicalData::Dicke { b } => map_linf(b),
    }
}

pub fn lu_equivalent(
    rho: &PauliOperator,
    rho2: &PauliOperator,
    tol: &Tolerances,
) -> Result<EquivOutcome> {
    let class1 = classify(rho, tol)?;
    let class2 = classify(rho2, tol)?;
    if class1.tag == ClassTag::Zero || class2.tag == ClassTag::Zero {
        return Ok(EquivOutcome::Unknown);
    }
    if class1.tag != class2.tag {
        // At n = 2 a one-sided bit flip carries the b_{1,0} = 0 Dicke family
        // onto the GHZ family, so these two tags can meet.
        let n = rho.n();
        if n == 2 && rho2.n() == 2 {
            match (class1.tag, class2.tag) {
                (ClassTag::Dicke, ClassTag::Ghz) => {
                    return match bridged_witness(rho, &class1, rho2, &class2, tol)? {
                        Some(w) => finish_witness(w, rho, rho2, tol),
                        None => Ok(EquivOutcome::Inequivalent),
                    };
                }
                (ClassTag::Ghz, ClassTag::Dicke) => {
                    return match bridged_witness(rho2, &class2, rho, &class1, tol)? {
                        Some(w) => finish_witness(w.adjoint(), rho, rho2, tol),
                        None => Ok(EquivOutcome::Inequivalent),
                    };
                }
                _ => {}
            }
        }
        return Ok(EquivOutcome::Inequivalent);
    }
    let form1 = canonicalize(rho, &class1, tol)?;
    let form2 = canonicalize(rho2, &class2, tol)?;
    let eps = cmp_eps(tol, data_scale(&form1.data).max(data_scale(&form2.data)));
    if data_close(&form1.data, &form2.data, eps) {
        let w = form2.transformer.adjoint().compose(&form1.transformer);
        return finish_witness(w, rho, rho2, tol);
    }
    if let Some(tw) = twin_of(&form1.data) {
        if data_close(&tw, &form2.data, eps) {
            let n = rho.n();
            let w = form2
                .transformer
                .adjoint()
                .compose(&LocalUnitary::ix_all(n).compose(&form1.transformer));
            return finish_witness(w, rho, rho2, tol);
        }
    }
    Ok(EquivOutcome::Inequivalent)
}

/// Witness carrying the two-qubit Dicke state onto the GHZ-tagged state,
/// when their data meet across the bit-flip bridge.
fn bridged_witness(
    rho_d: &PauliOperator,
    class_d: &Classification,
    rho_g: &PauliOperator,
    class_g: &Classification,
    tol: &Tolerances,
) -> Result<Option<LocalUnitary>> {
    let form_d = canonicalize(rho_d, class_d, tol)?;
    let CanonicalData::Dicke { b } = &form_d.data else {
        return Ok(None);
    };
    let eps = cmp_eps(tol, map_linf(b));
    if b.get(&(1, 0)).is_some_and(|v| v.abs() > eps) {
        return Ok(None);
    }
    let bridge = one_sided_ix(2).compose(&form_d.transformer);
    let crossed = bridge.conjugate(rho_d)?;
    let class_crossed = classify(&crossed, tol)?;
    if class_crossed.tag != ClassTag::Ghz {
        return Ok(None);
    }
    let form_crossed = canonicalize(&crossed, &class_crossed, tol)?;
    let form_g = canonicalize(rho_g, class_g, tol)?;
    let total_d = form_crossed.transformer.compose(&bridge);
    let eps = cmp_eps(tol, data_scale(&form_crossed.data).max(data_scale(&form_g.data)));
    if data_close(&form_crossed.data, &form_g.data, eps) {
        return Ok(Some(form_g.transformer.adjoint().compose(&total_d)));
    }
    if let Some(tw) = twin_of(&form_crossed.data) {
        if data_close(&tw, &form_g.data, eps) {
            let w = form_g
                .transformer
                .adjoint()
                .compose(&LocalUnitary::ix_all(2).compose(&total_d));
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn finish_witness(
    w: LocalUnitary,
    rho: &PauliOperator,
    rho2: &PauliOperator,
    tol: &Tolerances,
) -> Result<EquivOutcome> {
    let w = w.sign_normalized();
    let moved = w.conjugate(rho)?;
    let residual = moved.linf_diff(rho2);
    if residual > SIGN_SCALE * tol.num * (1.0 + rho2.max_abs()) {
        return Err(Error::WitnessVerification { residual });
    }
    Ok(EquivOutcome::Equivalent(w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorForm {
    Diagonal,
    Antidiagonal,
    Generic,
}

#[derive(Clone, Debug)]
pub struct FactorCheck {
    pub form: FactorForm,
    /// Sign of g A g^dagger = +-A; 0 when generic.
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct DiagAntidiagReport {
    pub factors: Vec<FactorCheck>,
    /// True when the class has a diagonal standard stabilizer and every
    /// factor is diagonal or antidiagonal.
    pub normalizes: bool,
}

/// Normalizer check for the diagonal-stabilizer classes: each factor of a
/// normalizing unitary must be diagonal or antidiagonal.
pub fn check_diag_antidiag(
    g: &LocalUnitary,
    tag: ClassTag,
    tol: &Tolerances,
) -> DiagAntidiagReport {
    let applicable = matches!(tag, ClassTag::Product | ClassTag::Ghz | ClassTag::Dicke);
    let factors: Vec<FactorCheck> = g
        .factors()
        .iter()
        .map(|f| {
            if f.is_diagonal(tol.unit) {
                FactorCheck { form: FactorForm::Diagonal, sign: 1 }
            } else if f.is_antidiagonal(tol.unit) {
                FactorCheck { form: FactorForm::Antidiagonal, sign: -1 }
            } else {
                FactorCheck { form: FactorForm::Generic, sign: 0 }
            }
        })
        .collect();
    let normalizes = applicable && factors.iter().all(|f| f.form != FactorForm::Generic);
    DiagAntidiagReport { factors, normalizes }
}
