//! Shared generators and oracles for the integration suites.

#![allow(dead_code)]

use lustab::pauli::{PauliIndex, PauliOperator};
use lustab::stabilizer::AlgebraBasis;
use lustab::su2::{LocalAlgebraElement, LocalUnitary, Su2, Unitary2};
use lustab::sympoly::symmetrize;
use lustab::{states, Tolerances};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn random_su2(rng: &mut ChaCha8Rng) -> Su2 {
    loop {
        let m = Su2::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if m.coord_norm() > 0.1 {
            return m;
        }
    }
}

pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Unitary2 {
    let axis = random_su2(rng);
    let axis = axis.scale(1.0 / axis.coord_norm());
    axis.exp(rng.random_range(-3.0..3.0))
}

pub fn random_local_unitary(n: usize, rng: &mut ChaCha8Rng) -> LocalUnitary {
    LocalUnitary::from_factors((0..n).map(|_| random_unitary2(rng)).collect())
}

pub fn random_uniform_unitary(n: usize, rng: &mut ChaCha8Rng) -> LocalUnitary {
    LocalUnitary::uniform(random_unitary2(rng), n)
}

/// Small permutation-invariant noise on a handful of random orbits.
pub fn random_symmetric_noise(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut raw = PauliOperator::new(n);
    for _ in 0..4 {
        let digits: Vec<u8> = (0..n).map(|_| rng.random_range(0..4u8)).collect();
        raw.set(
            PauliIndex::from_digits(&digits),
            rng.random_range(-scale..scale),
        );
    }
    symmetrize(&raw)
}

/// Random symmetric state drawn from the preset families, their uniform
/// conjugates, and noise-dominated states with trivial stabilizer.
pub fn random_symmetric_state(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    let variant = rng.random_range(0..7u8);
    let base = match variant {
        0 => {
            let mut rho = states::completely_mixed(n);
            for k in 1..=n / 2 {
                rho = rho
                    .add(&states::werner_basis(n, k).unwrap().scale(rng.random_range(-0.02..0.02)))
                    .unwrap();
            }
            rho
        }
        1 => {
            let mut c: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..1.0)).collect();
            let d = rng.random_range(0.1..1.0);
            let total: f64 = c.iter().sum::<f64>() + d;
            c.iter_mut().for_each(|w| *w /= total);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let a = rng.random_range(0.3..0.9f64);
            let alpha = lustab::Complex64::new(a.sqrt(), 0.0);
            let beta = lustab::Complex64::from_polar((1.0 - a).sqrt(), phase);
            states::ghz_mixture(n, &c, d / total, alpha, beta).unwrap()
        }
        2 => {
            let mut rho = states::completely_mixed(n);
            for k in 1..=n {
                rho = rho
                    .add(&states::product_basis(n, k).unwrap().scale(rng.random_range(-0.02..0.02)))
                    .unwrap();
            }
            rho
        }
        3 => {
            let mut rho = states::completely_mixed(n);
            for r in 0..=n {
                for s in 0..=(n - r) / 2 {
                    if r + s == 0 {
                        continue;
                    }
                    rho = rho
                        .add(
                            &states::dicke_basis(n, r, s)
                                .unwrap()
                                .scale(rng.random_range(-0.01..0.01)),
                        )
                        .unwrap();
                }
            }
            rho
        }
        4 => states::dicke_pure(n, rng.random_range(0..=n)).unwrap(),
        5 => {
            let a = rng.random_range(0.2..0.8f64);
            let alpha = lustab::Complex64::new(a.sqrt(), 0.0);
            let beta = lustab::Complex64::new((1.0 - a).sqrt(), 0.0);
            states::ghz_rho(n, alpha, beta).unwrap()
        }
        _ => states::completely_mixed(n)
            .add(&random_symmetric_noise(n, 0.01, rng))
            .unwrap(),
    };
    if rng.random_bool(0.5) {
        random_uniform_unitary(n, rng).conjugate(&base).unwrap()
    } else {
        base
    }
}

/// Ground truth for a synthetic direct sum: block qubit sets, abelian
/// element supports, untouched qubits.
pub struct SyntheticAlgebra {
    pub basis: AlgebraBasis,
    pub blocks: Vec<Vec<usize>>,
    pub s_supports: Vec<Vec<usize>>,
    pub r_qubits: Vec<usize>,
}

/// Random direct sum of diagonal blocks, abelian summands, and trivial
/// qubits, conjugated by a random local unitary and re-mixed inside each
/// invariant subspace.
pub fn random_partitioned_algebra(n: usize, rng: &mut ChaCha8Rng) -> SyntheticAlgebra {
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut s_supports: Vec<Vec<usize>> = Vec::new();
    let mut r_qubits: Vec<usize> = Vec::new();
    let mut rest = qubits.as_slice();
    while !rest.is_empty() {
        let take = rng.random_range(1..=rest.len().min(3));
        let (group, tail) = rest.split_at(take);
        rest = tail;
        let mut group: Vec<usize> = group.to_vec();
        group.sort_unstable();
        match rng.random_range(0..3u8) {
            0 => blocks.push(group),
            1 => s_supports.push(group),
            _ => r_qubits.extend(group),
        }
    }
    r_qubits.sort_unstable();

    let mut elements: Vec<LocalAlgebraElement> = Vec::new();
    for b in &blocks {
        let f = 0.5 / (b.len() as f64).sqrt();
        for axis in [Su2::axis_a(), Su2::axis_b(), Su2::axis_c()] {
            let mut e = LocalAlgebraElement::zero(n);
            for &q in b {
                e.set_part(q, axis.scale(f));
            }
            elements.push(e);
        }
    }
    for s in &s_supports {
        let mut e = LocalAlgebraElement::zero(n);
        let weights: Vec<f64> = s.iter().map(|_| rng.random_range(0.3..1.0)).collect();
        let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        for (&q, w) in s.iter().zip(&weights) {
            e.set_part(q, Su2::axis_a().scale(0.5 * w / norm));
        }
        elements.push(e);
    }

    let g = random_local_unitary(n, rng);
    let mut elements: Vec<LocalAlgebraElement> =
        elements.iter().map(|e| g.conjugate_algebra(e)).collect();

    // Re-mix inside the span with a random orthogonal matrix (QR of a
    // Gaussian-ish sample) so the basis does not advertise the split.
    let d = elements.len();
    if d > 1 {
        let raw = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let qr = raw.qr();
        let q = qr.q();
        let mixed: Vec<LocalAlgebraElement> = (0..d)
            .map(|j| {
                let mut out = LocalAlgebraElement::zero(n);
                for (i, e) in elements.iter().enumerate() {
                    out = out.add_scaled(q[(i, j)], e);
                }
                out
            })
            .collect();
        elements = mixed;
    }

    blocks.sort_by_key(|b| b[0]);
    s_supports.sort_by_key(|s| s[0]);
    let basis = AlgebraBasis::from_elements(n, elements, &tol()).unwrap();
    SyntheticAlgebra { basis, blocks, s_supports, r_qubits }
}

/// Minimal-weight oracle: the smallest qubit set T containing i that
/// supports a nonzero element of K with nonzero i-part. Exhaustive over
/// subsets, so only suitable for small n.
pub fn minimal_support_through(
    k: &AlgebraBasis,
    i: usize,
    tol: &Tolerances,
) -> Option<Vec<usize>> {
    let n = k.n();
    let d = k.dim();
    if d == 0 {
        return None;
    }
    let mut subsets: Vec<Vec<usize>> = (0..(1u32 << n))
        .filter(|mask| mask & (1 << i) != 0)
        .map(|mask| (0..n).filter(|q| mask & (1 << q) != 0).collect())
        .collect();
    subsets.sort_by_key(|t| (t.len(), t.clone()));
    for t in subsets {
        let outside: Vec<usize> = (0..n).filter(|q| !t.contains(q)).collect();
        // Coefficient vectors whose parts vanish outside T.
        let rows = 3 * outside.len();
        let mut mat = DMatrix::<f64>::zeros(rows.max(d), d);
        for (j, e) in k.elements().iter().enumerate() {
            for (r, &q) in outside.iter().enumerate() {
                let p = e.part(q);
                mat[(3 * r, j)] = p.a;
                mat[(3 * r + 1, j)] = p.b;
                mat[(3 * r + 2, j)] = p.c;
            }
        }
        let svd = mat.svd(false, true);
        let v_t = svd.v_t.unwrap();
        let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
        let cut = tol.rank_rel * smax.max(1.0);
        let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
        for r in rank..d {
            let coords: Vec<f64> = (0..d).map(|c| v_t[(r, c)]).collect();
            let m = k.combine(&coords);
            if m.part(i).coord_norm() > 1e-7 {
                return Some(t);
            }
        }
    }
    None
}
