//! End-to-end classifier invariants: tag invariance under conjugation,
//! completeness and soundness of the equivalence decision on generated
//! pairs, idempotence of the canonical form, sector structure of corner
//! mixtures, and the closed-form dimension count for the two-qubit
//! diagonal family.

mod common;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use lustab::classify::{
    canonical_form, classify, data_close, lu_equivalent, CanonicalData, ClassTag, EquivOutcome,
};
use lustab::pauli::{PauliIndex, PauliOperator};
use lustab::stabilizer::{projection_dim, stabilizer_basis};
use lustab::states;
use lustab::{Complex64, Tolerances};

const WITNESS_EPS_SCALE: f64 = 10.0;
const PERTURBATION: f64 = 1e-3;

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        -v
    } else {
        v
    }
}

/// Random member of the radial family: guaranteed tag Werner.
fn random_werner(n: usize, rng: &mut ChaCha8Rng) -> (PauliOperator, Vec<f64>) {
    let kmax = n / 2;
    let mut c = vec![0.0; kmax + 1];
    c[0] = 1.0 / (1u64 << n) as f64;
    for ck in c.iter_mut().skip(1) {
        *ck = signed(rng, 0.01, 0.04);
    }
    let mut rho = PauliOperator::new(n);
    for (k, &ck) in c.iter().enumerate() {
        rho.add_scaled(ck, &states::werner_basis(n, k).unwrap()).unwrap();
    }
    (rho, c)
}

/// Random diagonal (z-polynomial) state: guaranteed tag Product.
fn random_product(n: usize, rng: &mut ChaCha8Rng) -> (PauliOperator, Vec<f64>) {
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0 / (1u64 << n) as f64;
    for ck in c.iter_mut().skip(1) {
        *ck = signed(rng, 0.01, 0.03);
    }
    let mut rho = PauliOperator::new(n);
    for (k, &ck) in c.iter().enumerate() {
        rho.add_scaled(ck, &states::product_basis(n, k).unwrap()).unwrap();
    }
    (rho, c)
}

/// Random member of the z / transverse-radius family with a genuine
/// transverse term and no radial coincidence: guaranteed tag Dicke.
fn random_dicke_family(
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (PauliOperator, BTreeMap<(usize, usize), f64>) {
    let mut b = BTreeMap::new();
    for r in 0..=n {
        for s in 0..=(n - r) / 2 {
            b.insert((r, s), 0.0);
        }
    }
    b.insert((0, 0), 1.0 / (1u64 << n) as f64);
    let b01 = signed(rng, 0.01, 0.03);
    b.insert((0, 1), b01);
    // Keep the pure-z quadratic away from b01 so the polynomial is not a
    // function of the full radius alone.
    if n >= 2 {
        b.insert((2, 0), b01 + signed(rng, 0.005, 0.02));
    }
    b.insert((1, 0), signed(rng, 0.01, 0.03));
    let mut rho = PauliOperator::new(n);
    for (&(r, s), &v) in &b {
        if v != 0.0 {
            rho.add_scaled(v, &states::dicke_basis(n, r, s).unwrap()).unwrap();
        }
    }
    (rho, b)
}

/// Random corner mixture with a safely nonzero corner and sector sums that
/// stay away from their own reversal: guaranteed tag GHZ for n >= 3.
fn random_ghz_family(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    loop {
        let mut c: Vec<f64> = (0..=n).map(|_| rng.random_range(0.05..1.0)).collect();
        let d = rng.random_range(0.3..0.7);
        let total: f64 = c.iter().sum();
        for ck in c.iter_mut() {
            *ck *= (1.0 - d) / total;
        }
        if (c[1] - c[n - 1]).abs() < 0.01 {
            continue;
        }
        let theta: f64 = rng.random_range(0.4..1.1);
        let phase_a = rng.random_range(0.0..std::f64::consts::TAU);
        let phase_b = rng.random_range(0.0..std::f64::consts::TAU);
        let alpha = Complex64::from_polar(theta.cos(), phase_a);
        let beta = Complex64::from_polar(theta.sin(), phase_b);
        return states::ghz_mixture(n, &c, d, alpha, beta).unwrap();
    }
}

fn rebuild(n: usize, data: &CanonicalData) -> PauliOperator {
    let mut rho = PauliOperator::new(n);
    match data {
        CanonicalData::FullLG => rho = states::completely_mixed(n),
        CanonicalData::Werner { c } => {
            for (k, &ck) in c.iter().enumerate() {
                rho.add_scaled(ck, &states::werner_basis(n, k).unwrap()).unwrap();
            }
        }
        CanonicalData::Product { c } => {
            for (k, &ck) in c.iter().enumerate() {
                rho.add_scaled(ck, &states::product_basis(n, k).unwrap()).unwrap();
            }
        }
        CanonicalData::Dicke { b } => {
            for (&(r, s), &v) in b {
                rho.add_scaled(v, &states::dicke_basis(n, r, s).unwrap()).unwrap();
            }
        }
        CanonicalData::Ghz { d, gamma } => {
            for (k, &dk) in d.iter().enumerate() {
                rho.add_scaled(dk, &states::dicke_rho(n, k).unwrap()).unwrap();
            }
            rho.add_scaled(*gamma, &states::ghz_corner(n)).unwrap();
        }
    }
    rho
}

fn assert_equivalent_with_verified_witness(
    rho: &PauliOperator,
    moved: &PauliOperator,
    tol: &Tolerances,
) {
    match lu_equivalent(rho, moved, tol).unwrap() {
        EquivOutcome::Equivalent(w) => {
            let image = w.conjugate(rho).unwrap();
            let defect = image.linf_diff(moved);
            let limit = WITNESS_EPS_SCALE * tol.num * (1.0 + moved.max_abs());
            assert!(defect <= limit, "witness defect {defect} above {limit}");
        }
        other => panic!("expected Equivalent, got {other:?}"),
    }
}

fn assert_inequivalent(rho: &PauliOperator, other: &PauliOperator, tol: &Tolerances) {
    match lu_equivalent(rho, other, tol).unwrap() {
        EquivOutcome::Inequivalent => {}
        other => panic!("expected Inequivalent, got {other:?}"),
    }
}

/// Moving a state by h^{x n} and comparing against the original must come
/// back Equivalent with a verified witness; perturbing one canonical
/// coefficient well past the decision threshold (and away from the twin)
/// must come back Inequivalent. 200 pairs per class.
#[test]
fn equivalence_decision_is_complete_on_generated_pairs() {
    let tol = common::tol();
    let mut rng = common::rng(0x5eed_1001);

    for trial in 0..200 {
        let n = 2 + trial % 4;

        let (werner, mut wc) = random_werner(n, &mut rng);
        let h = common::random_uniform_unitary(n, &mut rng);
        assert_equivalent_with_verified_witness(&werner, &h.conjugate(&werner).unwrap(), &tol);
        wc[1] += PERTURBATION;
        assert_inequivalent(&werner, &rebuild(n, &CanonicalData::Werner { c: wc }), &tol);

        let (product, mut pc) = random_product(n, &mut rng);
        let h = common::random_uniform_unitary(n, &mut rng);
        assert_equivalent_with_verified_witness(&product, &h.conjugate(&product).unwrap(), &tol);
        pc[1] += PERTURBATION * pc[1].signum();
        assert_inequivalent(&product, &rebuild(n, &CanonicalData::Product { c: pc }), &tol);

        let (dicke, mut db) = random_dicke_family(n, &mut rng);
        let h = common::random_uniform_unitary(n, &mut rng);
        assert_equivalent_with_verified_witness(&dicke, &h.conjugate(&dicke).unwrap(), &tol);
        let d10 = db[&(1, 0)];
        db.insert((1, 0), d10 + PERTURBATION * d10.signum());
        assert_inequivalent(&dicke, &rebuild(n, &CanonicalData::Dicke { b: db }), &tol);

        let n_ghz = 3 + trial % 3;
        let ghz = random_ghz_family(n_ghz, &mut rng);
        let h = common::random_uniform_unitary(n_ghz, &mut rng);
        assert_equivalent_with_verified_witness(&ghz, &h.conjugate(&ghz).unwrap(), &tol);
        let form = canonical_form(&ghz, &tol).unwrap();
        let CanonicalData::Ghz { mut d, gamma } = form.data else {
            panic!("corner mixture did not canonicalize in the corner class");
        };
        d[1] += PERTURBATION;
        assert_inequivalent(&ghz, &rebuild(n_ghz, &CanonicalData::Ghz { d, gamma }), &tol);
    }

    for n in 2..=5 {
        let mixed = states::completely_mixed(n);
        let h = common::random_uniform_unitary(n, &mut rng);
        assert_equivalent_with_verified_witness(&mixed, &h.conjugate(&mixed).unwrap(), &tol);
        let mut bumped = mixed.clone();
        bumped
            .add_scaled(PERTURBATION, &states::product_basis(n, 1).unwrap())
            .unwrap();
        assert_inequivalent(&mixed, &bumped, &tol);
    }
}

/// Rebuilding the representative from its own canonical coefficients and
/// canonicalizing again returns the identical data.
#[test]
fn canonical_form_is_idempotent_on_rebuilt_representatives() {
    let tol = common::tol();
    let mut rng = common::rng(0x5eed_1002);

    for trial in 0..60 {
        let n = 2 + trial % 4;
        let mut pool: Vec<PauliOperator> = vec![
            random_werner(n, &mut rng).0,
            random_product(n, &mut rng).0,
            random_dicke_family(n, &mut rng).0,
            states::completely_mixed(n),
        ];
        if n >= 3 {
            pool.push(random_ghz_family(n, &mut rng));
        }
        for rho in pool {
            let form = canonical_form(&rho, &tol).unwrap();
            let again = canonical_form(&rebuild(n, &form.data), &tol).unwrap();
            assert_eq!(form.tag, again.tag);
            let eps = 10.0 * tol.num * (1.0 + rho.max_abs());
            assert!(
                data_close(&form.data, &again.data, eps),
                "tag {} data drifted on rebuild", form.tag
            );
        }
    }
}

/// Corner mixtures are diagonal except for the two extreme corner entries.
#[test]
fn corner_mixtures_have_no_stray_off_diagonals() {
    let tol = common::tol();
    let mut rng = common::rng(0x5eed_1003);
    for trial in 0..40 {
        let n = 3 + trial % 3;
        let rho = random_ghz_family(n, &mut rng);
        let dense = rho.to_dense().unwrap();
        let dim = 1usize << n;
        for r in 0..dim {
            for c in 0..dim {
                if r == c || (r == 0 && c == dim - 1) || (r == dim - 1 && c == 0) {
                    continue;
                }
                assert!(
                    dense.mat[(r, c)].norm() < tol.num,
                    "stray entry at ({r},{c}) for n={n}"
                );
            }
        }
        // The classifier's reconstruction must agree with the builder.
        let form = canonical_form(&rho, &tol).unwrap();
        assert!(form.residual < 10.0 * tol.num * (1.0 + rho.max_abs()));
    }
}

fn pair_dim(p: f64, q: f64) -> usize {
    if p == 0.0 && q == 0.0 {
        2
    } else if p.abs() == q.abs() {
        1
    } else {
        0
    }
}

/// Two-qubit diagonal family 1/4 (Id + a xx + b yy + c zz): the stabilizer
/// splits into three independent component pairs, each contributing 2, 1,
/// or 0 dimensions by coefficient degeneracy. z-components couple through
/// (a,b), y through (a,c), x through (b,c).
#[test]
fn diagonal_two_qubit_family_matches_pair_count() {
    let tol = common::tol();
    let grid = [-0.6, -0.3, 0.0, 0.3, 0.6];
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let mut rho = PauliOperator::new(2);
                rho.set(PauliIndex::from_digits(&[0, 0]), 0.25);
                rho.set(PauliIndex::from_digits(&[1, 1]), 0.25 * a);
                rho.set(PauliIndex::from_digits(&[2, 2]), 0.25 * b);
                rho.set(PauliIndex::from_digits(&[3, 3]), 0.25 * c);
                let predicted = pair_dim(a, b) + pair_dim(a, c) + pair_dim(b, c);
                let (basis, _) = stabilizer_basis(&rho, &tol).unwrap();
                assert_eq!(
                    basis.dim(),
                    predicted,
                    "dimension mismatch at a={a} b={b} c={c}"
                );
            }
        }
    }
}

fn tag_group(n: usize, d: usize, p: usize) -> &'static str {
    match (p, d) {
        (_, 0) => "zero",
        (3, d) if d == 3 * n => "full",
        (3, 3) => "werner",
        (1, d) if d == n => "product",
        (1, d) if n >= 3 && d == n - 1 => "ghz",
        (1, 1) if n >= 3 => "dicke",
        (1, 1) => "ghz-or-dicke",
        _ => "other",
    }
}

fn group_of_tag(n: usize, tag: ClassTag) -> &'static str {
    match tag {
        ClassTag::Zero => "zero",
        ClassTag::FullLG => "full",
        ClassTag::Werner => "werner",
        ClassTag::Product => "product",
        ClassTag::Ghz if n == 2 => "ghz-or-dicke",
        ClassTag::Dicke if n == 2 => "ghz-or-dicke",
        ClassTag::Ghz => "ghz",
        ClassTag::Dicke => "dicke",
    }
}

/// The class tag is conjugation-invariant: exactly under uniform
/// conjugation, and at the level of the (d, p) table under arbitrary local
/// unitaries (which may break permutation symmetry, so the tag is read off
/// the dimension data directly). At n = 2 the two d = 1 classes merge
/// under general conjugation and are compared as one group.
#[test]
fn class_tag_is_invariant_under_conjugation() {
    let tol = common::tol();
    let mut rng = common::rng(0x5eed_1004);
    for n in 2..=5 {
        for _ in 0..25 {
            let rho = common::random_symmetric_state(n, &mut rng);
            let class = classify(&rho, &tol).unwrap();

            let h = common::random_uniform_unitary(n, &mut rng);
            let moved = h.conjugate(&rho).unwrap();
            assert_eq!(classify(&moved, &tol).unwrap().tag, class.tag);

            let g = common::random_local_unitary(n, &mut rng);
            let moved = g.conjugate(&rho).unwrap();
            let (basis, _) = stabilizer_basis(&moved, &tol).unwrap();
            assert_eq!(basis.dim(), class.dim());
            let p0 = projection_dim(&basis, 0, &tol).unwrap();
            for q in 1..n {
                assert_eq!(projection_dim(&basis, q, &tol).unwrap(), p0);
            }
            assert_eq!(p0, class.proj);
            assert_eq!(tag_group(n, basis.dim(), p0), group_of_tag(n, class.tag));
        }
    }
}
