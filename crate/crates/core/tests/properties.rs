//! Randomized algebraic laws. Each property states an exact identity of the
//! underlying math; the tolerances only absorb floating-point rounding.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use lustab::classify::{data_close, twin_of, CanonicalData};
use lustab::pauli::{DenseHermitian, PauliIndex, PauliOperator};
use lustab::su2::{
    ad_action, commutator, phi, LocalAlgebraElement, LocalUnitary, Su2, Unitary2,
};
use lustab::sympoly::{f_n, f_n_inv, r_g, symmetrize, symmetry_spread};

fn op_from_terms(n: usize, terms: &[(Vec<u8>, f64)]) -> PauliOperator {
    let mut op = PauliOperator::new(n);
    for (digits, c) in terms {
        op.add_term(PauliIndex::from_digits(digits), *c);
    }
    op
}

fn element_from_coords(coords: &[(f64, f64, f64)]) -> LocalAlgebraElement {
    LocalAlgebraElement::from_parts(
        coords.iter().map(|&(a, b, c)| Su2::new(a, b, c)).collect(),
    )
}

fn unitary_from_raw(a: f64, b: f64, c: f64, t: f64) -> Unitary2 {
    let m = Su2::new(a, b, c);
    if m.coord_norm() < 0.05 {
        Unitary2::identity()
    } else {
        m.exp(t)
    }
}

prop_compose! {
    fn arb_terms(n: usize)(
        terms in prop::collection::vec(
            (prop::collection::vec(0u8..4, n), -2.0f64..2.0),
            1..8,
        )
    ) -> Vec<(Vec<u8>, f64)> {
        terms
    }
}

prop_compose! {
    fn arb_parts(n: usize)(
        coords in prop::collection::vec(
            (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
            n..=n,
        )
    ) -> Vec<(f64, f64, f64)> {
        coords
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric(
        n in 1usize..=4,
        seed_x in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
        seed_y in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let x = element_from_coords(&seed_x[..n]);
        let y = element_from_coords(&seed_y[..n]);
        let lhs = x.bracket(&y);
        let rhs = y.bracket(&x).scale(-1.0);
        prop_assert!(lhs.sub(&rhs).global_norm() < 1e-12);
    }

    #[test]
    fn bracket_is_bilinear(
        n in 1usize..=4,
        alpha in -2.0f64..2.0,
        seed_x in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
        seed_y in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
        seed_z in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let x = element_from_coords(&seed_x[..n]);
        let y = element_from_coords(&seed_y[..n]);
        let z = element_from_coords(&seed_z[..n]);
        let lhs = x.bracket(&y.add_scaled(alpha, &z));
        let rhs = x.bracket(&y).add_scaled(alpha, &x.bracket(&z));
        prop_assert!(lhs.sub(&rhs).global_norm() < 1e-11);
    }

    #[test]
    fn jacobi_identity_holds(
        n in 1usize..=4,
        seed_x in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
        seed_y in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
        seed_z in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let x = element_from_coords(&seed_x[..n]);
        let y = element_from_coords(&seed_y[..n]);
        let z = element_from_coords(&seed_z[..n]);
        let total = x
            .bracket(&y)
            .bracket(&z)
            .add_scaled(1.0, &y.bracket(&z).bracket(&x))
            .add_scaled(1.0, &z.bracket(&x).bracket(&y));
        prop_assert!(total.global_norm() < 1e-10);
    }

    #[test]
    fn exp_is_additive_along_one_ray(
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        c in -1.0f64..1.0,
        s in -2.0f64..2.0,
        t in -2.0f64..2.0,
    ) {
        let m = Su2::new(a, b, c);
        let lhs = m.exp(s).mul(&m.exp(t)).matrix();
        let rhs = m.exp(s + t).matrix();
        let diff = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn phi_is_a_rotation_homomorphism(
        g_seed in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -3.0f64..3.0),
        h_seed in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -3.0f64..3.0),
    ) {
        let g = unitary_from_raw(g_seed.0, g_seed.1, g_seed.2, g_seed.3);
        let h = unitary_from_raw(h_seed.0, h_seed.1, h_seed.2, h_seed.3);
        let lhs = phi(&g.mul(&h));
        let rhs = phi(&g) * phi(&h);
        prop_assert!((lhs - rhs).abs().max() < 1e-12);
        let r = phi(&g);
        prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn twin_is_an_involution(
        c in prop::collection::vec(-1.0f64..1.0, 2..6),
        d in prop::collection::vec(0.0f64..1.0, 3..6),
        gamma in 0.0f64..0.5,
        b_vals in prop::collection::vec(((0usize..4, 0usize..3), -1.0f64..1.0), 1..6),
    ) {
        let product = CanonicalData::Product { c: c.clone() };
        let twice = twin_of(&twin_of(&product).unwrap()).unwrap();
        prop_assert!(data_close(&product, &twice, 0.0));

        let ghz = CanonicalData::Ghz { d: d.clone(), gamma };
        let twice = twin_of(&twin_of(&ghz).unwrap()).unwrap();
        prop_assert!(data_close(&ghz, &twice, 0.0));

        let mut b = BTreeMap::new();
        for ((r, s), v) in &b_vals {
            b.insert((*r, *s), *v);
        }
        let dicke = CanonicalData::Dicke { b };
        let twice = twin_of(&twin_of(&dicke).unwrap()).unwrap();
        prop_assert!(data_close(&dicke, &twice, 0.0));

        let werner = CanonicalData::Werner { c };
        prop_assert!(twin_of(&CanonicalData::FullLG).is_none());
        prop_assert!(twin_of(&werner).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dense_round_trip_preserves_coefficients(
        (n, terms) in (1usize..=3).prop_flat_map(|n| (Just(n), arb_terms(n))),
    ) {
        let tol = common::tol();
        let op = op_from_terms(n, &terms);
        let dense = op.to_dense().unwrap();
        let back = PauliOperator::from_dense(&dense, &tol).unwrap();
        prop_assert!(op.linf_diff(&back) < 1e-12);
    }

    #[test]
    fn polynomial_round_trip_is_identity(
        (n, terms) in (1usize..=5).prop_flat_map(|n| (Just(n), arb_terms(n))),
    ) {
        let tol = common::tol();
        let rho = symmetrize(&op_from_terms(n, &terms));
        let poly = f_n(&rho, &tol).unwrap();
        prop_assert!(poly.degree() <= n);
        let back = f_n_inv(&poly, n).unwrap();
        prop_assert!(rho.linf_diff(&back) < 1e-10);
    }

    #[test]
    fn symmetrize_is_an_idempotent_projection(
        (n, terms) in (1usize..=4).prop_flat_map(|n| (Just(n), arb_terms(n))),
    ) {
        let op = op_from_terms(n, &terms);
        let sym = symmetrize(&op);
        prop_assert!(symmetry_spread(&sym) < 1e-13);
        prop_assert!(sym.linf_diff(&symmetrize(&sym)) < 1e-13);
    }

    #[test]
    fn sparse_bracket_action_matches_dense_commutator(
        (n, terms, coords) in (1usize..=3)
            .prop_flat_map(|n| (Just(n), arb_terms(n), arb_parts(n))),
    ) {
        let tol = common::tol();
        let rho = op_from_terms(n, &terms);
        let m = element_from_coords(&coords);
        let sparse = ad_action(&m, &rho).unwrap();
        let comm = commutator(&m.dense().unwrap(), &rho.to_dense().unwrap().mat);
        let dense = PauliOperator::from_dense(&DenseHermitian::new(n, comm).unwrap(), &tol)
            .unwrap();
        prop_assert!(sparse.linf_diff(&dense) < 1e-11);
    }

    #[test]
    fn polynomial_diagram_commutes_with_uniform_rotations(
        (n, terms) in (1usize..=4).prop_flat_map(|n| (Just(n), arb_terms(n))),
        g_seed in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -3.0f64..3.0),
    ) {
        let tol = common::tol();
        let rho = symmetrize(&op_from_terms(n, &terms));
        let g = unitary_from_raw(g_seed.0, g_seed.1, g_seed.2, g_seed.3);
        let moved = LocalUnitary::uniform(g, n).conjugate(&rho).unwrap();
        let lhs = f_n(&moved, &tol).unwrap();
        let rhs = r_g(&g, &f_n(&rho, &tol).unwrap());
        prop_assert!(lhs.linf_diff(&rhs) < 1e-9);
    }
}
