mod common;

use common::*;
use lnd_core::derivation::{monomials_up_to, Derivation};
use lnd_core::linalg::rank;
use lnd_core::poly::{Monomial, Polynomial, Var, WeightVector};
use lnd_core::{QDerivation, Q};
use proptest::prelude::*;

fn kuroda(n: usize) -> QDerivation {
    Derivation::kuroda(n).unwrap()
}

proptest! {
    #[test]
    fn leibniz(a in poly(ring(4), 4, 5), b in poly(ring(4), 4, 5)) {
        let d = kuroda(4);
        let lhs = d.apply(&(&a * &b)).unwrap();
        let rhs = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn linearity(a in poly(ring(5), 4, 5), b in poly(ring(5), 4, 5), c in -6i64..=6) {
        let d = kuroda(5);
        let lhs = d.apply(&(&a.scale(&q(c)) + &b)).unwrap();
        let rhs = &d.apply(&a).unwrap().scale(&q(c)) + &d.apply(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn preserves_weight_and_lowers_y_degree(n in 2usize..=5, seed in prop::collection::vec(0u32..4, 11)) {
        let rs = ring(n);
        let m = Monomial::from_exps(&seed[..2 * n + 1]);
        let img = kuroda(n).apply(&Polynomial::term(rs, m.clone(), q(1))).unwrap();
        let mut w = vec![1i64; n];
        w.extend(std::iter::repeat_n(2, n));
        w.push(n as i64);
        let w = WeightVector::new(rs, w).unwrap();
        if img.is_zero() {
            prop_assert_eq!(m.y_degree(), 0);
        } else {
            prop_assert_eq!(img.is_homogeneous(&w), Some(w.weight(&m)));
            prop_assert!(img.monomials().all(|t| t.y_degree() + 1 == m.y_degree()));
        }
    }

    #[test]
    fn raises_total_degree_by_one_for_n2(m in monomial(ring(2), 6)) {
        let img = kuroda(2).apply(&Polynomial::term(ring(2), m.clone(), q(1))).unwrap();
        let ones = WeightVector::new(ring(2), vec![1; 5]).unwrap();
        if !img.is_zero() {
            prop_assert_eq!(img.is_homogeneous(&ones), Some(i64::from(m.degree()) + 1));
        }
    }

    #[test]
    fn nilpotency_within_bound(a in poly(ring(4), 5, 5)) {
        let d = kuroda(4);
        let k = d.nilpotency_index(&a, None).unwrap();
        prop_assert!(k <= a.y_degree().map_or(0, |y| y as usize + 1));
    }
}

#[test]
fn oracle_rank_plus_nullity() {
    for n in [2usize, 3, 4] {
        let d = kuroda(n);
        let vars: Vec<Var> = ring(n).vars().collect();
        for bound in 0..=3 {
            let monos = monomials_up_to(ring(n), bound, &vars);
            let basis = d.truncated_kernel_basis(bound, &vars);
            for e in &basis.elements {
                assert!(d.in_kernel(e).unwrap());
            }
            let images: Vec<_> = monos
                .iter()
                .map(|m| sparse(&d.apply(&Polynomial::term(ring(n), m.clone(), q(1))).unwrap()))
                .collect();
            assert_eq!(rank(&images) + basis.dim(), monos.len(), "n={n} bound={bound}");
            let elems: Vec<_> = basis.elements.iter().map(sparse).collect();
            assert_eq!(rank(&elems), basis.dim());
        }
    }
}

#[test]
fn oracle_examples() {
    let d = kuroda(4);
    let all: Vec<Var> = ring(4).vars().collect();
    let b1 = d.truncated_kernel_basis(1, &all);
    assert_eq!(b1.dim(), 5);
    for t in ["1", "x1", "x2", "x3", "x4"] {
        assert!(b1.spans(&p(4, t)));
    }
    assert!(!b1.spans(&p(4, "y1")));

    let b0 = d.truncated_kernel_basis(0, &all);
    assert_eq!(b0.dim(), 1);
    assert!(b0.spans(&p(4, "1")));

    let mask = [Var::X(2), Var::X(3), Var::X(4), Var::Y(2), Var::Y(3), Var::Y(4)];
    let b3 = d.truncated_kernel_basis(3, &mask);
    assert!(b3.spans(&p(4, "x2^2*y3 - x3^2*y2")));
    for m in monomials_up_to(ring(4), 3, &[Var::X(2), Var::X(3), Var::X(4)]) {
        assert!(b3.spans(&Polynomial::term(ring(4), m, q(1))));
    }
}

#[test]
fn general_derivation_needs_cap() {
    let rs = ring(2);
    let images = vec![p(2, "0"), p(2, "x1"), p(2, "0"), p(2, "0"), p(2, "0")];
    let d = Derivation::<Q>::new(rs, images).unwrap();
    assert!(!d.is_kuroda());
    assert!(d.nilpotency_index(&p(2, "x2^2"), None).is_err());
    assert_eq!(d.nilpotency_index(&p(2, "x2^2"), Some(5)).unwrap(), 3);
}

#[test]
fn kuroda_images() {
    let d = kuroda(4);
    assert_eq!(d.apply(&p(4, "y3")).unwrap(), p(4, "x3^2"));
    assert_eq!(d.apply(&p(4, "y5")).unwrap(), p(4, "x1*x2*x3*x4"));
    assert!(d.apply(&p(4, "x1 + x4")).unwrap().is_zero());
    assert!(Derivation::<Q>::kuroda(1).is_err());
}
