//! Property tests over the public API.

use proptest::prelude::*;

use crate::coordalg::{comultiply, counit, multiply_monomials};
use crate::qarith::q_number_f64;
use crate::{AlgebraElement, HalfInt, Monomial, OperatorMatrix, QScalar};

fn scalar() -> impl Strategy<Value = QScalar> {
    (-4i64..=4, -3i32..=3, -4i64..=4, -3i32..=3)
        .prop_map(|(a, e, b, f)| &QScalar::term(a, HalfInt::from_twice(e)) + &QScalar::term(b, HalfInt::from_twice(f)))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (-2i32..=2, 0u32..=2, 0u32..=2).prop_map(|(a, b, c)| Monomial::new(a, b, c))
}

fn sparse(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    prop::collection::vec((0..dim, 0..dim, -3.0f64..3.0), 0..3 * dim)
        .prop_map(move |t| OperatorMatrix::from_triplets(dim, dim, t))
}

proptest! {
    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in scalar(), b in scalar(), q in 0.2f64..0.9) {
        let (x, y) = (a.evaluate(q).unwrap().get(), b.evaluate(q).unwrap().get());
        let prod = (&a * &b).evaluate(q).unwrap().get();
        let sum = (&a + &b).evaluate(q).unwrap().get();
        prop_assert!((prod - x * y).abs() <= 1e-9 * (1.0 + (x * y).abs()));
        prop_assert!((sum - (x + y)).abs() <= 1e-9 * (1.0 + x.abs() + y.abs()));
    }

    #[test]
    fn scalar_text_round_trips(a in scalar()) {
        prop_assert_eq!(a.to_string().parse::<QScalar>().unwrap(), a);
    }

    #[test]
    fn half_int_text_round_trips(twice in -200i32..200) {
        let h = HalfInt::from_twice(twice);
        prop_assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
    }

    #[test]
    fn q_numbers_are_symmetric(twice in 0i32..40, q in 0.05f64..0.95) {
        let m = HalfInt::from_twice(twice);
        let direct = q_number_f64(m, q);
        let inverted = q_number_f64(m, 1.0 / q);
        prop_assert!((direct - inverted).abs() <= 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn star_is_an_antimultiplicative_involution(x in monomial(), y in monomial()) {
        let (a, b) = (AlgebraElement::monomial(x), AlgebraElement::monomial(y));
        prop_assert_eq!(a.star().star(), a.clone());
        prop_assert_eq!((&a * &b).star(), &b.star() * &a.star());
        prop_assert_eq!(multiply_monomials(x, y), &a * &b);
    }

    #[test]
    fn coproduct_and_counit_are_multiplicative(x in monomial(), y in monomial()) {
        let (a, b) = (AlgebraElement::monomial(x), AlgebraElement::monomial(y));
        prop_assert_eq!(comultiply(&(&a * &b)), comultiply(&a).multiply(&comultiply(&b)));
        prop_assert_eq!(counit(&(&a * &b)), &counit(&a) * &counit(&b));
    }

    #[test]
    fn operator_norm_is_permutation_invariant(
        m in sparse(9),
        perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let p = m.relabel(9, 9, &perm, &perm);
        prop_assert!((p.operator_norm() - m.operator_norm()).abs() <= 1e-10 * (1.0 + m.operator_norm()));
        prop_assert!((m.adjoint().operator_norm() - m.operator_norm()).abs() <= 1e-10 * (1.0 + m.operator_norm()));
    }

    #[test]
    fn composition_matches_dense_product(a in sparse(7), b in sparse(7)) {
        let sparse = a.compose(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        prop_assert!((sparse - dense).abs().max() <= 1e-12);
    }
}
