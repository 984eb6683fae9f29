use proptest::prelude::*;

use shimura::arith::{frac, rat};
use shimura::cm::degree_law;
use shimura::quat::{hilbert_symbol, LatticeOrder, Place, QuatAlgebra};
use shimura::volume::{conj_ratio_bound, ht_diagonal_bound, ht_point_bound, incidence_budget_plus, BudgetConstants};

fn coords() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-20i64..=20)
}

fn nonzero() -> impl Strategy<Value = i64> {
    (-40i64..=40).prop_filter("nonzero", |v| *v != 0)
}

proptest! {
    #[test]
    fn bounds_grow_with_radius(r in 0.01f64..4.0, dr in 0.01f64..2.0, k in 1u32..5) {
        prop_assert!(ht_point_bound(r + dr, k) > ht_point_bound(r, k));
        prop_assert!(ht_diagonal_bound(r + dr, k) > ht_diagonal_bound(r, k));
        prop_assert!(ht_point_bound(r, k + 1) > ht_point_bound(r, k));
    }

    #[test]
    fn conj_ratio_is_at_least_one_and_monotone(r in 0.01f64..3.0, a in 0.0f64..3.0, b in 0.01f64..1.0) {
        let lo = conj_ratio_bound(r, r + a).unwrap();
        prop_assert!(lo >= 1.0);
        prop_assert!(conj_ratio_bound(r, r + a + b).unwrap() > lo);
    }

    #[test]
    fn incidence_budget_shrinks_with_radius_and_prime(big_r in 0.5f64..8.0, d in 1u32..10) {
        let k = BudgetConstants::default();
        prop_assert!(incidence_budget_plus(1.0, big_r + 1.0, d, 7, &k) < incidence_budget_plus(1.0, big_r, d, 7, &k));
        prop_assert!(incidence_budget_plus(1.0, big_r, d, 11, &k) < incidence_budget_plus(1.0, big_r, d, 7, &k));
    }

    #[test]
    fn order_norm_is_multiplicative(x in coords(), y in coords()) {
        let o = LatticeOrder::maximal(&QuatAlgebra::from_ints(-1, 3).unwrap()).unwrap();
        let xy = o.mul_coords(&x, &y);
        prop_assert_eq!(o.norm_of(&xy) as i128, o.norm_of(&x) as i128 * o.norm_of(&y) as i128);
        prop_assert_eq!(o.trace_of(&o.conj_coords(&x)), o.trace_of(&x));
    }

    #[test]
    fn splitting_is_multiplicative(x in coords(), y in coords(), pi in 0usize..4) {
        let p = [5u64, 7, 11, 13][pi];
        let o = LatticeOrder::maximal(&QuatAlgebra::from_ints(-1, 3).unwrap()).unwrap();
        let s = o.split_mod_p(p).unwrap();
        prop_assert_eq!(s.apply(&o.mul_coords(&x, &y)), s.apply(&x).mul(&s.apply(&y)));
    }

    #[test]
    fn hilbert_symbol_laws(a in nonzero(), b in nonzero(), q in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        let v = Place::Finite(q);
        let (qa, qb) = (rat(a), rat(b));
        prop_assert_eq!(hilbert_symbol(&qa, &qb, v).unwrap(), hilbert_symbol(&qb, &qa, v).unwrap());
        prop_assert_eq!(hilbert_symbol(&qa, &-qa.clone(), v).unwrap(), 1);
        if a != 1 {
            prop_assert_eq!(hilbert_symbol(&qa, &(rat(1) - &qa), v).unwrap(), 1);
        }
        // squares do not change the symbol
        prop_assert_eq!(hilbert_symbol(&(qa.clone() * frac(9, 4)), &qb, v).unwrap(), hilbert_symbol(&qa, &qb, v).unwrap());
    }

    #[test]
    fn degree_law_is_multiplicative(m in 1u64..60, n in 1u64..60) {
        prop_assume!(num_integer::gcd(m, n) == 1);
        prop_assert_eq!(degree_law(m * n), degree_law(m) * degree_law(n));
    }
}
