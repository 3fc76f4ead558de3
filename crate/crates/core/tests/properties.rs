use proptest::prelude::*;
use rand::Rng;

use dasein::io::{arrow_from_json, arrow_to_json, subobject_from_json, subobject_to_json};
use dasein::random::{
    maximal_context_containing, random_any_projection, random_context, random_hermitian,
    random_maximal_context, random_poset, random_unit_vector, rng,
};
use dasein::{
    build_poset, coarsenings, context_from_atoms, context_from_operator, daseinise_projection,
    delta_i_op, delta_i_proj, delta_o_op, delta_o_proj, eigenstructure, expectation,
    operator_arrow, proj_join, proj_leq, proj_meet, pseudo_state, spectral_leq, sub_implies,
    sub_leq, sub_meet, value, Closure, HermitianOperator, UnitVector,
};

const TOL: f64 = 1e-9;

fn dims() -> impl Strategy<Value = usize> {
    2usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_operations_bound_their_arguments(seed in any::<u64>(), n in dims()) {
        let mut r = rng(seed);
        let p = random_any_projection(&mut r, n);
        let q = random_any_projection(&mut r, n);
        let m = proj_meet(&p, &q, TOL).unwrap();
        let j = proj_join(&p, &q, TOL).unwrap();
        prop_assert!(proj_leq(&p, &p, TOL).unwrap());
        prop_assert!(proj_leq(&m, &p, TOL).unwrap() && proj_leq(&m, &q, TOL).unwrap());
        prop_assert!(proj_leq(&p, &j, TOL).unwrap() && proj_leq(&q, &j, TOL).unwrap());
    }

    #[test]
    fn context_id_ignores_atom_order(seed in any::<u64>(), n in dims()) {
        let mut r = rng(seed);
        let k = r.random_range(2..=n);
        let v = random_context(&mut r, n, k);
        let mut atoms = v.atoms().to_vec();
        atoms.reverse();
        let w = context_from_atoms(atoms, TOL).unwrap();
        prop_assert_eq!(w.id(), v.id());
    }

    #[test]
    fn projection_approximations_sandwich(seed in any::<u64>(), n in dims()) {
        let mut r = rng(seed);
        let p = random_any_projection(&mut r, n);
        let v = random_maximal_context(&mut r, n);
        let outer = delta_o_proj(&p, &v);
        let inner = delta_i_proj(&p, &v);
        prop_assert!(proj_leq(&inner, &p, TOL).unwrap());
        prop_assert!(proj_leq(&p, &outer, TOL).unwrap());
        prop_assert!(delta_o_proj(&outer, &v).approx_eq(&outer, 1e-9));
        prop_assert!(delta_i_proj(&inner, &v).approx_eq(&inner, 1e-9));
        // coarse-graining loosens the outer approximation
        for c in coarsenings(&v) {
            prop_assert!(proj_leq(&outer, &delta_o_proj(&p, &c), TOL).unwrap());
        }
    }

    #[test]
    fn spectral_order_refines_linear_order(seed in any::<u64>(), n in dims()) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, n);
        let k = r.random_range(2..=n);
        let v = random_context(&mut r, n, k);
        let hi = delta_o_op(&a, &v).unwrap();
        let lo = delta_i_op(&a, &v).unwrap();
        prop_assert!(spectral_leq(&a, &hi, TOL).unwrap());
        prop_assert!(spectral_leq(&lo, &a, TOL).unwrap());
        for _ in 0..100 {
            let psi = random_unit_vector(&mut r, n);
            let x = a.quadratic_form(&psi).unwrap();
            prop_assert!(lo.quadratic_form(&psi).unwrap() <= x + 1e-9);
            prop_assert!(x <= hi.quadratic_form(&psi).unwrap() + 1e-9);
        }
    }

    #[test]
    fn arrows_are_natural_and_nested(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let poset = random_poset(&mut r, n, 2).unwrap();
        let a = random_hermitian(&mut r, n);
        let arrow = operator_arrow(&a, &poset).unwrap();
        prop_assert!(arrow.naturality_violations(&poset).is_empty());
        let spec = eigenstructure(&a, TOL);
        for comp in arrow.components() {
            for pair in comp {
                prop_assert!(pair.violations(&poset, 1e-9).is_empty());
                for (&mu, &nu) in pair.mu.values().zip(pair.nu.values()) {
                    prop_assert!(spec.contains(mu, 1e-9) && spec.contains(nu, 1e-9));
                }
            }
        }
        let json = arrow_to_json(&arrow, &poset);
        let back = arrow_from_json(&json, &poset).unwrap();
        prop_assert_eq!(arrow_to_json(&back, &poset), json);
    }

    #[test]
    fn eigenvectors_get_their_eigenvalue(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, n);
        let v = context_from_operator(&a, TOL).unwrap();
        let poset = build_poset(&[v], Closure { coarsening: true, intersection: false }).unwrap();
        let arrow = operator_arrow(&a, &poset).unwrap();
        let vi = poset.index_of(context_from_operator(&a, TOL).unwrap().id()).unwrap();
        let es = eigenstructure(&a, TOL);
        for (x, e) in es.eigenvalues.iter().zip(&es.eigenprojections) {
            let lambda = poset.context(vi).decompose_projection(e).unwrap();
            let lambda = *lambda.iter().next().unwrap();
            let (mu, nu) = arrow.component(vi)[lambda].interval(poset.context(vi).id()).unwrap();
            prop_assert!((mu - x).abs() <= 1e-9 && (nu - x).abs() <= 1e-9);
        }
    }

    #[test]
    fn pseudo_state_singletons_are_where_the_ray_is_an_atom(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let psi = UnitVector::new(random_unit_vector(&mut r, n), TOL).unwrap();
        let p = psi.projection();
        let seeds = vec![maximal_context_containing(&mut r, &p), random_maximal_context(&mut r, n)];
        let poset = build_poset(&seeds, Closure { coarsening: true, intersection: false }).unwrap();
        let w = pseudo_state(&psi, &poset).unwrap();
        prop_assert!(!w.is_bottom());
        for (v, comp) in poset.contexts().iter().zip(w.components()) {
            let outer = delta_o_proj(&p, v);
            prop_assert_eq!(comp.len() == 1, v.atoms().iter().any(|a| a.approx_eq(&outer, 1e-9)));
            if v.decompose_projection(&p).is_some() {
                prop_assert_eq!(comp.len(), 1);
            }
        }
        let a = random_hermitian(&mut r, n);
        let val = value(&operator_arrow(&a, &poset).unwrap(), &w).unwrap();
        for (comp, pairs) in w.components().iter().zip(val.components()) {
            prop_assert_eq!(comp.len(), pairs.len());
        }
        let e = expectation(&psi, &a).unwrap();
        let spec = eigenstructure(&a, TOL);
        prop_assert!(spec.min() - 1e-9 <= e && e <= spec.max() + 1e-9);
    }

    #[test]
    fn implication_is_right_adjoint_to_meet(seed in any::<u64>()) {
        let mut r = rng(seed);
        let poset = random_poset(&mut r, 3, 2).unwrap();
        let s = daseinise_projection(&random_any_projection(&mut r, 3), &poset);
        let t = daseinise_projection(&random_any_projection(&mut r, 3), &poset);
        let imp = sub_implies(&poset, &s, &t).unwrap();
        prop_assert!(imp.is_restriction_closed(&poset));
        prop_assert!(sub_leq(&sub_meet(&s, &imp).unwrap(), &t).unwrap());
        prop_assert!(sub_leq(&t, &imp).unwrap());
        let back = subobject_from_json(&subobject_to_json(&s, &poset), &poset).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn rejected_non_hermitian(seed in any::<u64>(), n in dims()) {
        let mut r = rng(seed);
        let mut m = random_hermitian(&mut r, n).into_matrix();
        m[(0, 1)] += num_complex::Complex64::new(0.5, 0.0);
        prop_assert!(HermitianOperator::new(m, TOL).is_err());
    }
}
