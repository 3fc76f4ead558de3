//! The spin-1 system worked end to end, plus small posets whose logic can be
//! checked exhaustively.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2 as S;

use dasein::presheaf::enumerate_subobjects;
use dasein::spin1::{p, rotated_pair, spin_poset, sz, v_p, v_sz};
use dasein::{
    build_poset, daseinisation_preimage, daseinise_projection, delta_i_op, delta_o_op, global_sections,
    operator_arrow, pseudo_state, sub_join, sub_not, value, Closure, ClopenSubobject, Context,
    HermitianOperator, Projection, UnitVector, DEFAULT_TOL,
};

fn both() -> Closure {
    Closure {
        coarsening: true,
        intersection: true,
    }
}

fn rotated_context() -> Context {
    let (q1, q3) = rotated_pair(0.3);
    Context::from_atoms(vec![q1, p(2), q3], DEFAULT_TOL).unwrap()
}

#[test]
fn two_maximal_contexts_sharing_a_ray_give_seven_nodes() {
    let poset = build_poset(&[v_sz(), rotated_context()], both()).unwrap();
    // two maximal contexts, three coarsenings of each, one of them shared
    assert_eq!(poset.len(), 7);
    assert_eq!(poset.arrows().len(), 6);
    assert!(poset.get(v_p(2).id()).is_some());
}

#[test]
fn spin_poset_shape() {
    let poset = spin_poset();
    assert_eq!(poset.len(), 4);
    assert_eq!(poset.arrows().len(), 3);
    assert_eq!(global_sections(&poset).len(), 3);
    let single = build_poset(&[v_p(1)], Closure::default()).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn daseinised_p2_on_spin_poset() {
    let poset = spin_poset();
    let s = daseinise_projection(&p(2), &poset);
    for (v, comp) in poset.contexts().iter().zip(s.components()) {
        let sum = v.atom_sum(comp);
        let expected = if v.id() == v_sz().id() || v.id() == v_p(2).id() {
            p(2)
        } else if v.id() == v_p(1).id() {
            Projection::diagonal(&[false, true, true])
        } else {
            Projection::diagonal(&[true, true, false])
        };
        assert!(sum.approx_eq(&expected, 1e-9), "{v}");
        assert_eq!(comp.len(), 1);
    }
}

#[test]
fn spin_operator_approximations() {
    let a = sz();
    let inner = delta_i_op(&a, &v_p(1)).unwrap();
    let outer = delta_o_op(&a, &v_p(1)).unwrap();
    assert!(inner.approx_eq(&HermitianOperator::from_real_diagonal(&[S, -S, -S]), 1e-9));
    assert!(outer.approx_eq(&HermitianOperator::from_real_diagonal(&[S, 0.0, 0.0]), 1e-9));
    assert!(delta_i_op(&a, &v_sz()).unwrap().approx_eq(&a, 1e-9));
}

#[test]
fn value_of_sz_in_e2() {
    let poset = spin_poset();
    let arrow = operator_arrow(&sz(), &poset).unwrap();
    let w = pseudo_state(&UnitVector::basis(3, 1), &poset).unwrap();
    let val = value(&arrow, &w).unwrap();
    let vi = poset.index_of(v_sz().id()).unwrap();
    let pairs = val.component(vi);
    assert_eq!(pairs.len(), 1);
    let (_, pair) = &pairs[0];
    let (mu, nu) = pair.interval(v_sz().id()).unwrap();
    assert!(mu.abs() < 1e-12 && nu.abs() < 1e-12);
    let (mu, nu) = pair.interval(v_p(1).id()).unwrap();
    assert!((mu + S).abs() < 1e-12 && nu.abs() < 1e-12);
    let (mu, nu) = pair.interval(v_p(3).id()).unwrap();
    assert!(mu.abs() < 1e-12 && (nu - S).abs() < 1e-12);
}

fn two_context_c2() -> dasein::ContextPoset {
    let v = Context::from_atoms(vec![Projection::basis(2, 0), Projection::basis(2, 1)], DEFAULT_TOL)
        .unwrap();
    let (c, s) = (0.4f64.cos(), 0.4f64.sin());
    let ray = |x: f64, y: f64| {
        Projection::onto_vector(&dasein::CVector::from_vec(vec![
            num_complex::Complex64::new(x, 0.0),
            num_complex::Complex64::new(y, 0.0),
        ]))
        .unwrap()
    };
    let w = Context::from_atoms(vec![ray(c, s), ray(-s, c)], DEFAULT_TOL).unwrap();
    build_poset(&[v, w], Closure::default()).unwrap()
}

#[test]
fn some_subobjects_are_not_daseinisations() {
    let poset = two_context_c2();
    let all = enumerate_subobjects(&poset, 1000).unwrap();
    assert_eq!(all.len(), 16);
    let images: Vec<&ClopenSubobject> = all
        .iter()
        .filter(|s| daseinisation_preimage(s, &poset).is_some())
        .collect();
    // 0, 1 and the four rays of the two bases
    assert_eq!(images.len(), 6);
    let missing = all
        .iter()
        .find(|s| daseinisation_preimage(s, &poset).is_none())
        .unwrap();
    assert!(!missing.is_bottom());
}

#[test]
fn excluded_middle_fails_somewhere() {
    let poset = spin_poset();
    let top = ClopenSubobject::top(&poset);
    let all = enumerate_subobjects(&poset, 1 << 12).unwrap();
    let witness = all
        .iter()
        .find(|s| sub_join(s, &sub_not(&poset, s).unwrap()).unwrap() != top)
        .expect("a subobject whose excluded middle fails");
    assert!(!witness.is_bottom());
    // the daseinised ray P2 is one such witness
    let d = daseinise_projection(&p(2), &poset);
    assert_ne!(sub_join(&d, &sub_not(&poset, &d).unwrap()).unwrap(), top);
}

#[test]
fn chain_has_one_section_per_maximal_point() {
    let poset = build_poset(&[v_sz(), v_p(1)], Closure::default()).unwrap();
    assert_eq!(poset.len(), 2);
    let sections = global_sections(&poset);
    assert_eq!(sections.len(), 3);
    let distinct: BTreeSet<_> = sections.iter().collect();
    assert_eq!(distinct.len(), 3);
}
