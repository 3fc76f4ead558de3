//! The spin-1 system in `C^3`: `S_z = diag(1/√2, 0, -1/√2)`, its
//! eigenprojections, the contexts built from them, and a walkthrough
//! document assembling every computation on this system.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::context::{build_poset, Closure, Context, ContextPoset};
use crate::daseinise::{daseinise_projection, delta_o_proj};
use crate::error::Result;
use crate::io::{arrow_to_json, poset_to_json, round12, subobject_to_json, value_to_json, MatrixDoc};
use crate::linalg::{spectral_family, CVector, HermitianOperator, Projection, DEFAULT_TOL};
use crate::operator::operator_arrow;
use crate::states::{check_containment, pseudo_state, value, UnitVector};

pub fn sz() -> HermitianOperator {
    HermitianOperator::from_real_diagonal(&[FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2])
}

/// `P_i` for `i` in `1..=3`: the eigenprojection of `S_z` for
/// `1/√2`, `0`, `-1/√2` respectively.
pub fn p(i: usize) -> Projection {
    Projection::basis(3, i - 1)
}

fn sum(ps: &[&Projection]) -> Projection {
    Projection::orthogonal_sum(3, ps.iter().copied())
}

fn two_atom(q: &Projection) -> Context {
    Context::from_atoms(vec![q.clone(), q.complement()], DEFAULT_TOL).expect("proper projection")
}

fn real_ray(v: [f64; 3]) -> Projection {
    let v = CVector::from_iterator(3, v.iter().map(|&x| Complex64::new(x, 0.0)));
    Projection::onto_vector(&v).expect("non-zero vector")
}

pub fn v_sz() -> Context {
    Context::from_atoms(vec![p(1), p(2), p(3)], DEFAULT_TOL).expect("eigenbasis")
}

/// `V_{P_i} = {P_i, 1 - P_i}''`.
pub fn v_p(i: usize) -> Context {
    two_atom(&p(i))
}

/// `P_1`, `P_3` rotated by `θ` about the axis of `P_2`.
pub fn rotated_pair(theta: f64) -> (Projection, Projection) {
    let (s, c) = theta.sin_cos();
    (real_ray([c, 0.0, s]), real_ray([-s, 0.0, c]))
}

const ROTATION: f64 = std::f64::consts::PI / 6.0;

/// The coarsening poset of `V_{S_z}`: `V_{S_z}` and the three `V_{P_i}`.
pub fn spin_poset() -> ContextPoset {
    build_poset(
        &[v_sz()],
        Closure {
            coarsening: true,
            intersection: false,
        },
    )
    .expect("spin-1 poset")
}

/// One row of the table of outer approximations of `P_2`.
#[derive(Clone, Debug)]
pub struct CaseRow {
    pub case: &'static str,
    pub context: String,
    pub expected: String,
    pub outer: Projection,
    pub expected_projection: Projection,
}

impl CaseRow {
    pub fn matches(&self, tol: f64) -> bool {
        self.outer.approx_eq(&self.expected_projection, tol)
    }
}

/// Outer approximations of `P = P_2` on representatives of every kind of
/// context in `C^3`.
pub fn case_table() -> Vec<CaseRow> {
    let pp = p(2);
    let (q1, q3) = rotated_pair(ROTATION);
    // a rank-2 Q above P, split into two rank-1 projections neither equal to P
    let q = sum(&[&pp, &q1]);
    let (s, c) = (0.4f64).sin_cos();
    let r1 = real_ray([s * ROTATION.cos(), c, s * ROTATION.sin()]);
    let r2 = real_ray([c * ROTATION.cos(), -s, c * ROTATION.sin()]);
    let generic = Context::from_atoms(
        vec![
            real_ray([1.0, 1.0, 1.0]),
            real_ray([1.0, -1.0, 0.0]),
            real_ray([1.0, 1.0, -2.0]),
        ],
        DEFAULT_TOL,
    )
    .expect("orthonormal basis");

    let mut rows = Vec::new();
    let mut push = |case, context: &str, v: &Context, expected: &str, e: Projection| {
        rows.push(CaseRow {
            case,
            context: context.to_owned(),
            expected: expected.to_owned(),
            outer: delta_o_proj(&pp, v),
            expected_projection: e,
        });
    };
    push("1", "V_Sz", &v_sz(), "P", pp.clone());
    push("1", "V_P1", &v_p(1), "P + P3", sum(&[&pp, &p(3)]));
    push("1", "V_P3", &v_p(3), "P1 + P", sum(&[&p(1), &pp]));
    push("1", "V_P", &v_p(2), "P", pp.clone());
    let v2 = Context::from_atoms(vec![q1.clone(), pp.clone(), q3.clone()], DEFAULT_TOL)
        .expect("rotated basis");
    push("2", "{Q1, P, Q3}''", &v2, "P", pp.clone());
    push("2", "V_Q1", &two_atom(&q1), "P + Q3", sum(&[&pp, &q3]));
    push("2", "V_Q3", &two_atom(&q3), "Q1 + P", sum(&[&q1, &pp]));
    push("3a", "V_Q", &two_atom(&q), "Q", q.clone());
    let v3 = Context::from_atoms(vec![r1, r2, q3.clone()], DEFAULT_TOL).expect("basis adapted to Q");
    push("3b", "{Q1', Q2', 1 - Q}''", &v3, "Q", q.clone());
    push("4", "generic maximal", &generic, "1", Projection::identity(3));
    rows
}

fn doc(m: &Projection) -> Value {
    rounded(MatrixDoc::from_matrix(m.matrix()))
}

fn rounded(d: MatrixDoc) -> Value {
    let entries: Vec<Vec<[f64; 2]>> = d
        .entries
        .iter()
        .map(|row| row.iter().map(|&[re, im]| [round12(re), round12(im)]).collect())
        .collect();
    json!({ "dim": d.dim, "entries": entries })
}

/// The walkthrough: spectral family of `S_z`, outer approximations of `P_2`,
/// `δ(P_2)` and the arrow `δ(S_z)` over the spin poset, and the value of
/// `S_z` in the pseudo-state of `e_2`.
pub fn demo() -> Result<Value> {
    let a = sz();
    let sf = spectral_family(&a, DEFAULT_TOL);
    let family: Vec<Value> = sf
        .thresholds()
        .iter()
        .zip(sf.steps())
        .map(|(t, step)| json!({ "threshold": round12(*t), "rank": step.rank(), "step": doc(step) }))
        .collect();

    let cases: Vec<Value> = case_table()
        .iter()
        .map(|row| {
            json!({
                "case": row.case,
                "context": row.context,
                "expected": row.expected,
                "rank": row.outer.rank(),
                "outer": doc(&row.outer),
                "matches": row.matches(1e-9),
            })
        })
        .collect();

    let poset = spin_poset();
    let arrow = operator_arrow(&a, &poset)?;
    let psi = UnitVector::basis(3, 1);
    let w = pseudo_state(&psi, &poset)?;
    let val = value(&arrow, &w)?;
    let report = check_containment(&psi, &a, &poset)?;
    let names: Vec<Value> = poset
        .contexts()
        .iter()
        .map(|v| json!({ "id": v.id().to_string(), "name": context_name(v) }))
        .collect();

    Ok(json!({
        "operator": rounded(MatrixDoc::from_matrix(a.matrix())),
        "spectral_family": family,
        "outer_approximations": cases,
        "poset": poset_to_json(&poset),
        "context_names": names,
        "daseinisation": subobject_to_json(&daseinise_projection(&p(2), &poset), &poset),
        "arrow": arrow_to_json(&arrow, &poset),
        "pseudo_state": subobject_to_json(&w, &poset),
        "value": value_to_json(&val, &poset),
        "expectation": round12(report.expectation),
        "violations": report.violations(),
    }))
}

/// Name of a context of the spin poset.
pub fn context_name(v: &Context) -> String {
    if v.id() == v_sz().id() {
        return "V_Sz".into();
    }
    (1..=3)
        .find(|&i| v.id() == v_p(i).id())
        .map_or_else(|| v.id().to_string(), |i| format!("V_P{i}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_table_matches() {
        for row in case_table() {
            assert!(row.matches(1e-9), "case {} at {}", row.case, row.context);
        }
    }

    #[test]
    fn printed_v_p3_value_is_not_in_the_context() {
        // P + P3 cannot be the outer approximation at V_P3: it is not an atom sum there
        let bad = sum(&[&p(2), &p(3)]);
        assert!(v_p(3).decompose_projection(&bad).is_none());
    }

    #[test]
    fn demo_builds() {
        let d = demo().unwrap();
        assert_eq!(d["spectral_family"].as_array().unwrap().len(), 3);
        assert_eq!(d["violations"], 0);
        assert_eq!(spin_poset().len(), 4);
    }
}
