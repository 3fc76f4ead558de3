//! Randomized property suites for daseinisation of projections and
//! operators. Each suite draws its instances from a seeded generator, so a
//! run is reproducible from `(dims, trials, seed)`.

use rand::Rng;
use serde::Serialize;

use crate::context::{build_poset, coarsenings, Closure, Context, ContextPoset};
use crate::daseinise::{daseinisation_preimage, daseinise_projection, delta_i_proj, delta_o_proj};
use crate::error::Result;
use crate::linalg::{eigenstructure, proj_join, proj_leq, proj_meet, HermitianOperator, Projection};
use crate::operator::{
    antonymous, cone, delta_i_op, delta_o_op, gelfand_transform_inner, gelfand_transform_outer,
    observable, operator_arrow, spectral_leq, FilterScope, PrincipalFilter,
};
use crate::presheaf::{
    enumerate_subobjects, evaluate, spectrum, sub_join, sub_leq, sub_meet, ClopenSubobject,
};
use crate::random::{
    context_containing, maximal_context_containing, random_any_projection, random_context,
    random_degenerate_hermitian, random_hermitian, random_maximal_context, random_projection,
    rng, TestRng,
};

/// Outcome of one randomized trial.
enum Trial {
    Pass,
    Fail(String),
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Trial {
    if ok { Trial::Pass } else { Trial::Fail(msg()) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub dim: usize,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Descriptions of the first few failures, or of the required witness
    /// when the suite asks for one.
    pub witnesses: Vec<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub trials: usize,
    pub results: Vec<SuiteResult>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(SuiteResult::ok)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().map(|r| r.failed).sum()
    }
}

type TrialFn = fn(&mut TestRng, usize) -> Result<Trial>;

pub const SUITES: &[&str] = &[
    "order_preservation",
    "injectivity",
    "bottom_top",
    "join_preservation",
    "meet_subpreservation",
    "non_surjectivity",
    "restriction_closure",
    "operator_bounds",
    "operator_coarse_graining",
    "projection_consistency",
    "filter_identities",
    "arrow_naturality",
];

fn trial_fn(name: &str) -> TrialFn {
    match name {
        "order_preservation" => order_preservation,
        "injectivity" => injectivity,
        "bottom_top" => bottom_top,
        "join_preservation" => join_preservation,
        "meet_subpreservation" => meet_subpreservation,
        "non_surjectivity" => non_surjectivity,
        "restriction_closure" => restriction_closure,
        "operator_bounds" => operator_bounds,
        "operator_coarse_graining" => operator_coarse_graining,
        "projection_consistency" => projection_consistency,
        "filter_identities" => filter_identities,
        _ => arrow_naturality,
    }
}

const MAX_WITNESSES: usize = 3;

/// Runs one named suite. Each suite gets its own generator, derived from
/// `seed`, the suite's position and `dim`, so suites are independent of one
/// another's draws.
pub fn run_suite(name: &str, dim: usize, trials: usize, seed: u64) -> Result<SuiteResult> {
    let pos = SUITES.iter().position(|s| *s == name).unwrap_or(SUITES.len()) as u64;
    let mut r = rng(seed ^ (pos << 32) ^ ((dim as u64) << 48));
    let f = trial_fn(name);
    let mut result = SuiteResult {
        name: name.to_owned(),
        dim,
        trials,
        passed: 0,
        failed: 0,
        witnesses: Vec::new(),
    };
    for i in 0..trials {
        match f(&mut r, dim)? {
            Trial::Pass => result.passed += 1,
            Trial::Fail(msg) => {
                result.failed += 1;
                if result.witnesses.len() < MAX_WITNESSES {
                    result.witnesses.push(format!("trial {i}: {msg}"));
                }
            }
        }
    }
    if name == "meet_subpreservation" && trials > 0 {
        match strict_meet_witness(&mut r, dim)? {
            Some(w) => result.witnesses.push(w),
            None => {
                result.failed += 1;
                result.witnesses.push("no instance with strict inequality found".into());
            }
        }
    }
    Ok(result)
}

/// Runs every suite in every dimension. `trials == 0` yields no results.
pub fn run_all(dims: &[usize], trials: usize, seed: u64) -> Result<Summary> {
    let mut results = Vec::new();
    if trials > 0 {
        for &n in dims {
            for name in SUITES {
                results.push(run_suite(name, n, trials, seed)?);
            }
        }
    }
    Ok(Summary {
        seed,
        trials,
        results,
    })
}

fn coarse_closure() -> Closure {
    Closure {
        coarsening: true,
        intersection: false,
    }
}

/// A few random contexts plus the given extra seeds, closed under
/// coarsening.
fn poset_with<R: Rng>(r: &mut R, n: usize, extra: Vec<Context>) -> Result<ContextPoset> {
    let mut seeds = extra;
    let count = r.random_range(1..=2);
    for _ in 0..count {
        seeds.push(random_sized_context(r, n));
    }
    build_poset(&seeds, coarse_closure())
}

fn random_sized_context<R: Rng>(r: &mut R, n: usize) -> Context {
    let k = r.random_range(2..=n);
    random_context(r, n, k)
}

fn order_preservation(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let p = random_any_projection(r, n);
    let q = proj_join(&p, &random_any_projection(r, n), eps)?;
    let seed = context_containing(r, &q, 2);
    let poset = poset_with(r, n, vec![seed])?;
    let dp = daseinise_projection(&p, &poset);
    let dq = daseinise_projection(&q, &poset);
    Ok(check(sub_leq(&dp, &dq)?, || {
        format!("P <= Q but δ(P) is not below δ(Q) (ranks {} and {})", p.rank(), q.rank())
    }))
}

fn proper_projection<R: Rng>(r: &mut R, n: usize) -> Projection {
    let rank = r.random_range(1..n);
    random_projection(r, n, rank)
}

fn injectivity(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let p = proper_projection(r, n);
    // half of the trials compare P with itself written in a different context
    let q = if r.random_bool(0.5) { proper_projection(r, n) } else { p.clone() };
    let (kp, kq) = (r.random_range(2..=n), r.random_range(2..=n));
    let ctx_p = context_containing(r, &p, kp);
    let ctx_q = context_containing(r, &q, kq);
    let poset = poset_with(r, n, vec![ctx_p, ctx_q])?;
    let same_input = p.approx_eq(&q, 1e3 * eps);
    let same_output = daseinise_projection(&p, &poset) == daseinise_projection(&q, &poset);
    Ok(check(same_input == same_output, || {
        format!("P == Q is {same_input} but δ(P) == δ(Q) is {same_output}")
    }))
}

fn bottom_top(r: &mut TestRng, n: usize) -> Result<Trial> {
    let poset = poset_with(r, n, Vec::new())?;
    let bottom = daseinise_projection(&Projection::zero(n), &poset);
    let top = daseinise_projection(&Projection::identity(n), &poset);
    Ok(check(
        bottom.is_bottom() && top == ClopenSubobject::top(&poset),
        || "δ(0) is not bottom or δ(1) is not top".into(),
    ))
}

fn join_preservation(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let p = random_any_projection(r, n);
    let q = random_any_projection(r, n);
    let seed = random_maximal_context(r, n);
    let poset = poset_with(r, n, vec![seed])?;
    let lhs = daseinise_projection(&proj_join(&p, &q, eps)?, &poset);
    let rhs = sub_join(&daseinise_projection(&p, &poset), &daseinise_projection(&q, &poset))?;
    Ok(check(lhs == rhs, || {
        format!("δ(P ∨ Q) differs from δ(P) ∨ δ(Q) (ranks {}, {})", p.rank(), q.rank())
    }))
}

fn meet_subpreservation(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let p = random_any_projection(r, n);
    let q = random_any_projection(r, n);
    let poset = poset_with(r, n, Vec::new())?;
    let lhs = daseinise_projection(&proj_meet(&p, &q, eps)?, &poset);
    let rhs = sub_meet(&daseinise_projection(&p, &poset), &daseinise_projection(&q, &poset))?;
    Ok(check(sub_leq(&lhs, &rhs)?, || {
        "δ(P ∧ Q) is not below δ(P) ∧ δ(Q)".into()
    }))
}

/// Two distinct rank-one projections meet in 0, yet a generic context sees
/// both as non-trivial.
fn strict_meet_witness(r: &mut TestRng, n: usize) -> Result<Option<String>> {
    let eps = crate::DEFAULT_TOL;
    for _ in 0..16 {
        let p = random_projection(r, n, 1);
        let q = random_projection(r, n, 1);
        let poset = poset_with(r, n, Vec::new())?;
        let lhs = daseinise_projection(&proj_meet(&p, &q, eps)?, &poset);
        let rhs = sub_meet(&daseinise_projection(&p, &poset), &daseinise_projection(&q, &poset))?;
        if lhs != rhs && sub_leq(&lhs, &rhs)? {
            return Ok(Some(format!(
                "strict: δ(P ∧ Q) < δ(P) ∧ δ(Q) for two rank-1 projections over {} contexts",
                poset.len()
            )));
        }
    }
    Ok(None)
}

/// Exhaustive search over the subobjects of a two-context poset for one not
/// of the form `δ(R)`.
fn non_surjectivity(r: &mut TestRng, n: usize) -> Result<Trial> {
    let v = random_maximal_context(r, n);
    let w = random_maximal_context(r, n);
    let poset = ContextPoset::from_contexts(vec![v, w])?;
    let Some(all) = enumerate_subobjects(&poset, 1 << 12) else {
        return Ok(Trial::Fail("too many subobjects to enumerate".into()));
    };
    let missed = all
        .iter()
        .filter(|s| daseinisation_preimage(s, &poset).is_none())
        .count();
    Ok(check(missed > 0, || {
        format!("every one of {} subobjects is a daseinisation", all.len())
    }))
}

fn restriction_closure(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let p = random_any_projection(r, n);
    let poset = poset_with(r, n, Vec::new())?;
    let s = daseinise_projection(&p, &poset);
    if let Some((sup, sub)) = s.closure_violation(&poset) {
        return Ok(Trial::Fail(format!("δ(P) not closed under restriction {sup} -> {sub}")));
    }
    // outer approximations grow under coarse-graining
    for (sub, sup) in poset.arrows() {
        let big = delta_o_proj(&p, poset.context(sup));
        let small = delta_o_proj(&p, poset.context(sub));
        if !proj_leq(&big, &small, eps)? {
            return Ok(Trial::Fail(format!("δᵒ shrinks from {sup} down to {sub}")));
        }
    }
    Ok(Trial::Pass)
}

fn random_operator<R: Rng>(r: &mut R, n: usize) -> HermitianOperator {
    if r.random_bool(0.3) {
        let distinct = r.random_range(2..=n);
        random_degenerate_hermitian(r, n, distinct)
    } else {
        random_hermitian(r, n)
    }
}

fn operator_bounds(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let a = random_operator(r, n);
    let v = random_sized_context(r, n);
    let lo = delta_i_op(&a, &v)?;
    let hi = delta_o_op(&a, &v)?;
    if !spectral_leq(&lo, &a, eps)? || !spectral_leq(&a, &hi, eps)? {
        return Ok(Trial::Fail("δⁱ(A) <= A <= δᵒ(A) fails in the spectral order".into()));
    }
    let spec = eigenstructure(&a, eps);
    for (name, b) in [("δⁱ", &lo), ("δᵒ", &hi)] {
        if v.coefficients(b).is_none() {
            return Ok(Trial::Fail(format!("{name}(A) is not in the context")));
        }
        let es = eigenstructure(b, eps);
        if let Some(x) = es.eigenvalues.iter().find(|&&x| !spec.contains(x, 1e3 * eps)) {
            return Ok(Trial::Fail(format!("{name}(A) has eigenvalue {x} outside spec(A)")));
        }
    }
    Ok(Trial::Pass)
}

fn operator_coarse_graining(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let a = random_operator(r, n);
    let v = random_maximal_context(r, n);
    let subs = coarsenings(&v);
    if subs.is_empty() {
        return Ok(Trial::Pass);
    }
    let sub = &subs[r.random_range(0..subs.len())];
    let ok = spectral_leq(&delta_i_op(&a, sub)?, &delta_i_op(&a, &v)?, eps)?
        && spectral_leq(&delta_o_op(&a, &v)?, &delta_o_op(&a, sub)?, eps)?;
    Ok(check(ok, || {
        format!("approximations do not coarsen monotonically ({} -> {} atoms)", v.k(), sub.k())
    }))
}

fn projection_consistency(r: &mut TestRng, n: usize) -> Result<Trial> {
    let p = random_any_projection(r, n);
    let v = random_sized_context(r, n);
    let tol = 1e-9;
    let ok = delta_o_op(p.as_operator(), &v)?.approx_eq(delta_o_proj(&p, &v).as_operator(), tol)
        && delta_i_op(p.as_operator(), &v)?.approx_eq(delta_i_proj(&p, &v).as_operator(), tol);
    Ok(check(ok, || {
        format!("operator and lattice approximations of a rank-{} projection differ", p.rank())
    }))
}

fn filter_identities(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let tol = 1e-9;
    let a = random_operator(r, n);
    let v = random_sized_context(r, n);
    let points = spectrum(&v);
    let lambda = &points[r.random_range(0..points.len())];
    let inner = gelfand_transform_inner(&a, &v, lambda)?;
    let outer = gelfand_transform_outer(&a, &v, lambda)?;
    let direct_inner = evaluate(lambda, &v, &delta_i_op(&a, &v)?)?;
    let direct_outer = evaluate(lambda, &v, &delta_o_op(&a, &v)?)?;
    if (inner - direct_inner).abs() > tol || (outer - direct_outer).abs() > tol {
        return Ok(Trial::Fail(format!(
            "filter route ({inner}, {outer}) vs direct ({direct_inner}, {direct_outer})"
        )));
    }
    // a random non-zero filter of the context
    let mask: Vec<bool> = loop {
        let m: Vec<bool> = (0..v.k()).map(|_| r.random_bool(0.5)).collect();
        if m.iter().any(|&b| b) {
            break m;
        }
    };
    let gen = v.atom_sum(&(0..v.k()).filter(|&i| mask[i]).collect());
    let f = PrincipalFilter::new(gen, FilterScope::Context(v.id().clone()))?;
    let g_lhs = antonymous(&delta_i_op(&a, &v)?, &f, eps)?;
    let g_rhs = antonymous(&a, &cone(&f), eps)?;
    let f_lhs = observable(&delta_o_op(&a, &v)?, &f, eps)?;
    let f_rhs = observable(&a, &cone(&f), eps)?;
    Ok(check(
        (g_lhs - g_rhs).abs() <= tol && (f_lhs - f_rhs).abs() <= tol,
        || format!("antonymous {g_lhs} vs {g_rhs}, observable {f_lhs} vs {f_rhs}"),
    ))
}

fn arrow_naturality(r: &mut TestRng, n: usize) -> Result<Trial> {
    let eps = crate::DEFAULT_TOL;
    let a = random_operator(r, n);
    let ray = random_projection(r, n, 1);
    let extra = vec![maximal_context_containing(r, &ray)];
    let poset = poset_with(r, n, extra)?;
    let arrow = operator_arrow(&a, &poset)?;
    if let Some((sub, sup, lambda)) = arrow.naturality_violations(&poset).first() {
        return Ok(Trial::Fail(format!("naturality fails on {sub} -> {sup} at point {lambda}")));
    }
    for comp in arrow.components() {
        for pair in comp {
            if let Some(msg) = pair.violations(&poset, eps).first() {
                return Ok(Trial::Fail(msg.clone()));
            }
        }
    }
    Ok(Trial::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_give_empty_summary() {
        let s = run_all(&[2, 3], 0, 7).unwrap();
        assert!(s.results.is_empty());
        assert!(s.all_passed());
    }

    #[test]
    fn same_seed_same_summary() {
        let a = run_all(&[2], 3, 11).unwrap();
        let b = run_all(&[2], 3, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_run_passes() {
        let s = run_all(&[2, 3], 5, 1).unwrap();
        for r in &s.results {
            assert!(r.ok(), "{r:?}");
        }
    }
}
