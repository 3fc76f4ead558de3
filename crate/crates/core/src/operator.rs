//! Daseinisation of self-adjoint operators.
//!
//! Covers the spectral order, the inner and outer approximations of an
//! operator in a context, principal filters with their cones, the
//! antonymous and observable functions, and the arrow `δ(A): Σ → R↔`
//! assembled from pairs of order-preserving and order-reversing functions
//! on down-sets.

use std::collections::BTreeMap;

use crate::context::{Context, ContextId, ContextPoset};
use crate::daseinise::{delta_i_atoms, delta_o_atoms};
use crate::error::{Error, Result};
use crate::linalg::{proj_leq, spectral_family, HermitianOperator, Projection, SpectralFamily};
use crate::presheaf::GelfandPoint;

/// `A <=_s B` iff `E^B_r <= E^A_r` for every real `r`.
///
/// Both families are step functions, so it is enough to compare them on the
/// merged thresholds and one point between consecutive thresholds.
pub fn spectral_leq(a: &HermitianOperator, b: &HermitianOperator, eps: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let fa = spectral_family(a, eps);
    let fb = spectral_family(b, eps);
    for r in sample_points(&[&fa, &fb], eps) {
        if !proj_leq(&fb.at(r), &fa.at(r), eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sample_points(families: &[&SpectralFamily], eps: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = families.iter().flat_map(|f| f.thresholds().iter().copied()).collect();
    ts.sort_by(f64::total_cmp);
    // thresholds closer than eps are the same threshold seen through rounding;
    // each cluster is sampled just above its largest member
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    for t in ts {
        match clusters.last_mut() {
            Some((_, hi)) if t - *hi <= eps => *hi = t,
            _ => clusters.push((t, t)),
        }
    }
    let mut out = Vec::with_capacity(2 * clusters.len());
    for (i, &(_, hi)) in clusters.iter().enumerate() {
        out.push(hi + 0.5 * eps);
        if let Some(&(next, _)) = clusters.get(i + 1) {
            out.push(0.5 * (hi + next));
        }
    }
    out
}

/// Values of an approximation of `a` on the atoms of `v`.
///
/// The approximating spectral family at `r` is the projection-level
/// approximation of `E^A_s` for `s` just above `r`, which enforces right
/// continuity; each atom takes the first threshold at which it enters the
/// family.
fn approximation_values(a: &HermitianOperator, v: &Context, inner: bool) -> Result<Vec<f64>> {
    let sf = spectral_family(a, v.eps());
    let ts = sf.thresholds();
    let mut values: Vec<Option<f64>> = vec![None; v.k()];
    for (i, &t) in ts.iter().enumerate() {
        let right = ts.get(i + 1).map_or(t + 1.0, |&next| 0.5 * (t + next));
        let e = sf.at(right);
        let step = if inner {
            delta_o_atoms(&e, v)
        } else {
            delta_i_atoms(&e, v)
        };
        for j in step {
            values[j].get_or_insert(t);
        }
    }
    values
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| {
            Error::InternalInvariantViolation(
                "approximating spectral family does not reach the identity".into(),
            )
        })
}

/// Values of `δⁱ(A)_V` on the atoms of `v`.
pub fn inner_values(a: &HermitianOperator, v: &Context) -> Result<Vec<f64>> {
    check_dim(a, v)?;
    approximation_values(a, v, true)
}

/// Values of `δᵒ(A)_V` on the atoms of `v`.
pub fn outer_values(a: &HermitianOperator, v: &Context) -> Result<Vec<f64>> {
    check_dim(a, v)?;
    approximation_values(a, v, false)
}

fn check_dim(a: &HermitianOperator, v: &Context) -> Result<()> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

fn assemble(v: &Context, values: &[f64]) -> HermitianOperator {
    let terms: Vec<(f64, &Projection)> = values.iter().copied().zip(v.atoms()).collect();
    HermitianOperator::linear_combination(v.dim(), &terms).expect("atoms share dim")
}

/// Inner daseinisation: the spectral-order largest operator in `v` below `a`.
pub fn delta_i_op(a: &HermitianOperator, v: &Context) -> Result<HermitianOperator> {
    Ok(assemble(v, &inner_values(a, v)?))
}

/// Outer daseinisation: the spectral-order smallest operator in `v` above `a`.
pub fn delta_o_op(a: &HermitianOperator, v: &Context) -> Result<HermitianOperator> {
    Ok(assemble(v, &outer_values(a, v)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterScope {
    /// A filter in the projection lattice of one context.
    Context(ContextId),
    /// A filter in the projection lattice of `B(C^n)`.
    Ambient,
}

/// `{Q : Q >= generator}` within the lattice named by `scope`. Every filter
/// of a finite lattice has this form.
#[derive(Clone, Debug)]
pub struct PrincipalFilter {
    generator: Projection,
    scope: FilterScope,
}

impl PrincipalFilter {
    pub fn new(generator: Projection, scope: FilterScope) -> Result<Self> {
        if generator.is_zero() {
            return Err(Error::ImproperFilter);
        }
        Ok(Self { generator, scope })
    }

    pub fn generator(&self) -> &Projection {
        &self.generator
    }

    pub fn scope(&self) -> &FilterScope {
        &self.scope
    }

    pub fn contains(&self, q: &Projection, eps: f64) -> bool {
        proj_leq(&self.generator, q, eps).unwrap_or(false)
    }
}

/// Smallest ambient filter containing `f`.
pub fn cone(f: &PrincipalFilter) -> PrincipalFilter {
    PrincipalFilter {
        generator: f.generator.clone(),
        scope: FilterScope::Ambient,
    }
}

/// The maximal filter `{P ∈ P(V) : λ(P) = 1}`, generated by `λ`'s atom.
pub fn filter_from_point(lambda: &GelfandPoint, v: &Context) -> Result<PrincipalFilter> {
    if &lambda.context != v.id() || lambda.atom >= v.k() {
        return Err(Error::NotInContext {
            context: v.id().to_string(),
        });
    }
    PrincipalFilter::new(
        v.atom(lambda.atom).clone(),
        FilterScope::Context(v.id().clone()),
    )
}

/// `g_A(F) = sup{r : 1 - E_r ∈ F}`. Context filters are lifted to their cone.
pub fn antonymous(a: &HermitianOperator, f: &PrincipalFilter, eps: f64) -> Result<f64> {
    let f = cone(f);
    let sf = spectral_family(a, eps);
    // the set is an initial ray; its supremum is the first threshold leaving it
    for (t, step) in sf.thresholds().iter().zip(sf.steps()) {
        if !f.contains(&step.complement(), eps) {
            return Ok(*t);
        }
    }
    Err(Error::InternalInvariantViolation(
        "antonymous function: supremum over an unbounded set".into(),
    ))
}

/// `f_A(F) = inf{r : E_r ∈ F}`. Context filters are lifted to their cone.
pub fn observable(a: &HermitianOperator, f: &PrincipalFilter, eps: f64) -> Result<f64> {
    let f = cone(f);
    let sf = spectral_family(a, eps);
    for (t, step) in sf.thresholds().iter().zip(sf.steps()) {
        if f.contains(step, eps) {
            return Ok(*t);
        }
    }
    Err(Error::InternalInvariantViolation(
        "observable function: infimum over an empty set".into(),
    ))
}

/// `λ(δⁱ(A)_V)` computed through the antonymous function of `a`.
pub fn gelfand_transform_inner(
    a: &HermitianOperator,
    v: &Context,
    lambda: &GelfandPoint,
) -> Result<f64> {
    antonymous(a, &cone(&filter_from_point(lambda, v)?), v.eps())
}

/// `λ(δᵒ(A)_V)` computed through the observable function of `a`.
pub fn gelfand_transform_outer(
    a: &HermitianOperator,
    v: &Context,
    lambda: &GelfandPoint,
) -> Result<f64> {
    observable(a, &cone(&filter_from_point(lambda, v)?), v.eps())
}

/// An order-preserving `mu` and an order-reversing `nu` on the down-set of
/// a context, with `mu <= nu`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderPair {
    pub mu: BTreeMap<ContextId, f64>,
    pub nu: BTreeMap<ContextId, f64>,
}

impl OrderPair {
    pub fn interval(&self, id: &ContextId) -> Option<(f64, f64)> {
        Some((*self.mu.get(id)?, *self.nu.get(id)?))
    }

    /// Violated invariants, as human-readable messages.
    pub fn violations(&self, poset: &ContextPoset, eps: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.mu.len() != self.nu.len() || self.mu.keys().ne(self.nu.keys()) {
            out.push("mu and nu have different domains".into());
            return out;
        }
        for (id, (&m, &n)) in self.mu.keys().zip(self.mu.values().zip(self.nu.values())) {
            if m > n + eps {
                out.push(format!("mu > nu at {id}: {m} > {n}"));
            }
        }
        let idx: Vec<(usize, &ContextId)> = self
            .mu
            .keys()
            .filter_map(|id| poset.index_of(id).map(|i| (i, id)))
            .collect();
        for &(sub, sub_id) in &idx {
            for &(sup, sup_id) in &idx {
                if sub != sup && poset.leq(sub, sup) {
                    if self.mu[sub_id] > self.mu[sup_id] + eps {
                        out.push(format!("mu decreases from {sub_id} up to {sup_id}"));
                    }
                    if self.nu[sub_id] < self.nu[sup_id] - eps {
                        out.push(format!("nu increases from {sub_id} up to {sup_id}"));
                    }
                }
            }
        }
        out
    }
}

/// The natural transformation `δ(A)`: for each context and each point of its
/// spectrum, an [`OrderPair`] on the context's down-set.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorArrow {
    poset_key: String,
    components: Vec<Vec<OrderPair>>,
}

impl OperatorArrow {
    pub(crate) fn from_parts(poset: &ContextPoset, components: Vec<Vec<OrderPair>>) -> Self {
        Self {
            poset_key: poset.key().to_owned(),
            components,
        }
    }

    pub fn poset_key(&self) -> &str {
        &self.poset_key
    }

    /// Pairs of the context at poset index `v`, indexed by atom.
    pub fn component(&self, v: usize) -> &[OrderPair] {
        &self.components[v]
    }

    pub fn components(&self) -> &[Vec<OrderPair>] {
        &self.components
    }

    pub fn pair(&self, poset: &ContextPoset, id: &ContextId, atom: usize) -> Option<&OrderPair> {
        if poset.key() != self.poset_key {
            return None;
        }
        self.components.get(poset.index_of(id)?)?.get(atom)
    }

    /// Arrows `(sub, sup)` and points at `sup` where restricting the pair to
    /// `↓sub` differs from the pair of the restricted point.
    pub fn naturality_violations(&self, poset: &ContextPoset) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (sub, sup) in poset.arrows() {
            let map = poset.restriction(sup, sub).expect("arrow");
            let below: Vec<&ContextId> = poset
                .down_set(sub)
                .into_iter()
                .map(|i| poset.context(i).id())
                .collect();
            for (lambda, pair) in self.components[sup].iter().enumerate() {
                let restricted = &self.components[sub][map[lambda]];
                let agrees = below.iter().all(|id| {
                    pair.mu.get(*id) == restricted.mu.get(*id)
                        && pair.nu.get(*id) == restricted.nu.get(*id)
                }) && restricted.mu.len() == below.len();
                if !agrees {
                    out.push((sub, sup, lambda));
                }
            }
        }
        out
    }
}

/// Assembles `δ(A)` over `poset`: `mu_λ(V') = λ|_{V'}(δⁱ(A)_{V'})` and
/// `nu_λ(V') = λ|_{V'}(δᵒ(A)_{V'})`.
pub fn operator_arrow(a: &HermitianOperator, poset: &ContextPoset) -> Result<OperatorArrow> {
    let inner: Vec<Vec<f64>> = poset
        .contexts()
        .iter()
        .map(|v| inner_values(a, v))
        .collect::<Result<_>>()?;
    let outer: Vec<Vec<f64>> = poset
        .contexts()
        .iter()
        .map(|v| outer_values(a, v))
        .collect::<Result<_>>()?;

    let components = (0..poset.len())
        .map(|v| {
            let down = poset.down_set(v);
            (0..poset.context(v).k())
                .map(|lambda| {
                    let mut mu = BTreeMap::new();
                    let mut nu = BTreeMap::new();
                    for &sub in &down {
                        let r = poset.restriction(v, sub).expect("down-set")[lambda];
                        let id = poset.context(sub).id().clone();
                        mu.insert(id.clone(), inner[sub][r]);
                        nu.insert(id, outer[sub][r]);
                    }
                    OrderPair { mu, nu }
                })
                .collect()
        })
        .collect();
    Ok(OperatorArrow::from_parts(poset, components))
}
