//! Gel'fand spectra, restriction maps and the spectral presheaf over a
//! [`ContextPoset`], with the Heyting algebra of clopen subobjects.
//!
//! Spectra are finite, so the Gel'fand topology is discrete and every subset
//! of a spectrum is clopen. A point of the spectrum of a context is the
//! character that sends one atom to 1 and all others to 0; it is stored as the
//! index of that atom.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::context::{Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, Projection};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GelfandPoint {
    pub context: ContextId,
    pub atom: usize,
}

impl GelfandPoint {
    fn check(&self, v: &Context) -> Result<()> {
        if &self.context != v.id() || self.atom >= v.k() {
            return Err(Error::NotInContext {
                context: v.id().to_string(),
            });
        }
        Ok(())
    }
}

pub fn spectrum(v: &Context) -> Vec<GelfandPoint> {
    (0..v.k())
        .map(|atom| GelfandPoint {
            context: v.id().clone(),
            atom,
        })
        .collect()
}

/// `λ(A)` for `A` in the context: the coefficient of `A` on `λ`'s atom.
pub fn evaluate(lambda: &GelfandPoint, v: &Context, a: &HermitianOperator) -> Result<f64> {
    lambda.check(v)?;
    let coeffs = v.coefficients(a).ok_or_else(|| Error::NotInContext {
        context: v.id().to_string(),
    })?;
    Ok(coeffs[lambda.atom])
}

/// Restriction `λ ↦ λ|_{V'}` along `sub ⊆ v`.
pub fn restrict(lambda: &GelfandPoint, v: &Context, sub: &Context) -> Result<GelfandPoint> {
    lambda.check(v)?;
    let map = v.restriction_map(sub).ok_or_else(|| Error::NotIncluded {
        sub: sub.id().to_string(),
        sup: v.id().to_string(),
    })?;
    Ok(GelfandPoint {
        context: sub.id().clone(),
        atom: map[lambda.atom],
    })
}

/// The clopen subset `{λ : λ(P) = 1}` of the spectrum, for `P` in the context.
pub fn alpha(p: &Projection, v: &Context) -> Result<BTreeSet<usize>> {
    v.decompose_projection(p).ok_or_else(|| Error::NotInContext {
        context: v.id().to_string(),
    })
}

pub fn alpha_inverse(points: &BTreeSet<usize>, v: &Context) -> Projection {
    v.atom_sum(points)
}

/// A subobject of the spectral presheaf: one subset of each spectrum,
/// closed under every restriction map of the poset.
///
/// Components are aligned with the poset's context order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenSubobject {
    poset_key: String,
    components: Vec<BTreeSet<usize>>,
}

impl ClopenSubobject {
    /// Validates the restriction-closure condition.
    pub fn new(poset: &ContextPoset, components: Vec<BTreeSet<usize>>) -> Result<Self> {
        if components.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        for (i, comp) in components.iter().enumerate() {
            if comp.iter().any(|&a| a >= poset.context(i).k()) {
                return Err(Error::NotInContext {
                    context: poset.context(i).id().to_string(),
                });
            }
        }
        let s = Self {
            poset_key: poset.key().to_owned(),
            components,
        };
        if let Some((sup, sub)) = s.closure_violation(poset) {
            return Err(Error::NotRestrictionClosed {
                sup: poset.context(sup).id().to_string(),
                sub: poset.context(sub).id().to_string(),
            });
        }
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(poset: &ContextPoset, components: Vec<BTreeSet<usize>>) -> Self {
        Self {
            poset_key: poset.key().to_owned(),
            components,
        }
    }

    pub fn top(poset: &ContextPoset) -> Self {
        let components = poset.contexts().iter().map(|c| (0..c.k()).collect()).collect();
        Self::from_parts_unchecked(poset, components)
    }

    pub fn bottom(poset: &ContextPoset) -> Self {
        Self::from_parts_unchecked(poset, vec![BTreeSet::new(); poset.len()])
    }

    pub fn poset_key(&self) -> &str {
        &self.poset_key
    }

    pub fn components(&self) -> &[BTreeSet<usize>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &BTreeSet<usize> {
        &self.components[i]
    }

    pub fn component_by_id(&self, poset: &ContextPoset, id: &ContextId) -> Option<&BTreeSet<usize>> {
        if poset.key() != self.poset_key {
            return None;
        }
        poset.index_of(id).map(|i| &self.components[i])
    }

    pub fn is_bottom(&self) -> bool {
        self.components.iter().all(BTreeSet::is_empty)
    }

    /// First arrow `(sup, sub)` along which some point leaves the family.
    pub fn closure_violation(&self, poset: &ContextPoset) -> Option<(usize, usize)> {
        for (sub, sup) in poset.arrows() {
            let map = poset.restriction(sup, sub).expect("arrow has a restriction");
            if self.components[sup]
                .iter()
                .any(|&a| !self.components[sub].contains(&map[a]))
            {
                return Some((sup, sub));
            }
        }
        None
    }

    pub fn is_restriction_closed(&self, poset: &ContextPoset) -> bool {
        poset.key() == self.poset_key && self.closure_violation(poset).is_none()
    }
}

fn same_poset(s: &ClopenSubobject, t: &ClopenSubobject) -> Result<()> {
    if s.poset_key != t.poset_key || s.components.len() != t.components.len() {
        return Err(Error::PosetMismatch);
    }
    Ok(())
}

fn zip_with(
    s: &ClopenSubobject,
    t: &ClopenSubobject,
    f: impl Fn(&BTreeSet<usize>, &BTreeSet<usize>) -> BTreeSet<usize>,
) -> Result<ClopenSubobject> {
    same_poset(s, t)?;
    Ok(ClopenSubobject {
        poset_key: s.poset_key.clone(),
        components: s
            .components
            .iter()
            .zip(&t.components)
            .map(|(a, b)| f(a, b))
            .collect(),
    })
}

pub fn sub_meet(s: &ClopenSubobject, t: &ClopenSubobject) -> Result<ClopenSubobject> {
    zip_with(s, t, |a, b| a.intersection(b).copied().collect())
}

pub fn sub_join(s: &ClopenSubobject, t: &ClopenSubobject) -> Result<ClopenSubobject> {
    zip_with(s, t, |a, b| a.union(b).copied().collect())
}

pub fn sub_leq(s: &ClopenSubobject, t: &ClopenSubobject) -> Result<bool> {
    same_poset(s, t)?;
    Ok(s.components.iter().zip(&t.components).all(|(a, b)| a.is_subset(b)))
}

/// Heyting implication: `λ ∈ (S ⇒ T)_V` iff for every `V' ⊆ V` in the poset,
/// `λ|_{V'} ∈ S_{V'}` implies `λ|_{V'} ∈ T_{V'}`.
pub fn sub_implies(
    poset: &ContextPoset,
    s: &ClopenSubobject,
    t: &ClopenSubobject,
) -> Result<ClopenSubobject> {
    same_poset(s, t)?;
    if s.poset_key != poset.key() {
        return Err(Error::PosetMismatch);
    }
    let components = (0..poset.len())
        .map(|v| {
            let down = poset.down_set(v);
            (0..poset.context(v).k())
                .filter(|&lambda| {
                    down.iter().all(|&sub| {
                        let r = poset.restriction(v, sub).expect("down-set member")[lambda];
                        !s.components[sub].contains(&r) || t.components[sub].contains(&r)
                    })
                })
                .collect()
        })
        .collect();
    Ok(ClopenSubobject {
        poset_key: s.poset_key.clone(),
        components,
    })
}

/// Heyting negation `S ⇒ ⊥`.
pub fn sub_not(poset: &ContextPoset, s: &ClopenSubobject) -> Result<ClopenSubobject> {
    sub_implies(poset, s, &ClopenSubobject::bottom(poset))
}

/// Every clopen subobject of the spectral presheaf over `poset`, or `None`
/// if there are more than `limit`.
pub fn enumerate_subobjects(poset: &ContextPoset, limit: usize) -> Option<Vec<ClopenSubobject>> {
    // contexts are assigned largest-first so that every arrow is checked as
    // soon as its smaller end gets a value
    let mut order: Vec<usize> = (0..poset.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(poset.context(i).k()));
    let mut out = Vec::new();
    let mut current = vec![BTreeSet::new(); poset.len()];
    let mut assigned = vec![false; poset.len()];

    fn subsets(k: usize) -> impl Iterator<Item = BTreeSet<usize>> {
        (0u64..(1u64 << k)).map(move |mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        pos: usize,
        order: &[usize],
        poset: &ContextPoset,
        current: &mut Vec<BTreeSet<usize>>,
        assigned: &mut Vec<bool>,
        out: &mut Vec<ClopenSubobject>,
        limit: usize,
    ) -> bool {
        if pos == order.len() {
            if out.len() >= limit {
                return false;
            }
            out.push(ClopenSubobject::from_parts_unchecked(poset, current.clone()));
            return true;
        }
        let v = order[pos];
        for cand in subsets(poset.context(v).k()) {
            let ok = (0..poset.len()).all(|u| {
                if !assigned[u] || u == v {
                    return true;
                }
                if poset.leq(v, u) {
                    let map = poset.restriction(u, v).expect("u above v");
                    current[u].iter().all(|a| cand.contains(&map[*a]))
                } else if poset.leq(u, v) {
                    let map = poset.restriction(v, u).expect("v above u");
                    cand.iter().all(|a| current[u].contains(&map[*a]))
                } else {
                    true
                }
            });
            if ok {
                current[v] = cand;
                assigned[v] = true;
                let cont = go(pos + 1, order, poset, current, assigned, out, limit);
                assigned[v] = false;
                current[v] = BTreeSet::new();
                if !cont {
                    return false;
                }
            }
        }
        true
    }

    go(0, &order, poset, &mut current, &mut assigned, &mut out, limit).then_some(out)
}

/// All global sections: choices of one point per context compatible with
/// every restriction map. Each section is aligned with the poset order.
pub fn global_sections(poset: &ContextPoset) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..poset.len()).collect();
    order.sort_by(|&a, &b| {
        poset
            .context(b)
            .k()
            .cmp(&poset.context(a).k())
            .then_with(|| poset.context(a).id().cmp(poset.context(b).id()))
    });
    let mut out = Vec::new();
    let mut choice: Vec<Option<usize>> = vec![None; poset.len()];

    fn go(
        pos: usize,
        order: &[usize],
        poset: &ContextPoset,
        choice: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == order.len() {
            out.push(choice.iter().map(|c| c.expect("all assigned")).collect());
            return;
        }
        let v = order[pos];
        // a chosen context above v forces the value at v
        let forced = (0..poset.len()).find_map(|u| {
            let a = choice[u]?;
            (u != v && poset.leq(v, u)).then(|| poset.restriction(u, v).expect("u above v")[a])
        });
        let candidates: Vec<usize> = match forced {
            Some(a) => vec![a],
            None => (0..poset.context(v).k()).collect(),
        };
        for lambda in candidates {
            let ok = (0..poset.len()).all(|u| match choice[u] {
                None => true,
                Some(a) if u != v && poset.leq(v, u) => {
                    poset.restriction(u, v).expect("u above v")[a] == lambda
                }
                Some(a) if u != v && poset.leq(u, v) => {
                    poset.restriction(v, u).expect("v above u")[lambda] == a
                }
                Some(_) => true,
            });
            if ok {
                choice[v] = Some(lambda);
                go(pos + 1, order, poset, choice, out);
                choice[v] = None;
            }
        }
    }

    if !poset.is_empty() {
        go(0, &order, poset, &mut choice, &mut out);
    }
    out
}
