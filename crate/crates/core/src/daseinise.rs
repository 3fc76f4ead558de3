//! Outer and inner approximation of projections to contexts, and the
//! daseinised subobject `δ(P)` of the spectral presheaf.

use std::collections::BTreeSet;

use crate::context::{Context, ContextPoset};
use crate::linalg::{proj_leq, proj_meet, spectral_norm, Projection};
use crate::presheaf::ClopenSubobject;

/// Atoms of `v` not orthogonal to `p`. Their sum is the smallest projection
/// of `v` above `p`, because the projection lattice of a context is atomic.
pub fn delta_o_atoms(p: &Projection, v: &Context) -> BTreeSet<usize> {
    (0..v.k())
        .filter(|&i| spectral_norm(&(v.atom(i).matrix() * p.matrix())) > v.eps())
        .collect()
}

/// Atoms of `v` under `p`; their sum is the largest projection of `v` below `p`.
pub fn delta_i_atoms(p: &Projection, v: &Context) -> BTreeSet<usize> {
    (0..v.k())
        .filter(|&i| proj_leq(v.atom(i), p, v.eps()).unwrap_or(false))
        .collect()
}

/// Outer daseinisation: the smallest projection in `v` that is `>= p`.
pub fn delta_o_proj(p: &Projection, v: &Context) -> Projection {
    v.atom_sum(&delta_o_atoms(p, v))
}

/// Inner daseinisation: the largest projection in `v` that is `<= p`.
pub fn delta_i_proj(p: &Projection, v: &Context) -> Projection {
    v.atom_sum(&delta_i_atoms(p, v))
}

/// `δ(P)`: at each context the points of the outer approximation.
pub fn daseinise_projection(p: &Projection, poset: &ContextPoset) -> ClopenSubobject {
    let components = poset
        .contexts()
        .iter()
        .map(|v| delta_o_atoms(p, v))
        .collect();
    ClopenSubobject::from_parts_unchecked(poset, components)
}

/// A projection whose daseinisation is `s`, if there is one.
///
/// Any such `R` satisfies `R <= α⁻¹(S_V)` at every context, hence lies under
/// their meet `M`; and `δ` is monotone with `δ(M) <= S`. So `s` is in the
/// image of `δ` exactly when `δ(M) = S`.
pub fn daseinisation_preimage(s: &ClopenSubobject, poset: &ContextPoset) -> Option<Projection> {
    if s.poset_key() != poset.key() {
        return None;
    }
    let eps = poset.eps();
    let mut m = Projection::identity(poset.dim());
    for (i, v) in poset.contexts().iter().enumerate() {
        m = proj_meet(&m, &v.atom_sum(s.component(i)), eps).ok()?;
    }
    (&daseinise_projection(&m, poset) == s).then_some(m)
}
