//! Contexts (abelian subalgebras of `B(C^n)`) and finite posets of them.
//!
//! A context is stored through its atoms: pairwise-orthogonal non-zero
//! projections summing to the identity. The subalgebra is their complex
//! span. The trivial algebra `C·1` (a single atom) is excluded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{eigenstructure, proj_leq, spectral_norm, HermitianOperator, Projection};

/// Order-independent identifier of a context, derived from its atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextId(String);

impl ContextId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn from_string(s: String) -> Self {
        Self(s)
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type AtomKey = Vec<(i64, i64)>;

fn atom_key(p: &Projection) -> AtomKey {
    // 6 decimal digits
    let round = |x: f64| (x * 1e6).round() as i64;
    p.matrix().iter().map(|z| (round(z.re), round(z.im))).collect()
}

#[derive(Clone, Debug)]
pub struct Context {
    atoms: Vec<Projection>,
    id: ContextId,
    eps: f64,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Context {
    /// Validates that `atoms` partition the identity and stores them in
    /// canonical order, so atom indices do not depend on the input order.
    pub fn from_atoms(atoms: Vec<Projection>, eps: f64) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::NotAPartition(
                "a context needs at least two atoms; the trivial algebra is excluded".into(),
            ));
        }
        let dim = atoms[0].dim();
        if atoms.iter().any(|a| a.dim() != dim) {
            return Err(Error::MixedDimensions);
        }
        if let Some(i) = atoms.iter().position(Projection::is_zero) {
            return Err(Error::NotAPartition(format!("atom {i} is zero")));
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                let overlap = spectral_norm(&(atoms[i].matrix() * atoms[j].matrix()));
                if overlap > eps {
                    return Err(Error::NotAPartition(format!(
                        "atoms {i} and {j} are not orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
        }
        let total = atoms
            .iter()
            .fold(crate::CMatrix::zeros(dim, dim), |acc, a| acc + a.matrix());
        let defect = spectral_norm(&(total - crate::CMatrix::identity(dim, dim)));
        if defect > eps {
            return Err(Error::NotAPartition(format!(
                "atoms do not sum to the identity (defect {defect:.3e})"
            )));
        }

        let mut keyed: Vec<(AtomKey, Projection)> =
            atoms.into_iter().map(|a| (atom_key(&a), a)).collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0));

        let mut hasher = Sha256::new();
        hasher.update((dim as u64).to_le_bytes());
        for (key, _) in &keyed {
            hasher.update([0xffu8]);
            for (re, im) in key {
                hasher.update(re.to_le_bytes());
                hasher.update(im.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();

        Ok(Self {
            atoms: keyed.into_iter().map(|(_, a)| a).collect(),
            id: ContextId(format!("ctx-{hex}")),
            eps,
        })
    }

    pub fn atoms(&self) -> &[Projection] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Projection {
        &self.atoms[i]
    }

    /// Number of atoms.
    pub fn k(&self) -> usize {
        self.atoms.len()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn id(&self) -> &ContextId {
        &self.id
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Whether every atom has rank one.
    pub fn is_maximal(&self) -> bool {
        self.k() == self.dim()
    }

    /// Sum of the atoms with the given indices.
    pub fn atom_sum(&self, indices: &BTreeSet<usize>) -> Projection {
        Projection::orthogonal_sum(self.dim(), indices.iter().map(|&i| &self.atoms[i]))
    }

    /// If `p` lies in the context, the indices of the atoms it is the sum of.
    pub fn decompose_projection(&self, p: &Projection) -> Option<BTreeSet<usize>> {
        if p.dim() != self.dim() {
            return None;
        }
        let under: BTreeSet<usize> = (0..self.k())
            .filter(|&i| proj_leq(&self.atoms[i], p, self.eps).unwrap_or(false))
            .collect();
        let n = self.dim();
        let sum = under
            .iter()
            .fold(crate::CMatrix::zeros(n, n), |acc, &i| acc + self.atoms[i].matrix());
        (spectral_norm(&(sum - p.matrix())) <= self.eps).then_some(under)
    }

    /// If `a` lies in the context, its coefficients on the atoms.
    pub fn coefficients(&self, a: &HermitianOperator) -> Option<Vec<f64>> {
        if a.dim() != self.dim() {
            return None;
        }
        let coeffs: Vec<f64> = self
            .atoms
            .iter()
            .map(|q| (q.matrix() * a.matrix()).trace().re / q.rank() as f64)
            .collect();
        let terms: Vec<(f64, &Projection)> = coeffs.iter().copied().zip(&self.atoms).collect();
        let rebuilt = HermitianOperator::linear_combination(self.dim(), &terms).ok()?;
        let scale = spectral_norm(a.matrix()).max(1.0);
        (rebuilt.distance(a) <= self.eps * scale).then_some(coeffs)
    }

    /// For `sub ⊆ self`: maps each atom of `self` to the atom of `sub` above it.
    pub fn restriction_map(&self, sub: &Context) -> Option<Vec<usize>> {
        if sub.dim() != self.dim() {
            return None;
        }
        let mut map = vec![usize::MAX; self.k()];
        for (j, coarse) in sub.atoms.iter().enumerate() {
            let block = self.decompose_projection(coarse)?;
            for i in block {
                if map[i] != usize::MAX {
                    return None;
                }
                map[i] = j;
            }
        }
        map.iter().all(|&j| j != usize::MAX).then_some(map)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.atoms.iter().map(|a| a.rank().to_string()).collect();
        write!(f, "{} (atom ranks {})", self.id, ranks.join("+"))
    }
}

pub fn context_from_atoms(atoms: Vec<Projection>, eps: f64) -> Result<Context> {
    Context::from_atoms(atoms, eps)
}

/// The context generated by a single operator: its eigenprojections.
pub fn context_from_operator(a: &HermitianOperator, eps: f64) -> Result<Context> {
    let es = eigenstructure(a, eps);
    if es.eigenvalues.len() < 2 {
        return Err(Error::ScalarOperator);
    }
    Context::from_atoms(es.eigenprojections, eps)
}

/// `sub ⊆ sup`: every atom of `sub` is a sum of atoms of `sup`.
pub fn includes(sub: &Context, sup: &Context) -> bool {
    sup.restriction_map(sub).is_some()
}

/// All set partitions of `0..k`, as block-index assignments.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max.min(k) {
            if i == 0 && b > 0 {
                break;
            }
            cur.push(b);
            let next = if b == max { max + 1 } else { max };
            go(i + 1, k, cur, next, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::with_capacity(k), 0, &mut out);
    out
}

fn context_from_blocks(v: &Context, assignment: &[usize]) -> Result<Context> {
    let blocks = assignment.iter().max().map_or(0, |m| m + 1);
    let mut groups = vec![BTreeSet::new(); blocks];
    for (atom, &b) in assignment.iter().enumerate() {
        groups[b].insert(atom);
    }
    let atoms = groups.iter().map(|g| v.atom_sum(g)).collect();
    Context::from_atoms(atoms, v.eps)
}

/// Every context whose atoms are block sums of a partition of `v`'s atoms
/// into at least two blocks, `v` itself included.
pub fn coarsenings(v: &Context) -> Vec<Context> {
    set_partitions(v.k())
        .into_iter()
        .filter(|p| p.iter().any(|&b| b > 0))
        .map(|p| context_from_blocks(v, &p).expect("block sums of a partition are a partition"))
        .collect()
}

/// The context spanned by the common coarsening of `v` and `w`, or `None`
/// when the intersection of the two algebras is `C·1`.
///
/// Two atoms with non-zero overlap must end up under the same common
/// projection, so the atoms of the intersection are the connected components
/// of the overlap graph.
pub fn intersect(v: &Context, w: &Context) -> Result<Option<Context>> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: w.dim(),
        });
    }
    let eps = v.eps.max(w.eps);
    let (kv, kw) = (v.k(), w.k());
    // union-find over v-atoms 0..kv and w-atoms kv..kv+kw
    let mut parent: Vec<usize> = (0..kv + kw).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let n = parent[c];
            parent[c] = r;
            c = n;
        }
        r
    }
    for i in 0..kv {
        for j in 0..kw {
            if spectral_norm(&(v.atoms[i].matrix() * w.atoms[j].matrix())) > eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, kv + j));
                parent[a] = b;
            }
        }
    }
    let mut components: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..kv {
        let root = find(&mut parent, i);
        components.entry(root).or_default().insert(i);
    }
    if components.len() < 2 {
        return Ok(None);
    }
    let atoms = components.values().map(|g| v.atom_sum(g)).collect();
    Context::from_atoms(atoms, eps).map(Some)
}

/// Which closure operations [`build_poset`] applies to its seeds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Closure {
    pub coarsening: bool,
    pub intersection: bool,
}

/// A finite sub-poset of the context category, ordered by inclusion.
///
/// Contexts are sorted by id; all index-based accessors refer to that order.
#[derive(Clone, Debug)]
pub struct ContextPoset {
    contexts: Vec<Context>,
    index: BTreeMap<ContextId, usize>,
    /// `restrictions[sup][sub]` is the atom map when `sub ⊆ sup`.
    restrictions: Vec<Vec<Option<Vec<usize>>>>,
    key: String,
}

impl ContextPoset {
    /// Deduplicates (by id, then by mutual inclusion) and computes the order.
    pub fn from_contexts(contexts: Vec<Context>) -> Result<Self> {
        if let Some(first) = contexts.first() {
            if contexts.iter().any(|c| c.dim() != first.dim()) {
                return Err(Error::MixedDimensions);
            }
        }
        let by_id: BTreeMap<ContextId, Context> =
            contexts.into_iter().map(|c| (c.id.clone(), c)).collect();
        let mut kept: Vec<Context> = Vec::with_capacity(by_id.len());
        for c in by_id.into_values() {
            let duplicate = kept.iter().any(|k| includes(k, &c) && includes(&c, k));
            if !duplicate {
                kept.push(c);
            }
        }

        let n = kept.len();
        let restrictions: Vec<Vec<Option<Vec<usize>>>> = (0..n)
            .map(|sup| (0..n).map(|sub| kept[sup].restriction_map(&kept[sub])).collect())
            .collect();
        let index = kept
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();

        let mut hasher = Sha256::new();
        for c in &kept {
            hasher.update(c.id.0.as_bytes());
            hasher.update([0u8]);
        }
        let key: String = hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect();

        Ok(Self {
            contexts: kept,
            index,
            restrictions,
            key,
        })
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context(&self, i: usize) -> &Context {
        &self.contexts[i]
    }

    pub fn index_of(&self, id: &ContextId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &ContextId) -> Option<&Context> {
        self.index_of(id).map(|i| &self.contexts[i])
    }

    /// Dimension of the ambient Hilbert space; 0 for an empty poset.
    pub fn dim(&self) -> usize {
        self.contexts.first().map_or(0, Context::dim)
    }

    pub fn eps(&self) -> f64 {
        self.contexts
            .iter()
            .map(Context::eps)
            .fold(crate::DEFAULT_TOL, f64::max)
    }

    /// Identifies the poset; operands of subobject operations must agree on it.
    pub fn key(&self) -> &str {
        &self.key
    }

    /// `contexts[sub] ⊆ contexts[sup]`.
    pub fn leq(&self, sub: usize, sup: usize) -> bool {
        self.restrictions[sup][sub].is_some()
    }

    /// Atom map from `contexts[sup]` down to `contexts[sub]`.
    pub fn restriction(&self, sup: usize, sub: usize) -> Option<&[usize]> {
        self.restrictions[sup][sub].as_deref()
    }

    /// Indices of all contexts below `v`, `v` included.
    pub fn down_set(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.leq(u, v)).collect()
    }

    /// All proper inclusions `(sub, sup)`.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for sup in 0..self.len() {
            for sub in 0..self.len() {
                if sub != sup && self.leq(sub, sup) {
                    out.push((sub, sup));
                }
            }
        }
        out
    }

    /// Adjacency list: for each context, the ids of the contexts properly
    /// included in it.
    pub fn adjacency(&self) -> Vec<(ContextId, Vec<ContextId>)> {
        (0..self.len())
            .map(|sup| {
                let subs = (0..self.len())
                    .filter(|&sub| sub != sup && self.leq(sub, sup))
                    .map(|sub| self.contexts[sub].id.clone())
                    .collect();
                (self.contexts[sup].id.clone(), subs)
            })
            .collect()
    }
}

/// Materializes a finite poset from seed contexts, closed under the flagged
/// operations.
pub fn build_poset(seeds: &[Context], closure: Closure) -> Result<ContextPoset> {
    if let Some(first) = seeds.first() {
        if seeds.iter().any(|c| c.dim() != first.dim()) {
            return Err(Error::MixedDimensions);
        }
    }
    let mut all: BTreeMap<ContextId, Context> =
        seeds.iter().map(|c| (c.id.clone(), c.clone())).collect();
    loop {
        let before = all.len();
        if closure.coarsening {
            let current: Vec<Context> = all.values().cloned().collect();
            for c in &current {
                for d in coarsenings(c) {
                    all.entry(d.id.clone()).or_insert(d);
                }
            }
        }
        if closure.intersection {
            let current: Vec<Context> = all.values().cloned().collect();
            for i in 0..current.len() {
                for j in (i + 1)..current.len() {
                    if let Some(m) = intersect(&current[i], &current[j])? {
                        all.entry(m.id.clone()).or_insert(m);
                    }
                }
            }
        }
        if all.len() == before {
            break;
        }
    }
    ContextPoset::from_contexts(all.into_values().collect())
}
