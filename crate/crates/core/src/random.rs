//! Seeded random instances: unitaries, projections, Hermitian operators,
//! contexts and posets.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::context::{build_poset, Closure, Context, ContextPoset};
use crate::error::Result;
use crate::linalg::{CMatrix, CVector, HermitianOperator, Projection, DEFAULT_TOL};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-distributed unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v.map(|z| z / norm);
        }
    }
}

/// Columns of a Haar unitary.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<CVector> {
    let u = random_unitary(rng, n);
    (0..n).map(|j| u.column(j).into_owned()).collect()
}

pub fn random_projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Projection {
    if rank == 0 {
        return Projection::zero(n);
    }
    let basis = random_basis(rng, n);
    Projection::onto_span(n, &basis[..rank]).expect("orthonormal columns")
}

/// Random rank in `0..=n`, then a random projection of that rank.
pub fn random_any_projection<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Projection {
    let rank = rng.random_range(0..=n);
    random_projection(rng, n, rank)
}

/// `U diag(spectrum) U†` for Haar `U`.
pub fn random_hermitian_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    spectrum: &[f64],
) -> HermitianOperator {
    let n = spectrum.len();
    let u = random_unitary(rng, n);
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j { Complex64::new(spectrum[i], 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    HermitianOperator::symmetrized(&u * d * u.adjoint())
}

/// Non-degenerate spectrum drawn uniformly from `[-1, 1]`, with gaps of at
/// least `0.05`.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        s.sort_by(f64::total_cmp);
        if s.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return s;
        }
    }
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    let s = random_spectrum(rng, n);
    random_hermitian_with_spectrum(rng, &s)
}

/// Hermitian operator with a spectrum of `distinct` values (`1 <= distinct
/// <= n`), each value repeated at least once.
pub fn random_degenerate_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    distinct: usize,
) -> HermitianOperator {
    let values = random_spectrum(rng, distinct);
    let mut spectrum: Vec<f64> = values.clone();
    while spectrum.len() < n {
        spectrum.push(values[rng.random_range(0..distinct)]);
    }
    random_hermitian_with_spectrum(rng, &spectrum)
}

/// Maximal context from the rank-one projections of a random basis.
pub fn random_maximal_context<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Context {
    let atoms = random_basis(rng, n)
        .iter()
        .map(|v| Projection::onto_vector(v).expect("unit vector"))
        .collect();
    Context::from_atoms(atoms, DEFAULT_TOL).expect("basis projections partition unity")
}

/// Random context with `k` atoms (`2 <= k <= n`), obtained by grouping the
/// vectors of a random basis.
pub fn random_context<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Context {
    let basis = random_basis(rng, n);
    let groups = random_surjection(rng, n, k);
    group_basis(n, &basis, &groups, k)
}

fn random_surjection<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..k).collect();
    while labels.len() < n {
        labels.push(rng.random_range(0..k));
    }
    labels.shuffle(rng);
    labels
}

fn group_basis(n: usize, basis: &[CVector], groups: &[usize], k: usize) -> Context {
    let atoms = (0..k)
        .map(|g| {
            let vs: Vec<CVector> = basis
                .iter()
                .zip(groups)
                .filter(|(_, &l)| l == g)
                .map(|(v, _)| v.clone())
                .collect();
            Projection::onto_span(n, &vs).expect("orthonormal vectors")
        })
        .collect();
    Context::from_atoms(atoms, DEFAULT_TOL).expect("grouped basis partitions unity")
}

/// Maximal context one of whose atom sums is `p`: a random basis of the range
/// of `p` followed by one of its complement. `p` must be neither 0 nor 1.
pub fn maximal_context_containing<R: Rng + ?Sized>(rng: &mut R, p: &Projection) -> Context {
    let atoms = basis_adapted_to(rng, p)
        .iter()
        .map(|v| Projection::onto_vector(v).expect("unit vector"))
        .collect();
    Context::from_atoms(atoms, DEFAULT_TOL).expect("adapted basis partitions unity")
}

/// Orthonormal basis whose first `rank p` vectors span the range of `p`.
fn basis_adapted_to<R: Rng + ?Sized>(rng: &mut R, p: &Projection) -> Vec<CVector> {
    let n = p.dim();
    let u = random_unitary(rng, n);
    let q = p.complement();
    let mut out: Vec<CVector> = Vec::with_capacity(n);
    for (target, rank) in [(p.matrix(), p.rank()), (q.matrix(), q.rank())] {
        // project random vectors into the subspace and orthonormalize
        let mut got = 0;
        let mut j = 0;
        while got < rank {
            let mut v = target * u.column(j % n).into_owned();
            if j >= n {
                v = target * random_unit_vector(rng, n);
            }
            j += 1;
            for w in &out {
                let c = w.dotc(&v);
                v -= w * c;
            }
            let norm = v.norm();
            if norm > 1e-6 {
                out.push(v.map(|z| z / norm));
                got += 1;
            }
        }
    }
    out
}

/// Random context for which `p` is one of the atom sums, with `k` atoms.
pub fn context_containing<R: Rng + ?Sized>(rng: &mut R, p: &Projection, k: usize) -> Context {
    let n = p.dim();
    let r = p.rank();
    if r == 0 || r == n {
        return random_context(rng, n, k);
    }
    let basis = basis_adapted_to(rng, p);
    // split the two blocks separately so that `p` stays a sum of atoms
    let lo = 1.max(k.saturating_sub(n - r));
    let hi = r.min(k - 1);
    let k_in = rng.random_range(lo..=hi);
    let mut groups = random_surjection(rng, r, k_in);
    groups.extend(random_surjection(rng, n - r, k - k_in).into_iter().map(|g| g + k_in));
    group_basis(n, &basis, &groups, k)
}

/// Poset from a few random seeds in dimension `n`, closed under coarsening.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, seeds: usize) -> Result<ContextPoset> {
    let contexts: Vec<Context> = (0..seeds.max(1))
        .map(|_| {
            let k = rng.random_range(2..=n);
            random_context(rng, n, k)
        })
        .collect();
    build_poset(
        &contexts,
        Closure {
            coarsening: true,
            intersection: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::proj_leq;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(1);
        let u = random_unitary(&mut r, 4);
        let err = (&u.adjoint() * &u - CMatrix::identity(4, 4)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn random_context_has_requested_size() {
        let mut r = rng(2);
        for n in 2..5 {
            for k in 2..=n {
                let c = random_context(&mut r, n, k);
                assert_eq!(c.k(), k);
                assert_eq!(c.dim(), n);
            }
        }
    }

    #[test]
    fn adapted_context_contains_projection() {
        let mut r = rng(3);
        for rank in 1..3 {
            let p = random_projection(&mut r, 3, rank);
            let v = maximal_context_containing(&mut r, &p);
            assert!(v.is_maximal());
            assert!(v.decompose_projection(&p).is_some());
            for k in 2..=3 {
                let w = context_containing(&mut r, &p, k);
                assert!(w.decompose_projection(&p).is_some(), "k = {k}");
            }
            assert!(proj_leq(&p, &Projection::identity(3), 1e-9).unwrap());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_hermitian(&mut rng(9), 3);
        let b = random_hermitian(&mut rng(9), 3);
        assert!(a.approx_eq(&b, 0.0));
    }
}
