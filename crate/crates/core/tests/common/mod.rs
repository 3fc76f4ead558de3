//! Oracles shared by integration tests. They go straight to nalgebra and
//! never call the library's own spectral machinery.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use dasein::{CMatrix, Context, HermitianOperator};

/// Eigen-decomposition straight from nalgebra, eigenvalues ascending.
pub fn eigen(a: &HermitianOperator) -> (Vec<f64>, CMatrix) {
    let e = SymmetricEigen::new(a.matrix().clone());
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let n = a.dim();
    let vecs = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// `E_r` from a raw eigen-decomposition: the projection onto eigenvectors
/// with eigenvalue `<= r`.
pub fn step_at(vals: &[f64], vecs: &CMatrix, r: f64) -> CMatrix {
    let n = vecs.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &x) in vals.iter().enumerate() {
        if x <= r {
            let v = vecs.column(i);
            out += &v * v.adjoint();
        }
    }
    out
}

/// `B <=_s A` by scanning both raw spectral families on merged thresholds
/// and midpoints.
pub fn oracle_spectral_leq(b: &HermitianOperator, a: &HermitianOperator) -> bool {
    let (va, ea) = eigen(a);
    let (vb, eb) = eigen(b);
    let mut ts: Vec<f64> = va.iter().chain(&vb).copied().collect();
    ts.sort_by(f64::total_cmp);
    let mut points = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        points.push(t + 1e-7);
        match ts.get(i + 1) {
            // coincident thresholds up to rounding have nothing in between
            Some(&n) if n - t > 1e-6 => points.push(0.5 * (t + n)),
            _ => {}
        }
    }
    points.iter().all(|&x| {
        let pa = step_at(&va, &ea, x);
        let pb = step_at(&vb, &eb, x);
        // E^A_x <= E^B_x
        (&pb * &pa - &pa).iter().all(|z| z.norm() < 1e-6)
    })
}

pub fn combination(v: &Context, coeffs: &[f64]) -> HermitianOperator {
    let n = v.dim();
    let mut m = CMatrix::zeros(n, n);
    for (c, q) in coeffs.iter().zip(v.atoms()) {
        m += q.matrix().map(|z| z * Complex64::new(*c, 0.0));
    }
    HermitianOperator::new(m, 1e-9).unwrap()
}

pub fn grid(values: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |&x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}


/// Greatest operator of the grid over `v` spectrally below `a`, and least
/// above it.
pub fn grid_extrema(a: &HermitianOperator, v: &Context) -> (HermitianOperator, HermitianOperator) {
    let (vals, _) = eigen(a);
    let candidates: Vec<HermitianOperator> =
        grid(&vals, v.k()).iter().map(|c| combination(v, c)).collect();
    let below: Vec<&HermitianOperator> =
        candidates.iter().filter(|b| oracle_spectral_leq(b, a)).collect();
    let above: Vec<&HermitianOperator> =
        candidates.iter().filter(|b| oracle_spectral_leq(a, b)).collect();
    let max = below
        .iter()
        .find(|b| below.iter().all(|c| oracle_spectral_leq(c, b)))
        .expect("greatest element below A");
    let min = above
        .iter()
        .find(|b| above.iter().all(|c| oracle_spectral_leq(b, c)))
        .expect("least element above A");
    ((*max).clone(), (*min).clone())
}
