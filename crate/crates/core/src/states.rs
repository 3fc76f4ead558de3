//! Pseudo-states of unit vectors, values of operator arrows on them, and the
//! checks relating those values to expectation values.

use num_complex::Complex64;
use serde::Serialize;

use crate::context::{ContextId, ContextPoset};
use crate::daseinise::daseinise_projection;
use crate::error::{Error, Result};
use crate::linalg::{eigenstructure, CVector, HermitianOperator, Projection};
use crate::operator::{inner_values, operator_arrow, outer_values, OperatorArrow, OrderPair};
use crate::presheaf::ClopenSubobject;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector {
    amplitudes: CVector,
}

impl UnitVector {
    pub fn new(amplitudes: CVector, eps: f64) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > eps {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Scales a non-zero vector to unit length.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: v.map(|z| z / norm),
        })
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(
            v.len(),
            v.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projection(&self) -> Projection {
        Projection::onto_vector(&self.amplitudes).expect("unit vector is non-zero")
    }
}

/// `w^ψ = δ(|ψ⟩⟨ψ|)`.
pub fn pseudo_state(psi: &UnitVector, poset: &ContextPoset) -> Result<ClopenSubobject> {
    if psi.dim() != poset.dim() {
        return Err(Error::DimensionMismatch {
            expected: poset.dim(),
            found: psi.dim(),
        });
    }
    Ok(daseinise_projection(&psi.projection(), poset))
}

/// `δ(A)(w)`: at each context, the pairs of the points of `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueSubobject {
    poset_key: String,
    /// Per context, `(point, pair)` for each point of the state's component.
    components: Vec<Vec<(usize, OrderPair)>>,
}

impl ValueSubobject {
    pub fn components(&self) -> &[Vec<(usize, OrderPair)>] {
        &self.components
    }

    pub fn component(&self, v: usize) -> &[(usize, OrderPair)] {
        &self.components[v]
    }

    pub fn poset_key(&self) -> &str {
        &self.poset_key
    }
}

pub fn value(arrow: &OperatorArrow, w: &ClopenSubobject) -> Result<ValueSubobject> {
    if arrow.poset_key() != w.poset_key() || arrow.components().len() != w.components().len() {
        return Err(Error::PosetMismatch);
    }
    let components = w
        .components()
        .iter()
        .enumerate()
        .map(|(v, points)| {
            points
                .iter()
                .map(|&lambda| (lambda, arrow.component(v)[lambda].clone()))
                .collect()
        })
        .collect();
    Ok(ValueSubobject {
        poset_key: w.poset_key().to_owned(),
        components,
    })
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation(psi: &UnitVector, a: &HermitianOperator) -> Result<f64> {
    a.quadratic_form(psi.amplitudes())
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalCheck {
    pub context: ContextId,
    pub mu: f64,
    pub nu: f64,
    pub contains: bool,
}

/// One point of the pseudo-state at one context, with the intervals its
/// pair assigns to every context below.
#[derive(Clone, Debug, Serialize)]
pub struct ContainmentRow {
    pub context: ContextId,
    pub point: usize,
    pub intervals: Vec<IntervalCheck>,
    pub pass: bool,
}

/// The hull `[min mu, max nu]` over all points of the pseudo-state at one
/// context.
#[derive(Clone, Debug, Serialize)]
pub struct HullCheck {
    pub context: ContextId,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub expectation: f64,
    pub tolerance: f64,
    pub rows: Vec<ContainmentRow>,
    pub hull: Vec<HullCheck>,
}

impl ContainmentReport {
    /// Intervals not containing the expectation value.
    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| &r.intervals)
            .filter(|i| !i.contains)
            .count()
    }

    pub fn hull_violations(&self) -> usize {
        self.hull.iter().filter(|h| !h.pass).count()
    }

    pub fn first_violation(&self) -> Option<(&ContainmentRow, &IntervalCheck)> {
        self.rows
            .iter()
            .find_map(|r| r.intervals.iter().find(|i| !i.contains).map(|i| (r, i)))
    }
}

/// Checks every interval of `δ(A)(w^ψ)` against `⟨ψ|A|ψ⟩`, and separately
/// the per-context hull of those intervals. Violations are reported, not
/// raised.
pub fn check_containment(
    psi: &UnitVector,
    a: &HermitianOperator,
    poset: &ContextPoset,
) -> Result<ContainmentReport> {
    let eps = poset.eps();
    let exp = expectation(psi, a)?;
    let w = pseudo_state(psi, poset)?;
    let arrow = operator_arrow(a, poset)?;
    let val = value(&arrow, &w)?;
    // scale the slack with the operator so large spectra do not trip on rounding
    let spread = {
        let es = eigenstructure(a, eps);
        es.max().abs().max(es.min().abs()).max(1.0)
    };
    let tol = eps * spread;

    let mut rows = Vec::new();
    for (v, pairs) in val.components().iter().enumerate() {
        for (lambda, pair) in pairs {
            let intervals: Vec<IntervalCheck> = pair
                .mu
                .iter()
                .zip(pair.nu.values())
                .map(|((id, &mu), &nu)| IntervalCheck {
                    context: id.clone(),
                    mu,
                    nu,
                    contains: mu - tol <= exp && exp <= nu + tol,
                })
                .collect();
            let pass = intervals.iter().all(|i| i.contains);
            rows.push(ContainmentRow {
                context: poset.context(v).id().clone(),
                point: *lambda,
                intervals,
                pass,
            });
        }
    }

    let mut hull = Vec::new();
    for (v, points) in w.components().iter().enumerate() {
        let ctx = poset.context(v);
        let inner = inner_values(a, ctx)?;
        let outer = outer_values(a, ctx)?;
        let lo = points.iter().map(|&l| inner[l]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|&l| outer[l]).fold(f64::NEG_INFINITY, f64::max);
        hull.push(HullCheck {
            context: ctx.id().clone(),
            lo,
            hi,
            pass: lo - tol <= exp && exp <= hi + tol,
        });
    }

    Ok(ContainmentReport {
        expectation: exp,
        tolerance: tol,
        rows,
        hull,
    })
}
