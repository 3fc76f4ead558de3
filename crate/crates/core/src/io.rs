//! Text documents for matrices, contexts and vectors, and the JSON forms of
//! posets, subobjects and operator arrows.
//!
//! A matrix document is `{"dim": n, "entries": [[[re, im], ...], ...]}`; a
//! context document is `{"atoms": [matrix, ...]}`; a vector document is
//! `{"dim": n, "amplitudes": [[re, im], ...]}`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::context::{Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianOperator, Projection};
use crate::operator::{OperatorArrow, OrderPair};
use crate::presheaf::ClopenSubobject;
use crate::states::{UnitVector, ValueSubobject};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextDoc {
    pub atoms: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDoc {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        if self.entries.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", self.entries.len())));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row {i}: expected {n} entries, found {}",
                    row.len()
                )));
            }
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        }))
    }
}

impl VectorDoc {
    pub fn from_vector(v: &CVector) -> Self {
        Self {
            dim: v.len(),
            amplitudes: v.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Parses JSON text, reporting the line and column of syntax errors.
fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        // serde_json appends its own position; keep just the message
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_owned();
        Error::Parse(format!("line {}, column {}: {msg}", e.line(), e.column()))
    })
}

fn reject_mixed_state(v: &Value) -> Result<()> {
    if let Value::Object(m) = v {
        for key in ["density", "density_matrix", "rho", "mixture", "weights"] {
            if m.contains_key(key) {
                return Err(Error::Unsupported(format!(
                    "mixed states (field `{key}`) are not supported; give a unit vector"
                )));
            }
        }
    }
    Ok(())
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    from_value::<MatrixDoc>(parse_json(text)?, "matrix document")?.to_matrix()
}

pub fn parse_operator(text: &str, eps: f64) -> Result<HermitianOperator> {
    HermitianOperator::new(parse_matrix(text)?, eps)
}

pub fn parse_projection(text: &str, eps: f64) -> Result<Projection> {
    Projection::new(parse_matrix(text)?, eps)
}

pub fn parse_context(text: &str, eps: f64) -> Result<Context> {
    context_from_doc(from_value(parse_json(text)?, "context document")?, eps)
}

fn context_from_doc(doc: ContextDoc, eps: f64) -> Result<Context> {
    let atoms = doc
        .atoms
        .iter()
        .enumerate()
        .map(|(i, m)| {
            Projection::new(m.to_matrix()?, eps).map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("atom {i}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Context::from_atoms(atoms, eps)
}

/// Parses a unit vector. Amplitudes must be normalized within `eps`.
pub fn parse_vector(text: &str, eps: f64) -> Result<UnitVector> {
    let v = parse_json(text)?;
    reject_mixed_state(&v)?;
    if let Value::Object(m) = &v {
        if m.contains_key("entries") {
            return Err(Error::Unsupported(
                "density matrices are not supported; give a unit vector".into(),
            ));
        }
    }
    let doc: VectorDoc = from_value(v, "vector document")?;
    if doc.amplitudes.len() != doc.dim {
        return Err(Error::Parse(format!(
            "expected {} amplitudes, found {}",
            doc.dim,
            doc.amplitudes.len()
        )));
    }
    let amps = CVector::from_iterator(
        doc.dim,
        doc.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)),
    );
    UnitVector::new(amps, eps)
}

/// A seed for a poset: either a context document or an operator, which is
/// replaced by the context it generates.
pub fn parse_seed(text: &str, eps: f64) -> Result<Context> {
    let v = parse_json(text)?;
    match &v {
        Value::Object(m) if m.contains_key("atoms") => {
            context_from_doc(from_value(v, "context document")?, eps)
        }
        Value::Object(m) if m.contains_key("entries") => {
            let a = HermitianOperator::new(from_value::<MatrixDoc>(v, "matrix document")?.to_matrix()?, eps)?;
            crate::context::context_from_operator(&a, eps)
        }
        _ => Err(Error::Parse(
            "seed must be a context (`atoms`) or an operator (`dim`, `entries`)".into(),
        )),
    }
}

pub fn context_doc(v: &Context) -> ContextDoc {
    ContextDoc {
        atoms: v.atoms().iter().map(|p| MatrixDoc::from_matrix(p.matrix())).collect(),
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{x:.11e}");
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 { 0.0 } else { r }
}

/// `{id: [indices]}`.
pub fn subobject_to_json(s: &ClopenSubobject, poset: &ContextPoset) -> Value {
    let mut m = Map::new();
    for (v, comp) in s.components().iter().enumerate() {
        m.insert(
            poset.context(v).id().to_string(),
            Value::from(comp.iter().copied().collect::<Vec<_>>()),
        );
    }
    Value::Object(m)
}

pub fn subobject_from_json(v: &Value, poset: &ContextPoset) -> Result<ClopenSubobject> {
    let map: BTreeMap<String, Vec<usize>> = from_value(v.clone(), "subobject")?;
    let mut comps = vec![BTreeSet::new(); poset.len()];
    for (id, points) in map {
        let i = poset
            .index_of(&ContextId::from_string(id.clone()))
            .ok_or_else(|| Error::Parse(format!("unknown context {id}")))?;
        comps[i] = points.into_iter().collect();
    }
    ClopenSubobject::new(poset, comps)
}

fn pair_to_json(pair: &OrderPair) -> Value {
    let side = |m: &BTreeMap<ContextId, f64>| {
        Value::Object(
            m.iter()
                .map(|(id, &x)| (id.to_string(), json!(round12(x))))
                .collect(),
        )
    };
    json!({ "mu": side(&pair.mu), "nu": side(&pair.nu) })
}

fn pair_from_json(v: &Value) -> Result<OrderPair> {
    #[derive(Deserialize)]
    struct Raw {
        mu: BTreeMap<String, f64>,
        nu: BTreeMap<String, f64>,
    }
    let raw: Raw = from_value(v.clone(), "order pair")?;
    let conv = |m: BTreeMap<String, f64>| {
        m.into_iter()
            .map(|(k, x)| (ContextId::from_string(k), x))
            .collect::<BTreeMap<_, _>>()
    };
    Ok(OrderPair {
        mu: conv(raw.mu),
        nu: conv(raw.nu),
    })
}

/// `{id: {point: {mu: {id: x}, nu: {id: x}}}}`, values to 12 significant
/// digits.
pub fn arrow_to_json(arrow: &OperatorArrow, poset: &ContextPoset) -> Value {
    let mut out = Map::new();
    for (v, comp) in arrow.components().iter().enumerate() {
        let points: Map<String, Value> = comp
            .iter()
            .enumerate()
            .map(|(l, pair)| (l.to_string(), pair_to_json(pair)))
            .collect();
        out.insert(poset.context(v).id().to_string(), Value::Object(points));
    }
    Value::Object(out)
}

pub fn arrow_from_json(v: &Value, poset: &ContextPoset) -> Result<OperatorArrow> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("arrow must be an object".into()))?;
    let mut comps: Vec<Vec<OrderPair>> = vec![Vec::new(); poset.len()];
    for (id, points) in obj {
        let i = poset
            .index_of(&ContextId::from_string(id.clone()))
            .ok_or_else(|| Error::Parse(format!("unknown context {id}")))?;
        let points = points
            .as_object()
            .ok_or_else(|| Error::Parse(format!("{id}: points must be an object")))?;
        let k = poset.context(i).k();
        let mut pairs: Vec<Option<OrderPair>> = vec![None; k];
        for (l, pair) in points {
            let l: usize = l
                .parse()
                .ok()
                .filter(|&l| l < k)
                .ok_or_else(|| Error::Parse(format!("{id}: bad point index {l}")))?;
            pairs[l] = Some(pair_from_json(pair)?);
        }
        comps[i] = pairs
            .into_iter()
            .enumerate()
            .map(|(l, p)| p.ok_or_else(|| Error::Parse(format!("{id}: missing point {l}"))))
            .collect::<Result<_>>()?;
    }
    if comps.iter().any(Vec::is_empty) {
        return Err(Error::Parse("arrow does not cover every context".into()));
    }
    Ok(OperatorArrow::from_parts(poset, comps))
}

/// Contexts with their atom ranks, and for each the ids of the contexts
/// directly or indirectly below it.
pub fn poset_to_json(poset: &ContextPoset) -> Value {
    let contexts: Vec<Value> = poset
        .contexts()
        .iter()
        .map(|v| {
            json!({
                "id": v.id().to_string(),
                "ranks": v.atoms().iter().map(Projection::rank).collect::<Vec<_>>(),
            })
        })
        .collect();
    let adjacency: Map<String, Value> = poset
        .adjacency()
        .into_iter()
        .map(|(id, below)| {
            (
                id.to_string(),
                Value::from(below.iter().map(ToString::to_string).collect::<Vec<_>>()),
            )
        })
        .collect();
    let arrows: Vec<Value> = poset
        .arrows()
        .into_iter()
        .map(|(sub, sup)| {
            json!([poset.context(sub).id().to_string(), poset.context(sup).id().to_string()])
        })
        .collect();
    json!({ "contexts": contexts, "adjacency": adjacency, "arrows": arrows })
}

pub fn value_to_json(val: &ValueSubobject, poset: &ContextPoset) -> Value {
    let mut out = Map::new();
    for (v, pairs) in val.components().iter().enumerate() {
        let points: Map<String, Value> = pairs
            .iter()
            .map(|(l, pair)| (l.to_string(), pair_to_json(pair)))
            .collect();
        out.insert(poset.context(v).id().to_string(), Value::Object(points));
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{build_poset, Closure};
    use crate::operator::operator_arrow;
    use crate::DEFAULT_TOL;

    const SZ: &str = r#"{"dim": 3, "entries": [
        [[0.7071067811865476, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [-0.7071067811865476, 0]]]}"#;

    fn poset() -> ContextPoset {
        let v = parse_seed(SZ, DEFAULT_TOL).unwrap();
        build_poset(
            &[v],
            Closure {
                coarsening: true,
                intersection: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn operator_seed_gives_its_context() {
        let v = parse_seed(SZ, DEFAULT_TOL).unwrap();
        assert_eq!(v.k(), 3);
    }

    #[test]
    fn context_document_round_trip() {
        let v = parse_seed(SZ, DEFAULT_TOL).unwrap();
        let text = serde_json::to_string(&context_doc(&v)).unwrap();
        assert_eq!(parse_context(&text, DEFAULT_TOL).unwrap().id(), v.id());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_matrix("{\"dim\": 2,\n \"entries\": [}").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 2")), "{err}");
        assert!(matches!(
            parse_matrix(r#"{"dim": 2, "entries": [[[1,0]]]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn mixed_states_are_rejected() {
        let rho = r#"{"dim": 2, "density": [[1, 0], [0, 0]]}"#;
        assert!(matches!(parse_vector(rho, DEFAULT_TOL), Err(Error::Unsupported(_))));
        let m = r#"{"dim": 1, "entries": [[[1, 0]]]}"#;
        assert!(matches!(parse_vector(m, DEFAULT_TOL), Err(Error::Unsupported(_))));
        let ok = r#"{"dim": 2, "amplitudes": [[0.6, 0], [0, 0.8]]}"#;
        assert_eq!(parse_vector(ok, DEFAULT_TOL).unwrap().dim(), 2);
    }

    #[test]
    fn subobject_and_arrow_round_trip() {
        let poset = poset();
        let s = ClopenSubobject::top(&poset);
        let back = subobject_from_json(&subobject_to_json(&s, &poset), &poset).unwrap();
        assert_eq!(back, s);

        let a = HermitianOperator::new(parse_matrix(SZ).unwrap(), DEFAULT_TOL).unwrap();
        let arrow = operator_arrow(&a, &poset).unwrap();
        let json = arrow_to_json(&arrow, &poset);
        let back = arrow_from_json(&json, &poset).unwrap();
        assert_eq!(arrow_to_json(&back, &poset), json);
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.7071067811865476), 0.707106781187);
        assert_eq!(round12(-1e-20), -1e-20);
        assert_eq!(round12(0.0), 0.0);
    }
}
