//! JSON framework documents. Rationals are accepted as strings ("1/2",
//! "0.25") or bare JSON numbers; number literals are converted exactly as
//! written (the parser keeps the literal text).

use crystalflex::framework::{CrystalFramework, EdgeDecl, Joint};
use crystalflex::rational::{parse_rational, rational_to_string};
use num::BigRational;
use serde::Deserialize;

#[derive(Debug)]
pub enum DocError {
    Json(String),
    Schema(String),
    Validation(Vec<String>),
}

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DocError::Json(m) => write!(f, "malformed JSON: {m}"),
            DocError::Schema(m) => write!(f, "schema violation: {m}"),
            DocError::Validation(v) => {
                write!(f, "framework validation failed: {}", v.join("; "))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalLit {
    Str(String),
    Num(serde_json::Number),
}

impl RationalLit {
    fn parse(&self, path: &str) -> Result<BigRational, DocError> {
        let text = match self {
            RationalLit::Str(s) => s.clone(),
            // with arbitrary-precision numbers the literal text survives
            RationalLit::Num(n) => n.to_string(),
        };
        parse_rational(&text)
            .map_err(|e| DocError::Schema(format!("{path}: {e} (got {text:?})")))
    }
}

#[derive(Deserialize)]
struct JointDoc {
    id: String,
    coords: Vec<RationalLit>,
}

#[derive(Deserialize)]
struct EdgeDoc {
    v: String,
    k: Vec<i64>,
    w: String,
    l: Vec<i64>,
}

#[derive(Deserialize)]
pub struct FrameworkDocument {
    dimension: usize,
    periods: Vec<Vec<RationalLit>>,
    joints: Vec<JointDoc>,
    edges: Vec<EdgeDoc>,
}

pub fn parse_framework(text: &str) -> Result<CrystalFramework, DocError> {
    let doc: FrameworkDocument =
        serde_json::from_str(text).map_err(|e| DocError::Json(e.to_string()))?;
    let d = doc.dimension;
    if d == 0 {
        return Err(DocError::Schema("dimension must be positive".into()));
    }
    if doc.periods.len() != d {
        return Err(DocError::Schema(format!(
            "periods has {} vectors, expected {d}",
            doc.periods.len()
        )));
    }
    let mut periods = Vec::with_capacity(d);
    for (j, col) in doc.periods.iter().enumerate() {
        if col.len() != d {
            return Err(DocError::Schema(format!(
                "periods[{j}] has length {}, expected {d}",
                col.len()
            )));
        }
        let mut v = Vec::with_capacity(d);
        for (i, lit) in col.iter().enumerate() {
            v.push(lit.parse(&format!("periods[{j}][{i}]"))?);
        }
        periods.push(v);
    }
    let mut joints = Vec::with_capacity(doc.joints.len());
    for (ji, jd) in doc.joints.iter().enumerate() {
        if jd.coords.len() != d {
            return Err(DocError::Schema(format!(
                "joints[{ji}].coords has length {}, expected {d}",
                jd.coords.len()
            )));
        }
        let mut coords = Vec::with_capacity(d);
        for (i, lit) in jd.coords.iter().enumerate() {
            coords.push(lit.parse(&format!("joints[{ji}].coords[{i}]"))?);
        }
        joints.push(Joint {
            id: jd.id.clone(),
            coords,
        });
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (ei, ed) in doc.edges.iter().enumerate() {
        if ed.k.len() != d {
            return Err(DocError::Schema(format!(
                "edges[{ei}].k has length {}, expected {d}",
                ed.k.len()
            )));
        }
        if ed.l.len() != d {
            return Err(DocError::Schema(format!(
                "edges[{ei}].l has length {}, expected {d}",
                ed.l.len()
            )));
        }
        edges.push(EdgeDecl::new(&ed.v, &ed.k, &ed.w, &ed.l));
    }
    let fw = CrystalFramework {
        dim: d,
        periods,
        joints,
        edges,
    };
    let report = fw.validate();
    if !report.is_valid() {
        return Err(DocError::Validation(report.violations));
    }
    Ok(fw)
}

pub fn serialize_framework(fw: &CrystalFramework) -> String {
    let periods: Vec<Vec<String>> = fw
        .periods
        .iter()
        .map(|col| col.iter().map(rational_to_string).collect())
        .collect();
    let joints: Vec<serde_json::Value> = fw
        .joints
        .iter()
        .map(|j| {
            serde_json::json!({
                "id": j.id,
                "coords": j.coords.iter().map(rational_to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<serde_json::Value> = fw
        .edges
        .iter()
        .map(|e| serde_json::json!({"v": e.v, "k": e.k, "w": e.w, "l": e.l}))
        .collect();
    let doc = serde_json::json!({
        "dimension": fw.dim,
        "periods": periods,
        "joints": joints,
        "edges": edges,
    });
    serde_json::to_string_pretty(&doc).expect("document serialization")
}
