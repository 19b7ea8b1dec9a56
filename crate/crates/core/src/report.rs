//! Stable on-disk formats: versioned JSON documents and coordinate CSVs.
//!
//! Every JSON document carries a `schema` field so downstream tooling can
//! reject files it does not understand. CSV floats use the shortest
//! round-trip representation, so reading a file back reproduces the
//! written values bit for bit.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::embed::PlanarEmbedding;
use crate::sbm::GroundTruth;

pub const RUN_SCHEMA: &str = "cyclescope.run.v1";
pub const EMBEDDING_SCHEMA: &str = "cyclescope.embedding.v1";
pub const BOUNDS_SCHEMA: &str = "cyclescope.bounds.v1";
pub const METRICS_SCHEMA: &str = "cyclescope.metrics.v1";
pub const TRUTH_SCHEMA: &str = "cyclescope.truth.v1";
pub const SCC_MAP_SCHEMA: &str = "cyclescope.sccmap.v1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("document is not a JSON object")]
    NotAnObject,
    #[error("document has no schema field")]
    MissingSchema,
    #[error("schema mismatch: expected {want}, found {got}")]
    SchemaMismatch { want: String, got: String },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Serializes `value` and stamps the `schema` field onto the resulting
/// object.
pub fn tagged<T: Serialize>(schema: &str, value: &T) -> Result<Value, ReportError> {
    let mut doc = serde_json::to_value(value)?;
    let Value::Object(map) = &mut doc else {
        return Err(ReportError::NotAnObject);
    };
    map.insert("schema".to_string(), json!(schema));
    Ok(doc)
}

pub fn expect_schema(doc: &Value, want: &str) -> Result<(), ReportError> {
    let got = doc
        .as_object()
        .ok_or(ReportError::NotAnObject)?
        .get("schema")
        .and_then(Value::as_str)
        .ok_or(ReportError::MissingSchema)?;
    if got == want {
        Ok(())
    } else {
        Err(ReportError::SchemaMismatch {
            want: want.to_string(),
            got: got.to_string(),
        })
    }
}

pub fn truth_document(truth: &GroundTruth) -> Result<Value, ReportError> {
    tagged(TRUTH_SCHEMA, truth)
}

pub fn truth_from_document(doc: &Value) -> Result<GroundTruth, ReportError> {
    expect_schema(doc, TRUTH_SCHEMA)?;
    Ok(serde_json::from_value(doc.clone())?)
}

/// Map from component-local vertex index to the index in the graph as
/// read. `vertices[i]` is the original id of component vertex i.
pub fn scc_map_document(original_n: usize, vertices: &[usize]) -> Value {
    json!({
        "schema": SCC_MAP_SCHEMA,
        "original_n": original_n,
        "vertices": vertices,
    })
}

pub fn scc_map_from_document(doc: &Value) -> Result<(usize, Vec<usize>), ReportError> {
    expect_schema(doc, SCC_MAP_SCHEMA)?;
    let missing = |field: &str| ReportError::Csv {
        line: 0,
        message: format!("scc map missing field {field}"),
    };
    let original_n = doc
        .get("original_n")
        .and_then(Value::as_u64)
        .ok_or_else(|| missing("original_n"))? as usize;
    let vertices = doc
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| missing("vertices"))?
        .iter()
        .map(|v| v.as_u64().map(|x| x as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("vertices"))?;
    Ok((original_n, vertices))
}

fn angle_of(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    if a <= 0.0 { a + 2.0 * PI } else { a }
}

/// `vertex,x,y,magnitude,angle,group` with one row per point. Angle is in
/// (0, 2π]; the group column holds the cluster id or `noise`.
pub fn coordinates_csv(points: &[(f64, f64)], labels: &[Option<usize>]) -> String {
    assert_eq!(points.len(), labels.len());
    let mut out = String::from("vertex,x,y,magnitude,angle,group\n");
    for (v, (&(x, y), label)) in points.iter().zip(labels).enumerate() {
        let _ = write!(out, "{v},{x},{y},{},{}", x.hypot(y), angle_of(x, y));
        match label {
            Some(g) => {
                let _ = writeln!(out, ",{g}");
            }
            None => out.push_str(",noise\n"),
        }
    }
    out
}

pub fn embedding_csv(embedding: &PlanarEmbedding, labels: &[Option<usize>]) -> String {
    coordinates_csv(&embedding.coords, labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub vertex: usize,
    pub x: f64,
    pub y: f64,
    pub magnitude: f64,
    pub angle: f64,
    pub group: Option<usize>,
}

pub fn parse_embedding_csv(text: &str) -> Result<Vec<EmbeddingRow>, ReportError> {
    let bad = |line: usize, message: String| ReportError::Csv { line, message };
    let mut rows = Vec::new();
    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        if ix == 0 {
            if raw.trim() != "vertex,x,y,magnitude,angle,group" {
                return Err(bad(line, format!("unexpected header {raw:?}")));
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(line, format!("expected 6 fields, found {}", fields.len())));
        }
        let parse_f = |s: &str, name: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(line, format!("bad {name} {s:?}: {e}")))
        };
        let group = match fields[5].trim() {
            "noise" | "" => None,
            s => Some(
                s.parse::<usize>()
                    .map_err(|e| bad(line, format!("bad group {s:?}: {e}")))?,
            ),
        };
        rows.push(EmbeddingRow {
            vertex: fields[0]
                .parse::<usize>()
                .map_err(|e| bad(line, format!("bad vertex {:?}: {e}", fields[0])))?,
            x: parse_f(fields[1], "x")?,
            y: parse_f(fields[2], "y")?,
            magnitude: parse_f(fields[3], "magnitude")?,
            angle: parse_f(fields[4], "angle")?,
            group,
        });
    }
    Ok(rows)
}

pub fn singular_values_csv(sigma: &[f64]) -> String {
    let mut out = String::from("index,sigma\n");
    for (i, s) in sigma.iter().enumerate() {
        let _ = writeln!(out, "{i},{s}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm;

    #[test]
    fn tagged_documents_carry_schema() {
        let truth = GroundTruth {
            membership: vec![0, 0, 1],
            cyclic_groups: Vec::new(),
        };
        let doc = truth_document(&truth).unwrap();
        assert_eq!(doc["schema"], TRUTH_SCHEMA);
        expect_schema(&doc, TRUTH_SCHEMA).unwrap();
        let err = expect_schema(&doc, RUN_SCHEMA).unwrap_err();
        assert!(matches!(err, ReportError::SchemaMismatch { .. }));
    }

    #[test]
    fn truth_roundtrip() {
        let spec = sbm::pure_3cyclic(5, 0.8);
        let (_, truth) = spec.sample(3).unwrap();
        let doc = truth_document(&truth).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back = truth_from_document(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, truth);
    }

    #[test]
    fn scc_map_roundtrip() {
        let doc = scc_map_document(10, &[2, 3, 5, 7]);
        let (n, vs) = scc_map_from_document(&doc).unwrap();
        assert_eq!(n, 10);
        assert_eq!(vs, vec![2, 3, 5, 7]);
    }

    #[test]
    fn coordinates_csv_roundtrip_is_exact() {
        let points = vec![
            (0.1234567890123456, -0.987654321),
            (-1.5e-13, 2.0 / 3.0),
            (0.0, 0.0),
        ];
        let labels = vec![Some(2), None, Some(0)];
        let text = coordinates_csv(&points, &labels);
        let rows = parse_embedding_csv(&text).unwrap();
        assert_eq!(rows.len(), 3);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.vertex, i);
            assert_eq!(row.x, points[i].0);
            assert_eq!(row.y, points[i].1);
            assert_eq!(row.group, labels[i]);
            assert_eq!(row.magnitude, points[i].0.hypot(points[i].1));
        }
    }

    #[test]
    fn csv_angles_sit_in_half_open_circle() {
        let points = vec![(1.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 1.0)];
        let labels = vec![None; 4];
        let rows = parse_embedding_csv(&coordinates_csv(&points, &labels)).unwrap();
        for row in &rows {
            assert!(row.angle > 0.0 && row.angle <= 2.0 * PI, "angle {}", row.angle);
        }
        assert_eq!(rows[0].angle, 2.0 * PI);
        assert_eq!(rows[1].angle, PI);
    }

    #[test]
    fn malformed_csv_reports_line() {
        let text = "vertex,x,y,magnitude,angle,group\n0,1.0,2.0,bad,0.5,1\n";
        let err = parse_embedding_csv(text).unwrap_err();
        match err {
            ReportError::Csv { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_embedding_csv("x,y\n").unwrap_err();
        assert!(matches!(err, ReportError::Csv { line: 1, .. }));
    }

    #[test]
    fn singular_values_format() {
        let text = singular_values_csv(&[1.0, 0.5]);
        assert_eq!(text, "index,sigma\n0,1\n1,0.5\n");
    }
}
