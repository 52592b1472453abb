//! JSON file formats. Floats are written with 17 significant digits so that
//! every value reads back bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clustering::Clustering;
use crate::design::{Assignment, AssignmentRecord};
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;
use crate::outcome::OutcomeModel;

/// `{"n": int, "edges": [[i, j, v_ij], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphRecord {
    pub fn from_graph(graph: &InterferenceGraph) -> Self {
        Self {
            n: graph.n(),
            edges: graph.edges().iter().map(|e| (e.unit, e.neighbor, e.weight)).collect(),
        }
    }

    pub fn into_graph(self) -> Result<InterferenceGraph> {
        InterferenceGraph::new(self.n, self.edges)
    }
}

/// Serializes `value` as compact JSON with floats in `{:.16e}` form.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let tree = serde_json::to_value(value).map_err(|source| Error::Json {
        path: "<memory>".into(),
        source,
    })?;
    let mut out = String::new();
    write_value(&mut out, &tree);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if num.is_f64() {
                let _ = write!(out, "{:.16e}", num.as_f64().unwrap_or(f64::NAN));
            } else {
                let _ = write!(out, "{num}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_graph(path: &Path, graph: &InterferenceGraph) -> Result<()> {
    write_json(path, &GraphRecord::from_graph(graph))
}

pub fn read_graph(path: &Path) -> Result<InterferenceGraph> {
    read_json::<GraphRecord>(path)?.into_graph()
}

pub fn write_model(path: &Path, model: &OutcomeModel) -> Result<()> {
    write_json(path, model)
}

pub fn read_model(path: &Path) -> Result<OutcomeModel> {
    let raw: OutcomeModel = read_json(path)?;
    OutcomeModel::new(raw.alpha, raw.beta, raw.gamma)
}

pub fn write_clustering(path: &Path, clustering: &Clustering) -> Result<()> {
    write_json(path, clustering)
}

pub fn read_clustering(path: &Path) -> Result<Clustering> {
    read_json(path)
}

pub fn write_assignment(path: &Path, assignment: &Assignment) -> Result<()> {
    write_json(path, &assignment.to_record())
}

pub fn read_assignment(path: &Path, clustering: Option<&Clustering>) -> Result<Assignment> {
    Assignment::from_record(&read_json::<AssignmentRecord>(path)?, clustering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rgg, RggParams};
    use crate::outcome::{generate_outcome_model, GammaRule};

    #[test]
    fn graph_and_model_round_trip_bit_for_bit() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate_rgg(&RggParams::new(300, 4.0, 1), 5).unwrap();
        let m = generate_outcome_model(&g, 5, GammaRule::UnitAte).unwrap();
        let gp = dir.path().join("g.json");
        let mp = dir.path().join("m.json");
        write_graph(&gp, &g).unwrap();
        write_model(&mp, &m).unwrap();
        let g2 = read_graph(&gp).unwrap();
        let m2 = read_model(&mp).unwrap();
        assert_eq!(g2.edges(), g.edges());
        assert_eq!(m2, m);
        let text = std::fs::read_to_string(&gp).unwrap();
        assert!(text.starts_with(r#"{"edges":[["#));
    }

    #[test]
    fn float_format() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "k": 3, "v": [-2.5]})).unwrap();
        assert_eq!(
            s,
            "{\"k\":3,\"v\":[-2.5000000000000000e0],\"x\":1.0000000000000001e-1}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn errors_name_the_file() {
        let missing = Path::new("/nonexistent/dir/graph.json");
        let err = read_graph(missing).unwrap_err();
        assert!(err.to_string().contains("graph.json"));
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, "{\"n\": 2, \"edges\": [[0, 0, 1.0]]}").unwrap();
        assert!(read_graph(&bad).is_err());
    }
}
