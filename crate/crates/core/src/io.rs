//! File formats.
//!
//! Graphs: `{"vertices": [ids], "edges": [{"id", "u", "v", "w"}]}`.
//! Matrices: `{"n": int, "rows": [[0/1, ...], ...]}`.
//! Unknown top-level keys are rejected in both.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, WeightedMultigraph};
use crate::scalar::Scalar;
use crate::subshift::TransitionMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec<f64>>,
}

impl GraphFile {
    pub fn from_graph<T: Scalar>(g: &WeightedMultigraph<T>) -> Self {
        Self {
            vertices: g.vertex_ids().to_vec(),
            edges: g
                .edge_specs()
                .into_iter()
                .map(|s| EdgeSpec::new(s.id, s.u, s.v, s.w.to_f64_lossy()))
                .collect(),
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<WeightedMultigraph<T>> {
        let specs: Vec<EdgeSpec<T>> = self
            .edges
            .iter()
            .map(|s| {
                T::from_f64(s.w)
                    .map(|w| EdgeSpec::new(s.id.clone(), s.u.clone(), s.v.clone(), w))
                    .ok_or_else(|| Error::NonPositiveWeight(s.id.clone()))
            })
            .collect::<Result<_>>()?;
        WeightedMultigraph::new(&self.vertices, &specs)
    }
}

pub fn parse_graph<T: Scalar>(text: &str) -> Result<WeightedMultigraph<T>> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.build()
}

pub fn graph_to_json<T: Scalar>(g: &WeightedMultigraph<T>) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("graph file serializes")
}

pub fn parse_matrix(text: &str) -> Result<TransitionMatrix> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json(a: &TransitionMatrix) -> String {
    serde_json::to_string(a).expect("matrix serializes")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_graph<T: Scalar>(path: impl AsRef<Path>) -> Result<WeightedMultigraph<T>> {
    parse_graph(&read(path.as_ref())?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<TransitionMatrix> {
    parse_matrix(&read(path.as_ref())?)
}
