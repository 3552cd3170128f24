//! JSON input schemas and their validation.
//!
//! Graphs: `{"n": 5, "edges": [[0,1],[1,2],...]}`
//! Hypergraphs: `{"n": 5, "contexts": [[0,1],[1,2],...]}`
//! Scenarios: `{"nA":2,"nB":2,"nX":2,"nY":2,"lambda":[...],"offset":0.0}`
//! Points: `{"p": [0.5, 0.5, ...]}`
//!
//! Duplicate or out-of-range entries are rejected with the offending field
//! named; the core types validate the rest.

use serde::Deserialize;

use ncx_core::bell::{BellFunctional, BellScenario};
use ncx_core::graph::{ContextHypergraph, Graph};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphFile {
    pub fn build(&self) -> Result<Graph, CliError> {
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if self.edges[..k].contains(&(i, j)) || self.edges[..k].contains(&(j, i)) {
                return Err(CliError::input(format!(
                    "edges[{k}] = [{i},{j}] duplicates an earlier edge"
                )));
            }
        }
        Graph::from_edges(self.n, &self.edges)
            .map_err(|e| CliError::input(format!("invalid graph: {e}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub n: usize,
    pub contexts: Vec<Vec<usize>>,
}

impl HypergraphFile {
    pub fn build(&self) -> Result<ContextHypergraph, CliError> {
        for (k, c) in self.contexts.iter().enumerate() {
            let mut sorted = c.clone();
            sorted.sort_unstable();
            let len_before = sorted.len();
            sorted.dedup();
            if sorted.len() != len_before {
                return Err(CliError::input(format!(
                    "contexts[{k}] lists a vertex twice"
                )));
            }
            if self.contexts[..k].iter().any(|prev| {
                let mut p = prev.clone();
                p.sort_unstable();
                p == sorted
            }) {
                return Err(CliError::input(format!(
                    "contexts[{k}] duplicates an earlier context"
                )));
            }
        }
        ContextHypergraph::new(self.n, &self.contexts)
            .map_err(|e| CliError::input(format!("invalid hypergraph: {e}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
    #[serde(rename = "nX")]
    pub n_x: usize,
    #[serde(rename = "nY")]
    pub n_y: usize,
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl ScenarioFile {
    pub fn build(&self) -> Result<BellFunctional, CliError> {
        let scenario = BellScenario::new(self.n_a, self.n_b, self.n_x, self.n_y)
            .map_err(|e| CliError::input(format!("invalid scenario: {e}")))?;
        BellFunctional::new(scenario, self.lambda.clone(), self.offset)
            .map_err(|e| CliError::input(format!("invalid scenario: {e}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub p: Vec<f64>,
}

pub fn parse_file<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("cannot parse {path}: {e}")))
}
