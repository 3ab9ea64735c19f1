//! Preprocessed scheme state as a JSON file.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AverageScheme, Directed7Scheme, DirectedHopScheme, PreprocessError, UndirectedRtScheme};
use crate::graph::{DistanceOracle, Length, Vertex, WeightedGraph};
use crate::hierarchy::Hierarchy;
use crate::sim::{
    default_hop_budget, evaluate, run_route, storage_stats, EvalError, EvalOptions, EvalReport, RouteError, RouteTrace,
    StorageStats,
};

/// Bumped whenever the layout of [`SchemeState`] changes.
pub const STATE_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    UndirectedRt,
    #[serde(rename = "directed-7")]
    Directed7,
    DirectedHop,
    Average,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [Self::UndirectedRt, Self::Directed7, Self::DirectedHop, Self::Average];

    pub fn name(self) -> &'static str {
        match self {
            Self::UndirectedRt => "undirected-rt",
            Self::Directed7 => "directed-7",
            Self::DirectedHop => "directed-hop",
            Self::Average => "average",
        }
    }

    pub fn needs_directed(self) -> bool {
        matches!(self, Self::Directed7 | Self::DirectedHop)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!("unknown scheme `{s}` (expected undirected-rt, directed-7, directed-hop or average)")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub k: usize,
    pub seed: u64,
    pub n: usize,
    pub budget: f64,
    /// Dummy vertex and its edge weight when the graph was augmented.
    pub dummy: Option<(Vertex, Length)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "scheme", rename_all = "kebab-case")]
pub enum SchemeState {
    UndirectedRt(UndirectedRtScheme),
    #[serde(rename = "directed-7")]
    Directed7(Directed7Scheme),
    DirectedHop(DirectedHopScheme),
    Average(AverageScheme),
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state file is not valid: {0}")]
    Json(#[from] serde_json::Error),
    #[error("state format {found} is not supported (expected {STATE_FORMAT})")]
    Format { found: u32 },
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: u32,
    meta: StateMeta,
    state: SchemeState,
}

#[derive(Deserialize)]
struct FormatOnly {
    format: u32,
}

macro_rules! dispatch {
    ($state:expr, $s:ident => $body:expr) => {
        match $state {
            SchemeState::UndirectedRt($s) => $body,
            SchemeState::Directed7($s) => $body,
            SchemeState::DirectedHop($s) => $body,
            SchemeState::Average($s) => $body,
        }
    };
}

impl SchemeState {
    /// Runs the preprocessing of `kind` on a prepared hierarchy.
    pub fn preprocess(kind: SchemeKind, graph: WeightedGraph, hierarchy: Hierarchy) -> Result<Self, PreprocessError> {
        Ok(match kind {
            SchemeKind::UndirectedRt => Self::UndirectedRt(UndirectedRtScheme::preprocess(graph, hierarchy)?),
            SchemeKind::Directed7 => Self::Directed7(Directed7Scheme::preprocess(graph, hierarchy)?),
            SchemeKind::DirectedHop => Self::DirectedHop(DirectedHopScheme::preprocess(graph, hierarchy)?),
            SchemeKind::Average => Self::Average(AverageScheme::preprocess(graph, hierarchy)?),
        })
    }

    /// Routes one message with the default hop budget.
    pub fn route(&self, u: Vertex, v: Vertex) -> Result<RouteTrace, RouteError> {
        dispatch!(self, s => run_route(s, u, v, default_hop_budget(s)))
    }

    pub fn evaluate(&self, oracle: &DistanceOracle, opts: &EvalOptions) -> Result<EvalReport, EvalError> {
        dispatch!(self, s => evaluate(s, oracle, opts))
    }

    pub fn storage(&self, dummy: Option<Vertex>) -> StorageStats {
        dispatch!(self, s => storage_stats(s, dummy))
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            Self::UndirectedRt(_) => SchemeKind::UndirectedRt,
            Self::Directed7(_) => SchemeKind::Directed7,
            Self::DirectedHop(_) => SchemeKind::DirectedHop,
            Self::Average(_) => SchemeKind::Average,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        match self {
            Self::UndirectedRt(s) => &s.graph,
            Self::Directed7(s) => &s.graph,
            Self::DirectedHop(s) => &s.graph,
            Self::Average(s) => &s.graph,
        }
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        match self {
            Self::UndirectedRt(s) => &s.hierarchy,
            Self::Directed7(s) => &s.hierarchy,
            Self::DirectedHop(s) => &s.hierarchy,
            Self::Average(s) => &s.hierarchy,
        }
    }

    pub fn to_json(&self, meta: &StateMeta) -> String {
        let env = Envelope { format: STATE_FORMAT, meta: meta.clone(), state: self.clone() };
        serde_json::to_string(&env).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<(StateMeta, SchemeState), StateError> {
        let FormatOnly { format } = serde_json::from_str(text)?;
        if format != STATE_FORMAT {
            return Err(StateError::Format { found: format });
        }
        let env: Envelope = serde_json::from_str(text)?;
        Ok((env.meta, env.state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorConfig, GraphKind};
    use crate::hierarchy::{build_hierarchy, HierarchyConfig};

    #[test]
    fn kind_names_round_trip() {
        for k in SchemeKind::ALL {
            assert_eq!(k.name().parse::<SchemeKind>(), Ok(k));
        }
        assert!("directed".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = generate(&GeneratorConfig::new(GraphKind::ErdosRenyi, 20, 0.3, 5)).unwrap();
        let h = build_hierarchy(&g, HierarchyConfig::new(2, 5)).unwrap();
        let state = SchemeState::UndirectedRt(UndirectedRtScheme::preprocess(g, h).unwrap());
        let meta = StateMeta { k: 2, seed: 5, n: 20, budget: 3.0, dummy: None };
        let text = state.to_json(&meta);
        let (m, s) = SchemeState::from_json(&text).unwrap();
        assert_eq!(m, meta);
        assert_eq!(s, state);
    }

    #[test]
    fn wrong_format_rejected() {
        let err = SchemeState::from_json(r#"{"format": 999}"#).unwrap_err();
        assert!(matches!(err, StateError::Format { found: 999 }));
    }
}
