//! DOT and JSON renderings of an exchange graph.
//!
//! Vertices are numbered by sorting their fingerprints, so exports do not
//! depend on enumeration order. JSON labels (`k`, `path`) are 1-based.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CapKind, ExchangeGraph, Verdict, Vertex};
use crate::seed::{Seed, SeedError, SeedJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = SeedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(SeedError::Shape(format!("unknown graph format {other:?} (expected dot or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub seed: SeedJson,
    pub depth: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub a: usize,
    pub k: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictJson {
    Finite,
    ExceededCap {
        cap: CapKind,
        limit: usize,
        growth: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub v: u32,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub verdict: VerdictJson,
    pub depth_reached: usize,
    pub cluster_variables: Vec<String>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::Finite => VerdictJson::Finite,
            Verdict::ExceededCap { cap, limit, growth } => VerdictJson::ExceededCap {
                cap: *cap,
                limit: *limit,
                growth: growth.clone(),
            },
        }
    }
}

impl From<&VerdictJson> for Verdict {
    fn from(v: &VerdictJson) -> Self {
        match v {
            VerdictJson::Finite => Verdict::Finite,
            VerdictJson::ExceededCap { cap, limit, growth } => Verdict::ExceededCap {
                cap: *cap,
                limit: *limit,
                growth: growth.clone(),
            },
        }
    }
}

impl ExchangeGraph {
    /// `order[i]` is the internal index of exported vertex `i`; `rank` inverts it.
    fn export_order(&self) -> (Vec<usize>, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].canonical.cmp(&self.vertices[b].canonical));
        let mut rank = vec![0; self.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        (order, rank)
    }

    fn exported_edges(&self, rank: &[usize]) -> Vec<EdgeJson> {
        let mut edges = Vec::new();
        for (a, adj) in self.adjacency.iter().enumerate() {
            for &(k, b) in adj {
                if rank[a] <= rank[b] {
                    edges.push(EdgeJson {
                        a: rank[a],
                        k: k + 1,
                        b: rank[b],
                    });
                }
            }
        }
        edges.sort_by_key(|e| (e.a, e.b, e.k));
        edges
    }

    pub fn to_json(&self) -> GraphJson {
        let (order, rank) = self.export_order();
        let vertices = order
            .iter()
            .enumerate()
            .map(|(id, &v)| {
                let vertex = &self.vertices[v];
                VertexJson {
                    id,
                    seed: vertex.seed.to_json(),
                    depth: vertex.depth,
                    path: vertex.path.iter().map(|k| k + 1).collect(),
                }
            })
            .collect();
        GraphJson {
            v: 1,
            vertices,
            edges: self.exported_edges(&rank),
            verdict: (&self.verdict).into(),
            depth_reached: self.depth_reached,
            cluster_variables: self.cluster_variables().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let (order, rank) = self.export_order();
        let mut out = String::from("graph exchange {\n");
        for (id, &v) in order.iter().enumerate() {
            let label = self.vertices[v]
                .seed
                .exchangeable()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\\n");
            let _ = writeln!(out, "  v{id} [label=\"{label}\"];");
        }
        for e in self.exported_edges(&rank) {
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.k);
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self, format: GraphFormat) -> String {
        match format {
            GraphFormat::Dot => self.to_dot(),
            GraphFormat::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("graph JSON serializes")
            }
        }
    }

    /// Rebuilds a graph from its JSON export. Adjacency is restored from both
    /// endpoints of each edge; the label seen from `b` is recovered by
    /// mutating `b`'s seed.
    pub fn from_json(doc: &GraphJson) -> Result<ExchangeGraph, SeedError> {
        let shape = |msg: String| SeedError::Shape(msg);
        if doc.v != 1 {
            return Err(shape(format!("unsupported schema version {}", doc.v)));
        }
        let seeds = doc
            .vertices
            .iter()
            .map(|v| Seed::from_json(&v.seed))
            .collect::<Result<Vec<_>, _>>()?;
        let mut by_path = std::collections::HashMap::new();
        for (i, v) in doc.vertices.iter().enumerate() {
            if v.id != i {
                return Err(shape(format!("vertex ids must be 0..n in order, found {}", v.id)));
            }
            by_path.insert(v.path.clone(), i);
        }
        let mut vertices = Vec::with_capacity(seeds.len());
        for (v, seed) in doc.vertices.iter().zip(seeds) {
            let parent = match v.path.split_last() {
                None => None,
                Some((&k, rest)) => {
                    let p = by_path
                        .get(rest)
                        .ok_or_else(|| shape(format!("vertex {} has no parent in the export", v.id)))?;
                    Some((*p, k - 1))
                }
            };
            vertices.push(Vertex {
                canonical: seed.canonical(),
                seed,
                depth: v.depth,
                path: v.path.iter().map(|k| k - 1).collect(),
                parent,
            });
        }
        let n = vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &doc.edges {
            if e.a >= n || e.b >= n || e.k == 0 {
                return Err(shape(format!("edge {e:?} out of range")));
            }
            let k = e.k - 1;
            adjacency[e.a].push((k, e.b));
            if e.a != e.b {
                let target = vertices[e.a].seed.mutate(k)?.canonical();
                let back = vertices[e.b]
                    .seed
                    .ex()
                    .iter()
                    .copied()
                    .find(|&j| {
                        vertices[e.b]
                            .seed
                            .mutate(j)
                            .map(|s| s.canonical() == vertices[e.a].canonical)
                            .unwrap_or(false)
                    })
                    .ok_or_else(|| shape(format!("edge {e:?} is not a mutation")))?;
                if target != vertices[e.b].canonical {
                    return Err(shape(format!("edge {e:?} is not a mutation")));
                }
                adjacency[e.b].push((back, e.a));
            }
        }
        for adj in &mut adjacency {
            adj.sort();
        }
        let root = vertices.iter().position(|v| v.path.is_empty());
        if root != Some(0) && n > 0 {
            // keep the root at index 0 so `root()` stays meaningful
            let r = root.ok_or_else(|| shape("export has no root vertex".into()))?;
            return Ok(ExchangeGraph::from_parts(vertices, adjacency, (&doc.verdict).into(), doc.depth_reached)
                .with_root_first(r));
        }
        Ok(ExchangeGraph::from_parts(vertices, adjacency, (&doc.verdict).into(), doc.depth_reached))
    }

    pub fn from_json_str(text: &str) -> Result<ExchangeGraph, SeedError> {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| SeedError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        ExchangeGraph::from_json(&doc)
    }

    /// Swaps vertex `r` with vertex 0, fixing parent pointers and adjacency.
    fn with_root_first(mut self, r: usize) -> ExchangeGraph {
        let swap = |i: usize| {
            if i == r {
                0
            } else if i == 0 {
                r
            } else {
                i
            }
        };
        self.vertices.swap(0, r);
        self.adjacency.swap(0, r);
        for v in &mut self.vertices {
            if let Some((p, _)) = &mut v.parent {
                *p = swap(*p);
            }
        }
        for adj in &mut self.adjacency {
            for (_, b) in adj.iter_mut() {
                *b = swap(*b);
            }
        }
        let index = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.canonical.clone(), i))
            .collect();
        self.index = index;
        self
    }
}
