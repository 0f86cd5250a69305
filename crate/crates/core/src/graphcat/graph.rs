use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite directed multigraph with dense canonical ids.
///
/// Vertices are `0..vertex_count()` and edges are `0..edge_count()`; edge `e`
/// runs from `src(e)` to `tgt(e)`. Loops and parallel edges are allowed.
/// Two graphs compare equal iff they are identical in this canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(s, t)) in edges.iter().enumerate() {
            if s >= vertices || t >= vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge e{i} ({s} -> {t}) leaves the {vertices} vertices"
                )));
            }
        }
        Ok(Graph { vertices, edges })
    }

    /// The initial graph.
    pub fn empty() -> Self {
        Graph::default()
    }

    /// `n` vertices, no edges.
    pub fn discrete(n: usize) -> Self {
        Graph { vertices: n, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn size(&self) -> usize {
        self.vertices + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn src(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn tgt(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// `(out-degree, in-degree, loops)` per vertex; invariant under isomorphism.
    pub fn degree_signature(&self) -> Vec<(usize, usize, usize)> {
        let mut sig = vec![(0, 0, 0); self.vertices];
        for &(s, t) in &self.edges {
            sig[s].0 += 1;
            sig[t].1 += 1;
            if s == t {
                sig[s].2 += 1;
            }
        }
        sig
    }

    /// Edge ids grouped by endpoints, indexed by `s * n + t`.
    pub(crate) fn edge_buckets(&self) -> Vec<Vec<usize>> {
        let n = self.vertices;
        let mut buckets = vec![Vec::new(); n * n];
        for (e, &(s, t)) in self.edges.iter().enumerate() {
            buckets[s * n + t].push(e);
        }
        buckets
    }

    /// Disjoint union `self ⊔ other`, with `other` renumbered after `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.vertices;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(s, t)| (s + off, t + off)));
        Graph { vertices: self.vertices + other.vertices, edges }
    }

    /// Adds a vertex, returning its id.
    pub fn add_vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    /// Adds an edge, returning its id.
    pub fn add_edge(&mut self, s: usize, t: usize) -> Result<usize> {
        if s >= self.vertices || t >= self.vertices {
            return Err(Error::InvalidGraph(format!("edge {s} -> {t} leaves the vertex set")));
        }
        self.edges.push((s, t));
        Ok(self.edges.len() - 1)
    }

    pub fn vertex_name(v: usize) -> String {
        format!("v{v}")
    }

    pub fn edge_name(e: usize) -> String {
        format!("e{e}")
    }
}

impl std::fmt::Display for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "G(V={}, E=[", self.vertices)?;
        for (i, (s, t)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}->{t}")?;
        }
        write!(f, "])")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Wire form of a graph: `{"vertices":[...],"edges":[{"id","src","tgt"}...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

/// Maps from wire ids to canonical indices, recorded while parsing.
pub(crate) struct GraphIds {
    pub vertices: HashMap<String, usize>,
    pub edges: HashMap<String, usize>,
}

impl GraphJson {
    pub(crate) fn resolve(&self) -> Result<(Graph, GraphIds)> {
        let mut vertices = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vertices.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{v}`")));
            }
        }
        let mut edges = HashMap::new();
        let mut list = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if edges.insert(e.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge id `{}`", e.id)));
            }
            let lookup = |v: &String| {
                vertices.get(v).copied().ok_or_else(|| {
                    Error::InvalidGraph(format!("edge `{}` mentions unknown vertex `{v}`", e.id))
                })
            };
            list.push((lookup(&e.src)?, lookup(&e.tgt)?));
        }
        let graph = Graph::new(self.vertices.len(), list)?;
        Ok((graph, GraphIds { vertices, edges }))
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(json: GraphJson) -> Result<Self> {
        json.resolve().map(|(g, _)| g)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            vertices: (0..g.vertices).map(Graph::vertex_name).collect(),
            edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(i, &(s, t))| EdgeJson {
                    id: Graph::edge_name(i),
                    src: Graph::vertex_name(s),
                    tgt: Graph::vertex_name(t),
                })
                .collect(),
        }
    }
}
