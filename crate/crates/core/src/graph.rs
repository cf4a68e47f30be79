//! Signed simple graphs with string vertex ids.
//!
//! Vertex order is declaration order and is the canonical order used for
//! every deterministic output (vertex sets, edge lists, JSON).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(Error::InvalidSign(other)),
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Neg
    }

    /// 0 for positive, 1 for negative; sign products become xor.
    pub fn parity(self) -> u8 {
        self.is_negative() as u8
    }

    pub fn product<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Pos, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Pos => f.write_str("+1"),
            Sign::Neg => f.write_str("-1"),
        }
    }
}

/// A set of vertices of some host graph, kept sorted by canonical index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn from_mask(mask: u64) -> Self {
        VertexSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    /// Bitmask view; only valid for hosts with at most 64 vertices.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        !self.0.iter().any(|&v| other.contains(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn with(&self, v: usize) -> VertexSet {
        VertexSet::from_indices(self.0.iter().copied().chain(Some(v)))
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.0.iter().filter(|&&v| other.contains(v)).count()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_indices(iter)
    }
}

/// A simple undirected graph with a sign on every edge.
#[derive(Clone, Debug, Default)]
pub struct SignedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, Sign)>>,
    edges: BTreeMap<(usize, usize), Sign>,
}

impl PartialEq for SignedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for SignedGraph {}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SignedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from literal names and `(a, b, sign)` triples.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str, Sign)]) -> Result<Self> {
        let mut g = SignedGraph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for &(a, b, s) in edges {
            g.add_edge_by_name(a, b, s)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.adj.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, sign: Sign) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::Loop(self.names[a].clone()));
        }
        if self.edges.contains_key(&key(a, b)) {
            return Err(Error::DuplicateEdge(
                self.names[a].clone(),
                self.names[b].clone(),
            ));
        }
        self.edges.insert(key(a, b), sign);
        self.adj[a].push((b, sign));
        self.adj[b].push((a, sign));
        Ok(())
    }

    pub fn add_edge_by_name(&mut self, a: &str, b: &str, sign: Sign) -> Result<()> {
        let (a, b) = (self.id(a)?, self.id(b)?);
        self.add_edge(a, b, sign)
    }

    pub(crate) fn set_sign(&mut self, a: usize, b: usize, sign: Sign) {
        if let Some(s) = self.edges.get_mut(&key(a, b)) {
            *s = sign;
            for (n, s) in self.adj[a].iter_mut() {
                if *n == b {
                    *s = sign;
                }
            }
            for (n, s) in self.adj[b].iter_mut() {
                if *n == a {
                    *s = sign;
                }
            }
        }
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.names.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn contains_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn sign(&self, a: usize, b: usize) -> Option<Sign> {
        self.edges.get(&key(a, b)).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains_key(&key(a, b))
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Sign)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(a, b, sign)` with `a < b`, sorted by `(a, b)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Sign)> + '_ {
        self.edges.iter().map(|(&(a, b), &s)| (a, b, s))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::from_indices(0..self.vertex_count())
    }

    pub fn set(&self, names: &[&str]) -> Result<VertexSet> {
        names
            .iter()
            .map(|n| self.id(n))
            .collect::<Result<Vec<_>>>()
            .map(VertexSet::from_indices)
    }

    pub fn validate_set(&self, s: &VertexSet) -> Result<()> {
        s.iter().try_for_each(|v| self.check(v))
    }

    pub fn set_names(&self, s: &VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    /// Underlying graph with every sign set to `sign`.
    pub fn with_uniform_sign(&self, sign: Sign) -> SignedGraph {
        let mut g = self.clone();
        let keys: Vec<_> = g.edges.keys().copied().collect();
        for (a, b) in keys {
            g.set_sign(a, b, sign);
        }
        g
    }

    /// Disjoint union; vertices of `other` are renamed with `suffix`.
    pub fn disjoint_union(&self, other: &SignedGraph, suffix: &str) -> Result<SignedGraph> {
        let mut g = self.clone();
        let offset = g.vertex_count();
        for n in &other.names {
            g.add_vertex(&format!("{n}{suffix}"))?;
        }
        for (a, b, s) in other.edges() {
            g.add_edge(a + offset, b + offset, s)?;
        }
        Ok(g)
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: String,
    b: String,
    sign: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<EdgeDoc>,
}

/// Parses the graph JSON document `{"vertices": [...], "edges": [{"a","b","sign"}]}`.
pub fn parse_graph(text: &str) -> Result<SignedGraph> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut g = SignedGraph::new();
    for v in &doc.vertices {
        g.add_vertex(v)?;
    }
    for e in &doc.edges {
        let sign = Sign::from_i64(e.sign)?;
        g.add_edge_by_name(&e.a, &e.b, sign)?;
    }
    Ok(g)
}

pub fn graph_to_value(g: &SignedGraph) -> serde_json::Value {
    let doc = GraphDoc {
        vertices: g.names.clone(),
        edges: g
            .edges()
            .map(|(a, b, s)| EdgeDoc {
                a: g.names[a].clone(),
                b: g.names[b].clone(),
                sign: s.value() as i64,
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("graph document is always serializable")
}

pub fn serialize_graph(g: &SignedGraph) -> String {
    serde_json::to_string_pretty(&graph_to_value(g)).expect("graph document is always serializable")
}
