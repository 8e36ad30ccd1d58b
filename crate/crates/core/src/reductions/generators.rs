use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{AbdError, Result};
use crate::format::is_identifier;
use crate::model::{rels, AbductionInstance, ConstraintLanguage, NamedConstraint};

/// A simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are stored once, smaller endpoint first, in sorted order.
    pub fn new(vertices: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let unique: BTreeSet<&String> = vertices.iter().collect();
        if unique.len() != vertices.len() {
            return Err(AbdError::Precondition("duplicate vertex name".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !is_identifier(v)) {
            return Err(AbdError::Precondition(format!("`{v}` is not a valid vertex name")));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(AbdError::Precondition("edge endpoint out of range".into()));
            }
            if a == b {
                return Err(AbdError::Precondition(format!("self-loop on `{}`", vertices[a])));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { vertices, edges: set.into_iter().collect() })
    }

    /// Parses `a-b,b-c` or whitespace-separated `a-b` / `a b` pairs.
    /// Vertices are numbered in order of first appearance.
    pub fn parse_edges(text: &str) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let index = |name: &str, vertices: &mut Vec<String>| match vertices.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                vertices.push(name.to_string());
                vertices.len() - 1
            }
        };
        let tokens: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        let mut pending: Option<&str> = None;
        for t in tokens {
            let (a, b) = match (t.split_once('-'), pending.take()) {
                (Some((a, b)), None) => (a, b),
                (None, None) => {
                    pending = Some(t);
                    continue;
                }
                (None, Some(a)) => (a, t),
                (Some(_), Some(a)) => return Err(AbdError::Precondition(format!("vertex `{a}` has no partner"))),
            };
            let (i, j) = (index(a, &mut vertices), index(b, &mut vertices));
            edges.push((i, j));
        }
        if let Some(a) = pending {
            return Err(AbdError::Precondition(format!("vertex `{a}` has no partner")));
        }
        Graph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn is_independent(&self, set: &BTreeSet<usize>) -> bool {
        self.edges.iter().all(|(a, b)| !(set.contains(a) && set.contains(b)))
    }

    fn is_cover(&self, set: &BTreeSet<usize>) -> bool {
        self.edges.iter().all(|(a, b)| set.contains(a) || set.contains(b))
    }

    /// Whether some independent set has exactly `k` vertices.
    pub fn has_independent_set(&self, k: usize) -> bool {
        (0..self.vertices.len()).combinations(k).any(|c| self.is_independent(&c.into_iter().collect()))
    }

    /// Whether some vertex cover has at most `k` vertices.
    pub fn has_vertex_cover(&self, k: usize) -> bool {
        (0..=k.min(self.vertices.len()))
            .any(|j| (0..self.vertices.len()).combinations(j).any(|c| self.is_cover(&c.into_iter().collect())))
    }

    fn fresh(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.vertices.contains(&name) {
            name.push('_');
        }
        name
    }
}

/// Independent set of size `k` as exact abduction of size `k + 1`: one
/// NAND per edge, every vertex a hypothesis, plus a free hypothesis `z`
/// that is also the only manifestation.
pub fn gen_indset_eq(g: &Graph, k: usize) -> Result<AbductionInstance> {
    let mut lang = ConstraintLanguage::new();
    let nand = lang.insert(rels::nand(2))?;
    let cons = g
        .edges
        .iter()
        .map(|&(a, b)| NamedConstraint { relation: nand, args: vec![g.vertices[a].clone(), g.vertices[b].clone()] })
        .collect();
    let z = g.fresh("z");
    let hyps = g.vertices.iter().cloned().chain([z.clone()]);
    AbductionInstance::from_named(lang, cons, hyps, [z], Some(k + 1))
}

/// Vertex cover of size at most `k` as bounded abduction with a single
/// manifestation. Each vertex implies its edges, and a chain
/// `c_i ← e_i ∧ c_{i−1}` collects all edges into the last `c`.
pub fn gen_vertexcover_le(g: &Graph, k: usize) -> Result<AbductionInstance> {
    let mut lang = ConstraintLanguage::new();
    let imp = lang.insert(rels::imp())?;
    let and_imp = lang.insert(rels::horn3())?;
    let edge = |i: usize| g.fresh(&format!("e{}", i + 1));
    let chain = |i: usize| g.fresh(&format!("c{}", i + 1));
    let mut cons = Vec::new();
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        for v in [a, b] {
            cons.push(NamedConstraint { relation: imp, args: vec![g.vertices[v].clone(), edge(i)] });
        }
        cons.push(if i == 0 {
            NamedConstraint { relation: imp, args: vec![edge(0), chain(0)] }
        } else {
            NamedConstraint { relation: and_imp, args: vec![edge(i), chain(i - 1), chain(i)] }
        });
    }
    let mans: Vec<String> = g.edges.len().checked_sub(1).map(chain).into_iter().collect();
    AbductionInstance::from_named(lang, cons, g.vertices.iter().cloned(), mans, Some(k))
}
