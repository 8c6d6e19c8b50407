//! Edge-weighted simple graphs, cuts, and the stability predicate.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Weight = BigUint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Simple undirected graph with positive arbitrary-precision edge weights.
///
/// Edges are kept with `u < v`, sorted lexicographically; adjacency lists are
/// sorted by neighbor id. The structure is immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    degree: Vec<Weight>,
}

impl WeightedGraph {
    /// Builds a graph, merging parallel edges by summing their weights.
    pub fn new<I, W>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, W)>,
        W: Into<Weight>,
    {
        let mut merged: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
        for (u, v, w) in edges {
            let w: Weight = w.into();
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::InvalidVertex {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if w.is_zero() {
                return Err(Error::NonPositiveWeight { u, v });
            }
            *merged.entry((u.min(v), u.max(v))).or_default() += w;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        let mut adj = vec![Vec::new(); vertex_count];
        let mut degree = vec![Weight::zero(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
            degree[e.u] += &e.weight;
            degree[e.v] += &e.weight;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(WeightedGraph {
            n: vertex_count,
            edges,
            adj,
            degree,
        })
    }

    /// Unit-weight graph.
    pub fn unweighted<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(vertex_count, edges.into_iter().map(|(u, v)| (u, v, 1u32)))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    /// `(neighbor, edge index)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> Weight {
        self.edges
            .iter()
            .map(|e| &e.weight)
            .max()
            .cloned()
            .unwrap_or_default()
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_one())
    }

    /// Index of the edge `uv`, if present.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let list = self.adj.get(u)?;
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<&Weight> {
        self.find_edge(u, v).map(|i| &self.edges[i].weight)
    }

    /// Sum of incident edge weights; 0 for isolated vertices.
    pub fn weighted_degree(&self, v: usize) -> Result<&Weight> {
        self.check_vertex(v)?;
        Ok(&self.degree[v])
    }

    pub(crate) fn wdeg(&self, v: usize) -> &Weight {
        &self.degree[v]
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                vertex_count: self.n,
            })
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Side assignment for every vertex: `false` is side 0, `true` is side 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    sides: Vec<bool>,
}

impl Cut {
    pub fn new(sides: Vec<bool>) -> Self {
        Cut { sides }
    }

    pub fn all_zero(n: usize) -> Self {
        Cut {
            sides: vec![false; n],
        }
    }

    pub fn from_sides<I: IntoIterator<Item = u8>>(sides: I) -> Self {
        Cut {
            sides: sides.into_iter().map(|s| s != 0).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, v: usize) -> bool {
        self.sides[v]
    }

    pub fn side_bit(&self, v: usize) -> u8 {
        self.sides[v] as u8
    }

    pub fn set(&mut self, v: usize, side: bool) {
        self.sides[v] = side;
    }

    pub fn flip(&mut self, v: usize) {
        self.sides[v] = !self.sides[v];
    }

    /// Every vertex moved to the other side.
    pub fn flipped(&self) -> Cut {
        Cut {
            sides: self.sides.iter().map(|s| !s).collect(),
        }
    }

    pub fn sides(&self) -> &[bool] {
        &self.sides
    }

    pub fn crosses(&self, e: &Edge) -> bool {
        self.sides[e.u] != self.sides[e.v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexStability {
    pub weighted_degree: Weight,
    pub cut_weight: Weight,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub vertices: Vec<VertexStability>,
    pub cut_weight: Weight,
    pub stable: bool,
}

impl StabilityReport {
    pub fn unstable_vertices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.stable)
            .map(|(v, _)| v)
            .collect()
    }
}

fn check_cut(g: &WeightedGraph, c: &Cut) -> Result<()> {
    if c.len() != g.vertex_count() {
        return Err(Error::PartialCut {
            expected: g.vertex_count(),
            got: c.len(),
        });
    }
    Ok(())
}

/// Total weight of crossing edges.
pub fn cut_weight(g: &WeightedGraph, c: &Cut) -> Result<Weight> {
    check_cut(g, c)?;
    Ok(g.edges()
        .iter()
        .filter(|e| c.crosses(e))
        .map(|e| &e.weight)
        .sum())
}

/// Exact per-vertex stability statistics for a cut.
///
/// A vertex is stable iff `2 * cut_weight(v) >= d_w(v)`.
pub fn evaluate_cut(g: &WeightedGraph, c: &Cut) -> Result<StabilityReport> {
    check_cut(g, c)?;
    let mut incident = vec![Weight::zero(); g.vertex_count()];
    let mut total = Weight::zero();
    for e in g.edges() {
        if c.crosses(e) {
            incident[e.u] += &e.weight;
            incident[e.v] += &e.weight;
            total += &e.weight;
        }
    }
    let vertices: Vec<VertexStability> = incident
        .into_iter()
        .enumerate()
        .map(|(v, cut_weight)| {
            let d = g.wdeg(v).clone();
            let stable = (&cut_weight << 1u32) >= d;
            VertexStability {
                weighted_degree: d,
                cut_weight,
                stable,
            }
        })
        .collect();
    let stable = vertices.iter().all(|s| s.stable);
    Ok(StabilityReport {
        vertices,
        cut_weight: total,
        stable,
    })
}

pub fn is_stable(g: &WeightedGraph, c: &Cut) -> Result<bool> {
    Ok(evaluate_cut(g, c)?.stable)
}
