use num_bigint::BigUint;
use num_traits::One;

use super::{check_limit, meta, place_leaves, Assembly, ReductionArtifact, Role, Source};
use crate::error::{Error, Result};
use crate::graph::{cut_weight, Cut, WeightedGraph};
use crate::oracle::brute_max_cut_limited;
use crate::treedec::PathBuilder;

/// Subdivides every edge once and hangs three leaves on every original
/// vertex. Threshold `3|V| + 2|E| - k`.
///
/// Layout: original vertices keep their ids, subdivision vertex of edge `e` is
/// `|V| + e`, leaves follow.
pub fn maxcut_to_unweighted(g: &WeightedGraph, k: u64) -> Result<ReductionArtifact> {
    if !g.is_unweighted() {
        return Err(Error::InvalidSource(
            "source graph must be unit-weighted".into(),
        ));
    }
    if g.max_degree() > 3 {
        return Err(Error::InvalidSource(format!(
            "source maximum degree {} exceeds 3",
            g.max_degree()
        )));
    }
    let (n, m) = (g.vertex_count(), g.edge_count());
    if k > m as u64 {
        return Err(Error::InvalidSource(format!(
            "k = {k} exceeds the {m} edges"
        )));
    }
    let mut a = Assembly::default();
    for v in 0..n {
        a.vertex(Role::Original(v));
    }
    for (i, e) in g.edges().iter().enumerate() {
        let s = a.vertex(Role::Subdivision(i));
        a.edge(e.u, s, 1u32);
        a.edge(s, e.v, 1u32);
    }
    let one = BigUint::one();
    let leaves: Vec<Vec<usize>> = (0..n).map(|v| a.leaves(v, 3, &one)).collect();

    // Vertex-separation layout in id order: a vertex stays in the bag until
    // its last neighbor has arrived.
    let last: Vec<usize> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(u, _)| u)
                .max()
                .unwrap_or(v)
                .max(v)
        })
        .collect();
    let mut pb = PathBuilder::new();
    for v in 0..n {
        pb.add(v);
        for &l in &leaves[v] {
            pb.touch(l);
        }
        for &(u, e) in g.neighbors(v) {
            if u < v {
                pb.touch(n + e);
            }
        }
        for u in 0..=v {
            if last[u] == v {
                pb.remove(u);
            }
        }
    }
    let threshold = (3 * n + 2 * m) as u64 - k;
    a.finish(
        BigUint::from(threshold),
        pb.finish(),
        Source::MaxCut {
            graph: g.clone(),
            k,
        },
        meta(&[("leaf_count", 3 * n as u128), ("subdivisions", m as u128)]),
    )
}

pub(super) fn verify(g: &WeightedGraph, k: u64, c: &Cut) -> Result<()> {
    let w = cut_weight(g, c).map_err(|e| Error::InvalidWitness(e.to_string()))?;
    if w < BigUint::from(k) {
        return Err(Error::InvalidWitness(format!(
            "cut of size {w} is below k = {k}"
        )));
    }
    Ok(())
}

pub(super) fn solve(g: &WeightedGraph, k: u64, limit: usize) -> Result<Option<Cut>> {
    check_limit(g.vertex_count(), limit)?;
    let (w, c) = brute_max_cut_limited(g, limit)?;
    Ok((w >= BigUint::from(k)).then_some(c))
}

/// Same sides on original vertices; each subdivision vertex opposite its
/// smaller endpoint.
pub(super) fn lift(art: &ReductionArtifact, c: &Cut) -> Cut {
    let Source::MaxCut { graph, .. } = &art.source else {
        unreachable!()
    };
    let n = graph.vertex_count();
    let mut sides = vec![false; art.roles.len()];
    sides[..n].copy_from_slice(c.sides());
    for (i, e) in graph.edges().iter().enumerate() {
        sides[n + i] = !c.side(e.u);
    }
    place_leaves(&art.roles, &mut sides);
    Cut::new(sides)
}

pub(super) fn extract(g: &WeightedGraph, c: &Cut) -> Cut {
    Cut::new(c.sides()[..g.vertex_count()].to_vec())
}
