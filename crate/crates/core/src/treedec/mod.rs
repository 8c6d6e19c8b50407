//! Tree decompositions: validation, heuristics, nice-ification, and the
//! neighborhood augmentation used by the degree-parameterized solver.

mod heuristic;
mod nice;

use std::collections::BTreeSet;
use std::fmt;

pub use heuristic::{heuristic_decompose, Strategy};
pub(crate) use nice::ensure_valid_nice;
pub use nice::{make_nice, validate_nice, NiceDecomposition, NiceNode};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Undirected tree over bag ids; each bag is a sorted, duplicate-free vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotATree(String),
    UnknownVertex { bag: usize, vertex: usize },
    UncoveredVertex(usize),
    UncoveredEdge(usize, usize),
    DisconnectedVertex(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree(why) => write!(f, "not a tree: {why}"),
            Violation::UnknownVertex { bag, vertex } => {
                write!(f, "bag {bag} references unknown vertex {vertex}")
            }
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u},{v}) is in no bag"),
            Violation::DisconnectedVertex(v) => {
                write!(f, "bags containing vertex {v} are not connected")
            }
        }
    }
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; the tree shape is checked by [`validate`].
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    /// Bags joined in sequence.
    pub fn path(bags: Vec<Vec<usize>>) -> Self {
        let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
        Self::new(bags, edges)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; 0 for an empty decomposition.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn is_path(&self) -> bool {
        let mut deg = vec![0usize; self.bags.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.iter().all(|&d| d <= 2) && self.tree_violation().is_none()
    }

    /// Adjacency lists of the tree, sorted.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    fn tree_violation(&self) -> Option<Violation> {
        let k = self.bags.len();
        for &(a, b) in &self.edges {
            if a >= k || b >= k {
                return Some(Violation::NotATree(format!(
                    "edge ({a},{b}) references a missing bag"
                )));
            }
            if a == b {
                return Some(Violation::NotATree(format!("self-loop on bag {a}")));
            }
        }
        if k == 0 {
            return None;
        }
        if self.edges.len() != k - 1 {
            return Some(Violation::NotATree(format!(
                "{} bags but {} tree edges",
                k,
                self.edges.len()
            )));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != k {
            return Some(Violation::NotATree("tree is disconnected".into()));
        }
        None
    }

    /// Connectivity of every vertex's occurrence set, without a graph.
    ///
    /// A subgraph of a tree is a forest, so `c` occurrences are connected iff
    /// exactly `c - 1` tree edges have the vertex at both ends.
    fn connectivity_violations(&self, universe: usize) -> Vec<Violation> {
        let mut occ = vec![0usize; universe];
        let mut inner = vec![0usize; universe];
        for b in &self.bags {
            for &v in b {
                occ[v] += 1;
            }
        }
        for &(a, b) in &self.edges {
            let (x, y) = (&self.bags[a], &self.bags[b]);
            let (mut i, mut j) = (0, 0);
            while i < x.len() && j < y.len() {
                match x[i].cmp(&y[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        inner[x[i]] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        (0..universe)
            .filter(|&v| occ[v] > 0 && inner[v] + 1 != occ[v])
            .map(Violation::DisconnectedVertex)
            .collect()
    }

    pub(crate) fn max_vertex(&self) -> Option<usize> {
        self.bags.iter().flatten().copied().max()
    }

    /// Structural checks that do not need the graph: tree shape and
    /// connectivity of occurrence sets.
    pub(crate) fn structural_violations(&self) -> Vec<Violation> {
        if let Some(v) = self.tree_violation() {
            return vec![v];
        }
        let universe = self.max_vertex().map_or(0, |m| m + 1);
        self.connectivity_violations(universe)
    }
}

/// Checks coverage and connectivity; violations are returned as data.
pub fn validate(g: &WeightedGraph, td: &TreeDecomposition) -> Vec<Violation> {
    if let Some(v) = td.tree_violation() {
        return vec![v];
    }
    let n = g.vertex_count();
    let mut out = Vec::new();
    for (i, b) in td.bags.iter().enumerate() {
        for &v in b {
            if v >= n {
                out.push(Violation::UnknownVertex { bag: i, vertex: v });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let mut where_: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, b) in td.bags.iter().enumerate() {
        for &v in b {
            where_[v].push(i);
        }
    }
    for (v, w) in where_.iter().enumerate() {
        if w.is_empty() {
            out.push(Violation::UncoveredVertex(v));
        }
    }
    for e in g.edges() {
        let (a, b) = (&where_[e.u], &where_[e.v]);
        let shared = a.iter().any(|i| b.binary_search(i).is_ok());
        if !shared {
            out.push(Violation::UncoveredEdge(e.u, e.v));
        }
    }
    out.extend(td.connectivity_violations(n));
    out
}

pub(crate) fn ensure_valid(g: &WeightedGraph, td: &TreeDecomposition) -> Result<()> {
    let v = validate(g, td);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidDecomposition(v))
    }
}

/// Adds `N(v)` to every bag containing `v`.
///
/// The result stays valid (each new occurrence of a neighbor `u` of `v` sits
/// on `v`'s subtree, which intersects `u`'s), every vertex gets a bag holding
/// its closed neighborhood, and the width is at most `(Δ+1)(tw+1) - 1`.
pub fn augment_neighborhoods(
    g: &WeightedGraph,
    td: &TreeDecomposition,
) -> Result<TreeDecomposition> {
    ensure_valid(g, td)?;
    let bags = td
        .bags
        .iter()
        .map(|b| {
            let mut set: BTreeSet<usize> = b.iter().copied().collect();
            for &v in b {
                set.extend(g.neighbors(v).iter().map(|&(u, _)| u));
            }
            set.into_iter().collect()
        })
        .collect();
    Ok(TreeDecomposition {
        bags,
        edges: td.edges.clone(),
    })
}

/// Moves the given vertices out of the main bags into side branches.
///
/// The vertices must form an independent set. Each one is grouped with the
/// others sharing its anchor, the neighbor that occurs in the fewest bags;
/// a group becomes a chain of bags `U ∪ {x}`, where `U` is the union of the
/// group's neighborhoods, hung below a bag containing `U`. A group whose `U`
/// fits in no bag is split into single-vertex chains. Dynamic programs then
/// handle each group away from the large tables of the main bags and merge it
/// with one join.
pub fn hang_pendants(
    g: &WeightedGraph,
    td: &TreeDecomposition,
    detach: &[usize],
) -> Result<TreeDecomposition> {
    ensure_valid(g, td)?;
    let n = g.vertex_count();
    let mut gone = vec![false; n];
    for &x in detach {
        g.check_vertex(x)?;
        gone[x] = true;
    }
    for &x in detach {
        if let Some(&(y, _)) = g.neighbors(x).iter().find(|&&(y, _)| gone[y]) {
            return Err(Error::MalformedDecomposition(format!(
                "vertices {x} and {y} to detach are adjacent"
            )));
        }
    }
    let mut bags: Vec<Vec<usize>> = td
        .bags
        .iter()
        .map(|b| b.iter().copied().filter(|&v| !gone[v]).collect())
        .collect();
    let mut edges = td.edges.clone();
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, b) in bags.iter().enumerate() {
        for &v in b {
            occ[v].push(i);
        }
    }
    let holder = |set: &[usize], anchor: Option<usize>| -> Option<usize> {
        let candidates: Box<dyn Iterator<Item = usize>> = match anchor {
            Some(a) => Box::new(occ[a].iter().copied()),
            None => Box::new(0..bags.len()),
        };
        let mut found = None;
        for i in candidates {
            if set.iter().all(|v| bags[i].binary_search(v).is_ok()) {
                found = Some(i);
                break;
            }
        }
        found
    };

    let mut groups: std::collections::BTreeMap<Option<usize>, Vec<usize>> = Default::default();
    let mut seen = vec![false; n];
    for &x in detach {
        if std::mem::replace(&mut seen[x], true) {
            continue;
        }
        let anchor = g
            .neighbors(x)
            .iter()
            .map(|&(y, _)| y)
            .min_by_key(|&y| (occ[y].len(), y));
        groups.entry(anchor).or_default().push(x);
    }
    let mut chains: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for (anchor, mut members) in groups {
        members.sort_by_key(|&x| (g.degree(x), x));
        let union: BTreeSet<usize> = members
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().map(|&(y, _)| y))
            .collect();
        let union: Vec<usize> = union.into_iter().collect();
        if let Some(at) = holder(&union, anchor) {
            chains.push((at, union, members));
            continue;
        }
        for x in members {
            let own: Vec<usize> = g.neighbors(x).iter().map(|&(y, _)| y).collect();
            let at = holder(&own, anchor).ok_or_else(|| {
                Error::MalformedDecomposition(format!(
                    "no bag holds the neighborhood of vertex {x}"
                ))
            })?;
            chains.push((at, own, vec![x]));
        }
    }
    for (at, union, members) in chains {
        let mut prev = at;
        for &x in members.iter().rev() {
            let mut bag = union.clone();
            bag.push(x);
            bag.sort_unstable();
            bags.push(bag);
            edges.push((prev, bags.len() - 1));
            prev = bags.len() - 1;
        }
    }
    Ok(TreeDecomposition::new(bags, edges))
}

/// Incremental path-decomposition writer.
///
/// Vertices are added and removed one at a time; a bag is emitted whenever a
/// removal follows at least one addition, so every set of vertices that was
/// simultaneously present ends up inside some bag.
#[derive(Debug, Default)]
pub struct PathBuilder {
    current: BTreeSet<usize>,
    bags: Vec<Vec<usize>>,
    grown: bool,
}

impl PathBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: usize) {
        if self.current.insert(v) {
            self.grown = true;
        }
    }

    pub fn remove(&mut self, v: usize) {
        if self.grown {
            self.emit();
        }
        self.current.remove(&v);
    }

    /// Adds and immediately removes `v`.
    pub fn touch(&mut self, v: usize) {
        self.add(v);
        self.remove(v);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.current.contains(&v)
    }

    fn emit(&mut self) {
        self.bags.push(self.current.iter().copied().collect());
        self.grown = false;
    }

    pub fn finish(mut self) -> TreeDecomposition {
        if self.grown {
            self.emit();
        }
        TreeDecomposition::path(self.bags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn single_bag_triangle() {
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![]);
        assert!(validate(&triangle(), &td).is_empty());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn missing_edge_detected() {
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(
            validate(&triangle(), &td),
            vec![Violation::UncoveredEdge(0, 2)]
        );
    }

    #[test]
    fn broken_subtree_detected() {
        let g = WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        // {2} and {1,2} both hold vertex 2 but are separated by {0,1}.
        let td = TreeDecomposition::path(vec![vec![2], vec![0, 1], vec![1, 2]]);
        assert_eq!(validate(&g, &td), vec![Violation::DisconnectedVertex(2)]);
    }

    #[test]
    fn not_a_tree() {
        let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![0, 1]], vec![]);
        assert!(matches!(validate(&g, &td)[0], Violation::NotATree(_)));
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![(0, 3)]);
        assert!(matches!(validate(&g, &td)[0], Violation::NotATree(_)));
    }

    #[test]
    fn uncovered_and_unknown_vertices() {
        let g = WeightedGraph::unweighted(3, [(0, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        assert_eq!(validate(&g, &td), vec![Violation::UncoveredVertex(2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1, 7]], vec![]);
        assert!(matches!(
            validate(&g, &td)[0],
            Violation::UnknownVertex { vertex: 7, .. }
        ));
    }

    #[test]
    fn augment_star() {
        let g = WeightedGraph::unweighted(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![(0, 1), (1, 2)],
        );
        let aug = augment_neighborhoods(&g, &td).unwrap();
        assert!(aug.bags().iter().all(|b| b == &vec![0, 1, 2, 3]));
        assert!(validate(&g, &aug).is_empty());
    }

    #[test]
    fn augment_edgeless_is_identity() {
        let g = WeightedGraph::unweighted(3, []).unwrap();
        let td = TreeDecomposition::path(vec![vec![0], vec![1], vec![2]]);
        assert_eq!(augment_neighborhoods(&g, &td).unwrap(), td);
    }

    #[test]
    fn augment_rejects_invalid() {
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        assert!(matches!(
            augment_neighborhoods(&triangle(), &td),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn path_builder_covers_cooccurrence() {
        let mut pb = PathBuilder::new();
        pb.add(0);
        pb.add(1);
        pb.touch(2);
        pb.remove(0);
        pb.add(3);
        let td = pb.finish();
        assert_eq!(td.bags(), &[vec![0, 1, 2], vec![1, 3]]);
        assert!(td.is_path());
    }

    #[test]
    fn pendants_hang_in_chains() {
        // Path 0-1-2 with leaves 3, 4 on vertex 1 and leaf 5 on vertex 2.
        let g = WeightedGraph::unweighted(6, [(0, 1), (1, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1, 3, 4], vec![1, 2, 5]]);
        let hung = hang_pendants(&g, &td, &[3, 4, 5]).unwrap();
        assert!(validate(&g, &hung).is_empty());
        assert_eq!(hung.width(), 1);
        assert_eq!(hung.bag_count(), 5);
        assert_eq!(&hung.bags()[..2], &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn pendants_must_be_independent() {
        let g = WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        assert!(matches!(
            hang_pendants(&g, &td, &[0, 1]),
            Err(Error::MalformedDecomposition(_))
        ));
        assert!(hang_pendants(&g, &td, &[0, 2]).is_ok());
    }
}
