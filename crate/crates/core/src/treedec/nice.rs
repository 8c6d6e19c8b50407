use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

use super::{validate, TreeDecomposition, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceNode {
    Leaf,
    Introduce { vertex: usize, child: usize },
    Forget { vertex: usize, child: usize },
    Join { left: usize, right: usize },
}

impl NiceNode {
    pub fn children(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            NiceNode::Leaf => (None, None),
            NiceNode::Introduce { child, .. } | NiceNode::Forget { child, .. } => {
                (Some(child), None)
            }
            NiceNode::Join { left, right } => (Some(left), Some(right)),
        };
        a.into_iter().chain(b)
    }
}

/// Rooted nice decomposition.
///
/// Nodes are stored children-first, so a forward scan is a valid bottom-up
/// evaluation order; the root is the last node and its bag is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    bags: Vec<Vec<usize>>,
}

impl NiceDecomposition {
    /// Assembles a decomposition from parts without checking it; see
    /// [`validate_nice`].
    pub fn from_parts(nodes: Vec<NiceNode>, bags: Vec<Vec<usize>>) -> Self {
        NiceDecomposition { nodes, bags }
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, t: usize) -> NiceNode {
        self.nodes[t]
    }

    /// Sorted bag of node `t`.
    pub fn bag(&self, t: usize) -> &[usize] {
        &self.bags[t]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Edge count of the longest path from each node down to a leaf.
    pub fn node_heights(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.nodes.len()];
        for t in 0..self.nodes.len() {
            h[t] = self.nodes[t]
                .children()
                .map(|c| h[c] + 1)
                .max()
                .unwrap_or(0);
        }
        h
    }

    /// Longest root-to-leaf path, in edges.
    pub fn height(&self) -> usize {
        if self.nodes.is_empty() {
            0
        } else {
            self.node_heights()[self.root()]
        }
    }

    /// Drops the node types, keeping the bags and tree edges.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut edges = Vec::new();
        for (t, node) in self.nodes.iter().enumerate() {
            for c in node.children() {
                edges.push((c, t));
            }
        }
        TreeDecomposition::new(self.bags.clone(), edges)
    }
}

/// Type checks every node and validates the underlying decomposition.
pub fn validate_nice(g: &WeightedGraph, nd: &NiceDecomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    if nd.nodes.is_empty() || nd.nodes.len() != nd.bags.len() {
        return vec![Violation::NotATree(
            "empty or inconsistent node list".into(),
        )];
    }
    let mut has_parent = vec![false; nd.nodes.len()];
    let mut forgets = vec![0usize; g.vertex_count()];
    for (t, node) in nd.nodes.iter().enumerate() {
        let bag = &nd.bags[t];
        for c in node.children() {
            if c >= t || has_parent[c] {
                return vec![Violation::NotATree(format!(
                    "node {t} has an out-of-order or shared child {c}"
                ))];
            }
            has_parent[c] = true;
        }
        let ok = match *node {
            NiceNode::Leaf => bag.is_empty(),
            NiceNode::Introduce { vertex, child } => {
                let cb = &nd.bags[child];
                cb.binary_search(&vertex).is_err() && with(cb, vertex) == *bag
            }
            NiceNode::Forget { vertex, child } => {
                if vertex < forgets.len() {
                    forgets[vertex] += 1;
                }
                let cb = &nd.bags[child];
                cb.binary_search(&vertex).is_ok() && without(cb, vertex) == *bag
            }
            NiceNode::Join { left, right } => nd.bags[left] == *bag && nd.bags[right] == *bag,
        };
        if !ok {
            out.push(Violation::NotATree(format!(
                "node {t} ({node:?}) does not match its bag transition"
            )));
        }
    }
    if !nd.bags[nd.root()].is_empty() {
        out.push(Violation::NotATree("root bag is not empty".into()));
    }
    for (v, &f) in forgets.iter().enumerate() {
        if f > 1 {
            out.push(Violation::NotATree(format!(
                "vertex {v} is forgotten {f} times"
            )));
        }
    }
    if !out.is_empty() {
        return out;
    }
    validate(g, &nd.to_tree_decomposition())
}

pub(crate) fn ensure_valid_nice(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<()> {
    let v = validate_nice(g, nd);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidDecomposition(v))
    }
}

fn with(bag: &[usize], v: usize) -> Vec<usize> {
    let mut b = bag.to_vec();
    let pos = b.binary_search(&v).unwrap_or_else(|p| p);
    b.insert(pos, v);
    b
}

fn without(bag: &[usize], v: usize) -> Vec<usize> {
    bag.iter().copied().filter(|&x| x != v).collect()
}

struct Builder {
    nodes: Vec<NiceNode>,
    bags: Vec<Vec<usize>>,
}

impl Builder {
    fn push(&mut self, node: NiceNode, bag: Vec<usize>) -> usize {
        self.nodes.push(node);
        self.bags.push(bag);
        self.nodes.len() - 1
    }

    /// Walks from the bag of `top` to `target`: forgets first, then
    /// introduces, both in ascending vertex order.
    fn transition(&mut self, mut top: usize, target: &[usize]) -> usize {
        let current = self.bags[top].clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            let bag = without(&self.bags[top], v);
            top = self.push(
                NiceNode::Forget {
                    vertex: v,
                    child: top,
                },
                bag,
            );
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let bag = with(&self.bags[top], v);
            top = self.push(
                NiceNode::Introduce {
                    vertex: v,
                    child: top,
                },
                bag,
            );
        }
        top
    }
}

/// Converts a decomposition into a nice one of the same width.
///
/// The tree is rooted at bag 0, children are visited in order of their
/// smallest bag vertex (empty bags last, ties by bag id), equal consecutive
/// bags are contracted, several children are combined by a left-deep chain of
/// joins, and the root bag is forgotten down to the empty set.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceDecomposition> {
    let violations = td.structural_violations();
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    let mut b = Builder {
        nodes: Vec::new(),
        bags: Vec::new(),
    };
    let k = td.bag_count();
    if k == 0 {
        b.push(NiceNode::Leaf, Vec::new());
        return Ok(NiceDecomposition {
            nodes: b.nodes,
            bags: b.bags,
        });
    }
    let adj = td.adjacency();
    let key = |i: usize| (td.bags[i].first().copied().unwrap_or(usize::MAX), i);

    // Iterative post-order; paths with tens of thousands of bags are common.
    let mut parent = vec![usize::MAX; k];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                children[x].push(y);
                stack.push(y);
            }
        }
    }
    for c in &mut children {
        c.sort_by_key(|&i| key(i));
    }

    let mut top = vec![usize::MAX; k];
    for &x in order.iter().rev() {
        let target = td.bags[x].clone();
        let mut branches = Vec::new();
        for &c in &children[x] {
            branches.push(b.transition(top[c], &target));
        }
        if branches.is_empty() {
            let leaf = b.push(NiceNode::Leaf, Vec::new());
            branches.push(b.transition(leaf, &target));
        }
        let mut acc = branches[0];
        for &r in &branches[1..] {
            acc = b.push(
                NiceNode::Join {
                    left: acc,
                    right: r,
                },
                target.clone(),
            );
        }
        top[x] = acc;
    }
    b.transition(top[0], &[]);
    Ok(NiceDecomposition {
        nodes: b.nodes,
        bags: b.bags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bag_chain() {
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        let nd = make_nice(&td).unwrap();
        assert_eq!(
            nd.nodes(),
            &[
                NiceNode::Leaf,
                NiceNode::Introduce {
                    vertex: 0,
                    child: 0
                },
                NiceNode::Introduce {
                    vertex: 1,
                    child: 1
                },
                NiceNode::Forget {
                    vertex: 0,
                    child: 2
                },
                NiceNode::Forget {
                    vertex: 1,
                    child: 3
                },
            ]
        );
        assert!(nd.bag(nd.root()).is_empty());
        assert_eq!(nd.height(), 4);
    }

    #[test]
    fn shared_vertex_forgotten_once() {
        let g = WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        let nd = make_nice(&td).unwrap();
        let forgets_of_1 = nd
            .nodes()
            .iter()
            .filter(|n| matches!(n, NiceNode::Forget { vertex: 1, .. }))
            .count();
        assert_eq!(forgets_of_1, 1);
        assert!(validate_nice(&g, &nd).is_empty());
        assert_eq!(nd.width(), 1);
    }

    #[test]
    fn leaf_root_height_zero() {
        let nd = make_nice(&TreeDecomposition::default()).unwrap();
        assert_eq!(nd.len(), 1);
        assert_eq!(nd.height(), 0);
    }

    #[test]
    fn join_height_is_one_more_than_branches() {
        // Root bag {0} with two children {0,1} and {0,2}.
        let td =
            TreeDecomposition::new(vec![vec![0], vec![0, 1], vec![0, 2]], vec![(0, 1), (0, 2)]);
        let nd = make_nice(&td).unwrap();
        let h = nd.node_heights();
        let join = nd
            .nodes()
            .iter()
            .position(|n| matches!(n, NiceNode::Join { .. }))
            .unwrap();
        // Each branch: Leaf, I(0), I(x), F(x) -> 3 edges.
        assert_eq!(h[join], 4);
        assert_eq!(nd.height(), 5);
    }

    #[test]
    fn rejects_disconnected_occurrences() {
        let td = TreeDecomposition::path(vec![vec![2], vec![0, 1], vec![1, 2]]);
        assert!(matches!(
            make_nice(&td),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn validate_nice_catches_bad_transition() {
        let g = WeightedGraph::unweighted(1, []).unwrap();
        let nd = NiceDecomposition::from_parts(
            vec![
                NiceNode::Leaf,
                NiceNode::Introduce {
                    vertex: 0,
                    child: 0,
                },
                NiceNode::Forget {
                    vertex: 0,
                    child: 1,
                },
            ],
            vec![vec![], vec![0], vec![0]],
        );
        assert!(!validate_nice(&g, &nd).is_empty());
    }
}
