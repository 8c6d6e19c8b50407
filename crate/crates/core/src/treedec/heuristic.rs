use std::collections::BTreeSet;

use crate::graph::WeightedGraph;

use super::TreeDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    MinDegree,
    MinFill,
}

struct Elimination {
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

impl Elimination {
    fn fill(&self, v: usize) -> usize {
        let nb: Vec<usize> = self.adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !self.adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    }

    fn score(&self, v: usize, strategy: Strategy) -> usize {
        match strategy {
            Strategy::MinDegree => self.adj[v].len(),
            Strategy::MinFill => self.fill(v),
        }
    }
}

/// Greedy elimination-ordering decomposition.
///
/// Repeatedly eliminates the vertex with the smallest score (degree or fill-in,
/// ties by id), emitting the bag `{v} ∪ N(v)` of the current elimination graph.
/// Each bag is attached to the bag of its neighbor that is eliminated next;
/// bags without neighbors start a new component and are chained together.
/// Bag `i` belongs to the `i`-th eliminated vertex.
pub fn heuristic_decompose(g: &WeightedGraph, strategy: Strategy) -> TreeDecomposition {
    let n = g.vertex_count();
    let mut el = Elimination {
        adj: (0..n)
            .map(|v| g.neighbors(v).iter().map(|&(u, _)| u).collect())
            .collect(),
        alive: vec![true; n],
    };
    let mut score: Vec<usize> = (0..n).map(|v| el.score(v, strategy)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (score[v], v)).collect();

    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    let mut position = vec![usize::MAX; n];
    while let Some((_, v)) = queue.pop_first() {
        position[v] = order.len();
        order.push(v);
        el.alive[v] = false;
        let nb: Vec<usize> = el.adj[v].iter().copied().collect();
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        for &a in &nb {
            el.adj[a].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                el.adj[a].insert(b);
                el.adj[b].insert(a);
            }
        }
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        if strategy == Strategy::MinFill {
            for &a in &nb {
                touched.extend(el.adj[a].iter().copied());
            }
        }
        for w in touched {
            if !el.alive[w] {
                continue;
            }
            let s = el.score(w, strategy);
            if s != score[w] {
                queue.remove(&(score[w], w));
                score[w] = s;
                queue.insert((s, w));
            }
        }
    }

    let mut edges = Vec::new();
    let mut last_root: Option<usize> = None;
    for (i, bag) in bags.iter().enumerate() {
        let v = order[i];
        let next = bag.iter().filter(|&&u| u != v).map(|&u| position[u]).min();
        match next {
            Some(p) => edges.push((i, p)),
            None => {
                if let Some(r) = last_root {
                    edges.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    TreeDecomposition::new(bags, edges)
}
