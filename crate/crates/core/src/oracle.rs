//! Ground truth: exhaustive enumeration, flip local search, and Price of
//! Anarchy.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{certify, solve_max_cut, solve_pseudo, OptimalCut};
use crate::graph::{Cut, Weight, WeightedGraph};
use crate::num::{fits_u128, Accum};
use crate::treedec::NiceDecomposition;

pub const DEFAULT_LIMIT: usize = 24;

/// Gray-code walk over all assignments with vertex 0 pinned to side 0,
/// keeping crossing weights and the number of unstable vertices current.
struct Walk<A> {
    g: WeightedGraph,
    w: Vec<A>,
    deg: Vec<A>,
    sides: Vec<bool>,
    cross: Vec<A>,
    total: A,
    unstable: usize,
    step: u64,
    steps: u64,
}

impl<A: Accum> Walk<A> {
    fn new(g: &WeightedGraph, limit: usize) -> Result<Self> {
        let n = g.vertex_count();
        if n > limit || n > 63 {
            return Err(Error::EnumerationLimit {
                vertices: n,
                limit: limit.min(63),
            });
        }
        let deg: Vec<A> = (0..n).map(|v| A::from_big(g.wdeg(v))).collect();
        let unstable = deg.iter().filter(|d| !d.is_zero()).count();
        Ok(Walk {
            g: g.clone(),
            w: g.edges().iter().map(|e| A::from_big(&e.weight)).collect(),
            deg,
            sides: vec![false; n],
            cross: vec![A::zero(); n],
            total: A::zero(),
            unstable,
            step: 0,
            steps: if n == 0 { 1 } else { 1u64 << (n - 1) },
        })
    }

    fn is_unstable(&self, v: usize) -> bool {
        self.cross[v].double() < self.deg[v]
    }

    fn flip(&mut self, x: usize) {
        let before: usize = self.is_unstable(x) as usize
            + self
                .g
                .neighbors(x)
                .iter()
                .filter(|&&(u, _)| self.is_unstable(u))
                .count();
        let now = !self.sides[x];
        self.sides[x] = now;
        for i in 0..self.g.neighbors(x).len() {
            let (u, e) = self.g.neighbors(x)[i];
            let w = &self.w[e];
            if self.sides[u] != now {
                self.cross[u].add_assign(w);
                self.cross[x].add_assign(w);
                self.total.add_assign(w);
            } else {
                self.cross[u] = self.cross[u].sub(w);
                self.cross[x] = self.cross[x].sub(w);
                self.total = self.total.sub(w);
            }
        }
        let after: usize = self.is_unstable(x) as usize
            + self
                .g
                .neighbors(x)
                .iter()
                .filter(|&&(u, _)| self.is_unstable(u))
                .count();
        self.unstable = self.unstable + after - before;
    }

    /// Moves to the next assignment; false once all have been visited.
    fn advance(&mut self) -> bool {
        self.step += 1;
        if self.step >= self.steps {
            return false;
        }
        self.flip(1 + self.step.trailing_zeros() as usize);
        true
    }
}

fn best_by<A: Accum>(
    g: &WeightedGraph,
    limit: usize,
    stable_only: bool,
    maximize: bool,
) -> Result<(Weight, Cut)> {
    let mut walk = Walk::<A>::new(g, limit)?;
    let mut best: Option<(A, Vec<bool>)> = None;
    loop {
        if !stable_only || walk.unstable == 0 {
            let replace = match &best {
                None => true,
                Some((b, s)) => {
                    let better = if maximize {
                        walk.total > *b
                    } else {
                        walk.total < *b
                    };
                    better || (walk.total == *b && walk.sides < *s)
                }
            };
            if replace {
                best = Some((walk.total.clone(), walk.sides.clone()));
            }
        }
        if !walk.advance() {
            break;
        }
    }
    let (w, s) = best.ok_or_else(|| Error::Internal("no stable assignment found".into()))?;
    Ok((w.to_big(), Cut::new(s)))
}

fn best(
    g: &WeightedGraph,
    limit: usize,
    stable_only: bool,
    maximize: bool,
) -> Result<(Weight, Cut)> {
    if fits_u128(&g.total_weight()) {
        best_by::<u128>(g, limit, stable_only, maximize)
    } else {
        best_by::<BigUint>(g, limit, stable_only, maximize)
    }
}

/// Minimum stable cut by enumerating `2^(n-1)` assignments. Ties go to the
/// lexicographically smallest assignment.
pub fn brute_min_stable_cut(g: &WeightedGraph) -> Result<OptimalCut> {
    brute_min_stable_cut_limited(g, DEFAULT_LIMIT)
}

pub fn brute_min_stable_cut_limited(g: &WeightedGraph, limit: usize) -> Result<OptimalCut> {
    let (weight, cut) = best(g, limit, true, false)?;
    certify(g, cut, weight)
}

pub fn brute_max_cut(g: &WeightedGraph) -> Result<Weight> {
    brute_max_cut_limited(g, DEFAULT_LIMIT).map(|(w, _)| w)
}

/// Maximum cut weight and the lexicographically smallest assignment reaching it.
pub fn brute_max_cut_limited(g: &WeightedGraph, limit: usize) -> Result<(Weight, Cut)> {
    best(g, limit, false, true)
}

/// Every stable cut with vertex 0 on side 0, in Gray-code order.
pub struct StableCuts {
    walk: Walk<BigUint>,
    done: bool,
}

impl Iterator for StableCuts {
    type Item = (Cut, Weight);

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let hit = (self.walk.unstable == 0)
                .then(|| (Cut::new(self.walk.sides.clone()), self.walk.total.clone()));
            self.done = !self.walk.advance();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

pub fn enumerate_stable_cuts(g: &WeightedGraph) -> Result<StableCuts> {
    enumerate_stable_cuts_limited(g, DEFAULT_LIMIT)
}

pub fn enumerate_stable_cuts_limited(g: &WeightedGraph, limit: usize) -> Result<StableCuts> {
    Ok(StableCuts {
        walk: Walk::new(g, limit)?,
        done: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivot {
    /// Scan vertices in a seeded random order, refreshed after every flip,
    /// and flip the first improving one.
    FirstImprovement,
    /// Flip the vertex with the largest gain, ties to the smallest id.
    BestImprovement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchOutcome {
    pub cut: Cut,
    pub weight: Weight,
    pub flips: u64,
}

/// Flips vertices while some flip strictly increases the cut weight. Each
/// flip gains at least 1, so there are at most `total_weight` flips.
pub fn local_search(
    g: &WeightedGraph,
    start: &Cut,
    pivot: Pivot,
    seed: u64,
) -> Result<LocalSearchOutcome> {
    if fits_u128(&g.total_weight()) {
        local_search_by::<u128>(g, start, pivot, seed)
    } else {
        local_search_by::<BigUint>(g, start, pivot, seed)
    }
}

fn local_search_by<A: Accum>(
    g: &WeightedGraph,
    start: &Cut,
    pivot: Pivot,
    seed: u64,
) -> Result<LocalSearchOutcome> {
    let n = g.vertex_count();
    if start.len() != n {
        return Err(Error::PartialCut {
            expected: n,
            got: start.len(),
        });
    }
    let w: Vec<A> = g.edges().iter().map(|e| A::from_big(&e.weight)).collect();
    let deg: Vec<A> = (0..n).map(|v| A::from_big(g.wdeg(v))).collect();
    let mut cut = start.clone();
    let mut cross = vec![A::zero(); n];
    for (i, e) in g.edges().iter().enumerate() {
        if cut.crosses(e) {
            cross[e.u].add_assign(&w[i]);
            cross[e.v].add_assign(&w[i]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut flips = 0u64;
    loop {
        let improving = |v: usize, cross: &[A]| cross[v].double() < deg[v];
        let pick = match pivot {
            Pivot::FirstImprovement => {
                order.shuffle(&mut rng);
                order.iter().copied().find(|&v| improving(v, &cross))
            }
            Pivot::BestImprovement => {
                let mut best: Option<(A, usize)> = None;
                for v in 0..n {
                    if improving(v, &cross) {
                        let gain = deg[v].sub(&cross[v].double());
                        if best.as_ref().is_none_or(|(b, _)| gain > *b) {
                            best = Some((gain, v));
                        }
                    }
                }
                best.map(|(_, v)| v)
            }
        };
        let Some(x) = pick else { break };
        cut.flip(x);
        flips += 1;
        let now = cut.side(x);
        for &(u, e) in g.neighbors(x) {
            if cut.side(u) != now {
                cross[u].add_assign(&w[e]);
                cross[x].add_assign(&w[e]);
            } else {
                cross[u] = cross[u].sub(&w[e]);
                cross[x] = cross[x].sub(&w[e]);
            }
        }
    }
    let mut total = A::zero();
    for (i, e) in g.edges().iter().enumerate() {
        if cut.crosses(e) {
            total.add_assign(&w[i]);
        }
    }
    Ok(LocalSearchOutcome {
        cut,
        weight: total.to_big(),
        flips,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoAReport {
    pub max_cut: Weight,
    pub min_stable_cut: Weight,
    /// `max_cut / min_stable_cut`, reduced; 1 when the graph has no edges.
    pub ratio: Ratio<BigUint>,
}

impl PoAReport {
    fn new(max_cut: Weight, min_stable_cut: Weight) -> Self {
        let ratio = if Zero::is_zero(&min_stable_cut) {
            Ratio::one()
        } else {
            Ratio::new(max_cut.clone(), min_stable_cut.clone())
        };
        PoAReport {
            max_cut,
            min_stable_cut,
            ratio,
        }
    }
}

pub fn price_of_anarchy(g: &WeightedGraph) -> Result<PoAReport> {
    price_of_anarchy_limited(g, DEFAULT_LIMIT)
}

pub fn price_of_anarchy_limited(g: &WeightedGraph, limit: usize) -> Result<PoAReport> {
    let min = brute_min_stable_cut_limited(g, limit)?;
    let (max, _) = brute_max_cut_limited(g, limit)?;
    Ok(PoAReport::new(max, min.weight))
}

/// Price of Anarchy through the decomposition-based solvers.
pub fn price_of_anarchy_dp(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<PoAReport> {
    let min = solve_pseudo(g, nd)?;
    let max = solve_max_cut(g, nd)?;
    Ok(PoAReport::new(max, min.weight))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> WeightedGraph {
        WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn big(x: u32) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_min_stable_cut(&c4()).unwrap().weight, big(2));
        let e = WeightedGraph::new(2, [(0, 1, 7u32)]).unwrap();
        assert_eq!(brute_min_stable_cut(&e).unwrap().weight, big(7));
        let p3 = WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(brute_min_stable_cut(&p3).unwrap().weight, big(2));
    }

    #[test]
    fn max_cut_examples() {
        assert_eq!(brute_max_cut(&c4()).unwrap(), big(4));
        let tri = WeightedGraph::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(brute_max_cut(&tri).unwrap(), big(2));
        let k23 =
            WeightedGraph::unweighted(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(brute_max_cut(&k23).unwrap(), big(6));
    }

    #[test]
    fn enumeration_examples() {
        let e = WeightedGraph::new(2, [(0, 1, 3u32)]).unwrap();
        assert_eq!(enumerate_stable_cuts(&e).unwrap().count(), 1);
        let weights: Vec<BigUint> = enumerate_stable_cuts(&c4())
            .unwrap()
            .map(|(_, w)| w)
            .collect();
        assert!(weights.contains(&big(2)) && weights.contains(&big(4)));
        let empty = WeightedGraph::unweighted(3, []).unwrap();
        assert_eq!(enumerate_stable_cuts(&empty).unwrap().count(), 4);
        let none = WeightedGraph::unweighted(0, []).unwrap();
        assert_eq!(enumerate_stable_cuts(&none).unwrap().count(), 1);
    }

    #[test]
    fn limit_is_resource_error() {
        let g = WeightedGraph::unweighted(30, []).unwrap();
        let e = brute_min_stable_cut(&g).unwrap_err();
        assert_eq!(e.kind(), crate::error::ErrorKind::Resource);
    }

    #[test]
    fn local_search_examples() {
        let g = c4();
        let max = Cut::from_sides([0, 1, 0, 1]);
        for pivot in [Pivot::FirstImprovement, Pivot::BestImprovement] {
            assert_eq!(local_search(&g, &max, pivot, 0).unwrap().flips, 0);
            let r = local_search(&g, &Cut::all_zero(4), pivot, 3).unwrap();
            assert!(r.flips <= 4);
            assert!(r.weight == big(2) || r.weight == big(4));
        }
        let e = WeightedGraph::new(2, [(0, 1, 9u32)]).unwrap();
        let r = local_search(&e, &Cut::all_zero(2), Pivot::BestImprovement, 0).unwrap();
        assert_eq!((r.flips, r.weight), (1, big(9)));
        // Best improvement with equal gains takes the smallest id.
        assert!(r.cut.side(0));
    }

    #[test]
    fn local_search_is_deterministic() {
        let g = WeightedGraph::new(
            5,
            [
                (0, 1, 3u32),
                (1, 2, 4),
                (2, 3, 1),
                (3, 4, 7),
                (4, 0, 2),
                (1, 3, 5),
            ],
        )
        .unwrap();
        let a = local_search(&g, &Cut::all_zero(5), Pivot::FirstImprovement, 42).unwrap();
        let b = local_search(&g, &Cut::all_zero(5), Pivot::FirstImprovement, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poa_examples() {
        let r = price_of_anarchy(&c4()).unwrap();
        assert_eq!(r.ratio, Ratio::from_integer(big(2)));
        let e = WeightedGraph::new(2, [(0, 1, 4u32)]).unwrap();
        assert_eq!(price_of_anarchy(&e).unwrap().ratio, Ratio::one());
        let tri = WeightedGraph::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(price_of_anarchy(&tri).unwrap().ratio, Ratio::one());
        let empty = WeightedGraph::unweighted(2, []).unwrap();
        assert_eq!(price_of_anarchy(&empty).unwrap().ratio, Ratio::one());
    }
}
