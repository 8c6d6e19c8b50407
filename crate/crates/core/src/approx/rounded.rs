//! Signature DP with geometrically rounded same-side weights.
//!
//! Counters are replaced by the least integer power of `1 + δ` at least as
//! large as the value they stand for, with `δ = ε / (5H)` and `H` the height
//! of the nice decomposition. Each node rounds each counter at most once, so a
//! stored power over-approximates the true value by at most `(1+δ)^h` at
//! height `h`. A signature is discarded only when the over-approximation
//! already proves the forgotten vertex is not `(1+2ε)`-stable.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::powers::{Exponent, Powers};
use super::{check_epsilon, is_rho_stable, ExtendedInstance, Rational};
use crate::error::{Error, Result};
use crate::exact::{bit, check_bags, insert_bit, pos, reconstruct, remove_bit, Back, Records};
use crate::graph::{cut_weight, Cut, Weight};
use crate::treedec::{ensure_valid_nice, NiceDecomposition, NiceNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundedOptions {
    /// Drop a signature when another with the same bag partition has
    /// pointwise smaller exponents and no larger value.
    pub dominance: bool,
    /// Discard as soon as a rounded counter alone rules out `(1+2ε)`-stability
    /// of its vertex, instead of waiting for the vertex's Forget node.
    pub early_prune: bool,
}

impl Default for RoundedOptions {
    fn default() -> Self {
        RoundedOptions {
            dominance: true,
            early_prune: true,
        }
    }
}

impl RoundedOptions {
    /// Keeps every signature the rounding rules allow; used to inspect tables.
    pub fn exhaustive() -> Self {
        RoundedOptions {
            dominance: false,
            early_prune: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedSolution {
    pub cut: Cut,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedTrace {
    pub delta: Rational,
    pub height: usize,
    /// Per node: surviving `(bag sides, exponents)` pairs in key order.
    pub tables: Vec<Vec<(u64, Vec<Exponent>)>>,
}

type Key = (u64, Vec<Exponent>);

struct Rounded<'a> {
    ext: &'a ExtendedInstance,
    opts: RoundedOptions,
    pw: Powers,
    /// `2(b + 2a)` for `ε = a/b`.
    alpha: BigUint,
    /// `(b + 4a) · d_s(v)`.
    beta: Vec<BigUint>,
    /// `⌈log_{1+δ} d_s(v)⌉`.
    cap: Vec<Exponent>,
}

impl Rounded<'_> {
    /// Whether a freshly rounded counter may be stored.
    fn admissible(&self, u: usize, x: Exponent) -> bool {
        if x > self.cap[u] {
            return false;
        }
        !(self.opts.early_prune
            && self
                .pw
                .scaled_exceeds(&self.alpha, x, &BigUint::zero(), &self.beta[u]))
    }

    fn forget(
        &self,
        v: usize,
        child_bag: &[usize],
        entries: &[(Key, BigUint)],
    ) -> HashMap<Key, (BigUint, Back)> {
        let g = self.ext.graph();
        let p = pos(child_bag, v);
        let nbrs: Vec<(usize, usize, &BigUint, &BigUint, &BigUint)> = g
            .neighbors(v)
            .iter()
            .filter_map(|&(u, e)| {
                child_bag.binary_search(&u).ok().map(|q| {
                    (
                        q,
                        u,
                        &g.edge(e).weight,
                        self.ext.stability(e, u),
                        self.ext.stability(e, v),
                    )
                })
            })
            .collect();
        let mut cache: HashMap<(Exponent, usize), Exponent> = HashMap::new();
        let mut m: HashMap<Key, (BigUint, Back)> = HashMap::with_capacity(entries.len());
        'entries: for (i, ((s, xs), val)) in entries.iter().enumerate() {
            let sv = bit(*s, p);
            let mut same = BigUint::zero();
            let mut cross = BigUint::zero();
            for &(q, _, w, _, s_v) in &nbrs {
                if bit(*s, q) == sv {
                    same += s_v;
                } else {
                    cross += w;
                }
            }
            if self
                .pw
                .scaled_exceeds(&self.alpha, xs[p], &same, &self.beta[v])
            {
                continue;
            }
            let mut c = xs.clone();
            for (j, &(q, u, _, s_u, _)) in nbrs.iter().enumerate() {
                if bit(*s, q) != sv || s_u.is_zero() {
                    continue;
                }
                let x = *cache.entry((c[q], j)).or_insert_with(|| {
                    let terms: Vec<u32> = c[q].into_iter().collect();
                    self.pw.round_up(&terms, s_u)
                });
                if !self.admissible(u, x) {
                    continue 'entries;
                }
                c[q] = x;
            }
            c.remove(p);
            upsert(
                &mut m,
                (remove_bit(*s, p), c),
                val + cross,
                Back::One(i as u32),
            );
        }
        m
    }

    fn join(
        &self,
        bag: &[usize],
        left: &[(Key, BigUint)],
        right: &[(Key, BigUint)],
    ) -> HashMap<Key, (BigUint, Back)> {
        let mut groups: HashMap<u64, (usize, usize)> = HashMap::new();
        for (j, ((s, _), _)) in right.iter().enumerate() {
            groups.entry(*s).or_insert((j, j)).1 = j + 1;
        }
        let mut cache: HashMap<(u32, u32), Exponent> = HashMap::new();
        let mut m: HashMap<Key, (BigUint, Back)> = HashMap::new();
        for (i, ((s, lx), lv)) in left.iter().enumerate() {
            let Some(&(lo, hi)) = groups.get(s) else {
                continue;
            };
            'pairs: for j in lo..hi {
                let ((_, rx), rv) = &right[j];
                let mut c = Vec::with_capacity(lx.len());
                for (q, (&a, &b)) in lx.iter().zip(rx).enumerate() {
                    let x = match (a, b) {
                        (None, x) | (x, None) => x,
                        (Some(a), Some(b)) => {
                            let x = *cache
                                .entry((a.min(b), a.max(b)))
                                .or_insert_with(|| self.pw.round_up(&[a, b], &BigUint::zero()));
                            if !self.admissible(bag[q], x) {
                                continue 'pairs;
                            }
                            x
                        }
                    };
                    c.push(x);
                }
                upsert(&mut m, (*s, c), lv + rv, Back::Two(i as u32, j as u32));
            }
        }
        m
    }

    fn finish(&self, m: HashMap<Key, (BigUint, Back)>) -> Vec<(Key, BigUint, Back)> {
        let mut all: Vec<(Key, BigUint, Back)> =
            m.into_iter().map(|(k, (v, b))| (k, v, b)).collect();
        all.sort_by(|a, b| a.0.cmp(&b.0));
        if !self.opts.dominance {
            return all;
        }
        let mut keep = vec![false; all.len()];
        let mut start = 0;
        while start < all.len() {
            let s = all[start].0 .0;
            let mut end = start;
            while end < all.len() && all[end].0 .0 == s {
                end += 1;
            }
            let mut order: Vec<usize> = (start..end).collect();
            order.sort_by(|&a, &b| all[a].1.cmp(&all[b].1).then(all[a].0 .1.cmp(&all[b].0 .1)));
            let mut front: Vec<usize> = Vec::new();
            for i in order {
                let dominated = front.iter().any(|&f| {
                    all[f].1 <= all[i].1
                        && all[f].0 .1.iter().zip(&all[i].0 .1).all(|(a, b)| a <= b)
                });
                if !dominated {
                    front.push(i);
                    keep[i] = true;
                }
            }
            start = end;
        }
        all.into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(e, _)| e)
            .collect()
    }
}

fn upsert(m: &mut HashMap<Key, (BigUint, Back)>, key: Key, value: BigUint, back: Back) {
    match m.entry(key) {
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert((value, back));
        }
        std::collections::hash_map::Entry::Occupied(mut e) => {
            if value < e.get().0 {
                e.insert((value, back));
            }
        }
    }
}

/// Returns a `(1+2ε)`-stable cut whose weight is at most that of every
/// `(1+ε)`-stable cut. Fails only if no `(1+ε)`-stable cut exists.
pub fn solve_rounded(
    ext: &ExtendedInstance,
    nd: &NiceDecomposition,
    eps: &Rational,
) -> Result<RoundedSolution> {
    run(ext, nd, eps, RoundedOptions::default(), false).map(|(s, _)| s)
}

/// [`solve_rounded`] with explicit options, also returning every node table.
pub fn solve_rounded_traced(
    ext: &ExtendedInstance,
    nd: &NiceDecomposition,
    eps: &Rational,
    opts: RoundedOptions,
) -> Result<(RoundedSolution, RoundedTrace)> {
    run(ext, nd, eps, opts, true).map(|(s, t)| (s, t.expect("trace requested")))
}

fn run(
    ext: &ExtendedInstance,
    nd: &NiceDecomposition,
    eps: &Rational,
    opts: RoundedOptions,
    trace: bool,
) -> Result<(RoundedSolution, Option<RoundedTrace>)> {
    check_epsilon(eps)?;
    let g = ext.graph();
    ensure_valid_nice(g, nd)?;
    check_bags(nd)?;
    let height = nd.height();
    let (a, b) = (eps.numer(), eps.denom());
    let q = b * BigUint::from(5 * height.max(1));
    let pw = Powers::new(a, &q);
    let delta = Rational::new(a.clone(), q);
    let n = g.vertex_count();
    let dp = Rounded {
        ext,
        opts,
        alpha: (b + (a << 1u32)) << 1u32,
        beta: (0..n)
            .map(|v| (b + (a << 2u32)) * ext.stability_degree(v))
            .collect(),
        cap: (0..n)
            .map(|v| pw.round_up(&[], ext.stability_degree(v)))
            .collect(),
        pw,
    };

    let mut tables: Vec<Option<Vec<(Key, BigUint)>>> = Vec::with_capacity(nd.len());
    let mut records: Records = Vec::with_capacity(nd.len());
    let mut traced = Vec::new();
    for t in 0..nd.len() {
        let m = match nd.node(t) {
            NiceNode::Leaf => {
                let mut m = HashMap::new();
                m.insert((0u64, Vec::new()), (BigUint::zero(), Back::None));
                m
            }
            NiceNode::Introduce { vertex, child } => {
                let c = tables[child].take().expect("child consumed once");
                let p = pos(nd.bag(t), vertex);
                let mut m = HashMap::with_capacity(c.len() * 2);
                for (i, ((s, xs), val)) in c.into_iter().enumerate() {
                    for side in [false, true] {
                        let mut x = xs.clone();
                        x.insert(p, None);
                        m.insert(
                            (insert_bit(s, p, side), x),
                            (val.clone(), Back::One(i as u32)),
                        );
                    }
                }
                m
            }
            NiceNode::Forget { vertex, child } => {
                let c = tables[child].take().expect("child consumed once");
                dp.forget(vertex, nd.bag(child), &c)
            }
            NiceNode::Join { left, right } => {
                let l = tables[left].take().expect("child consumed once");
                let r = tables[right].take().expect("child consumed once");
                dp.join(nd.bag(t), &l, &r)
            }
        };
        let entries = dp.finish(m);
        if trace {
            traced.push(entries.iter().map(|(k, _, _)| k.clone()).collect());
        }
        records.push(entries.iter().map(|(k, _, b)| (k.0, *b)).collect());
        tables.push(Some(entries.into_iter().map(|(k, v, _)| (k, v)).collect()));
    }
    let root = tables[nd.root()].take().expect("root table");
    let Some((_, best)) = root.first() else {
        return Err(Error::Infeasible(format!(
            "no cut is (1+ε)-stable for ε = {}/{}",
            eps.numer(),
            eps.denom()
        )));
    };
    let cut = reconstruct(n, nd, &records, 0);
    let weight = cut_weight(g, &cut)?;
    let rho = Rational::one() + eps * Rational::from_integer(BigUint::from(2u32));
    if weight != *best || !is_rho_stable(ext, &cut, &rho)? {
        return Err(Error::Internal(
            "rounded witness fails its own certificate".into(),
        ));
    }
    let trace = trace.then_some(RoundedTrace {
        delta,
        height,
        tables: traced,
    });
    Ok((RoundedSolution { cut, weight }, trace))
}
