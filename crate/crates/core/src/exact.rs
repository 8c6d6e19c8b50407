//! Exact dynamic programs over nice tree decompositions.
//!
//! All solvers share one edge-accounting convention: an edge contributes to
//! the cut value and to same-side counters exactly once, at the Forget node of
//! whichever endpoint is forgotten first. Join nodes therefore only add.

use std::collections::hash_map::Entry;

use rustc_hash::FxHashMap as HashMap;
use smallvec::SmallVec;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{evaluate_cut, Cut, Weight, WeightedGraph};
use crate::num::{fits_u128, fits_u64, Accum};
use crate::treedec::{
    augment_neighborhoods, ensure_valid_nice, make_nice, NiceDecomposition, NiceNode,
    TreeDecomposition,
};

/// Bag sides are packed into a `u64`.
pub const MAX_BAG: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalCut {
    pub cut: Cut,
    pub weight: Weight,
    pub stable: bool,
}

/// Pruning switches for [`solve_pseudo_with`]. None of them changes the
/// returned weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoOptions {
    /// Drop a signature when another with the same bag partition has
    /// pointwise smaller counters and no larger value.
    pub dominance: bool,
    /// Collapse a counter to a "safe" marker once the vertex can no longer
    /// become unstable whatever happens to its remaining edges.
    pub saturation: bool,
    /// Discard a signature as soon as some counter exceeds half the degree.
    pub early_prune: bool,
}

impl Default for PseudoOptions {
    fn default() -> Self {
        PseudoOptions {
            dominance: true,
            saturation: true,
            early_prune: true,
        }
    }
}

impl PseudoOptions {
    /// Only the discard rule at Forget nodes.
    pub fn plain() -> Self {
        PseudoOptions {
            dominance: false,
            saturation: false,
            early_prune: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Surviving signatures per node, in node order.
    pub table_sizes: Vec<usize>,
}

impl DpStats {
    pub fn max_table(&self) -> usize {
        self.table_sizes.iter().copied().max().unwrap_or(0)
    }
}

/// `2^|bag| · Π_{v∈bag} (d_w(v) + 1)`, the number of distinct signatures a
/// bag admits.
pub fn table_size_bound(g: &WeightedGraph, bag: &[usize]) -> BigUint {
    let mut b = <BigUint as One>::one() << bag.len();
    for &v in bag {
        b *= g.wdeg(v) + 1u32;
    }
    b
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Back {
    None,
    One(u32),
    Two(u32, u32),
}

/// Per node, the bag sides and back-reference of every stored entry.
pub(crate) type Records = Vec<Vec<(u64, Back)>>;

pub(crate) fn bit(s: u64, p: usize) -> bool {
    (s >> p) & 1 == 1
}

pub(crate) fn insert_bit(s: u64, p: usize, b: bool) -> u64 {
    let low = s & ((1u64 << p) - 1);
    let high = if p >= 63 { 0 } else { (s >> p) << (p + 1) };
    high | ((b as u64) << p) | low
}

pub(crate) fn remove_bit(s: u64, p: usize) -> u64 {
    let low = s & ((1u64 << p) - 1);
    let high = if p >= 63 { 0 } else { (s >> (p + 1)) << p };
    high | low
}

pub(crate) fn pos(bag: &[usize], v: usize) -> usize {
    bag.binary_search(&v).expect("vertex present in bag")
}

pub(crate) fn check_bags(nd: &NiceDecomposition) -> Result<()> {
    let size = nd.width() + 1;
    if size > MAX_BAG {
        return Err(Error::BagTooLarge { size, max: MAX_BAG });
    }
    Ok(())
}

/// Walks back-references from the root entry and reads off every bag vertex.
pub(crate) fn reconstruct(n: usize, nd: &NiceDecomposition, records: &Records, root: u32) -> Cut {
    let mut cut = Cut::all_zero(n);
    let mut stack = vec![(nd.root(), root)];
    while let Some((t, i)) = stack.pop() {
        let (s, back) = records[t][i as usize];
        for (p, &u) in nd.bag(t).iter().enumerate() {
            cut.set(u, bit(s, p));
        }
        let mut children = nd.node(t).children();
        match back {
            Back::None => {}
            Back::One(c) => stack.push((children.next().unwrap(), c)),
            Back::Two(l, r) => {
                stack.push((children.next().unwrap(), l));
                stack.push((children.next().unwrap(), r));
            }
        }
    }
    cut
}

pub(crate) fn certify(g: &WeightedGraph, cut: Cut, weight: Weight) -> Result<OptimalCut> {
    let report = evaluate_cut(g, &cut)?;
    if !report.stable || report.cut_weight != weight {
        return Err(Error::Internal(format!(
            "reconstructed witness disagrees with the table (stable={}, weight {} vs {})",
            report.stable, report.cut_weight, weight
        )));
    }
    Ok(OptimalCut {
        cut,
        weight,
        stable: true,
    })
}

/// Same-side counters are stored shifted by one: `0` marks a saturated
/// ("safe") counter and `x + 1` an exact count `x`. Safe sorts first, and
/// pointwise `<=` on the encoding is exactly counter dominance.
type Key<A> = (u64, SmallVec<[A; 12]>);
/// Unpruned node table and the forgotten-vertex counters it was built with.
type RawTable<A> = (HashMap<Key<A>, (A, Back)>, Vec<A>);

struct Table<A> {
    entries: Vec<(Key<A>, A)>,
    /// Weight from each bag vertex to vertices forgotten below this node.
    forgotten: Vec<A>,
}

struct Pseudo<'a, A> {
    g: &'a WeightedGraph,
    nd: &'a NiceDecomposition,
    opts: PseudoOptions,
    deg: Vec<A>,
    w: Vec<A>,
    /// One vertex per connected component whose side is fixed to 0.
    pinned: Vec<bool>,
}

impl<A: Accum> Pseudo<'_, A> {
    /// Applies the early-prune and saturation rules to position `p`.
    /// Returns false when the signature must be discarded.
    fn settle(&self, u: usize, c: &mut A, forgotten: &A) -> bool {
        if !c.is_zero() {
            let twice = c.sub(&A::one()).double();
            if self.opts.early_prune && twice > self.deg[u] {
                return false;
            }
            if self.opts.saturation && twice.add(&self.deg[u]) <= forgotten.double() {
                *c = A::zero();
            }
        }
        true
    }

    fn leaf(&self) -> RawTable<A> {
        let mut m = HashMap::default();
        m.insert((0u64, SmallVec::new()), (A::zero(), Back::None));
        (m, Vec::new())
    }

    fn introduce(&self, v: usize, bag: &[usize], child: &Table<A>) -> RawTable<A> {
        let p = pos(bag, v);
        let mut forgotten = child.forgotten.clone();
        forgotten.insert(p, A::zero());
        let mut m = HashMap::with_capacity_and_hasher(child.entries.len() * 2, Default::default());
        let sides: &[bool] = if self.pinned[v] {
            &[false]
        } else {
            &[false, true]
        };
        let mut fresh = A::one();
        self.settle(v, &mut fresh, &forgotten[p]);
        for (i, ((s, ctr), val)) in child.entries.iter().enumerate() {
            for &side in sides {
                let mut c = ctr.clone();
                c.insert(p, fresh.clone());
                m.insert(
                    (insert_bit(*s, p, side), c),
                    (val.clone(), Back::One(i as u32)),
                );
            }
        }
        (m, forgotten)
    }

    fn forget(&self, v: usize, child_bag: &[usize], child: &Table<A>) -> RawTable<A> {
        let p = pos(child_bag, v);
        let nbrs: Vec<(usize, usize, &A)> = self
            .g
            .neighbors(v)
            .iter()
            .filter_map(|&(u, e)| child_bag.binary_search(&u).ok().map(|q| (q, u, &self.w[e])))
            .collect();
        let mut forgotten = child.forgotten.clone();
        for &(q, _, w) in &nbrs {
            forgotten[q].add_assign(w);
        }
        let mut m: HashMap<Key<A>, (A, Back)> =
            HashMap::with_capacity_and_hasher(child.entries.len(), Default::default());
        'entries: for (i, ((s, ctr), val)) in child.entries.iter().enumerate() {
            let sv = bit(*s, p);
            let mut same = A::zero();
            let mut cross = A::zero();
            for &(q, _, w) in &nbrs {
                if bit(*s, q) == sv {
                    same.add_assign(w);
                } else {
                    cross.add_assign(w);
                }
            }
            if !ctr[p].is_zero() && ctr[p].add(&same).sub(&A::one()).double() > self.deg[v] {
                continue;
            }
            let mut c = ctr.clone();
            for &(q, u, w) in &nbrs {
                if bit(*s, q) == sv && !c[q].is_zero() {
                    c[q].add_assign(w);
                }
                if !self.settle(u, &mut c[q], &forgotten[q]) {
                    continue 'entries;
                }
            }
            c.remove(p);
            let key = (remove_bit(*s, p), c);
            let value = val.add(&cross);
            upsert(&mut m, key, value, Back::One(i as u32));
        }
        forgotten.remove(p);
        (m, forgotten)
    }

    fn join(&self, bag: &[usize], left: &Table<A>, right: &Table<A>) -> RawTable<A> {
        let forgotten: Vec<A> = left
            .forgotten
            .iter()
            .zip(&right.forgotten)
            .map(|(a, b)| a.add(b))
            .collect();
        let mut groups: HashMap<u64, (usize, usize)> = HashMap::default();
        for (j, ((s, _), _)) in right.entries.iter().enumerate() {
            groups.entry(*s).or_insert((j, j)).1 = j + 1;
        }
        let mut m: HashMap<Key<A>, (A, Back)> = HashMap::default();
        for (i, ((s, lc), lv)) in left.entries.iter().enumerate() {
            let Some(&(lo, hi)) = groups.get(s) else {
                continue;
            };
            'pairs: for j in lo..hi {
                let ((_, rc), rv) = &right.entries[j];
                let mut c = SmallVec::with_capacity(lc.len());
                for (q, (a, b)) in lc.iter().zip(rc).enumerate() {
                    let mut x = if a.is_zero() || b.is_zero() {
                        A::zero()
                    } else {
                        a.add(b).sub(&A::one())
                    };
                    if !self.settle(bag[q], &mut x, &forgotten[q]) {
                        continue 'pairs;
                    }
                    c.push(x);
                }
                upsert(&mut m, (*s, c), lv.add(rv), Back::Two(i as u32, j as u32));
            }
        }
        (m, forgotten)
    }

    /// Groups a node table by bag sides and, when `prune` is set, applies
    /// dominance pruning. Only Forget nodes prune: an Introduce node gives a
    /// pruned child table the same new counter everywhere, and at Join nodes
    /// the check costs more than the few entries it removes.
    fn finish(&self, m: HashMap<Key<A>, (A, Back)>, prune: bool) -> Vec<(Key<A>, A, Back)> {
        let mut all: Vec<(Key<A>, A, Back)> = m.into_iter().map(|(k, (v, b))| (k, v, b)).collect();
        if !self.opts.dominance || !prune {
            all.sort_unstable_by_key(|e| e.0 .0);
            return all;
        }
        // Within a sides group, visit entries by value and then counter sum.
        // A dominating entry always comes first, so a candidate only needs
        // pointwise comparisons against the kept front.
        let sums: Vec<A> = all
            .iter()
            .map(|e| e.0 .1.iter().fold(A::zero(), |acc, x| acc.add(x)))
            .collect();
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            (all[a].0 .0, &all[a].1, &sums[a]).cmp(&(all[b].0 .0, &all[b].1, &sums[b]))
        });
        let mut kept: Vec<usize> = Vec::new();
        let mut group = 0;
        for (k, &i) in order.iter().enumerate() {
            if k > 0 && all[i].0 .0 != all[order[k - 1]].0 .0 {
                group = kept.len();
            }
            let ci = &all[i].0 .1;
            let dominated = kept[group..]
                .iter()
                .any(|&f| sums[f] <= sums[i] && all[f].0 .1.iter().zip(ci).all(|(a, b)| a <= b));
            if !dominated {
                kept.push(i);
            }
        }
        let mut slots: Vec<Option<(Key<A>, A, Back)>> = all.into_iter().map(Some).collect();
        kept.into_iter()
            .map(|i| slots[i].take().expect("kept once"))
            .collect()
    }

    fn run(&self, stats: &mut DpStats) -> Result<OptimalCut> {
        let nd = self.nd;
        let mut tables: Vec<Option<Table<A>>> = Vec::with_capacity(nd.len());
        let mut records: Records = Vec::with_capacity(nd.len());
        for t in 0..nd.len() {
            let (m, forgotten) = match nd.node(t) {
                NiceNode::Leaf => self.leaf(),
                NiceNode::Introduce { vertex, child } => {
                    let c = tables[child].take().expect("child consumed once");
                    self.introduce(vertex, nd.bag(t), &c)
                }
                NiceNode::Forget { vertex, child } => {
                    let c = tables[child].take().expect("child consumed once");
                    self.forget(vertex, nd.bag(child), &c)
                }
                NiceNode::Join { left, right } => {
                    let l = tables[left].take().expect("child consumed once");
                    let r = tables[right].take().expect("child consumed once");
                    self.join(nd.bag(t), &l, &r)
                }
            };
            let entries = self.finish(m, matches!(nd.node(t), NiceNode::Forget { .. }));
            stats.table_sizes.push(entries.len());
            records.push(entries.iter().map(|(k, _, b)| (k.0, *b)).collect());
            tables.push(Some(Table {
                entries: entries.into_iter().map(|(k, v, _)| (k, v)).collect(),
                forgotten,
            }));
        }
        let root = tables[nd.root()].take().expect("root table");
        // The max cut is stable, so the root table is never empty.
        let Some((_, best)) = root.entries.first() else {
            return Err(Error::Internal("no stable signature survived".into()));
        };
        let cut = reconstruct(self.g.vertex_count(), nd, &records, 0);
        certify(self.g, cut, best.to_big())
    }
}

fn upsert<K: std::hash::Hash + Eq, A: Ord>(
    m: &mut HashMap<K, (A, Back)>,
    key: K,
    value: A,
    back: Back,
) {
    match m.entry(key) {
        Entry::Vacant(e) => {
            e.insert((value, back));
        }
        Entry::Occupied(mut e) => {
            if value < e.get().0 {
                e.insert((value, back));
            }
        }
    }
}

/// Flipping a whole component preserves weight and stability, so the first
/// vertex of each component introduced in node order can be fixed.
fn first_introduced(g: &WeightedGraph, nd: &NiceDecomposition) -> Vec<bool> {
    let mut comp = vec![0; g.vertex_count()];
    let comps = g.components();
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    let mut done = vec![false; comps.len()];
    let mut pinned = vec![false; g.vertex_count()];
    for t in 0..nd.len() {
        if let NiceNode::Introduce { vertex, .. } = nd.node(t) {
            if !done[comp[vertex]] {
                done[comp[vertex]] = true;
                pinned[vertex] = true;
            }
        }
    }
    pinned
}

fn pseudo_run<A: Accum>(
    g: &WeightedGraph,
    nd: &NiceDecomposition,
    opts: PseudoOptions,
    stats: &mut DpStats,
) -> Result<OptimalCut> {
    let p = Pseudo::<A> {
        g,
        nd,
        opts,
        deg: (0..g.vertex_count())
            .map(|v| A::from_big(g.wdeg(v)))
            .collect(),
        w: g.edges().iter().map(|e| A::from_big(&e.weight)).collect(),
        pinned: first_introduced(g, nd),
    };
    p.run(stats)
}

/// Minimum stable cut via signatures carrying same-side weight counters.
pub fn solve_pseudo(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<OptimalCut> {
    solve_pseudo_with(g, nd, PseudoOptions::default()).map(|(c, _)| c)
}

pub fn solve_pseudo_with(
    g: &WeightedGraph,
    nd: &NiceDecomposition,
    opts: PseudoOptions,
) -> Result<(OptimalCut, DpStats)> {
    ensure_valid_nice(g, nd)?;
    check_bags(nd)?;
    let mut stats = DpStats::default();
    let total = g.total_weight();
    let cut = if fits_u64(&total) {
        pseudo_run::<u64>(g, nd, opts, &mut stats)?
    } else if fits_u128(&total) {
        pseudo_run::<u128>(g, nd, opts, &mut stats)?
    } else {
        pseudo_run::<BigUint>(g, nd, opts, &mut stats)?
    };
    Ok((cut, stats))
}

/// [`solve_pseudo`] restricted to unit weights, where counters are bounded by
/// the degree.
pub fn solve_unweighted(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<OptimalCut> {
    if !g.is_unweighted() {
        return Err(Error::NotUnweighted);
    }
    solve_pseudo(g, nd)
}

/// Partition-only DP. Each vertex in `checks[t]` has its closed
/// neighborhood inside bag `t` and is filtered for stability there.
fn partition_dp<A: Accum>(
    g: &WeightedGraph,
    nd: &NiceDecomposition,
    maximize: bool,
    checks: &[Vec<usize>],
) -> Result<(Weight, Cut)> {
    let w: Vec<A> = g.edges().iter().map(|e| A::from_big(&e.weight)).collect();
    let deg: Vec<A> = (0..g.vertex_count())
        .map(|v| A::from_big(g.wdeg(v)))
        .collect();
    let better = |a: &A, b: &A| if maximize { a > b } else { a < b };
    let mut tables: Vec<Option<Vec<(u64, A)>>> = Vec::with_capacity(nd.len());
    let mut records: Records = Vec::with_capacity(nd.len());
    for t in 0..nd.len() {
        let bag = nd.bag(t);
        let mut m: HashMap<u64, (A, Back)> = HashMap::default();
        let mut put = |s: u64, v: A, b: Back| match m.entry(s) {
            Entry::Vacant(e) => {
                e.insert((v, b));
            }
            Entry::Occupied(mut e) => {
                if better(&v, &e.get().0) {
                    e.insert((v, b));
                }
            }
        };
        match nd.node(t) {
            NiceNode::Leaf => put(0, A::zero(), Back::None),
            NiceNode::Introduce { vertex, child } => {
                let p = pos(bag, vertex);
                for (i, (s, v)) in tables[child].take().unwrap().into_iter().enumerate() {
                    put(insert_bit(s, p, false), v.clone(), Back::One(i as u32));
                    put(insert_bit(s, p, true), v, Back::One(i as u32));
                }
            }
            NiceNode::Forget { vertex, child } => {
                let cb = nd.bag(child);
                let p = pos(cb, vertex);
                let nbrs: Vec<(usize, &A)> = g
                    .neighbors(vertex)
                    .iter()
                    .filter_map(|&(u, e)| cb.binary_search(&u).ok().map(|q| (q, &w[e])))
                    .collect();
                for (i, (s, v)) in tables[child].take().unwrap().into_iter().enumerate() {
                    let mut val = v;
                    for &(q, we) in &nbrs {
                        if bit(s, q) != bit(s, p) {
                            val.add_assign(we);
                        }
                    }
                    put(remove_bit(s, p), val, Back::One(i as u32));
                }
            }
            NiceNode::Join { left, right } => {
                let l = tables[left].take().unwrap();
                let r = tables[right].take().unwrap();
                let idx: HashMap<u64, usize> =
                    r.iter().enumerate().map(|(j, (s, _))| (*s, j)).collect();
                for (i, (s, v)) in l.iter().enumerate() {
                    if let Some(&j) = idx.get(s) {
                        put(*s, v.add(&r[j].1), Back::Two(i as u32, j as u32));
                    }
                }
            }
        }
        let mut entries: Vec<(u64, A, Back)> = m.into_iter().map(|(s, (v, b))| (s, v, b)).collect();
        if !checks[t].is_empty() {
            entries.retain(|(s, _, _)| {
                checks[t].iter().all(|&v| {
                    let p = pos(bag, v);
                    let mut cross = A::zero();
                    for &(u, e) in g.neighbors(v) {
                        if bit(*s, pos(bag, u)) != bit(*s, p) {
                            cross.add_assign(&w[e]);
                        }
                    }
                    cross.double() >= deg[v]
                })
            });
        }
        entries.sort_by_key(|e| e.0);
        records.push(entries.iter().map(|(s, _, b)| (*s, *b)).collect());
        tables.push(Some(entries.into_iter().map(|(s, v, _)| (s, v)).collect()));
    }
    let root = tables[nd.root()].take().unwrap();
    let Some((_, best)) = root.first() else {
        return Err(Error::Internal("no stable partition survived".into()));
    };
    let cut = reconstruct(g.vertex_count(), nd, &records, 0);
    Ok((best.to_big(), cut))
}

/// Minimum stable cut via a partition-only DP on the decomposition with every
/// bag closed under neighborhoods.
pub fn solve_degree(g: &WeightedGraph, td: &TreeDecomposition) -> Result<OptimalCut> {
    let aug = augment_neighborhoods(g, td)?;
    let nd = make_nice(&aug)?;
    check_bags(&nd)?;
    let n = g.vertex_count();
    let mut checked = vec![false; n];
    let mut checks = vec![Vec::new(); nd.len()];
    for (t, list) in checks.iter_mut().enumerate() {
        let bag = nd.bag(t);
        for &v in bag {
            if !checked[v]
                && g.neighbors(v)
                    .iter()
                    .all(|&(u, _)| bag.binary_search(&u).is_ok())
            {
                checked[v] = true;
                list.push(v);
            }
        }
    }
    if let Some(v) = checked.iter().position(|c| !c) {
        return Err(Error::Internal(format!(
            "no bag holds the closed neighborhood of vertex {v}"
        )));
    }
    let (weight, cut) = if fits_u128(&g.total_weight()) {
        partition_dp::<u128>(g, &nd, false, &checks)?
    } else {
        partition_dp::<BigUint>(g, &nd, false, &checks)?
    };
    certify(g, cut, weight)
}

/// Maximum cut weight via a partition-only DP.
pub fn solve_max_cut(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<Weight> {
    solve_max_cut_witness(g, nd).map(|(w, _)| w)
}

pub fn solve_max_cut_witness(g: &WeightedGraph, nd: &NiceDecomposition) -> Result<(Weight, Cut)> {
    ensure_valid_nice(g, nd)?;
    check_bags(nd)?;
    let checks = vec![Vec::new(); nd.len()];
    if fits_u128(&g.total_weight()) {
        partition_dp::<u128>(g, nd, true, &checks)
    } else {
        partition_dp::<BigUint>(g, nd, true, &checks)
    }
}

/// Convenience: heuristic-free nice decomposition with one bag holding
/// everything. Only sensible for tiny graphs.
pub fn trivial_decomposition(g: &WeightedGraph) -> NiceDecomposition {
    let td = TreeDecomposition::new(vec![(0..g.vertex_count()).collect()], vec![]);
    make_nice(&td).expect("single bag is a valid decomposition")
}
