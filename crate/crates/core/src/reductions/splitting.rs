use num_bigint::BigUint;

use super::{check_limit, meta, place_leaves, Assembly, ReductionArtifact, Role, Source};
use crate::error::{Error, Result};
use crate::graph::Cut;
use crate::treedec::PathBuilder;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSplittingInstance {
    elements: usize,
    sets: Vec<Vec<usize>>,
}

impl SetSplittingInstance {
    /// Sets must have two or three distinct elements below `elements`.
    pub fn new(elements: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        for (j, s) in sets.iter().enumerate() {
            if !(2..=3).contains(&s.len()) {
                return Err(Error::InvalidSource(format!(
                    "set {j} has {} elements, expected 2 or 3",
                    s.len()
                )));
            }
            if let Some(&x) = s.iter().find(|&&x| x >= elements) {
                return Err(Error::InvalidSource(format!("set {j} names element {x}")));
            }
            for a in 0..s.len() {
                if s[a + 1..].contains(&s[a]) {
                    return Err(Error::InvalidSource(format!(
                        "set {j} repeats element {}",
                        s[a]
                    )));
                }
            }
        }
        Ok(SetSplittingInstance { elements, sets })
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn is_split_by(&self, sides: &[bool]) -> bool {
        self.sets
            .iter()
            .all(|s| s.iter().any(|&x| sides[x]) && s.iter().any(|&x| !sides[x]))
    }

    pub(crate) fn verify(&self, sides: &[bool]) -> Result<()> {
        if sides.len() != self.elements {
            return Err(Error::InvalidWitness(format!(
                "{} sides for {} elements",
                sides.len(),
                self.elements
            )));
        }
        match self
            .sets
            .iter()
            .position(|s| s.iter().all(|&x| sides[x] == sides[s[0]]))
        {
            Some(j) => Err(Error::InvalidWitness(format!("set {j} is not split"))),
            None => Ok(()),
        }
    }

    pub(crate) fn solve(&self, limit: usize) -> Result<Option<Vec<bool>>> {
        let n = self.elements;
        check_limit(n, limit)?;
        for mask in 0u64..1 << n {
            let sides: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if self.is_split_by(&sides) {
                return Ok(Some(sides));
            }
        }
        Ok(None)
    }
}

/// Column layout: element copies, their leaves, checkers, propagators.
struct Layout {
    padded: usize,
    groups: usize,
    columns: usize,
}

impl Layout {
    fn element(&self, i: usize, j: usize) -> usize {
        j * self.padded + i
    }

    fn leaf(&self, i: usize, j: usize) -> usize {
        self.columns * self.padded + j * self.padded + i
    }

    fn checker(&self, j: usize) -> usize {
        2 * self.columns * self.padded + j
    }

    fn propagator(&self, g: usize, j: usize) -> usize {
        2 * self.columns * self.padded + self.columns + j * self.groups + g
    }
}

/// Builds the column construction with group size `delta`.
///
/// The element count is padded up to a multiple of `delta`; padding elements
/// get leaves and propagator edges but belong to no set. Element `i` has leaf
/// weight `3·2^(i mod δ)` and propagator weight `2^(i mod δ)`. Threshold
/// `leaf weight + propagator weight / 2 + e₂ + 2e₃`.
pub fn setsplitting_to_stablecut(
    h: &SetSplittingInstance,
    delta: usize,
) -> Result<ReductionArtifact> {
    if delta == 0 || delta > 64 {
        return Err(Error::InvalidSource(format!(
            "delta = {delta} outside [1, 64]"
        )));
    }
    let m = h.sets.len();
    let groups = h.elements.div_ceil(delta);
    let lay = Layout {
        padded: groups * delta,
        groups,
        columns: m,
    };
    let pow = |i: usize| BigUint::from(1u32) << (i % delta);
    let mut a = Assembly::default();
    for j in 0..m {
        for i in 0..lay.padded {
            a.vertex(Role::Element {
                element: i,
                column: j,
            });
        }
    }
    let mut leaf_weight = BigUint::from(0u32);
    for j in 0..m {
        for i in 0..lay.padded {
            let w = pow(i) * 3u32;
            leaf_weight += &w;
            a.leaves(lay.element(i, j), 1, &w);
        }
    }
    for (j, set) in h.sets.iter().enumerate() {
        let c = a.vertex(Role::Checker(j));
        for &x in set {
            a.edge(c, lay.element(x, j), 1u32);
        }
    }
    let mut prop_weight = BigUint::from(0u32);
    for j in 0..m.saturating_sub(1) {
        for g in 0..groups {
            let p = a.vertex(Role::Propagator {
                group: g,
                column: j,
            });
            for i in g * delta..(g + 1) * delta {
                a.edge(p, lay.element(i, j), pow(i));
                a.edge(p, lay.element(i, j + 1), pow(i));
                prop_weight += pow(i) << 1u32;
            }
        }
    }
    let e2 = h.sets.iter().filter(|s| s.len() == 2).count();
    let e3 = m - e2;
    let threshold = &leaf_weight + (&prop_weight >> 1u32) + BigUint::from(e2 + 2 * e3);

    let mut pb = PathBuilder::new();
    for j in 0..m {
        pb.add(lay.checker(j));
        for g in 0..groups {
            if j > 0 {
                pb.add(lay.propagator(g, j - 1));
            }
            if j + 1 < m {
                pb.add(lay.propagator(g, j));
            }
        }
        for i in 0..lay.padded {
            pb.add(lay.element(i, j));
            pb.touch(lay.leaf(i, j));
            pb.remove(lay.element(i, j));
        }
        pb.remove(lay.checker(j));
        if j > 0 {
            for g in 0..groups {
                pb.remove(lay.propagator(g, j - 1));
            }
        }
    }
    let mut md = meta(&[
        ("delta", delta as u128),
        ("groups", groups as u128),
        ("padded_elements", lay.padded as u128),
        ("sets_of_two", e2 as u128),
        ("sets_of_three", e3 as u128),
        ("max_degree_bound", (2 * delta).max(4) as u128),
    ]);
    md.insert("leaf_weight".into(), leaf_weight);
    md.insert("propagator_weight".into(), prop_weight);
    a.finish(
        threshold,
        pb.finish(),
        Source::SetSplitting {
            instance: h.clone(),
            delta,
        },
        md,
    )
}

fn column_of(art: &ReductionArtifact, column: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = art
        .roles
        .iter()
        .enumerate()
        .filter_map(|(v, r)| match *r {
            Role::Element { element, column: c } if c == column => Some((element, v)),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out
}

/// Column `j` copies the splitting, flipped on odd columns; padding elements
/// sit with side 0 of the splitting. Each checker goes opposite the majority
/// of its neighbors and propagators to side 0.
pub(super) fn lift(art: &ReductionArtifact, h: &SetSplittingInstance, split: &[bool]) -> Cut {
    let mut sides = vec![false; art.roles.len()];
    for (v, r) in art.roles.iter().enumerate() {
        if let Role::Element { element, column } = *r {
            let base = element < h.elements && split[element];
            sides[v] = base ^ (column % 2 == 1);
        }
    }
    for (v, r) in art.roles.iter().enumerate() {
        if let Role::Checker(_) = r {
            let nb = art.graph.neighbors(v);
            let ones = nb.iter().filter(|&&(u, _)| sides[u]).count();
            sides[v] = 2 * ones < nb.len();
        }
    }
    place_leaves(&art.roles, &mut sides);
    Cut::new(sides)
}

pub(super) fn extract(art: &ReductionArtifact, h: &SetSplittingInstance, c: &Cut) -> Vec<bool> {
    let mut out = vec![false; h.elements];
    for (i, v) in column_of(art, 0) {
        if i < h.elements {
            out[i] = c.side(v);
        }
    }
    out
}
