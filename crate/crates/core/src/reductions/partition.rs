use num_bigint::BigUint;

use super::{check_limit, meta, place_leaves, Assembly, ReductionArtifact, Role, Source};
use crate::error::{Error, Result};
use crate::graph::Cut;
use crate::treedec::TreeDecomposition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInstance {
    values: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|&x| x == 0) {
            return Err(Error::InvalidSource(format!("value {i} is zero")));
        }
        Ok(PartitionInstance { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u128 {
        self.values.iter().map(|&x| x as u128).sum()
    }

    /// `B`, when the total is even.
    pub fn half(&self) -> Option<u128> {
        let t = self.total();
        t.is_multiple_of(2).then_some(t / 2)
    }

    fn checked_half(&self) -> Result<u128> {
        if self.values.is_empty() {
            return Err(Error::InvalidSource("empty partition instance".into()));
        }
        self.half()
            .ok_or_else(|| Error::InvalidSource(format!("odd total {}", self.total())))
    }

    pub(crate) fn verify(&self, subset: &[bool]) -> Result<()> {
        if subset.len() != self.values.len() {
            return Err(Error::InvalidWitness(format!(
                "{} memberships for {} values",
                subset.len(),
                self.values.len()
            )));
        }
        let sum: u128 = self
            .values
            .iter()
            .zip(subset)
            .filter(|(_, &s)| s)
            .map(|(&x, _)| x as u128)
            .sum();
        match self.half() {
            Some(b) if sum == b => Ok(()),
            _ => Err(Error::InvalidWitness(format!(
                "subset sums to {sum}, total is {}",
                self.total()
            ))),
        }
    }

    pub(crate) fn solve(&self, limit: usize) -> Result<Option<Vec<bool>>> {
        let n = self.values.len();
        check_limit(n, limit)?;
        let Some(b) = self.half() else {
            return Ok(None);
        };
        for mask in 0u64..1 << n {
            let sum: u128 = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| self.values[i] as u128)
                .sum();
            if sum == b {
                return Ok(Some((0..n).map(|i| mask >> i & 1 == 1).collect()));
            }
        }
        Ok(None)
    }
}

/// Subdivided star: center, then a middle vertex and a leaf per value, both
/// path edges weighted `x_i`. Threshold `3B`.
pub fn partition_to_tree(p: &PartitionInstance) -> Result<ReductionArtifact> {
    let b = p.checked_half()?;
    let mut a = Assembly::default();
    let center = a.vertex(Role::Center);
    let mut bags = Vec::new();
    for (i, &x) in p.values.iter().enumerate() {
        let mid = a.vertex(Role::Item(i));
        a.edge(center, mid, x);
        let leaf = a.leaves(mid, 1, &BigUint::from(x))[0];
        bags.push(vec![center, mid, leaf]);
    }
    a.finish(
        BigUint::from(3 * b),
        TreeDecomposition::path(bags),
        Source::PartitionTree(p.clone()),
        meta(&[("half_sum", b)]),
    )
}

/// `K_{2,n}`: two hubs, then one vertex per value joined to both hubs with
/// weight `x_i`. Threshold `2B`.
pub fn partition_to_k2n(p: &PartitionInstance) -> Result<ReductionArtifact> {
    let b = p.checked_half()?;
    let mut a = Assembly::default();
    let hubs = [a.vertex(Role::Hub(0)), a.vertex(Role::Hub(1))];
    let mut bags = Vec::new();
    for (i, &x) in p.values.iter().enumerate() {
        let v = a.vertex(Role::Item(i));
        a.edge(hubs[0], v, x);
        a.edge(hubs[1], v, x);
        bags.push(vec![hubs[0], hubs[1], v]);
    }
    a.finish(
        BigUint::from(2 * b),
        TreeDecomposition::path(bags),
        Source::PartitionK2n(p.clone()),
        meta(&[("half_sum", b)]),
    )
}

fn items(art: &ReductionArtifact) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = art
        .roles
        .iter()
        .enumerate()
        .filter_map(|(v, r)| match r {
            Role::Item(i) => Some((*i, v)),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out
}

/// Chosen middles on side 1, center and the rest on side 0.
pub(super) fn lift_tree(art: &ReductionArtifact, subset: &[bool]) -> Cut {
    let mut sides = vec![false; art.roles.len()];
    for (i, v) in items(art) {
        sides[v] = subset[i];
    }
    place_leaves(&art.roles, &mut sides);
    Cut::new(sides)
}

/// Chosen items with the first hub, the rest with the second.
pub(super) fn lift_k2n(art: &ReductionArtifact, subset: &[bool]) -> Cut {
    let mut sides = vec![false; art.roles.len()];
    sides[1] = true;
    for (i, v) in items(art) {
        sides[v] = !subset[i];
    }
    Cut::new(sides)
}

pub(super) fn extract_tree(art: &ReductionArtifact, c: &Cut) -> Vec<bool> {
    items(art)
        .into_iter()
        .map(|(_, v)| c.side(v) != c.side(0))
        .collect()
}

pub(super) fn extract_k2n(art: &ReductionArtifact, c: &Cut) -> Vec<bool> {
    items(art)
        .into_iter()
        .map(|(_, v)| c.side(v) == c.side(0))
        .collect()
}
