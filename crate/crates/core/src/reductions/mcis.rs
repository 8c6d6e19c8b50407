use num_bigint::BigUint;
use num_traits::One;

use super::{meta, place_leaves, Assembly, ReductionArtifact, Role, Source};
use crate::error::{Error, Result};
use crate::graph::Cut;
use crate::treedec::PathBuilder;

/// A vertex of a colored graph: `(class, index)`, both 0-based.
pub type ColoredVertex = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McisInstance {
    classes: usize,
    size: usize,
    edges: Vec<(ColoredVertex, ColoredVertex)>,
}

impl McisInstance {
    /// `classes` color classes of `size` vertices each; every edge joins two
    /// different classes.
    pub fn new(
        classes: usize,
        size: usize,
        edges: Vec<(ColoredVertex, ColoredVertex)>,
    ) -> Result<Self> {
        if classes == 0 || size == 0 {
            return Err(Error::InvalidSource(format!(
                "need at least one class and one vertex per class, got {classes} x {size}"
            )));
        }
        for (j, &(a, b)) in edges.iter().enumerate() {
            for (c, x) in [a, b] {
                if c >= classes || x >= size {
                    return Err(Error::InvalidSource(format!(
                        "edge {j} names vertex ({c}, {x}) outside {classes} x {size}"
                    )));
                }
            }
            if a.0 == b.0 {
                return Err(Error::InvalidSource(format!(
                    "edge {j} lies inside class {}",
                    a.0
                )));
            }
        }
        Ok(McisInstance {
            classes,
            size,
            edges,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &[(ColoredVertex, ColoredVertex)] {
        &self.edges
    }

    pub fn is_independent(&self, sel: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|&((c1, x1), (c2, x2))| sel[c1] != x1 || sel[c2] != x2)
    }

    pub(crate) fn verify(&self, sel: &[usize]) -> Result<()> {
        if sel.len() != self.classes {
            return Err(Error::InvalidWitness(format!(
                "{} choices for {} classes",
                sel.len(),
                self.classes
            )));
        }
        if let Some(i) = sel.iter().position(|&x| x >= self.size) {
            return Err(Error::InvalidWitness(format!(
                "class {i} choice {} out of range",
                sel[i]
            )));
        }
        if !self.is_independent(sel) {
            return Err(Error::InvalidWitness("selection contains an edge".into()));
        }
        Ok(())
    }

    /// Enumerates all `size^classes` selections.
    pub(crate) fn solve(&self, limit: usize) -> Result<Option<Vec<usize>>> {
        let total = (self.size as u128).checked_pow(self.classes as u32);
        if total.is_none_or(|t| t > 1u128 << limit.min(63)) {
            return Err(Error::EnumerationLimit {
                vertices: self.classes * self.size,
                limit,
            });
        }
        let mut sel = vec![0usize; self.classes];
        loop {
            if self.is_independent(&sel) {
                return Ok(Some(sel));
            }
            let mut i = 0;
            while i < self.classes && sel[i] + 1 == self.size {
                sel[i] = 0;
                i += 1;
            }
            if i == self.classes {
                return Ok(None);
            }
            sel[i] += 1;
        }
    }
}

/// Smallest heavy-edge size that exceeds the non-leaf, non-heavy part of the
/// threshold: `km + k·max(m−1, 0)·(n+1) + m(2n+6) + 1`.
///
/// With no edges the palettes touch only the heavy edge between them, and
/// both are stable on opposite sides only when its size is even, so the
/// default is 2.
pub fn default_heavy_size(classes: usize, size: usize, edges: usize) -> u64 {
    let (k, n, m) = (classes as u64, size as u64, edges as u64);
    if m == 0 {
        return 2;
    }
    k * m + k * (m - 1) * (n + 1) + m * (2 * n + 6) + 1
}

struct Builder {
    a: Assembly,
    heavy: u64,
}

impl Builder {
    /// `heavy` new vertices adjacent to both `u` and `v`.
    fn heavy_edge(&mut self, u: usize, v: usize) -> Vec<usize> {
        (0..self.heavy)
            .map(|_| {
                let x = self.a.vertex(Role::HeavyInternal { ends: (u, v) });
                self.a.edge(x, u, 1u32);
                self.a.edge(x, v, 1u32);
                x
            })
            .collect()
    }
}

struct Selector {
    path: Vec<usize>,
    leaves: Vec<Vec<usize>>,
    heavy: [Vec<usize>; 2],
}

struct Checker {
    hubs: [usize; 4],
    sets: [Vec<usize>; 4],
    set_leaves: [Vec<Vec<usize>>; 4],
    gates: [usize; 3],
}

/// Grid construction: one selector path per class and edge column, joined
/// across columns by propagators, plus one checker per edge. Threshold
/// `L₁ + L₂ + km + k·max(m−1, 0)·(n+1) + m(2n+6)` with `L₁` leaves and `L₂`
/// heavy-edge vertices.
///
/// `heavy` defaults to [`default_heavy_size`]; smaller values may break the
/// equivalence with the source instance.
pub fn mcis_to_unweighted(mc: &McisInstance, heavy: Option<u64>) -> Result<ReductionArtifact> {
    let (k, n, m) = (mc.classes, mc.size, mc.edges.len());
    let heavy = heavy.unwrap_or_else(|| default_heavy_size(k, n, m));
    if heavy == 0 {
        return Err(Error::InvalidSource(
            "heavy-edge size must be positive".into(),
        ));
    }
    if m == 0 && heavy % 2 == 1 {
        return Err(Error::InvalidSource(format!(
            "without edges the heavy-edge size must be even, got {heavy}"
        )));
    }
    let mut b = Builder {
        a: Assembly::default(),
        heavy,
    };
    let one = BigUint::one();
    let p = [b.a.vertex(Role::Palette(0)), b.a.vertex(Role::Palette(1))];
    let palette_heavy = b.heavy_edge(p[0], p[1]);

    let mut sel: Vec<Vec<Selector>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let path: Vec<usize> = (0..=n)
                .map(|position| {
                    b.a.vertex(Role::Selector {
                        class: i,
                        column: j,
                        position,
                    })
                })
                .collect();
            for w in path.windows(2) {
                b.a.edge(w[0], w[1], 1u32);
            }
            // Odd 1-based columns start at side 0: first vertex tied to p1.
            let (first, last) = if j % 2 == 0 {
                (p[1], p[0])
            } else {
                (p[0], p[1])
            };
            let heavy = [b.heavy_edge(path[0], first), b.heavy_edge(path[n], last)];
            let leaves = path
                .iter()
                .enumerate()
                .map(|(l, &v)| {
                    let count = if l == 0 || l == n {
                        heavy_leaves(b.heavy)
                    } else {
                        5
                    };
                    b.a.leaves(v, count, &one)
                })
                .collect();
            row.push(Selector {
                path,
                leaves,
                heavy,
            });
        }
        sel.push(row);
    }

    let mut props = vec![Vec::new(); k];
    for (i, row) in props.iter_mut().enumerate() {
        for j in 0..m.saturating_sub(1) {
            let x = b.a.vertex(Role::Propagator {
                group: i,
                column: j,
            });
            for &v in sel[i][j].path.iter().chain(&sel[i][j + 1].path) {
                b.a.edge(x, v, 1u32);
            }
            row.push(x);
        }
    }

    let mut checkers = Vec::with_capacity(m);
    for (j, &((i1, x1), (i2, x2))) in mc.edges.iter().enumerate() {
        let split = |i: usize, x: usize| {
            let path = &sel[i][j].path;
            [path[..=x].to_vec(), path[x + 1..].to_vec()]
        };
        let [n1, n2] = split(i1, x1);
        let [n3, n4] = split(i2, x2);
        let nbrs = [n1, n2, n3, n4];
        let mut hubs = [0; 4];
        let mut sets: [Vec<usize>; 4] = Default::default();
        let mut set_leaves: [Vec<Vec<usize>>; 4] = Default::default();
        for part in 0..4 {
            let t = b.a.vertex(Role::CheckerHub { column: j, part });
            hubs[part] = t;
            for &v in &nbrs[part] {
                b.a.edge(t, v, 1u32);
            }
            for _ in 0..nbrs[part].len() {
                let y = b.a.vertex(Role::CheckerSet { column: j, part });
                b.a.edge(t, y, 1u32);
                sets[part].push(y);
                set_leaves[part].push(b.a.leaves(y, 2, &one));
            }
        }
        let gates = ['a', 'b', 'c'].map(|gate| b.a.vertex(Role::CheckerGate { column: j, gate }));
        b.a.edge(gates[2], gates[0], 1u32);
        b.a.edge(gates[2], gates[1], 1u32);
        b.a.edge(gates[0], sets[0][0], 1u32);
        b.a.edge(gates[0], sets[2][0], 1u32);
        b.a.edge(gates[1], sets[1][0], 1u32);
        b.a.edge(gates[1], sets[3][0], 1u32);
        checkers.push(Checker {
            hubs,
            sets,
            set_leaves,
            gates,
        });
    }

    let pd = companion(mc, p, &palette_heavy, &sel, &props, &checkers);
    let leaf_count =
        b.a.roles
            .iter()
            .filter(|r| matches!(r, Role::Leaf { .. }))
            .count() as u128;
    let heavy_count =
        b.a.roles
            .iter()
            .filter(|r| matches!(r, Role::HeavyInternal { .. }))
            .count() as u128;
    let (k128, n128, m128) = (k as u128, n as u128, m as u128);
    let threshold = leaf_count
        + heavy_count
        + k128 * m128
        + k128 * m128.saturating_sub(1) * (n128 + 1)
        + m128 * (2 * n128 + 6);
    b.a.finish(
        BigUint::from(threshold),
        pd,
        Source::Mcis {
            instance: mc.clone(),
            heavy,
        },
        meta(&[
            ("heavy_size", heavy as u128),
            ("leaf_count", leaf_count),
            ("heavy_vertices", heavy_count),
        ]),
    )
}

fn heavy_leaves(heavy: u64) -> u64 {
    heavy + 5
}

/// Path decomposition issued in dynamic-programming order.
///
/// Every vertex's leaves are handled right after it appears, which makes its
/// stability certain early, and the palette heavy edge comes last so that the
/// palette counters stay small throughout.
fn companion(
    mc: &McisInstance,
    p: [usize; 2],
    palette_heavy: &[usize],
    sel: &[Vec<Selector>],
    props: &[Vec<usize>],
    checkers: &[Checker],
) -> crate::treedec::TreeDecomposition {
    let (k, m) = (mc.classes, mc.edges.len());
    let mut pb = PathBuilder::new();
    pb.add(p[0]);
    pb.add(p[1]);
    for (j, ch) in checkers.iter().enumerate() {
        let ((i1, _), (i2, _)) = mc.edges[j];
        for i in 0..k {
            if j + 1 < m {
                pb.add(props[i][j]);
            }
            let parts: &[usize] = if i == i1 {
                &[0, 1]
            } else if i == i2 {
                &[2, 3]
            } else {
                &[]
            };
            for &part in parts {
                pb.add(ch.hubs[part]);
            }
            let s = &sel[i][j];
            let last = s.path.len() - 1;
            for (l, &v) in s.path.iter().enumerate() {
                pb.add(v);
                if l > 0 {
                    pb.remove(s.path[l - 1]);
                }
                for &x in &s.leaves[l] {
                    pb.touch(x);
                }
                let heavy = if l == 0 {
                    &s.heavy[0][..]
                } else if l == last {
                    &s.heavy[1][..]
                } else {
                    &[]
                };
                for &x in heavy {
                    pb.touch(x);
                }
            }
            pb.remove(s.path[last]);
            if j > 0 {
                pb.remove(props[i][j - 1]);
            }
            if !parts.is_empty() {
                pb.add(ch.gates[0]);
                pb.add(ch.gates[1]);
            }
            for &part in parts {
                for (y, leaves) in ch.sets[part].iter().zip(&ch.set_leaves[part]) {
                    pb.add(*y);
                    for &x in leaves {
                        pb.touch(x);
                    }
                    pb.remove(*y);
                }
                pb.remove(ch.hubs[part]);
            }
        }
        pb.touch(ch.gates[2]);
        pb.remove(ch.gates[0]);
        pb.remove(ch.gates[1]);
    }
    for &x in palette_heavy {
        pb.touch(x);
    }
    pb.remove(p[0]);
    pb.remove(p[1]);
    super::reversed_path(pb)
}

/// Sides for a selection: palettes 0 and 1, heavy-edge vertices opposite
/// their palette end (alternating between the two palettes on the edge that
/// joins them), selector paths switching after the chosen index,
/// propagators and checker hubs on side 0, and the checker sets and gates
/// chosen by search so that every hub is balanced and the gates cut four
/// edges.
pub(super) fn lift(art: &ReductionArtifact, mc: &McisInstance, chosen: &[usize]) -> Result<Cut> {
    let roles = &art.roles;
    let mut sides = vec![false; roles.len()];
    let palette_side = |v: usize| match roles[v] {
        Role::Palette(x) => Some(x == 1),
        _ => None,
    };
    let mut between = 0usize;
    for (v, r) in roles.iter().enumerate() {
        sides[v] = match *r {
            Role::Palette(x) => x == 1,
            Role::Selector {
                class,
                column,
                position,
            } => (column % 2 == 1) ^ (position > chosen[class]),
            Role::HeavyInternal { ends: (u, w) } => match (palette_side(u), palette_side(w)) {
                (Some(_), Some(_)) => {
                    between += 1;
                    between.is_multiple_of(2)
                }
                (Some(s), None) | (None, Some(s)) => !s,
                (None, None) => unreachable!("heavy edges touch a palette vertex"),
            },
            _ => false,
        };
    }
    for j in 0..mc.edges.len() {
        place_checker(art, j, &mut sides)?;
    }
    place_leaves(roles, &mut sides);
    Ok(Cut::new(sides))
}

fn place_checker(art: &ReductionArtifact, column: usize, sides: &mut [bool]) -> Result<()> {
    let g = &art.graph;
    let mut hubs = [0usize; 4];
    let mut sets: [Vec<usize>; 4] = Default::default();
    let mut gates = [0usize; 3];
    for (v, r) in art.roles.iter().enumerate() {
        match *r {
            Role::CheckerHub { column: c, part } if c == column => hubs[part] = v,
            Role::CheckerSet { column: c, part } if c == column => sets[part].push(v),
            Role::CheckerGate { column: c, gate } if c == column => {
                gates[(gate as u8 - b'a') as usize] = v
            }
            _ => {}
        }
    }
    // Side-0 count each set needs for its hub to be balanced.
    let zeros: Vec<usize> = (0..4)
        .map(|part| {
            let path_zeros = g
                .neighbors(hubs[part])
                .iter()
                .filter(|&&(u, _)| matches!(art.roles[u], Role::Selector { .. }) && !sides[u])
                .count();
            sets[part].len() - path_zeros
        })
        .collect();
    let allowed = |part: usize, side: bool| {
        if side {
            zeros[part] < sets[part].len()
        } else {
            zeros[part] > 0
        }
    };
    for combo in 0u32..128 {
        let bit = |i: u32| combo >> i & 1 == 1;
        let ys = [bit(0), bit(1), bit(2), bit(3)];
        if (0..4).any(|part| !allowed(part, ys[part])) {
            continue;
        }
        let (a, b, c) = (bit(4), bit(5), bit(6));
        let a_cut = [ys[0] != a, ys[2] != a, c != a];
        let b_cut = [ys[1] != b, ys[3] != b, c != b];
        let count = |x: &[bool]| x.iter().filter(|&&y| y).count();
        let (ca, cb) = (count(&a_cut), count(&b_cut));
        let cc = (c != a) as usize + (c != b) as usize;
        if ca < 2 || cb < 2 || cc < 1 {
            continue;
        }
        if ca + cb != 4 {
            continue;
        }
        for part in 0..4 {
            let mut need = zeros[part];
            let set = &sets[part];
            sides[set[0]] = ys[part];
            if !ys[part] {
                need -= 1;
            }
            for &y in &set[1..] {
                sides[y] = need == 0;
                need = need.saturating_sub(1);
            }
        }
        sides[gates[0]] = a;
        sides[gates[1]] = b;
        sides[gates[2]] = c;
        return Ok(());
    }
    Err(Error::Internal(format!(
        "checker of edge column {column} admits no balanced placement"
    )))
}

/// `σ(i)` = number of vertices on the first selector path of class `i` that
/// share its first vertex's side, minus one.
pub(super) fn extract(art: &ReductionArtifact, mc: &McisInstance, c: &Cut) -> Vec<usize> {
    if mc.edges.is_empty() {
        return vec![0; mc.classes];
    }
    let mut paths = vec![Vec::new(); mc.classes];
    for (v, r) in art.roles.iter().enumerate() {
        if let Role::Selector {
            class,
            column: 0,
            position,
        } = *r
        {
            paths[class].push((position, v));
        }
    }
    paths
        .into_iter()
        .map(|mut p| {
            p.sort_unstable();
            let first = c.side(p[0].1);
            p.iter().filter(|&&(_, v)| c.side(v) == first).count() - 1
        })
        .collect()
}
