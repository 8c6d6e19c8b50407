//! Instance generators that encode hard source problems as Min Stable Cut
//! instances, with a threshold, a companion path decomposition, and witness
//! maps in both directions.
//!
//! Every generator validates its own decomposition. [`lift_witness`] turns a
//! source solution into a stable cut within the threshold and
//! [`extract_witness`] decodes such a cut back; both check their output and
//! report an internal error if the check fails.

mod maxcut;
mod mcis;
mod partition;
mod splitting;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{evaluate_cut, Cut, Weight, WeightedGraph};
use crate::treedec::{ensure_valid, PathBuilder, TreeDecomposition};

pub use maxcut::maxcut_to_unweighted;
pub use mcis::{default_heavy_size, mcis_to_unweighted, McisInstance};
pub use partition::{partition_to_k2n, partition_to_tree, PartitionInstance};
pub use splitting::{setsplitting_to_stablecut, SetSplittingInstance};

/// What a target vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Center of the subdivided star.
    Center,
    /// One of the two left vertices of `K_{2,n}`.
    Hub(usize),
    /// The vertex carrying value `x_i`.
    Item(usize),
    /// A vertex of the source Max Cut graph.
    Original(usize),
    /// Subdivision vertex of a source edge.
    Subdivision(usize),
    /// Copy of a set-splitting element in one column.
    Element {
        element: usize,
        column: usize,
    },
    /// Set-splitting checker for one set.
    Checker(usize),
    /// Propagator between `column` and `column + 1`; `group` is the element
    /// group or the color class.
    Propagator {
        group: usize,
        column: usize,
    },
    Palette(usize),
    /// Vertex `position` of the selector path for a color class.
    Selector {
        class: usize,
        column: usize,
        position: usize,
    },
    /// One of the four checker hubs of an edge column.
    CheckerHub {
        column: usize,
        part: usize,
    },
    /// Member of the independent set attached to a checker hub.
    CheckerSet {
        column: usize,
        part: usize,
    },
    /// The `a`, `b`, `c` vertices of an edge checker.
    CheckerGate {
        column: usize,
        gate: char,
    },
    /// Degree-two vertex of a heavy edge.
    HeavyInternal {
        ends: (usize, usize),
    },
    /// Leaf attached to `of`.
    Leaf {
        of: usize,
    },
}

impl Role {
    pub fn tag(&self) -> &'static str {
        match self {
            Role::Center => "center",
            Role::Hub(_) => "hub",
            Role::Item(_) => "item",
            Role::Original(_) => "original",
            Role::Subdivision(_) => "subdivision",
            Role::Element { .. } => "element",
            Role::Checker(_) => "checker",
            Role::Propagator { .. } => "propagator",
            Role::Palette(_) => "palette",
            Role::Selector { .. } => "selector",
            Role::CheckerHub { .. } => "checker-hub",
            Role::CheckerSet { .. } => "t-set",
            Role::CheckerGate { .. } => "gate",
            Role::HeavyInternal { .. } => "heavy-internal",
            Role::Leaf { .. } => "stabilizer-leaf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    PartitionTree(PartitionInstance),
    PartitionK2n(PartitionInstance),
    MaxCut {
        graph: WeightedGraph,
        k: u64,
    },
    SetSplitting {
        instance: SetSplittingInstance,
        delta: usize,
    },
    Mcis {
        instance: McisInstance,
        heavy: u64,
    },
}

impl Source {
    pub fn family(&self) -> &'static str {
        match self {
            Source::PartitionTree(_) => "partition-tree",
            Source::PartitionK2n(_) => "partition-k2n",
            Source::MaxCut { .. } => "maxcut",
            Source::SetSplitting { .. } => "setsplitting",
            Source::Mcis { .. } => "mcis",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceWitness {
    /// Membership of every value in the half-sum subset.
    Subset(Vec<bool>),
    /// A cut of the source graph.
    Cut(Cut),
    /// Side of every element.
    Splitting(Vec<bool>),
    /// Chosen vertex index (0-based) in every color class.
    Selection(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub graph: WeightedGraph,
    pub threshold: Weight,
    /// A path decomposition of `graph`.
    pub companion_pd: TreeDecomposition,
    pub roles: Vec<Role>,
    pub source: Source,
    /// Construction constants (leaf weight, heavy-edge size, ...).
    pub metadata: BTreeMap<String, Weight>,
}

impl ReductionArtifact {
    pub fn vertices_with(&self, pred: impl Fn(&Role) -> bool) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&v| pred(&self.roles[v]))
            .collect()
    }
}

/// Checks a source witness against the source instance.
pub fn verify_source(source: &Source, w: &SourceWitness) -> Result<()> {
    match (source, w) {
        (Source::PartitionTree(p) | Source::PartitionK2n(p), SourceWitness::Subset(s)) => {
            p.verify(s)
        }
        (Source::MaxCut { graph, k }, SourceWitness::Cut(c)) => maxcut::verify(graph, *k, c),
        (Source::SetSplitting { instance, .. }, SourceWitness::Splitting(s)) => instance.verify(s),
        (Source::Mcis { instance, .. }, SourceWitness::Selection(s)) => instance.verify(s),
        _ => Err(Error::InvalidWitness(format!(
            "witness kind does not fit a {} source",
            source.family()
        ))),
    }
}

/// Brute-force solution of the source instance, if one exists.
pub fn solve_source(source: &Source, limit: usize) -> Result<Option<SourceWitness>> {
    match source {
        Source::PartitionTree(p) | Source::PartitionK2n(p) => {
            Ok(p.solve(limit)?.map(SourceWitness::Subset))
        }
        Source::MaxCut { graph, k } => Ok(maxcut::solve(graph, *k, limit)?.map(SourceWitness::Cut)),
        Source::SetSplitting { instance, .. } => {
            Ok(instance.solve(limit)?.map(SourceWitness::Splitting))
        }
        Source::Mcis { instance, .. } => Ok(instance.solve(limit)?.map(SourceWitness::Selection)),
    }
}

/// Maps a source solution to a stable cut of weight at most the threshold.
pub fn lift_witness(art: &ReductionArtifact, w: &SourceWitness) -> Result<Cut> {
    verify_source(&art.source, w)?;
    let cut = match (&art.source, w) {
        (Source::PartitionTree(_), SourceWitness::Subset(s)) => partition::lift_tree(art, s),
        (Source::PartitionK2n(_), SourceWitness::Subset(s)) => partition::lift_k2n(art, s),
        (Source::MaxCut { .. }, SourceWitness::Cut(c)) => maxcut::lift(art, c),
        (Source::SetSplitting { instance, .. }, SourceWitness::Splitting(s)) => {
            splitting::lift(art, instance, s)
        }
        (Source::Mcis { instance, .. }, SourceWitness::Selection(s)) => {
            mcis::lift(art, instance, s)?
        }
        _ => unreachable!("verify_source rejects mismatched witnesses"),
    };
    let report = evaluate_cut(&art.graph, &cut)?;
    if !report.stable || report.cut_weight > art.threshold {
        return Err(Error::Internal(format!(
            "lifted cut has weight {} (threshold {}), stable = {}",
            report.cut_weight, art.threshold, report.stable
        )));
    }
    Ok(cut)
}

/// Decodes a stable cut within the threshold into a source solution.
pub fn extract_witness(art: &ReductionArtifact, c: &Cut) -> Result<SourceWitness> {
    let report = evaluate_cut(&art.graph, c)?;
    if !report.stable {
        return Err(Error::ExtractionRefused(format!(
            "cut is unstable at vertices {:?}",
            report.unstable_vertices()
        )));
    }
    if report.cut_weight > art.threshold {
        return Err(Error::ExtractionRefused(format!(
            "cut weight {} exceeds threshold {}",
            report.cut_weight, art.threshold
        )));
    }
    let w = match &art.source {
        Source::PartitionTree(_) => SourceWitness::Subset(partition::extract_tree(art, c)),
        Source::PartitionK2n(_) => SourceWitness::Subset(partition::extract_k2n(art, c)),
        Source::MaxCut { graph, .. } => SourceWitness::Cut(maxcut::extract(graph, c)),
        Source::SetSplitting { instance, .. } => {
            SourceWitness::Splitting(splitting::extract(art, instance, c))
        }
        Source::Mcis { instance, .. } => SourceWitness::Selection(mcis::extract(art, instance, c)),
    };
    verify_source(&art.source, &w)
        .map_err(|e| Error::Internal(format!("decoded witness fails its check: {e}")))?;
    Ok(w)
}

/// Vertex and edge accumulator shared by the generators.
#[derive(Default)]
struct Assembly {
    roles: Vec<Role>,
    edges: Vec<(usize, usize, Weight)>,
}

impl Assembly {
    fn vertex(&mut self, role: Role) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize, w: impl Into<Weight>) {
        self.edges.push((u, v, w.into()));
    }

    fn leaves(&mut self, of: usize, count: u64, w: &Weight) -> Vec<usize> {
        (0..count)
            .map(|_| {
                let l = self.vertex(Role::Leaf { of });
                self.edge(of, l, w.clone());
                l
            })
            .collect()
    }

    fn finish(
        self,
        threshold: Weight,
        pd: TreeDecomposition,
        source: Source,
        metadata: BTreeMap<String, Weight>,
    ) -> Result<ReductionArtifact> {
        let graph = WeightedGraph::new(self.roles.len(), self.edges)?;
        ensure_valid(&graph, &pd)
            .map_err(|e| Error::Internal(format!("companion decomposition: {e}")))?;
        Ok(ReductionArtifact {
            graph,
            threshold,
            companion_pd: pd,
            roles: self.roles,
            source,
            metadata,
        })
    }
}

/// Finishes a path builder whose operations were issued in the order the
/// dynamic program should see them; the program runs from the last bag
/// towards the first.
fn reversed_path(pb: PathBuilder) -> TreeDecomposition {
    let td = pb.finish();
    TreeDecomposition::path(td.bags().iter().rev().cloned().collect())
}

/// Puts every leaf opposite its neighbor.
fn place_leaves(roles: &[Role], sides: &mut [bool]) {
    for v in 0..roles.len() {
        if let Role::Leaf { of } = roles[v] {
            sides[v] = !sides[of];
        }
    }
}

fn meta(pairs: &[(&str, u128)]) -> BTreeMap<String, Weight> {
    pairs
        .iter()
        .map(|&(k, v)| (k.to_string(), Weight::from(v)))
        .collect()
}

/// `n ≤ limit` assignments are enumerable.
fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit.min(63) {
        return Err(Error::EnumerationLimit {
            vertices: n,
            limit: limit.min(63),
        });
    }
    Ok(())
}
