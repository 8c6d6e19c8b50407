//! Extended Min Stable Cut and the approximation scheme built on it.
//!
//! An extended instance carries, besides the cut weights, a stability weight
//! `s(uv, v)` for every edge endpoint. A cut is ρ-stable when every vertex has
//! crossing stability weight at least `d_s(v) / (2ρ)`.

mod pipeline;
mod powers;
mod rounded;

pub use pipeline::{almost_stable, approx_scale_factor, solve_approx, ApproxSolution};
pub use powers::Exponent;
pub use rounded::{
    solve_rounded, solve_rounded_traced, RoundedOptions, RoundedSolution, RoundedTrace,
};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Cut, Weight, WeightedGraph};

pub type Rational = Ratio<BigUint>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedInstance {
    graph: WeightedGraph,
    /// Per edge index: stability weight at the smaller endpoint, then at the
    /// larger one.
    s: Vec<(Weight, Weight)>,
    stability_degree: Vec<Weight>,
}

impl ExtendedInstance {
    pub fn new(graph: WeightedGraph, s: Vec<(Weight, Weight)>) -> Result<Self> {
        if s.len() != graph.edge_count() {
            return Err(Error::InvalidStability(format!(
                "{} stability pairs for {} edges",
                s.len(),
                graph.edge_count()
            )));
        }
        let mut stability_degree = vec![Weight::zero(); graph.vertex_count()];
        for (e, (su, sv)) in graph.edges().iter().zip(&s) {
            stability_degree[e.u] += su;
            stability_degree[e.v] += sv;
        }
        Ok(ExtendedInstance {
            graph,
            s,
            stability_degree,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// `s(e, endpoint)`; `endpoint` must be one of the ends of edge `e`.
    pub fn stability(&self, edge: usize, endpoint: usize) -> &Weight {
        let e = self.graph.edge(edge);
        if endpoint == e.u {
            &self.s[edge].0
        } else {
            debug_assert_eq!(endpoint, e.v);
            &self.s[edge].1
        }
    }

    pub fn stability_pairs(&self) -> &[(Weight, Weight)] {
        &self.s
    }

    /// `d_s(v)`.
    pub fn stability_degree(&self, v: usize) -> &Weight {
        &self.stability_degree[v]
    }

    /// Largest stability weight at any endpoint.
    pub fn max_stability(&self) -> Weight {
        self.s
            .iter()
            .flat_map(|(a, b)| [a, b])
            .max()
            .cloned()
            .unwrap_or_default()
    }

    /// `S(v)`: largest stability weight on an edge end at `v`.
    pub fn vertex_max_stability(&self, v: usize) -> Weight {
        self.graph
            .neighbors(v)
            .iter()
            .map(|&(_, e)| self.stability(e, v))
            .max()
            .cloned()
            .unwrap_or_default()
    }

    /// Crossing stability weight at every vertex.
    pub fn crossing_stability(&self, c: &Cut) -> Result<Vec<Weight>> {
        let n = self.graph.vertex_count();
        if c.len() != n {
            return Err(Error::PartialCut {
                expected: n,
                got: c.len(),
            });
        }
        let mut out = vec![Weight::zero(); n];
        for (e, (su, sv)) in self.graph.edges().iter().zip(&self.s) {
            if c.crosses(e) {
                out[e.u] += su;
                out[e.v] += sv;
            }
        }
        Ok(out)
    }
}

/// Mirrors the cut weights into both stability weights.
pub fn extend_from_plain(g: &WeightedGraph) -> ExtendedInstance {
    let s = g
        .edges()
        .iter()
        .map(|e| (e.weight.clone(), e.weight.clone()))
        .collect();
    ExtendedInstance::new(g.clone(), s).expect("one pair per edge")
}

/// True iff `2ρ · crossing_s(v) ≥ d_s(v)` for every vertex.
pub fn is_rho_stable(ext: &ExtendedInstance, c: &Cut, rho: &Rational) -> Result<bool> {
    if *rho < Rational::one() {
        return Err(Error::InvalidRho(format!(
            "{}/{}",
            rho.numer(),
            rho.denom()
        )));
    }
    let cross = ext.crossing_stability(c)?;
    let (p, q) = (rho.numer(), rho.denom());
    Ok(cross
        .iter()
        .enumerate()
        .all(|(v, x)| (x * p) << 1u32 >= q * ext.stability_degree(v)))
}

/// Rescales every stability weight to `⌊n² · s(uv,v) / S(v)⌋`.
///
/// A vertex whose incident stability weights are all 0 keeps them at 0 and is
/// trivially stable.
pub fn rescale_stability(ext: &ExtendedInstance) -> ExtendedInstance {
    let n = ext.graph.vertex_count();
    rescale_stability_with_factor(ext, &BigUint::from(n * n))
}

/// Rescales every stability weight to `⌊factor · s(uv,v) / S(v)⌋`.
pub fn rescale_stability_with_factor(ext: &ExtendedInstance, factor: &BigUint) -> ExtendedInstance {
    let n = ext.graph.vertex_count();
    let smax: Vec<Weight> = (0..n).map(|v| ext.vertex_max_stability(v)).collect();
    let scale = |x: &Weight, v: usize| {
        if smax[v].is_zero() {
            Weight::zero()
        } else {
            (factor * x).div_floor(&smax[v])
        }
    };
    let s = ext
        .graph
        .edges()
        .iter()
        .zip(&ext.s)
        .map(|(e, (su, sv))| (scale(su, e.u), scale(sv, e.v)))
        .collect();
    ExtendedInstance::new(ext.graph.clone(), s).expect("one pair per edge")
}

pub(crate) fn check_epsilon(eps: &Rational) -> Result<()> {
    let half = Rational::new(BigUint::one(), BigUint::from(2u32));
    if eps.is_zero() || *eps > half {
        return Err(Error::InvalidEpsilon(format!(
            "{}/{}",
            eps.numer(),
            eps.denom()
        )));
    }
    Ok(())
}
