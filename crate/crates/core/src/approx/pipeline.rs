use num_bigint::BigUint;
use num_integer::Integer;

use super::{
    check_epsilon, extend_from_plain, rescale_stability_with_factor, solve_rounded, Rational,
};
use crate::error::Result;
use crate::exact::solve_pseudo;
use crate::graph::{evaluate_cut, Cut, Weight, WeightedGraph};
use crate::treedec::NiceDecomposition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxSolution {
    pub cut: Cut,
    pub weight: Weight,
    /// The rounded solution failed the final exact check and the exact
    /// solver was used instead.
    pub used_fallback: bool,
}

/// Scale factor for the stability rescaling: `max(n², ⌈(8/ε + 2)·Δ⌉)`.
///
/// Flooring `s` to a grid of `M` steps per `S(v)` moves a vertex's crossing
/// fraction by at most `Δ/M` in either direction; with this `M` an exactly
/// stable cut stays `(1+ε/4)`-stable and a `(1+ε/2)`-stable cut of the
/// rescaled instance keeps `(1-ε)/2` of each original weighted degree.
pub fn approx_scale_factor(g: &WeightedGraph, eps: &Rational) -> BigUint {
    let n = BigUint::from(g.vertex_count());
    let (a, b) = (eps.numer(), eps.denom());
    let need = ((b << 3u32) + (a << 1u32)) * BigUint::from(g.max_degree());
    need.div_ceil(a).max(&n * &n)
}

/// A cut where every vertex has `2·crossing_w(v) ≥ (1−ε)·d_w(v)` and whose
/// weight is at most the minimum stable cut weight.
pub fn solve_approx(
    g: &WeightedGraph,
    nd: &NiceDecomposition,
    eps: &Rational,
) -> Result<ApproxSolution> {
    check_epsilon(eps)?;
    let ext = extend_from_plain(g);
    let scaled = rescale_stability_with_factor(&ext, &approx_scale_factor(g, eps));
    let inner = eps / Rational::from_integer(BigUint::from(4u32));
    let r = solve_rounded(&scaled, nd, &inner)?;
    if almost_stable(g, &r.cut, eps)? {
        return Ok(ApproxSolution {
            cut: r.cut,
            weight: r.weight,
            used_fallback: false,
        });
    }
    let exact = solve_pseudo(g, nd)?;
    Ok(ApproxSolution {
        cut: exact.cut,
        weight: exact.weight,
        used_fallback: true,
    })
}

/// `2b · crossing_w(v) ≥ (b − a) · d_w(v)` for `ε = a/b`, every vertex.
pub fn almost_stable(g: &WeightedGraph, cut: &Cut, eps: &Rational) -> Result<bool> {
    let report = evaluate_cut(g, cut)?;
    let (a, b) = (eps.numer(), eps.denom());
    let slack = if a < b { b - a } else { BigUint::from(0u32) };
    Ok(report
        .vertices
        .iter()
        .all(|s| (&s.cut_weight * b) << 1u32 >= &slack * &s.weighted_degree))
}
