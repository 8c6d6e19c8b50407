//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stablecut::approx::{rescale_stability, solve_approx, ExtendedInstance, Rational};
use stablecut::exact::{solve_degree, solve_max_cut, solve_pseudo};
use stablecut::graph::{cut_weight, is_stable, Cut, WeightedGraph};
use stablecut::oracle::{
    brute_max_cut, brute_min_stable_cut, enumerate_stable_cuts, local_search, price_of_anarchy,
    Pivot,
};
use stablecut::reductions::*;
use stablecut::treedec::{
    hang_pendants, heuristic_decompose, make_nice, validate, NiceDecomposition, Strategy,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:.1?}, limit {limit:?}"));
    }
    Ok(())
}

fn nice(g: &WeightedGraph) -> NiceDecomposition {
    make_nice(&heuristic_decompose(g, Strategy::MinFill)).unwrap()
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32, p: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, rng.gen_range(lo..=hi)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) {
                edges.push((u, v, rng.gen_range(lo..=hi)));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Every labeled simple graph on `n` vertices, as edge lists.
fn all_graphs(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect()
    })
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let rounds = 500;
    for round in 0..rounds {
        let n = rng.gen_range(1..=7);
        let g = random_connected(&mut rng, n, 1, 10, 0.35);
        let td = heuristic_decompose(&g, Strategy::MinDegree);
        let brute = brute_min_stable_cut(&g).map_err(|e| e.to_string())?;
        let pseudo = solve_pseudo(&g, &make_nice(&td).unwrap()).map_err(|e| e.to_string())?;
        let degree = solve_degree(&g, &td).map_err(|e| e.to_string())?;
        ensure!(
            pseudo.weight == brute.weight && degree.weight == brute.weight,
            "round {round}: pseudo {} degree {} brute {}",
            pseudo.weight,
            degree.weight,
            brute.weight
        );
        for c in [&brute.cut, &pseudo.cut, &degree.cut] {
            ensure!(is_stable(&g, c).unwrap(), "round {round}: unstable witness");
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{rounds} graphs agree"))
}

fn c4_facts() -> Outcome {
    let g = WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let min = brute_min_stable_cut(&g).unwrap().weight;
    let dp = solve_pseudo(&g, &nice(&g)).unwrap().weight;
    let max = brute_max_cut(&g).unwrap();
    let max_dp = solve_max_cut(&g, &nice(&g)).unwrap();
    let poa = price_of_anarchy(&g).unwrap().ratio;
    ensure!(
        min == BigUint::from(2u32) && dp == min,
        "min stable cut {min} / dp {dp}"
    );
    ensure!(
        max == BigUint::from(4u32) && max_dp == max,
        "max cut {max} / dp {max_dp}"
    );
    ensure!(
        poa == Rational::from_integer(BigUint::from(2u32)),
        "PoA {poa}"
    );
    Ok("min 2, max 4, PoA 2".into())
}

fn half_weight_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut graphs, mut cuts) = (0u64, 0u64);
    for n in 1..=6 {
        for edges in all_graphs(n) {
            let unit = WeightedGraph::unweighted(n, edges.iter().copied()).unwrap();
            let weighted = WeightedGraph::new(
                n,
                edges.iter().map(|&(u, v)| (u, v, rng.gen_range(1u32..=10))),
            )
            .unwrap();
            for g in [unit, weighted] {
                graphs += 1;
                let total = g.total_weight();
                for (c, w) in enumerate_stable_cuts(&g).unwrap() {
                    cuts += 1;
                    ensure!(
                        w.clone() * 2u32 >= total,
                        "stable cut {:?} of weight {w} below half of {total}",
                        c.sides()
                    );
                }
            }
        }
    }
    Ok(format!("{cuts} stable cuts over {graphs} graphs"))
}

/// Multisets of `len` values from `1..=hi`, as non-decreasing sequences.
fn multisets(len: usize, hi: u64, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let lo = cur.last().copied().unwrap_or(1);
    for x in lo..=hi {
        cur.push(x);
        multisets(len, hi, out, cur);
        cur.pop();
    }
}

fn partition_equivalence() -> Outcome {
    let start = Instant::now();
    let mut all = Vec::new();
    for len in 1..=7 {
        multisets(len, 8, &mut all, &mut Vec::new());
    }
    all.retain(|v| v.iter().sum::<u64>() % 2 == 0);
    let (mut yes, mut checked) = (0, 0);
    for values in &all {
        let p = PartitionInstance::new(values.clone()).unwrap();
        let solvable = solve_source(&Source::PartitionTree(p.clone()), 24)
            .unwrap()
            .is_some();
        yes += solvable as usize;
        for art in [
            partition_to_tree(&p).unwrap(),
            partition_to_k2n(&p).unwrap(),
        ] {
            let nd = make_nice(&art.companion_pd).unwrap();
            let best = solve_pseudo(&art.graph, &nd).map_err(|e| e.to_string())?;
            ensure!(
                solvable == (best.weight <= art.threshold),
                "{values:?} ({}): solvable {solvable}, min {} vs threshold {}",
                art.source.family(),
                best.weight,
                art.threshold
            );
            checked += 1;
        }
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "{} multisets ({yes} solvable), {checked} targets",
        all.len()
    ))
}

fn maxcut_equivalence() -> Outcome {
    let mut graphs = 0;
    let mut pairs = 0;
    for n in 1..=6 {
        for edges in all_graphs(n) {
            let g = WeightedGraph::unweighted(n, edges).unwrap();
            if g.max_degree() > 3 {
                continue;
            }
            graphs += 1;
            let best = brute_max_cut(&g).unwrap().to_u64().unwrap();
            let base = maxcut_to_unweighted(&g, 0).unwrap();
            let nd = make_nice(&base.companion_pd).unwrap();
            let min = solve_pseudo(&base.graph, &nd)
                .map_err(|e| e.to_string())?
                .weight;
            for k in 0..=best + 1 {
                if k > g.edge_count() as u64 {
                    break;
                }
                let art = maxcut_to_unweighted(&g, k).unwrap();
                ensure!(art.graph == base.graph, "target depends on k");
                ensure!(
                    (best >= k) == (min <= art.threshold),
                    "{:?}, k = {k}: max cut {best}, target min {min} vs {}",
                    g.edges(),
                    art.threshold
                );
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{graphs} subcubic graphs, {pairs} (graph, k) pairs"
    ))
}

fn splitting_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut yes, mut total) = (0, 0);
    for _ in 0..80 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=4);
        let sets: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let size = if n > 2 && rng.gen_bool(0.3) { 3 } else { 2 };
                rand::seq::index::sample(&mut rng, n, size).into_vec()
            })
            .collect();
        let h = SetSplittingInstance::new(n, sets.clone()).unwrap();
        let source = Source::SetSplitting {
            instance: h.clone(),
            delta: 1,
        };
        let splittable = solve_source(&source, 24).unwrap().is_some();
        for delta in 1..=3 {
            let art = setsplitting_to_stablecut(&h, delta).unwrap();
            ensure!(
                validate(&art.graph, &art.companion_pd).is_empty(),
                "invalid companion decomposition"
            );
            let bound = 2 * n.div_ceil(delta) + 5;
            ensure!(
                art.companion_pd.width() <= bound,
                "companion width {} > {bound}",
                art.companion_pd.width()
            );
            let nd = make_nice(&art.companion_pd).unwrap();
            let best = solve_pseudo(&art.graph, &nd).map_err(|e| e.to_string())?;
            ensure!(
                splittable == (best.weight <= art.threshold),
                "{sets:?} on {n}, delta {delta}: splittable {splittable}, min {} vs B {}",
                best.weight,
                art.threshold
            );
            yes += splittable as usize;
            total += 1;
        }
    }
    ensure!(yes > 0 && yes < total, "sample lacks yes or no instances");
    Ok(format!("{total} targets ({yes} splittable)"))
}

fn mcis_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut yes, mut total) = (0, 0);
    for n in 2..=3 {
        let pairs: Vec<_> = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((0, a), (1, b))))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let mc = McisInstance::new(2, n, edges).unwrap();
            let art = mcis_to_unweighted(&mc, None).unwrap();
            ensure!(
                validate(&art.graph, &art.companion_pd).is_empty(),
                "n = {n}, mask {mask:b}: invalid companion decomposition"
            );
            ensure!(
                art.companion_pd.width() <= 2 * 2 + 9,
                "n = {n}, mask {mask:b}: companion width {}",
                art.companion_pd.width()
            );
            let detach =
                art.vertices_with(|r| matches!(r, Role::Leaf { .. } | Role::HeavyInternal { .. }));
            let td =
                hang_pendants(&art.graph, &art.companion_pd, &detach).map_err(|e| e.to_string())?;
            let best =
                solve_pseudo(&art.graph, &make_nice(&td).unwrap()).map_err(|e| e.to_string())?;
            let independent = solve_source(&art.source, 24).unwrap().is_some();
            let within_b = best.weight <= art.threshold;
            ensure!(
                independent == within_b,
                "n = {n}, mask {mask:b}: independent {independent}, min {} vs B {}",
                best.weight,
                art.threshold
            );
            if within_b {
                let w = extract_witness(&art, &best.cut).map_err(|e| e.to_string())?;
                let SourceWitness::Selection(sel) = w else {
                    return Err("extraction returned the wrong witness kind".into());
                };
                ensure!(
                    mc.is_independent(&sel),
                    "extracted {sel:?} is not independent"
                );
                yes += 1;
            }
            total += 1;
        }
    }
    within(start, Duration::from_secs(1800))?;
    Ok(format!("{total} instances ({yes} with an independent set)"))
}

fn approximation_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fallbacks = 0;
    let rounds = 200;
    for round in 0..rounds {
        let n = rng.gen_range(1..=8);
        let g = random_connected(&mut rng, n, 1, 1000, 0.3);
        let nd = nice(&g);
        let brute = brute_min_stable_cut(&g).unwrap().weight;
        for (p, q) in [(1u32, 10u32), (1, 2)] {
            let eps = Rational::new(BigUint::from(p), BigUint::from(q));
            let sol = solve_approx(&g, &nd, &eps).map_err(|e| e.to_string())?;
            fallbacks += sol.used_fallback as usize;
            ensure!(
                sol.weight <= brute,
                "round {round}, eps {p}/{q}: weight {} above optimum {brute}",
                sol.weight
            );
            ensure!(
                cut_weight(&g, &sol.cut).unwrap() == sol.weight,
                "round {round}: reported weight disagrees with the cut"
            );
            for v in 0..n {
                let d = g.weighted_degree(v).unwrap();
                let cross: BigUint = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&(u, _)| sol.cut.side(u) != sol.cut.side(v))
                    .map(|&(_, e)| g.edge(e).weight.clone())
                    .sum();
                ensure!(
                    cross * 2u32 * q >= d * (q - p),
                    "round {round}, eps {p}/{q}: vertex {v} not almost stable"
                );
            }
        }
    }
    Ok(format!(
        "{rounds} graphs x 2 eps, {fallbacks} exact fallbacks"
    ))
}

fn random_extended(rng: &mut ChaCha8Rng, n: usize) -> ExtendedInstance {
    let g = random_connected(rng, n, 1, 10, 0.4);
    let s = (0..g.edge_count())
        .map(|_| {
            (
                BigUint::from(rng.gen_range(1u32..=1000)),
                BigUint::from(rng.gen_range(1u32..=1000)),
            )
        })
        .collect();
    ExtendedInstance::new(g, s).unwrap()
}

fn ratio_bracket() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut checks, mut misses) = (0u64, 0u64);
    let mut first: Option<String> = None;
    for _ in 0..60 {
        let n = rng.gen_range(2..=8);
        let ext = random_extended(&mut rng, n);
        let scaled = rescale_stability(&ext);
        let nn = BigUint::from(n);
        for mask in 0u64..1 << (n - 1) {
            let c = Cut::new((0..n).map(|v| v > 0 && mask >> (v - 1) & 1 == 1).collect());
            let cross = ext.crossing_stability(&c).unwrap();
            let cross2 = scaled.crossing_stability(&c).unwrap();
            for v in 0..n {
                let (d, d2) = (ext.stability_degree(v), scaled.stability_degree(v));
                if d.is_zero() {
                    continue;
                }
                checks += 1;
                // ratio = (cross/d) / (cross2/d2) = a / b
                let a = &cross[v] * d2;
                let b = d * &cross2[v];
                let ok = if b.is_zero() {
                    a.is_zero()
                } else {
                    (&nn - 1u32) * &b <= &nn * &a && &nn * &a <= (&nn + 1u32) * &b
                };
                if !ok {
                    misses += 1;
                    first.get_or_insert_with(|| {
                        format!(
                            "n = {n}, vertex {v}, sides {:?}: s fraction {}/{d}, rescaled {}/{d2}",
                            c.sides().iter().map(|&x| x as u8).collect::<Vec<_>>(),
                            cross[v],
                            cross2[v]
                        )
                    });
                }
            }
        }
    }
    match first {
        None => Ok(format!("{checks} (cut, vertex) checks")),
        Some(example) => Err(format!(
            "{misses} of {checks} (cut, vertex) checks outside [1-1/n, 1+1/n]; first: {example}"
        )),
    }
}

fn fixtures(rng: &mut ChaCha8Rng) -> Vec<(String, WeightedGraph)> {
    let mut out = vec![
        (
            "C4".to_string(),
            WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
        ),
        (
            "triangle".into(),
            WeightedGraph::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap(),
        ),
        (
            "K13".into(),
            WeightedGraph::unweighted(4, [(0, 1), (0, 2), (0, 3)]).unwrap(),
        ),
        (
            "P3".into(),
            WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap(),
        ),
        (
            "K23".into(),
            WeightedGraph::unweighted(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap(),
        ),
        (
            "edge w=7".into(),
            WeightedGraph::new(2, [(0, 1, 7u32)]).unwrap(),
        ),
        (
            "edgeless 3".into(),
            WeightedGraph::unweighted(3, []).unwrap(),
        ),
    ];
    for i in 0..5 {
        out.push((format!("random {i}"), random_connected(rng, 8, 1, 50, 0.4)));
    }
    out
}

fn local_search_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let list = fixtures(&mut rng);
    let mut runs = 0;
    for (name, g) in &list {
        let min = brute_min_stable_cut(g).unwrap().weight;
        let max = brute_max_cut(g).unwrap();
        let total = g.total_weight();
        for seed in 0..100u64 {
            let start = Cut::new((0..g.vertex_count()).map(|_| rng.gen_bool(0.5)).collect());
            let pivot = if seed % 2 == 0 {
                Pivot::FirstImprovement
            } else {
                Pivot::BestImprovement
            };
            let out = local_search(g, &start, pivot, seed).unwrap();
            ensure!(
                is_stable(g, &out.cut).unwrap(),
                "{name}, seed {seed}: unstable"
            );
            ensure!(
                min <= out.weight && out.weight <= max,
                "{name}, seed {seed}: weight {} outside [{min}, {max}]",
                out.weight
            );
            ensure!(
                BigUint::from(out.flips) <= total,
                "{name}, seed {seed}: {} flips exceed weight {total}",
                out.flips
            );
            runs += 1;
        }
    }
    Ok(format!("{runs} runs over {} fixtures", list.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("C4 facts", c4_facts),
        ("half-weight bound", half_weight_bound),
        ("partition targets", partition_equivalence),
        ("max cut target", maxcut_equivalence),
        ("set splitting target", splitting_equivalence),
        ("colored independent set target", mcis_equivalence),
        ("approximation contract", approximation_contract),
        ("rescaling ratio bracket", ratio_bracket),
        ("local search", local_search_bounds),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let took = t.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{took:.1?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why} [{took:.1?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
