//! On-disk formats. Vertex and bag ids are 1-based on disk, 0-based in memory.
//!
//! Graph: `p msc <n> <m>` then `m` lines `u v [w]` (weight 1 when omitted).
//! Extended: `p msc-ext <n> <m>` then lines `u v w s_u s_v`.
//! Decomposition: `s td <bags> <max bag size> <n>`, lines `b <id> v...`, then
//! tree edges `i j`.
//! Cut: `p cut <n>` then one line `v side` per vertex.
//! Lines starting with `c` are comments everywhere.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use stablecut::approx::ExtendedInstance;
use stablecut::error::{Error, Result};
use stablecut::graph::{Cut, Weight, WeightedGraph};
use stablecut::treedec::TreeDecomposition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphInput {
    Plain(WeightedGraph),
    Extended(ExtendedInstance),
}

impl GraphInput {
    pub fn graph(&self) -> &WeightedGraph {
        match self {
            GraphInput::Plain(g) => g,
            GraphInput::Extended(e) => e.graph(),
        }
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn number<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| {
        Error::parse(
            line,
            format!("{what} '{tok}' is not a non-negative integer"),
        )
    })
}

fn vertex_id(line: usize, tok: &str, n: usize) -> Result<usize> {
    let v: usize = number(line, tok, "vertex")?;
    if v == 0 || v > n {
        return Err(Error::parse(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

pub fn parse_graph(text: &str) -> Result<GraphInput> {
    let mut lines = content(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing 'p msc' header"))?;
    let extended = match header.as_slice() {
        ["p", "msc", _, _] => false,
        ["p", "msc-ext", _, _] => true,
        _ => {
            return Err(Error::parse(
                hl,
                "expected 'p msc <n> <m>' or 'p msc-ext <n> <m>'",
            ))
        }
    };
    let n: usize = number(hl, header[2], "vertex count")?;
    let m: usize = number(hl, header[3], "edge count")?;
    // Parallel lines merge: weights and stability weights add up.
    let mut merged: BTreeMap<(usize, usize), (Weight, Weight, Weight)> = BTreeMap::new();
    let mut count = 0;
    for (line, toks) in lines {
        let arity_ok = if extended {
            toks.len() == 5
        } else {
            toks.len() == 2 || toks.len() == 3
        };
        if !arity_ok {
            return Err(Error::parse(
                line,
                if extended {
                    "expected 'u v w s_u s_v'"
                } else {
                    "expected 'u v' or 'u v w'"
                },
            ));
        }
        let u = vertex_id(line, toks[0], n)?;
        let v = vertex_id(line, toks[1], n)?;
        if u == v {
            return Err(Error::parse(line, format!("self-loop on vertex {}", u + 1)));
        }
        let w: BigUint = match toks.get(2) {
            Some(t) => number(line, t, "weight")?,
            None => BigUint::from(1u32),
        };
        if w.is_zero() {
            return Err(Error::parse(line, "edge weight must be positive"));
        }
        let (mut su, mut sv) = (BigUint::zero(), BigUint::zero());
        if extended {
            su = number(line, toks[3], "stability weight")?;
            sv = number(line, toks[4], "stability weight")?;
        }
        // Stored against (smaller, larger) endpoint.
        let (key, s_small, s_large) = if u < v {
            ((u, v), su, sv)
        } else {
            ((v, u), sv, su)
        };
        let e = merged.entry(key).or_default();
        e.0 += w;
        e.1 += s_small;
        e.2 += s_large;
        count += 1;
    }
    if count != m {
        return Err(Error::parse(
            hl,
            format!("header announces {m} edges, found {count}"),
        ));
    }
    let g = WeightedGraph::new(
        n,
        merged.iter().map(|(&(u, v), (w, _, _))| (u, v, w.clone())),
    )?;
    if !extended {
        return Ok(GraphInput::Plain(g));
    }
    let s = merged.into_values().map(|(_, a, b)| (a, b)).collect();
    Ok(GraphInput::Extended(ExtendedInstance::new(g, s)?))
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = format!("p msc {} {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
    }
    out
}

pub fn write_extended(ext: &ExtendedInstance) -> String {
    let g = ext.graph();
    let mut out = format!("p msc-ext {} {}\n", g.vertex_count(), g.edge_count());
    for (e, (su, sv)) in g.edges().iter().zip(ext.stability_pairs()) {
        writeln!(out, "{} {} {} {} {}", e.u + 1, e.v + 1, e.weight, su, sv).unwrap();
    }
    out
}

/// Returns the decomposition and the vertex count from the `s` line.
pub fn parse_td(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut lines = content(text);
    let (sl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing 's td' line"))?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(Error::parse(
            sl,
            "expected 's td <bags> <max bag size> <n>'",
        ));
    }
    let count: usize = number(sl, header[2], "bag count")?;
    let size: usize = number(sl, header[3], "bag size")?;
    let n: usize = number(sl, header[4], "vertex count")?;
    let mut bags: Vec<Option<Vec<usize>>> = vec![None; count];
    let mut edges = Vec::new();
    for (line, toks) in lines {
        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(Error::parse(line, "bag line without an id"));
            }
            let id = bag_id(line, toks[1], count)?;
            if bags[id].is_some() {
                return Err(Error::parse(line, format!("bag {} listed twice", id + 1)));
            }
            let mut bag = toks[2..]
                .iter()
                .map(|t| vertex_id(line, t, n))
                .collect::<Result<Vec<_>>>()?;
            bag.sort_unstable();
            bag.dedup();
            bags[id] = Some(bag);
        } else if toks.len() == 2 {
            edges.push((bag_id(line, toks[0], count)?, bag_id(line, toks[1], count)?));
        } else {
            return Err(Error::parse(
                line,
                "expected a 'b' line or a tree edge 'i j'",
            ));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(sl, format!("bag {} is never listed", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let largest = bags.iter().map(Vec::len).max().unwrap_or(0);
    if largest != size {
        return Err(Error::parse(
            sl,
            format!("header announces bag size {size}, largest bag has {largest}"),
        ));
    }
    Ok((TreeDecomposition::new(bags, edges), n))
}

fn bag_id(line: usize, tok: &str, count: usize) -> Result<usize> {
    let b: usize = number(line, tok, "bag")?;
    if b == 0 || b > count {
        return Err(Error::parse(line, format!("bag {b} outside 1..={count}")));
    }
    Ok(b - 1)
}

pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let largest = td.bags().iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bag_count(), largest, n);
    for (i, bag) in td.bags().iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in bag {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in td.edges() {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
    out
}

pub fn parse_cut(text: &str) -> Result<Cut> {
    let mut lines = content(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing 'p cut' header"))?;
    if header.len() != 3 || header[0] != "p" || header[1] != "cut" {
        return Err(Error::parse(hl, "expected 'p cut <n>'"));
    }
    let n: usize = number(hl, header[2], "vertex count")?;
    let mut sides: Vec<Option<bool>> = vec![None; n];
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(Error::parse(line, "expected 'v side'"));
        }
        let v = vertex_id(line, toks[0], n)?;
        let side = match toks[1] {
            "0" => false,
            "1" => true,
            t => return Err(Error::parse(line, format!("side '{t}' is not 0 or 1"))),
        };
        if sides[v].replace(side).is_some() {
            return Err(Error::parse(
                line,
                format!("vertex {} assigned twice", v + 1),
            ));
        }
    }
    let sides = sides
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or_else(|| Error::parse(hl, format!("vertex {} has no side", v + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cut::new(sides))
}

pub fn write_cut(c: &Cut) -> String {
    let mut out = format!("p cut {}\n", c.len());
    for (v, &s) in c.sides().iter().enumerate() {
        writeln!(out, "{} {}", v + 1, s as u8).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(text: &str) -> WeightedGraph {
        match parse_graph(text).unwrap() {
            GraphInput::Plain(g) => g,
            GraphInput::Extended(_) => panic!("expected a plain graph"),
        }
    }

    #[test]
    fn single_weighted_edge() {
        let g = plain("p msc 2 1\n1 2 5");
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge(0).weight, BigUint::from(5u32));
    }

    #[test]
    fn unit_c4_with_comments() {
        let g = plain("c a four-cycle\np msc 4 4\n1 2\n2 3\nc middle\n3 4\n4 1\n");
        assert_eq!(
            g,
            WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
        );
    }

    #[test]
    fn parallel_lines_merge() {
        let g = plain("p msc 2 2\n1 2 3\n2 1 4");
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge(0).weight, BigUint::from(7u32));
    }

    #[test]
    fn graph_errors() {
        for bad in [
            "p msc 2 1\n1 2 0",
            "p msc 2 1\n1 3",
            "p msc 2 1\n0 1",
            "p msc 2 1\n1 1",
            "p msc 2 2\n1 2",
            "p msc 2 1\n1 2 -4",
            "p graph 2 1\n1 2",
            "1 2",
            "",
            "p msc-ext 2 1\n1 2 3",
        ] {
            assert!(
                matches!(parse_graph(bad), Err(Error::Parse { .. })),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn extended_line_orientation() {
        let GraphInput::Extended(ext) = parse_graph("p msc-ext 2 1\n2 1 4 9 3").unwrap() else {
            panic!()
        };
        // Vertex 2 (index 1) carries 9, vertex 1 carries 3.
        assert_eq!(ext.stability(0, 1), &BigUint::from(9u32));
        assert_eq!(ext.stability(0, 0), &BigUint::from(3u32));
        assert_eq!(write_extended(&ext), "p msc-ext 2 1\n1 2 4 3 9\n");
    }

    #[test]
    fn single_bag_decomposition() {
        let (td, n) = parse_td("s td 1 3 3\nb 1 1 2 3\n").unwrap();
        assert_eq!(n, 3);
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn decomposition_errors() {
        for bad in [
            "b 1 1 2",
            "s td 1 2 3\nb 1 1 4",
            "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 3",
            "s td 2 2 3\nb 1 1 2",
            "s td 1 3 3\nb 1 1 2",
            "s td 1 2 3\nb 1 1 2\nb 1 2 3",
        ] {
            assert!(parse_td(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn cut_errors() {
        assert!(parse_cut("p cut 2\n1 0\n2 2").is_err());
        assert!(parse_cut("p cut 2\n1 0").is_err());
        assert!(parse_cut("p cut 2\n1 0\n1 1").is_err());
        assert_eq!(
            parse_cut("p cut 3\n3 1\n1 0\n2 1").unwrap(),
            Cut::new(vec![false, true, true])
        );
    }
}
