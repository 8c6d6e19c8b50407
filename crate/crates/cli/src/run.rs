use std::fmt::{Display, Write};
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::One;

use stablecut::approx::{is_rho_stable, solve_approx, solve_rounded, ExtendedInstance, Rational};
use stablecut::error::{Error, ErrorKind};
use stablecut::exact::{solve_degree, solve_pseudo};
use stablecut::graph::{evaluate_cut, Cut, Weight, WeightedGraph};
use stablecut::oracle::{
    brute_min_stable_cut_limited, local_search, price_of_anarchy_dp, price_of_anarchy_limited,
    Pivot,
};
use stablecut::reductions::{
    maxcut_to_unweighted, mcis_to_unweighted, partition_to_k2n, partition_to_tree,
    setsplitting_to_stablecut, McisInstance, PartitionInstance, ReductionArtifact, Role,
    SetSplittingInstance, Source,
};
use stablecut::treedec::{heuristic_decompose, make_nice, Strategy, TreeDecomposition};

use crate::config::{Algorithm, Command, Family, Heuristic, OutputFormat, RunConfig};
use crate::format::{parse_cut, parse_graph, parse_td, write_graph, write_td, GraphInput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Error },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let kind = match self {
            CliError::Core(e) | CliError::InFile { source: e, .. } => e.kind(),
            CliError::Io { .. } | CliError::Usage(_) => ErrorKind::Input,
        };
        match kind {
            ErrorKind::Input => 2,
            ErrorKind::Resource => 3,
            ErrorKind::Internal => 4,
        }
    }
}

/// What a command printed and the status it exits with (0, or 1 when
/// `verify` finds an unstable vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Report::new(config.format);
    let mut code = 0;
    match &config.command {
        Command::Solve { graph } => solve(config, graph, &mut out)?,
        Command::Verify { graph, cut } => {
            if !verify(graph, cut, &mut out)? {
                code = 1;
            }
        }
        Command::Generate {
            family,
            out: prefix,
        } => generate(family, prefix.as_deref(), &mut out)?,
        Command::Decompose { graph, heuristic } => {
            let g = load_graph(graph)?;
            let td = heuristic_decompose(g.graph(), strategy(*heuristic));
            out.raw(&write_td(&td, g.graph().vertex_count()));
        }
        Command::Poa { graph } => poa(config, graph, &mut out)?,
    }
    Ok(Outcome {
        report: out.finish(),
        code,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|source| CliError::Io { path, source })
}

fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, CliError> {
    r.map_err(|source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<GraphInput, CliError> {
    in_file(path, parse_graph(&read(path)?))
}

fn strategy(h: Heuristic) -> Strategy {
    match h {
        Heuristic::MinFill => Strategy::MinFill,
        Heuristic::MinDegree => Strategy::MinDegree,
    }
}

/// The `--td` file when given, otherwise a min-fill decomposition.
fn decomposition(config: &RunConfig, g: &WeightedGraph) -> Result<TreeDecomposition, CliError> {
    let Some(path) = &config.td else {
        return Ok(heuristic_decompose(g, Strategy::MinFill));
    };
    let (td, n) = in_file(path, parse_td(&read(path)?))?;
    if n != g.vertex_count() {
        return Err(CliError::Usage(format!(
            "{}: decomposition is for {n} vertices, graph has {}",
            path.display(),
            g.vertex_count()
        )));
    }
    Ok(td)
}

fn solve(config: &RunConfig, path: &Path, out: &mut Report) -> Result<(), CliError> {
    let input = load_graph(path)?;
    let g = input.graph();
    out.field("command", "solve");
    out.field("algorithm", alg_name(config.alg));
    out.field("vertices", g.vertex_count());
    out.field("edges", g.edge_count());
    if let GraphInput::Extended(ext) = &input {
        if config.alg != Algorithm::Approx {
            return Err(CliError::Usage(
                "extended instances are solved only with --alg approx".into(),
            ));
        }
        return solve_extended(config, ext, out);
    }
    let cut = match config.alg {
        Algorithm::Brute => brute_min_stable_cut_limited(g, config.limit)?.cut,
        Algorithm::LocalSearch => {
            let start = Cut::all_zero(g.vertex_count());
            let r = local_search(g, &start, Pivot::FirstImprovement, config.seed)?;
            out.field("seed", config.seed);
            out.field("flips", r.flips);
            r.cut
        }
        Algorithm::DpDegree => {
            let td = decomposition(config, g)?;
            out.field("width", td.width());
            solve_degree(g, &td)?.cut
        }
        Algorithm::DpPseudo => {
            let td = decomposition(config, g)?;
            out.field("width", td.width());
            solve_pseudo(g, &make_nice(&td)?)?.cut
        }
        Algorithm::Approx => {
            let eps = config.epsilon()?;
            let td = decomposition(config, g)?;
            out.field("width", td.width());
            out.field("eps", ratio(&eps));
            let r = solve_approx(g, &make_nice(&td)?, &eps)?;
            out.field("fallback", r.used_fallback);
            r.cut
        }
    };
    stability_report(g, &cut, out)?;
    Ok(())
}

fn solve_extended(
    config: &RunConfig,
    ext: &ExtendedInstance,
    out: &mut Report,
) -> Result<(), CliError> {
    let g = ext.graph();
    let eps = config.epsilon()?;
    let td = decomposition(config, g)?;
    out.field("width", td.width());
    out.field("eps", ratio(&eps));
    let r = solve_rounded(ext, &make_nice(&td)?, &eps)?;
    let two: Rational = Rational::from_integer(BigUint::from(2u32));
    let rho = Rational::one() + &two * &eps;
    let cross = ext.crossing_stability(&r.cut)?;
    out.field("weight", &r.weight);
    out.field("rho", ratio(&rho));
    out.field("rho_stable", is_rho_stable(ext, &r.cut, &rho)?);
    out.assignment(
        "vertex side crossing_s degree_s rho_stable",
        (0..g.vertex_count()).map(|v| {
            let ok = (&cross[v] * rho.numer()) << 1u32 >= rho.denom() * ext.stability_degree(v);
            Row {
                side: r.cut.side_bit(v),
                crossing: cross[v].clone(),
                degree: ext.stability_degree(v).clone(),
                stable: ok,
            }
        }),
    );
    Ok(())
}

/// Weight, overall stability, offending vertices and the assignment block.
/// Returns whether the cut is stable.
fn stability_report(g: &WeightedGraph, cut: &Cut, out: &mut Report) -> Result<bool, CliError> {
    let rep = evaluate_cut(g, cut)?;
    out.field("weight", &rep.cut_weight);
    out.field("stable", rep.stable);
    let bad = rep.unstable_vertices();
    out.field("unstable", id_list(&bad));
    out.assignment(
        "vertex side crossing degree stable",
        rep.vertices.iter().enumerate().map(|(v, s)| Row {
            side: cut.side_bit(v),
            crossing: s.cut_weight.clone(),
            degree: s.weighted_degree.clone(),
            stable: s.stable,
        }),
    );
    Ok(rep.stable)
}

fn verify(graph: &Path, cut: &Path, out: &mut Report) -> Result<bool, CliError> {
    let input = load_graph(graph)?;
    let c = in_file(cut, parse_cut(&read(cut)?))?;
    out.field("command", "verify");
    stability_report(input.graph(), &c, out)
}

fn poa(config: &RunConfig, path: &Path, out: &mut Report) -> Result<(), CliError> {
    let input = load_graph(path)?;
    let g = input.graph();
    let rep = match config.alg {
        Algorithm::Brute => price_of_anarchy_limited(g, config.limit)?,
        Algorithm::DpPseudo => {
            let td = decomposition(config, g)?;
            price_of_anarchy_dp(g, &make_nice(&td)?)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "poa supports --alg brute or dp-pseudo, not {}",
                alg_name(other)
            )))
        }
    };
    out.field("command", "poa");
    out.field("algorithm", alg_name(config.alg));
    out.field("max_cut", &rep.max_cut);
    out.field("min_stable_cut", &rep.min_stable_cut);
    out.field("ratio", ratio(&rep.ratio));
    Ok(())
}

fn generate(family: &Family, prefix: Option<&Path>, out: &mut Report) -> Result<(), CliError> {
    let art = build(family)?;
    let n = art.graph.vertex_count();
    let graph = write_graph(&art.graph);
    let td = write_td(&art.companion_pd, n);
    let side = sidecar(&art);
    out.field("command", "generate");
    out.field("family", art.source.family());
    out.field("threshold", &art.threshold);
    out.field("vertices", n);
    out.field("edges", art.graph.edge_count());
    out.field("width", art.companion_pd.width());
    match prefix {
        Some(p) => {
            let files = [("msc", &graph), ("td", &td), ("sidecar", &side)];
            for (ext, text) in files {
                let mut name = p.as_os_str().to_owned();
                name.push(format!(".{ext}"));
                let path = PathBuf::from(name);
                write(path.clone(), text)?;
                out.field(ext, path.display());
            }
        }
        None => {
            out.block("graph", &graph);
            out.block("decomposition", &td);
            out.block("sidecar", &side);
        }
    }
    Ok(())
}

fn build(family: &Family) -> Result<ReductionArtifact, CliError> {
    Ok(match family {
        Family::PartitionTree(values) => {
            partition_to_tree(&PartitionInstance::new(values.clone())?)?
        }
        Family::PartitionK2n(values) => partition_to_k2n(&PartitionInstance::new(values.clone())?)?,
        Family::MaxCut { graph, k } => {
            let g = load_graph(graph)?;
            maxcut_to_unweighted(g.graph(), *k)?
        }
        Family::SetSplitting {
            elements,
            sets,
            delta,
        } => {
            setsplitting_to_stablecut(&SetSplittingInstance::new(*elements, sets.clone())?, *delta)?
        }
        Family::Mcis {
            classes,
            size,
            edges,
            heavy,
        } => mcis_to_unweighted(&McisInstance::new(*classes, *size, edges.clone())?, *heavy)?,
    })
}

/// Source instance, threshold, construction constants and the role of every
/// target vertex. All indices are 1-based.
fn sidecar(art: &ReductionArtifact) -> String {
    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };
    line(format!("family {}", art.source.family()));
    line(format!("threshold {}", art.threshold));
    match &art.source {
        Source::PartitionTree(p) | Source::PartitionK2n(p) => {
            line(format!("source values {}", join(p.values())));
        }
        Source::MaxCut { graph, k } => {
            line(format!("source k {k}"));
            for e in graph.edges() {
                line(format!("source edge {} {}", e.u + 1, e.v + 1));
            }
        }
        Source::SetSplitting { instance, delta } => {
            line(format!("source elements {}", instance.elements()));
            line(format!("source delta {delta}"));
            for set in instance.sets() {
                line(format!("source set {}", join(set.iter().map(|x| x + 1))));
            }
        }
        Source::Mcis { instance, heavy } => {
            line(format!("source classes {}", instance.classes()));
            line(format!("source size {}", instance.size()));
            line(format!("source heavy {heavy}"));
            for ((a, x), (b, y)) in instance.edges() {
                line(format!(
                    "source edge {}:{} {}:{}",
                    a + 1,
                    x + 1,
                    b + 1,
                    y + 1
                ));
            }
        }
    }
    for (k, v) in &art.metadata {
        line(format!("meta {k} {v}"));
    }
    line("begin roles".into());
    for (v, r) in art.roles.iter().enumerate() {
        line(format!("{} {}", v + 1, role_fields(r)));
    }
    line("end roles".into());
    s
}

fn role_fields(r: &Role) -> String {
    let tail = match *r {
        Role::Center => String::new(),
        Role::Hub(i) | Role::Item(i) | Role::Original(i) | Role::Subdivision(i) => {
            format!(" {}", i + 1)
        }
        Role::Checker(i) | Role::Palette(i) => format!(" {}", i + 1),
        Role::Element { element, column } => format!(" {} column {}", element + 1, column + 1),
        Role::Propagator { group, column } => format!(" group {} column {}", group + 1, column + 1),
        Role::Selector {
            class,
            column,
            position,
        } => format!(
            " class {} column {} position {}",
            class + 1,
            column + 1,
            position + 1
        ),
        Role::CheckerHub { column, part } | Role::CheckerSet { column, part } => {
            format!(" column {} part {}", column + 1, part + 1)
        }
        Role::CheckerGate { column, gate } => format!(" column {} gate {gate}", column + 1),
        Role::HeavyInternal { ends: (a, b) } => format!(" {} {}", a + 1, b + 1),
        Role::Leaf { of } => format!(" {}", of + 1),
    };
    format!("{}{tail}", r.tag())
}

fn join<T: Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn id_list(vs: &[usize]) -> String {
    if vs.is_empty() {
        "none".into()
    } else {
        join(vs.iter().map(|v| v + 1))
    }
}

fn ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn alg_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Brute => "brute",
        Algorithm::DpPseudo => "dp-pseudo",
        Algorithm::DpDegree => "dp-degree",
        Algorithm::Approx => "approx",
        Algorithm::LocalSearch => "local-search",
    }
}

struct Row {
    side: u8,
    crossing: Weight,
    degree: Weight,
    stable: bool,
}

/// Structured output is `key value` lines and `begin`/`end` blocks; text
/// output aligns keys and prints a table.
struct Report {
    format: OutputFormat,
    buf: String,
}

impl Report {
    fn new(format: OutputFormat) -> Self {
        Report {
            format,
            buf: String::new(),
        }
    }

    fn field(&mut self, key: &str, value: impl Display) {
        match self.format {
            OutputFormat::Structured => writeln!(self.buf, "{key} {value}"),
            OutputFormat::Text => writeln!(self.buf, "{:<16}{value}", format!("{key}:")),
        }
        .unwrap();
    }

    fn raw(&mut self, text: &str) {
        self.buf.push_str(text);
    }

    fn block(&mut self, name: &str, body: &str) {
        match self.format {
            OutputFormat::Structured => writeln!(self.buf, "begin {name}\n{body}end {name}"),
            OutputFormat::Text => writeln!(self.buf, "\n[{name}]\n{body}"),
        }
        .unwrap();
    }

    fn assignment(&mut self, header: &str, rows: impl Iterator<Item = Row>) {
        let mut body = String::new();
        for (v, r) in rows.enumerate() {
            match self.format {
                OutputFormat::Structured => writeln!(
                    body,
                    "{} {} {} {} {}",
                    v + 1,
                    r.side,
                    r.crossing,
                    r.degree,
                    r.stable as u8
                ),
                OutputFormat::Text => writeln!(
                    body,
                    "{:>6} {:>4} {:>12} {:>12} {:>6}",
                    v + 1,
                    r.side,
                    r.crossing,
                    r.degree,
                    if r.stable { "yes" } else { "NO" }
                ),
            }
            .unwrap();
        }
        match self.format {
            OutputFormat::Structured => {
                writeln!(self.buf, "columns {header}").unwrap();
                self.block("assignment", &body);
            }
            OutputFormat::Text => {
                let cols: Vec<&str> = header.split(' ').collect();
                writeln!(
                    self.buf,
                    "\n{:>6} {:>4} {:>12} {:>12} {:>6}",
                    cols[0], cols[1], cols[2], cols[3], "ok"
                )
                .unwrap();
                self.buf.push_str(&body);
            }
        }
    }

    fn finish(self) -> String {
        self.buf
    }
}
