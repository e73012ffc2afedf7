//! `tsscpp`: counts, inverse entries, probabilities, verification suites,
//! sampling and rendering for the TSSCPP dimer model.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tsscpp::graph::{EdgeKind, TsscppGraph, VertexCoord, DEFAULT_ENUMERATION_CAP};
use tsscpp::limit_shape::{discriminant, frozen_profile, profile_csv, saddle_roots, summarize, WindowCounts};
use tsscpp::rational::format_pq;
use tsscpp::recurrence::{sum_rule_expected, BoundaryTables};
use tsscpp::registry::{boundary_methods, counters, inverse_sources};
use tsscpp::render::{render_svg, RenderOptions};
use tsscpp::sampler::{chain_seed, glauber_run, run_chains, EdgeCounts, MoveSet, RunConfig, SampleJson};
use tsscpp::statistics::{edge_probability, enumeration_frequency, marginal_csv, marginal_field, EdgeQuery};
use tsscpp::verify::{run_suite, VerifyContext};
use tsscpp::{enumerate_matchings, identities, Error};

#[derive(Parser)]
#[command(name = "tsscpp", version, about = "Exact dimer model for TSSCPPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Export G_n as JSON or DOT.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count perfect matchings of G_n.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "pfaffian")]
        method: String,
        /// Run every method and check that they agree.
        #[arg(long)]
        verify_all: bool,
    },
    /// One entry of the inverse Kasteleyn matrix, or the whole matrix.
    Inverse {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "matrix")]
        x: Option<String>,
        #[arg(long, required_unless_present = "matrix")]
        y: Option<String>,
        #[arg(long, default_value = "closed-form")]
        method: String,
        /// Compare with the exact inverse.
        #[arg(long)]
        check: bool,
        /// Print the full matrix as JSON instead.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        matrix: bool,
    },
    /// Probability of a set of disjoint edges, or every single-edge marginal.
    Prob {
        #[arg(long)]
        n: usize,
        /// Edge as `x1,x2:y1,y2`; repeat for joint probabilities.
        #[arg(long = "edge", required_unless_present = "field")]
        edges: Vec<String>,
        #[arg(long, default_value = "closed-form")]
        source: String,
        /// Compare with exhaustive enumeration.
        #[arg(long)]
        check: bool,
        /// Write the marginal field as CSV.
        #[arg(long, conflicts_with = "edges")]
        field: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite over a range of n (`a..b` or `a`).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "1..4")]
        n: String,
    },
    /// Boundary tables T, R, g^b and g as CSV.
    Tables {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "closed-form")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Glauber dynamics: sample dumps and edge frequencies.
    Sample {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        chains: u64,
        /// JSON lines, one sample every `--every` sweeps (single chain only).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        every: u64,
        /// Edge frequency CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Sample and draw the final matching as SVG.
    Render {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rotate: bool,
        #[arg(long)]
        circle: bool,
    },
    /// Frozen-region profile from sampling, or saddle roots at a point.
    LimitShape {
        #[command(flatten)]
        run: RunArgs,
        /// Window side in lattice units.
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the saddle roots at (X, Y) instead of sampling.
        #[arg(long = "x", requires = "y_coord", allow_hyphen_values = true)]
        x_coord: Option<f64>,
        #[arg(long = "y", requires = "x_coord", allow_hyphen_values = true)]
        y_coord: Option<f64>,
    },
    /// Summation identities over a range of n.
    Identities {
        #[arg(long, default_value = "0..30")]
        n: String,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: u64,
    /// Defaults to 10 n sweeps.
    #[arg(long)]
    burnin: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig { sweeps: self.sweeps, burnin: self.burnin.unwrap_or(10 * self.n as u64), seed: self.seed }
    }
}

enum Failure {
    Usage(String),
    Check(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::UnknownVertex(_)
            | Error::UnknownStrategy { .. }
            | Error::ResourceLimit(_)
            | Error::InvalidShape(_)
            | Error::SingularParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn enumeration_cap() -> usize {
    std::env::var("TSSCPP_ENUM_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

fn parse_range(s: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || Failure::Usage(format!("bad range '{s}', expected a..b or a"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let a: i64 = s.trim().parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}

fn parse_vertex(s: &str) -> Result<VertexCoord, Failure> {
    s.parse::<VertexCoord>().map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_edge(s: &str) -> Result<(VertexCoord, VertexCoord), Failure> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("edge '{s}' is not of the form x1,x2:y1,y2")))?;
    Ok((parse_vertex(a)?, parse_vertex(b)?))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_graph(n: usize, format: GraphFormat, out: Option<&Path>) -> CmdResult {
    let g = TsscppGraph::new(n)?;
    let text = match format {
        GraphFormat::Json => serde_json::to_string(&g.to_json()).map_err(Error::from)? + "\n",
        GraphFormat::Dot => g.to_dot(),
    };
    emit(out, &text)
}

fn cmd_count(n: usize, method: &str, verify_all: bool) -> CmdResult {
    let reg = counters();
    let cap = enumeration_cap();
    if !verify_all {
        let z = reg.get(method)?.count(n, cap)?;
        println!("{z} {method}");
        return Ok(());
    }
    let mut values = Vec::new();
    for c in reg.iter() {
        let z = c.count(n, cap)?;
        println!("{} {z}", c.name());
        values.push(z);
    }
    if values.windows(2).all(|w| w[0] == w[1]) {
        println!("agree");
        Ok(())
    } else {
        Err(Failure::Check("count methods disagree".into()))
    }
}

fn cmd_inverse(n: usize, x: Option<&str>, y: Option<&str>, method: &str, check: bool, matrix: bool) -> CmdResult {
    let g = TsscppGraph::new(n)?;
    if matrix {
        let k = tsscpp::kasteleyn_matrix(&g);
        let json = serde_json::to_string(&tsscpp::invert(&k)?.to_json()).map_err(Error::from)?;
        println!("{json}");
        return Ok(());
    }
    let (x, y) = (parse_vertex(x.unwrap_or_default())?, parse_vertex(y.unwrap_or_default())?);
    let sources = inverse_sources();
    let value = sources.get(method)?.prepare(&g)?.entry(x, y)?;
    println!("{}", format_pq(&value));
    if check {
        let exact = sources.get("exact-inverse")?.prepare(&g)?.entry(x, y)?;
        let same = exact == value;
        println!("exact-inverse {} {}", format_pq(&exact), if same { "equal" } else { "DIFFERENT" });
        if !same {
            return Err(Failure::Check("closed form and exact inverse differ".into()));
        }
    }
    Ok(())
}

fn cmd_prob(n: usize, edges: &[String], source: &str, check: bool, field: bool, out: Option<&Path>) -> CmdResult {
    let g = TsscppGraph::new(n)?;
    let kernel = inverse_sources().get(source)?.prepare(&g)?;
    if field {
        let f = marginal_field(&g, kernel.as_ref())?;
        return emit(out, &marginal_csv(&g, &f));
    }
    let pairs = edges.iter().map(|e| parse_edge(e)).collect::<Result<Vec<_>, _>>()?;
    let q = EdgeQuery::new(&g, pairs)?;
    let p = edge_probability(&g, kernel.as_ref(), &q)?;
    println!("{}", format_pq(&p));
    if check {
        let all = enumerate_matchings(&g, enumeration_cap())?;
        let f = enumeration_frequency(&g, &all, &q)?;
        let same = f == p;
        println!("enumeration {} {}", format_pq(&f), if same { "equal" } else { "DIFFERENT" });
        if !same {
            return Err(Failure::Check("probability differs from enumeration".into()));
        }
    }
    Ok(())
}

fn cmd_verify(suite: &str, n: &str) -> CmdResult {
    let ns = parse_range(n)?;
    let ctx = VerifyContext { enumeration_cap: enumeration_cap() };
    let outcomes = run_suite(suite, ns, &ctx)?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} checks failed")))
    }
}

fn cmd_tables(n: usize, method: &str, out: Option<&Path>) -> CmdResult {
    let t: BoundaryTables = boundary_methods().get(method)?.tables(n)?;
    emit(out, &t.to_csv())
}

fn cmd_sample(run: &RunArgs, chains: u64, out: Option<&Path>, every: u64, stats: Option<&Path>) -> CmdResult {
    let g = TsscppGraph::new(run.n)?;
    let moves = MoveSet::build(&g);
    let cfg = run.config();
    if chains == 0 {
        return Err(Failure::Usage("--chains must be at least 1".into()));
    }
    if chains > 1 && out.is_some() {
        return Err(Failure::Usage("sample dumps need a single chain".into()));
    }
    let counts = if chains == 1 {
        let mut counts = EdgeCounts::new(&g);
        let mut lines = String::new();
        let every = every.max(1);
        let cfg0 = RunConfig { seed: chain_seed(cfg.seed, 0), ..cfg };
        let last = glauber_run(&g, &moves, cfg0, |s, m| {
            counts.record(&g, m);
            if s % every == 0 {
                lines.push_str(&serde_json::to_string(&SampleJson::new(&g, s, m)).expect("serializable"));
                lines.push('\n');
            }
        })?;
        if cfg.sweeps == 0 {
            lines.push_str(&serde_json::to_string(&SampleJson::new(&g, 0, &last)).map_err(Error::from)?);
            lines.push('\n');
        }
        if let Some(p) = out {
            emit(Some(p), &lines)?;
        }
        counts
    } else {
        run_chains(&g, &moves, cfg, chains)?
    };
    if let Some(p) = stats {
        emit(Some(p), &counts.to_csv(&g))?;
    }
    println!(
        "n={} moves={} chains={chains} sweeps={} burnin={} samples={}",
        run.n,
        moves.len(),
        cfg.sweeps,
        cfg.burnin,
        counts.samples
    );
    Ok(())
}

fn cmd_render(run: &RunArgs, out: &Path, rotate: bool, circle: bool) -> CmdResult {
    let g = TsscppGraph::new(run.n)?;
    let moves = MoveSet::build(&g);
    let cfg = run.config();
    let cfg0 = RunConfig { seed: chain_seed(cfg.seed, 0), ..cfg };
    let last = glauber_run(&g, &moves, cfg0, |_, _| {})?;
    let svg = render_svg(&g, &last, RenderOptions { rotate, circle });
    emit(Some(out), &svg)?;
    let mut by_kind = [0usize; 3];
    for (a, b) in last.edges() {
        let k = EdgeKind::of(g.vertex(a), g.vertex(b)).expect("edge");
        by_kind[tsscpp::limit_shape::orientation_class(k)] += 1;
    }
    println!(
        "wrote {} ({} dimers: {} horizontal, {} vertical, {} diagonal)",
        out.display(),
        by_kind.iter().sum::<usize>(),
        by_kind[0],
        by_kind[1],
        by_kind[2]
    );
    Ok(())
}

fn cmd_limit_shape(run: &RunArgs, window: usize, out: Option<&Path>, point: Option<(f64, f64)>) -> CmdResult {
    if let Some((x, y)) = point {
        let (a, b) = saddle_roots(x, y)?;
        println!("discriminant {:.12}", discriminant(x, y));
        println!("root+ {:.12} {:+.12}i", a.re, a.im);
        println!("root- {:.12} {:+.12}i", b.re, b.im);
        return Ok(());
    }
    let g = TsscppGraph::new(run.n)?;
    let moves = MoveSet::build(&g);
    let mut counts = WindowCounts::new(run.n, window)?;
    let cfg = run.config();
    let cfg0 = RunConfig { seed: chain_seed(cfg.seed, 0), ..cfg };
    glauber_run(&g, &moves, cfg0, |_, m| counts.record(&g, m))?;
    let profile = frozen_profile(&counts)?;
    if let Some(p) = out {
        emit(Some(p), &profile_csv(&profile))?;
    }
    let s = summarize(&profile, 4.6, 3.4);
    println!(
        "outer windows {} frozen {:.3}; inner windows {} unfrozen {:.3}",
        s.outer_windows, s.outer_frozen_fraction, s.inner_windows, s.inner_liquid_fraction
    );
    Ok(())
}

fn cmd_identities(n: &str) -> CmdResult {
    let ns = parse_range(n)?;
    let mut failed = 0;
    for n in ns.clone() {
        if n < 0 {
            return Err(Failure::Usage("n must be non-negative".into()));
        }
        let sf = identities::identity_sum_f(n);
        let fails = identities::run_identity_suite(n..=n);
        let expect = if n >= 1 { format_pq(&sum_rule_expected(n as usize)) } else { "-".into() };
        println!(
            "n={n} sum_f={} sum_rule={expect} {}",
            format_pq(&sf),
            if fails.is_empty() { "PASS".to_string() } else { format!("FAIL {}", fails.join("; ")) }
        );
        failed += fails.len();
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} identity instances failed")))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Graph { n, format, out } => cmd_graph(n, format, out.as_deref()),
        Command::Count { n, method, verify_all } => cmd_count(n, &method, verify_all),
        Command::Inverse { n, x, y, method, check, matrix } => {
            cmd_inverse(n, x.as_deref(), y.as_deref(), &method, check, matrix)
        }
        Command::Prob { n, edges, source, check, field, out } => {
            cmd_prob(n, &edges, &source, check, field, out.as_deref())
        }
        Command::Verify { suite, n } => cmd_verify(&suite, &n),
        Command::Tables { n, method, out } => cmd_tables(n, &method, out.as_deref()),
        Command::Sample { run, chains, out, every, stats } => {
            cmd_sample(&run, chains, out.as_deref(), every, stats.as_deref())
        }
        Command::Render { run, out, rotate, circle } => cmd_render(&run, &out, rotate, circle),
        Command::LimitShape { run, window, out, x_coord, y_coord } => {
            cmd_limit_shape(&run, window, out.as_deref(), x_coord.zip(y_coord))
        }
        Command::Identities { n } => cmd_identities(&n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli);
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert!(matches!(parse_range("1..8"), Ok(r) if r == (1..=8)));
        assert!(matches!(parse_range("3"), Ok(r) if r == (3..=3)));
        assert!(matches!(parse_range("1..=2"), Ok(r) if r == (1..=2)));
        assert!(parse_range("5..1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn edges() {
        let (a, b) = parse_edge("0,0:0,1").ok().unwrap();
        assert_eq!((a, b), (VertexCoord::new(0, 0), VertexCoord::new(0, 1)));
        assert!(parse_edge("0,0").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
