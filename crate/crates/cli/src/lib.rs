//! `ksctx` command line: argument parsing and the text each subcommand prints.
//!
//! Everything goes to the supplied writers so the whole front end can be
//! driven from tests. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ksctx::enumeration::{self, Assignment};
use ksctx::ks::{self, Hypergraph};
use ksctx::metrics::{self, TargetMode};
use ksctx::polytope::{self, Coordinate, HalfSpace};
use ksctx::rational::{fmt_both, fmt_decimal, fmt_fraction, int, parse_rational, ratio, Rational};
use ksctx::simulate::{self, StreamSpec};
use ksctx::{Error, Scenario};

pub const SEED_ENV: &str = "KSCTX_SEED";

#[derive(Debug, Parser)]
#[command(name = "ksctx", version, about = "Exact contextuality bookkeeping for CHSH and Kochen-Specker configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Table,
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Scenario file; the built-in CHSH scenario when absent.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Projection {
    /// (E(x_y), E(y_x), E(x_y y_x)) per context.
    #[default]
    Context,
    /// All joint expectations.
    Joints,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every contextual assignment with joint values, noncontextual flag and functional value.
    Enumerate {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Facets of the correlation polytope.
    Facets {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long, value_enum, default_value_t)]
        projection: Projection,
        /// Only use noncontextual assignments as vertices.
        #[arg(long)]
        noncontextual: bool,
        /// Print the vertex list as well.
        #[arg(long)]
        vertices: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Maximum functional value without and with contextuality.
    Bounds {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
    /// Minimal contextual weight needed to reach a functional value.
    Fraction {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Target value as `n/d`, a decimal, or `tsirelson`.
        #[arg(long)]
        lambda: String,
        /// Rational used for `tsirelson`.
        #[arg(long, default_value = "707/250")]
        tsirelson_approx: String,
        /// Require the expected value to reach the target instead of equal it.
        #[arg(long)]
        at_least: bool,
    },
    /// Seeded stream of assignments and its empirical functional value.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
        k: Option<usize>,
        /// Target value; picks the contextual count by rounding.
        #[arg(long)]
        lambda: Option<String>,
        /// Defaults to $KSCTX_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Two-valued states of a hypergraph file.
    Ks {
        #[arg(long)]
        file: PathBuf,
        /// Stop after this many states.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Reproduce every headline number in one go.
    Report {
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_env(args, std::env::var(SEED_ENV).ok(), out, err)
}

/// As [`run`], with the seed environment value passed explicitly.
pub fn run_with_env<I, T>(args: I, env_seed: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli.command, env_seed) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn dispatch(cmd: Command, env_seed: Option<String>) -> CmdResult {
    match cmd {
        Command::Enumerate { scenario, format } => enumerate_cmd(&load_scenario(&scenario)?, format),
        Command::Facets { scenario, projection, noncontextual, vertices, format } => {
            facets_cmd(&load_scenario(&scenario)?, projection, noncontextual, vertices, format)
        }
        Command::Bounds { scenario } => bounds_cmd(&load_scenario(&scenario)?),
        Command::Fraction { scenario, lambda, tsirelson_approx, at_least } => {
            fraction_cmd(&load_scenario(&scenario)?, &lambda, &tsirelson_approx, at_least)
        }
        Command::Simulate { scenario, n, k, lambda, seed, format } => {
            let seed = resolve_seed(seed, env_seed)?;
            simulate_cmd(&load_scenario(&scenario)?, n, k, lambda.as_deref(), seed, format)
        }
        Command::Ks { file, limit } => ks_cmd(&file, limit),
        Command::Report { seed } => report_cmd(resolve_seed(seed, env_seed)?),
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<String>) -> Result<u64, Failure> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v} is not an unsigned 64-bit integer"))),
        (None, None) => Ok(0),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_scenario(arg: &ScenarioArg) -> Result<Scenario, Failure> {
    match &arg.scenario {
        None => Ok(Scenario::builtin_chsh()),
        Some(path) => Ok(Scenario::parse(&read(path)?)?),
    }
}

fn parse_lambda(text: &str, tsirelson_approx: &str) -> Result<(Rational, bool), Failure> {
    if text.eq_ignore_ascii_case("tsirelson") {
        let r = parse_rational(tsirelson_approx).map_err(|e| Failure::Usage(e.to_string()))?;
        Ok((r, true))
    } else {
        let r = parse_rational(text).map_err(|e| Failure::Usage(e.to_string()))?;
        Ok((r, false))
    }
}

fn enumerate_cmd(s: &Scenario, format: Format) -> CmdResult {
    match format {
        Format::Csv => Ok(enumeration::assignments_csv(s)?),
        Format::Table => {
            let mut header = s.variable_names();
            header.extend((0..s.contexts().len()).map(|k| s.joint_name(k)));
            header.push("nc".into());
            header.push("f".into());
            let widths: Vec<usize> = header.iter().map(|h| h.len().max(2)).collect();
            let mut out = String::new();
            let cells: Vec<String> = header.iter().zip(&widths).map(|(h, w)| format!("{h:>w$}")).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
            for a in enumeration::enumerate_assignments(s)? {
                let row = enumeration::expectation_row(s, &a)?;
                let mut values: Vec<String> = row
                    .flat()
                    .iter()
                    .map(|&v| if v > 0 { "+1".to_string() } else { "-1".to_string() })
                    .collect();
                values.push(if enumeration::is_noncontextual(s, &a) { "y" } else { "n" }.into());
                values.push(enumeration::functional_value(s, &a)?.to_string());
                let cells: Vec<String> = values.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
            Ok(out)
        }
    }
}

/// `-1 <= +E(a_b) -E(b_a) -E(a_b*b_a)` style rendering of `n.x <= b`.
fn inequality_text(s: &Scenario, coords: &[Coordinate], f: &HalfSpace) -> String {
    let mut terms = Vec::new();
    for (c, coeff) in coords.iter().zip(f.normal().components()) {
        if coeff == &int(0) {
            continue;
        }
        // written as lower bound: -b <= -n.x
        let neg = -coeff;
        let name = polytope::coordinate_name(s, *c);
        let sign = if neg > int(0) { "+" } else { "-" };
        let mag = if neg == int(1) || neg == int(-1) {
            String::new()
        } else {
            fmt_fraction(&if neg < int(0) { -neg.clone() } else { neg.clone() })
        };
        terms.push(format!("{sign}{mag}E({name})"));
    }
    format!("{} <= {}", fmt_fraction(&-f.offset().clone()), terms.join(" "))
}

fn facets_cmd(s: &Scenario, projection: Projection, noncontextual: bool, show_vertices: bool, format: Format) -> CmdResult {
    let groups: Vec<(String, Vec<Coordinate>)> = match projection {
        Projection::Context => (0..s.contexts().len())
            .map(|k| {
                let c = s.contexts()[k];
                (format!("context {} {}", s.label(c.left), s.label(c.right)), polytope::context_triple(s, k))
            })
            .collect(),
        Projection::Joints => vec![("joints".to_string(), polytope::joint_projection(s))],
    };
    let mut out = String::new();
    for (title, coords) in groups {
        let verts = polytope::correlation_vertices_where(s, &coords, |a| {
            !noncontextual || enumeration::is_noncontextual(s, a)
        })?;
        let facets = polytope::facets_from_vertices(&verts)?;
        let names: Vec<String> = coords.iter().map(|c| polytope::coordinate_name(s, *c)).collect();
        let _ = writeln!(out, "# {title}: coordinates {}", names.join(" "));
        match format {
            Format::Csv => out.push_str(&polytope::write_h_representation(&facets)),
            Format::Table => {
                for f in &facets {
                    let _ = writeln!(out, "{}", inequality_text(s, &coords, f));
                }
            }
        }
        if show_vertices {
            out.push_str(&polytope::write_v_representation(&verts));
        }
    }
    Ok(out)
}

fn bounds_cmd(s: &Scenario) -> CmdResult {
    let classical = polytope::maximize_functional(s, true)?;
    let algebraic = polytope::maximize_functional(s, false)?;
    Ok(format!("classical={classical} algebraic={algebraic}\n"))
}

fn fraction_cmd(s: &Scenario, lambda: &str, approx: &str, at_least: bool) -> CmdResult {
    let (target, symbolic) = parse_lambda(lambda, approx)?;
    let mode = if at_least { TargetMode::AtLeast } else { TargetMode::Exact };
    let report = metrics::min_contextual_fraction_with(s, &target, mode)?;
    let mut out = report.to_key_values();
    if *s == Scenario::builtin_chsh() && mode == TargetMode::Exact {
        let _ = writeln!(out, "closed_form={}", fmt_both(&metrics::fraction_closed_form(&target)));
    }
    if symbolic {
        let _ = writeln!(
            out,
            "symbolic_fraction={} (closed form √2−1)",
            metrics::tsirelson_fraction_decimal()
        );
        let _ = writeln!(out, "symbolic_ratio={}", metrics::TSIRELSON_RATIO_SYMBOLIC);
    }
    Ok(out)
}

fn simulate_cmd(s: &Scenario, n: usize, k: Option<usize>, lambda: Option<&str>, seed: u64, format: Format) -> CmdResult {
    let stream = match (k, lambda) {
        (Some(k), _) => simulate::generate_stream(s, StreamSpec { n_total: n, n_contextual: k, seed })?,
        (None, Some(l)) => {
            let (target, _) = parse_lambda(l, "707/250")?;
            simulate::stream_for_lambda(s, &target, n, seed)?
        }
        (None, None) => return Err(Failure::Usage("either --k or --lambda is required".into())),
    };
    let value = simulate::empirical_functional(s, &stream)?;
    let mut out = match format {
        Format::Csv => stream.to_csv(s),
        Format::Table => {
            let mut t = String::new();
            for (i, a) in stream.entries.iter().enumerate() {
                let mark = if enumeration::contextuality_count(s, a) > 0 { "*" } else { " " };
                let _ = writeln!(t, "{:>4} {} {mark}", i + 1, enumeration::format_values(a));
            }
            t
        }
    };
    let _ = writeln!(
        out,
        "# n={} k={} seed={}",
        stream.spec.n_total, stream.spec.n_contextual, stream.spec.seed
    );
    let _ = writeln!(out, "empirical_exact={}", fmt_fraction(&value));
    let _ = writeln!(out, "empirical={}", fmt_decimal(&value, 12));
    Ok(out)
}

fn ks_summary(hg: &Hypergraph, limit: Option<usize>) -> Result<String, Failure> {
    let states = ks::enumerate_two_valued_states(hg, limit)?;
    let mut out = ks::summary(hg, &states)?;
    if states.exhaustive {
        let st = metrics::ks_fraction_statement(states.states.len());
        if st.undetermined {
            let _ = writeln!(out, "per_quantum_fraction=undetermined");
        } else {
            let _ = writeln!(out, "per_quantum_fraction={}", fmt_fraction(&st.fraction));
        }
    }
    Ok(out)
}

fn ks_cmd(file: &Path, limit: Option<usize>) -> CmdResult {
    let hg = Hypergraph::parse(&read(file)?)?;
    ks_summary(&hg, limit)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn report_cmd(seed: u64) -> CmdResult {
    let s = Scenario::builtin_chsh();
    let mut out = String::new();
    let all = enumeration::enumerate_assignments(&s)?;
    let nc: Vec<&Assignment> = all.iter().filter(|a| enumeration::is_noncontextual(&s, a)).collect();

    let _ = writeln!(out, "# enumeration");
    let _ = writeln!(out, "assignments={}", all.len());
    let _ = writeln!(out, "noncontextual={}", nc.len());

    let _ = writeln!(out, "# bounds");
    out.push_str(&bounds_cmd(&s)?);

    let _ = writeln!(out, "# maximal-violation assignments");
    let families = simulate::Families::for_scenario(&s)?;
    let rows = families.contextual.iter().chain(&families.noncontextual);
    for (i, a) in rows.enumerate() {
        let _ = writeln!(
            out,
            "row{}={} functional={} contextual_observables={}",
            i + 1,
            enumeration::format_values(a),
            enumeration::functional_value(&s, a)?,
            enumeration::contextuality_count(&s, a)
        );
    }

    let _ = writeln!(out, "# functional values");
    let mut values: Vec<i64> = all.iter().map(|a| enumeration::functional_value(&s, a)).collect::<Result<_, _>>()?;
    values.sort();
    values.dedup();
    let mut nc_values: Vec<i64> = nc.iter().map(|a| enumeration::functional_value(&s, a)).collect::<Result<_, _>>()?;
    nc_values.sort();
    nc_values.dedup();
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "all_values={}", join(&values));
    let _ = writeln!(out, "noncontextual_values={}", join(&nc_values));

    let _ = writeln!(out, "# single-context polytope");
    let triple = polytope::context_triple(&s, 0);
    let verts = polytope::correlation_vertices(&s, &triple)?;
    let facets = polytope::facets_from_vertices(&verts)?;
    for f in &facets {
        let _ = writeln!(out, "facet={}", inequality_text(&s, &triple, f));
    }
    // with both singles at zero each facet bounds the joint alone
    let (mut lower, mut upper): (Option<Rational>, Option<Rational>) = (None, None);
    for f in &facets {
        let c = &f.normal().components()[2];
        let bound = f.offset() / c;
        if *c > int(0) {
            upper = Some(upper.map_or(bound.clone(), |u| u.min(bound.clone())));
        } else if *c < int(0) {
            lower = Some(lower.map_or(bound.clone(), |l| l.max(bound.clone())));
        }
    }
    let joint = s.joint_name(0);
    let show = |b: Option<Rational>| b.map_or("unbounded".to_string(), |b| fmt_fraction(&b));
    let _ = writeln!(out, "at_zero_singles={} <= E({joint}) <= {}", show(lower), show(upper));
    let back = polytope::vertices_from_facets(&facets)?;
    let _ = writeln!(out, "roundtrip_single_context={}", status(back == verts));
    let mut cube = Vec::new();
    for i in 0..3 {
        for sgn in [1, -1] {
            let mut n = [0i64; 3];
            n[i] = sgn;
            cube.push(HalfSpace::from_ints(&n, 1));
        }
    }
    cube.sort();
    let cube_vertices = polytope::vertices_from_facets(&cube)?;
    let cube_ok = cube_vertices.len() == 8 && polytope::facets_from_vertices(&cube_vertices)? == cube;
    let _ = writeln!(out, "roundtrip_cube={}", status(cube_ok));

    let _ = writeln!(out, "# contextuality fraction");
    for (n, d) in [(2, 1), (9, 4), (5, 2), (11, 4), (3, 1), (707, 250), (7, 2), (4, 1)] {
        let lambda = ratio(n, d);
        let r = metrics::min_contextual_fraction(&s, &lambda)?;
        let _ = writeln!(
            out,
            "fraction[{}]={} closed_form={}",
            fmt_fraction(&lambda),
            fmt_both(&r.min_contextual_fraction),
            status(r.min_contextual_fraction == metrics::fraction_closed_form(&lambda))
        );
    }
    let _ = writeln!(
        out,
        "tsirelson_fraction={} (closed form √2−1)",
        metrics::tsirelson_fraction_decimal()
    );
    let _ = writeln!(out, "tsirelson_ratio={}", metrics::TSIRELSON_RATIO_SYMBOLIC);

    let _ = writeln!(out, "# stream");
    let stream = simulate::generate_stream(&s, StreamSpec { n_total: 40, n_contextual: 19, seed })?;
    let value = simulate::empirical_functional(&s, &stream)?;
    let _ = writeln!(out, "stream_n=40 stream_k=19 seed={seed}");
    let _ = writeln!(out, "stream_empirical={}", fmt_both(&value));

    let _ = writeln!(out, "# kochen-specker");
    for (name, text) in [("cabello18", ks::fixtures::CABELLO18), ("pentagon", ks::fixtures::PENTAGON)] {
        let hg = Hypergraph::parse(text)?;
        for line in ks_summary(&hg, None)?.lines() {
            let _ = writeln!(out, "{name}.{line}");
        }
    }
    Ok(out)
}
