use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fracbal::balance::all_triangles;
use fracbal::bounds::{self, BoundParams};
use fracbal::certify::{all_three_count, triangle_missing_count, triangle_property_audit};
use fracbal::compose::{compose_8341_with, edge_overlaps_in_range, BaseProfile};
use fracbal::fracsolve::{a_f_lp, chi_fb_lp, column_generation, format_rational, ColumnGenOptions};
use fracbal::gadgets::{self, DEFAULT_DEPTH_GUARD};
use fracbal::reproduce::{self, Outcome, ReproduceOptions};
use fracbal::setfam::{check_forest_lemmas, check_missing_triangle_lemma, terminal_case_family};
use fracbal::{
    enumerate_sets, parse_graph, verify, BuildTrace, Certificate, EnumOptions, Error, GadgetGraph,
    Orientation, Property, Sign, SignedGraph, VertexSet,
};

#[derive(Parser)]
#[command(name = "fracbal", version, about = "Fractional balanced colorings of signed planar graphs")]
struct Cli {
    /// worker threads for parallel enumeration (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// machine-readable output for report commands
    #[arg(long, global = true)]
    json: bool,
    /// write the result here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a gadget construction as graph JSON
    Build(BuildArgs),
    /// List sets with a hereditary property
    Enumerate(EnumerateArgs),
    /// Solve the fractional covering LP exactly
    Solve(SolveArgs),
    /// Check a coloring certificate against a graph
    Verify { graph: PathBuf, certificate: PathBuf },
    /// Build a graph from a trace together with an 83:41 coloring
    #[command(name = "compose-8341")]
    Compose8341 {
        trace: PathBuf,
        /// pair overlaps of the starting triangle
        #[arg(long, value_enum, default_value_t = Profile::P141414)]
        base_profile: Profile,
    },
    /// Missing and all-three counts of a certificate on one triangle
    #[command(name = "audit-triangle")]
    AuditTriangle(AuditArgs),
    /// Bound recurrences and ratio thresholds
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Run one of the structural lemma checks
    Check { which: CheckName },
    /// Run acceptance criteria (`all` or a criterion id)
    Reproduce {
        #[arg(default_value = "all")]
        id: String,
        /// do not fail criteria on their runtime budget
        #[arg(long)]
        ignore_budget: bool,
    },
}

#[derive(Args)]
struct BuildArgs {
    name: GadgetName,
    /// sequence index for `g-seq`
    #[arg(long, default_value_t = 1)]
    i: usize,
    /// largest `g-seq` index allowed
    #[arg(long, default_value_t = DEFAULT_DEPTH_GUARD)]
    depth_guard: usize,
    /// attach the copies in `w1` by their `v` terminal
    #[arg(long)]
    reversed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetName {
    K3Minus,
    K4Minus,
    WHat,
    WPrime,
    WDoublePrime,
    GHatK3,
    GHatK4,
    UHat,
    GSeq,
    W,
    W1,
}

#[derive(Args)]
struct EnumerateArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = PropertyArg::Balanced)]
    property: PropertyArg,
    /// only inclusion-maximal sets
    #[arg(long)]
    maximal: bool,
    /// comma-separated vertices every set must contain
    #[arg(long)]
    contains: Option<String>,
    /// comma-separated vertices no set may contain
    #[arg(long)]
    forbid: Option<String>,
    /// largest vertex count enumerated
    #[arg(long)]
    size_guard: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Balanced,
    Acyclic,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Property {
        match p {
            PropertyArg::Balanced => Property::Balanced,
            PropertyArg::Acyclic => Property::Acyclic,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    which: SolveName,
    graph: PathBuf,
    /// restricted master with branch-and-bound pricing instead of full enumeration
    #[arg(long)]
    column_generation: bool,
    /// wall-clock limit for column generation, in seconds
    #[arg(long)]
    time_budget: Option<u64>,
    /// branch-and-bound nodes per pricing call
    #[arg(long, default_value_t = 50_000_000)]
    pricing_nodes: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveName {
    ChiFb,
    #[value(name = "a-f")]
    AF,
}

#[derive(Args)]
struct AuditArgs {
    certificate: PathBuf,
    /// three comma-separated vertex names
    #[arg(long)]
    triangle: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1)]
    sign: i64,
    /// colors allowed to miss a negative triangle (or to sit on all of a
    /// positive one)
    #[arg(long, default_value_t = 0)]
    threshold: u64,
    /// host graph; without it the names in the certificate are taken as given
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Closed form and recurrence for the overlap bound
    Mu {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        i: u32,
    },
    /// The three ratio thresholds
    Thresholds,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckName {
    #[value(name = "lemma-3.1")]
    Lemma31,
    ForestLemmas,
    TriangleSigns,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    #[value(name = "14-14-14")]
    P141414,
    #[value(name = "14-14-13")]
    P141413,
    #[value(name = "14-13-13")]
    P141313,
}

impl From<Profile> for BaseProfile {
    fn from(p: Profile) -> BaseProfile {
        match p {
            Profile::P141414 => BaseProfile::Overlaps141414,
            Profile::P141413 => BaseProfile::Overlaps141413,
            Profile::P141313 => BaseProfile::Overlaps141313,
        }
    }
}

enum Failure {
    Usage(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_guard() {
            Failure::Guard(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// What a command produced and whether its check passed.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn ok(text: String) -> Report {
        Report { text, ok: true }
    }

    fn json(v: &Value, ok: bool) -> Report {
        Report {
            text: pretty(v),
            ok,
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<SignedGraph, Failure> {
    Ok(parse_graph(&read(path)?)?)
}

fn name_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn names_value(g: &SignedGraph, sets: &[VertexSet]) -> Value {
    json!(sets.iter().map(|s| g.set_names(s)).collect::<Vec<_>>())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if cli.threads > 0 {
        pool = pool.num_threads(cli.threads);
    }
    if let Err(e) = pool.build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(report) => {
            let mut text = report.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            let written = match &cli.output {
                Some(path) => fs::write(path, text.as_bytes()),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Build(args) => build(args),
        Command::Enumerate(args) => enumerate(args),
        Command::Solve(args) => solve(args),
        Command::Verify { graph, certificate } => {
            let g = load_graph(graph)?;
            let c = Certificate::from_json(&g, &read(certificate)?)?;
            let report = verify(&g, &c);
            let v = serde_json::to_value(&report).expect("report serializes");
            Ok(Report::json(&v, report.ok))
        }
        Command::Compose8341 {
            trace,
            base_profile,
        } => {
            let trace = BuildTrace::from_json(&read(trace)?)?;
            let (g, c) = compose_8341_with(&trace, (*base_profile).into())?;
            let report = verify(&g.graph, &c);
            let in_range = edge_overlaps_in_range(&g.graph, &c).is_ok();
            let v = json!({
                "graph": fracbal::graph::graph_to_value(&g.graph),
                "certificate": c.to_value(&g.graph),
                "verified": report.ok,
                "edge_overlaps_in_range": in_range,
            });
            Ok(Report::json(&v, report.ok && in_range))
        }
        Command::AuditTriangle(args) => audit_triangle(args),
        Command::Bounds { which } => bounds_cmd(which),
        Command::Check { which } => check(*which, cli.json),
        Command::Reproduce { id, ignore_budget } => {
            let opts = ReproduceOptions {
                seed: cli.seed,
                ignore_budget: *ignore_budget,
            };
            let outcomes = if id == "all" {
                reproduce::run_all(&opts)
            } else {
                vec![reproduce::run(id, &opts)?]
            };
            Ok(reproduce_report(&outcomes, cli.json, id != "all"))
        }
    }
}

fn build(args: &BuildArgs) -> Result<Report, Failure> {
    let g: GadgetGraph = match args.name {
        GadgetName::K3Minus => gadgets::k3_minus(),
        GadgetName::K4Minus => gadgets::k4_minus(),
        GadgetName::WHat => gadgets::w_hat(),
        GadgetName::WPrime => gadgets::w_prime(),
        GadgetName::WDoublePrime => gadgets::w_double_prime(),
        GadgetName::GHatK3 => gadgets::g_hat_k3(),
        GadgetName::GHatK4 => gadgets::g_hat_k4(),
        GadgetName::UHat => gadgets::u_hat(),
        GadgetName::GSeq => gadgets::g_sequence(args.i, args.depth_guard)?,
        GadgetName::W => gadgets::w_underlying(),
        GadgetName::W1 => gadgets::w1_underlying(if args.reversed {
            Orientation::Reversed
        } else {
            Orientation::Forward
        }),
    };
    Ok(Report::ok(fracbal::serialize_graph(&g.graph)))
}

fn enumerate(args: &EnumerateArgs) -> Result<Report, Failure> {
    let g = load_graph(&args.graph)?;
    let opts = EnumOptions {
        maximal_only: args.maximal,
        must_contain: g.set(&name_list(args.contains.as_deref().unwrap_or("")))?,
        forbid: g.set(&name_list(args.forbid.as_deref().unwrap_or("")))?,
        size_guard: args.size_guard,
        parallel: true,
        ..Default::default()
    };
    let fam = enumerate_sets(&g, args.property.into(), &opts)?;
    Ok(Report::json(&names_value(&g, &fam.sets), true))
}

fn solve(args: &SolveArgs) -> Result<Report, Failure> {
    let g = load_graph(&args.graph)?;
    let property = match args.which {
        SolveName::ChiFb => Property::Balanced,
        SolveName::AF => Property::Acyclic,
    };
    if !args.column_generation {
        let r = match args.which {
            SolveName::ChiFb => chi_fb_lp(&g)?,
            SolveName::AF => a_f_lp(&g)?,
        };
        return Ok(Report::json(&r.to_value(&g), true));
    }
    let opts = ColumnGenOptions {
        pricing_nodes: args.pricing_nodes,
        time_budget: args.time_budget.map(Duration::from_secs),
        ..Default::default()
    };
    let r = column_generation(&g, property, &opts)?;
    let mut v = r.master.to_value(&g);
    let obj = v.as_object_mut().expect("LP result is an object");
    obj.insert("lower".into(), json!(format_rational(&r.lower)));
    obj.insert("upper".into(), json!(format_rational(&r.upper)));
    obj.insert("converged".into(), json!(r.converged));
    obj.insert("rounds".into(), json!(r.rounds));
    obj.insert("columns".into(), json!(r.columns.len()));
    Ok(Report::json(&v, true))
}

/// A graph with only the vertex names that occur in `cert` and `extra`.
fn names_only_graph(cert: &str, extra: &[&str]) -> Result<SignedGraph, Failure> {
    let doc: Value = serde_json::from_str(cert).map_err(Error::from)?;
    let mut g = SignedGraph::new();
    let mut add = |name: &str| -> Result<(), Failure> {
        if !g.contains_vertex(name) {
            g.add_vertex(name)?;
        }
        Ok(())
    };
    for class in doc["classes"].as_array().into_iter().flatten() {
        for name in class["set"].as_array().into_iter().flatten() {
            if let Some(name) = name.as_str() {
                add(name)?;
            }
        }
    }
    for name in extra {
        add(name)?;
    }
    Ok(g)
}

fn audit_triangle(args: &AuditArgs) -> Result<Report, Failure> {
    let text = read(&args.certificate)?;
    let names = name_list(&args.triangle);
    if names.len() != 3 {
        return Err(Failure::Usage(format!(
            "--triangle needs three vertices, got {}",
            names.len()
        )));
    }
    let g = match &args.graph {
        Some(path) => load_graph(path)?,
        None => names_only_graph(&text, &names)?,
    };
    let sign = Sign::from_i64(args.sign)?;
    let c = Certificate::from_json(&g, &text)?;
    let t = g.set(&names)?;
    if t.len() != 3 {
        return Err(Error::NotATriangle(names.iter().map(|s| s.to_string()).collect()).into());
    }
    let missing = triangle_missing_count(&c, &t);
    let all_three = all_three_count(&c, &t);
    let passes = match (args.threshold, sign) {
        (0, _) => triangle_property_audit(&c, &t, sign),
        (k, Sign::Neg) => missing <= k,
        (k, Sign::Pos) => all_three <= k,
    };
    let v = json!({
        "triangle": g.set_names(&t),
        "sign": args.sign,
        "missing": missing,
        "all_three": all_three,
        "threshold": args.threshold,
        "m_bound": 2 * c.p as i64 - 4 * c.q as i64,
        "passes": passes,
    });
    Ok(Report::json(&v, passes))
}

fn bounds_cmd(which: &BoundsCmd) -> Result<Report, Failure> {
    let v = match which {
        BoundsCmd::Mu { p, q, i } => {
            let bp = BoundParams::new(*p, *q)?;
            json!({
                "p": p,
                "q": q,
                "i": i,
                "m_upper_bound": bounds::m_upper_bound(bp),
                "mu_closed_form": format_rational(&bounds::mu_bound(bp, *i)),
                "mu_recurrence": bounds::mu_recurrence(bp, *i).to_string(),
                "first_infeasible_index": bounds::first_infeasible_index(bp),
            })
        }
        BoundsCmd::Thresholds => json!({
            "threshold_83_41": format_rational(&bounds::threshold_83_41()),
            "threshold_172_85": format_rational(&bounds::threshold_172_85()),
            "threshold_52_25": format_rational(&bounds::threshold_52_25()),
        }),
    };
    Ok(Report::json(&v, true))
}

fn check(which: CheckName, as_json: bool) -> Result<Report, Failure> {
    match which {
        CheckName::Lemma31 => {
            let w = gadgets::w_hat();
            let g = &w.graph;
            let positive = vec![g.set(&["u", "x1", "x2"])?, g.set(&["v", "x3", "x4"])?];
            let family = terminal_case_family(&w, &positive)?;
            let mut expected = reproduce::lemma_3_1_sets(g)?;
            let mut sorted = family.clone();
            expected.sort();
            sorted.sort();
            let wp = gadgets::w_prime();
            let missing = check_missing_triangle_lemma(&wp)?;
            let ok = sorted == expected && missing.holds;
            let v = json!({
                "sets": names_value(g, &family),
                "matches_listing": sorted == expected,
                "w_prime_sets_examined": missing.examined,
                "w_prime_each_misses_a_marked_triangle": missing.holds,
            });
            if as_json {
                return Ok(Report::json(&v, ok));
            }
            let mut text = String::new();
            for (i, s) in family.iter().enumerate() {
                text += &format!("B{}: {{{}}}\n", i + 1, g.set_names(s).join(", "));
            }
            text += &format!(
                "W': {} maximal balanced sets through u,v, each misses a marked triangle: {}\n",
                missing.examined, missing.holds
            );
            Ok(Report { text, ok })
        }
        CheckName::ForestLemmas => {
            let r = check_forest_lemmas(&gadgets::w_underlying().graph)?;
            let ok = r.max_acyclic_order == 5
                && r.max_acyclic_order_with_uv == 4
                && r.max_sets_with_u_hit_two_of_z_t_x1;
            let v = serde_json::to_value(&r).expect("report serializes");
            Ok(Report::json(&v, ok))
        }
        CheckName::TriangleSigns => {
            let mut rows = Vec::new();
            let mut ok = true;
            let named = [
                ("k3-minus", gadgets::k3_minus()),
                ("k4-minus", gadgets::k4_minus()),
                ("w-hat", gadgets::w_hat()),
                ("w-prime", gadgets::w_prime()),
                ("w-double-prime", gadgets::w_double_prime()),
                ("g-hat-k3", gadgets::g_hat_k3()),
                ("u-hat", gadgets::u_hat()),
            ];
            for (name, g) in &named {
                let bad = g.audit_marked();
                ok &= bad.is_empty();
                let (pos, neg): (Vec<_>, Vec<_>) =
                    all_triangles(&g.graph).into_iter().partition(|(_, s)| *s == Sign::Pos);
                rows.push(json!({
                    "graph": name,
                    "marked": g.marked.len(),
                    "marked_not_negative": names_value(&g.graph, &bad),
                    "positive_triangles": pos.len(),
                    "negative_triangles": neg.len(),
                }));
            }
            Ok(Report::json(&Value::Array(rows), ok))
        }
    }
}

fn reproduce_report(outcomes: &[Outcome], as_json: bool, verbose: bool) -> Report {
    let ok = outcomes.iter().all(|o| o.passed);
    if as_json {
        let v = serde_json::to_value(outcomes).expect("outcomes serialize");
        return Report::json(&v, ok);
    }
    let mut text = String::new();
    for o in outcomes {
        text += &o.line();
        text.push('\n');
        if verbose {
            for d in &o.details {
                text += &format!("  {d}\n");
            }
        }
        for f in o.failures.iter().skip(usize::from(!verbose)) {
            text += &format!("  failed: {f}\n");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text += &format!("{passed}/{} criteria passed\n", outcomes.len());
    Report { text, ok }
}
