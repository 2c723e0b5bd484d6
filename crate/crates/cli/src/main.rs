//! `polywythoff`: build, verify and classify semiregular polytopes from tail-triangle
//! groups, modular reductions of reflection groups and amalgamated free products.
//!
//! Exit status: 0 when every check passes, 1 on a verification failure, 2 on bad input.

mod report;
mod source;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use polywythoff::amalgam::{ridge_walk, AmalgamContext, AmalgamError, FaceType, Side};
use polywythoff::group::{GroupError, DEFAULT_CAP};
use polywythoff::modred::{search_lengths, three_ringings, LengthOutcome, ModredError};
use polywythoff::poset::poset_isomorphic;
use polywythoff::selftest::{self, SelftestOptions, CRITERIA};
use polywythoff::ttgroup::{CheckMethod, IntersectionOutcome, TailTriangleGroup, TtError};
use polywythoff::wythoff::{analyse, build_polytope, build_regular, SemiregularPolytope, WythoffError};

use report::{IntersectionSummary, RunReport, Timings};
use source::{check_prime_gate, string_generators, ModredInput, Resolved, SourceArgs};

/// Bad input: unparseable text, unknown fixtures, unsupported requests.
#[derive(Debug)]
pub struct InputError(String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// A check that ran and failed; the report has already been printed.
#[derive(Debug)]
struct VerificationFailed(String);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

#[derive(Parser)]
#[command(name = "polywythoff", version, about = "Semiregular polytopes from tail-triangle groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Leave out per-phase timings so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Verify, build, check axioms and sections, and classify.
    Build {
        #[command(flatten)]
        source: SourceArgs,
        /// Write the Hasse diagram to this path.
        #[arg(long)]
        export_hasse: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the group relations and both intersection checks.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the summary line: f-vector, flags, orbits and class.
    Classify {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Reduce a crystallographic diagram modulo a prime.
    Modred(ModredArgs),
    /// Normal forms and balls in an amalgamated free product of two string C-groups.
    Amalgam(AmalgamArgs),
    /// Run the acceptance suite and print expected against computed values.
    Selftest {
        /// Skip primes p ≥ 5 and balls of radius above 6.
        #[arg(long)]
        quick: bool,
        /// Add rows over larger primes.
        #[arg(long)]
        large: bool,
        #[arg(long)]
        json_report: Option<PathBuf>,
    },
    /// Build and write the Hasse diagram in the line-oriented text format.
    ExportHasse {
        #[command(flatten)]
        source: SourceArgs,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModredArgs {
    /// Diagram `tail=[..] triangle=(p,q,k)`.
    #[arg(long, conflicts_with = "fixture")]
    diagram: Option<String>,
    /// A `.mr` fixture supplying the diagram and lengths.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long)]
    prime: u32,
    /// Build one ringing instead of comparing all three.
    #[arg(long)]
    ringing: Option<u8>,
    /// Try every length system with entries in {1,2,3,4,6} and report which give C-groups.
    #[arg(long)]
    search_lengths: bool,
    #[arg(long)]
    large: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AmalgamArgs {
    /// String C-group fixture for the first factor.
    #[arg(long)]
    p: String,
    /// String C-group fixture for the second factor.
    #[arg(long)]
    q: String,
    /// Rank of the shared facet group; must equal the factor rank minus one.
    #[arg(long)]
    shared: Option<usize>,
    /// Enumerate faces whose canonical words have at most this many factors.
    #[arg(long)]
    ball: Option<usize>,
    /// Words to normalize, as generator names `a0 a1 .. b`.
    #[arg(long = "word")]
    words: Vec<String>,
    /// Impose `(a_{n-1} b)^k = 1`; not supported.
    #[arg(long)]
    close_up: Option<u32>,
    #[arg(long)]
    export_hasse: Option<PathBuf>,
}

fn cap() -> Result<usize> {
    match std::env::var("POLYWYTHOFF_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| InputError::new(format!("POLYWYTHOFF_CAP must be a positive integer, not `{v}`")).into()),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn outcome_text(outcome: &Result<IntersectionOutcome, TtError>) -> String {
    match outcome {
        Ok(IntersectionOutcome::Pass) => "pass".into(),
        Ok(IntersectionOutcome::Fail(w)) => format!("fail ({w})"),
        Err(e) => format!("not applicable ({e})"),
    }
}

/// Runs both intersection checks and certifies the group when the full check passes.
fn verify_group(
    g: TailTriangleGroup,
    timings: &mut Timings,
) -> Result<(IntersectionSummary, Result<polywythoff::ttgroup::TailTriangleCGroup, TtError>)> {
    let full = timings.time("full-check", || g.check_intersection_full());
    let reduced = timings.time("reduced-check", || g.check_intersection_reduced());
    if let Err(e @ TtError::Group(_)) = &full {
        return Err(e.clone().into());
    }
    let agree = match (&full, &reduced) {
        (Ok(f), Ok(r)) => Some(f.passed() == r.passed()),
        _ => None,
    };
    let summary = IntersectionSummary { full: outcome_text(&full), reduced: outcome_text(&reduced), agree };
    let certified = match full {
        Ok(IntersectionOutcome::Pass) => g.certify(CheckMethod::Full),
        Ok(IntersectionOutcome::Fail(w)) => Err(TtError::IntersectionFailure(w)),
        Err(e) => Err(e),
    };
    Ok((summary, certified))
}

fn section_histogram(poly: &SemiregularPolytope) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for s in poly.two_sections() {
        *hist.entry(s.size).or_insert(0) += 1;
    }
    hist
}

/// The full pipeline; the polytope is returned when it was built.
fn run_build(source: &SourceArgs) -> Result<(RunReport, Option<SemiregularPolytope>)> {
    let cap = cap()?;
    let mut timings = Timings::default();
    let (input, g) = timings.time("group", || source.group(cap))?;
    let order = g.order();
    let diagram = g.diagram().to_string();
    let (intersection, certified) = verify_group(g, &mut timings)?;
    let mut report = RunReport {
        input,
        order,
        diagram,
        intersection,
        f_vector: None,
        flags: None,
        orbits: None,
        classification: None,
        aut_order: None,
        section_sizes: BTreeMap::new(),
        checks: BTreeMap::new(),
        timings_ms: timings,
    };
    let c = match certified {
        Ok(c) => c,
        Err(e) => {
            report.checks.insert("intersection condition".into(), false);
            eprintln!("verification failed: {e}");
            return Ok((report, None));
        }
    };
    report.checks.insert("intersection condition".into(), true);
    let poly = report.timings_ms.time("build", || build_polytope(&c))?;
    let analysis = report.timings_ms.time("analyse", || analyse(&c, &poly));
    let analysis = match analysis {
        Ok(a) => a,
        Err(e) => {
            report.checks.insert("polytope axioms".into(), false);
            eprintln!("verification failed: {e}");
            return Ok((report, Some(poly)));
        }
    };
    report.checks.insert("polytope axioms".into(), true);
    report.checks.insert("flags = 2 x order".into(), analysis.flags == 2 * order);
    report.checks.insert("co-rank-2 sections alternate".into(), analysis.two_sections_alternate);
    report.checks.insert("vertex figure matches its group".into(), analysis.vertex_figure_matches);
    report.checks.insert("facets match their groups".into(), analysis.facets_match);
    report.f_vector = Some(analysis.f_vector.to_string());
    report.flags = Some(analysis.flags);
    report.orbits = Some(analysis.orbits);
    report.classification = Some(analysis.classification.to_string());
    report.aut_order = Some(analysis.classification.aut_order());
    report.section_sizes = section_histogram(&poly);
    Ok((report, Some(poly)))
}

fn print_report(report: &RunReport, output: &OutputArgs) -> Result<()> {
    if output.json {
        let mut value = serde_json::to_value(report)?;
        if output.no_timing {
            value.as_object_mut().map(|o| o.remove("timings_ms"));
        }
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print!("{}", report.render(!output.no_timing));
    }
    Ok(())
}

fn finish(report: &RunReport) -> Result<()> {
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.as_str()).collect();
        Err(VerificationFailed(format!("failed checks: {}", failed.join(", "))).into())
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| InputError::new(format!("cannot write {}: {e}", path.display())).into())
}

fn cmd_build(source: &SourceArgs, export: Option<&PathBuf>, output: &OutputArgs) -> Result<()> {
    let (report, poly) = run_build(source)?;
    print_report(&report, output)?;
    if let (Some(path), Some(poly)) = (export, &poly) {
        write_file(path, &poly.export())?;
    }
    finish(&report)
}

fn cmd_verify(source: &SourceArgs, output: &OutputArgs) -> Result<()> {
    let cap = cap()?;
    let mut timings = Timings::default();
    let (input, g) = timings.time("group", || source.group(cap))?;
    let (order, diagram) = (g.order(), g.diagram().to_string());
    let (intersection, certified) = verify_group(g, &mut timings)?;
    let mut checks = BTreeMap::new();
    checks.insert("intersection condition".to_string(), certified.is_ok());
    let report = RunReport {
        input,
        order,
        diagram,
        intersection,
        f_vector: None,
        flags: None,
        orbits: None,
        classification: None,
        aut_order: None,
        section_sizes: BTreeMap::new(),
        checks,
        timings_ms: timings,
    };
    print_report(&report, output)?;
    finish(&report)
}

fn cmd_classify(source: &SourceArgs) -> Result<()> {
    let (report, poly) = run_build(source)?;
    match (&poly, report.passed()) {
        (Some(poly), true) => println!("{}", poly.summary_line()),
        _ => print!("{}", report.render(false)),
    }
    finish(&report)
}

fn cmd_export(source: &SourceArgs, out: Option<&PathBuf>) -> Result<()> {
    let (report, poly) = run_build(source)?;
    let Some(poly) = poly.filter(|_| report.passed()) else {
        print!("{}", report.render(false));
        return finish(&report);
    };
    match out {
        Some(path) => write_file(path, &poly.export()),
        None => {
            print!("{}", poly.export());
            Ok(())
        }
    }
}

fn modred_input(args: &ModredArgs) -> Result<ModredInput> {
    let source = SourceArgs {
        fixture: args.fixture.clone(),
        modred: args.diagram.clone(),
        lengths: args.lengths.clone(),
        prime: Some(args.prime),
        ringing: 1,
        large: args.large,
    };
    match source.resolve()? {
        Resolved::Modred { input, .. } => Ok(input),
        Resolved::TailTriangle { .. } => Err(InputError::new("modred needs a diagram or a `.mr` fixture").into()),
    }
}

fn cmd_modred(args: &ModredArgs) -> Result<()> {
    let cap = cap()?;
    check_prime_gate(args.prime, args.large)?;
    let input = modred_input(args)?;
    if args.search_lengths {
        let outcomes = search_lengths(&input.diagram, args.prime, cap).map_err(classify_modred)?;
        let mut rows = Vec::new();
        for (lengths, outcome) in &outcomes {
            let l: Vec<String> = lengths.iter().map(|x| x.to_string()).collect();
            let verdict = match outcome {
                LengthOutcome::NonIntegral(i, j) => format!("non-integral constant at ({i},{j})"),
                LengthOutcome::NotCGroup(why) => format!("not a C-group: {why}"),
                LengthOutcome::CGroup { order } => format!("C-group of order {order}"),
            };
            rows.push(serde_json::json!({ "lengths": l.join(","), "outcome": verdict }));
            if !args.output.json {
                println!("lengths {}: {verdict}", l.join(","));
            }
        }
        if args.output.json {
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
        return Ok(());
    }
    let spec = input.spec(args.large)?;
    if let Some(k) = args.ringing {
        let source = SourceArgs {
            fixture: args.fixture.clone(),
            modred: args.diagram.clone(),
            lengths: args.lengths.clone(),
            prime: Some(args.prime),
            ringing: k,
            large: args.large,
        };
        return cmd_build(&source, None, &args.output);
    }
    let disc = match spec.discriminant() {
        Some(d) => d.to_string(),
        None => "undefined".into(),
    };
    let report = three_ringings(&spec, cap).map_err(classify_modred)?;
    let ringings: Vec<serde_json::Value> = report
        .polytopes
        .iter()
        .map(|(r, g, p)| serde_json::json!({ "ringing": r.number(), "order": g.order(), "summary": p.summary_line() }))
        .collect();
    let pairs: Vec<serde_json::Value> = report
        .pairs
        .iter()
        .map(|(a, b, iso)| serde_json::json!({ "pair": [a.number(), b.number()], "isomorphic": iso }))
        .collect();
    if args.output.json {
        let value = serde_json::json!({
            "system": spec.system().to_string(),
            "prime": spec.prime(),
            "discriminant": disc,
            "singular": spec.is_singular(),
            "ringings": ringings,
            "pairs": pairs,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("reflection system:\n{}", spec.system());
        println!("prime: {} discriminant: {disc} singular: {}", spec.prime(), spec.is_singular());
        for (r, g, p) in &report.polytopes {
            println!("ringing {}: order {} {}", r.number(), g.order(), p.summary_line());
        }
        for (a, b, iso) in &report.pairs {
            println!("ringings {} and {}: {}", a.number(), b.number(), if *iso { "isomorphic" } else { "not isomorphic" });
        }
    }
    Ok(())
}

fn face_type_name(t: FaceType) -> String {
    match t {
        FaceType::Sub(j) => format!("G{j}"),
        FaceType::Ridge => "K".into(),
        FaceType::Facet(side) => side.to_string(),
    }
}

fn cmd_amalgam(args: &AmalgamArgs) -> Result<()> {
    if let Some(k) = args.close_up {
        return Err(InputError::new(format!(
            "--close-up {k} is not supported: whether the quotient by (a(n-1) b)^{k} keeps the intersection condition is an open question, so no faces are produced"
        ))
        .into());
    }
    let cap = cap()?;
    let (p_name, p) = string_generators(&args.p)?;
    let (q_name, q) = string_generators(&args.q)?;
    let ctx = AmalgamContext::new(&p, &q, cap).map_err(classify_amalgam)?;
    let n = ctx.n();
    if let Some(s) = args.shared {
        if s + 1 != n {
            return Err(InputError::new(format!("--shared {s} does not match: the factors have rank {n}, so the shared group has rank {}", n - 1)).into());
        }
    }
    println!("factors: {p_name} * {q_name} over their common facet group");
    println!("rank parameter n = {n}");
    println!(
        "orders: P = {} Q = {} shared = {}",
        ctx.factor_order(Side::P),
        ctx.factor_order(Side::Q),
        ctx.shared_order()
    );
    println!("transversal sizes: P = {} Q = {}", ctx.transversal_len(Side::P), ctx.transversal_len(Side::Q));
    println!("universal polytope: {}", if ctx.universal_is_regular() { "Regular" } else { "TwoOrbit" });
    for text in &args.words {
        let w = ctx.parse_word(text).map_err(classify_amalgam)?;
        println!("word {text}: normal form {} (length {})", ctx.format_word(&w)?, w.len());
    }
    let Some(radius) = args.ball else { return Ok(()) };
    let ball = ctx.ball(radius);
    println!("ball radius {radius}: {} faces", ball.keys().len());
    let mut by_type: BTreeMap<String, usize> = BTreeMap::new();
    for (t, _) in ball.keys() {
        *by_type.entry(face_type_name(*t)).or_insert(0) += 1;
    }
    for t in ctx.face_types() {
        let name = face_type_name(t);
        println!("  rank {} {name}: {}", t.rank(n), by_type.get(&name).copied().unwrap_or(0));
    }
    let models = [build_regular(&p, cap)?, build_regular(&q, cap)?];
    let facets = ball.complete_facets();
    let mut facets_ok = true;
    for &f in &facets {
        let (section, _) = ball.poset.section(ball.poset.bottom().expect("balls have a bottom"), f);
        let which = usize::from(matches!(ball.keys()[f - 1].0, FaceType::Facet(Side::Q)));
        facets_ok &= poset_isomorphic(&section, &models[which]).is_some();
    }
    println!("complete facets: {} ({})", facets.len(), if facets_ok { "all match their factor" } else { "MISMATCH" });
    let walk = ridge_walk(&ctx, radius);
    let walk_ok = walk.open && walk.alternating && (walk.ridges, walk.facets) == (2 * radius + 1, 2 * radius + 2);
    println!(
        "ridge walk around the base vertex: {} ridges, {} facets, {}",
        walk.ridges,
        walk.facets,
        if walk_ok { "open and alternating" } else { "NOT an open alternating path" }
    );
    if let Some(path) = &args.export_hasse {
        write_file(path, &ball.poset.export())?;
    }
    if facets_ok && walk_ok {
        Ok(())
    } else {
        Err(VerificationFailed("ball structure check failed".into()).into())
    }
}

fn cmd_selftest(quick: bool, large: bool, json_report: Option<&PathBuf>) -> Result<()> {
    let opts = SelftestOptions { quick, large, cap: cap()? };
    let checks = selftest::run(&opts);
    print!("{}", selftest::render_table(&checks));
    let mut passed = 0;
    let mut criteria = Vec::new();
    for (number, name) in CRITERIA {
        let ok = selftest::criterion_passed(&checks, number);
        passed += usize::from(ok);
        println!("criterion {number:>2} {} {name}", if ok { "PASS" } else { "FAIL" });
        criteria.push(serde_json::json!({ "criterion": number, "name": name, "passed": ok }));
    }
    println!("{passed} of {} criteria passed", CRITERIA.len());
    if let Some(path) = json_report {
        let value = serde_json::json!({ "criteria": criteria, "checks": checks });
        write_file(path, &serde_json::to_string_pretty(&value)?)?;
    }
    if passed == CRITERIA.len() {
        Ok(())
    } else {
        Err(VerificationFailed(format!("{} criteria failed", CRITERIA.len() - passed)).into())
    }
}

/// Variant name of an error's `Debug` form, such as `CommutationViolation`, looking
/// through variants that only wrap another module's error.
fn kind(debug: &str) -> &str {
    let name = debug.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or(debug);
    match name {
        "Group" | "TailTriangle" | "Wythoff" if debug.len() > name.len() + 2 => kind(&debug[name.len() + 1..]),
        _ => name,
    }
}

fn classify_modred(e: ModredError) -> anyhow::Error {
    match e {
        ModredError::TailTriangle(t) => t.into(),
        ModredError::Wythoff(w) => w.into(),
        ModredError::Group(g) => g.into(),
        other => InputError::new(other.to_string()).into(),
    }
}

fn classify_amalgam(e: AmalgamError) -> anyhow::Error {
    match e {
        AmalgamError::NotCGroup(..) => anyhow::Error::new(e),
        other => InputError::new(other.to_string()).into(),
    }
}

fn tt_is_verification(e: &TtError) -> bool {
    !matches!(e, TtError::Group(_) | TtError::NoAlphas | TtError::InvalidDiagram(_))
}

/// Exit status and a label for the error.
fn describe(err: &anyhow::Error) -> (u8, String) {
    if err.downcast_ref::<InputError>().is_some() {
        return (2, "input error".into());
    }
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return (1, "verification failed".into());
    }
    if let Some(e) = err.downcast_ref::<TtError>() {
        return (if tt_is_verification(e) { 1 } else { 2 }, kind(&format!("{e:?}")).to_string());
    }
    if let Some(e) = err.downcast_ref::<WythoffError>() {
        let code = match e {
            WythoffError::Group(_) => 2,
            WythoffError::TailTriangle(t) if !tt_is_verification(t) => 2,
            _ => 1,
        };
        return (code, kind(&format!("{e:?}")).to_string());
    }
    if let Some(e) = err.downcast_ref::<ModredError>() {
        return (2, kind(&format!("{e:?}")).to_string());
    }
    if let Some(e) = err.downcast_ref::<AmalgamError>() {
        return (1, kind(&format!("{e:?}")).to_string());
    }
    if let Some(e) = err.downcast_ref::<GroupError>() {
        return (2, kind(&format!("{e:?}")).to_string());
    }
    (2, "error".into())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { source, export_hasse, output } => cmd_build(&source, export_hasse.as_ref(), &output),
        Command::Verify { source, output } => cmd_verify(&source, &output),
        Command::Classify { source } => cmd_classify(&source),
        Command::Modred(args) => cmd_modred(&args),
        Command::Amalgam(args) => cmd_amalgam(&args),
        Command::Selftest { quick, large, json_report } => cmd_selftest(quick, large, json_report.as_ref()),
        Command::ExportHasse { source, out } => cmd_export(&source, out.as_ref()),
    }

}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, label) = describe(&err);
            eprintln!("error: {label}: {:#}", err.root_cause());
            ExitCode::from(code)
        }
    }
}
