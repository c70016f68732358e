use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ramify::fiber::{SdOutcome, DEFAULT_ORDER_CAP};
use ramify::gen::{enumerate_covers, verify_covers, RandomCovers};
use ramify::numono::{certify_projection, parse_rational, BasePointStrategy};
use ramify::{
    BranchedCover, CorpusSpec, CoverError, FiberAnalysis, FiberError, GenError, NumonoError,
    PlanePolynomial, Span, TrackingConfig,
};

const SCHEMA_VERSION: u32 = 1;

const EXIT_FAILURE: u8 = 1;
const EXIT_REFUSED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_VIOLATION: u8 = 70;

/// Branched covers of curves as permutation data.
#[derive(Parser)]
#[command(name = "ramify", version)]
struct Cli {
    /// Structured (JSON) output.
    #[arg(long, global = true)]
    json: bool,

    /// Include wall-clock time in structured output.
    #[arg(long, global = true)]
    timing: bool,

    /// Worker threads for corpus verification (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cover file and print its basic invariants.
    Validate(InputArgs),
    /// Full fiber-product analysis of a cover.
    Analyze(InputArgs),
    /// Dual graph of the fiber product in DOT format.
    FiberGraph {
        #[command(flatten)]
        input: InputArgs,
        /// Write the DOT text here instead of stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// The derived cover Y' -> Y.
    Derived(InputArgs),
    /// Certify that the Galois closure is the full symmetric group.
    CertifySd(InputArgs),
    /// Generate cover files.
    Gen {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Write one file per cover into this directory instead of JSON lines on stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate or sample a corpus and verify every structural check on it.
    EnumVerify {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Largest group order for the Cayley-graph oracle.
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        oracle_cap: u128,
    },
    /// Monodromy of the projection of a plane curve to the x-line.
    Curve {
        /// Polynomial in x and y, e.g. "y^3 - 3*y + x".
        #[arg(long)]
        poly: String,
        /// Root and separation tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Replace x by x + λy first (λ rational).
        #[arg(long)]
        shear: Option<String>,
        /// Fixed base-point angle in radians.
        #[arg(long)]
        angle: Option<f64>,
        /// Write the assembled cover file here.
        #[arg(long, visible_alias = "emit-cover")]
        cover_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Cover file path, `-` for stdin, or inline JSON.
    input: String,
}

#[derive(Args)]
struct CorpusArgs {
    /// Degree, N or N-M.
    #[arg(long, default_value = "2")]
    degree: Span,
    /// Base genus, N or N-M.
    #[arg(long, default_value = "0")]
    genus: Span,
    /// Number of branch points, N or N-M.
    #[arg(long, default_value = "2")]
    branch_points: Span,
    /// Only Morse covers (all branch cycles transpositions).
    #[arg(long)]
    morse: bool,
    /// Random mode: number of samples (needs --seed).
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for random mode
    #[arg(long)]
    seed: Option<u64>,
    /// Keep one cover per relabeling class.
    #[arg(long)]
    dedup: bool,
}

impl CorpusArgs {
    fn spec(&self) -> CorpusSpec {
        CorpusSpec {
            degree: self.degree,
            base_genus: self.genus,
            branch_points: self.branch_points,
            morse_only: self.morse,
            samples: self.samples,
            seed: self.seed,
            dedup: self.dedup,
        }
    }
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        Failure::new(EXIT_DATA, e.to_string())
    }
}

impl From<FiberError> for Failure {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::Cover(c) => c.into(),
            FiberError::InvariantViolation(_) => Failure::new(EXIT_VIOLATION, e.to_string()),
            other => Failure::new(EXIT_FAILURE, other.to_string()),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        let code = match e {
            GenError::EmptyRange(_) | GenError::MissingSeed | GenError::BadRange(_) | GenError::CapExceeded { .. } => {
                EXIT_USAGE
            }
            GenError::Infeasible(_) => EXIT_DATA,
            GenError::Cover(_) => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<NumonoError> for Failure {
    fn from(e: NumonoError) -> Self {
        let code = match e {
            NumonoError::Syntax { .. }
            | NumonoError::ZeroPolynomial
            | NumonoError::DegreeTooLow(_)
            | NumonoError::NotSquarefree
            | NumonoError::NonGenericProjection(_)
            | NumonoError::SingularCurve { .. } => EXIT_DATA,
            NumonoError::InvalidConfig(_) | NumonoError::BadBasePoint(_) => EXIT_USAGE,
            NumonoError::Fiber(FiberError::InvariantViolation(_)) => EXIT_VIOLATION,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

struct Output {
    json: bool,
    timing: bool,
    started: Instant,
}

impl Output {
    fn emit(&self, command: &str, mut body: Value, human: impl FnOnce() -> String) {
        if self.json {
            let obj = body.as_object_mut().expect("report is an object");
            obj.insert("schema".into(), json!(SCHEMA_VERSION));
            obj.insert("command".into(), json!(command));
            if self.timing {
                obj.insert("runtime_seconds".into(), json!(self.started.elapsed().as_secs_f64()));
            }
            println!("{}", serde_json::to_string_pretty(&body).expect("report serializes"));
        } else {
            print!("{}", human());
            println!("{:<28}{:.3}s", "runtime", self.started.elapsed().as_secs_f64());
        }
    }
}

fn row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(&format!("{key:<28}{value}\n"));
}

fn read_cover(input: &str) -> Result<BranchedCover, Failure> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure::new(EXIT_USAGE, format!("{input}: {e}")))?
    };
    Ok(BranchedCover::from_json(&text)?)
}

fn sd_summary(o: &SdOutcome) -> String {
    match o {
        SdOutcome::Certified(c) => format!("certified (order {})", c.group_order),
        SdOutcome::Refused(r) => format!("refused: {r}"),
    }
}

fn validate(out: &Output, args: &InputArgs) -> Result<u8, Failure> {
    let cover = read_cover(&args.input)?;
    match cover.validate() {
        Ok(report) => {
            out.emit("validate", json!({ "report": report }), || {
                let mut s = String::new();
                row(&mut s, "valid", true);
                row(&mut s, "degree", report.degree);
                row(&mut s, "base genus", report.base_genus);
                row(&mut s, "branch points", report.branch_points);
                row(&mut s, "total space genus", report.total_space_genus);
                row(&mut s, "monodromy order", report.monodromy_order);
                row(&mut s, "morse", report.is_morse);
                row(&mut s, "galois", report.is_galois);
                s
            });
            Ok(0)
        }
        Err(CoverError::Invalid(violations)) => {
            out.emit("validate", json!({ "report": { "valid": false }, "violations": violations }), || {
                let mut s = String::new();
                row(&mut s, "valid", false);
                for v in &violations {
                    row(&mut s, "violation", v);
                }
                s
            });
            Ok(EXIT_DATA)
        }
        Err(e) => Err(e.into()),
    }
}

fn analyze(out: &Output, args: &InputArgs) -> Result<u8, Failure> {
    let cover = read_cover(&args.input)?;
    let cover_report = cover.validate()?;
    let fa = FiberAnalysis::new(&cover)?;
    let fiber = fa.report()?;
    out.emit("analyze", json!({ "cover": cover_report, "fiber": fiber }), || {
        let mut s = String::new();
        row(&mut s, "degree", cover_report.degree);
        row(&mut s, "base genus", cover_report.base_genus);
        row(&mut s, "total space genus", cover_report.total_space_genus);
        row(&mut s, "branch points", cover_report.branch_points);
        row(&mut s, "morse", cover_report.is_morse);
        row(&mut s, "galois", cover_report.is_galois);
        row(&mut s, "genuinely ramified", fiber.genuinely_ramified);
        row(&mut s, "etale subcover degree", fiber.etale_subcover_degree);
        row(&mut s, "orbitals", fiber.orbitals.len());
        row(&mut s, "transitivity", format!("{:?}", fiber.transitivity));
        row(&mut s, "fiber product connected", format!("{:?}", fiber.fiber_connected));
        row(&mut s, "off-diagonal connected", format!("{:?}", fiber.offdiag_closure_connected));
        row(&mut s, "galois closure order", fiber.galois_closure_order);
        row(&mut s, "S_d certificate", sd_summary(&fiber.sd_certificate));
        s
    });
    Ok(0)
}

fn fiber_graph(out: &Output, args: &InputArgs, dot: Option<&Path>) -> Result<u8, Failure> {
    let cover = read_cover(&args.input)?;
    cover.validate()?;
    let graph = FiberAnalysis::new(&cover)?.dual_graph();
    let text = graph.to_dot();
    match dot {
        Some(path) => {
            std::fs::write(path, &text)?;
            out.emit(
                "fiber-graph",
                json!({ "dot_path": path.display().to_string(), "vertices": graph.len(), "edges": graph.edge_count() }),
                || {
                    let mut s = String::new();
                    row(&mut s, "dot written to", path.display());
                    row(&mut s, "vertices", graph.len());
                    row(&mut s, "edges", graph.edge_count());
                    s
                },
            );
        }
        None if out.json => out.emit("fiber-graph", json!({ "dot": text }), String::new),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(0)
}

fn derived(out: &Output, args: &InputArgs) -> Result<u8, Failure> {
    let cover = read_cover(&args.input)?;
    cover.validate()?;
    let fa = FiberAnalysis::new(&cover)?;
    let dc = fa.derived_cover()?;
    let over_y = dc.genus_over_y().ok();
    let over_x = fa.offdiag_genus_over_base()?;
    out.emit(
        "derived",
        json!({ "derived": dc, "genus_over_y": over_y, "genus_over_x": over_x }),
        || {
            let mut s = String::new();
            row(&mut s, "degree", dc.degree);
            row(&mut s, "genus of Y", dc.base_genus_of_y);
            row(&mut s, "group order", dc.group_order);
            row(&mut s, "connected", dc.connected);
            row(&mut s, "morse", dc.morse);
            row(&mut s, "genuinely ramified", dc.genuinely_ramified);
            row(&mut s, "branch points on Y", dc.branch_point_count());
            row(&mut s, "genus of Y' over Y", fmt_opt(over_y));
            row(&mut s, "genus of Y' over X", fmt_opt(over_x));
            s
        },
    );
    Ok(0)
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into())
}

fn certify_sd(out: &Output, args: &InputArgs) -> Result<u8, Failure> {
    let cover = read_cover(&args.input)?;
    cover.validate()?;
    let outcome = FiberAnalysis::new(&cover)?.certify_sd()?;
    out.emit("certify-sd", json!({ "outcome": outcome }), || {
        let mut s = String::new();
        match &outcome {
            SdOutcome::Certified(c) => {
                row(&mut s, "status", "certified");
                row(&mut s, "degree", c.degree);
                row(&mut s, "group order", c.group_order);
                row(&mut s, "transposition", &c.transposition);
                for step in &c.steps {
                    row(&mut s, "step", step);
                }
            }
            SdOutcome::Refused(r) => row(&mut s, "status", format!("refused: {r}")),
        }
        s
    });
    Ok(match outcome {
        SdOutcome::Certified(_) => 0,
        SdOutcome::Refused(_) => EXIT_REFUSED,
    })
}

fn corpus(spec: &CorpusSpec) -> Result<Vec<BranchedCover>, Failure> {
    spec.check()?;
    let covers: Result<Vec<_>, GenError> = if spec.is_random() {
        RandomCovers::new(spec)?.collect()
    } else {
        Ok(enumerate_covers(spec)?.collect())
    };
    Ok(covers?)
}

fn gen(out: &Output, args: &CorpusArgs, dir: Option<&Path>) -> Result<u8, Failure> {
    let covers = corpus(&args.spec())?;
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let width = covers.len().to_string().len().max(4);
            for (k, c) in covers.iter().enumerate() {
                std::fs::write(dir.join(format!("cover-{:0width$}.json", k + 1)), c.to_json() + "\n")?;
            }
            out.emit(
                "gen",
                json!({ "directory": dir.display().to_string(), "covers": covers.len() }),
                || {
                    let mut s = String::new();
                    row(&mut s, "covers", covers.len());
                    row(&mut s, "written to", dir.display());
                    s
                },
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for c in &covers {
                writeln!(stdout, "{}", c.to_file_compact())?;
            }
        }
    }
    Ok(0)
}

fn enum_verify(out: &Output, args: &CorpusArgs, oracle_cap: u128) -> Result<u8, Failure> {
    let spec = args.spec();
    let covers = corpus(&spec)?;
    log::info!("verifying {} covers", covers.len());
    let report = verify_covers(&covers, oracle_cap);
    out.emit("enum-verify", json!({ "spec": spec, "report": report }), || {
        let mut s = String::new();
        row(&mut s, "covers", report.covers);
        row(&mut s, "genuinely ramified", report.genuinely_ramified);
        row(&mut s, "not genuinely ramified", report.not_genuinely_ramified);
        row(&mut s, "morse", report.morse);
        row(&mut s, "galois", report.galois);
        row(&mut s, "S_d certified", report.sd_certified);
        for (name, c) in &report.checks {
            let vac = if c.vacuous > 0 { format!(" ({} vacuous)", c.vacuous) } else { String::new() };
            row(&mut s, name, format!("{}/{} passed{vac}", c.passed, c.checked));
        }
        let n = &report.nongalois_oracle;
        row(
            &mut s,
            "non-galois oracle",
            format!("{} equal, {} strict subset, {} over cap", n.equal, n.strict_subset, n.over_cap),
        );
        row(&mut s, "violations", report.violations.len());
        for v in &report.violations {
            s.push_str(&format!(
                "  {}: {}\n    {}\n",
                v.check,
                v.detail,
                serde_json::to_string(&v.cover).expect("cover file serializes")
            ));
        }
        s
    });
    Ok(if report.is_clean() { 0 } else { EXIT_VIOLATION })
}

fn curve(
    out: &Output,
    poly: &str,
    tol: f64,
    shear: Option<&str>,
    angle: Option<f64>,
    cover_out: Option<&Path>,
) -> Result<u8, Failure> {
    let mut p = PlanePolynomial::parse(poly)?;
    if let Some(l) = shear {
        p = p.shear(&parse_rational(l)?);
    }
    let cfg = TrackingConfig {
        tolerance: tol,
        base_point: angle.map_or(BasePointStrategy::Right, BasePointStrategy::Angle),
        ..TrackingConfig::default()
    };
    let (result, projection) = certify_projection(&p, &cfg)?;
    if let Some(path) = cover_out {
        std::fs::write(path, result.cover.to_json() + "\n")?;
    }
    let monodromy = result.report();
    out.emit("curve", json!({ "monodromy": monodromy, "projection": projection }), || {
        let mut s = String::new();
        row(&mut s, "polynomial", &monodromy.polynomial);
        row(&mut s, "degree", monodromy.degree);
        row(&mut s, "discriminant", &monodromy.resultant);
        for (v, c) in result.critical_values.iter().zip(&monodromy.branch_cycles) {
            row(&mut s, &format!("x = {:.6}{:+.6}i", v.re, v.im), c);
        }
        row(&mut s, "infinity", &monodromy.infinity_cycle);
        row(&mut s, "group order", monodromy.group_order);
        row(&mut s, "full symmetric", projection.full_symmetric);
        row(&mut s, "morse", projection.morse);
        row(&mut s, "S_d certificate", sd_summary(&projection.sd_certificate));
        if let Some(path) = cover_out {
            row(&mut s, "cover written to", path.display());
        }
        s
    });
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let out = Output {
        json: cli.json,
        timing: cli.timing,
        started: Instant::now(),
    };
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    }
    match &cli.command {
        Command::Validate(a) => validate(&out, a),
        Command::Analyze(a) => analyze(&out, a),
        Command::FiberGraph { input, dot } => fiber_graph(&out, input, dot.as_deref()),
        Command::Derived(a) => derived(&out, a),
        Command::CertifySd(a) => certify_sd(&out, a),
        Command::Gen { corpus, out: dir } => gen(&out, corpus, dir.as_deref()),
        Command::EnumVerify { corpus, oracle_cap } => enum_verify(&out, corpus, *oracle_cap),
        Command::Curve {
            poly,
            tol,
            shear,
            angle,
            cover_out,
        } => curve(&out, poly, *tol, shear.as_deref(), *angle, cover_out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RAMIFY_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("ramify: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
