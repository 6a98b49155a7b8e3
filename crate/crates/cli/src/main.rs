use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itersum::construction::{dyadic_pigeonhole, theorem4_witnesses, Strategy, WitnessBatch};
use itersum::construction::theorem3_witnesses_with;
use itersum::convexity::convexity_order;
use itersum::experiments::{
    check_corollary, check_theorem3, check_theorem4, check_threefold, corollary_trend, growth_report,
    threefold_family, ExperimentReport,
};
use itersum::families::Family;
use itersum::maps::{function_convexity_check_with, ConvexMap, DEFAULT_START_BITS};
use itersum::poly::Polynomial;
use itersum::{Error, GroupedSet, Limits, Monoid, Scalar};

#[derive(Parser)]
#[command(name = "itersum", version, about = "Iterated sumsets of convex sets and witness construction")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads; 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Element cap for enumeration [default: 50000000, or ITERSUM_ELEMENT_CAP]
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Precision ceiling in bits for certified comparisons
    #[arg(long, global = true, default_value_t = 4096)]
    max_bits: u32,
    /// Output format for reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for random families
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in family as a set file
    Gen {
        /// powers, geometric, ap or random-convex
        kind: String,
        /// exponent, ratio, common difference or convexity order
        param: String,
        /// Number of elements
        #[arg(long = "n", short = 'n')]
        n: usize,
        /// Monoid tag written to the file
        #[arg(long, default_value = "additive")]
        monoid: String,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size of mA - nA, optionally writing the set
    Sumset {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "minus", default_value_t = 1)]
        n: usize,
        /// Write the set here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convexity order of a set, or the difference check of a map on a grid
    Convexity {
        #[arg(long = "in")]
        input: PathBuf,
        /// Map spec such as "power: 3" or "poly: 0, 1, 0, 1"; the input is the grid
        #[arg(long)]
        map: Option<String>,
        /// Comma-separated step sizes
        #[arg(long, value_delimiter = ',')]
        steps: Vec<Scalar>,
    },
    /// Dyadic decomposition of the consecutive differences
    Pigeonhole {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Certified witnesses in 2^k A - (2^k - 1) A for a k-convex set
    Witness3 {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// prefix or half-split
        #[arg(long, default_value = "prefix")]
        strategy: String,
        /// Check every value against the enumerated set
        #[arg(long)]
        verify_oracle: bool,
        /// Fail unless the distinct count reaches the claimed bound
        #[arg(long)]
        assert_bound: bool,
        /// Batch file [default: <input>.witness3.json]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified witnesses in 2^k f(A) - (2^k - 1) f(A) for a k-convex map
    Witness4 {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        verify_oracle: bool,
        /// Batch file [default: <input>.witness4.json]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth consequences under small doubling
    Corollary {
        #[arg(long)]
        part: u8,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1/2")]
        delta: Scalar,
        #[arg(long = "in")]
        input: PathBuf,
        /// Degree-k polynomial coefficients for part 3, lowest first
        #[arg(long, value_delimiter = ',')]
        poly: Vec<Scalar>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// max(|A+A-A|, |AA/A|) against N^(3/2) / (log2 N)^(3/2)
    Threefold {
        #[arg(long = "in", conflicts_with = "family")]
        input: Option<PathBuf>,
        /// Built-in family; asserts the bound
        #[arg(long)]
        family: Option<Family>,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        sizes: Vec<usize>,
        /// Assert the bound for file input as well
        #[arg(long)]
        assert: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-row experiment report over a family
    Report {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<usize>,
        /// Map for theorem4
        #[arg(long, default_value = "power: 2")]
        map: String,
        /// Part for the small-doubling check
        #[arg(long, default_value_t = 1)]
        part: u8,
        #[arg(long, default_value = "1/2")]
        delta: Scalar,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Theorem3,
    Theorem4,
    Corollary,
    Threefold,
    Growth,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Usage, parse or input errors.
    Usage(String),
    /// A checked bound or certificate failed.
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SqueezeViolated { .. } | Error::HypothesisViolated { .. } => Failure::Assertion(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    limits: Limits,
    max_bits: u32,
    format: Format,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let g = &cli.global;
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let ctx = Ctx {
        limits: g.cap.map(Limits::with_cap).unwrap_or_else(Limits::from_env),
        max_bits: g.max_bits,
        format: g.format,
        seed: g.seed,
    };
    match run(cli.command, &ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_set(path: &Path) -> Result<GroupedSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    GroupedSet::parse_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn default_artifact(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "set".into());
    input.with_file_name(format!("{stem}.{suffix}"))
}

fn parse_map(spec: &str) -> Result<ConvexMap, Failure> {
    spec.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn run(command: Command, ctx: &Ctx) -> Outcome {
    match command {
        Command::Gen { kind, param, n, monoid, out } => {
            let family: Family = format!("{kind}:{param}").parse()?;
            let monoid: Monoid = monoid.parse()?;
            let set = family.generate(n, ctx.seed)?.retag(monoid)?;
            emit(out.as_deref(), &set.to_text())
        }
        Command::Sumset { input, m, n, out } => {
            let a = read_set(&input)?;
            match out {
                Some(path) => {
                    let s = a.iterated_with(m, n, ctx.limits)?;
                    println!("|{m}A - {n}A| = {}", s.len());
                    write_atomic(&path, &s.to_text())
                }
                None => {
                    println!("|{m}A - {n}A| = {}", a.iterated_cardinality_with(m, n, ctx.limits)?);
                    Ok(())
                }
            }
        }
        Command::Convexity { input, map, steps } => convexity(&input, map.as_deref(), &steps, ctx),
        Command::Pigeonhole { input } => {
            let a = read_set(&input)?;
            let d = dyadic_pigeonhole(&a)?;
            println!("t={}, L={}, m={}", d.t, d.l, d.m);
            println!("H' = {{{}}}", d.h_prime.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(", "));
            println!("L*m >= N/(3 log2 N): {}", d.satisfies_size_bound());
            println!("L <= |A_h| <= 2L: {}", d.fibers_balanced());
            println!("certified |A+A-A| >= {}", d.certified_bound());
            Ok(())
        }
        Command::Witness3 { k, input, strategy, verify_oracle, assert_bound, out } => {
            let a = read_set(&input)?;
            let strategy: Strategy = strategy.parse()?;
            let batch = theorem3_witnesses_with(&a, k, strategy)?;
            let out = out.unwrap_or_else(|| default_artifact(&input, "witness3.json"));
            finish_batch(&batch, verify_oracle, assert_bound, &out, ctx)
        }
        Command::Witness4 { k, input, map, verify_oracle, out } => {
            let a = read_set(&input)?;
            let f = parse_map(&map)?;
            let batch = theorem4_witnesses(&a, &f, k)?;
            let out = out.unwrap_or_else(|| default_artifact(&input, "witness4.json"));
            // only the k = 1 bound carries no hidden constant
            finish_batch(&batch, verify_oracle, k == 1, &out, ctx)
        }
        Command::Corollary { part, k, delta, input, poly, out } => {
            let a = read_set(&input)?;
            let label = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let p = (!poly.is_empty()).then(|| Polynomial::new(poly));
            let report = check_corollary(part, &label, &a, k, &delta, p.as_ref(), ctx.limits)?;
            finish_report(&report, out.as_deref(), ctx)
        }
        Command::Threefold { input, family, sizes, assert, out } => {
            let report = match (input, family) {
                (Some(path), None) => {
                    let a = read_set(&path)?;
                    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    check_threefold(&label, &a, assert, ctx.limits)?
                }
                (None, Some(f)) => threefold_family(&f, &sizes, true, ctx.seed, ctx.limits)?,
                _ => return Err(Failure::Usage("give either --in or --family".into())),
            };
            finish_report(&report, out.as_deref(), ctx)
        }
        Command::Report { check, family, sizes, k, map, part, delta, out } => {
            let first_k = *k.first().ok_or_else(|| Failure::Usage("--k needs a value".into()))?;
            let report = match check {
                Check::Theorem3 => {
                    let mut r = ExperimentReport::new("theorem3");
                    for &kk in &k {
                        let part = check_theorem3(&family, &sizes, kk, ctx.seed, ctx.limits)?;
                        r.rows.extend(part.rows);
                        r.notes.extend(part.notes);
                    }
                    r.fit_slope();
                    r
                }
                Check::Theorem4 => {
                    let f = parse_map(&map)?;
                    let mut r = ExperimentReport::new("theorem4");
                    for &n in &sizes {
                        let a = family.generate(n, ctx.seed)?;
                        for &kk in &k {
                            let part = check_theorem4(&family.to_string(), &a, &f, kk, ctx.limits)?;
                            r.rows.extend(part.rows);
                            r.notes.extend(part.notes);
                        }
                    }
                    r
                }
                Check::Corollary => corollary_trend(part, &family, &sizes, first_k, &delta, ctx.seed, ctx.limits)?,
                Check::Threefold => threefold_family(&family, &sizes, true, ctx.seed, ctx.limits)?,
                Check::Growth => growth_report(&family, &k, &sizes, ctx.seed, ctx.limits)?,
            };
            finish_report(&report, out.as_deref(), ctx)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn convexity(input: &Path, map: Option<&str>, steps: &[Scalar], ctx: &Ctx) -> Outcome {
    let a = read_set(input)?;
    let Some(spec) = map else {
        let r = convexity_order(&a);
        let profile: Vec<String> = r.direction_profile.iter().map(|d| d.to_string()).collect();
        println!("order = {}", r.order);
        println!("direction profile = [{}]", profile.join(", "));
        return Ok(());
    };
    let f = parse_map(spec)?;
    let grid = a.retag(f.ground_monoid())?;
    let check = function_convexity_check_with(&f, steps.len(), &grid, steps, DEFAULT_START_BITS.min(ctx.max_bits), ctx.max_bits)?;
    for level in &check.levels {
        println!("level {}: direction {}", level.level, level.direction);
    }
    match check.violation {
        None => {
            println!("strictly monotone at every level");
            Ok(())
        }
        Some(v) => {
            let pts: Vec<String> = v.points.iter().map(|p| p.to_string()).collect();
            Err(Failure::Assertion(format!("level {} is not strictly monotone at {}", v.level, pts.join(", "))))
        }
    }
}

fn finish_batch(batch: &WitnessBatch, verify_oracle: bool, assert_bound: bool, out: &Path, ctx: &Ctx) -> Outcome {
    write_atomic(out, &batch.to_json())?;
    let failures = batch.verify_all();
    println!("engine: {}", batch.engine);
    println!("certificates: {}", batch.len());
    println!("distinct values: {}", batch.distinct_count());
    println!("claimed bound: {}", batch.claimed_count_bound);
    println!("verified: {}/{}", batch.len() - failures.len(), batch.len());
    println!("digest: {}", batch.digest());
    println!("batch written to {}", out.display());
    if let Some((i, clause)) = failures.first() {
        return Err(Failure::Assertion(format!("certificate {i}: {clause}")));
    }
    if !batch.values_distinct() {
        return Err(Failure::Assertion("certificate values repeat".into()));
    }
    if verify_oracle {
        let (m, n) = (1usize << batch.k, (1usize << batch.k) - 1);
        let oracle = batch.ground.iterated_with(m, n, ctx.limits)?;
        let inside = batch.values().is_subset(&oracle);
        println!("oracle |{m}A - {n}A| = {}; all values inside: {inside}", oracle.len());
        if !inside {
            return Err(Failure::Assertion("a witness lies outside the enumerated set".into()));
        }
    }
    if assert_bound && !batch.meets_claim() {
        return Err(Failure::Assertion(format!(
            "{} distinct values below the bound {}",
            batch.distinct_count(),
            batch.claimed_count_bound
        )));
    }
    Ok(())
}

fn render_text(report: &ExperimentReport) -> String {
    let mut out = format!("check: {}\n", report.check);
    for r in &report.rows {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{} N={} k={} map={} |A+A|={} |A+A-A|={} |AA/A|={} measured={} bound={} ratio={} verdict={}\n",
            r.family,
            r.n,
            r.k,
            r.map,
            opt(r.sumset),
            opt(r.tripling),
            opt(r.quotient),
            opt(r.measured),
            r.bound.as_deref().unwrap_or("-"),
            r.ratio.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into()),
            r.verdict,
        ));
        if let Some(note) = &r.note {
            out.push_str(&format!("  {note}\n"));
        }
    }
    if let Some(s) = report.slope {
        out.push_str(&format!("slope: {s:.4}\n"));
    }
    for n in &report.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}

fn finish_report(report: &ExperimentReport, out: Option<&Path>, ctx: &Ctx) -> Outcome {
    let body = match ctx.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
        Format::Text => render_text(report),
    };
    match out {
        Some(path) => {
            write_atomic(path, &body)?;
            if ctx.format != Format::Text {
                print!("{}", render_text(report));
            }
        }
        None => print!("{body}"),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("{} report has failing rows", report.check)))
    }
}
