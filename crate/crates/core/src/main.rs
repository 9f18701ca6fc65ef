use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use syzslope::atlas::{run_atlas, write_lines, AtlasJob, ResultCache};
use syzslope::bundle::CertVerdict;
use syzslope::constructions::{a_interval, bound_b, lemma1_min_degree};
use syzslope::report::{format_rank_table, prop6_report, prop6_thresholds, verify_lemma1};
use syzslope::slope::semistable_verdict;
use syzslope::{
    certify, construction1, construction1_dropped, e81_generators, e91_generators, k_of,
    mu_max_bruteforce, mu_max_closure, witness_subset, ConstructionParams, Error, MonomialSet,
    Rational, Result,
};

#[derive(Parser)]
#[command(
    name = "syzslope",
    version,
    about = "Exact slopes of monomial syzygy bundles"
)]
struct Cli {
    /// Emit JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Use the brute-force subset oracle instead of the gcd-closure algorithm.
    #[arg(long, global = true)]
    oracle: bool,
    /// Add a decimal column next to exact values.
    #[arg(long, global = true)]
    approx: bool,
    /// Worker threads for parallel work.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Result cache file (JSON lines) for `atlas`.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal slope, witness and per-rank table of a monomial family.
    Mumax(MumaxArgs),
    /// Generate one of the built-in monomial families.
    Construct(ConstructArgs),
    /// Semistability certificate for a general kernel bundle E_{a,b}.
    Certify(CertifyArgs),
    /// Run the lemma1 or prop6 verification pipelines.
    Verify(VerifyArgs),
    /// Certificates for a grid of (n, b, a, d) cells, as JSON lines.
    Atlas(AtlasArgs),
    /// The multiplier bound k(n).
    K(KArgs),
    /// The slope bound B(n, d) and the admissible interval for A.
    Bound(BoundArgs),
}

#[derive(Args)]
struct MumaxArgs {
    /// Input file (JSON or text); `-` or nothing reads stdin.
    file: Option<PathBuf>,
    /// Inline comma-separated monomials, e.g. "x0^2,x1^2,x0*x1".
    #[arg(long)]
    set: Option<String>,
    /// Dimension for text input.
    #[arg(long)]
    n: Option<usize>,
    /// Also report the semistability verdict.
    #[arg(long)]
    verdict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    C1,
    E81,
    E91,
    Pure,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: u64,
    /// Construction parameter A as `p/q` (defaults to the left endpoint).
    #[arg(long = "A", value_name = "p/q", allow_hyphen_values = true)]
    a: Option<String>,
    /// Keep only the first m generators of the construction.
    #[arg(long)]
    m: Option<usize>,
    /// Write JSON to this path and text to the same path with `.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
    #[arg(long)]
    d: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Lemma1,
    Prop6,
}

#[derive(Args)]
struct VerifyArgs {
    target: Target,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: u64,
    /// For prop6: also search thresholds on `[3, SCAN]`.
    #[arg(long, value_name = "SCAN")]
    scan: Option<u32>,
}

#[derive(Args)]
struct AtlasArgs {
    /// `lo..hi` (inclusive) or a single value.
    #[arg(long)]
    n_range: String,
    #[arg(long)]
    b_range: String,
    /// Defaults to all covered `a` for each `(n, b)`.
    #[arg(long)]
    a_range: Option<String>,
    /// Comma-separated degrees; omitted means degree-free certificates.
    #[arg(long, value_delimiter = ',')]
    d: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KArgs {
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: u64,
}

/// Command outcome: success, or a verification that ran and failed.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Mumax(args) => mumax(cli, args),
        Command::Construct(args) => construct(cli, args),
        Command::Certify(args) => cert(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Atlas(args) => atlas(cli, args),
        Command::K(args) => {
            let k = k_of(args.n);
            if cli.json {
                println!("{}", json!({ "n": args.n, "k": k }));
            } else {
                println!("{k}");
            }
            Ok(Outcome::Pass)
        }
        Command::Bound(args) => bound(cli, args),
    }
}

fn fmt_value(value: &Rational, approx: bool) -> String {
    if approx {
        format!("{value}  (~{:.4})", value.to_f64())
    } else {
        value.to_string()
    }
}

fn fmt_linear(alpha: &Rational, beta: &Rational) -> String {
    if beta.is_negative() {
        format!("{alpha} d - {}", beta.abs())
    } else {
        format!("{alpha} d + {beta}")
    }
}

fn read_set(args: &MumaxArgs) -> Result<MonomialSet> {
    let text = match (&args.set, &args.file) {
        (Some(inline), None) => inline.clone(),
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParams(
                "give either a file or --set, not both".into(),
            ))
        }
        (None, Some(p)) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        (None, _) => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    if text.trim_start().starts_with('{') {
        MonomialSet::from_json(&text)
    } else {
        let n = args
            .n
            .ok_or_else(|| Error::InvalidParams("text input needs --n".into()))?;
        MonomialSet::from_text(&text, n)
    }
}

fn mumax(cli: &Cli, args: &MumaxArgs) -> Result<Outcome> {
    let set = read_set(args)?;
    let verdict = if args.verdict {
        Some(semistable_verdict(&set)?)
    } else {
        None
    };
    let profile = if cli.oracle {
        mu_max_bruteforce(&set)?
    } else {
        mu_max_closure(&set)?
    };
    let witness = witness_subset(&profile, &set, profile.mu_max_witness.r)?;
    if cli.json {
        let mut v: serde_json::Value = serde_json::from_str(&profile.to_json())?;
        v["witness_subset"] = json!(witness.iter().map(|m| m.to_string()).collect::<Vec<_>>());
        if let Some(verdict) = &verdict {
            v["verdict"] = serde_json::to_value(verdict)?;
        }
        println!("{v}");
        return Ok(Outcome::Pass);
    }
    println!("mu_max = {}", fmt_value(&profile.mu_max, cli.approx));
    println!(
        "witness: r = {} (rank {}), gcd = {}",
        profile.mu_max_witness.r,
        profile.mu_max_witness.r - 1,
        profile.mu_max_witness.gcd
    );
    let names: Vec<String> = witness.iter().map(|m| m.to_string()).collect();
    println!("  {}", names.join(", "));
    print!("{}", format_rank_table(&profile, cli.approx));
    if let Some(v) = verdict {
        println!("mu = {}", fmt_value(&v.mu, cli.approx));
        println!("semistable: {}", if v.semistable { "yes" } else { "no" });
        println!("stable: {}", if v.stable_strictly { "yes" } else { "no" });
    }
    Ok(Outcome::Pass)
}

fn construct(cli: &Cli, args: &ConstructArgs) -> Result<Outcome> {
    let need_n = || {
        args.n
            .ok_or_else(|| Error::InvalidParams("this kind needs --n".into()))
    };
    let small_d = || {
        u32::try_from(args.d).map_err(|_| Error::OutOfRange(format!("degree {} too large", args.d)))
    };
    if args.a.is_some() && !matches!(args.kind, Kind::C1) {
        return Err(Error::InvalidParams("--A only applies to c1".into()));
    }
    if args.m.is_some() && !matches!(args.kind, Kind::C1) {
        return Err(Error::InvalidParams("--m only applies to c1".into()));
    }
    let set = match args.kind {
        Kind::C1 => {
            let n = need_n()?;
            let params = match &args.a {
                Some(a) => ConstructionParams::new(n, args.d, a.parse::<Rational>()?)?,
                None => ConstructionParams::with_default_a(n, args.d)?,
            };
            match args.m {
                Some(m) => construction1_dropped(&params, m)?,
                None => construction1(&params)?,
            }
        }
        Kind::E81 => e81_generators(small_d()?)?,
        Kind::E91 => e91_generators(small_d()?)?,
        Kind::Pure => MonomialSet::pure_powers(need_n()?, small_d()?)?,
    };
    if let Some(out) = &args.out {
        std::fs::write(out, set.to_json() + "\n")?;
        std::fs::write(out.with_extension("txt"), set.to_text())?;
    }
    if cli.json {
        println!("{}", set.to_json());
    } else {
        print!("{}", set.to_text());
    }
    Ok(Outcome::Pass)
}

fn cert(cli: &Cli, args: &CertifyArgs) -> Result<Outcome> {
    let c = certify(args.a, args.b, args.n, args.d)?;
    if cli.json {
        println!("{}", c.to_json());
        return Ok(Outcome::Pass);
    }
    println!("E_{{{},{}}} on P^{}", c.a, c.b, c.n);
    println!("slope = {} d", c.mu_coefficient);
    if !c.covered {
        println!("NOT COVERED (a = {}b - {})", c.m, c.j);
    } else {
        let dec = c.decomposition.expect("covered");
        match (dec.s, dec.l) {
            (Some(s), Some(l)) => {
                println!("covered: m = {}, j = {}, s = {s}, l = {l}", dec.m, dec.j)
            }
            _ => println!("covered: m = {}, j = {} (direct sum)", dec.m, dec.j),
        }
        if let Some(margin) = &c.margin {
            println!("margin = {}", fmt_linear(&margin.alpha, &margin.beta));
        }
        if let Some(t) = &c.top_family {
            println!(
                "E_{{mb-1,b}} thresholds: stated {}, derived {}, sign term {}",
                t.stated
                    .value
                    .as_ref()
                    .map_or("undefined".into(), |v| v.to_string()),
                t.derived
                    .value
                    .as_ref()
                    .map_or("undefined".into(), |v| v.to_string()),
                t.sign_term
            );
        }
        match c.verdict {
            CertVerdict::SemistableForDGeq { d0 } => println!("semistable for d >= {d0}"),
            _ => println!("uncertified: the margin is not eventually positive"),
        }
        if let (Some(d), Some(holds)) = (c.d, c.holds_at_d) {
            println!(
                "at d = {d}: {}",
                if holds { "certified" } else { "not certified" }
            );
        }
    }
    for w in &c.warnings {
        println!("note: {w}");
    }
    Ok(Outcome::Pass)
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<Outcome> {
    match args.target {
        Target::Lemma1 => {
            let n = args
                .n
                .ok_or_else(|| Error::InvalidParams("lemma1 needs --n".into()))?;
            let r = verify_lemma1(n, args.d, cli.oracle)?;
            if cli.json {
                println!("{}", serde_json::to_string(&r)?);
            } else {
                println!(
                    "construction (n = {n}, d = {}, A = {}): {} generators",
                    args.d,
                    r.a_low,
                    r.profile.per_size.keys().last().copied().unwrap_or(0)
                );
                println!("mu_max = {}", fmt_value(&r.profile.mu_max, cli.approx));
                println!("B      = {}", fmt_value(&r.bound, cli.approx));
                let rel = if r.profile.mu_max == r.bound {
                    "equality"
                } else {
                    "mu_max <= B"
                };
                println!(
                    "{}",
                    if r.pass {
                        format!("PASS ({rel})")
                    } else {
                        "FAIL".into()
                    }
                );
            }
            Ok(if r.pass { Outcome::Pass } else { Outcome::Fail })
        }
        Target::Prop6 => {
            if args.n.is_some_and(|n| n != 2) {
                return Err(Error::InvalidParams("prop6 lives on P^2".into()));
            }
            let d = u32::try_from(args.d)
                .map_err(|_| Error::OutOfRange(format!("degree {} too large", args.d)))?;
            if d < 3 {
                return Err(Error::Hypothesis(format!("prop6 needs d >= 3, got {d}")));
            }
            let r = prop6_report(d)?;
            let thresholds = args.scan.map(prop6_thresholds).transpose()?;
            if cli.json {
                let mut v = serde_json::to_value(&r)?;
                v["pass"] = json!(r.pass());
                v["strict"] = json!(r.strict());
                if let Some(t) = &thresholds {
                    v["thresholds"] = serde_json::to_value(t)?;
                }
                println!("{v}");
            } else {
                println!(
                    "d = {d}, mu(E_{{17,2}}) = {}",
                    fmt_value(&r.mu_e17_2, cli.approx)
                );
                println!("E_{{8,1}}:");
                print!("{}", format_rank_table(&r.e81, cli.approx));
                println!("E_{{9,1}}:");
                print!("{}", format_rank_table(&r.e91, cli.approx));
                for c in &r.comparisons {
                    let mark = match (c.holds, c.strict) {
                        (true, true) => "<",
                        (true, false) => "=",
                        _ => ">",
                    };
                    let tag = if c.required { "" } else { " [info]" };
                    println!("  {} {mark} {}  {}{tag}", c.lhs, c.rhs, c.label);
                }
                for note in &r.notes {
                    println!("note: {note}");
                }
                if let Some(t) = &thresholds {
                    let show = |x: Option<u32>| x.map_or("none".to_string(), |d| d.to_string());
                    println!("thresholds on [3, {}]:", t.searched_up_to);
                    println!("  mu_max(E_{{8,1}}) < mu: d >= {}", show(t.e81_mu_max));
                    println!("  mu_max(E_{{9,1}}) < mu: d >= {}", show(t.e91_mu_max));
                    println!("  argument holds: d >= {}", show(t.argument));
                    println!("  argument strict: d >= {}", show(t.argument_strict));
                }
                let verdict = match (r.pass(), r.strict()) {
                    (true, true) => "PASS (stable)",
                    (true, false) => "PASS (semistable, some comparisons tie)",
                    _ => "FAIL",
                };
                println!("{verdict}");
            }
            Ok(if r.pass() {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
    }
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T)> {
    let parse = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| Error::Parse(format!("bad range bound `{x}` in `{s}`")))
    };
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => {
            let v = parse(s)?;
            Ok((parse(s)?, v))
        }
    }
}

fn atlas(cli: &Cli, args: &AtlasArgs) -> Result<Outcome> {
    let job = AtlasJob {
        n_range: parse_range(&args.n_range)?,
        b_range: parse_range(&args.b_range)?,
        a_range: args.a_range.as_deref().map(parse_range).transpose()?,
        d_list: args.d.clone(),
    };
    if job.n_range.1 > syzslope::monomial::MAX_DIMENSION {
        return Err(Error::InvalidDimension(job.n_range.1));
    }
    let cache = match &cli.cache {
        Some(p) => ResultCache::open(p)?,
        None => ResultCache::in_memory(),
    };
    let (lines, summary) = run_atlas(&job, &cache, None)?;
    match &args.out {
        Some(p) => write_lines(p, &lines)?,
        None => lines.iter().for_each(|l| println!("{l}")),
    }
    eprintln!(
        "{} cells, {} from cache, {} covered, {} certified",
        summary.cells, summary.from_cache, summary.covered, summary.certified
    );
    Ok(Outcome::Pass)
}

fn bound(cli: &Cli, args: &BoundArgs) -> Result<Outcome> {
    if args.n < 2 {
        return Err(Error::InvalidParams(format!("need n >= 2, got {}", args.n)));
    }
    let b = bound_b(args.n, args.d);
    let interval = a_interval(args.n, args.d);
    let min = lemma1_min_degree(args.n);
    if cli.json {
        println!(
            "{}",
            json!({
                "n": args.n,
                "d": args.d,
                "B": b,
                "A_low": interval.as_ref().map(|i| &i.0),
                "A_high": interval.as_ref().map(|i| &i.1),
                "min_d": min,
            })
        );
    } else {
        println!("B = {}", fmt_value(&b, cli.approx));
        match interval {
            Some((lo, hi)) => println!("A in [{lo}, {hi}]"),
            None => println!("A interval empty (needs d >= {min})"),
        }
    }
    Ok(Outcome::Pass)
}
