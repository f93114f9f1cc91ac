use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maclane::base_field::{parse_rational, PolyK, Prime};
use maclane::maclane_chain::{Chain, ChainJson};
use maclane::newton_polygon::{lower_hull, render_ascii, Cloud};
use maclane::om_factorizer::{om_factor_with, OmOptions};
use maclane::ordered_groups::GroupVec;
use maclane::{selftest, Error};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "maclane",
    version,
    about = "MacLane chains, Newton polygons, residual polynomials and OM factorization over Q_p"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Factor a monic squarefree polynomial over Q_p into OM leaves.
    Factor {
        poly: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Newton polygon of a polynomial with respect to the top level of a chain.
    Newton {
        poly: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Residual polynomial of a polynomial at the top level of a chain.
    Residual {
        poly: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print a chain, optionally augmented by a key polynomial.
    Chain {
        /// Key polynomial to append on top.
        poly: Option<String>,
        /// Value of the new key polynomial.
        #[arg(long, requires = "poly")]
        gamma: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the embedded invariant checks.
    Selftest {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(short, long)]
    prime: Option<u64>,
    /// A chain JSON file, or `gauss` for the Gauss valuation.
    #[arg(long, default_value = "gauss")]
    chain: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    max_depth: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::NotPrime(_) => Failure::Usage(e.to_string()),
            e => Failure::Math(e),
        }
    }
}

type Out = Result<String, Failure>;

fn prime(opts: &Opts) -> Result<Prime, Failure> {
    let p = opts.prime.ok_or_else(|| Failure::Usage("missing -p/--prime".into()))?;
    Ok(Prime::new(p)?)
}

fn load_chain(opts: &Opts) -> Result<Chain, Failure> {
    if opts.chain == "gauss" {
        return Ok(Chain::gauss(prime(opts)?));
    }
    let text = std::fs::read_to_string(&opts.chain).map_err(|e| Failure::Usage(format!("{}: {e}", opts.chain)))?;
    let cj: ChainJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", opts.chain)))?;
    if let Some(p) = opts.prime {
        if p != cj.p.get() {
            return Err(Failure::Usage(format!("-p {p} disagrees with the chain prime {}", cj.p)));
        }
    }
    Ok(Chain::from_json_value(&cj)?)
}

fn emit(format: Format, v: Value, text: String) -> String {
    match format {
        Format::Json => format!("{v}\n"),
        Format::Text => text,
    }
}

fn factor(poly: &str, opts: &Opts) -> Out {
    let f = PolyK::parse(poly)?;
    let p = prime(opts)?;
    let tree = om_factor_with(&f, p, OmOptions { max_depth: opts.max_depth, seed: opts.seed })?;
    let report = tree.report();
    let mut text = format!("{} over Q_{}: {} factor(s)\n", report.f, report.p, report.leaves.len());
    for (i, l) in report.leaves.iter().enumerate() {
        let _ = writeln!(text, "  [{i}] e = {}, f = {}, depth {}", l.e, l.f, l.depth);
        let _ = writeln!(text, "      keys   {}", l.phi_chain.join(", "));
        let _ = writeln!(text, "      gammas {}", l.gammas.join(", "));
        let _ = writeln!(text, "      psi    {}", l.psi);
        let _ = writeln!(text, "      approx {}", l.approx);
    }
    let _ = writeln!(text, "certified: {}", report.certified);
    Ok(emit(opts.format, serde_json::to_value(&report).expect("report serializes"), text))
}

fn newton(poly: &str, opts: &Opts) -> Out {
    let f = PolyK::parse(poly)?;
    let c = load_chain(opts)?;
    let ex = c.expansion(c.depth(), &f)?;
    let cloud = Cloud::from_values(ex.iter().map(|a| a.value.clone().map(GroupVec::scalar)).collect());
    let n = lower_hull(&cloud)?;
    let mut text = render_ascii(&cloud, &n);
    let _ = writeln!(text, "key {}, gamma {}", c.top().phi, c.top().gamma);
    Ok(emit(opts.format, n.to_json(), text))
}

fn residual(poly: &str, opts: &Opts) -> Out {
    let f = PolyK::parse(poly)?;
    let c = load_chain(opts)?;
    let r = c.residual(&f)?;
    let t = c.tower();
    let text = format!("s = {}, s' = {}, u = {}\nR = {}\n", r.s, r.sprime, r.u, t.fmt_poly(&r.poly, "y"));
    Ok(emit(opts.format, r.to_json(t), text))
}

fn chain(poly: Option<&str>, gamma: Option<&str>, opts: &Opts) -> Out {
    let mut c = load_chain(opts)?;
    if let Some(phi) = poly {
        let phi = PolyK::parse(phi)?;
        let gamma = match gamma {
            Some(g) => parse_rational(g)?,
            None => return Err(Failure::Usage("--gamma is required with a key polynomial".into())),
        };
        c = c.augment(&phi, &gamma)?;
    }
    let js = c.to_json();
    Ok(match opts.format {
        Format::Json => format!("{js}\n"),
        Format::Text => {
            let mut text = format!("chain over Q_{}, depth {}\n", c.prime(), c.depth());
            for (i, l) in c.levels().iter().enumerate() {
                let f = l.f.map_or("-".to_string(), |f| f.to_string());
                let _ = writeln!(
                    text,
                    "  [{i}] phi = {}, gamma = {}, e = {}, f = {f}, h = {}",
                    l.phi,
                    l.gamma,
                    l.e(),
                    l.h()
                );
            }
            text
        }
    })
}

fn run_selftest(opts: &Opts) -> (String, bool) {
    let report = selftest::run(opts.seed);
    let mut text = String::new();
    for c in &report.checks {
        let _ = writeln!(text, "{:<16} {}", c.name, if c.ok { "ok" } else { "FAILED" });
        if let Some(d) = &c.detail {
            let _ = writeln!(text, "    {d}");
        }
    }
    let v = serde_json::to_value(&report).expect("report serializes");
    (emit(opts.format, v, text), report.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out = match &cli.verb {
        Verb::Factor { poly, opts } => factor(poly, opts),
        Verb::Newton { poly, opts } => newton(poly, opts),
        Verb::Residual { poly, opts } => residual(poly, opts),
        Verb::Chain { poly, gamma, opts } => chain(poly.as_deref(), gamma.as_deref(), opts),
        Verb::Selftest { opts } => {
            let (text, ok) = run_selftest(opts);
            print!("{text}");
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Math(e)) => {
            println!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
            ExitCode::from(2)
        }
    }
}
