mod data;
mod output;
mod sieve_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use modmoon_core::haupt::j_coefficients;
use modmoon_core::kring::KElement;
use modmoon_core::lattice::{e8, exterior_power_lattice, theta_counts, GramLattice};
use modmoon_core::replicate::{check_solution, extend_cminus, Bounds};
use modmoon_core::sieve::PRIMES;
use modmoon_core::supersplit::{brute_force_kind, cohomology_series, split, Kind};
use modmoon_core::BigInt;

use output::{Format, Report};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or inputs: exit 2.
    Usage(String),
    /// A computation found an inconsistency or mismatch: exit 1.
    Failure(String),
}

#[derive(Parser)]
#[command(name = "modmoon", version, about = "Tate cohomology computations for the monster module")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "tsv")]
    format: Format,
    /// Seed table (defaults to the shipped table)
    #[arg(long, global = true)]
    seeds: Option<PathBuf>,
    /// Worker threads for the sieve (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Also write the report to this file
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 3-adic branch-and-prune over c-(1), c-(2), c-(4), c-(5)
    Sieve {
        #[command(subcommand)]
        action: SieveAction,
    },
    /// Sieve, inequality filter and conclusion for each prime
    #[command(name = "verify-theorem41")]
    Verify {
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long, default_value_t = 29)]
        depth: u8,
    },
    /// Extend or check c- series against a class's c+
    Replicate {
        #[command(subcommand)]
        action: ReplicateAction,
    },
    /// Hauptmodul series
    Haupt {
        #[command(subcommand)]
        action: HauptAction,
    },
    /// Lattice computations
    Lattice {
        #[command(subcommand)]
        action: LatticeAction,
    },
    /// Graded Tate cohomology of h(A) and h_omega(A)
    Cohomology {
        #[command(subcommand)]
        action: CohomologyAction,
    },
    /// Ordinary and super parts of a pair of Hauptmoduls
    Split {
        #[arg(long)]
        class: String,
        #[arg(long)]
        sigma_class: String,
    },
    /// Coefficients of j - 744
    Jcoeffs {
        #[arg(long, default_value_t = 10)]
        terms: u32,
    },
    /// Operations in the representation ring of Z_p[G]
    Kring {
        #[arg(long)]
        prime: u32,
        /// Multiplicities of (Z, Z_p[G], I)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        element: Vec<i64>,
        #[arg(long, value_enum)]
        op: KringOp,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum SieveAction {
    Run {
        #[arg(long)]
        prime: u32,
        #[arg(long, default_value_t = 29)]
        depth: u8,
    },
    All {
        #[arg(long, default_value_t = 29)]
        depth: u8,
    },
}

#[derive(clap::Args)]
struct SeedArgs {
    /// Row of the seed table supplying c-(1), c-(2), c-(4), c-(5) and p
    #[arg(long, conflicts_with = "values")]
    class: Option<String>,
    /// Explicit c-(1),c-(2),c-(4),c-(5)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "prime")]
    values: Vec<i64>,
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long, default_value_t = 45)]
    terms: u32,
}

#[derive(Subcommand)]
enum ReplicateAction {
    Extend(SeedArgs),
    Check(SeedArgs),
}

#[derive(Subcommand)]
enum HauptAction {
    Extend {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 45)]
        terms: u32,
    },
}

#[derive(Subcommand)]
enum LatticeAction {
    Theta {
        #[arg(long, value_enum, default_value = "ext2-e8")]
        construct: Construct,
        #[arg(long, default_value_t = 4)]
        max_norm: i64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Construct {
    E8,
    #[value(name = "ext2-e8")]
    Ext2E8,
}

#[derive(Subcommand)]
enum CohomologyAction {
    Series {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 8)]
        bound: u32,
        /// Compute from the explicit truncated algebra instead of the closed form
        #[arg(long)]
        brute_force: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KringOp {
    Lambda,
    Sym,
    Adams,
    Tate,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

/// Run a command; the flag is false when the result itself signals a mismatch.
fn dispatch(cli: &Cli) -> Result<(Report, bool), CliError> {
    let seeds = data::load_seeds(cli.seeds.as_deref())?;
    match &cli.command {
        Command::Sieve { action: SieveAction::Run { prime, depth } } => {
            let r = sieve_cmd::sieve_run(&seeds, *prime, *depth)?;
            let ok = r.summary.get("status").map(|s| s == "match").unwrap_or(false);
            Ok((r, ok))
        }
        Command::Sieve { action: SieveAction::All { depth } } => sieve_cmd::sieve_all(&seeds, *depth),
        Command::Verify { prime, depth } => {
            let primes: Vec<u32> = match prime {
                Some(p) => vec![*p],
                None => PRIMES.to_vec(),
            };
            sieve_cmd::verify(&seeds, &primes, *depth)
        }
        Command::Replicate { action } => {
            let (args, check) = match action {
                ReplicateAction::Extend(a) => (a, false),
                ReplicateAction::Check(a) => (a, true),
            };
            let (p, start): (u32, [BigInt; 4]) = match (&args.class, args.values.as_slice()) {
                (Some(c), _) => {
                    let row = data::seed(&seeds, c)?;
                    (args.prime.unwrap_or(row.p), row.sieve_seeds())
                }
                (None, [a, b, c, d]) => (args.prime.unwrap(), [*a, *b, *c, *d].map(BigInt::from)),
                _ => return Err(usage("give --class or four --values with --prime")),
            };
            let class = data::seed(&seeds, &format!("{p}A"))?;
            let cplus = data::extended(class, 2 * args.terms + 10)?;
            let cminus = extend_cminus(start, &cplus, p, args.terms).map_err(failure)?;
            if !check {
                let mut r = Report::new("replicate extend", &["n", "c_minus"]);
                for (n, c) in cminus.iter().enumerate().skip(1) {
                    r.row([n.to_string(), c.to_string()]);
                }
                r.note("p", p);
                return Ok((r, true));
            }
            let bounds = Bounds { max_r: 5, max_index: args.terms };
            let rep = check_solution(&cminus, &cplus, p, bounds).map_err(failure)?;
            let mut r = Report::new("replicate check", &["m", "n", "value", "constrained"]);
            for (m, n, v) in &rep.violations {
                r.row([m.to_string(), n.to_string(), v.to_string(), "yes".into()]);
            }
            for (m, n, v) in &rep.unconstrained {
                r.row([m.to_string(), n.to_string(), v.to_string(), "no".into()]);
            }
            r.note("p", p);
            r.note("checked", rep.checked);
            r.note("violations", rep.violations.len());
            Ok((r, rep.violations.is_empty()))
        }
        Command::Haupt { action: HauptAction::Extend { class, terms } } => {
            let row = data::seed(&seeds, class)?;
            let c = data::extended(row, *terms)?;
            let mut r = Report::new("haupt extend", &["n", "c"]);
            r.row(["-1".to_string(), row.coeff(-1).to_string()]);
            for (n, x) in c.iter().enumerate().skip(1) {
                r.row([n.to_string(), x.to_string()]);
            }
            r.note("label", &row.label);
            Ok((r, true))
        }
        Command::Lattice { action: LatticeAction::Theta { construct, max_norm } } => {
            let l: GramLattice = match construct {
                Construct::E8 => e8(),
                Construct::Ext2E8 => exterior_power_lattice(&e8(), 2).map_err(failure)?,
            };
            let counts = theta_counts(&l, *max_norm).map_err(failure)?;
            let mut r = Report::new("lattice theta", &["norm", "count"]);
            for (norm, c) in &counts {
                r.row([norm.to_string(), c.to_string()]);
            }
            r.note("rank", l.rank());
            r.note("det", l.det());
            Ok((r, true))
        }
        Command::Cohomology { action: CohomologyAction::Series { kind, p, bound, brute_force } } => {
            let k = Kind::parse(kind).ok_or_else(|| {
                usage(format!("unknown kind {kind}; expected one of h_regular, h_I, h_omega_regular, h_omega_I"))
            })?;
            let s = if *brute_force { brute_force_kind(k, *p, *bound) } else { cohomology_series(k, *p, *bound) }
                .map_err(usage)?;
            let mut r = Report::new("cohomology series", &["degree", "ordinary", "super"]);
            for (d, (o, s)) in s.dims.iter().enumerate() {
                r.row([d.to_string(), o.to_string(), s.to_string()]);
            }
            r.note("kind", k.name());
            r.note("p", p);
            Ok((r, true))
        }
        Command::Split { class, sigma_class } => {
            let a = data::seed(&seeds, class)?;
            let b = data::seed(&seeds, sigma_class)?;
            let (ord, sup) = split(&a.coeffs, &b.coeffs).map_err(failure)?;
            let mut r = Report::new("split", &["n", "ordinary", "super"]);
            for (n, o) in &ord {
                r.row([n.to_string(), o.to_string(), sup[n].to_string()]);
            }
            Ok((r, true))
        }
        Command::Jcoeffs { terms } => {
            let c = j_coefficients(*terms);
            let mut r = Report::new("jcoeffs", &["n", "c"]);
            for (n, x) in c.iter().enumerate().skip(1) {
                r.row([n.to_string(), x.to_string()]);
            }
            Ok((r, true))
        }
        Command::Kring { prime, element, op, n } => {
            let [a, b, c] = element.as_slice() else { return Err(usage("--element takes three integers")) };
            let x = KElement::from_ints(*prime, *a, *b, *c).map_err(usage)?;
            let mut r = Report::new("kring", &["component", "value"]);
            let y = match op {
                KringOp::Lambda => x.lambda_n(*n),
                KringOp::Sym => x.sym_n(*n),
                KringOp::Adams => x.adams_n(*n),
                KringOp::Tate => {
                    let (h0, h1) = x.tate_dims().map_err(usage)?;
                    r.row(["h0".to_string(), h0.to_string()]);
                    r.row(["h1".to_string(), h1.to_string()]);
                    return Ok((r, true));
                }
            }
            .map_err(usage)?;
            r.row(["Z".to_string(), y.a.to_string()]);
            r.row(["G".to_string(), y.b.to_string()]);
            r.row(["I".to_string(), y.c.to_string()]);
            Ok((r, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    match dispatch(&cli) {
        Ok((report, ok)) => {
            let text = report.render(cli.format);
            print!("{text}");
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write report {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

