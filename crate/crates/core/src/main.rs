use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nefcert::certify::{certify_effective, verify_certificate, CertifyOptions, EffectivityCertificate};
use nefcert::divisors::{family_class, reduce_degrees};
use nefcert::fcurves::min_fcurve_degree;
use nefcert::grid::{grid_json, grid_table, run_grid, GridOptions};
use nefcert::keel::{are_linearly_equivalent, normal_form};
use nefcert::rational::format_rational;
use nefcert::report::symmetrize_report;
use nefcert::{DegreeProblem, DivisorClass, Error, Family, ProperPartition, StableTree};

#[derive(Parser)]
#[command(
    name = "nefcert",
    version,
    about = "Boundary certificates for divisor families on M_{0,n}"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Comma-separated degrees d_1,...,d_n in marked-point order.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    degrees: Vec<i64>,
    #[arg(long)]
    m: i64,
    /// D or E.
    #[arg(long)]
    family: Family,
}

#[derive(Subcommand)]
enum Command {
    /// Print the divisor class of a family.
    Build {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Print the representative with no boundary terms of side size 2 (n >= 5).
        #[arg(long)]
        normal_form: bool,
        /// Also print the symmetric profile on standard error.
        #[arg(long)]
        profile: bool,
    },
    /// Build and check an effectivity certificate.
    Certify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Stable tree file whose partitions must get coefficient zero.
        #[arg(long, value_name = "FILE")]
        avoid_tree: Option<PathBuf>,
        /// Block of a partition that must get a positive coefficient, e.g. 1,2,5.
        #[arg(long, value_delimiter = ',', value_name = "BLOCK")]
        positive_on: Option<Vec<usize>>,
        /// Output file; standard output when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify { file: PathBuf },
    /// Minimum degree of the family class over all F-curves.
    Fnef {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Decide linear equivalence of two class files.
    Equiv { first: PathBuf, second: PathBuf },
    /// Print the normal form of a class file.
    NormalForm { file: PathBuf },
    /// Certify and verify every reduced problem in a range.
    Grid {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<i64>,
        #[arg(long)]
        family: Family,
        /// Also scan F-curves for every class.
        #[arg(long)]
        fcurves: bool,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CertificateSearchFailed(_) | Error::UnbalanceNotFound(_) | Error::Singular(_) => {
                Failure::Math(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<ExitCode, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn problem_of(args: &ProblemArgs) -> std::result::Result<DegreeProblem, Failure> {
    let problem = DegreeProblem::new(args.degrees.clone(), args.m)?;
    if !problem.is_reduced() {
        match reduce_degrees(&problem) {
            Ok((reduced, reduction)) => {
                eprintln!("note: degrees reduced mod {}: {:?}", args.m, reduced.degrees());
                if !reduction.dropped.is_empty() {
                    eprintln!("note: points with zero residue: {:?}", reduction.dropped);
                }
            }
            Err(e) => eprintln!("note: {e}"),
        }
    }
    Ok(problem)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build {
            problem,
            normal_form: nf,
            profile,
        } => {
            let p = problem_of(&problem)?;
            let mut class = family_class(problem.family, &p)?;
            if profile {
                eprintln!("profile: {}", symmetrize_report(&class));
            }
            if nf {
                class = normal_form(&class)?;
            }
            println!("{}", class.to_json());
        }
        Command::Certify {
            problem,
            avoid_tree,
            positive_on,
            out,
        } => {
            let p = problem_of(&problem)?;
            let n = p.n();
            let options = CertifyOptions {
                avoid_tree: avoid_tree
                    .map(|path| StableTree::from_json(&read(&path)?).map_err(Failure::from))
                    .transpose()?,
                positive_on: positive_on
                    .map(|block| ProperPartition::new(&block, n).map_err(Failure::from))
                    .transpose()?,
            };
            let cert = certify_effective(&p, problem.family, &options)?;
            let text = cert.to_json();
            match out {
                Some(path) => {
                    fs::write(&path, text + "\n")
                        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    println!(
                        "certificate written to {} ({} nonzero coefficients)",
                        path.display(),
                        cert.boundary_coefficients.len()
                    );
                }
                None => println!("{text}"),
            }
        }
        Command::Verify { file } => {
            let cert = EffectivityCertificate::from_json(&read(&file)?)?;
            let verdict = verify_certificate(&cert);
            if verdict.accepted() {
                println!("accept");
            } else {
                println!("reject");
                for f in &verdict.failures {
                    println!("  {f}");
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Fnef { problem } => {
            let p = problem_of(&problem)?;
            let (min, witness) = min_fcurve_degree(&family_class(problem.family, &p)?)?;
            println!("minimum F-degree: {}", format_rational(&min));
            println!("witness: {witness}");
        }
        Command::Equiv { first, second } => {
            let a = DivisorClass::from_json(&read(&first)?)?;
            let b = DivisorClass::from_json(&read(&second)?)?;
            if are_linearly_equivalent(&a, &b)?.equivalent {
                println!("equivalent");
            } else {
                println!("not equivalent");
                return Ok(ExitCode::from(1));
            }
        }
        Command::NormalForm { file } => {
            let a = DivisorClass::from_json(&read(&file)?)?;
            println!("{}", normal_form(&a)?.to_json());
        }
        Command::Grid {
            n_min,
            n_max,
            m_list,
            family,
            fcurves,
            json,
        } => {
            if n_min < 4 || n_max < n_min || n_max > 12 {
                return Err(Failure::Usage(format!(
                    "need 4 <= n-min <= n-max <= 12, got {n_min}..={n_max}"
                )));
            }
            let cells = run_grid(&GridOptions {
                n_min,
                n_max,
                moduli: m_list,
                family,
                fcurves,
            });
            if json {
                println!("{}", grid_json(&cells));
            } else {
                print!("{}", grid_table(&cells));
            }
            if !cells.iter().all(|c| c.ok()) {
                return Err(Failure::Math("some grid problems were not certified".into()));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(3)
        }
    }
}
