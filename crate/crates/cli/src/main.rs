//! `morita`: construct and verify symplectic expansions, compute Koszul
//! homology, Johnson images and infinitesimal Morita classes.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morita_core::document::{automorphism_from_json, automorphism_to_json, expansion_from_json, expansion_to_json};
use morita_core::jacobi::format_tree_document;
use morita_core::johnson::{morita_mk, random_ic_element, tau_bracket_check, tau_to_trees, tau_truncated};
use morita_core::koszul::{capital_phi, homology_dims, phi_rank};
use morita_core::suite::{run_criterion, run_suite, DEFAULT_SEED};
use morita_core::symplectic::{construct_symplectic, paper_example_expansion, verify_symplectic};
use morita_core::tensor::{basis_expansion, magnus_expansion, ExpansionMap};
use morita_core::Error;

#[derive(Parser)]
#[command(name = "morita", version, about = "Exact computations with symplectic expansions, tree diagrams and Johnson maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, print and verify expansions.
    #[command(subcommand)]
    Expand(ExpandCmd),
    /// Homology of free nilpotent Lie algebras.
    #[command(subcommand)]
    Homology(HomologyCmd),
    /// The fission map into H_3.
    #[command(subcommand)]
    Phi(PhiCmd),
    /// Truncated total Johnson map of an automorphism.
    #[command(subcommand)]
    Johnson(JohnsonCmd),
    /// Infinitesimal Morita homomorphism.
    #[command(subcommand)]
    Morita(MoritaCmd),
    /// The seeded property suite.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Args)]
struct Output {
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExpandCmd {
    /// Construct a symplectic expansion degree by degree.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        /// Log-side truncation degree.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Check that an expansion document is symplectic.
    Verify {
        /// Expansion document; stdin when omitted or `-`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Log-side truncation degree.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// The explicit degree-4 symplectic expansion.
    PaperExample {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[command(flatten)]
        output: Output,
    },
    /// The Magnus expansion `h -> 1 + h`.
    Magnus {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[command(flatten)]
        output: Output,
    },
    /// The expansion `h -> exp(h)`.
    Basis {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum HomologyCmd {
    /// Degree-wise dimensions of H_n(L / L_{>K}).
    Dims {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        class: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        n: u32,
    },
}

#[derive(Subcommand)]
enum PhiCmd {
    /// Rank of Phi on trees of degrees K..2K against dim H_3.
    Rank {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        class: u32,
    },
}

#[derive(Subcommand)]
enum JohnsonCmd {
    /// tau_[K,2K) of an automorphism document, with its trees.
    Tau {
        #[arg(long)]
        aut: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// A seeded random omega-fixing automorphism in IC[K].
    Random {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncation degree, at least 2K.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum MoritaCmd {
    /// m_K of an automorphism document, checked against Phi(eta^-1 tau).
    Mk {
        #[arg(long)]
        aut: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Run all criteria, or one with --only.
    Run {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
        only: Option<u32>,
    },
}

/// Exit statuses: verification failures are 1, usage and input errors 2.
enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Invariant(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
    Ok(s)
}

fn emit(text: &str, output: &Output) -> Outcome {
    match &output.out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_expansion(theta: &ExpansionMap, output: &Output) -> Outcome {
    emit(&expansion_to_json(theta), output)
}

fn expand(cmd: ExpandCmd) -> Outcome {
    match cmd {
        ExpandCmd::Construct { genus, degree, output } => {
            emit_expansion(&construct_symplectic(genus as usize, degree as usize)?, &output)
        }
        ExpandCmd::PaperExample { genus, output } => emit_expansion(&paper_example_expansion(genus as usize)?, &output),
        ExpandCmd::Magnus { genus, degree, output } => {
            emit_expansion(&magnus_expansion(genus as usize, degree as usize), &output)
        }
        ExpandCmd::Basis { genus, degree, output } => {
            emit_expansion(&basis_expansion(genus as usize, degree as usize), &output)
        }
        ExpandCmd::Verify { input, degree } => {
            let theta = expansion_from_json(&read_input(input.as_deref())?)?;
            let report = verify_symplectic(&theta, degree as usize);
            println!("{report}");
            if report.is_symplectic() {
                Ok(())
            } else {
                Err(Failure::Verification(String::new()))
            }
        }
    }
}

fn read_aut(path: &Path) -> Result<morita_core::johnson::LieAutomorphism, Failure> {
    Ok(automorphism_from_json(&read_input(Some(path))?)?)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Expand(cmd) => expand(cmd),
        Command::Homology(HomologyCmd::Dims { genus, class, n }) => {
            let dims = homology_dims(genus as usize, class as usize, n as usize)?;
            println!("H_{n} of L/L_>{class}, genus {genus}");
            println!("degree\tdim");
            for (d, dim) in &dims {
                println!("{d}\t{dim}");
            }
            println!("total\t{}", dims.values().sum::<usize>());
            Ok(())
        }
        Command::Phi(PhiCmd::Rank { genus, class }) => {
            let (rank, total) = phi_rank(genus as usize, class as usize)?;
            println!("rank of Phi = {rank}, dim H_3 = {total}");
            if rank == total {
                Ok(())
            } else {
                Err(Failure::Verification("Phi is not onto".into()))
            }
        }
        Command::Johnson(JohnsonCmd::Tau { aut, k }) => {
            let psi = read_aut(&aut)?;
            let k = k as usize;
            let tau = tau_truncated(&psi, k)?;
            println!("tau_[{k},{}):", 2 * k);
            for j in k..2 * k {
                println!("  degree {j}: {}", tau.tree_degree_part(j));
            }
            if !tau_bracket_check(&psi, k)? {
                return Err(Failure::Verification("bracket check failed: the automorphism does not fix omega".into()));
            }
            println!("bracket check: passed");
            println!("trees:");
            print!("{}", format_tree_document(&tau_to_trees(&psi, k)?));
            Ok(())
        }
        Command::Johnson(JohnsonCmd::Random {
            genus,
            k,
            seed,
            degree,
            output,
        }) => {
            let psi = random_ic_element(genus as usize, k as usize, seed, degree as usize)?;
            emit(&automorphism_to_json(&psi), &output)
        }
        Command::Morita(MoritaCmd::Mk { aut, k }) => {
            let psi = read_aut(&aut)?;
            let k = k as usize;
            let m = morita_mk(&psi, k)?;
            println!("m_{k} = {m}");
            let phi = capital_phi(&tau_to_trees(&psi, k)?, k)?;
            if m.neg() == phi {
                println!("-m_{k} = Phi(eta^-1 tau): holds");
                Ok(())
            } else {
                Err(Failure::Verification(format!("-m_{k} differs from Phi(eta^-1 tau) = {phi}")))
            }
        }
        Command::Suite(SuiteCmd::Run { seed, only }) => {
            let reports = match only {
                Some(id) => {
                    let r = run_criterion(id as usize, seed).expect("id validated by clap");
                    println!("{r}");
                    vec![r]
                }
                None => run_suite(seed, |r, _| println!("{r}")),
            };
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed (seed {seed})", reports.len() - failed);
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification(String::new()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
