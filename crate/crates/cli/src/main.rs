//! `okounkov`: batch computations of value semigroups, Newton-Okounkov
//! bodies, toric degeneration data and the concentration model.
//!
//! ```text
//! $ okounkov body --input fixtures/cusp.problem
//! $ okounkov degenerate --input fixtures/cusp.problem --d 2 --out report/
//! $ okounkov quantize --input fixtures/veronese.problem --threads 4
//! ```
//!
//! Exit status: 0 on success, 2 for malformed input or configuration, 3
//! when a mathematical precondition or check fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use okounkov::commands::{self, Command, CommandOutput, Overrides};
use okounkov::problem::ProblemFile;

#[derive(Debug, Parser)]
#[command(name = "okounkov", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Newton-Okounkov body with V- and H-representation and lattice points.
    Body(Common),
    /// Levels of the value semigroup and a finite-generation probe.
    Semigroup(Common),
    /// Checks that the basis values generate every level up to `--dmax`.
    Khovanskii(Common),
    /// Monomial lifts, weights, family coordinates and hypothesis table.
    Degenerate(Common),
    /// Hypothesis table only; exits 3 if any check fails.
    Verify(Common),
    /// Concentration sweep on the special fiber, written as a CSV trace.
    Quantize(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file.
    #[arg(long)]
    input: PathBuf,
    /// Degree of the degeneration (and scale of the lattice points).
    #[arg(long)]
    d: Option<u32>,
    /// Largest semigroup level to compute.
    #[arg(long)]
    dmax: Option<u32>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature points per unit length.
    #[arg(long)]
    resolution: Option<u32>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Cmd {
    fn split(&self) -> (Command, &Common) {
        match self {
            Cmd::Body(c) => (Command::Body, c),
            Cmd::Semigroup(c) => (Command::Semigroup, c),
            Cmd::Khovanskii(c) => (Command::Khovanskii, c),
            Cmd::Degenerate(c) => (Command::Degenerate, c),
            Cmd::Verify(c) => (Command::Verify, c),
            Cmd::Quantize(c) => (Command::Quantize, c),
        }
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn write_files(dir: &Path, out: &CommandOutput) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in &out.files {
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();

    let text = match fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("cannot read {}: {e}", args.input.display())),
    };
    let problem = match ProblemFile::parse(&text) {
        Ok(p) => p,
        Err(e) => return fail(2, format!("{}: {e}", args.input.display())),
    };
    let overrides = Overrides {
        d: args.d,
        d_max: args.dmax,
        resolution: args.resolution,
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return fail(2, "--threads must be positive");
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail(2, e),
    };

    let output = match pool.install(|| commands::run(command, &problem, overrides)) {
        Ok(o) => o,
        Err(e) => return fail(e.exit_code() as u8, e),
    };
    if let Some(dir) = &args.out {
        if let Err(e) = write_files(dir, &output) {
            return fail(2, format!("cannot write to {}: {e}", dir.display()));
        }
    }
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(output.report.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(output.exit_code as u8)
}
