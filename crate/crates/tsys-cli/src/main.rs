//! Command line front end for the tsys solver.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 domain error
//! (point outside the solvable region, vertex not mutable, ...), 4 internal
//! inconsistency.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tsys::boundary::BoundaryError;
use tsys::qsystem::{self, QError};
use tsys::solver::{self, BoundarySolver, Point, SolveError, VerifyReport};
use tsys::{Boundary, MotzkinPath, MutationDirection};

#[derive(Parser)]
#[command(name = "tsys", about = "Exact solver for the octahedron recurrence with stepped-surface initial data", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Transfer matrices along the projection (determinant above layer 1).
    Network,
    /// Raw octahedron recursion.
    Recursion,
    /// Determinant of first-layer solutions.
    Determinant,
    /// Non-intersecting path enumeration (small points only).
    Lgv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Fwd,
    Bwd,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print T at a point as a Laurent polynomial of the boundary labels.
    Solve {
        #[arg(long)]
        boundary: PathBuf,
        /// Point as alpha,j,k.
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value = "network")]
        method: Method,
    },
    /// Mutate the boundary at a vertex and write the new boundary file.
    Mutate {
        #[arg(long)]
        boundary: PathBuf,
        /// Vertex as alpha,j.
        #[arg(long)]
        at: String,
        #[arg(long, value_enum)]
        dir: Direction,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a basic staircase boundary file on the window [0, width].
    Staircase {
        #[arg(long)]
        rank: i32,
        #[arg(long)]
        width: i64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the solver cross-check battery on a boundary.
    Verify {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        kmax: i64,
        /// Reserved for sampling extensions; output is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the layered network of a column range.
    Network {
        #[arg(long)]
        boundary: PathBuf,
        /// Column range j0 j1.
        #[arg(long, num_args = 2, value_names = ["J0", "J1"])]
        range: Vec<i64>,
        #[arg(long, value_enum, default_value = "dot")]
        format: NetFormat,
    },
    /// Solve the conserved-quantity system attached to a Motzkin path.
    Qsys {
        /// Comma-separated Motzkin path entries m_1,...,m_r.
        #[arg(long)]
        motzkin: String,
        #[arg(long)]
        alpha: i32,
        #[arg(long)]
        n: i64,
        /// Also run the resolvent verification.
        #[arg(long)]
        check: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_err(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn from_solve(e: SolveError) -> Failure {
    let code = match e {
        SolveError::Internal(_) => 4,
        _ => 3,
    };
    Failure { code, message: e.to_string() }
}

fn from_boundary(e: BoundaryError) -> Failure {
    let code = match e {
        BoundaryError::NotMutable { .. } => 3,
        BoundaryError::InternalDivisionFailure => 4,
        _ => 2,
    };
    Failure { code, message: e.to_string() }
}

fn from_q(e: QError) -> Failure {
    let code = match e {
        QError::Internal(_) => 4,
        _ => 3,
    };
    Failure { code, message: e.to_string() }
}

fn parse_ints(s: &str, what: &str, n: usize) -> Result<Vec<i64>, Failure> {
    let parts: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse()).collect();
    match parts {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(input_err(format!("expected {} as {} comma-separated integers", what, n))),
    }
}

fn load_boundary(path: &PathBuf) -> Result<Boundary, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("{}: {}", path.display(), e)))?;
    Boundary::from_file_str(&text).map_err(from_boundary)
}

fn write_boundary(b: &Boundary, path: &PathBuf) -> Result<(), Failure> {
    fs::write(path, b.to_file_string())
        .map_err(|e| input_err(format!("{}: {}", path.display(), e)))
}

fn print_report(report: &VerifyReport) -> Result<(), Failure> {
    for c in &report.checks {
        println!("{}  {}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if report.all_passed() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Failure { code: 1, message: "verification failed".to_string() })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { boundary, point, method } => {
            let b = load_boundary(&boundary)?;
            let v = parse_ints(&point, "--point", 3)?;
            let p = Point::new(v[0] as i32, v[1], v[2]);
            let s = BoundarySolver::new(&b);
            let value = match method {
                Method::Network if p.alpha == 1 => s.solve_t1(p),
                Method::Network | Method::Determinant => s.solve_t(p),
                Method::Recursion => s.recursion_oracle(p),
                Method::Lgv => s.lgv_enumerate(p),
            }
            .map_err(from_solve)?;
            println!("{}", value);
            Ok(())
        }
        Command::Mutate { boundary, at, dir, output } => {
            let b = load_boundary(&boundary)?;
            let v = parse_ints(&at, "--at", 2)?;
            let dir = match dir {
                Direction::Fwd => MutationDirection::Forward,
                Direction::Bwd => MutationDirection::Backward,
            };
            let (mutated, label) = b.mutate(v[0] as i32, v[1], dir).map_err(from_boundary)?;
            write_boundary(&mutated, &output)?;
            println!("{}", label);
            Ok(())
        }
        Command::Staircase { rank, width, output } => {
            if rank < 1 || width < 1 {
                return Err(input_err("rank and width must be positive"));
            }
            write_boundary(&Boundary::basic_staircase(rank, 0, width), &output)
        }
        Command::Verify { boundary, kmax, seed: _ } => {
            let b = load_boundary(&boundary)?;
            print_report(&solver::verify(&b, kmax))
        }
        Command::Network { boundary, range, format } => {
            let b = load_boundary(&boundary)?;
            // Mutated labels are not Laurent-invertible; the network carries
            // one atom per boundary face, as in the solver itself.
            let net = tsys::slicenet::build_network(&b.shadow(), range[0], range[1])
                .map_err(|e| from_solve(e.into()))?;
            match format {
                NetFormat::Dot => print!("{}", net.export_dot()),
                NetFormat::Json => print!("{}", net.export_json()),
            }
            Ok(())
        }
        Command::Qsys { motzkin, alpha, n, check } => {
            let entries = parse_ints(
                &motzkin,
                "--motzkin",
                motzkin.split(',').count(),
            )?;
            let m = MotzkinPath::new(entries).map_err(from_boundary)?;
            let inst = qsystem::build(&m).map_err(from_q)?;
            let value = qsystem::solve_r(&inst, alpha, n).map_err(from_q)?;
            println!("{}", value);
            if check {
                print_report(&qsystem::check_resolvent(&inst, 5))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
