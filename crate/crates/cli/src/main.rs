//! `ncalc`: batch checks on neighbour spaces, group-valued forms, affine
//! connections and formal jets. Prints one canonical JSON report.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage or parse error, 3 untestable.

mod affine;
mod form;
mod jet;
mod report;
mod space;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{CmdResult, Report};

#[derive(Parser)]
#[command(name = "ncalc", version, about = "Exact checks for discrete and formal connections")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Neighbour space files.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Group-valued 1-forms on a space.
    #[command(subcommand)]
    Form(FormCmd),
    /// Affine connections given as tables or lattice generators.
    #[command(subcommand)]
    Affine(AffineCmd),
    /// Truncated jets: coordinate 1-forms, Christoffel fields, charts.
    #[command(subcommand)]
    Jet(JetCmd),
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Validate and normalize a space; list its components.
    Check { file: PathBuf },
}

#[derive(Args)]
struct FormArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    form: PathBuf,
}

#[derive(Subcommand)]
enum FormCmd {
    /// Closedness, quadrangle defects and bounded path independence.
    Check {
        #[command(flatten)]
        io: FormArgs,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// The primitive normalized at the base point, or a conflict.
    Integrate {
        #[command(flatten)]
        io: FormArgs,
        /// Base point; defaults to the first vertex.
        #[arg(long)]
        base: Option<String>,
    },
}

#[derive(Subcommand)]
enum AffineCmd {
    /// Connection axioms, symmetry and weak flatness.
    Check {
        #[arg(long)]
        conn: PathBuf,
    },
    /// Fill the grid over comma-separated vertex paths from a common start.
    Grid {
        #[arg(long)]
        conn: PathBuf,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
        /// A third path for the three-dimensional grid.
        #[arg(long)]
        x: Option<String>,
        /// Also compare grid codomains over all paths of at most this many steps.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// The cube lemma at one quadruple or at all of them.
    Cube {
        #[arg(long)]
        conn: PathBuf,
        /// `p0,p1,p2,p4`
        #[arg(long)]
        at: Option<String>,
    },
    /// Abelian group laws of the heap sums and base change.
    Heap {
        #[arg(long)]
        conn: PathBuf,
        /// Components up to this size are checked exhaustively.
        #[arg(long, default_value_t = 30)]
        exhaustive_limit: usize,
        /// Sampled instances per law on larger components.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct JetSource {
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[arg(long)]
    omega: Option<PathBuf>,
    #[arg(long)]
    map: Option<PathBuf>,
}

impl JetSource {
    fn source(self) -> jet::Source {
        match (self.gamma, self.omega, self.map) {
            (Some(g), _, _) => jet::Source::Gamma(g),
            (_, Some(o), _) => jet::Source::Omega(o),
            (_, _, Some(m)) => jet::Source::Map(m),
            _ => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Subcommand)]
enum JetCmd {
    /// Check the identities that hold for the given input.
    Verify {
        #[arg(long)]
        order: u32,
        #[command(flatten)]
        src: JetSource,
    },
    /// Solve `f^-1 df = omega` with `f(0) = 1`.
    Primitive {
        #[arg(long)]
        order: u32,
        #[command(flatten)]
        src: JetSource,
        /// Also write the solved map file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The normalized chart linearizing a symmetric connection.
    Chart {
        #[arg(long)]
        order: u32,
        #[command(flatten)]
        src: JetSource,
        /// Also write the chart file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cmd: Cmd, report: Report) -> CmdResult {
    match cmd {
        Cmd::Space(SpaceCmd::Check { file }) => space::check(report, &file),
        Cmd::Form(FormCmd::Check { io, max_len }) => form::check(report, &io.space, &io.form, max_len),
        Cmd::Form(FormCmd::Integrate { io, base }) => form::integrate(report, &io.space, &io.form, base.as_deref()),
        Cmd::Affine(AffineCmd::Check { conn }) => affine::check(report, &conn),
        Cmd::Affine(AffineCmd::Grid { conn, y, z, x, max_len }) => {
            affine::grid(report, &conn, &y, &z, x.as_deref(), max_len)
        }
        Cmd::Affine(AffineCmd::Cube { conn, at }) => affine::cube(report, &conn, at.as_deref()),
        Cmd::Affine(AffineCmd::Heap {
            conn,
            exhaustive_limit,
            samples,
            seed,
        }) => affine::heap(report, &conn, exhaustive_limit, samples, seed),
        Cmd::Jet(JetCmd::Verify { order, src }) => jet::verify(report, order, &src.source()),
        Cmd::Jet(JetCmd::Primitive { order, src, out }) => jet::primitive(report, order, &src.source(), out.as_deref()),
        Cmd::Jet(JetCmd::Chart { order, src, out }) => jet::chart(report, order, &src.source(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match run(cli.cmd, Report::new(command)) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
    }
}
