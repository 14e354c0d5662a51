//! `blobkit` command-line tool. Reads JSON matrix files, writes JSON reports
//! to standard output. Exit codes: 0 ok, 1 input error, 2 condition or
//! hypothesis violated, 3 numerical failure.

mod commands;
mod matrix_file;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use commands::{CheckFlags, Context, GromovArgs, Plane};
use matrix_file::MatrixFile;
use report::{exit, finish, Failure, Outcome, Report};

const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "blobkit", version, about = "Symplectic and Gaussian-state toolkit")]
struct Cli {
    /// Relative tolerance for all judged conditions.
    #[arg(long, global = true, env = "BLOBKIT_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Override ħ from the input files.
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Human-readable summary on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Run the command on every *.json file in this directory.
    #[arg(long, global = true)]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Williamson diagonalization of M (or of M = (ħ/2)Σ⁻¹).
    Williamson { input: Option<PathBuf> },
    /// Robertson–Schrödinger, quantum condition and capacity checks.
    Check {
        input: Option<PathBuf>,
        #[arg(long)]
        rs: bool,
        #[arg(long)]
        quantum: bool,
        #[arg(long)]
        capacity: bool,
    },
    /// Pure Gaussian state attached to a saturated index.
    Purify {
        input: Option<PathBuf>,
        /// Saturated mode, counted from 1 (default: first saturated).
        #[arg(long)]
        index: Option<usize>,
        /// Write the pure state's Wigner matrix as a kind "G" file.
        #[arg(long)]
        emit_pure: Option<PathBuf>,
    },
    /// Plane sections of the symplectic ball S(B_R).
    Gromov {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Mode index j (from 1) or "eK,eL"; repeatable. Default: every mode.
        #[arg(long)]
        plane: Vec<String>,
        #[arg(long, default_value_t = blobkit::gromov::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = blobkit::gromov::DEFAULT_NODES)]
        nodes: usize,
    },
    /// Whether two symplectic matrices define the same quantum blob.
    BlobEqual { first: PathBuf, second: PathBuf },
    /// Symplectic spectrum by two independent routes.
    Spectrum { input: Option<PathBuf> },
    /// Emit a seeded random symplectic matrix file.
    RandomSymplectic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        factors: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Williamson { .. } => "williamson",
            Command::Check { .. } => "check",
            Command::Purify { .. } => "purify",
            Command::Gromov { .. } => "gromov",
            Command::BlobEqual { .. } => "blob-equal",
            Command::Spectrum { .. } => "spectrum",
            Command::RandomSymplectic { .. } => "random-symplectic",
        }
    }

    fn input(&self) -> Option<&Path> {
        match self {
            Command::Williamson { input }
            | Command::Check { input, .. }
            | Command::Purify { input, .. }
            | Command::Gromov { input, .. }
            | Command::Spectrum { input } => input.as_deref(),
            _ => None,
        }
    }

    fn echo(&self, input: &Path, ctx: &Context, hbar: Option<f64>) -> Value {
        let mut v = match self {
            Command::Check { rs, quantum, capacity, .. } => {
                json!({ "rs": rs, "quantum": quantum, "capacity": capacity })
            }
            Command::Purify { index, emit_pure, .. } => json!({
                "index": index,
                "emit_pure": emit_pure.as_ref().map(|p| p.display().to_string()),
            }),
            Command::Gromov { radius, plane, samples, seed, nodes, .. } => json!({
                "radius": radius, "plane": plane, "samples": samples, "seed": seed, "nodes": nodes,
            }),
            _ => json!({}),
        };
        let m = v.as_object_mut().expect("object");
        m.insert("name".into(), json!(self.name()));
        m.insert("input".into(), json!(input.display().to_string()));
        m.insert("tol".into(), json!(ctx.tol));
        m.insert("hbar_override".into(), json!(hbar));
        v
    }
}

fn load(path: &Path, hbar: Option<f64>) -> (Option<String>, Result<MatrixFile, Failure>) {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return (None, Err(Failure::input(format!("cannot read {}: {e}", path.display())))),
    };
    let digest = report::digest([bytes.as_slice()]);
    let parsed = std::str::from_utf8(&bytes)
        .map_err(|e| e.to_string())
        .and_then(MatrixFile::parse)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())));
    let parsed = parsed.map(|mut f| {
        if let Some(h) = hbar {
            if h != f.hbar {
                eprintln!("warning: {}: --hbar {h} overrides hbar {} from the file", path.display(), f.hbar);
                f.hbar = h;
            }
        }
        f
    });
    (Some(digest), parsed)
}

fn run_one(cmd: &Command, path: &Path, ctx: &Context, hbar: Option<f64>) -> Report {
    let echo = cmd.echo(path, ctx, hbar);
    let (digest, file) = load(path, hbar);
    let outcome: Result<Outcome, Failure> = file.and_then(|f| match cmd {
        Command::Williamson { .. } => commands::williamson(&f, ctx),
        Command::Check { rs, quantum, capacity, .. } => {
            commands::check(&f, CheckFlags { rs: *rs, quantum: *quantum, capacity: *capacity }, ctx)
        }
        Command::Purify { index, emit_pure, .. } => commands::purify(&f, *index, emit_pure.as_deref(), ctx),
        Command::Gromov { radius, plane, samples, seed, nodes, .. } => {
            let planes = plane
                .iter()
                .map(|p| Plane::parse(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::input)?;
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Failure::input(format!("--radius must be positive, got {radius}")));
            }
            let args = GromovArgs { radius: *radius, planes, samples: *samples, seed: *seed, nodes: *nodes };
            commands::gromov(&f, &args, ctx)
        }
        Command::Spectrum { .. } => commands::spectrum(&f, ctx),
        Command::BlobEqual { .. } | Command::RandomSymplectic { .. } => unreachable!("not a single-file command"),
    });
    finish(echo, digest, ctx.tolerances_json(), outcome)
}

fn run_blob_equal(cmd: &Command, first: &Path, second: &Path, ctx: &Context, hbar: Option<f64>) -> Report {
    let mut echo = cmd.echo(first, ctx, hbar);
    echo.as_object_mut().expect("object").insert("second".into(), json!(second.display().to_string()));
    let (d1, a) = load(first, hbar);
    let (d2, b) = load(second, hbar);
    let digest = match (std::fs::read(first), std::fs::read(second)) {
        (Ok(x), Ok(y)) if d1.is_some() && d2.is_some() => Some(report::digest([x.as_slice(), y.as_slice()])),
        _ => None,
    };
    let outcome = a.and_then(|a| b.and_then(|b| commands::blob_equal(&a, &b, ctx)));
    finish(echo, digest, ctx.tolerances_json(), outcome)
}

fn batch_inputs(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| Failure::input(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn summarize(report: &Report) {
    eprintln!(
        "{}: {:?}{}",
        report.command["input"].as_str().unwrap_or("-"),
        report.status,
        report.message.as_ref().map(|m| format!(" ({m})")).unwrap_or_default()
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        eprintln!("error: --tol must be positive, got {}", cli.tol);
        return ExitCode::from(exit::INPUT);
    }
    if let Some(h) = cli.hbar {
        if !(h.is_finite() && h > 0.0) {
            eprintln!("error: --hbar must be positive, got {h}");
            return ExitCode::from(exit::INPUT);
        }
    }
    let ctx = Context { tol: cli.tol };

    if let Command::RandomSymplectic { n, seed, factors } = cli.command {
        return match commands::random_symplectic(n, seed, factors, cli.hbar.unwrap_or(1.0)) {
            Ok(file) => {
                print!("{}", file.to_json());
                ExitCode::from(exit::OK)
            }
            Err(f) => {
                eprintln!("error: {}", f.message);
                ExitCode::from(f.code)
            }
        };
    }

    if let Some(dir) = &cli.batch {
        let single = matches!(cli.command, Command::BlobEqual { .. })
            || matches!(cli.command, Command::Purify { emit_pure: Some(_), .. })
            || cli.command.input().is_some();
        if single {
            eprintln!("error: --batch takes its inputs from the directory; blob-equal, --emit-pure and explicit inputs are not supported");
            return ExitCode::from(exit::INPUT);
        }
        let files = match batch_inputs(dir) {
            Ok(f) => f,
            Err(f) => {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
        };
        let reports: Vec<Report> = files.par_iter().map(|p| run_one(&cli.command, p, &ctx, cli.hbar)).collect();
        let code = reports.iter().map(|r| r.code).max().unwrap_or(exit::OK);
        let values: Vec<Value> =
            reports.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect();
        println!("{}", serde_json::to_string_pretty(&values).expect("serializable"));
        if cli.verbose {
            reports.iter().for_each(summarize);
        }
        return ExitCode::from(code);
    }

    let report = match &cli.command {
        Command::BlobEqual { first, second } => run_blob_equal(&cli.command, first, second, &ctx, cli.hbar),
        cmd => match cmd.input() {
            Some(path) => run_one(cmd, path, &ctx, cli.hbar),
            None => {
                eprintln!("error: missing input file (or use --batch DIR)");
                return ExitCode::from(exit::INPUT);
            }
        },
    };
    println!("{}", report.to_json());
    if cli.verbose {
        summarize(&report);
    } else if report.code != exit::OK {
        if let Some(m) = &report.message {
            eprintln!("{m}");
        }
    }
    ExitCode::from(report.code)
}
