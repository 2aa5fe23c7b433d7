use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use toricwall::io::{dispatch, example_names, example_text, parse_problem, summary_line, Flags, Report};

/// Crepant toric wall-crossing computations and checks.
///
/// PROBLEM is a JSON problem file or the name of a bundled example
/// (p1, flop, c3z3, gerbe, rank2, noncrepant, flop_over_p1).
#[derive(Parser, Debug)]
#[command(name = "toricwall", version)]
struct Cli {
    /// chambers, anticones, wall, boxes, fan, blowup, restrictions, hseries, ifun,
    /// verify-ih, coeffs, mb-verify, fm, verify-fm, all; or `examples` to list the catalog
    command: String,
    problem: Option<String>,
    /// Pass/fail tolerance of the numeric checks
    #[arg(long)]
    tol: Option<f64>,
    /// Number of seeded parameter draws
    #[arg(long)]
    draws: Option<usize>,
    /// Sample moduli |y^e|, comma separated
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
    /// Seed overriding the problem file
    #[arg(long)]
    seed: Option<u64>,
    /// Maximal y-degree of series
    #[arg(long)]
    trunc_y: Option<u32>,
    /// z-power window as LOW:HIGH
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    trunc_z: Option<(i32, i32)>,
    /// Evaluate independent rows in parallel
    #[arg(long)]
    parallel: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the runtime in the report (breaks byte-identical output)
    #[arg(long)]
    timing: bool,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected LOW:HIGH")?;
    let lo = a.trim().parse::<i32>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<i32>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("LOW exceeds HIGH".into());
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.command == "examples" {
        match cli.problem.as_deref() {
            None => example_names().iter().for_each(|n| println!("{n}")),
            Some(n) => match example_text(n) {
                Some(t) => print!("{t}"),
                None => {
                    eprintln!("no bundled example `{n}`");
                    return ExitCode::from(2);
                }
            },
        }
        return ExitCode::SUCCESS;
    }
    let flags = Flags {
        tol: cli.tol,
        draws: cli.draws,
        y: cli.y.clone(),
        seed: cli.seed,
        trunc_y: cli.trunc_y,
        trunc_z: cli.trunc_z,
        parallel: cli.parallel,
        timing: cli.timing,
    };
    let report = match cli.problem.as_deref() {
        None => Report::failure(&cli.command, None, &toricwall::Error::Parse("missing PROBLEM argument".into())),
        Some(path) => match parse_problem(path) {
            Ok(p) => dispatch(&cli.command, &p, &flags),
            Err(e) => Report::failure(&cli.command, None, &e),
        },
    };
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", summary_line(&report));
    ExitCode::from(report.exit_code() as u8)
}
