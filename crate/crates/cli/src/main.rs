//! `bqw`: build, check, probe and draw unit-distance witness sets.
//!
//! Exit status is 0 when a check passes, 1 when it fails and 2 on bad
//! input. JSON goes to stdout, everything else to stderr.

mod file;
mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bq_witness::field::Constructible;
use bq_witness::gadgets::compile;
use bq_witness::geom::Point;
use bq_witness::relations;
use bq_witness::rigidity::{self, SearchConfig, Verdict};
use bq_witness::verify::verify;
use bq_witness::witness::WitnessSet;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use file::WitnessFile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser)]
#[command(name = "bqw", version, about = "Finite witness sets for unit-distance preserving maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a distance expression into a witness for that distance.
    Construct {
        #[arg(long)]
        dim: usize,
        /// Distance expression, e.g. "1+sqrt(2)".
        #[arg(long, allow_hyphen_values = true)]
        dist: String,
        /// Comma-separated anchor coordinates (default: origin).
        #[arg(long, allow_hyphen_values = true)]
        anchor: Option<String>,
        /// Comma-separated unit direction (default: first axis).
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a witness file exactly and print the report.
    Verify { path: PathBuf },
    /// Witness forcing the given points onto a common hyperplane.
    Hyperplane {
        #[arg(long)]
        dim: Option<usize>,
        /// One point, comma-separated; repeat for each point.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Witness forcing |JK| = |LM|.
    Equal {
        #[command(flatten)]
        pts: FourPoints,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Witness forcing |JK| < |LM|.
    Less {
        #[command(flatten)]
        pts: FourPoints,
        #[command(flatten)]
        out: OutArg,
    },
    /// Witness forcing two points to stay apart.
    Distinct {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Search numerically for unit-preserving maps that break the claims.
    Falsify {
        path: PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        margin: f64,
        #[arg(long, default_value_t = 1e-10)]
        tau: f64,
    },
    /// Infinitesimal rigidity of a framework file or a witness's unit graph.
    Rigidity {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Draw a planar witness as SVG.
    Svg {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FourPoints {
    #[arg(long, allow_hyphen_values = true)]
    j: String,
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    l: String,
    #[arg(long, allow_hyphen_values = true)]
    m: String,
}

#[derive(Args)]
struct OutArg {
    /// Write the witness here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Point, CliError> {
    let coords: Result<Vec<Constructible>, _> = s.split(',').map(|c| c.trim().parse::<Constructible>()).collect();
    Ok(Point::new(coords.map_err(|e| input(format!("bad coordinate in {s:?}: {e}")))?))
}

fn same_dim(points: &[Point], dim: Option<usize>) -> Result<usize, CliError> {
    let n = dim.unwrap_or(points[0].dim());
    if points.iter().any(|p| p.dim() != n) {
        return Err(input(format!("all points must have dimension {n}")));
    }
    Ok(n)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn emit_witness(w: &WitnessSet, out: &OutArg) -> Result<ExitCode, CliError> {
    eprintln!(
        "points {}, unit edges {}, tower depth {}, derivation depth {}",
        w.points.len(),
        w.unit_edges.len(),
        w.max_tower_depth(),
        w.derivation.depth()
    );
    emit_json(&WitnessFile::from(w), out.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Construct { dim, dist, anchor, direction, out } => {
            if dim < 2 {
                return Err(input("the dimension must be at least 2 (n > 1)"));
            }
            let anchor = anchor.as_deref().map(parse_point).transpose()?.unwrap_or_else(|| Point::origin(dim));
            let direction = match direction.as_deref() {
                Some(d) => parse_point(d)?.0,
                None => Point::axis(dim, 0).0,
            };
            let w = compile(&dist, dim, &anchor, &direction).map_err(input)?;
            emit_witness(&w, &out)
        }
        Command::Verify { path } => {
            let w = file::load_witness(&path)?;
            let r = verify(&w);
            for e in &r.failed_edges {
                eprintln!("unit edge {:?} fails", e.pair);
            }
            for c in r.claims.iter().filter(|c| !c.holds) {
                eprintln!("claim {} ({}) fails: {}", c.index, c.kind, c.detail.as_deref().unwrap_or(""));
            }
            eprintln!(
                "{}: {} points, {} declared and {} discovered unit edges, tower depth {}, derivation depth {}",
                if r.passed { "pass" } else { "FAIL" },
                r.points,
                r.declared_edges,
                r.discovered_edges,
                r.max_tower_depth,
                r.derivation_depth
            );
            emit_json(&r, None)?;
            Ok(verdict(r.passed))
        }
        Command::Hyperplane { dim, points, out } => {
            let pts = points.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
            let n = same_dim(&pts, dim)?;
            emit_witness(&relations::hyperplane_witness(&pts, n).map_err(input)?, &out)
        }
        Command::Equal { pts, dim, out } => {
            let [j, k, l, m] = four(&pts)?;
            let n = same_dim(&[j.clone(), k.clone(), l.clone(), m.clone()], dim)?;
            emit_witness(&relations::equal_distance_witness(&j, &k, &l, &m, n).map_err(input)?, &out)
        }
        Command::Less { pts, out } => {
            let [j, k, l, m] = four(&pts)?;
            same_dim(&[j.clone(), k.clone(), l.clone(), m.clone()], None)?;
            emit_witness(&relations::less_than_witness(&j, &k, &l, &m).map_err(input)?, &out)
        }
        Command::Distinct { p, q, out } => {
            let (p, q) = (parse_point(&p)?, parse_point(&q)?);
            same_dim(&[p.clone(), q.clone()], None)?;
            emit_witness(&relations::distinct_witness(&p, &q).map_err(input)?, &out)
        }
        Command::Falsify { path, restarts, seed, margin, tau } => {
            let w = file::load_witness(&path)?;
            let cfg = SearchConfig {
                restarts,
                seed,
                margin,
                tau_unit: tau,
                ..SearchConfig::default()
            };
            let r = rigidity::falsify_with(&w, &cfg).map_err(input)?;
            eprintln!(
                "{} trials, {} unit-preserving, largest claim deviation {:e}{}",
                r.trials,
                r.near_feasible.len(),
                r.best_claim_deviation,
                if r.violated { ": claim violated" } else { "" }
            );
            emit_json(&r, None)?;
            Ok(verdict(!r.violated))
        }
        Command::Rigidity { path, tol } => {
            let f = file::load_framework(&path)?;
            let r = rigidity::is_rigid(&f, tol);
            eprintln!("rank {} of expected {}: {:?}", r.rank, r.expected_rank, r.verdict);
            emit_json(&r, None)?;
            Ok(verdict(r.verdict == Verdict::Rigid))
        }
        Command::Svg { path, out } => {
            let w = file::load_witness(&path)?;
            if w.dim != 2 {
                return Err(input(format!("svg needs a planar witness, got dimension {}", w.dim)));
            }
            let text = svg::render(&w);
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn four(p: &FourPoints) -> Result<[Point; 4], CliError> {
    Ok([parse_point(&p.j)?, parse_point(&p.k)?, parse_point(&p.l)?, parse_point(&p.m)?])
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
