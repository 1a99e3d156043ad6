//! `fraclap` command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, ErrorKind, Result};
use crate::expr::RhsExpression;
use crate::graph::NodalVector;
use crate::ifs::{builtin, Family};
use crate::io::{format_f64, write_mesh, write_solution, write_table_csv, write_table_text};
use crate::mesh::iterate;
use crate::renorm::{
    auto_constant, estimate_range, solve_online, EstimateMethod, OnlineMethod, RenormEstimate,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Laplacians and Dirichlet problems on self-similar fractals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the level-N approximation and write it as a mesh document.
    Generate(GenerateArgs),
    /// Estimate renormalization constants over a range of levels.
    Renorm(RenormArgs),
    /// Solve a renormalized Dirichlet problem.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub level: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Table,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RenormArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// fd, energy, fem-edge or fem-area
    #[arg(long, value_parser = parse_estimate_method)]
    pub method: EstimateMethod,
    /// Inclusive level range `A:B` with `A < B`.
    #[arg(long, value_parser = parse_level_range)]
    pub levels: (usize, usize),
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub level: usize,
    /// rfd, rfem1d or rfem2d
    #[arg(long, value_parser = parse_online_method)]
    pub method: OnlineMethod,
    /// Renormalization constant; estimated from two coarser levels when omitted.
    #[arg(long)]
    pub constant: Option<f64>,
    /// Forcing term in x, y, z, e.g. `sin(x+y)`.
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: String,
    /// Boundary values, one per boundary vertex, e.g. `1,0,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bc: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_estimate_method(s: &str) -> std::result::Result<EstimateMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_online_method(s: &str) -> std::result::Result<OnlineMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_level_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad level `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad level `{b}`"))?;
    if a >= b {
        return Err(format!("level range {a}:{b} must be increasing"));
    }
    Ok((a, b))
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Numerical => EXIT_NUMERICAL,
        ErrorKind::Io => EXIT_IO,
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshCounts {
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<MeshCounts> {
    let mesh = iterate(&builtin(args.family), args.level)?;
    let mut w = create(&args.out)?;
    write_mesh(&mesh, &mut w)?;
    w.flush()?;
    Ok(MeshCounts {
        vertices: mesh.vertex_count(),
        edges: mesh.edges().len(),
        cells: mesh.cells().len(),
    })
}

pub fn cmd_renorm(args: &RenormArgs) -> Result<Vec<RenormEstimate>> {
    let (from, to) = args.levels;
    let rows = estimate_range(args.family, from, to, args.method)?;
    let mut w = create(&args.out)?;
    match args.format {
        TableFormat::Csv => write_table_csv(&rows, &mut w)?,
        TableFormat::Table => write_table_text(&rows, &mut w)?,
    }
    w.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub vertices: usize,
    pub constant: f64,
    pub residual: f64,
    /// Present when the constant was estimated rather than supplied.
    pub estimate: Option<RenormEstimate>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<SolveSummary> {
    let rhs = RhsExpression::parse(&args.rhs)?;
    let mesh = iterate(&builtin(args.family), args.level)?;
    if args.bc.len() != mesh.boundary_indices().len() {
        return Err(Error::BoundaryValues(format!(
            "{} has {} boundary vertices but {} values were given",
            args.family,
            mesh.boundary_indices().len(),
            args.bc.len()
        )));
    }
    if args.method == OnlineMethod::Rfem2d && !builtin(args.family).cell_generation() {
        return Err(Error::MethodMismatch {
            method: args.method.name().into(),
            family: args.family.name().into(),
        });
    }
    let (constant, estimate) = match args.constant {
        Some(c) => (c, None),
        None => {
            let e = auto_constant(args.family, args.level, args.method)?;
            (e.mean, Some(e))
        }
    };
    let g = mesh
        .vertices()
        .iter()
        .map(|p| rhs.eval_finite(p.coords()))
        .collect::<Result<Vec<_>>>()?;
    let g = NodalVector::new(g, mesh.level());
    let sol = solve_online(&mesh, args.method, constant, &g, &args.bc)?;
    let mut w = create(&args.out)?;
    write_solution(&mesh, &sol, rhs.source(), &mut w)?;
    w.flush()?;
    Ok(SolveSummary {
        vertices: mesh.vertex_count(),
        constant,
        residual: sol.solver_residual,
        estimate,
    })
}

/// Runs one command and reports to stdout/stderr; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a).map(|c| {
            println!(
                "{} level {}: {} vertices, {} edges, {} cells -> {}",
                a.family,
                a.level,
                c.vertices,
                c.edges,
                c.cells,
                a.out.display()
            );
        }),
        Command::Renorm(a) => cmd_renorm(a).map(|rows| {
            for e in &rows {
                println!(
                    "({},{}) max {:.4} mean {:.4} min {:.4} excluded {}",
                    e.level_pair.0, e.level_pair.1, e.max, e.mean, e.min, e.excluded_count
                );
            }
            println!("wrote {}", a.out.display());
        }),
        Command::Solve(a) => cmd_solve(a).map(|s| {
            let how = if s.estimate.is_some() {
                "estimated"
            } else {
                "given"
            };
            println!(
                "{} level {} {}: {} vertices, constant {} ({how}), residual {} -> {}",
                a.family,
                a.level,
                a.method,
                s.vertices,
                format_f64(s.constant),
                format_f64(s.residual),
                a.out.display()
            );
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
