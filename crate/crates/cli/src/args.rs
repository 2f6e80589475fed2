use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use radial_kernels::ExtendedDegree;

#[derive(Debug, Parser)]
#[command(name = "radial-kernels", version, about = "Positive definite radial kernels on trees and products")]
pub struct Cli {
    /// Seed for joint diagonalization and randomized checks.
    #[arg(long, global = true, default_value_t = radial_kernels::moments::DEFAULT_SEED)]
    pub seed: u64,

    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide positive definiteness from a truncated operator.
    Check(KernelJob),
    /// Recover the representing measure and report the round-trip error.
    Moments {
        #[command(flatten)]
        job: KernelJob,
        /// Largest total index used for the reconstruction error.
        #[arg(long, default_value_t = 30)]
        n_report: usize,
    },
    /// Evaluate a measure at a multi-index.
    Reconstruct {
        /// Measure JSON, inline or a file path.
        #[arg(long)]
        measure: String,
        #[arg(long, value_parser = parse_space)]
        space: Space,
        /// Comma-separated multi-index.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Reproduce the strict-inclusion witnesses.
    #[command(subcommand)]
    Witness(Witness),
    /// Brute-force Gram check on a finite ball or graph.
    Oracle {
        #[arg(long)]
        kernel: String,
        /// Space whose balls are used when no graph is given.
        #[arg(long, value_parser = parse_space)]
        space: Option<Space>,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Graph source instead of a ball, see `median --help`.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Median-graph checks.
    Median {
        /// `tree:Q:R`, `grid:AxB`, `cube:D`, `path:N`, `cycle:N`, `petersen`,
        /// `kbip:A,B`, `product:<g>*<g>` or the path of an edge-list file.
        #[arg(long)]
        graph: String,
        /// Comma-separated subset of median, sageev, condneg, schoenberg, kernel, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        checks: Vec<String>,
        /// Values of `s` for the Schoenberg check.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,-0.5,0,0.5,1")]
        s_grid: Vec<f64>,
        /// Number of random measures for the kernel check.
        #[arg(long, default_value_t = 10)]
        measures: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct KernelJob {
    /// Kernel JSON, inline or a file path.
    #[arg(long)]
    pub kernel: String,
    /// `tree:<q|inf>` or `product:<q1,q2,...>`.
    #[arg(long, value_parser = parse_space)]
    pub space: Space,
    /// Truncation `M`.
    #[arg(long, default_value_t = 64)]
    pub trunc: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Witness {
    /// Negative smoothed entry at `r = q + eps`.
    Cor5 {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 32)]
        trunc: usize,
    },
    /// Negative product form on `δ_(0,1) + δ_(1,0)`.
    Cor6 {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        trunc: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    pub degrees: Vec<ExtendedDegree>,
}

pub fn parse_space(text: &str) -> Result<Space, String> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| format!("expected tree:<q> or product:<q1,...>, got {text:?}"))?;
    let parse = |s: &str| s.trim().parse::<ExtendedDegree>().map_err(|e| e.to_string());
    let degrees = match kind {
        "tree" => vec![parse(rest)?],
        "product" => rest.split(',').map(parse).collect::<Result<Vec<_>, _>>()?,
        other => return Err(format!("unknown space kind {other:?}")),
    };
    if degrees.is_empty() {
        return Err("space needs at least one degree".into());
    }
    Ok(Space { degrees })
}
