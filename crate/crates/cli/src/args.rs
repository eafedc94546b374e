use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Continuous-time quantum walks on graphs")]
pub struct Cli {
    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["graph", "family"])))]
pub struct GraphInput {
    /// Edge-list file (`-` for standard input).
    #[arg(long)]
    pub graph: Option<PathBuf>,

    /// Named family, e.g. `hypercube:4`, `path:3*path:3`, `compressed-q4`.
    #[arg(long)]
    pub family: Option<String>,

    /// Eigenvalue clustering tolerance (default `1e-9 ×` spectral radius).
    #[arg(long, env = "QWALK_TOLERANCE")]
    pub cluster_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph as a canonical edge list.
    Gen {
        #[command(flatten)]
        input: GraphInput,
        /// Destination file; `-` or absent writes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use a `<vertices> <edges>` header instead of `n <vertices>`.
        #[arg(long)]
        counts_header: bool,
    },

    /// Distinct eigenvalues, multiplicities and idempotent checks.
    Spectrum {
        #[command(flatten)]
        input: GraphInput,
        /// Report the eigenvalue support of this vertex.
        #[arg(long)]
        support: Option<usize>,
        /// CSV of eigenvalues and multiplicities.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Transition or mixing matrix at one time.
    Walk {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, allow_negative_numbers = true)]
        time: f64,
        #[arg(long, value_enum, default_value = "u")]
        matrix: MatrixKind,
        /// Also report the amplitude for this ordered pair `u,v`.
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
        /// CSV destination; `U` is written as `<stem>.re.csv` and `<stem>.im.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Perfect state transfer between two vertices.
    Pst {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        /// Search horizon for non-integral spectra.
        #[arg(long)]
        horizon: Option<f64>,
        /// Grid step for non-integral spectra.
        #[arg(long)]
        step: Option<f64>,
    },

    /// Scan of transfer fidelity over a time window.
    Pgst {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        step: Option<f64>,
        /// CSV of record fidelities.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Equitable partitions, quotient matrices and lifted transfer.
    #[command(group(ArgGroup::new("partition_source").args(["partition", "distance_from", "coarsest"])))]
    Quotient {
        #[command(flatten)]
        input: GraphInput,
        /// Partition file: one block per line, optional `weights: v=w ...` line.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Distance partition from this vertex.
        #[arg(long)]
        distance_from: Option<usize>,
        /// Coarsest equitable partition (the default).
        #[arg(long)]
        coarsest: bool,
        /// Extra vertex weights, `v=w`.
        #[arg(long = "weight", value_parser = parse_weight)]
        weights: Vec<(usize, String)>,
        /// Lift transfer between the singleton blocks of these vertices.
        #[arg(long, value_parser = parse_pair)]
        lift: Option<(usize, usize)>,
        /// CSV of the quotient matrix.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Association scheme of a distance-regular graph.
    Scheme {
        #[command(flatten)]
        input: GraphInput,
        /// Include the eigenmatrices and their identities.
        #[arg(long)]
        pq: bool,
        /// Mixing-matrix eigenvalues at time `t`.
        #[arg(long, allow_negative_numbers = true)]
        mix_eigs: Option<f64>,
        /// Uniform-mixing scan: `TMAX STEP`.
        #[arg(long, num_args = 2, value_names = ["TMAX", "STEP"])]
        um_scan: Option<Vec<f64>>,
        /// Roots-of-unity probe: `TAU N`.
        #[arg(long, num_args = 2, value_names = ["TAU", "N"])]
        roots: Option<Vec<f64>>,
        /// Prefix for `P.csv` and `Q.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Scan for uniform mixing.
    UmScan {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        tol: Option<f64>,
        /// CSV of the best local minima.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Average mixing matrices.
    Avgmix {
        #[command(flatten)]
        input: GraphInput,
        /// Average over `[0, T]` instead of the long-run limit.
        #[arg(long, conflicts_with = "dist")]
        interval: Option<f64>,
        /// `point:tau`, `uniform:T`, `gaussian:mu,sigma`, `exp:lambda`,
        /// `samples:<file>` or `density:<file>`.
        #[arg(long)]
        dist: Option<String>,
        /// Completely positive factorization (simple spectra only).
        #[arg(long)]
        cp: bool,
        /// Distance-regularity, primitivity and rank report.
        #[arg(long)]
        rank: bool,
        /// Rank over a grid of gaussian times.
        #[arg(long)]
        gaussian_scan: bool,
        /// CSV of the averaged matrix; otherwise it is inlined.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    #[value(name = "u", alias = "U")]
    U,
    #[value(name = "m", alias = "M")]
    M,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `u,v`, found `{s}`"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad vertex `{x}`"));
    Ok((num(a)?, num(b)?))
}

fn parse_weight(s: &str) -> Result<(usize, String), String> {
    let (v, w) = s.split_once('=').ok_or_else(|| format!("expected `v=w`, found `{s}`"))?;
    let v = v.trim().parse::<usize>().map_err(|_| format!("bad vertex `{v}`"))?;
    Ok((v, w.trim().to_string()))
}
