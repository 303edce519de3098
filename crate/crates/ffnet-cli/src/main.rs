use clap::Parser;
use ffnet::export::{self, Param, RunConfig, COMMANDS};
use ffnet::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Compute phase diagrams, bifurcation data, basins, loci, trajectories,
/// sweeps, jump responses, scaling fits and beam patterns as CSV + JSON.
#[derive(Parser, Debug)]
#[command(name = "ffnet", version, after_help = "Ranges are written start:end:count (count >= 2).")]
struct Cli {
    /// One of: phase-diagram, bifurcation, basins, loci, simulate, sweep, jump, scaling, beam
    command: Option<String>,
    /// TOML or JSON config file (a previous run's sidecar works too)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; the sidecar is written next to it with a .json extension
    #[arg(short, long)]
    output: Option<String>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Basin grid x range
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Basin grid y range
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Emission angle range for beam
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Locus kind: hysteresis, bifurcation, saddle-node, level-set, det-zero, stable-boundary
    #[arg(long)]
    kind: Option<String>,
    /// x value of a level-set locus
    #[arg(long, allow_hyphen_values = true)]
    level: Option<f64>,
    /// Swept parameter: mu, eps, sigma or lambda
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Sample every n-th step (simulate) or number of curve points (loci)
    #[arg(long)]
    stride: Option<usize>,
    /// Initial state, comma separated
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    x0: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    y_sign: Option<i8>,
    #[arg(long)]
    read_cell: Option<usize>,
    #[arg(long)]
    self_coupling: Option<bool>,
    #[arg(long)]
    n_elements: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    kd: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn param(v: Option<String>) -> Option<Param> {
    v.map(Param::Text)
}

fn build(cli: Cli) -> Result<RunConfig, Error> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(cmd) = cli.command {
        c.command = cmd;
    }
    if c.command.is_empty() {
        return Err(Error::Config(format!(
            "no command given; valid commands: {}",
            COMMANDS.join(", ")
        )));
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if cli.$f.is_some() { c.$f = cli.$f; } )* };
    }
    macro_rules! set_param {
        ($($f:ident),*) => { $( if cli.$f.is_some() { c.$f = param(cli.$f); } )* };
    }
    set!(output, system, kind, level, param, t_end, dt, stride, x0, y_sign, read_cell, self_coupling, n_elements, kd, theta, seed);
    set_param!(mu, eps, sigma, lambda, gamma, omega, x, y, phi);
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build(cli).and_then(|c| export::run(&c));
    match result {
        Ok(out) => {
            eprintln!("wrote {} rows to {} ({})", out.rows, out.csv.display(), out.sidecar.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(export::exit_code(&e) as u8)
        }
    }
}
