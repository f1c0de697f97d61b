//! Command-line front end: argument parsing, config merging, dispatch,
//! and exit-code policy.
//!
//! Precedence: command-line flags override config-file values, which
//! override built-in defaults. Exit codes: 0 success, 2 configuration
//! error, 3 numerical-validation failure.

pub mod config;
mod exec;
mod figures;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::{Error, Result};
use config::{RunConfig, TaskConfig};

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Coined quantum-walk simulator: particles, plane-wave modes, and wave packets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Key-value config file (`key = value` lines, `#` comments)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for all emitted files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv, svg, or gnuplot
    #[arg(long)]
    format: Option<String>,
    /// RNG seed recorded in output metadata
    #[arg(long)]
    seed: Option<u64>,
    /// Acknowledge long-running presets (required by figure 6)
    #[arg(long)]
    long_run: bool,
}

#[derive(Args, Debug)]
struct ParticleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coin: hadamard, identity, rotation, or angles
    #[arg(long)]
    coin: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    varphi: Option<f64>,
    /// Initial coin state: R, L, or symmetric
    #[arg(long)]
    start: Option<String>,
    /// Operator order: coin-then-shift or shift-then-coin
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    step_length: Option<f64>,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evolution kind: measured or coherent
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a_l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l0: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
}

#[derive(Args, Debug)]
struct PacketArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evolution: measured-all-left or coherent
    #[arg(long)]
    evolution: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    /// CSV packet input (columns x, re[, im]); overrides the Gaussian preset
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    a_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a_l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    /// Comma-separated ascending step checkpoints, e.g. 0,1,5
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    #[arg(long)]
    x_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_max: Option<f64>,
    #[arg(long)]
    k_modes: Option<usize>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Figure number, 1 to 6
    n: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lattice walk of a localized particle; emits the position distribution
    Particle(ParticleArgs),
    /// Single plane-wave mode, measured or coherent; emits per-step tables
    Mode(ModeArgs),
    /// Wave-packet evolution; emits one profile CSV per checkpoint
    Packet(PacketArgs),
    /// Reproduce a built-in figure preset (1-6)
    Figure(FigureArgs),
}

impl Cmd {
    fn subcommand(&self) -> &'static str {
        match self {
            Cmd::Particle(_) => "particle",
            Cmd::Mode(_) => "mode",
            Cmd::Packet(_) => "packet",
            Cmd::Figure(_) => "figure",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Cmd::Particle(a) => &a.common,
            Cmd::Mode(a) => &a.common,
            Cmd::Packet(a) => &a.common,
            Cmd::Figure(a) => &a.common,
        }
    }

    /// Explicitly given flags as config pairs (highest precedence).
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p: Vec<(&'static str, String)> = Vec::new();
        fn push<T: ToString>(p: &mut Vec<(&'static str, String)>, k: &'static str, v: &Option<T>) {
            if let Some(v) = v {
                p.push((k, v.to_string()));
            }
        }
        let c = self.common();
        if let Some(out) = &c.out {
            p.push(("out", out.display().to_string()));
        }
        push(&mut p, "format", &c.format);
        push(&mut p, "seed", &c.seed);
        if c.long_run {
            p.push(("long_run", "true".to_string()));
        }
        match self {
            Cmd::Particle(a) => {
                push(&mut p, "coin", &a.coin);
                push(&mut p, "eta", &a.eta);
                push(&mut p, "phi", &a.phi);
                push(&mut p, "theta_c", &a.theta_c);
                push(&mut p, "varphi", &a.varphi);
                push(&mut p, "start", &a.start);
                push(&mut p, "order", &a.order);
                push(&mut p, "steps", &a.steps);
                push(&mut p, "step_length", &a.step_length);
            }
            Cmd::Mode(a) => {
                push(&mut p, "kind", &a.kind);
                push(&mut p, "a_r", &a.a_r);
                push(&mut p, "a_l", &a.a_l);
                push(&mut p, "theta", &a.theta);
                push(&mut p, "k", &a.k);
                push(&mut p, "l", &a.l);
                push(&mut p, "l0", &a.l0);
                push(&mut p, "steps", &a.steps);
            }
            Cmd::Packet(a) => {
                push(&mut p, "evolution", &a.evolution);
                push(&mut p, "center", &a.center);
                push(&mut p, "width", &a.width);
                if let Some(input) = &a.input {
                    p.push(("input", input.display().to_string()));
                }
                push(&mut p, "a_r", &a.a_r);
                push(&mut p, "a_l", &a.a_l);
                push(&mut p, "theta", &a.theta);
                push(&mut p, "l", &a.l);
                push(&mut p, "checkpoints", &a.checkpoints);
                push(&mut p, "x_min", &a.x_min);
                push(&mut p, "x_max", &a.x_max);
                push(&mut p, "x_points", &a.x_points);
                push(&mut p, "k_min", &a.k_min);
                push(&mut p, "k_max", &a.k_max);
                push(&mut p, "k_modes", &a.k_modes);
            }
            Cmd::Figure(a) => {
                push(&mut p, "n", &a.n);
            }
        }
        p
    }
}

/// Builds the merged run configuration: defaults, then config file, then
/// flags.
fn merge(cmd: &Cmd) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(cmd.subcommand())?;
    if let Some(path) = &cmd.common().config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        for (k, v) in config::parse_pairs(&text)? {
            cfg.apply_pair(&k, &v)?;
        }
    }
    for (k, v) in cmd.pairs() {
        cfg.apply_pair(k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    match &cfg.task {
        TaskConfig::Particle(p) => exec::run_particle(cfg, p),
        TaskConfig::Mode(m) => exec::run_mode(cfg, m),
        TaskConfig::Packet(p) => exec::run_packet(cfg, p),
        TaskConfig::Figure { n } => figures::run_figure(cfg, *n),
    }
}

/// Exit code for a failed run: 2 for configuration errors, 3 for
/// numerical-validation failures, 1 for I/O.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::EnumerationTooLarge { .. } => 2,
        Error::GridTooNarrow { .. } | Error::IncompatibleSpacing { .. } => 3,
        Error::Io(_) => 1,
    }
}

/// Full CLI entry point; prints diagnostics and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // single-line diagnostic on the error stream
            let msg = e.to_string();
            eprintln!("error: {}", msg.lines().next().unwrap_or("bad arguments").trim_start_matches("error: "));
            return 2;
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return 0;
        }
    };
    let result = merge(&cli.cmd).and_then(|cfg| dispatch(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
