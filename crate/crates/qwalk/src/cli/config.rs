//! Run configuration: defaults, config-file parsing, flag overlay, and a
//! lossless key-value serialization.
//!
//! Precedence is built-in defaults, then config-file pairs, then
//! command-line flags; the merged configuration is embedded in every
//! output file's metadata header, so a run can be reproduced from its own
//! artifacts.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::coin_walk::OperatorOrder;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Gnuplot,
}

impl OutputFormat {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            "gnuplot" => Ok(OutputFormat::Gnuplot),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
            OutputFormat::Gnuplot => "gnuplot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinChoice {
    Hadamard,
    Identity,
    Rotation,
    Angles,
}

impl CoinChoice {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(CoinChoice::Hadamard),
            "identity" => Ok(CoinChoice::Identity),
            "rotation" => Ok(CoinChoice::Rotation),
            "angles" => Ok(CoinChoice::Angles),
            other => Err(Error::Config(format!("unknown coin `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            CoinChoice::Hadamard => "hadamard",
            CoinChoice::Identity => "identity",
            CoinChoice::Rotation => "rotation",
            CoinChoice::Angles => "angles",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartState {
    Right,
    Left,
    Symmetric,
}

impl StartState {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(StartState::Right),
            "L" | "l" => Ok(StartState::Left),
            "symmetric" => Ok(StartState::Symmetric),
            other => Err(Error::Config(format!("unknown start state `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            StartState::Right => "R",
            StartState::Left => "L",
            StartState::Symmetric => "symmetric",
        }
    }
}

fn parse_order(s: &str) -> Result<OperatorOrder> {
    match s {
        "coin-then-shift" => Ok(OperatorOrder::CoinThenShift),
        "shift-then-coin" => Ok(OperatorOrder::ShiftThenCoin),
        other => Err(Error::Config(format!("unknown operator order `{other}`"))),
    }
}

fn order_name(order: OperatorOrder) -> &'static str {
    match order {
        OperatorOrder::CoinThenShift => "coin-then-shift",
        OperatorOrder::ShiftThenCoin => "shift-then-coin",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Measured,
    Coherent,
}

impl ModeKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(ModeKind::Measured),
            "coherent" => Ok(ModeKind::Coherent),
            other => Err(Error::Config(format!("unknown mode kind `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeKind::Measured => "measured",
            ModeKind::Coherent => "coherent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketEvolution {
    MeasuredAllLeft,
    Coherent,
}

impl PacketEvolution {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "measured-all-left" => Ok(PacketEvolution::MeasuredAllLeft),
            "coherent" => Ok(PacketEvolution::Coherent),
            other => Err(Error::Config(format!("unknown packet evolution `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            PacketEvolution::MeasuredAllLeft => "measured-all-left",
            PacketEvolution::Coherent => "coherent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    pub coin: CoinChoice,
    pub eta: f64,
    pub phi: f64,
    pub theta_c: f64,
    pub varphi: f64,
    pub start: StartState,
    pub order: OperatorOrder,
    pub steps: u64,
    pub step_length: f64,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        ParticleConfig {
            coin: CoinChoice::Hadamard,
            eta: 0.0,
            phi: 0.0,
            theta_c: 0.0,
            varphi: 0.0,
            start: StartState::Right,
            order: OperatorOrder::CoinThenShift,
            steps: 10,
            step_length: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeConfig {
    pub kind: ModeKind,
    pub a_r: f64,
    pub a_l: f64,
    pub theta: f64,
    pub k: f64,
    pub l: f64,
    pub l0: f64,
    pub steps: u64,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            kind: ModeKind::Measured,
            a_r: std::f64::consts::FRAC_1_SQRT_2,
            a_l: std::f64::consts::FRAC_1_SQRT_2,
            theta: 0.0,
            k: 1.0,
            l: 0.01,
            l0: 0.0,
            steps: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketConfig {
    pub evolution: PacketEvolution,
    pub center: f64,
    pub width: f64,
    /// Optional CSV packet input (columns x, re[, im]); overrides the
    /// Gaussian preset.
    pub input: Option<PathBuf>,
    pub a_r: f64,
    pub a_l: f64,
    pub theta: f64,
    pub l: f64,
    pub checkpoints: Vec<u64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub k_modes: usize,
}

impl Default for PacketConfig {
    fn default() -> Self {
        PacketConfig {
            evolution: PacketEvolution::MeasuredAllLeft,
            center: 0.0,
            width: 1.0,
            input: None,
            a_r: std::f64::consts::FRAC_1_SQRT_2,
            a_l: std::f64::consts::FRAC_1_SQRT_2,
            theta: -(0.9f64).atan(),
            l: 0.01,
            checkpoints: vec![1],
            x_min: -8.0,
            x_max: 8.0,
            x_points: 4096,
            k_min: -8.0,
            k_max: 8.0,
            k_modes: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskConfig {
    Particle(ParticleConfig),
    Mode(ModeConfig),
    Packet(PacketConfig),
    Figure { n: u32 },
}

impl TaskConfig {
    pub fn subcommand(&self) -> &'static str {
        match self {
            TaskConfig::Particle(_) => "particle",
            TaskConfig::Mode(_) => "mode",
            TaskConfig::Packet(_) => "packet",
            TaskConfig::Figure { .. } => "figure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub long_run: bool,
    pub task: TaskConfig,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_checkpoints(value: &str) -> Result<Vec<u64>> {
    let list: Vec<u64> = value
        .split(',')
        .map(|s| parse_num("checkpoints", s.trim()))
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::Config("checkpoints must not be empty".into()));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "checkpoints must be strictly ascending, got {value}"
        )));
    }
    Ok(list)
}

fn checkpoints_string(list: &[u64]) -> String {
    list.iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    pub fn defaults(subcommand: &str) -> Result<Self> {
        let task = match subcommand {
            "particle" => TaskConfig::Particle(ParticleConfig::default()),
            "mode" => TaskConfig::Mode(ModeConfig::default()),
            "packet" => TaskConfig::Packet(PacketConfig::default()),
            "figure" => TaskConfig::Figure { n: 1 },
            other => return Err(Error::Config(format!("unknown subcommand `{other}`"))),
        };
        Ok(RunConfig {
            out_dir: PathBuf::from("."),
            format: OutputFormat::Csv,
            seed: 0,
            long_run: false,
            task,
        })
    }

    /// Applies one `key = value` pair; unknown keys are rejected.
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "subcommand" => {
                if value != self.task.subcommand() {
                    return Err(Error::Config(format!(
                        "config file is for subcommand `{value}`, not `{}`",
                        self.task.subcommand()
                    )));
                }
                return Ok(());
            }
            "out" => {
                self.out_dir = PathBuf::from(value);
                return Ok(());
            }
            "format" => {
                self.format = OutputFormat::parse(value)?;
                return Ok(());
            }
            "seed" => {
                self.seed = parse_num(key, value)?;
                return Ok(());
            }
            "long_run" => {
                self.long_run = parse_num(key, value)?;
                return Ok(());
            }
            _ => {}
        }
        match &mut self.task {
            TaskConfig::Particle(p) => match key {
                "coin" => p.coin = CoinChoice::parse(value)?,
                "eta" => p.eta = parse_num(key, value)?,
                "phi" => p.phi = parse_num(key, value)?,
                "theta_c" => p.theta_c = parse_num(key, value)?,
                "varphi" => p.varphi = parse_num(key, value)?,
                "start" => p.start = StartState::parse(value)?,
                "order" => p.order = parse_order(value)?,
                "steps" => p.steps = parse_num(key, value)?,
                "step_length" => p.step_length = parse_num(key, value)?,
                _ => return unknown(key, "particle"),
            },
            TaskConfig::Mode(m) => match key {
                "kind" => m.kind = ModeKind::parse(value)?,
                "a_r" => m.a_r = parse_num(key, value)?,
                "a_l" => m.a_l = parse_num(key, value)?,
                "theta" => m.theta = parse_num(key, value)?,
                "k" => m.k = parse_num(key, value)?,
                "l" => m.l = parse_num(key, value)?,
                "l0" => m.l0 = parse_num(key, value)?,
                "steps" => m.steps = parse_num(key, value)?,
                _ => return unknown(key, "mode"),
            },
            TaskConfig::Packet(p) => match key {
                "evolution" => p.evolution = PacketEvolution::parse(value)?,
                "center" => p.center = parse_num(key, value)?,
                "width" => p.width = parse_num(key, value)?,
                "input" => p.input = Some(PathBuf::from(value)),
                "a_r" => p.a_r = parse_num(key, value)?,
                "a_l" => p.a_l = parse_num(key, value)?,
                "theta" => p.theta = parse_num(key, value)?,
                "l" => p.l = parse_num(key, value)?,
                "checkpoints" => p.checkpoints = parse_checkpoints(value)?,
                "x_min" => p.x_min = parse_num(key, value)?,
                "x_max" => p.x_max = parse_num(key, value)?,
                "x_points" => p.x_points = parse_num(key, value)?,
                "k_min" => p.k_min = parse_num(key, value)?,
                "k_max" => p.k_max = parse_num(key, value)?,
                "k_modes" => p.k_modes = parse_num(key, value)?,
                _ => return unknown(key, "packet"),
            },
            TaskConfig::Figure { n } => match key {
                "n" => *n = parse_num(key, value)?,
                _ => return unknown(key, "figure"),
            },
        }
        Ok(())
    }

    /// Canonical `key = value` serialization. `parse` inverts it exactly
    /// (f64 values use the shortest round-trip decimal form).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &str| writeln!(s, "{k} = {v}").unwrap();
        put("subcommand", self.task.subcommand());
        put("out", &self.out_dir.display().to_string());
        put("format", self.format.name());
        put("seed", &self.seed.to_string());
        put("long_run", &self.long_run.to_string());
        match &self.task {
            TaskConfig::Particle(p) => {
                put("coin", p.coin.name());
                put("eta", &p.eta.to_string());
                put("phi", &p.phi.to_string());
                put("theta_c", &p.theta_c.to_string());
                put("varphi", &p.varphi.to_string());
                put("start", p.start.name());
                put("order", order_name(p.order));
                put("steps", &p.steps.to_string());
                put("step_length", &p.step_length.to_string());
            }
            TaskConfig::Mode(m) => {
                put("kind", m.kind.name());
                put("a_r", &m.a_r.to_string());
                put("a_l", &m.a_l.to_string());
                put("theta", &m.theta.to_string());
                put("k", &m.k.to_string());
                put("l", &m.l.to_string());
                put("l0", &m.l0.to_string());
                put("steps", &m.steps.to_string());
            }
            TaskConfig::Packet(p) => {
                put("evolution", p.evolution.name());
                put("center", &p.center.to_string());
                put("width", &p.width.to_string());
                if let Some(input) = &p.input {
                    put("input", &input.display().to_string());
                }
                put("a_r", &p.a_r.to_string());
                put("a_l", &p.a_l.to_string());
                put("theta", &p.theta.to_string());
                put("l", &p.l.to_string());
                put("checkpoints", &checkpoints_string(&p.checkpoints));
                put("x_min", &p.x_min.to_string());
                put("x_max", &p.x_max.to_string());
                put("x_points", &p.x_points.to_string());
                put("k_min", &p.k_min.to_string());
                put("k_max", &p.k_max.to_string());
                put("k_modes", &p.k_modes.to_string());
            }
            TaskConfig::Figure { n } => put("n", &n.to_string()),
        }
        s
    }

    /// Parses the serialized form (also the config-file format): one
    /// `key = value` per line, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let sub = pairs
            .iter()
            .find(|(k, _)| k == "subcommand")
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Config("config is missing `subcommand`".into()))?;
        let mut cfg = RunConfig::defaults(sub)?;
        for (k, v) in &pairs {
            cfg.apply_pair(k, v)?;
        }
        Ok(cfg)
    }

    /// Validates cross-field constraints before any computation.
    pub fn validate(&self) -> Result<()> {
        match &self.task {
            TaskConfig::Particle(p) => {
                if !(p.step_length > 0.0) {
                    return Err(Error::Config(format!(
                        "step_length must be positive, got {}",
                        p.step_length
                    )));
                }
                for (name, v) in [
                    ("eta", p.eta),
                    ("phi", p.phi),
                    ("theta_c", p.theta_c),
                    ("varphi", p.varphi),
                ] {
                    if !v.is_finite() {
                        return Err(Error::Config(format!("{name} must be finite, got {v}")));
                    }
                }
            }
            TaskConfig::Mode(m) => {
                validate_coin_amplitudes(m.a_r, m.a_l)?;
                for (name, v) in [("theta", m.theta), ("k", m.k), ("l", m.l), ("l0", m.l0)] {
                    if !v.is_finite() {
                        return Err(Error::Config(format!("{name} must be finite, got {v}")));
                    }
                }
            }
            TaskConfig::Packet(p) => {
                validate_coin_amplitudes(p.a_r, p.a_l)?;
                if !(p.width > 0.0) {
                    return Err(Error::Config(format!(
                        "packet width must be positive, got {}",
                        p.width
                    )));
                }
                if !(p.x_min < p.x_max) || p.x_points < 2 {
                    return Err(Error::Config("invalid spatial grid settings".into()));
                }
                if !(p.k_min < p.k_max) || p.k_modes < 2 {
                    return Err(Error::Config("invalid spectral grid settings".into()));
                }
            }
            TaskConfig::Figure { n } => {
                if !(1..=6).contains(n) {
                    return Err(Error::Config(format!("unknown figure {n}; expected 1-6")));
                }
            }
        }
        Ok(())
    }
}

fn validate_coin_amplitudes(a_r: f64, a_l: f64) -> Result<()> {
    if !a_r.is_finite() || !a_l.is_finite() {
        return Err(Error::Config("coin amplitudes must be finite".into()));
    }
    let norm = a_r * a_r + a_l * a_l;
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "coin amplitudes must be normalized: a_r^2 + a_l^2 = {norm}"
        )));
    }
    Ok(())
}

fn unknown(key: &str, sub: &str) -> Result<()> {
    Err(Error::Config(format!(
        "unknown config key `{key}` for subcommand `{sub}`"
    )))
}

/// Splits config text into (key, value) pairs in file order.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {}: expected `key = value`", i + 1))
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}
