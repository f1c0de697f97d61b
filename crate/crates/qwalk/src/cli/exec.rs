//! Subcommand implementations: build library inputs from a merged
//! [`RunConfig`], run the computation, and emit CSV tables (plus optional
//! renderings).

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::{
    CoinChoice, ModeConfig, ModeKind, OutputFormat, PacketConfig, PacketEvolution, ParticleConfig,
    RunConfig, StartState,
};
use super::output::{self, Series, Table};
use crate::coin_walk::{walk_evolve, CoinSpec, LatticeWalkState};
use crate::plane_wave::{measured_moments, measured_step};
use crate::unmeasured::{evolve_mode_closed_form, ModeEvolutionInput};
use crate::wave_packet::{
    amplitude_profile, evolve_measured_all_left, evolve_unmeasured, forward_transform,
    gaussian_samples, gaussian_spectrum, resample_linear, validate_samples, SpatialGrid,
    SpectralAmplitude, SpectralGrid, WavePacketState, BOUNDARY_DECAY,
};
use crate::{Error, Result};

/// Metadata comment lines: tool version plus the full merged config, so
/// every output file is self-reproducing.
pub fn metadata(cfg: &RunConfig) -> Vec<String> {
    let mut lines = vec![format!("qwalk {}", env!("CARGO_PKG_VERSION"))];
    lines.extend(cfg.serialize().lines().map(str::to_string));
    lines
}

fn opt_len(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Renders one CSV according to the configured format (csv = no extra
/// output). The rendering re-reads the CSV it just wrote.
fn render(cfg: &RunConfig, csv: &Path, table: &Table, title: &str, x_label: &str) -> Result<()> {
    let series = output::series_for(csv, table);
    match cfg.format {
        OutputFormat::Csv => Ok(()),
        OutputFormat::Gnuplot => output::write_gnuplot(&csv.with_extension("gp"), title, x_label, &series),
        OutputFormat::Svg => output::write_svg(&csv.with_extension("svg"), title, x_label, &series),
    }
}

pub fn run_particle(cfg: &RunConfig, p: &ParticleConfig) -> Result<()> {
    let coin = match p.coin {
        CoinChoice::Hadamard => CoinSpec::hadamard(),
        CoinChoice::Identity => CoinSpec::identity(),
        CoinChoice::Rotation => CoinSpec::rotation(p.theta_c),
        CoinChoice::Angles => CoinSpec::Angles {
            eta: p.eta,
            phi: p.phi,
            theta_c: p.theta_c,
            varphi: p.varphi,
        },
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a_r, a_l) = match p.start {
        StartState::Right => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        StartState::Left => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        StartState::Symmetric => (Complex64::new(h, 0.0), Complex64::new(0.0, h)),
    };
    let start = LatticeWalkState::point(0, a_r, a_l, p.step_length);
    let state = walk_evolve(&start, &coin, p.order, p.steps).trimmed();

    let mut table = Table::new(["x", "p", "re_a_r", "im_a_r", "re_a_l", "im_a_l"]);
    for site in state.min_site()..=state.max_site() {
        let [r, l] = state.amplitude(site);
        table.push(vec![
            site as f64 * p.step_length,
            r.norm_sqr() + l.norm_sqr(),
            r.re,
            r.im,
            l.re,
            l.im,
        ]);
    }
    let csv = cfg.out_dir.join("particle.csv");
    output::write_csv(&csv, &metadata(cfg), &table)?;
    render(cfg, &csv, &table, "position distribution", "x")
}

pub fn run_mode(cfg: &RunConfig, m: &ModeConfig) -> Result<()> {
    let table = match m.kind {
        ModeKind::Coherent => {
            let mut table = Table::new(["t", "P1", "L1", "P2", "L2"]);
            for t in 0..=m.steps {
                let r = evolve_mode_closed_form(&ModeEvolutionInput {
                    a_r: m.a_r,
                    a_l: m.a_l,
                    k: m.k,
                    l: m.l,
                    theta: m.theta,
                    t,
                    l0: m.l0,
                });
                table.push(vec![t as f64, r.p1, opt_len(r.l1), r.p2, opt_len(r.l2)]);
            }
            table
        }
        ModeKind::Measured => {
            let step = measured_step(m.a_r, m.a_l, m.theta, m.k, m.l);
            let mut table = Table::new(["p_R", "l1", "p_L", "l2", "mean", "variance"]);
            for t in 0..=m.steps {
                let (mean, variance) = measured_moments(&step, t);
                table.push(vec![
                    step.p_r,
                    opt_len(step.l1),
                    step.p_l,
                    opt_len(step.l2),
                    mean,
                    variance,
                ]);
            }
            table
        }
    };
    let csv = cfg.out_dir.join("mode.csv");
    output::write_csv(&csv, &metadata(cfg), &table)?;
    render(cfg, &csv, &table, "mode evolution", "t")
}

/// Grids and spectrum shared by all checkpoints of a packet run.
pub struct PacketContext {
    pub grid: SpatialGrid,
    pub sgrid: SpectralGrid,
    pub spectrum: Vec<SpectralAmplitude>,
    /// Input samples on the spatial grid (for the t = 0 reference).
    pub samples: Vec<Complex64>,
}

/// Lenient reader for user packet input: columns x, re[, im]; `#`
/// comments and a non-numeric first header line are skipped.
fn read_packet_input(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(row) if (2..=3).contains(&row.len()) => {
                xs.push(row[0]);
                fs.push(Complex64::new(row[1], row.get(2).copied().unwrap_or(0.0)));
            }
            Some(_) => {
                return Err(Error::Config(format!(
                    "packet input {}: line {} needs 2 or 3 columns",
                    path.display(),
                    i + 1
                )))
            }
            // tolerate one header line, reject stray text elsewhere
            None if xs.is_empty() => continue,
            None => {
                return Err(Error::Config(format!(
                    "packet input {}: line {} is not numeric",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok((xs, fs))
}

pub fn build_packet_context(p: &PacketConfig) -> Result<PacketContext> {
    let grid = SpatialGrid::new(p.x_min, p.x_max, p.x_points)?;
    let sgrid = SpectralGrid::new(p.k_min, p.k_max, p.k_modes)?;
    let (samples, spectrum) = match &p.input {
        Some(path) => {
            let (xs, fs) = read_packet_input(path)?;
            let samples = resample_linear(&xs, &fs, &grid)?;
            let spectrum: Vec<SpectralAmplitude> = forward_transform(&grid, &samples, &sgrid)?
                .into_iter()
                .map(SpectralAmplitude::from_complex)
                .collect();
            (samples, spectrum)
        }
        None => {
            let samples = gaussian_samples(&grid, p.center, p.width);
            validate_samples(&samples)?;
            let spectrum = gaussian_spectrum(&sgrid, p.center, p.width);
            // the spatial check has a spectral counterpart: the truncated
            // spectral tail must be negligible too
            let peak = spectrum
                .iter()
                .map(|s| s.log_magnitude)
                .fold(f64::NEG_INFINITY, f64::max);
            let edge = spectrum[0]
                .log_magnitude
                .max(spectrum[spectrum.len() - 1].log_magnitude);
            if edge - peak > BOUNDARY_DECAY.ln() {
                return Err(Error::GridTooNarrow {
                    boundary: edge.exp(),
                    peak: peak.exp(),
                });
            }
            (samples, spectrum)
        }
    };
    Ok(PacketContext {
        grid,
        sgrid,
        spectrum,
        samples,
    })
}

pub fn evolve_packet(p: &PacketConfig, ctx: &PacketContext, t: u64) -> Result<WavePacketState> {
    let state = match p.evolution {
        PacketEvolution::MeasuredAllLeft => evolve_measured_all_left(
            &ctx.spectrum,
            &ctx.sgrid,
            &ctx.grid,
            p.a_r,
            p.a_l,
            p.theta,
            p.l,
            t,
        )?,
        PacketEvolution::Coherent => evolve_unmeasured(
            &ctx.spectrum,
            &ctx.sgrid,
            &ctx.grid,
            p.a_r,
            p.a_l,
            p.theta,
            p.l,
            t,
        )?,
    };
    state.validate_boundary()?;
    Ok(state)
}

pub fn profile_table(state: &WavePacketState) -> Table {
    let mut table = Table::new(["x", "abs_r", "abs_l", "density"]);
    for row in amplitude_profile(state) {
        table.push(vec![row.x, row.abs_r, row.abs_l, row.density]);
    }
    table
}

/// Profile of the input packet with the coin amplitudes attached
/// (the t = 0 reference curve).
pub fn initial_state(p: &PacketConfig, ctx: &PacketContext) -> WavePacketState {
    WavePacketState {
        grid: ctx.grid,
        field_r: ctx.samples.iter().map(|&f| f * p.a_r).collect(),
        field_l: ctx.samples.iter().map(|&f| f * p.a_l).collect(),
    }
}

pub fn run_packet(cfg: &RunConfig, p: &PacketConfig) -> Result<()> {
    let ctx = build_packet_context(p)?;
    for &t in &p.checkpoints {
        let state = if t == 0 {
            // the input packet echoed (with coin amplitudes attached)
            initial_state(p, &ctx)
        } else {
            evolve_packet(p, &ctx, t)?
        };
        let table = profile_table(&state);
        let csv = cfg.out_dir.join(format!("packet_t{t}.csv"));
        output::write_csv(&csv, &metadata(cfg), &table)?;
        render(cfg, &csv, &table, &format!("packet profile, t = {t}"), "x")?;
    }
    Ok(())
}

/// Series pointing at the given columns of one written CSV, labeled
/// `<label>:<column>` (or just the column name if the label is empty).
pub fn labeled_series(csv: &Path, table: &Table, cols: &[usize], label: &str) -> Vec<Series> {
    cols.iter()
        .map(|&i| Series {
            csv: csv.to_path_buf(),
            y_column: i,
            label: if label.is_empty() {
                table.columns[i].clone()
            } else {
                format!("{label} {}", table.columns[i])
            },
        })
        .collect()
}

pub fn write_figure_csv(cfg: &RunConfig, name: &str, table: &Table) -> Result<PathBuf> {
    let csv = cfg.out_dir.join(name);
    output::write_csv(&csv, &metadata(cfg), table)?;
    Ok(csv)
}
