//! Built-in figure presets: deterministic data files `fig<n>_<series>.csv`
//! plus a gnuplot rendering script (and an SVG when requested).

use super::config::{OutputFormat, PacketConfig, PacketEvolution, RunConfig};
use super::exec::{
    build_packet_context, evolve_packet, initial_state, labeled_series, profile_table,
    write_figure_csv,
};
use super::output::{self, Series, Table};
use crate::plane_wave::{displacement_scan, ScanAxis, ScanParams};
use crate::{Error, Result};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn preset_theta() -> f64 {
    -(0.9f64).atan()
}

/// Writes the figure's rendering script (always) and SVG (when the format
/// asks for one).
fn finish(cfg: &RunConfig, n: u32, title: &str, x_label: &str, series: &[Series]) -> Result<()> {
    let stem = cfg.out_dir.join(format!("fig{n}"));
    output::write_gnuplot(&stem.with_extension("gp"), title, x_label, series)?;
    if cfg.format == OutputFormat::Svg {
        output::write_svg(&stem.with_extension("svg"), title, x_label, series)?;
    }
    Ok(())
}

fn scan_table(axis: ScanAxis, params: &ScanParams, start: f64, end: f64, samples: usize) -> Result<Table> {
    let rows = displacement_scan(axis, params, start, end, samples)?;
    let axis_name = match axis {
        ScanAxis::Theta => "theta",
        ScanAxis::K => "k",
    };
    let mut table = Table::new([axis_name, "L1", "L2"]);
    for r in rows {
        table.push(vec![
            r.value,
            r.l1.unwrap_or(f64::NAN),
            r.l2.unwrap_or(f64::NAN),
        ]);
    }
    Ok(table)
}

/// Branch displacements against the coin angle over `[0, 2 pi)`,
/// 2000 samples, at `k = 1`, `l = 0.01`, balanced amplitudes.
fn figure1(cfg: &RunConfig) -> Result<()> {
    let samples = 2000;
    let end = 2.0 * std::f64::consts::PI * (samples - 1) as f64 / samples as f64;
    let params = ScanParams {
        a_r: H,
        a_l: H,
        theta: 0.0,
        k: 1.0,
        l: 0.01,
    };
    let table = scan_table(ScanAxis::Theta, &params, 0.0, end, samples)?;
    let csv = write_figure_csv(cfg, "fig1_scan.csv", &table)?;
    finish(cfg, 1, "branch displacements vs theta", "theta", &labeled_series(&csv, &table, &[1, 2], ""))
}

/// Branch displacements against the wavenumber at `theta = 5.55`, `l = 1`
/// (window excludes `k = 0`, where the displacement is undefined).
fn figure2(cfg: &RunConfig) -> Result<()> {
    let params = ScanParams {
        a_r: H,
        a_l: H,
        theta: 5.55,
        k: 1.0,
        l: 1.0,
    };
    let table = scan_table(ScanAxis::K, &params, 0.05, 6.33, 2000)?;
    let csv = write_figure_csv(cfg, "fig2_scan.csv", &table)?;
    std::fs::write(
        cfg.out_dir.join("fig2_README.txt"),
        "The source figure was published with inconsistent parameters: its caption lists\n\
         l = theta = 1 while the accompanying text chooses theta = 5.55 (the regime where\n\
         L2 is much larger than L1). This preset follows the text: theta = 5.55, l = 1.\n\
         Pass `--config` with `theta = 1` to reproduce the caption's variant instead.\n",
    )?;
    finish(cfg, 2, "branch displacements vs k", "k", &labeled_series(&csv, &table, &[1, 2], ""))
}

fn packet_preset(evolution: PacketEvolution, grid: (f64, f64, usize), sgrid: (f64, f64, usize)) -> PacketConfig {
    PacketConfig {
        evolution,
        theta: preset_theta(),
        l: 0.01,
        a_r: H,
        a_l: H,
        x_min: grid.0,
        x_max: grid.1,
        x_points: grid.2,
        k_min: sgrid.0,
        k_max: sgrid.1,
        k_modes: sgrid.2,
        ..PacketConfig::default()
    }
}

/// Measured-all-left Gaussian profiles at a set of step counts; returns
/// the density series of each written CSV.
fn packet_figure(
    cfg: &RunConfig,
    n: u32,
    p: &PacketConfig,
    times: &[u64],
    cols: &[usize],
) -> Result<Vec<Series>> {
    let ctx = build_packet_context(p)?;
    let mut series = Vec::new();
    let init = profile_table(&initial_state(p, &ctx));
    let csv = write_figure_csv(cfg, &format!("fig{n}_initial.csv"), &init)?;
    series.extend(labeled_series(&csv, &init, cols, "initial"));
    for &t in times {
        let table = profile_table(&evolve_packet(p, &ctx, t)?);
        let csv = write_figure_csv(cfg, &format!("fig{n}_t{t}.csv"), &table)?;
        series.extend(labeled_series(&csv, &table, cols, &format!("t={t}")));
    }
    Ok(series)
}

/// Measured-all-left Gaussian after 1, 3, 5, 10, and 20 steps.
fn figure3(cfg: &RunConfig) -> Result<()> {
    let p = packet_preset(
        PacketEvolution::MeasuredAllLeft,
        (-12.0, 12.0, 8192),
        (-8.0, 8.0, 4096),
    );
    let series = packet_figure(cfg, 3, &p, &[1, 3, 5, 10, 20], &[3])?;
    finish(cfg, 3, "measured packet profiles", "x", &series)
}

/// Measured-all-left Gaussian after 35 steps (splitting regime); the
/// wider grids keep the split packet inside the window.
fn figure4(cfg: &RunConfig) -> Result<()> {
    let p = packet_preset(
        PacketEvolution::MeasuredAllLeft,
        (-16.0, 16.0, 8192),
        (-12.0, 12.0, 6144),
    );
    let series = packet_figure(cfg, 4, &p, &[35], &[3])?;
    finish(cfg, 4, "measured packet after 35 steps", "x", &series)
}

/// Coherent Gaussian after one step: coin-resolved profiles, one
/// sub-packet displaced and one nearly stationary.
fn figure5(cfg: &RunConfig) -> Result<()> {
    let p = packet_preset(
        PacketEvolution::Coherent,
        (-8.0, 8.0, 4096),
        (-8.0, 8.0, 4096),
    );
    let series = packet_figure(cfg, 5, &p, &[1], &[1, 2])?;
    finish(cfg, 5, "coherent packet after one step", "x", &series)
}

/// Coherent Gaussian after 6000-6003 steps; gated behind `--long-run`.
fn figure6(cfg: &RunConfig) -> Result<()> {
    if !cfg.long_run {
        return Err(Error::Config(
            "figure 6 evolves 6000+ steps; acknowledge with --long-run".into(),
        ));
    }
    let p = packet_preset(
        PacketEvolution::Coherent,
        (-30.0, 30.0, 16384),
        (-8.0, 8.0, 4096),
    );
    let series = packet_figure(cfg, 6, &p, &[6000, 6001, 6002, 6003], &[1, 2])?;
    finish(cfg, 6, "coherent packet after 6000-6003 steps", "x", &series)
}

pub fn run_figure(cfg: &RunConfig, n: u32) -> Result<()> {
    match n {
        1 => figure1(cfg),
        2 => figure2(cfg),
        3 => figure3(cfg),
        4 => figure4(cfg),
        5 => figure5(cfg),
        6 => figure6(cfg),
        other => Err(Error::Config(format!("unknown figure {other}; expected 1-6"))),
    }
}
