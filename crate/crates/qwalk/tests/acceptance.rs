//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see the lines for passing
//! criteria).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qwalk::coin_walk::{position_statistics, walk_evolve, CoinSpec, LatticeWalkState, OperatorOrder};
use qwalk::oracle::{
    lattice_evolve_coherent, mode_matrix_power, monte_carlo_measured_mode,
    monte_carlo_measured_particle, LatticeField, RngSeed,
};
use qwalk::plane_wave::{measured_moments, measured_step, step_branch_amplitudes};
use qwalk::unmeasured::{evolve_mode_closed_form, ModeEvolutionInput};
use qwalk::wave_packet::{
    evolve_measured_all_left, evolve_unmeasured, gaussian_samples, gaussian_spectrum,
    inverse_transform, local_maxima, peak_location, SpatialGrid, SpectralGrid,
};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
const PI: f64 = std::f64::consts::PI;

fn report(n: u32, name: &str, outcome: std::result::Result<String, String>) {
    match outcome {
        Ok(detail) => println!("[criterion {n}] {name}: PASS ({detail})"),
        Err(detail) => {
            println!("[criterion {n}] {name}: FAIL ({detail})");
            panic!("[criterion {n}] {name}: FAIL ({detail})");
        }
    }
}

/// Random real normalized coin amplitudes.
fn random_amplitudes(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let psi: f64 = rng.gen_range(0.0..2.0 * PI);
    (psi.cos(), psi.sin())
}

#[test]
fn criterion_01_unitarity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a_r, a_l) = random_amplitudes(&mut rng);
        let theta = rng.gen_range(-PI..PI);
        let k = rng.gen_range(-3.0..3.0);
        let l = rng.gen_range(0.001..1.0);
        let step = measured_step(a_r, a_l, theta, k, l);
        worst = worst.max((step.p_r + step.p_l - 1.0).abs());
        let t = rng.gen_range(0..100u64);
        let mode = evolve_mode_closed_form(&ModeEvolutionInput {
            a_r,
            a_l,
            k,
            l,
            theta,
            t,
            l0: 0.0,
        });
        worst = worst.max((mode.p1 + mode.p2 - 1.0).abs());
    }
    report(
        1,
        "unitarity sweep",
        if worst < 1e-12 {
            Ok(format!("max |p_R + p_L - 1| and |P1 + P2 - 1| = {worst:.2e}"))
        } else {
            Err(format!("max deviation {worst:.2e} >= 1e-12"))
        },
    );
}

#[test]
fn criterion_02_closed_form_vs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a_r, a_l) = random_amplitudes(&mut rng);
        let theta = rng.gen_range(-PI..PI);
        let k = rng.gen_range(-3.0..3.0);
        let l = rng.gen_range(0.001..1.0);
        // t log-uniform in [1, 1e4]
        let t = (rng.gen_range(0.0..1.0f64) * 1e4f64.ln()).exp().floor() as u64;
        let t = t.max(1);
        let closed = evolve_mode_closed_form(&ModeEvolutionInput {
            a_r,
            a_l,
            k,
            l,
            theta,
            t,
            l0: 0.0,
        });
        let (or, ol) = mode_matrix_power(
            Complex64::new(a_r, 0.0),
            Complex64::new(a_l, 0.0),
            k,
            l,
            theta,
            t,
        );
        worst = worst
            .max((closed.amp_r - or).norm())
            .max((closed.amp_l - ol).norm());
    }
    report(
        2,
        "closed form vs matrix-power oracle",
        if worst < 1e-10 {
            Ok(format!("max component error {worst:.2e} over 1000 sets"))
        } else {
            Err(format!("max component error {worst:.2e} >= 1e-10"))
        },
    );
}

#[test]
fn criterion_03_one_step_equivalence() {
    // mode level: coherent t = 1 equals the pre-measurement branches
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst_mode = 0.0f64;
    for _ in 0..100 {
        let (a_r, a_l) = random_amplitudes(&mut rng);
        let theta = rng.gen_range(-PI..PI);
        let k = rng.gen_range(-3.0..3.0);
        let l = rng.gen_range(0.001..1.0);
        let coherent = evolve_mode_closed_form(&ModeEvolutionInput {
            a_r,
            a_l,
            k,
            l,
            theta,
            t: 1,
            l0: 0.0,
        });
        let (z_r, z_l) = step_branch_amplitudes(a_r, a_l, theta, k, l);
        worst_mode = worst_mode
            .max((coherent.amp_r - z_r).norm())
            .max((coherent.amp_l - z_l).norm());
    }

    // packet level: Gaussian preset, coherent single step vs per-node
    // branch synthesis
    let grid = SpatialGrid::new(-8.0, 8.0, 2048).unwrap();
    let sgrid = SpectralGrid::symmetric(8.0, 2048).unwrap();
    let spectrum = gaussian_spectrum(&sgrid, 0.0, 1.0);
    let (theta, l) = (-(0.9f64).atan(), 0.01);
    let coherent = evolve_unmeasured(&spectrum, &sgrid, &grid, H, H, theta, l, 1).unwrap();
    let mut spec_r = Vec::with_capacity(sgrid.n_modes);
    let mut spec_l = Vec::with_capacity(sgrid.n_modes);
    for (j, sa) in spectrum.iter().enumerate() {
        let (z_r, z_l) = step_branch_amplitudes(H, H, theta, sgrid.node(j), l);
        let f = sa.to_complex();
        spec_r.push(f * z_r);
        spec_l.push(f * z_l);
    }
    let branch_r = inverse_transform(&sgrid, &spec_r, &grid);
    let branch_l = inverse_transform(&sgrid, &spec_l, &grid);
    let mut worst_packet = 0.0f64;
    for i in 0..grid.n_points {
        worst_packet = worst_packet
            .max((coherent.field_r[i] - branch_r[i]).norm())
            .max((coherent.field_l[i] - branch_l[i]).norm());
    }

    report(
        3,
        "one-step equivalence",
        if worst_mode < 1e-12 && worst_packet < 1e-8 {
            Ok(format!("mode error {worst_mode:.2e}, packet L-inf {worst_packet:.2e}"))
        } else {
            Err(format!(
                "mode error {worst_mode:.2e} (limit 1e-12), packet L-inf {worst_packet:.2e} (limit 1e-8)"
            ))
        },
    );
}

#[test]
fn criterion_04_measured_moments_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let t = 1000;
    let n = 1_000_000;
    let mut detail = String::new();
    for trial in 0..5 {
        let (a_r, a_l) = random_amplitudes(&mut rng);
        let theta = rng.gen_range(-1.3..1.3);
        let k = rng.gen_range(0.2..3.0);
        let l = rng.gen_range(0.01..0.5);
        let step = measured_step(a_r, a_l, theta, k, l);
        let (mean, var) = measured_moments(&step, t);
        let mc = monte_carlo_measured_mode(&step, t, n, RngSeed(900 + trial)).unwrap();
        let dm = (mc.mean - mean).abs() / mc.se_mean.max(f64::MIN_POSITIVE);
        let dv = (mc.variance - var).abs() / mc.se_variance.max(f64::MIN_POSITIVE);
        if dm > 4.0 || dv > 4.0 {
            report(
                4,
                "measured moments vs Monte Carlo",
                Err(format!(
                    "trial {trial}: mean off by {dm:.2} se, variance off by {dv:.2} se"
                )),
            );
        }
        detail = format!("worst trial {trial}: mean {dm:.2} se, variance {dv:.2} se");
    }
    report(4, "measured moments vs Monte Carlo", Ok(detail));
}

#[test]
fn criterion_05_measured_packet_displacement_rate() {
    // Gaussian preset, theta = -arctan 0.9, l = 0.01, all-left record:
    // peak displacement per step expected at 0.19 +/- 2% over the first
    // five steps.
    let grid = SpatialGrid::new(-8.0, 8.0, 4096).unwrap();
    let sgrid = SpectralGrid::symmetric(8.0, 4096).unwrap();
    let spectrum = gaussian_spectrum(&sgrid, 0.0, 1.0);
    let (theta, l) = (-(0.9f64).atan(), 0.01);
    let mut rates = Vec::new();
    let mut ok = true;
    for t in 1..=5u64 {
        let state =
            evolve_measured_all_left(&spectrum, &sgrid, &grid, H, H, theta, l, t).unwrap();
        let amp: Vec<f64> = state.field_l.iter().map(|v| v.norm()).collect();
        let rate = -peak_location(&grid, &amp) / t as f64;
        ok &= (rate - 0.19).abs() <= 0.02 * 0.19;
        rates.push(format!("t={t}: {rate:.4}"));
    }
    report(
        5,
        "measured packet displacement rate 0.19 +/- 2%",
        if ok {
            Ok(rates.join(", "))
        } else {
            Err(format!(
                "per-step peak displacement off target: {} (allowed 0.1862..0.1938); \
                 the exact peak rate is depressed below the long-wave value 19*l by the \
                 packet's finite spectral width",
                rates.join(", ")
            ))
        },
    );
}

#[test]
fn criterion_06_measured_packet_splitting() {
    let grid = SpatialGrid::new(-16.0, 16.0, 8192).unwrap();
    let sgrid = SpectralGrid::symmetric(12.0, 6144).unwrap();
    let spectrum = gaussian_spectrum(&sgrid, 0.0, 1.0);
    let state =
        evolve_measured_all_left(&spectrum, &sgrid, &grid, H, H, -(0.9f64).atan(), 0.01, 35)
            .unwrap();
    let amp: Vec<f64> = state.field_l.iter().map(|v| v.norm()).collect();
    let peaks = local_maxima(&amp, 0.1).len();
    report(
        6,
        "packet splits after 35 steps",
        if peaks >= 2 {
            Ok(format!("{peaks} local maxima above 10% of the peak"))
        } else {
            Err(format!("only {peaks} local maxima above 10% of the peak"))
        },
    );
}

#[test]
fn criterion_07_spectral_vs_lattice() {
    // lattice-commensurate grid: dx = l / 2
    let l = 0.01;
    let n_points = 3201;
    let grid = SpatialGrid::new(-8.0, 8.0, n_points).unwrap();
    let sgrid = SpectralGrid::symmetric(8.0, 4096).unwrap();
    let theta = -(0.9f64).atan();
    let t = 100;

    let spectrum = gaussian_spectrum(&sgrid, 0.0, 1.0);
    let spectral = evolve_unmeasured(&spectrum, &sgrid, &grid, H, H, theta, l, t).unwrap();

    let scalar = gaussian_samples(&grid, 0.0, 1.0);
    let field = LatticeField::from_scalar(
        -((n_points as i64 - 1) / 2),
        grid.dx(),
        &scalar,
        (Complex64::new(H, 0.0), Complex64::new(H, 0.0)),
    );
    let lattice = lattice_evolve_coherent(&field, theta, l, t).unwrap();

    let mut worst = 0.0f64;
    for i in 0..grid.n_points {
        let site = -((n_points as i64 - 1) / 2) + i as i64;
        let j = (site - lattice.min_site) as usize;
        worst = worst
            .max((spectral.field_r[i] - lattice.amps[j][0]).norm())
            .max((spectral.field_l[i] - lattice.amps[j][1]).norm());
    }
    report(
        7,
        "spectral packet vs lattice oracle at t = 100",
        if worst < 1e-6 {
            Ok(format!("L-inf {worst:.2e}"))
        } else {
            Err(format!("L-inf {worst:.2e} >= 1e-6"))
        },
    );
}

#[test]
fn criterion_08_variance_scaling() {
    let start = LatticeWalkState::point(0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0);
    let coin = CoinSpec::hadamard();
    let var = |t| position_statistics(&walk_evolve(&start, &coin, OperatorOrder::CoinThenShift, t)).1;
    let coherent_ratio = var(200) / var(100);

    let psi = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let mc = |t| {
        monte_carlo_measured_particle(&coin, psi, 1.0, t, 200_000, RngSeed(800))
            .unwrap()
            .variance
    };
    let measured_ratio = mc(200) / mc(100);

    let ok = (3.6..=4.4).contains(&coherent_ratio) && (1.9..=2.1).contains(&measured_ratio);
    report(
        8,
        "coherent quadratic vs measured linear spreading",
        if ok {
            Ok(format!(
                "coherent sigma^2(200)/sigma^2(100) = {coherent_ratio:.3}, measured = {measured_ratio:.3}"
            ))
        } else {
            Err(format!(
                "coherent ratio {coherent_ratio:.3} (want 3.6..4.4), measured {measured_ratio:.3} (want 1.9..2.1)"
            ))
        },
    );
}

#[test]
fn criterion_09_two_step_hadamard_exact() {
    let start = LatticeWalkState::point(0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0);
    let state = walk_evolve(&start, &CoinSpec::hadamard(), OperatorOrder::CoinThenShift, 2);
    let p = |site: i64| {
        let [r, l] = state.amplitude(site);
        r.norm_sqr() + l.norm_sqr()
    };
    let errs = [
        (p(2) - 0.25).abs(),
        (p(0) - 0.5).abs(),
        (p(-2) - 0.25).abs(),
        p(1).abs(),
        p(-1).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0f64, f64::max);
    report(
        9,
        "two-step Hadamard distribution exact",
        if worst < 1e-14 {
            Ok(format!("max error {worst:.2e}"))
        } else {
            Err(format!("max error {worst:.2e} >= 1e-14"))
        },
    );
}

#[test]
fn criterion_10_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_qwalk");
    let root = tempfile::tempdir().unwrap();
    let commands: &[&[&str]] = &[
        &["particle", "--steps", "5", "--seed", "7"],
        &["mode", "--kind", "coherent", "--steps", "20", "--seed", "7"],
        &[
            "packet",
            "--x-points",
            "256",
            "--k-modes",
            "256",
            "--checkpoints",
            "0,1",
            "--seed",
            "7",
        ],
        &["figure", "1", "--seed", "7"],
    ];
    for (ci, args) in commands.iter().enumerate() {
        let mut outputs: Vec<std::collections::BTreeMap<String, Vec<u8>>> = Vec::new();
        for rep in 0..2 {
            let dir = root.path().join(format!("c{ci}_r{rep}"));
            let status = std::process::Command::new(bin)
                .args(*args)
                .arg("--out")
                .arg(&dir)
                .status()
                .unwrap();
            if !status.success() {
                report(
                    10,
                    "CLI determinism",
                    Err(format!("{args:?} exited with {status}")),
                );
            }
            let mut files = std::collections::BTreeMap::new();
            for entry in std::fs::read_dir(&dir).unwrap() {
                let entry = entry.unwrap();
                files.insert(
                    entry.file_name().to_string_lossy().into_owned(),
                    std::fs::read(entry.path()).unwrap(),
                );
            }
            outputs.push(files);
        }
        let same_names: Vec<&String> = outputs[0].keys().collect();
        if outputs[0].keys().ne(outputs[1].keys()) {
            report(
                10,
                "CLI determinism",
                Err(format!("{args:?}: reruns produced different file sets")),
            );
        }
        for name in same_names {
            // the metadata header embeds the config, which differs only in
            // the --out path; compare everything after the header
            let strip = |bytes: &[u8]| -> Vec<u8> {
                let text = String::from_utf8_lossy(bytes).into_owned();
                text.lines()
                    .filter(|l| !l.starts_with("# out ="))
                    .collect::<Vec<_>>()
                    .join("\n")
                    .into_bytes()
            };
            if strip(&outputs[0][name]) != strip(&outputs[1][name]) {
                report(
                    10,
                    "CLI determinism",
                    Err(format!("{args:?}: {name} differs between reruns")),
                );
            }
        }
    }
    report(
        10,
        "CLI determinism",
        Ok("4 subcommands, byte-identical outputs across reruns".into()),
    );
}
