//! Independent brute-force verification engines.
//!
//! Everything here is deliberately simple: direct lattice evolution of
//! sampled fields, exact 2x2 matrix powers, seeded Monte Carlo over
//! measurement histories, and binomial branch enumeration. Apart from the
//! shared [`step_operator`] definition these engines share no evolution
//! arithmetic with the closed-form modules they check.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::coin_walk::CoinSpec;
use crate::plane_wave::MeasuredStepResult;
use crate::unmeasured::step_operator;
use crate::{Error, Result};

/// Seed for all stochastic oracles. The generator algorithm is fixed and
/// recorded in outputs; per-trajectory streams are derived by the ChaCha
/// stream index so parallel evaluation cannot reorder results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed(pub u64);

pub const RNG_ALGORITHM: &str = "chacha8[stream=trajectory]";

fn trajectory_rng(seed: RngSeed, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(trajectory);
    rng
}

/// Exact `E'^t` applied to a complex amplitude pair at frequency `k`.
///
/// Repeated multiplication up to `t = 1000`; beyond that the 2x2 operator
/// is diagonalized numerically (quadratic formula on its trace, `det = 1`)
/// and the unit-modulus eigenvalues are raised by angle arithmetic, so the
/// error stays at rounding level independent of `t`.
pub fn mode_matrix_power(
    a_r: Complex64,
    a_l: Complex64,
    k: f64,
    l: f64,
    theta: f64,
    t: u64,
) -> (Complex64, Complex64) {
    let m = step_operator(k, l, theta);
    if t <= 1000 {
        let mut v = [a_r, a_l];
        for _ in 0..t {
            v = m.mul_vec(v);
        }
        return (v[0], v[1]);
    }
    let tr = m.trace();
    let disc = (tr * tr - Complex64::new(4.0, 0.0)).sqrt();
    let lam1 = (tr + disc) / 2.0;
    let lam2 = (tr - disc) / 2.0;
    let pow = |lam: Complex64| Complex64::from_polar(1.0, lam.arg() * t as f64);
    if disc.norm() < 1e-12 {
        // scalar operator
        let f = pow(lam1);
        return (a_r * f, a_l * f);
    }
    // eigenvector for each eigenvalue from the larger row of (M - lam I)
    let eigvec = |lam: Complex64| -> [Complex64; 2] {
        let r0 = [m.0[0][0] - lam, m.0[0][1]];
        let r1 = [m.0[1][0], m.0[1][1] - lam];
        let (a, b) = if r0[0].norm() + r0[1].norm() > r1[0].norm() + r1[1].norm() {
            (r0[0], r0[1])
        } else {
            (r1[0], r1[1])
        };
        // a v0 + b v1 = 0
        [b, -a]
    };
    let v1 = eigvec(lam1);
    let v2 = eigvec(lam2);
    // solve [v1 v2] c = psi0
    let det = v1[0] * v2[1] - v2[0] * v1[1];
    let c1 = (a_r * v2[1] - v2[0] * a_l) / det;
    let c2 = (v1[0] * a_l - a_r * v1[1]) / det;
    let f1 = c1 * pow(lam1);
    let f2 = c2 * pow(lam2);
    (f1 * v1[0] + f2 * v2[0], f1 * v1[1] + f2 * v2[1])
}

/// Complex coin-pair samples of a continuum field on a uniform lattice.
/// Norm is the integral norm `sum |a|^2 * spacing`.
#[derive(Debug, Clone)]
pub struct LatticeField {
    pub spacing: f64,
    pub min_site: i64,
    pub amps: Vec<[Complex64; 2]>,
}

impl LatticeField {
    /// Attaches the coin state `psi_in` to a scalar field sample.
    pub fn from_scalar(
        min_site: i64,
        spacing: f64,
        scalar: &[Complex64],
        psi_in: (Complex64, Complex64),
    ) -> Self {
        LatticeField {
            spacing,
            min_site,
            amps: scalar.iter().map(|&f| [psi_in.0 * f, psi_in.1 * f]).collect(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum::<f64>()
            * self.spacing
    }

    pub fn position(&self, i: usize) -> f64 {
        (self.min_site + i as i64) as f64 * self.spacing
    }

    fn sites_per_step(&self, step_length: f64) -> Result<usize> {
        let ratio = step_length / self.spacing;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 {
            return Err(Error::IncompatibleSpacing {
                step: step_length,
                spacing: self.spacing,
            });
        }
        Ok(m as usize)
    }
}

fn apply_shift_and_coin(field: &LatticeField, theta: f64, m: usize) -> LatticeField {
    let (s, c) = theta.sin_cos();
    let n = field.amps.len();
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; n + 2 * m];
    for (i, amp) in field.amps.iter().enumerate() {
        // U: R right by m sites, L left by m sites (padded window origin
        // shifts by m)
        out[i + 2 * m][0] = amp[0];
        out[i][1] = amp[1];
    }
    for amp in &mut out {
        let r = amp[0];
        let l = amp[1];
        amp[0] = c * r - s * l;
        amp[1] = s * r + c * l;
    }
    LatticeField {
        spacing: field.spacing,
        min_site: field.min_site - m as i64,
        amps: out,
    }
}

/// Coherent lattice evolution: `t` applications of `R(theta) * U` on the
/// sampled field.
pub fn lattice_evolve_coherent(
    field: &LatticeField,
    theta: f64,
    step_length: f64,
    t: u64,
) -> Result<LatticeField> {
    let m = field.sites_per_step(step_length)?;
    let mut cur = field.clone();
    for _ in 0..t {
        cur = apply_shift_and_coin(&cur, theta, m);
    }
    Ok(cur)
}

/// Measurement outcome of the coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinOutcome {
    R,
    L,
}

/// How the per-step coin measurement is decided.
#[derive(Debug, Clone, Copy)]
pub enum MeasureDriver<'a> {
    /// Born-rule sampling from the given seed.
    Sampled(RngSeed),
    /// Replay a recorded history (cross-checks against closed forms).
    Forced(&'a [CoinOutcome]),
}

/// Measured lattice walk of a scalar packet: per step apply `U` then
/// `R(theta)`, project the coin, renormalize, and re-initialize the coin
/// to `psi_in`. Returns the final scalar field and the outcome record.
pub fn lattice_evolve_measured(
    min_site: i64,
    spacing: f64,
    scalar: &[Complex64],
    psi_in: (Complex64, Complex64),
    theta: f64,
    step_length: f64,
    t: u64,
    driver: MeasureDriver<'_>,
) -> Result<(LatticeField, Vec<CoinOutcome>)> {
    let probe = LatticeField::from_scalar(min_site, spacing, scalar, psi_in);
    let m = probe.sites_per_step(step_length)?;
    if let MeasureDriver::Forced(rec) = driver {
        if rec.len() as u64 != t {
            return Err(Error::Config(format!(
                "forced record has {} outcomes for t = {t}",
                rec.len()
            )));
        }
    }
    let mut scalar: Vec<Complex64> = scalar.to_vec();
    let mut cur_min = min_site;
    let mut record = Vec::with_capacity(t as usize);
    for step in 0..t {
        let field = LatticeField::from_scalar(cur_min, spacing, &scalar, psi_in);
        let stepped = apply_shift_and_coin(&field, theta, m);
        let p_r: f64 = stepped.amps.iter().map(|a| a[0].norm_sqr()).sum::<f64>() * spacing;
        let total = stepped.norm_sq();
        let outcome = match driver {
            MeasureDriver::Forced(rec) => rec[step as usize],
            MeasureDriver::Sampled(seed) => {
                let u: f64 = trajectory_rng(seed, step).gen();
                if u < p_r / total {
                    CoinOutcome::R
                } else {
                    CoinOutcome::L
                }
            }
        };
        let idx = match outcome {
            CoinOutcome::R => 0,
            CoinOutcome::L => 1,
        };
        let branch_norm: f64 =
            stepped.amps.iter().map(|a| a[idx].norm_sqr()).sum::<f64>() * spacing;
        let scale = 1.0 / branch_norm.sqrt();
        scalar = stepped.amps.iter().map(|a| a[idx] * scale).collect();
        cur_min = stepped.min_site;
        record.push(outcome);
    }
    Ok((
        LatticeField::from_scalar(cur_min, spacing, &scalar, psi_in),
        record,
    ))
}

/// Sample mean/variance of the measured-mode phase displacement with
/// standard errors of both estimators.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloMoments {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub n_samples: u64,
    pub seed: RngSeed,
}

/// Monte Carlo over measured-step branch histories. Each trajectory draws
/// the number of right-branch outcomes `n` over `t` steps (binomially,
/// equivalent to `t` Bernoulli draws) and accumulates the displacement
/// `n*l1 + (t-n)*l2`.
pub fn monte_carlo_measured_mode(
    step: &MeasuredStepResult,
    t: u64,
    n_samples: u64,
    seed: RngSeed,
) -> Result<MonteCarloMoments> {
    if n_samples < 10_000 {
        return Err(Error::Config(format!(
            "Monte Carlo needs at least 1e4 samples, got {n_samples}"
        )));
    }
    let l1 = step.l1.unwrap_or(0.0);
    let l2 = step.l2.unwrap_or(0.0);
    let p = step.p_r.clamp(0.0, 1.0);
    let bin = Binomial::new(t, p).map_err(|e| Error::Config(format!("bad binomial: {e}")))?;
    // moments are accumulated about the first trajectory's value so the
    // raw sums stay at the scale of the spread, not of t * l
    let mut shift = 0.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_cu = 0.0;
    let mut sum_q = 0.0;
    for i in 0..n_samples {
        let mut rng = trajectory_rng(seed, i);
        let n = bin.sample(&mut rng) as f64;
        let x = n * l1 + (t as f64 - n) * l2;
        if i == 0 {
            shift = x;
        }
        let d = x - shift;
        sum += d;
        sum_sq += d * d;
        sum_cu += d * d * d;
        sum_q += d * d * d * d;
    }
    let n = n_samples as f64;
    let m1 = sum / n;
    let mean = shift + m1;
    let variance = (sum_sq / n - m1 * m1) * n / (n - 1.0);
    let se_mean = (variance / n).sqrt();
    // SE of the sample variance from the fourth central moment
    let m2 = sum_sq / n - m1 * m1;
    let m4 =
        sum_q / n - 4.0 * m1 * sum_cu / n + 6.0 * m1 * m1 * sum_sq / n - 3.0 * m1.powi(4);
    let se_variance = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    Ok(MonteCarloMoments {
        mean,
        variance,
        se_mean,
        se_variance,
        n_samples,
        seed,
    })
}

/// Monte Carlo measured particle walk (coin measured and re-initialized
/// each step: the classical limit). Returns position moments in physical
/// units.
pub fn monte_carlo_measured_particle(
    coin: &CoinSpec,
    psi_in: (Complex64, Complex64),
    step_length: f64,
    t: u64,
    n_samples: u64,
    seed: RngSeed,
) -> Result<MonteCarloMoments> {
    let flipped = coin.matrix().mul_vec([psi_in.0, psi_in.1]);
    let p_right = flipped[0].norm_sqr() / (flipped[0].norm_sqr() + flipped[1].norm_sqr());
    let bin = Binomial::new(t, p_right).map_err(|e| Error::Config(format!("bad binomial: {e}")))?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..n_samples {
        let mut rng = trajectory_rng(seed, i);
        let n = bin.sample(&mut rng) as f64;
        let x = (2.0 * n - t as f64) * step_length;
        sum += x;
        sum_sq += x * x;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean) * n / (n - 1.0);
    Ok(MonteCarloMoments {
        mean,
        variance,
        se_mean: (variance / n).sqrt(),
        se_variance: variance * (2.0 / (n - 1.0)).sqrt(),
        n_samples,
        seed,
    })
}

/// Compares the closed binomial branch weights `C(t,n) p_R^n p_L^{t-n}`
/// against `t`-fold composition of the two-outcome step distribution.
/// Returns the maximum probability deviation over all `n`.
pub fn binomial_branch_check(theta: f64, k: f64, l: f64, t: u64) -> Result<f64> {
    const MAX_T: u64 = 30;
    if t > MAX_T {
        return Err(Error::EnumerationTooLarge { got: t, max: MAX_T });
    }
    let step = crate::plane_wave::measured_step(
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
        theta,
        k,
        l,
    );
    // composition: convolve the per-step (p_R, p_L) outcome t times
    let mut composed = vec![1.0f64];
    for _ in 0..t {
        let mut next = vec![0.0f64; composed.len() + 1];
        for (n, &p) in composed.iter().enumerate() {
            next[n] += p * step.p_l;
            next[n + 1] += p * step.p_r;
        }
        composed = next;
    }
    // closed form via the multiplicative binomial recurrence
    let mut worst = 0.0f64;
    let mut choose = 1.0f64;
    for n in 0..=t {
        if n > 0 {
            choose *= (t - n + 1) as f64 / n as f64;
        }
        let closed = choose * step.p_r.powi(n as i32) * step.p_l.powi((t - n) as i32);
        worst = worst.max((closed - composed[n as usize]).abs());
    }
    Ok(worst)
}
