//! Plane-wave algebra and the measured-per-step closed form.
//!
//! A mode is `amplitude * e^{ik(x + offset)}`. One measured step applies
//! the conditional shift and the rotation coin, then projects the coin;
//! the surviving branch is again a plane wave at the same `k`, with a
//! branch probability and a phase-offset increment that do not depend on
//! the step index.

use num_complex::Complex64;

use crate::{wrap_phase, Error, Result};

/// `amplitude * e^{ik(x + offset)}` with the offset canonicalized to the
/// principal window `(-pi/k, pi/k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveMode {
    pub amplitude: f64,
    pub k: f64,
    pub offset: f64,
}

impl PlaneWaveMode {
    pub fn new(amplitude: f64, k: f64, offset: f64) -> Self {
        PlaneWaveMode {
            amplitude,
            k,
            offset: canonical_offset(k, offset),
        }
    }

    /// Complex value of the wave at position `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.k * (x + self.offset))
    }

    /// Equality of the physical wave: same `k`, same amplitude, offsets
    /// congruent modulo `2*pi/k`.
    pub fn approx_eq(&self, other: &PlaneWaveMode, tol: f64) -> bool {
        self.k == other.k
            && (self.amplitude - other.amplitude).abs() < tol
            && wrap_phase(self.k * (self.offset - other.offset)).abs() < tol * self.k.abs().max(1.0)
    }
}

fn canonical_offset(k: f64, offset: f64) -> f64 {
    if k == 0.0 {
        offset
    } else {
        wrap_phase(k * offset) / k
    }
}

/// Result of recombining two same-frequency waves.
#[derive(Debug, Clone, Copy)]
pub struct CombinedMode {
    pub mode: PlaneWaveMode,
    /// Destructive cancellation: amplitude below 1e-14, offset reported as
    /// zero because the phase of a zero wave is undefined.
    pub cancelled: bool,
}

/// Combines `A e^{ik(x+a)} + B e^{ik(x+b)}` into a single mode.
///
/// The amplitude comes from the law-of-cosines form and the offset from
/// the two-argument arctangent of the summed sine/cosine components.
pub fn combine_modes(a_amp: f64, a_off: f64, b_amp: f64, b_off: f64, k: f64) -> CombinedMode {
    debug_assert!(a_amp >= 0.0 && b_amp >= 0.0);
    let amplitude =
        (a_amp * a_amp + b_amp * b_amp + 2.0 * a_amp * b_amp * (k * (a_off - b_off)).cos())
            .max(0.0)
            .sqrt();
    if amplitude < 1e-14 {
        return CombinedMode {
            mode: PlaneWaveMode {
                amplitude: 0.0,
                k,
                offset: 0.0,
            },
            cancelled: true,
        };
    }
    let alpha = a_amp * (k * a_off).sin() + b_amp * (k * b_off).sin();
    let beta = a_amp * (k * a_off).cos() + b_amp * (k * b_off).cos();
    let offset = canonical_offset(k, alpha.atan2(beta) / k);
    CombinedMode {
        mode: PlaneWaveMode {
            amplitude,
            k,
            offset,
        },
        cancelled: false,
    }
}

/// Branch data of one measured step: probabilities and phase-offset
/// increments for the `|R>` and `|L>` outcomes.
///
/// `phase_r`/`phase_l` are the raw branch phases `k*l1`/`k*l2` wrapped to
/// `(-pi, pi]`; `l1`/`l2` are the corresponding lengths, `None` when the
/// branch probability vanishes (phase undefined) or `k = 0`.
#[derive(Debug, Clone, Copy)]
pub struct MeasuredStepResult {
    pub p_r: f64,
    pub p_l: f64,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub phase_r: f64,
    pub phase_l: f64,
    pub k: f64,
}

const DEGENERATE_P: f64 = 1e-14;

/// One measured step on the mode `(a_R |R> + a_L |L>) e^{ikx}`:
/// conditional shift by `l`, rotation coin by `theta`, coin projection.
///
/// Probabilities use the real-amplitude closed form; phases come from the
/// two-argument arctangent of the branch's complex amplitude (plain tan
/// inversion is ambiguous by pi). Inputs must be real and normalized; the
/// complex case is handled by the oracle path.
pub fn measured_step(a_r: f64, a_l: f64, theta: f64, k: f64, l: f64) -> MeasuredStepResult {
    let (s, c) = theta.sin_cos();
    let cross = 2.0 * a_r * a_l * s * c * (2.0 * k * l).cos();
    let p_r = (a_r * c).powi(2) + (a_l * s).powi(2) - cross;
    let p_l = (a_r * s).powi(2) + (a_l * c).powi(2) + cross;

    // branch amplitudes of the pre-measurement state
    let shift = Complex64::from_polar(1.0, -k * l);
    let z_r = a_r * c * shift - a_l * s * shift.conj();
    let z_l = a_r * s * shift + a_l * c * shift.conj();
    let phase_r = z_r.im.atan2(z_r.re);
    let phase_l = z_l.im.atan2(z_l.re);

    let length = |p: f64, phase: f64| {
        if p < DEGENERATE_P || k == 0.0 {
            None
        } else {
            Some(phase / k)
        }
    };
    MeasuredStepResult {
        p_r,
        p_l,
        l1: length(p_r, phase_r),
        l2: length(p_l, phase_l),
        phase_r,
        phase_l,
        k,
    }
}

/// The pre-measurement branch amplitudes `(z_R, z_L)` of one step, as the
/// coefficients of `e^{ikx}`.
pub fn step_branch_amplitudes(a_r: f64, a_l: f64, theta: f64, k: f64, l: f64) -> (Complex64, Complex64) {
    let (s, c) = theta.sin_cos();
    let shift = Complex64::from_polar(1.0, -k * l);
    (
        a_r * c * shift - a_l * s * shift.conj(),
        a_r * s * shift + a_l * c * shift.conj(),
    )
}

/// Moments of the phase displacement after `t` measured steps:
/// `mean = t (p_R l1 + p_L l2)`, `variance = t p_R p_L (l1 - l2)^2`.
///
/// A branch with vanishing probability contributes nothing, so its
/// undefined length is taken as zero.
pub fn measured_moments(step: &MeasuredStepResult, t: u64) -> (f64, f64) {
    let l1 = step.l1.unwrap_or(0.0);
    let l2 = step.l2.unwrap_or(0.0);
    let t = t as f64;
    let mean = t * (step.p_r * l1 + step.p_l * l2);
    let variance = t * step.p_r * step.p_l * (l1 - l2) * (l1 - l2);
    (mean, variance)
}

/// Scan axis for [`displacement_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Theta,
    K,
}

/// Fixed parameters of a scan; the scanned axis value overrides the
/// corresponding field.
#[derive(Debug, Clone, Copy)]
pub struct ScanParams {
    pub a_r: f64,
    pub a_l: f64,
    pub theta: f64,
    pub k: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub value: f64,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub p_r: f64,
    pub p_l: f64,
}

/// Samples [`measured_step`] along one axis; degenerate rows keep their
/// `None` lengths rather than being dropped.
pub fn displacement_scan(
    axis: ScanAxis,
    params: &ScanParams,
    start: f64,
    end: f64,
    samples: usize,
) -> Result<Vec<ScanRow>> {
    if samples < 2 {
        return Err(Error::Config(format!("scan needs at least 2 samples, got {samples}")));
    }
    if !start.is_finite() || !end.is_finite() {
        return Err(Error::Config("scan range must be finite".into()));
    }
    let dx = (end - start) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            let value = start + dx * i as f64;
            let (theta, k) = match axis {
                ScanAxis::Theta => (value, params.k),
                ScanAxis::K => (params.theta, value),
            };
            let step = measured_step(params.a_r, params.a_l, theta, k, params.l);
            ScanRow {
                value,
                l1: step.l1,
                l2: step.l2,
                p_r: step.p_r,
                p_l: step.p_l,
            }
        })
        .collect())
}

/// Per-step results for a sequence of coin angles (one measured step per
/// entry, coin re-initialized to `(a_r, a_l)` before each). The closed-form
/// moments do not apply to a varying schedule; callers accumulate the
/// per-step displacements of a recorded branch history themselves.
pub fn measured_step_schedule(
    a_r: f64,
    a_l: f64,
    thetas: &[f64],
    k: f64,
    l: f64,
) -> Vec<MeasuredStepResult> {
    thetas
        .iter()
        .map(|&theta| measured_step(a_r, a_l, theta, k, l))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    #[test]
    fn combine_in_phase_doubles() {
        let r = combine_modes(1.0, 0.0, 1.0, 0.0, 1.0);
        assert!(!r.cancelled);
        assert!((r.mode.amplitude - 2.0).abs() < 1e-14);
        assert!(r.mode.offset.abs() < 1e-14);
    }

    #[test]
    fn combine_antiphase_cancels() {
        let r = combine_modes(1.0, PI, 1.0, 0.0, 1.0);
        assert!(r.cancelled);
        assert_eq!(r.mode.amplitude, 0.0);
        assert_eq!(r.mode.offset, 0.0);
    }

    #[test]
    fn combine_matches_complex_addition() {
        // complex-arithmetic oracle for a specific case
        let (a, ao, b, bo, k) = (1.0, 0.3, 0.5, -0.7, 2.0);
        let r = combine_modes(a, ao, b, bo, k);
        let x = 0.83;
        let direct = Complex64::from_polar(a, k * (x + ao)) + Complex64::from_polar(b, k * (x + bo));
        assert!((r.mode.eval(x) - direct).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn combine_agrees_with_complex_addition(
            a in 0.0..3.0f64,
            ao in -10.0..10.0f64,
            b in 0.0..3.0f64,
            bo in -10.0..10.0f64,
            k in prop_oneof![-5.0..-0.05f64, 0.05..5.0f64],
            x in -3.0..3.0f64,
        ) {
            let r = combine_modes(a, ao, b, bo, k);
            let direct = Complex64::from_polar(a, k * (x + ao))
                + Complex64::from_polar(b, k * (x + bo));
            if !r.cancelled {
                prop_assert!((r.mode.eval(x) - direct).norm() < 1e-12);
                prop_assert_eq!(r.mode.k, k);
            } else {
                prop_assert!(direct.norm() < 1e-11);
            }
        }

        #[test]
        fn measured_step_probabilities_sum_to_one(
            ang in 0.0..(2.0 * PI),
            theta in -10.0..10.0f64,
            k in -8.0..8.0f64,
            l in 0.001..2.0f64,
        ) {
            let (a_r, a_l) = (ang.cos(), ang.sin());
            let step = measured_step(a_r, a_l, theta, k, l);
            prop_assert!((step.p_r + step.p_l - 1.0).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&step.p_r));
            prop_assert_eq!(step.k, k);
        }

        #[test]
        fn measured_step_reconstructs_branch_amplitudes(
            ang in 0.0..(2.0 * PI),
            theta in -10.0..10.0f64,
            k in prop_oneof![-8.0..-0.01f64, 0.01..8.0f64],
            l in 0.001..2.0f64,
        ) {
            // the (p, l) form and the direct complex evaluation of
            // R(theta) U on the mode are two views of one state
            let (a_r, a_l) = (ang.cos(), ang.sin());
            let step = measured_step(a_r, a_l, theta, k, l);
            let (z_r, z_l) = step_branch_amplitudes(a_r, a_l, theta, k, l);
            let rec_r = Complex64::from_polar(step.p_r.max(0.0).sqrt(), step.phase_r);
            let rec_l = Complex64::from_polar(step.p_l.max(0.0).sqrt(), step.phase_l);
            prop_assert!((rec_r - z_r).norm() < 1e-12);
            prop_assert!((rec_l - z_l).norm() < 1e-12);
            if let Some(l1) = step.l1 {
                prop_assert!(crate::wrap_phase(k * l1 - step.phase_r).abs() < 1e-12);
            }
        }

        #[test]
        fn measured_step_is_pure(
            ang in 0.0..(2.0 * PI),
            theta in -6.0..6.0f64,
        ) {
            let (a_r, a_l) = (ang.cos(), ang.sin());
            let a = measured_step(a_r, a_l, theta, 1.3, 0.02);
            let b = measured_step(a_r, a_l, theta, 1.3, 0.02);
            prop_assert_eq!(a.p_r, b.p_r);
            prop_assert_eq!(a.phase_r, b.phase_r);
            prop_assert_eq!(a.phase_l, b.phase_l);
        }
    }

    #[test]
    fn frozen_coin_is_pure_conditional_shift() {
        let l = 0.4;
        let step = measured_step(1.0, 0.0, 0.0, 1.0, l);
        assert!((step.p_r - 1.0).abs() < 1e-14);
        assert!((step.l1.unwrap() + l).abs() < 1e-12);
        assert!(step.l2.is_none());
    }

    #[test]
    fn balanced_coin_at_quarter_rotation() {
        // a_R = a_L = 1/sqrt(2), theta = pi/4: p_R = sin^2(kl), p_L = cos^2(kl)
        for kl in [0.1, 0.5, 1.2] {
            let step = measured_step(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_PI_4, 1.0, kl);
            assert!((step.p_r - kl.sin().powi(2)).abs() < 1e-12);
            assert!((step.p_l - kl.cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_trivial_cases() {
        let step = measured_step(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.3, 1.0, 0.01);
        assert_eq!(measured_moments(&step, 0), (0.0, 0.0));
        let det = measured_step(1.0, 0.0, 0.0, 1.0, 0.25);
        let (m, v) = measured_moments(&det, 17);
        assert!((m - 17.0 * det.l1.unwrap()).abs() < 1e-12);
        assert!(v.abs() < 1e-20);
    }

    #[test]
    fn theta_scan_endpoints_and_asymmetry() {
        let params = ScanParams {
            a_r: FRAC_1_SQRT_2,
            a_l: FRAC_1_SQRT_2,
            theta: 0.0,
            k: 1.0,
            l: 0.01,
        };
        let rows = displacement_scan(ScanAxis::Theta, &params, 0.0, 2.0 * PI, 2000).unwrap();
        // at theta = 0 the branches are the pure shifts -l and +l
        let first = &rows[0];
        assert!((first.l1.unwrap() + 0.01).abs() < 1e-10);
        assert!((first.l2.unwrap() - 0.01).abs() < 1e-10);
        // somewhere on the scan one displacement dwarfs the other
        let ratio = rows
            .iter()
            .filter_map(|r| match (r.l1, r.l2) {
                (Some(l1), Some(l2)) if l1.abs() > 1e-12 => Some(l2.abs() / l1.abs()),
                _ => None,
            })
            .fold(0.0f64, f64::max);
        assert!(ratio > 10.0, "max |l2|/|l1| = {ratio}");
    }

    #[test]
    fn k_scan_preserves_normalization() {
        let params = ScanParams {
            a_r: FRAC_1_SQRT_2,
            a_l: FRAC_1_SQRT_2,
            theta: 5.55,
            k: 0.0,
            l: 1.0,
        };
        let rows = displacement_scan(ScanAxis::K, &params, 0.01, 6.3, 500).unwrap();
        for r in &rows {
            assert!((r.p_r + r.p_l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_rejects_bad_sampling() {
        let params = ScanParams {
            a_r: 1.0,
            a_l: 0.0,
            theta: 0.0,
            k: 1.0,
            l: 0.01,
        };
        assert!(displacement_scan(ScanAxis::Theta, &params, 0.0, 1.0, 1).is_err());
        assert!(displacement_scan(ScanAxis::Theta, &params, 0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn schedule_matches_single_steps() {
        let thetas = [0.1, 0.9, -2.0, 5.55];
        let seq = measured_step_schedule(0.6, 0.8, &thetas, 2.0, 0.05);
        assert_eq!(seq.len(), 4);
        for (i, &theta) in thetas.iter().enumerate() {
            let single = measured_step(0.6, 0.8, theta, 2.0, 0.05);
            assert_eq!(seq[i].p_r, single.p_r);
            assert_eq!(seq[i].phase_l, single.phase_l);
        }
    }

    #[test]
    fn offsets_are_canonical() {
        let m = PlaneWaveMode::new(1.0, 2.0, 10.0);
        assert!(m.offset > -PI / 2.0 && m.offset <= PI / 2.0);
        let same = PlaneWaveMode::new(1.0, 2.0, 10.0 + PI);
        assert!(m.approx_eq(&same, 1e-12));
    }
}
