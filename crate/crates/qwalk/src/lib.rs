//! Discrete-time quantum walks of particles, plane waves, and wave packets.
//!
//! The library covers three layers of the same walk:
//!
//! - [`coin_walk`]: a particle on an integer lattice driven by a unitary
//!   coin and a coin-conditioned shift.
//! - [`plane_wave`] and [`unmeasured`]: a single spatial frequency driven
//!   by the rotation coin, with per-step measurement (branch probabilities
//!   and phase displacements) or fully coherent (closed-form t-step
//!   evolution via the eigenphase of the one-step operator).
//! - [`wave_packet`]: general packets evolved by Fourier synthesis over
//!   plane-wave modes.
//!
//! Every closed form has an independent brute-force counterpart in
//! [`oracle`]; the test suites compare the two routes at tight tolerances.

pub mod cli;
pub mod coin_walk;
mod error;
pub mod mat2;
pub mod oracle;
pub mod plane_wave;
pub mod unmeasured;
pub mod wave_packet;

pub use error::{Error, Result};

/// Wraps a phase to the principal window `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = phase - two_pi * (phase / two_pi).round();
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::wrap_phase;
    use std::f64::consts::PI;

    #[test]
    fn wrap_phase_principal_window() {
        assert_eq!(wrap_phase(0.0), 0.0);
        assert!((wrap_phase(2.0 * PI + 0.25) - 0.25).abs() < 1e-12);
        assert!((wrap_phase(-7.0 * PI) - PI).abs() < 1e-12);
        for i in -100..100 {
            let p = 0.37 * i as f64;
            let w = wrap_phase(p);
            assert!(w > -PI && w <= PI);
            assert!(((p - w) / (2.0 * PI)).round() * 2.0 * PI - (p - w) < 1e-9);
        }
    }
}
