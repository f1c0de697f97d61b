//! Coherent (no intermediate measurement) t-step evolution of a single
//! plane-wave mode.
//!
//! Acting on `e^{ikx}`, the one-step operator `R(theta) * S` is the 2x2
//! unitary `[[e^{-ikl} cos t, -e^{ikl} sin t], [e^{-ikl} sin t, e^{ikl} cos t]]`.
//! Its eigenvalues are `-i e^{i alpha}` and `i e^{-i alpha}` with
//! `alpha = atan2(cos kl cos theta, Q)`, `Q = sqrt(sin^2 kl cos^2 theta + sin^2 theta)`,
//! which yields a closed form for the t-step amplitudes in terms of
//! `cos(t alpha)` and `sin(t alpha)`.

use num_complex::Complex64;

use crate::mat2::{C64, Mat2};
use crate::oracle;
use crate::wrap_phase;

/// Initial mode `(a_R |R> + a_L |L>) e^{ik(x - l0)}` and the walk
/// parameters. Coin amplitudes are real and normalized; the complex case
/// goes through [`oracle::mode_matrix_power`] directly.
#[derive(Debug, Clone, Copy)]
pub struct ModeEvolutionInput {
    pub a_r: f64,
    pub a_l: f64,
    pub k: f64,
    pub l: f64,
    pub theta: f64,
    pub t: u64,
    pub l0: f64,
}

/// Coin-resolved output of t-step mode evolution.
///
/// `amp_r`/`amp_l` are the coefficients of `e^{ikx}`; the `(P, L)` pair is
/// the same state viewed as `sqrt(P) e^{ik(x - l0 + L)}`. A length is
/// `None` when its branch probability vanishes or `k = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ModeEvolutionResult {
    pub p1: f64,
    pub p2: f64,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub amp_r: Complex64,
    pub amp_l: Complex64,
}

/// Spectral data of the one-step operator at fixed `(k, l, theta)`.
#[derive(Debug, Clone, Copy)]
pub struct SpectralDecomposition {
    pub alpha: f64,
    pub q: f64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    /// Shared first component of both eigenvectors (degenerate case: the
    /// operator is a multiple of the identity and the basis vectors are
    /// returned instead).
    pub v1: [Complex64; 2],
    pub v2: [Complex64; 2],
}

const DEGENERATE_Q: f64 = 1e-14;
const DEGENERATE_P: f64 = 1e-14;

/// The one-step operator `R(theta) * S` restricted to frequency `k`.
pub fn step_operator(k: f64, l: f64, theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let em = C64::from_polar(1.0, -k * l);
    let ep = em.conj();
    Mat2([
        [em * c, -ep * s],
        [em * s, ep * c],
    ])
}

pub fn eigenphase_q(k: f64, l: f64, theta: f64) -> (f64, f64) {
    let q = ((k * l).sin().powi(2) * theta.cos().powi(2) + theta.sin().powi(2)).sqrt();
    let alpha = ((k * l).cos() * theta.cos()).atan2(q);
    (alpha, q)
}

/// Eigenvalues and eigenvectors of [`step_operator`].
///
/// For `Q > 1e-14` the eigenvectors are the analytic
/// `(e^{ikl} sin theta, -i sin kl cos theta +/- i Q)` pair; the imaginary
/// square root branch is the one that pairs `lambda1 = -i e^{i alpha}`
/// with the `+iQ` vector. When `Q` degenerates the operator equals
/// `cos kl cos theta * I` and the basis vectors are eigenvectors.
pub fn eigensystem(k: f64, l: f64, theta: f64) -> SpectralDecomposition {
    let (alpha, q) = eigenphase_q(k, l, theta);
    let lambda1 = -Complex64::i() * Complex64::from_polar(1.0, alpha);
    let lambda2 = Complex64::i() * Complex64::from_polar(1.0, -alpha);
    if q <= DEGENERATE_Q {
        return SpectralDecomposition {
            alpha,
            q,
            lambda1,
            lambda2,
            v1: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            v2: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
    }
    let a = Complex64::from_polar(theta.sin(), k * l);
    let half_diff = Complex64::new(0.0, (k * l).sin() * theta.cos());
    let root = Complex64::new(0.0, q);
    SpectralDecomposition {
        alpha,
        q,
        lambda1,
        lambda2,
        v1: [a, -half_diff + root],
        v2: [a, -half_diff - root],
    }
}

/// Closed-form t-step evolution. Degenerate `Q` falls through to the
/// matrix-power oracle (the closed form is 0/0 there and the operator is
/// already diagonal).
pub fn evolve_mode_closed_form(input: &ModeEvolutionInput) -> ModeEvolutionResult {
    let ModeEvolutionInput {
        a_r,
        a_l,
        k,
        l,
        theta,
        t,
        l0,
    } = *input;
    let (alpha, q) = eigenphase_q(k, l, theta);
    if q <= DEGENERATE_Q {
        return evolve_mode_oracle(input);
    }
    let (sin_t, cos_t) = (t as f64 * alpha).sin_cos();
    let (s, c) = theta.sin_cos();
    let (skl, ckl) = (k * l).sin_cos();

    // the "/Q" divides only the trailing term it is attached to
    let coef_a = a_r * cos_t + a_l * ckl * s * sin_t / q;
    let coef_b = (a_r * c + a_l * s) * skl * sin_t / q;
    let coef_c = a_l * cos_t - a_r * ckl * s * sin_t / q;
    let coef_d = (a_r * s - a_l * c) * skl * sin_t / q;
    let coef_e = -(a_r * c + a_l * s) * skl * cos_t / q;
    let coef_f = -a_r * sin_t + a_l * ckl * s * cos_t / q;
    let coef_g = (-a_r * s + a_l * c) * skl * cos_t / q;
    let coef_h = -a_l * sin_t - a_r * ckl * s * cos_t / q;

    let (re_r, im_r, re_l, im_l) = if t % 2 == 0 {
        (coef_a, coef_b, coef_c, coef_d)
    } else {
        (coef_e, coef_f, coef_g, coef_h)
    };
    // phase factor i^t from the eigenvalue pair (-i e^{ia}, i e^{-ia})
    let i_pow_t = match t % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let rel_r = i_pow_t * Complex64::new(re_r, im_r);
    let rel_l = i_pow_t * Complex64::new(re_l, im_l);

    let p1 = re_r * re_r + im_r * im_r;
    let p2 = re_l * re_l + im_l * im_l;
    let recover = |p: f64, num: f64, den: f64| {
        if p < DEGENERATE_P || k == 0.0 {
            None
        } else {
            // tan(kL - t pi/2) = num/den, resolved by atan2 and wrapped to
            // the principal window
            let kl_branch = num.atan2(den) + t as f64 * std::f64::consts::FRAC_PI_2;
            Some(wrap_phase(kl_branch) / k)
        }
    };
    let carrier = Complex64::from_polar(1.0, -k * l0);
    ModeEvolutionResult {
        p1,
        p2,
        l1: recover(p1, im_r, re_r),
        l2: recover(p2, im_l, re_l),
        amp_r: rel_r * carrier,
        amp_l: rel_l * carrier,
    }
}

/// Brute-force t-step evolution via [`oracle::mode_matrix_power`].
pub fn evolve_mode_oracle(input: &ModeEvolutionInput) -> ModeEvolutionResult {
    let carrier = Complex64::from_polar(1.0, -input.k * input.l0);
    let (amp_r, amp_l) = oracle::mode_matrix_power(
        Complex64::new(input.a_r, 0.0),
        Complex64::new(input.a_l, 0.0),
        input.k,
        input.l,
        input.theta,
        input.t,
    );
    let amp_r = amp_r * carrier;
    let amp_l = amp_l * carrier;
    let p1 = amp_r.norm_sqr();
    let p2 = amp_l.norm_sqr();
    let recover = |p: f64, amp: Complex64| {
        if p < DEGENERATE_P || input.k == 0.0 {
            None
        } else {
            // sqrt(P) e^{ik(-l0 + L)} = amp
            Some(wrap_phase(amp.im.atan2(amp.re) + input.k * input.l0) / input.k)
        }
    };
    ModeEvolutionResult {
        p1,
        p2,
        l1: recover(p1, amp_r),
        l2: recover(p2, amp_l),
        amp_r,
        amp_l,
    }
}
