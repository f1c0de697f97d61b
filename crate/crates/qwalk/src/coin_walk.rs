//! Discrete-time quantum walk of a particle on an integer lattice.
//!
//! A walk step is a coin unitary on the internal two-level state followed
//! by a coin-conditioned shift (`|R>` one site right, `|L>` one site
//! left), or the same two operators in reversed order.

use num_complex::Complex64;

use crate::mat2::{C64, Mat2};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A 2x2 unitary coin, either in the four-angle phase parametrization or
/// as a direct matrix.
///
/// The parametrized form is
/// `e^{i eta}/sqrt(2) * diag(e^{i phi}, e^{-i phi})
///  * [[e^{i theta}, e^{-i theta}], [e^{i theta}, -e^{-i theta}]]
///  * diag(e^{i varphi}, e^{-i varphi})`,
/// which reduces to the Hadamard matrix at all angles zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinSpec {
    Angles {
        eta: f64,
        phi: f64,
        theta_c: f64,
        varphi: f64,
    },
    Matrix(Mat2),
}

impl CoinSpec {
    pub fn hadamard() -> Self {
        CoinSpec::Angles {
            eta: 0.0,
            phi: 0.0,
            theta_c: 0.0,
            varphi: 0.0,
        }
    }

    pub fn identity() -> Self {
        CoinSpec::Matrix(Mat2::identity())
    }

    /// The real rotation coin `[[cos t, -sin t], [sin t, cos t]]`.
    pub fn rotation(theta: f64) -> Self {
        CoinSpec::Matrix(Mat2([
            [C64::new(theta.cos(), 0.0), C64::new(-theta.sin(), 0.0)],
            [C64::new(theta.sin(), 0.0), C64::new(theta.cos(), 0.0)],
        ]))
    }

    /// Realizes the coin as a 2x2 unitary matrix.
    pub fn matrix(&self) -> Mat2 {
        match *self {
            CoinSpec::Matrix(m) => m,
            CoinSpec::Angles {
                eta,
                phi,
                theta_c,
                varphi,
            } => coin_matrix(eta, phi, theta_c, varphi),
        }
    }
}

/// The four-angle unitary coin as a product of its three phase factors.
pub fn coin_matrix(eta: f64, phi: f64, theta_c: f64, varphi: f64) -> Mat2 {
    let e = |a: f64| C64::from_polar(1.0, a);
    let left = Mat2::diag(e(phi), e(-phi));
    // the middle factor carries its theta phases column-wise; a row-wise
    // reading would break unitarity away from multiples of pi/2
    let mid = Mat2([[e(theta_c), e(-theta_c)], [e(theta_c), -e(-theta_c)]]);
    let right = Mat2::diag(e(varphi), e(-varphi));
    left.mul(&mid)
        .mul(&right)
        .scale(e(eta) * C64::new(FRAC_1_SQRT_2, 0.0))
}

/// Which of the two per-step operators acts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOrder {
    CoinThenShift,
    ShiftThenCoin,
}

/// Coin-resolved amplitudes on a contiguous window of lattice sites.
///
/// Site indices are in units of the step length `l`; `amps[i]` holds the
/// `(a_R, a_L)` pair at site `min_site + i`.
#[derive(Debug, Clone)]
pub struct LatticeWalkState {
    min_site: i64,
    amps: Vec<[Complex64; 2]>,
    step_length: f64,
}

impl LatticeWalkState {
    /// A particle localized at one site with the given coin amplitudes.
    pub fn point(site: i64, a_r: Complex64, a_l: Complex64, step_length: f64) -> Self {
        assert!(step_length > 0.0, "step length must be positive");
        LatticeWalkState {
            min_site: site,
            amps: vec![[a_r, a_l]],
            step_length,
        }
    }

    pub fn step_length(&self) -> f64 {
        self.step_length
    }

    pub fn min_site(&self) -> i64 {
        self.min_site
    }

    pub fn max_site(&self) -> i64 {
        self.min_site + self.amps.len() as i64 - 1
    }

    pub fn amplitude(&self, site: i64) -> [Complex64; 2] {
        if site < self.min_site || site > self.max_site() {
            [Complex64::new(0.0, 0.0); 2]
        } else {
            self.amps[(site - self.min_site) as usize]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// Site-by-site probabilities `P(x) = |a_R|^2 + |a_L|^2`.
    pub fn probabilities(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| (self.min_site + i as i64, a[0].norm_sqr() + a[1].norm_sqr()))
    }

    /// Drops all-zero sites at both ends of the window.
    pub fn trimmed(mut self) -> Self {
        let is_zero = |a: &[Complex64; 2]| a[0].norm_sqr() + a[1].norm_sqr() == 0.0;
        while self.amps.len() > 1 && is_zero(self.amps.last().unwrap()) {
            self.amps.pop();
        }
        let lead = self.amps.iter().take_while(|a| is_zero(a)).count();
        let lead = lead.min(self.amps.len() - 1);
        if lead > 0 {
            self.amps.drain(..lead);
            self.min_site += lead as i64;
        }
        self
    }
}

/// One walk step under the chosen operator order. The output window grows
/// by one site on each side.
pub fn walk_step(state: &LatticeWalkState, coin: &CoinSpec, order: OperatorOrder) -> LatticeWalkState {
    let c = coin.matrix();
    let n = state.amps.len();
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; n + 2];
    match order {
        OperatorOrder::CoinThenShift => {
            for (i, amp) in state.amps.iter().enumerate() {
                let [r, l] = c.mul_vec(*amp);
                out[i + 2][0] += r;
                out[i][1] += l;
            }
        }
        OperatorOrder::ShiftThenCoin => {
            for (i, amp) in state.amps.iter().enumerate() {
                // shift first: R component lands at i+1, L at i-1 (in the
                // padded window those are i+2 and i).
                let [sr, sl] = c.mul_vec([amp[0], Complex64::new(0.0, 0.0)]);
                out[i + 2][0] += sr;
                out[i + 2][1] += sl;
                let [sr, sl] = c.mul_vec([Complex64::new(0.0, 0.0), amp[1]]);
                out[i][0] += sr;
                out[i][1] += sl;
            }
        }
    }
    LatticeWalkState {
        min_site: state.min_site - 1,
        amps: out,
        step_length: state.step_length,
    }
}

/// Inverse of [`walk_step`]: undoes one forward step exactly.
pub fn walk_step_inverse(
    state: &LatticeWalkState,
    coin: &CoinSpec,
    order: OperatorOrder,
) -> LatticeWalkState {
    let c_adj = coin.matrix().adjoint();
    let n = state.amps.len();
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; n + 2];
    match order {
        OperatorOrder::CoinThenShift => {
            // (S C)^-1 = C† S†: unshift, then apply the adjoint coin.
            for (i, amp) in state.amps.iter().enumerate() {
                out[i][0] += amp[0];
                out[i + 2][1] += amp[1];
            }
            for amp in &mut out {
                *amp = c_adj.mul_vec(*amp);
            }
        }
        OperatorOrder::ShiftThenCoin => {
            // (C S)^-1 = S† C†: adjoint coin, then unshift.
            for (i, amp) in state.amps.iter().enumerate() {
                let [r, l] = c_adj.mul_vec(*amp);
                out[i][0] += r;
                out[i + 2][1] += l;
            }
        }
    }
    LatticeWalkState {
        min_site: state.min_site - 1,
        amps: out,
        step_length: state.step_length,
    }
}

/// `t`-fold composition of [`walk_step`]; `t = 0` is the identity.
pub fn walk_evolve(
    state: &LatticeWalkState,
    coin: &CoinSpec,
    order: OperatorOrder,
    t: u64,
) -> LatticeWalkState {
    let mut cur = state.clone();
    for _ in 0..t {
        cur = walk_step(&cur, coin, order);
    }
    cur
}

/// Position mean and variance in physical units (site index times `l`).
pub fn position_statistics(state: &LatticeWalkState) -> (f64, f64) {
    let l = state.step_length;
    let mut mean = 0.0;
    let mut second = 0.0;
    for (site, p) in state.probabilities() {
        let x = site as f64 * l;
        mean += x * p;
        second += x * x * p;
    }
    (mean, second - mean * mean)
}
