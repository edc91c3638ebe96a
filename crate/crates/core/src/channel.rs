//! The noisy two-qunit channel: unbiased noise of weight `epsilon` admixed to
//! the ideal maximally entangled state, and the scalars derived from it.

use crate::error::{Error, Result};

/// Tolerance on externally supplied normalization (parsed input).
pub const INPUT_TOL: f64 = 1e-9;
/// Tolerance on internally derived identities.
pub const INTERNAL_TOL: f64 = 1e-12;

/// Channel parameters for dimension `n` and noise `epsilon`.
///
/// All five scalars are stored and checked against each other when the value
/// is built, so a `ChannelParams` in hand always satisfies
/// `beta0 + (n-1)*beta1 = 1`, `epsilon = n*beta1` and
/// `lambda = 1 - beta1/beta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    n: usize,
    epsilon: f64,
    beta0: f64,
    beta1: f64,
    lambda: f64,
}

impl ChannelParams {
    /// Builds the channel from its noise parameter.
    pub fn from_noise(n: usize, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Noise(epsilon));
        }
        let nf = n as f64;
        let beta1 = epsilon / nf;
        // beta0 - beta1 = 1 - epsilon holds exactly in this form.
        let beta0 = beta1 + (1.0 - epsilon);
        let params = Self {
            n,
            epsilon,
            beta0,
            beta1,
            lambda: overlap_closed_form(n, epsilon),
        };
        params.check_coherence();
        Ok(params)
    }

    /// Builds the channel from the matched-basis agreement probability
    /// `beta0` and the per-wrong-value probability `beta1`.
    pub fn from_betas(n: usize, beta0: f64, beta1: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let total = beta0 + (n as f64 - 1.0) * beta1;
        if !total.is_finite() || (total - 1.0).abs() > INPUT_TOL {
            return Err(Error::NotNormalized(total));
        }
        if beta1 < -INPUT_TOL || beta1 > beta0 + INPUT_TOL {
            return Err(Error::BetaOrder { beta0, beta1 });
        }
        let epsilon = (n as f64 * beta1).clamp(0.0, 1.0);
        Self::from_noise(n, epsilon)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    /// Pairwise overlap of Eve's `k = l` ancilla states.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `beta1 / beta0`, the per-symbol error odds.
    pub fn error_odds(&self) -> f64 {
        self.beta1 / self.beta0
    }

    fn check_coherence(&self) {
        let nf = self.n as f64;
        debug_assert!((self.beta0 + (nf - 1.0) * self.beta1 - 1.0).abs() <= INTERNAL_TOL);
        debug_assert!((self.epsilon - nf * self.beta1).abs() <= INTERNAL_TOL);
        debug_assert!(self.beta0 >= self.beta1 && self.beta1 >= 0.0);
        // beta0 >= 1/n on the valid range, so the ratio form is always defined.
        assert!(
            (self.lambda - (1.0 - self.beta1 / self.beta0)).abs() <= INTERNAL_TOL,
            "overlap forms disagree at n={}, epsilon={}",
            self.n,
            self.epsilon
        );
    }
}

/// Ancilla overlap in closed form, `(1 - E) / (1 - (1 - 1/n) E)`.
pub fn ancilla_overlap(params: &ChannelParams) -> f64 {
    overlap_closed_form(params.n, params.epsilon)
}

fn overlap_closed_form(n: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon) / (1.0 - (1.0 - 1.0 / n as f64) * epsilon)
}
