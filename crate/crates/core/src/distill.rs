//! Information-theoretic analysis of classical advantage distillation (CAD)
//! against the coherent block attack, and the two noise thresholds.
//!
//! Information is measured in nits (base-`n` logarithms) with `0 log 0 = 0`.
//!
//! The quantities of interest sit extremely close to 1 once the block length
//! grows, so everything here is computed through the *deficits* `1 - I`
//! evaluated in the log domain. `I_L(A&B) = 1 - H_n(beta^(L))`, the entropy of
//! Bob's distilled error distribution, and
//! `I_L(A&E) = 1 - beta0^(L) * H_n(eta^(L))`: case-II blocks (a fraction
//! `1 - beta0^(L)` of the good blocks) leak a full nit and case-I blocks leave
//! Eve the residual entropy of her square-root-measurement outcome.

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// Block length used by threshold searches unless told otherwise.
pub const DEFAULT_L_MAX: usize = 200;
/// Bisection tolerance used by threshold searches unless told otherwise.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Intervals in the monotonicity pre-scan of [`cad_threshold_numeric`].
pub const PRESCAN_INTERVALS: usize = 64;

/// The golden mean `(1 + sqrt 5) / 2`.
pub const GOLDEN_MEAN: f64 = 1.618_033_988_749_895;

/// Distilled key statistics for block length `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    pub block_length: usize,
    /// Probability that Bob's distilled value equals Alice's.
    pub beta0: f64,
    /// Probability of each particular wrong distilled value.
    pub beta1: f64,
    /// Probability that a raw block is accepted as good.
    pub p_accept: f64,
}

/// Eve's square-root-measurement outcome probabilities on case-I blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveStats {
    pub n: usize,
    pub block_length: usize,
    /// Correct-guess probability.
    pub eta0: f64,
    /// Probability of each particular wrong guess.
    pub eta1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoReport {
    pub block_length: usize,
    pub i_ab: f64,
    pub i_ae: f64,
    /// `i_ab - i_ae`, evaluated as `deficit_ae - deficit_ab`.
    pub margin: f64,
    pub deficit_ab: f64,
    pub deficit_ae: f64,
    /// Large-`L` approximation of `i_ab`; `None` at `epsilon` in {0, 1}.
    pub i_ab_asym: Option<f64>,
    pub i_ae_asym: Option<f64>,
}

impl InfoReport {
    pub fn is_secure(&self) -> bool {
        self.deficit_ae > self.deficit_ab
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub n: usize,
    pub e_qed: f64,
    pub e_cad: f64,
}

fn check_block_length(l: usize) -> Result<()> {
    if l < 1 {
        return Err(Error::BlockLength { min: 1, got: l });
    }
    Ok(())
}

/// `ln(base^l)` for `base` in [0, 1]; `-inf` when `base` is zero.
fn ln_pow(base: f64, l: usize) -> f64 {
    if base == 0.0 {
        f64::NEG_INFINITY
    } else {
        l as f64 * base.ln()
    }
}

/// Log-domain pieces of the distilled error distribution.
struct BobLog {
    /// `ln((n-1) (beta1/beta0)^L)`.
    ln_x: f64,
    /// `(n-1) (beta1/beta0)^L`, possibly underflowed to zero.
    x: f64,
    /// `ln(beta1/beta0)`.
    ln_odds: f64,
}

impl BobLog {
    fn new(params: &ChannelParams, l: usize) -> Self {
        let odds = params.error_odds();
        let ln_x = ((params.n() - 1) as f64).ln() + ln_pow(odds, l);
        Self {
            ln_x,
            x: ln_x.exp(),
            ln_odds: if odds == 0.0 { f64::NEG_INFINITY } else { odds.ln() },
        }
    }

    /// Natural log of the entropy (in nats) of Bob's distilled error
    /// distribution, `ln(1+x) + x L ln(beta0/beta1) / (1+x)`.
    fn ln_entropy(&self, l: usize) -> f64 {
        if self.ln_x == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let log1p_over_x = if self.x == 0.0 { 1.0 } else { self.x.ln_1p() / self.x };
        let factor = log1p_over_x + l as f64 * (-self.ln_odds) / (1.0 + self.x);
        self.ln_x + factor.ln()
    }
}

/// Log-domain pieces of Eve's SRM outcome distribution at overlap `mu = lambda^L`.
struct EveLog {
    /// `ln eta1`.
    ln_eta1: f64,
    /// `ln((n-1) eta1) = ln(1 - eta0)`.
    ln_y: f64,
    y: f64,
    eta0: f64,
    eta1: f64,
}

impl EveLog {
    fn new(n: usize, ln_mu: f64) -> Self {
        let nf = n as f64;
        let mu = ln_mu.exp();
        let a = (1.0 + (nf - 1.0) * mu).sqrt();
        let b = (1.0 - mu).max(0.0).sqrt();
        // a - b = n mu / (a + b), so eta1 = (mu / (a + b))^2 without cancellation.
        let ln_eta1 = 2.0 * (ln_mu - (a + b).ln());
        let ln_y = (nf - 1.0).ln() + ln_eta1;
        let eta0 = ((a + (nf - 1.0) * b) / nf).powi(2);
        Self {
            ln_eta1,
            ln_y,
            y: ln_y.exp(),
            eta0,
            eta1: ln_eta1.exp(),
        }
    }

    /// Natural log of `-eta0 ln eta0 - (n-1) eta1 ln eta1` (nats).
    fn ln_entropy(&self) -> f64 {
        if self.ln_y == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let first = if self.y == 0.0 {
            1.0
        } else {
            -(1.0 - self.y) * (-self.y).ln_1p() / self.y
        };
        self.ln_y + (first - self.ln_eta1).ln()
    }
}

/// Natural logs of the two deficits `1 - I_L(A&B)` and `1 - I_L(A&E)` in nits.
fn ln_deficits(params: &ChannelParams, l: usize) -> (f64, f64) {
    let ln_ln_n = (params.n() as f64).ln().ln();
    let bob = BobLog::new(params, l);
    let eve = EveLog::new(params.n(), ln_pow(params.lambda(), l));
    let ln_beta0l = -bob.x.ln_1p();
    (
        bob.ln_entropy(l) - ln_ln_n,
        ln_beta0l + eve.ln_entropy() - ln_ln_n,
    )
}

/// Distilled probabilities after CAD with blocks of length `l`.
pub fn distilled_betas(params: &ChannelParams, l: usize) -> Result<BlockStats> {
    check_block_length(l)?;
    let bob = BobLog::new(params, l);
    let nm1 = (params.n() - 1) as f64;
    let beta0 = 1.0 / (1.0 + bob.x);
    // beta1^(L) = (beta1/beta0)^L beta0^(L).
    let beta1 = if nm1 * bob.x == 0.0 { 0.0 } else { bob.x / nm1 * beta0 };
    let p_accept = (ln_pow(params.beta0(), l)).exp() * (1.0 + bob.x);
    Ok(BlockStats {
        block_length: l,
        beta0,
        beta1,
        p_accept,
    })
}

/// Mutual information between Alice and Bob after CAD, in nits.
pub fn info_alice_bob(params: &ChannelParams, l: usize) -> Result<f64> {
    check_block_length(l)?;
    Ok(1.0 - ln_deficits(params, l).0.exp())
}

/// Eve's correct and wrong guess probabilities for a case-I block.
pub fn eve_guess_probs(params: &ChannelParams, l: usize) -> Result<EveStats> {
    check_block_length(l)?;
    let eve = EveLog::new(params.n(), ln_pow(params.lambda(), l));
    Ok(EveStats {
        n: params.n(),
        block_length: l,
        eta0: eve.eta0,
        eta1: eve.eta1,
    })
}

/// Square-root-measurement success probability for `n` equiprobable states
/// with common pairwise overlap `mu`.
pub fn srm_closed_form(n: usize, mu: f64) -> f64 {
    let nf = n as f64;
    let a = (1.0 + (nf - 1.0) * mu).sqrt();
    let b = (1.0 - mu).max(0.0).sqrt();
    ((a + (nf - 1.0) * b) / nf).powi(2)
}

/// Mutual information between Alice and Eve after CAD, in nits.
pub fn info_alice_eve(params: &ChannelParams, l: usize) -> Result<f64> {
    check_block_length(l)?;
    Ok(1.0 - ln_deficits(params, l).1.exp())
}

fn check_interior(params: &ChannelParams) -> Result<()> {
    let e = params.epsilon();
    if e <= 0.0 || e >= 1.0 {
        return Err(Error::AsymptoticEndpoint(e));
    }
    Ok(())
}

/// Large-`L` approximations of the deficits `1 - I_L(A&B)`, `1 - I_L(A&E)`.
pub fn asymptotic_deficits(params: &ChannelParams, l: usize) -> Result<(f64, f64)> {
    check_block_length(l)?;
    check_interior(params)?;
    let nm1 = (params.n() - 1) as f64;
    let ln_n = (params.n() as f64).ln();
    let lf = l as f64;
    let ln_odds = params.error_odds().ln();
    let ln_lam = params.lambda().ln();
    let ab = nm1 * (lf * ln_odds).exp() * lf * (-ln_odds) / ln_n;
    let ae = 0.25 * nm1 * (2.0 * lf * ln_lam).exp() * 2.0 * lf * (-ln_lam) / ln_n;
    Ok((ab, ae))
}

/// Large-`L` approximations of `(I_L(A&B), I_L(A&E))`.
pub fn asymptotic_infos(params: &ChannelParams, l: usize) -> Result<(f64, f64)> {
    let (ab, ae) = asymptotic_deficits(params, l)?;
    Ok((1.0 - ab, 1.0 - ae))
}

/// Exact and asymptotic informations at block length `l`.
///
/// A positive margin means one-way post-processing of the distilled key can
/// produce a secure key.
pub fn security_margin(params: &ChannelParams, l: usize) -> Result<InfoReport> {
    check_block_length(l)?;
    let (ln_ab, ln_ae) = ln_deficits(params, l);
    let (deficit_ab, deficit_ae) = (ln_ab.exp(), ln_ae.exp());
    let asym = asymptotic_infos(params, l).ok();
    Ok(InfoReport {
        block_length: l,
        i_ab: 1.0 - deficit_ab,
        i_ae: 1.0 - deficit_ae,
        margin: deficit_ae - deficit_ab,
        deficit_ab,
        deficit_ae,
        i_ab_asym: asym.map(|a| a.0),
        i_ae_asym: asym.map(|a| a.1),
    })
}

/// Whether block length `l` gives `I_L(A&B) > I_L(A&E)`.
///
/// Compared on log-deficits so the answer stays exact after both deficits
/// underflow.
pub fn is_secure(params: &ChannelParams, l: usize) -> Result<bool> {
    check_block_length(l)?;
    let (ln_ab, ln_ae) = ln_deficits(params, l);
    Ok(ln_ae > ln_ab)
}

/// Smallest `L <= l_max` with a positive security margin.
///
/// Scans every length: the margin is not guaranteed monotone in `L`.
pub fn min_secure_block_length(params: &ChannelParams, l_max: usize) -> Result<Option<usize>> {
    check_block_length(l_max)?;
    for l in 1..=l_max {
        if is_secure(params, l)? {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

/// Noise threshold for quantum entanglement distillation, `n / (n + 1)`.
pub fn qed_threshold(n: usize) -> Result<f64> {
    check_dimension(n)?;
    let nf = n as f64;
    Ok(nf / (nf + 1.0))
}

/// Asymptotic CAD threshold `n / (n + golden mean)`, where
/// `beta1/beta0 = lambda^2`.
pub fn cad_threshold_closed(n: usize) -> Result<f64> {
    check_dimension(n)?;
    let nf = n as f64;
    Ok(nf / (nf + GOLDEN_MEAN))
}

/// Supremum noise level at which some `L <= l_max` gives a positive margin.
///
/// Bisects the security predicate after a pre-scan on a uniform grid of
/// [`PRESCAN_INTERVALS`] intervals. If the pre-scan sees the predicate switch
/// back on after switching off, the bracket around the highest secure grid
/// point is searched linearly in steps of `tol` instead.
pub fn cad_threshold_numeric(n: usize, l_max: usize, tol: f64) -> Result<f64> {
    check_dimension(n)?;
    if l_max < 16 {
        return Err(Error::BlockLength { min: 16, got: l_max });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Tolerance(tol));
    }
    let secure = |eps: f64| -> Result<bool> {
        let params = ChannelParams::from_noise(n, eps)?;
        Ok(min_secure_block_length(&params, l_max)?.is_some())
    };
    let grid: Vec<f64> = (0..=PRESCAN_INTERVALS)
        .map(|i| i as f64 / PRESCAN_INTERVALS as f64)
        .collect();
    let flags = grid.iter().map(|&e| secure(e)).collect::<Result<Vec<_>>>()?;
    if !flags[0] {
        return Err(Error::Bracketing(n));
    }
    let Some(last_true) = flags.iter().rposition(|&f| f) else {
        return Err(Error::Bracketing(n));
    };
    if last_true == PRESCAN_INTERVALS {
        // Secure even with pure noise: impossible, Eve then knows everything.
        return Err(Error::Bracketing(n));
    }
    let monotone = flags[..=last_true].iter().all(|&f| f);
    let (mut lo, mut hi) = (grid[last_true], grid[last_true + 1]);
    if monotone {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if secure(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        let steps = ((hi - lo) / tol).ceil() as usize;
        let mut best = lo;
        for k in 1..steps {
            let eps = lo + k as f64 * tol;
            if secure(eps)? {
                best = eps;
            }
        }
        lo = best;
        hi = (best + tol).min(hi);
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form QED and CAD thresholds for each `n` in `n_min..=n_max`.
pub fn threshold_table(n_min: usize, n_max: usize) -> Result<Vec<ThresholdRow>> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::Range {
            min: n_min,
            max: n_max,
        });
    }
    (n_min..=n_max)
        .map(|n| {
            Ok(ThresholdRow {
                n,
                e_qed: qed_threshold(n)?,
                e_cad: cad_threshold_closed(n)?,
            })
        })
        .collect()
}
