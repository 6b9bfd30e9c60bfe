//! Closed-form bounds on the NOMA power split and SIC imperfection, and the
//! minimum-SINR-difference pairing criterion.
//!
//! For a pair with OMA SINRs `gamma_s >= gamma_w > 0`:
//!
//! * [`alpha_upper`] — largest power split for which the weak user still
//!   beats its OMA rate.
//! * [`alpha_lower_strong`] — smallest split for which the strong user beats
//!   its OMA rate, given a residual interference fraction `beta`.
//! * [`alpha_lower_positivity`] — smallest split for which the sum-rate
//!   bound on `beta` stays positive.
//! * [`beta_upper_at_alpha`] / [`beta_upper_star`] — largest `beta` for
//!   which the NOMA sum rate beats the OMA sum rate, at a given split or at
//!   the weak user's upper split bound respectively.
//! * [`msd`] — the minimum SINR difference the pair must exceed for the
//!   split interval (`alpha_lower_positivity`, `alpha_upper`) to be
//!   non-empty; `gamma_s - gamma_w > msd` is the pairing criterion.
//!
//! Bound values are reported raw, never clamped to [0, 1]: a negative
//! `beta` bound is exactly how an infeasible split shows up.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Denominators smaller than this in magnitude are reported as
/// singularities instead of producing huge bound values.
const DENOM_EPS: f64 = 1e-12;

fn check_gamma_w(gamma_w: f64) -> Result<()> {
    if !gamma_w.is_finite() || gamma_w <= 0.0 {
        return Err(Error::Domain(format!(
            "gamma_w must be finite and strictly positive, got {gamma_w}"
        )));
    }
    Ok(())
}

fn check_gamma_s(gamma_s: f64) -> Result<()> {
    if !gamma_s.is_finite() || gamma_s <= 0.0 {
        return Err(Error::Domain(format!(
            "gamma_s must be finite and strictly positive, got {gamma_s}"
        )));
    }
    Ok(())
}

fn check_pair(gamma_s: f64, gamma_w: f64) -> Result<()> {
    check_gamma_s(gamma_s)?;
    check_gamma_w(gamma_w)?;
    if gamma_s < gamma_w {
        return Err(Error::Ordering { gamma_s, gamma_w });
    }
    Ok(())
}

/// Upper bound on `alpha_s` from the weak user's rate:
/// `(sqrt(1 + gamma_w) - 1) / gamma_w`, evaluated in the rationalized form
/// `1 / (1 + sqrt(1 + gamma_w))` which avoids cancellation at small SINR.
///
/// Strictly inside (0, 0.5) for `gamma_w > 0` and strictly decreasing.
pub fn alpha_upper(gamma_w: f64) -> Result<f64> {
    check_gamma_w(gamma_w)?;
    Ok(1.0 / (1.0 + (1.0 + gamma_w).sqrt()))
}

/// Lower bound on `alpha_s` from the strong user's rate at residual
/// interference `beta`:
/// `(1 + beta*gamma_s)(sqrt(1 + gamma_s) - 1) / (gamma_s (1 + beta*sqrt(1 + gamma_s) - beta))`,
/// evaluated with the `(sqrt(1+gamma_s) - 1) / gamma_s` factor rationalized
/// to `1 / (1 + sqrt(1 + gamma_s))`.
///
/// At `beta = 0` this reduces to `(sqrt(1 + gamma_s) - 1) / gamma_s`; it is
/// strictly increasing in `beta`.
pub fn alpha_lower_strong(gamma_s: f64, beta: f64) -> Result<f64> {
    check_gamma_s(gamma_s)?;
    if !beta.is_finite() || !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta must lie in [0, 1], got {beta}")));
    }
    let s = (1.0 + gamma_s).sqrt();
    Ok((1.0 + beta * gamma_s) / ((1.0 + s) * (1.0 + beta * (s - 1.0))))
}

/// Lower bound on `alpha_s` keeping the sum-rate `beta` bound positive:
/// `1 / (sqrt(1 + gamma_s) + 1 / sqrt(1 + gamma_w))`.
pub fn alpha_lower_positivity(gamma_s: f64, gamma_w: f64) -> Result<f64> {
    check_pair(gamma_s, gamma_w)?;
    Ok(1.0 / ((1.0 + gamma_s).sqrt() + 1.0 / (1.0 + gamma_w).sqrt()))
}

/// Upper bound on `beta` for the NOMA sum rate to beat OMA at split
/// `alpha_s`. May be negative when `alpha_s` is at or below
/// [`alpha_lower_positivity`]; that is the infeasibility signal, not an
/// error.
pub fn beta_upper_at_alpha(gamma_s: f64, gamma_w: f64, alpha_s: f64) -> Result<f64> {
    check_pair(gamma_s, gamma_w)?;
    if !alpha_s.is_finite() || alpha_s <= 0.0 || alpha_s >= 1.0 {
        return Err(Error::Domain(format!(
            "alpha_s must lie strictly inside (0, 1), got {alpha_s}"
        )));
    }
    let ss = (1.0 + gamma_s).sqrt();
    let sw = (1.0 + gamma_w).sqrt();
    let num = (1.0 + alpha_s * gamma_s) * sw - (1.0 + alpha_s * gamma_w) * ss;
    let den = gamma_s * (1.0 - alpha_s) * (ss * (1.0 + alpha_s * gamma_w) - sw);
    if den.abs() < DENOM_EPS {
        return Err(Error::Singularity(format!(
            "beta bound denominator degenerate ({den:e}) at gamma_s={gamma_s}, gamma_w={gamma_w}, alpha_s={alpha_s}"
        )));
    }
    Ok(num / den)
}

/// Upper bound on `beta` with the split at the weak user's bound: if `beta`
/// stays below this, both users of the pair beat their OMA rates.
/// Returns 0 in the `gamma_s = gamma_w` limit.
pub fn beta_upper_star(gamma_s: f64, gamma_w: f64) -> Result<f64> {
    check_pair(gamma_s, gamma_w)?;
    if gamma_s == gamma_w {
        return Ok(0.0);
    }
    let ss = (1.0 + gamma_s).sqrt();
    let sw = (1.0 + gamma_w).sqrt();
    let num = gamma_w - gamma_s + gamma_s * sw - gamma_w * ss;
    let den = gamma_s * (ss - 1.0) * (gamma_w - sw + 1.0);
    if den.abs() < DENOM_EPS {
        return Err(Error::Singularity(format!(
            "beta star denominator degenerate ({den:e}) at gamma_s={gamma_s}, gamma_w={gamma_w}"
        )));
    }
    Ok(num / den)
}

/// Minimum SINR difference for the pair to be NOMA-pairable:
/// `gamma_s - (sqrt(1+gamma_w) - 1)(sqrt(1+gamma_s) sqrt(1+gamma_w) + 1) / sqrt(1+gamma_w)`.
///
/// `gamma_s - gamma_w > msd` is algebraically equivalent to
/// `alpha_upper(gamma_w) > alpha_lower_positivity(gamma_s, gamma_w)`.
pub fn msd(gamma_s: f64, gamma_w: f64) -> Result<f64> {
    check_pair(gamma_s, gamma_w)?;
    let ss = (1.0 + gamma_s).sqrt();
    let sw = (1.0 + gamma_w).sqrt();
    Ok(gamma_s - (sw - 1.0) * (ss * sw + 1.0) / sw)
}

/// The pairing criterion: strict on both sides, so a pair sitting exactly
/// on the boundary is not pairable.
pub fn is_pairable(gamma_s: f64, gamma_w: f64) -> Result<bool> {
    Ok(gamma_s - gamma_w > msd(gamma_s, gamma_w)?)
}

/// All bound values for one candidate pair at a given split and residual
/// interference fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    /// Weak-user upper bound on the split.
    pub alpha_upper: f64,
    /// Strong-user lower bound on the split at the given `beta`.
    pub alpha_lower_strong: f64,
    /// Positivity lower bound on the split.
    pub alpha_lower_positivity: f64,
    /// Sum-rate bound on `beta` at the given split (raw, may be negative).
    pub beta_upper_at_alpha: f64,
    /// Sum-rate bound on `beta` at the weak user's split bound.
    pub beta_upper_star: f64,
    /// Minimum SINR difference (linear).
    pub msd: f64,
    /// Whether `gamma_s - gamma_w > msd`.
    pub pairable: bool,
}

/// Evaluates every bound for a candidate pair. The split/beta arguments
/// feed the split-dependent and beta-dependent bounds; they do not gate the
/// result.
pub fn feasible_region(
    gamma_s: f64,
    gamma_w: f64,
    alpha_s: f64,
    beta: f64,
) -> Result<FeasibleRegion> {
    check_pair(gamma_s, gamma_w)?;
    let upper = alpha_upper(gamma_w)?;
    let lower_strong = alpha_lower_strong(gamma_s, beta)?;
    let lower_positivity = alpha_lower_positivity(gamma_s, gamma_w)?;
    let beta_at_alpha = beta_upper_at_alpha(gamma_s, gamma_w, alpha_s)?;
    let beta_star = beta_upper_star(gamma_s, gamma_w)?;
    let delta = msd(gamma_s, gamma_w)?;
    let pairable = gamma_s - gamma_w > delta;
    // The MSD criterion and interval non-emptiness are the same condition in
    // two algebraic forms; if floating point lands them on opposite sides of
    // a boundary tie, resolve conservatively to "not pairable".
    let interval_nonempty = upper > lower_positivity;
    let pairable = pairable && interval_nonempty;
    Ok(FeasibleRegion {
        alpha_upper: upper,
        alpha_lower_strong: lower_strong,
        alpha_lower_positivity: lower_positivity,
        beta_upper_at_alpha: beta_at_alpha,
        beta_upper_star: beta_star,
        msd: delta,
        pairable,
    })
}
