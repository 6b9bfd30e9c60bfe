//! OMA and NOMA rate models.
//!
//! For a user with linear OMA SINR `gamma`, the orthogonal (OMA) rate is
//! `0.5 * log2(1 + gamma)` — the half accounts for the multiplexing loss of
//! splitting the resource. A NOMA pair shares the full resource: the strong
//! user gets a fraction `alpha_s` of the transmit power and cancels the weak
//! user's signal up to a residual fraction `beta`, the weak user gets the
//! rest and treats the strong user's signal as noise. Rates are `log2`
//! throughout, so everything is in bits/s/Hz.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One user's identity plus its linear-scale OMA SINR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserChannel {
    pub user_id: String,
    /// Linear-scale SINR; finite and non-negative.
    pub gamma: f64,
}

impl UserChannel {
    pub fn new(user_id: impl Into<String>, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Domain(format!(
                "user SINR must be finite and non-negative, got {gamma}"
            )));
        }
        Ok(Self {
            user_id: user_id.into(),
            gamma,
        })
    }
}

/// Fraction of transmit power allocated to the strong user of a pair.
///
/// The weak user receives `1 - alpha_s` by construction; only `alpha_s` is
/// ever stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSplit {
    alpha_s: f64,
}

impl PowerSplit {
    pub fn new(alpha_s: f64) -> Result<Self> {
        if !alpha_s.is_finite() || alpha_s <= 0.0 || alpha_s >= 1.0 {
            return Err(Error::Domain(format!(
                "alpha_s must lie strictly inside (0, 1), got {alpha_s}"
            )));
        }
        Ok(Self { alpha_s })
    }

    pub fn alpha_s(self) -> f64 {
        self.alpha_s
    }

    pub fn alpha_w(self) -> f64 {
        1.0 - self.alpha_s
    }
}

/// Residual fraction of the weak user's power left uncancelled at the
/// strong user's receiver. Zero means perfect SIC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SicImperfection {
    beta: f64,
}

impl SicImperfection {
    pub const PERFECT: SicImperfection = SicImperfection { beta: 0.0 };

    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || !(0.0..=1.0).contains(&beta) {
            return Err(Error::Domain(format!(
                "beta must lie in [0, 1], got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(self) -> f64 {
        self.beta
    }
}

/// Which rate mapping to apply to a SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateModel {
    /// Shannon-form log rate.
    Lr,
    /// Discrete staircase rate (link-adaptation style).
    Dr,
}

/// One step of the discrete-rate staircase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrEntry {
    /// Linear SINR at and above which this step applies.
    pub threshold: f64,
    /// Rate in bits/s/Hz.
    pub rate: f64,
}

/// Discrete-rate model: an ordered SINR-threshold staircase.
///
/// Below the first threshold the rate is zero. Thresholds and rates must
/// both be strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrTable {
    entries: Vec<DrEntry>,
}

impl DrTable {
    pub fn new(entries: Vec<DrEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("DR table must have at least one entry".into()));
        }
        for w in entries.windows(2) {
            if w[1].threshold <= w[0].threshold {
                return Err(Error::Config(format!(
                    "DR table thresholds must be strictly increasing ({} then {})",
                    w[0].threshold, w[1].threshold
                )));
            }
            if w[1].rate <= w[0].rate {
                return Err(Error::Config(format!(
                    "DR table rates must be strictly increasing ({} then {})",
                    w[0].rate, w[1].rate
                )));
            }
        }
        if entries
            .iter()
            .any(|e| !e.threshold.is_finite() || !e.rate.is_finite() || e.rate <= 0.0)
        {
            return Err(Error::Config(
                "DR table entries must be finite with positive rates".into(),
            ));
        }
        Ok(Self { entries })
    }

    /// Builds a table from `(threshold_db, rate)` pairs.
    pub fn from_db_entries(entries: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            entries
                .iter()
                .map(|&(db, rate)| DrEntry {
                    threshold: crate::units::db_to_linear(db),
                    rate,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[DrEntry] {
        &self.entries
    }
}

/// 15-step default staircase patterned after a CQI-style link-adaptation
/// table: (SINR threshold dB, spectral efficiency bits/s/Hz).
const DEFAULT_DR_STEPS: [(f64, f64); 15] = [
    (-6.7, 0.1523),
    (-4.7, 0.2344),
    (-2.3, 0.3770),
    (0.2, 0.6016),
    (2.4, 0.8770),
    (4.3, 1.1758),
    (5.9, 1.4766),
    (8.1, 1.9141),
    (10.3, 2.4063),
    (11.7, 2.7305),
    (14.1, 3.3223),
    (16.3, 3.9023),
    (18.7, 4.5234),
    (21.0, 5.1152),
    (22.7, 5.5547),
];

impl Default for DrTable {
    fn default() -> Self {
        Self::from_db_entries(&DEFAULT_DR_STEPS).expect("default table is valid")
    }
}

fn check_sinr(name: &str, gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be finite and non-negative, got {gamma}"
        )));
    }
    Ok(())
}

/// OMA rate `0.5 * log2(1 + gamma)` in bits/s/Hz.
pub fn oma_rate(gamma: f64) -> Result<f64> {
    check_sinr("gamma", gamma)?;
    Ok(0.5 * (1.0 + gamma).log2())
}

/// Effective SINRs of a NOMA pair under power split `alpha_s` and residual
/// interference fraction `beta`:
///
/// ```text
/// gamma_hat_s = alpha_s * gamma_s / (1 + beta * (1 - alpha_s) * gamma_s)
/// gamma_hat_w = (1 - alpha_s) * gamma_w / (1 + alpha_s * gamma_w)
/// ```
///
/// The caller orders the pair: `gamma_s >= gamma_w`.
pub fn noma_sinr_pair(
    gamma_s: f64,
    gamma_w: f64,
    split: PowerSplit,
    sic: SicImperfection,
) -> Result<(f64, f64)> {
    check_sinr("gamma_s", gamma_s)?;
    check_sinr("gamma_w", gamma_w)?;
    if gamma_s < gamma_w {
        return Err(Error::Ordering { gamma_s, gamma_w });
    }
    let a = split.alpha_s();
    let b = sic.beta();
    let gamma_hat_s = a * gamma_s / (1.0 + b * (1.0 - a) * gamma_s);
    let gamma_hat_w = (1.0 - a) * gamma_w / (1.0 + a * gamma_w);
    Ok((gamma_hat_s, gamma_hat_w))
}

/// NOMA rates `log2(1 + gamma_hat)` for both users. No 1/2 factor: the pair
/// shares the whole resource.
pub fn noma_rates(gamma_hat_s: f64, gamma_hat_w: f64) -> Result<(f64, f64)> {
    check_sinr("gamma_hat_s", gamma_hat_s)?;
    check_sinr("gamma_hat_w", gamma_hat_w)?;
    Ok(((1.0 + gamma_hat_s).log2(), (1.0 + gamma_hat_w).log2()))
}

/// Achievable sum rate of a NOMA pair.
pub fn asr_noma(r_s: f64, r_w: f64) -> f64 {
    r_s + r_w
}

/// Achievable sum rate of the same two users kept orthogonal.
pub fn asr_oma(gamma_s: f64, gamma_w: f64) -> Result<f64> {
    Ok(oma_rate(gamma_s)? + oma_rate(gamma_w)?)
}

/// Discrete-rate lookup: rate of the largest step whose threshold is at or
/// below `gamma`, zero below the first step. With `oma_flag` the result is
/// halved, mirroring the OMA multiplexing loss.
pub fn dr_rate(gamma: f64, table: &DrTable, oma_flag: bool) -> Result<f64> {
    check_sinr("gamma", gamma)?;
    let idx = table.entries.partition_point(|e| e.threshold <= gamma);
    let rate = if idx == 0 {
        0.0
    } else {
        table.entries[idx - 1].rate
    };
    Ok(if oma_flag { 0.5 * rate } else { rate })
}

/// Convenience: NOMA pair rates straight from OMA SINRs.
pub fn noma_pair_rates(
    gamma_s: f64,
    gamma_w: f64,
    split: PowerSplit,
    sic: SicImperfection,
) -> Result<(f64, f64)> {
    let (ghs, ghw) = noma_sinr_pair(gamma_s, gamma_w, split, sic)?;
    noma_rates(ghs, ghw)
}
