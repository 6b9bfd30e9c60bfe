//! Stochastic-geometry network generator and Monte Carlo harness.
//!
//! Base stations and users are Poisson-deployed over a square region; links
//! see log-distance pathloss times unit-mean exponential (Rayleigh power)
//! fading; each user associates with the base station giving it the highest
//! SINR, with all non-serving base stations contributing full-buffer
//! interference. Per base station, the pairing algorithms run on the
//! associated users and the resulting plans are evaluated and averaged over
//! fading realizations.
//!
//! Determinism: every realization owns a counter-derived ChaCha stream off
//! the master seed, and results are reduced in realization order, so a
//! `(config, seed)` pair reproduces exactly regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pairing::{
    evaluate_plan, pair_near_far, pair_ucgd, plan_aup, BaselineSplit, PairPlan, SplitPolicy,
};
use crate::rates::{DrTable, RateModel, SicImperfection, UserChannel};
use crate::units::dbm_to_mw;
use crate::{Error, Result};

/// Simulation parameters. Distances are km, powers dBm, densities per km².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub bs_density: f64,
    pub user_density: f64,
    pub region_side: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    /// Pathloss intercept in dB at 1 km.
    pub pathloss_a: f64,
    /// Pathloss slope in dB per decade of distance.
    pub pathloss_b: f64,
    /// Rayleigh fading scale; mean fading power is its square.
    pub fading_scale: f64,
    pub realizations: u32,
    pub seed: u64,
    /// Residual SIC interference fraction.
    pub beta: f64,
    pub rate_model: RateModel,
    /// Split selection for the adaptive scheme's pairs.
    pub split_policy: SplitPolicy,
    /// Power allocation for the NF/UCGD baselines.
    pub baseline_split: BaselineSplit,
    /// Redraw base station and user positions every realization (default);
    /// otherwise geometry is drawn once and only fading varies.
    pub redraw_geometry: bool,
    /// When set, deploy `n_bs * users_per_bs` users instead of using
    /// `user_density`.
    pub users_per_bs: Option<u32>,
    pub dr_table: DrTable,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            bs_density: 25.0,
            user_density: 120.0,
            region_side: 1.0,
            tx_power_dbm: 46.0,
            noise_dbm: -104.0,
            pathloss_a: 128.1,
            pathloss_b: 37.6,
            fading_scale: 1.0,
            realizations: 80,
            seed: 0,
            beta: 0.0,
            rate_model: RateModel::Lr,
            split_policy: SplitPolicy::default(),
            baseline_split: BaselineSplit::default(),
            redraw_geometry: true,
            users_per_bs: None,
            dr_table: DrTable::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
            Ok(())
        }
        positive("bs_density", self.bs_density)?;
        positive("user_density", self.user_density)?;
        positive("region_side", self.region_side)?;
        positive("fading_scale", self.fading_scale)?;
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be positive".into()));
        }
        if !self.beta.is_finite() || !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        let mut policies = vec![self.split_policy];
        if let BaselineSplit::Policy(p) = self.baseline_split {
            policies.push(p);
        }
        for policy in policies {
            if let SplitPolicy::GridArgmax { grid_points } = policy {
                if grid_points < 2 {
                    return Err(Error::Config(format!(
                        "grid-argmax needs at least 2 grid points, got {grid_points}"
                    )));
                }
            }
        }
        if let BaselineSplit::Fixed { alpha_s } = self.baseline_split {
            if !alpha_s.is_finite() || alpha_s <= 0.0 || alpha_s >= 1.0 {
                return Err(Error::Config(format!(
                    "baseline fixed split must lie strictly inside (0, 1), got {alpha_s}"
                )));
            }
        }
        if self.users_per_bs == Some(0) {
            return Err(Error::Config("users_per_bs must be positive when set".into()));
        }
        Ok(())
    }

    fn sic(&self) -> SicImperfection {
        SicImperfection::new(self.beta).expect("validated")
    }
}

/// The pairing schemes the experiment runner can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Aup,
    Nf,
    Ucgd,
    Oma,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Aup, Algorithm::Nf, Algorithm::Ucgd, Algorithm::Oma];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Aup => "aup",
            Algorithm::Nf => "nf",
            Algorithm::Ucgd => "ucgd",
            Algorithm::Oma => "oma",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aup" | "a-up" => Ok(Algorithm::Aup),
            "nf" => Ok(Algorithm::Nf),
            "ucgd" => Ok(Algorithm::Ucgd),
            "oma" => Ok(Algorithm::Oma),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Base station and user positions for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs: Vec<(f64, f64)>,
    pub users: Vec<(f64, f64)>,
}

/// One realization: geometry, link gains, association, and per-user SINR.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    pub bs_positions: Vec<(f64, f64)>,
    pub user_positions: Vec<(f64, f64)>,
    /// Linear power gain per (user, bs): pathloss times fading.
    pub link_gain: Vec<Vec<f64>>,
    /// Serving base station per user.
    pub association: Vec<usize>,
    /// Linear SINR toward the serving base station.
    pub served_sinr: Vec<f64>,
}

/// ChaCha stream derived from the master seed by counter. Stream 0 is
/// reserved for fixed geometry; realization `r` uses stream `r + 1`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson count with the given mean.
pub fn sample_poisson_count(mean: f64, rng: &mut impl Rng) -> usize {
    let dist = Poisson::new(mean).expect("positive mean");
    let n: f64 = dist.sample(rng);
    n as usize
}

/// Unit-mean (at scale 1) exponential fading power sample.
pub fn sample_fading_power(fading_scale: f64, rng: &mut impl Rng) -> f64 {
    let mean = fading_scale * fading_scale;
    let dist = Exp::new(1.0 / mean).expect("positive rate");
    dist.sample(rng)
}

fn uniform_points(n: usize, side: f64, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect()
}

/// Draws Poisson counts and uniform positions for base stations and users.
/// A zero-BS draw is discarded and redrawn.
pub fn deploy(config: &SimConfig, rng: &mut impl Rng) -> Deployment {
    let area = config.region_side * config.region_side;
    let mut n_bs = sample_poisson_count(config.bs_density * area, rng);
    while n_bs == 0 {
        log::debug!("zero-BS deployment discarded, redrawing");
        n_bs = sample_poisson_count(config.bs_density * area, rng);
    }
    let n_users = match config.users_per_bs {
        Some(per_bs) => n_bs * per_bs as usize,
        None => sample_poisson_count(config.user_density * area, rng),
    };
    Deployment {
        bs: uniform_points(n_bs, config.region_side, rng),
        users: uniform_points(n_users, config.region_side, rng),
    }
}

/// Distance-only pathloss in dB, with the distance floored at 10 m.
pub fn pathloss_db(config: &SimConfig, d_km: f64) -> f64 {
    config.pathloss_a + config.pathloss_b * d_km.max(0.01).log10()
}

/// Linear gain before fading.
pub fn deterministic_gain(config: &SimConfig, d_km: f64) -> f64 {
    10f64.powf(-pathloss_db(config, d_km) / 10.0)
}

/// Per-(user, bs) linear power gains: pathloss times exponential fading.
pub fn channel_gains(
    deployment: &Deployment,
    config: &SimConfig,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    deployment
        .users
        .iter()
        .map(|&(ux, uy)| {
            deployment
                .bs
                .iter()
                .map(|&(bx, by)| {
                    let d = ((ux - bx).powi(2) + (uy - by).powi(2)).sqrt();
                    deterministic_gain(config, d) * sample_fading_power(config.fading_scale, rng)
                })
                .collect()
        })
        .collect()
}

/// SINR of every (user, bs) link: received power over noise plus the
/// received power from every other base station.
pub fn sinr_matrix(link_gain: &[Vec<f64>], config: &SimConfig) -> Vec<Vec<f64>> {
    let p_mw = dbm_to_mw(config.tx_power_dbm);
    let n0_mw = dbm_to_mw(config.noise_dbm);
    link_gain
        .iter()
        .map(|gains| {
            let rx: Vec<f64> = gains.iter().map(|g| p_mw * g).collect();
            (0..rx.len())
                .map(|b| {
                    let interference: f64 = rx
                        .iter()
                        .enumerate()
                        .filter(|&(other, _)| other != b)
                        .map(|(_, &p)| p)
                        .sum();
                    rx[b] / (n0_mw + interference)
                })
                .collect()
        })
        .collect()
}

/// Associates every user with its max-SINR base station (ties to the lowest
/// index) and records the serving SINR.
pub fn associate_and_sinr(
    deployment: Deployment,
    link_gain: Vec<Vec<f64>>,
    config: &SimConfig,
) -> NetworkSnapshot {
    let sinr = sinr_matrix(&link_gain, config);
    let mut association = Vec::with_capacity(deployment.users.len());
    let mut served_sinr = Vec::with_capacity(deployment.users.len());
    for row in &sinr {
        let mut best = 0;
        for (b, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = b;
            }
        }
        association.push(best);
        served_sinr.push(row[best]);
    }
    NetworkSnapshot {
        bs_positions: deployment.bs,
        user_positions: deployment.users,
        link_gain,
        association,
        served_sinr,
    }
}

/// Summary statistics for one pairing scheme over all realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmStats {
    pub algorithm: Algorithm,
    /// Mean over realizations of the network-total achievable sum rate.
    pub mean_asr: f64,
    /// Sample standard deviation of the network-total ASR.
    pub std_asr: f64,
    /// Mean over realizations of the per-user average rate.
    pub mean_user_rate: f64,
    pub realizations: u32,
}

/// Result of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub per_algorithm: Vec<AlgorithmStats>,
    /// Mean user count per realization, for context.
    pub mean_users: f64,
}

fn plan_for(
    algorithm: Algorithm,
    users: &[UserChannel],
    sic: SicImperfection,
    config: &SimConfig,
) -> Result<PairPlan> {
    match algorithm {
        Algorithm::Aup => plan_aup(users, sic, config.split_policy),
        Algorithm::Nf => pair_near_far(users, sic, config.baseline_split),
        Algorithm::Ucgd => pair_ucgd(users, sic, config.baseline_split),
        Algorithm::Oma => Ok(PairPlan::all_oma(users)),
    }
}

/// Network-total ASR per algorithm for one snapshot: each base station's
/// associated users are paired independently and their plan rates summed.
fn snapshot_totals(
    snapshot: &NetworkSnapshot,
    config: &SimConfig,
    algorithms: &[Algorithm],
) -> Result<Vec<f64>> {
    let n_bs = snapshot.bs_positions.len();
    let mut users_of_bs: Vec<Vec<UserChannel>> = vec![Vec::new(); n_bs];
    for (u, &b) in snapshot.association.iter().enumerate() {
        users_of_bs[b].push(UserChannel::new(format!("u{u}"), snapshot.served_sinr[u])?);
    }
    let sic = config.sic();
    let mut totals = vec![0.0; algorithms.len()];
    for users in users_of_bs.iter().filter(|u| !u.is_empty()) {
        for (ai, &algorithm) in algorithms.iter().enumerate() {
            let plan = plan_for(algorithm, users, sic, config)?;
            let report = evaluate_plan(&plan, sic, config.rate_model, &config.dr_table)?;
            totals[ai] += report.total_rate;
        }
    }
    Ok(totals)
}

/// Runs the full Monte Carlo experiment: per realization, draw geometry
/// (unless fixed) and fading, associate, pair per base station with every
/// requested algorithm, and evaluate. Realizations run in parallel on the
/// global rayon pool; the reduction order is fixed by realization index.
pub fn run_experiment(config: &SimConfig, algorithms: &[Algorithm]) -> Result<ExperimentReport> {
    config.validate()?;
    if algorithms.is_empty() {
        return Err(Error::Config("no algorithms requested".into()));
    }

    let fixed_geometry = if config.redraw_geometry {
        None
    } else {
        let mut rng = stream_rng(config.seed, 0);
        Some(deploy(config, &mut rng))
    };

    let per_realization: Vec<(Vec<f64>, usize)> = (0..config.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, r + 1);
            let deployment = match &fixed_geometry {
                Some(geo) => geo.clone(),
                None => deploy(config, &mut rng),
            };
            let gains = channel_gains(&deployment, config, &mut rng);
            let n_users = deployment.users.len();
            let snapshot = associate_and_sinr(deployment, gains, config);
            snapshot_totals(&snapshot, config, algorithms).map(|t| (t, n_users))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = per_realization.len() as f64;
    let mean_users = per_realization.iter().map(|(_, u)| *u as f64).sum::<f64>() / n;
    let per_algorithm = algorithms
        .iter()
        .enumerate()
        .map(|(ai, &algorithm)| {
            let totals: Vec<f64> = per_realization.iter().map(|(t, _)| t[ai]).collect();
            let mean_asr = totals.iter().sum::<f64>() / n;
            let std_asr = if totals.len() < 2 {
                0.0
            } else {
                let var = totals.iter().map(|t| (t - mean_asr).powi(2)).sum::<f64>()
                    / (n - 1.0);
                var.sqrt()
            };
            let mean_user_rate = per_realization
                .iter()
                .map(|(t, u)| if *u == 0 { 0.0 } else { t[ai] / *u as f64 })
                .sum::<f64>()
                / n;
            AlgorithmStats {
                algorithm,
                mean_asr,
                std_asr,
                mean_user_rate,
                realizations: config.realizations,
            }
        })
        .collect();

    Ok(ExperimentReport {
        per_algorithm,
        mean_users,
    })
}
