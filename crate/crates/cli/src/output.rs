//! Machine-readable outputs: JSON/CSV report shapes and the run manifest.
//! SINRs in emitted files are dB, rates bits/s/Hz; the MSD is a
//! linear-SINR difference.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use pairlab_core::bounds::FeasibleRegion;
use pairlab_core::netsim::{Algorithm, SimConfig};
use pairlab_core::pairing::{PairPlan, RateReport, Role};
use pairlab_core::rates::RateModel;
use pairlab_core::units::linear_to_db;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Full bounds report for one candidate pair.
#[derive(Debug, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub gamma_s_db: f64,
    pub gamma_w_db: f64,
    pub gamma_s_linear: f64,
    pub gamma_w_linear: f64,
    /// Split the beta bound was evaluated at.
    pub alpha_s: f64,
    /// Residual interference the strong-user bound was evaluated at.
    pub beta: f64,
    pub alpha_upper: f64,
    pub alpha_lower_strong: f64,
    pub alpha_lower_positivity: f64,
    pub beta_upper_at_alpha: f64,
    pub beta_upper_star: f64,
    /// Linear-SINR difference.
    pub msd: f64,
    pub pairable: bool,
}

impl BoundsOutput {
    pub fn new(
        gamma_s_linear: f64,
        gamma_w_linear: f64,
        alpha_s: f64,
        beta: f64,
        region: &FeasibleRegion,
    ) -> Self {
        Self {
            gamma_s_db: linear_to_db(gamma_s_linear),
            gamma_w_db: linear_to_db(gamma_w_linear),
            gamma_s_linear,
            gamma_w_linear,
            alpha_s,
            beta,
            alpha_upper: region.alpha_upper,
            alpha_lower_strong: region.alpha_lower_strong,
            alpha_lower_positivity: region.alpha_lower_positivity,
            beta_upper_at_alpha: region.beta_upper_at_alpha,
            beta_upper_star: region.beta_upper_star,
            msd: region.msd,
            pairable: region.pairable,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# power-split and SIC bounds; SINRs in dB; msd is a linear-SINR difference\n");
        out.push_str("gamma_s_db,gamma_w_db,alpha_s,beta,alpha_upper,alpha_lower_strong,alpha_lower_positivity,beta_upper_at_alpha,beta_upper_star,msd,pairable\n");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.gamma_s_db,
            self.gamma_w_db,
            self.alpha_s,
            self.beta,
            self.alpha_upper,
            self.alpha_lower_strong,
            self.alpha_lower_positivity,
            self.beta_upper_at_alpha,
            self.beta_upper_star,
            self.msd,
            self.pairable
        );
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PairedDto {
    pub weak_id: String,
    pub weak_gamma_db: f64,
    pub strong_id: String,
    pub strong_gamma_db: f64,
    pub alpha_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SingleDto {
    pub user_id: String,
    pub gamma_db: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct UserRateDto {
    pub user_id: String,
    pub gamma_db: f64,
    pub role: String,
    pub partner: Option<String>,
    pub alpha_s: Option<f64>,
    pub rate: f64,
    pub oma_rate: f64,
}

/// Plan plus per-user and total rates for one `pair` invocation.
#[derive(Debug, Serialize, Deserialize)]
pub struct PairOutput {
    pub algorithm: String,
    pub beta: f64,
    pub rate_model: String,
    pub pairs: Vec<PairedDto>,
    pub singles: Vec<SingleDto>,
    pub users: Vec<UserRateDto>,
    pub total_rate: f64,
    pub total_oma_rate: f64,
}

fn role_name(role: Role) -> &'static str {
    match role {
        Role::Weak => "weak",
        Role::Strong => "strong",
        Role::Single => "single",
    }
}

pub fn model_name(model: RateModel) -> &'static str {
    match model {
        RateModel::Lr => "lr",
        RateModel::Dr => "dr",
    }
}

impl PairOutput {
    pub fn new(
        algorithm: &str,
        beta: f64,
        model: RateModel,
        plan: &PairPlan,
        report: &RateReport,
    ) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            beta,
            rate_model: model_name(model).to_string(),
            pairs: plan
                .pairs
                .iter()
                .map(|p| PairedDto {
                    weak_id: p.weak.user_id.clone(),
                    weak_gamma_db: linear_to_db(p.weak.gamma),
                    strong_id: p.strong.user_id.clone(),
                    strong_gamma_db: linear_to_db(p.strong.gamma),
                    alpha_s: p.split.alpha_s(),
                })
                .collect(),
            singles: plan
                .singles
                .iter()
                .map(|u| SingleDto {
                    user_id: u.user_id.clone(),
                    gamma_db: linear_to_db(u.gamma),
                })
                .collect(),
            users: report
                .entries
                .iter()
                .map(|e| UserRateDto {
                    user_id: e.user_id.clone(),
                    gamma_db: linear_to_db(e.gamma),
                    role: role_name(e.role).to_string(),
                    partner: e.partner.clone(),
                    alpha_s: e.alpha_s,
                    rate: e.rate,
                    oma_rate: e.oma_rate,
                })
                .collect(),
            total_rate: report.total_rate,
            total_oma_rate: report.total_oma_rate,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# pairing plan: algorithm={}, beta={}, rate_model={}",
            self.algorithm, self.beta, self.rate_model
        );
        out.push_str("# SINRs in dB; rates in bits/s/Hz\n");
        out.push_str("user_id,gamma_db,role,partner,alpha_s,rate,oma_rate\n");
        for u in &self.users {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                u.user_id,
                u.gamma_db,
                u.role,
                u.partner.as_deref().unwrap_or(""),
                u.alpha_s.map(|a| a.to_string()).unwrap_or_default(),
                u.rate,
                u.oma_rate
            );
        }
        let _ = writeln!(out, "TOTAL,,total,,,{},{}", self.total_rate, self.total_oma_rate);
        out
    }
}

/// One row of a single-pair alpha/beta sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub value: f64,
    pub r_s_noma: f64,
    pub r_w_noma: f64,
    pub r_s_oma: f64,
    pub r_w_oma: f64,
}

pub fn sweep_csv(sweep_var: &str, context: &str, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# single-pair {sweep_var} sweep: {context}");
    out.push_str("# SINRs in dB; rates in bits/s/Hz\n");
    out.push_str("sweep_var,value,r_s_noma,r_w_noma,r_s_oma,r_w_oma,asr_noma,asr_oma\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{sweep_var},{},{},{},{},{},{},{}",
            r.value,
            r.r_s_noma,
            r.r_w_noma,
            r.r_s_oma,
            r.r_w_oma,
            r.r_s_noma + r.r_w_noma,
            r.r_s_oma + r.r_w_oma
        );
    }
    out
}

/// One row of the users sweep.
#[derive(Debug, Clone)]
pub struct UsersRow {
    pub n_users: u32,
    pub algorithm: Algorithm,
    pub mean_asr: f64,
    pub std_asr: f64,
    pub realizations: u32,
    pub seed: u64,
}

pub fn users_sweep_csv(rows: &[UsersRow]) -> String {
    let mut out = String::new();
    out.push_str("# network users-per-BS sweep: network-total ASR per pairing algorithm\n");
    out.push_str("# rates in bits/s/Hz\n");
    out.push_str("n_users,algorithm,mean_asr,std_asr,realizations,seed\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n_users,
            r.algorithm.name(),
            r.mean_asr,
            r.std_asr,
            r.realizations,
            r.seed
        );
    }
    out
}

/// Provenance sidecar written next to every simulate output.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub algorithms: Vec<&'static str>,
    pub sweep: String,
    pub config: &'a SimConfig,
}

impl<'a> RunManifest<'a> {
    pub fn new(config: &'a SimConfig, algorithms: &[Algorithm], sweep: String) -> Self {
        Self {
            tool: "pairlab",
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            algorithms: algorithms.iter().map(|a| a.name()).collect(),
            sweep,
            config,
        }
    }
}
