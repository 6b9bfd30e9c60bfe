//! User pairing: the adaptive mid-outward scheme gated by the minimum SINR
//! difference, plus the near-far and uniform-offset baselines, power-split
//! selection inside the feasible interval, and plan evaluation.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bounds::{alpha_lower_positivity, alpha_upper, is_pairable};
use crate::rates::{
    dr_rate, noma_sinr_pair, oma_rate, DrTable, PowerSplit, RateModel, SicImperfection,
    UserChannel,
};
use crate::{Error, Result};

/// How to pick `alpha_s` inside the feasible interval
/// (`alpha_lower_positivity`, `alpha_upper`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitPolicy {
    /// Center of the interval.
    Midpoint,
    /// Evaluate the NOMA sum rate on a uniform interior grid and keep the
    /// best point. Ties go to the smaller split.
    GridArgmax { grid_points: usize },
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy::GridArgmax { grid_points: 101 }
    }
}

/// Power allocation for the baseline schemes, which pair unconditionally.
///
/// The conventional near-far and uniform-offset schemes predate the
/// feasible-interval bounds, so their natural allocation is a fixed split.
/// `Policy` instead levels them with the adaptive scheme: the given policy
/// where the pair's interval is non-empty, otherwise a split clamped just
/// below the weak user's upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaselineSplit {
    Fixed { alpha_s: f64 },
    Policy(SplitPolicy),
}

impl Default for BaselineSplit {
    fn default() -> Self {
        BaselineSplit::Fixed { alpha_s: 0.25 }
    }
}

/// One NOMA pair: the weaker user, the stronger user, and the power split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NomaPair {
    pub weak: UserChannel,
    pub strong: UserChannel,
    pub split: PowerSplit,
}

/// A partition of a user set into NOMA pairs and OMA singles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PairPlan {
    pub pairs: Vec<NomaPair>,
    pub singles: Vec<UserChannel>,
}

impl PairPlan {
    /// All-OMA plan: every user a single.
    pub fn all_oma(users: &[UserChannel]) -> Self {
        Self {
            pairs: Vec::new(),
            singles: users.to_vec(),
        }
    }

    pub fn n_users(&self) -> usize {
        2 * self.pairs.len() + self.singles.len()
    }

    /// Every user in the plan, pairs first (weak then strong) then singles.
    pub fn users(&self) -> impl Iterator<Item = &UserChannel> {
        self.pairs
            .iter()
            .flat_map(|p| [&p.weak, &p.strong])
            .chain(self.singles.iter())
    }
}

/// The two stacks the adaptive scheme walks, plus users set aside before
/// grouping (the median user when the input count is odd).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGroups {
    /// Lower half, descending: mid user on top.
    pub g1: Vec<UserChannel>,
    /// Upper half, ascending: mid user on top.
    pub g2: Vec<UserChannel>,
    /// Pre-designated OMA users (odd-count median).
    pub pre_singles: Vec<UserChannel>,
}

fn sorted_ascending(users: &[UserChannel]) -> Vec<UserChannel> {
    let mut sorted = users.to_vec();
    sorted.sort_by(|a, b| {
        a.gamma
            .total_cmp(&b.gamma)
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    sorted
}

/// Sorts users by SINR and splits them into the two stacks: the lower half
/// re-arranged descending, the upper half ascending, so both stacks have
/// the mid users on top. An odd count sets the median user aside as OMA.
pub fn split_groups(users: &[UserChannel]) -> SplitGroups {
    let mut sorted = sorted_ascending(users);
    let mut pre_singles = Vec::new();
    if sorted.len() % 2 == 1 {
        pre_singles.push(sorted.remove(sorted.len() / 2));
    }
    let half = sorted.len() / 2;
    let g2 = sorted.split_off(half);
    let mut g1 = sorted;
    g1.reverse();
    SplitGroups { g1, g2, pre_singles }
}

/// MSD gate as used during pairing: zero-SINR weak users are simply not
/// pairable (the bounds are undefined there).
fn passes_msd(gamma_s: f64, gamma_w: f64) -> bool {
    if gamma_w <= 0.0 || gamma_s < gamma_w {
        return false;
    }
    is_pairable(gamma_s, gamma_w).unwrap_or(false)
}

/// Adaptive user pairing over the two stacks.
///
/// For each G1 user from the top, scan the remaining G2 users upward for
/// the first one clearing the MSD criterion and pair with it. If even the
/// strongest remaining G2 user fails, the G1 user goes OMA along with the
/// G2 user currently on top of the stack — keeping the stacks aligned so
/// the far pair (weakest with strongest) stays intact rather than cascading
/// every remaining pair one step and stranding the strongest user.
pub fn pair_aup(groups: SplitGroups, sic: SicImperfection, policy: SplitPolicy) -> Result<PairPlan> {
    let SplitGroups { g1, g2, pre_singles } = groups;
    let mut available: VecDeque<UserChannel> = g2.into();
    let mut pairs = Vec::new();
    let mut singles = pre_singles;

    for weak in g1 {
        match available
            .iter()
            .position(|cand| passes_msd(cand.gamma, weak.gamma))
        {
            Some(idx) => {
                let strong = available.remove(idx).expect("index from position");
                let split = select_alpha(strong.gamma, weak.gamma, sic, policy)?;
                pairs.push(NomaPair { weak, strong, split });
            }
            None => {
                singles.push(weak);
                if let Some(demoted) = available.pop_front() {
                    singles.push(demoted);
                }
            }
        }
    }
    // unequal stacks only happen for callers bypassing split_groups
    singles.extend(available);

    Ok(PairPlan { pairs, singles })
}

/// Convenience: split into groups and run the adaptive pairing.
pub fn plan_aup(
    users: &[UserChannel],
    sic: SicImperfection,
    policy: SplitPolicy,
) -> Result<PairPlan> {
    pair_aup(split_groups(users), sic, policy)
}

/// Split for one baseline pair. Under `Policy`, infeasible pairs fall back
/// to a split clamped just below the weak user's upper bound (its
/// zero-SINR limit 0.5 when the bound is undefined).
fn baseline_pair_split(
    gamma_s: f64,
    gamma_w: f64,
    sic: SicImperfection,
    split: BaselineSplit,
) -> Result<PowerSplit> {
    match split {
        BaselineSplit::Fixed { alpha_s } => PowerSplit::new(alpha_s),
        BaselineSplit::Policy(policy) => {
            if gamma_w > 0.0 {
                match select_alpha(gamma_s, gamma_w, sic, policy) {
                    Ok(split) => Ok(split),
                    Err(Error::Feasibility(_)) => {
                        PowerSplit::new(alpha_upper(gamma_w)? * (1.0 - 1e-6))
                    }
                    Err(e) => Err(e),
                }
            } else {
                PowerSplit::new(0.5 * (1.0 - 1e-6))
            }
        }
    }
}

fn pair_sorted_by<F>(
    users: &[UserChannel],
    sic: SicImperfection,
    split: BaselineSplit,
    partner_of: F,
) -> Result<PairPlan>
where
    F: Fn(usize, usize) -> usize,
{
    let mut sorted = sorted_ascending(users);
    let mut singles = Vec::new();
    if sorted.len() % 2 == 1 {
        singles.push(sorted.remove(sorted.len() / 2));
    }
    let half = sorted.len() / 2;
    let mut pairs = Vec::with_capacity(half);
    for i in 0..half {
        let weak = sorted[i].clone();
        let strong = sorted[partner_of(i, sorted.len())].clone();
        let split = baseline_pair_split(strong.gamma, weak.gamma, sic, split)?;
        pairs.push(NomaPair { weak, strong, split });
    }
    Ok(PairPlan { pairs, singles })
}

/// Near-far baseline: i-th weakest with i-th strongest, no MSD filtering.
pub fn pair_near_far(
    users: &[UserChannel],
    sic: SicImperfection,
    split: BaselineSplit,
) -> Result<PairPlan> {
    pair_sorted_by(users, sic, split, |i, n| n - 1 - i)
}

/// Uniform channel gain difference baseline: i-th of the lower half with
/// i-th of the upper half, no MSD filtering.
pub fn pair_ucgd(
    users: &[UserChannel],
    sic: SicImperfection,
    split: BaselineSplit,
) -> Result<PairPlan> {
    pair_sorted_by(users, sic, split, |i, n| i + n / 2)
}

/// Picks `alpha_s` strictly inside (`alpha_lower_positivity`,
/// `alpha_upper`) for a pair that satisfies the MSD criterion.
pub fn select_alpha(
    gamma_s: f64,
    gamma_w: f64,
    sic: SicImperfection,
    policy: SplitPolicy,
) -> Result<PowerSplit> {
    let lo = alpha_lower_positivity(gamma_s, gamma_w)?;
    let hi = alpha_upper(gamma_w)?;
    if hi <= lo {
        return Err(Error::Feasibility(format!(
            "no feasible split: alpha interval ({lo}, {hi}) is empty for gamma_s={gamma_s}, gamma_w={gamma_w}"
        )));
    }
    match policy {
        SplitPolicy::Midpoint => PowerSplit::new(0.5 * (lo + hi)),
        SplitPolicy::GridArgmax { grid_points } => {
            if grid_points < 2 {
                return Err(Error::Config(format!(
                    "grid-argmax needs at least 2 grid points, got {grid_points}"
                )));
            }
            let mut best: Option<(f64, PowerSplit)> = None;
            for k in 0..grid_points {
                let alpha = lo + (hi - lo) * (k + 1) as f64 / (grid_points + 1) as f64;
                let split = PowerSplit::new(alpha)?;
                let (ghs, ghw) = noma_sinr_pair(gamma_s, gamma_w, split, sic)?;
                let asr = (1.0 + ghs).log2() + (1.0 + ghw).log2();
                if best.is_none_or(|(best_asr, _)| asr > best_asr) {
                    best = Some((asr, split));
                }
            }
            Ok(best.expect("grid has at least 2 points").1)
        }
    }
}

/// Which position a user occupies in a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Weak,
    Strong,
    Single,
}

/// One user's rates under a plan: `rate` is what the plan gives it,
/// `oma_rate` what it would get alone, both under the same rate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRateEntry {
    pub user_id: String,
    pub gamma: f64,
    pub role: Role,
    pub partner: Option<String>,
    pub alpha_s: Option<f64>,
    pub rate: f64,
    pub oma_rate: f64,
}

/// Per-user and aggregate rates for a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub entries: Vec<UserRateEntry>,
    /// Sum over all users of the plan rate.
    pub total_rate: f64,
    /// Sum over all users of the all-OMA rate, same model.
    pub total_oma_rate: f64,
}

fn model_rate(gamma: f64, model: RateModel, table: &DrTable, oma: bool) -> Result<f64> {
    match model {
        RateModel::Lr if oma => oma_rate(gamma),
        RateModel::Lr => Ok((1.0 + gamma).log2()),
        RateModel::Dr => dr_rate(gamma, table, oma),
    }
}

/// Evaluates a plan: paired users get NOMA rates at their split and the
/// given residual interference, singles get OMA rates.
pub fn evaluate_plan(
    plan: &PairPlan,
    sic: SicImperfection,
    model: RateModel,
    table: &DrTable,
) -> Result<RateReport> {
    let mut entries = Vec::with_capacity(plan.n_users());
    let mut total = 0.0;
    let mut total_oma = 0.0;

    for pair in &plan.pairs {
        let (ghs, ghw) = noma_sinr_pair(pair.strong.gamma, pair.weak.gamma, pair.split, sic)?;
        let r_w = model_rate(ghw, model, table, false)?;
        let r_s = model_rate(ghs, model, table, false)?;
        let oma_w = model_rate(pair.weak.gamma, model, table, true)?;
        let oma_s = model_rate(pair.strong.gamma, model, table, true)?;
        entries.push(UserRateEntry {
            user_id: pair.weak.user_id.clone(),
            gamma: pair.weak.gamma,
            role: Role::Weak,
            partner: Some(pair.strong.user_id.clone()),
            alpha_s: Some(pair.split.alpha_s()),
            rate: r_w,
            oma_rate: oma_w,
        });
        entries.push(UserRateEntry {
            user_id: pair.strong.user_id.clone(),
            gamma: pair.strong.gamma,
            role: Role::Strong,
            partner: Some(pair.weak.user_id.clone()),
            alpha_s: Some(pair.split.alpha_s()),
            rate: r_s,
            oma_rate: oma_s,
        });
        total += r_w + r_s;
        total_oma += oma_w + oma_s;
    }
    for user in &plan.singles {
        let r = model_rate(user.gamma, model, table, true)?;
        entries.push(UserRateEntry {
            user_id: user.user_id.clone(),
            gamma: user.gamma,
            role: Role::Single,
            partner: None,
            alpha_s: None,
            rate: r,
            oma_rate: r,
        });
        total += r;
        total_oma += r;
    }

    Ok(RateReport {
        entries,
        total_rate: total,
        total_oma_rate: total_oma,
    })
}
