//! Parsers for the flat `key = value` simulation config, the users file,
//! and the small value grammars shared with the command line (split
//! policies, DR tables, algorithm lists).

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};

use pairlab_core::netsim::{Algorithm, SimConfig};
use pairlab_core::pairing::{BaselineSplit, SplitPolicy};
use pairlab_core::rates::{DrTable, RateModel, UserChannel};
use pairlab_core::units::db_to_linear;

/// What `simulate` sweeps over.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Fig. 8 style: network experiment per users-per-BS count.
    Users { users_per_bs_list: Vec<u32> },
    /// Single-pair sweep of the power split at the config's beta.
    Alpha { gamma_s_db: f64, gamma_w_db: f64, start: f64, stop: f64, steps: usize },
    /// Single-pair sweep of the SIC imperfection at a fixed split.
    Beta { gamma_s_db: f64, gamma_w_db: f64, alpha_s: f64, start: f64, stop: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub config: SimConfig,
    pub sweep: Sweep,
}

/// `midpoint` or `grid:<n>`.
pub fn parse_split_policy(text: &str) -> Result<SplitPolicy> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("midpoint") {
        return Ok(SplitPolicy::Midpoint);
    }
    if let Some(n) = text.strip_prefix("grid:") {
        let grid_points: usize = n
            .trim()
            .parse()
            .with_context(|| format!("invalid grid point count '{n}'"))?;
        if grid_points < 2 {
            bail!("grid-argmax needs at least 2 grid points, got {grid_points}");
        }
        return Ok(SplitPolicy::GridArgmax { grid_points });
    }
    bail!("unknown split policy '{text}' (expected midpoint or grid:<n>)")
}

/// `fixed:<alpha>`, or any split policy to level the baselines with the
/// adaptive scheme.
pub fn parse_baseline_split(text: &str) -> Result<BaselineSplit> {
    let text = text.trim();
    if let Some(a) = text.strip_prefix("fixed:") {
        let alpha_s: f64 = a
            .trim()
            .parse()
            .with_context(|| format!("invalid fixed split '{a}'"))?;
        if !alpha_s.is_finite() || alpha_s <= 0.0 || alpha_s >= 1.0 {
            bail!("fixed split must lie strictly inside (0, 1), got {alpha_s}");
        }
        return Ok(BaselineSplit::Fixed { alpha_s });
    }
    Ok(BaselineSplit::Policy(parse_split_policy(text)?))
}

/// `lr` or `dr`.
pub fn parse_rate_model(text: &str) -> Result<RateModel> {
    match text.trim().to_ascii_lowercase().as_str() {
        "lr" => Ok(RateModel::Lr),
        "dr" => Ok(RateModel::Dr),
        other => bail!("unknown rate model '{other}' (expected lr or dr)"),
    }
}

/// `<threshold_db>:<rate>,<threshold_db>:<rate>,...`
pub fn parse_dr_table(text: &str) -> Result<DrTable> {
    let mut entries = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (db, rate) = part
            .split_once(':')
            .ok_or_else(|| anyhow!("DR table entry '{part}' is not <threshold_db>:<rate>"))?;
        entries.push((
            db.trim().parse::<f64>().with_context(|| format!("bad threshold '{db}'"))?,
            rate.trim().parse::<f64>().with_context(|| format!("bad rate '{rate}'"))?,
        ));
    }
    DrTable::from_db_entries(&entries).map_err(Into::into)
}

/// Comma-separated algorithm names; the empty list is an error.
pub fn parse_algorithms(text: &str) -> Result<Vec<Algorithm>> {
    let mut algorithms = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let algorithm: Algorithm = part.parse()?;
        if !algorithms.contains(&algorithm) {
            algorithms.push(algorithm);
        }
    }
    if algorithms.is_empty() {
        bail!("algorithm list is empty");
    }
    Ok(algorithms)
}

/// One user per line: `user_id,gamma_db`. `#` starts a comment.
pub fn parse_users_file(text: &str) -> Result<Vec<UserChannel>> {
    let mut users = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (id, db) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("line {}: expected 'user_id,gamma_db'", lineno + 1))?;
        let id = id.trim();
        if id.is_empty() {
            bail!("line {}: empty user id", lineno + 1);
        }
        if !seen.insert(id.to_string()) {
            bail!("line {}: duplicate user id '{id}'", lineno + 1);
        }
        let gamma_db: f64 = db
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad gamma_db '{}'", lineno + 1, db.trim()))?;
        users.push(UserChannel::new(id, db_to_linear(gamma_db))?);
    }
    if users.is_empty() {
        bail!("users file contains no users");
    }
    Ok(users)
}

fn split_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{key}'", lineno + 1);
        }
    }
    Ok(map)
}

/// Parses the flat simulation config. Unknown keys are errors; keys not
/// given keep their defaults.
pub fn parse_sim_config(text: &str) -> Result<SimulationSpec> {
    let mut kv = split_kv(text)?;
    let mut config = SimConfig::default();

    let mut take = |key: &str| kv.remove(key);
    macro_rules! num {
        ($key:literal, $field:expr) => {
            if let Some(v) = take($key) {
                $field = v.parse().with_context(|| format!("bad {} '{v}'", $key))?;
            }
        };
    }
    num!("bs_density", config.bs_density);
    num!("user_density", config.user_density);
    num!("region_side", config.region_side);
    num!("tx_power_dbm", config.tx_power_dbm);
    num!("noise_dbm", config.noise_dbm);
    num!("pathloss_a", config.pathloss_a);
    num!("pathloss_b", config.pathloss_b);
    num!("fading_scale", config.fading_scale);
    num!("realizations", config.realizations);
    num!("seed", config.seed);
    num!("beta", config.beta);
    num!("redraw_geometry", config.redraw_geometry);

    if let Some(v) = take("users_per_bs") {
        config.users_per_bs = Some(v.parse().with_context(|| format!("bad users_per_bs '{v}'"))?);
    }
    if let Some(v) = take("rate_model") {
        config.rate_model = parse_rate_model(&v)?;
    }
    if let Some(v) = take("split_policy") {
        config.split_policy = parse_split_policy(&v)?;
    }
    if let Some(v) = take("baseline_split") {
        config.baseline_split = if v.trim().eq_ignore_ascii_case("shared") {
            BaselineSplit::Policy(config.split_policy)
        } else {
            parse_baseline_split(&v)?
        };
    }
    if let Some(v) = take("dr_table") {
        config.dr_table = parse_dr_table(&v)?;
    }

    let sweep_kind = take("sweep").unwrap_or_else(|| "users".to_string());
    let fixed_alpha = take("alpha")
        .map(|v| v.parse::<f64>().with_context(|| format!("bad alpha '{v}'")))
        .transpose()?;
    let gamma_s_db = take("gamma_s_db")
        .map(|v| v.parse::<f64>().with_context(|| format!("bad gamma_s_db '{v}'")))
        .transpose()?;
    let gamma_w_db = take("gamma_w_db")
        .map(|v| v.parse::<f64>().with_context(|| format!("bad gamma_w_db '{v}'")))
        .transpose()?;
    let start = take("sweep_start")
        .map(|v| v.parse::<f64>().with_context(|| format!("bad sweep_start '{v}'")))
        .transpose()?;
    let stop = take("sweep_stop")
        .map(|v| v.parse::<f64>().with_context(|| format!("bad sweep_stop '{v}'")))
        .transpose()?;
    let steps = take("sweep_steps")
        .map(|v| v.parse::<usize>().with_context(|| format!("bad sweep_steps '{v}'")))
        .transpose()?
        .unwrap_or(51);
    let users_list = take("users_per_bs_list")
        .map(|v| {
            v.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u32>().with_context(|| format!("bad count '{s}'")))
                .collect::<Result<Vec<u32>>>()
        })
        .transpose()?;

    if let Some((key, _)) = kv.into_iter().next() {
        bail!("unknown config key '{key}'");
    }
    if steps < 2 {
        bail!("sweep_steps must be at least 2");
    }

    let pair = |what: &str| -> Result<(f64, f64)> {
        let gs = gamma_s_db.ok_or_else(|| anyhow!("{what} sweep needs gamma_s_db"))?;
        let gw = gamma_w_db.ok_or_else(|| anyhow!("{what} sweep needs gamma_w_db"))?;
        if gs < gw {
            bail!("gamma_s_db must be at least gamma_w_db");
        }
        Ok((gs, gw))
    };

    let sweep = match sweep_kind.to_ascii_lowercase().as_str() {
        "users" => Sweep::Users {
            users_per_bs_list: users_list.unwrap_or_else(|| vec![8, 16, 32]),
        },
        "alpha" => {
            let (gamma_s_db, gamma_w_db) = pair("alpha")?;
            let (start, stop) = (start.unwrap_or(0.05), stop.unwrap_or(0.5));
            if !(0.0 < start && start < stop && stop < 1.0) {
                bail!("alpha sweep range must satisfy 0 < start < stop < 1");
            }
            Sweep::Alpha { gamma_s_db, gamma_w_db, start, stop, steps }
        }
        "beta" => {
            let (gamma_s_db, gamma_w_db) = pair("beta")?;
            let alpha_s = fixed_alpha.ok_or_else(|| anyhow!("beta sweep needs alpha"))?;
            let (start, stop) = (start.unwrap_or(0.0), stop.unwrap_or(0.2));
            if !(0.0 <= start && start < stop && stop <= 1.0) {
                bail!("beta sweep range must satisfy 0 <= start < stop <= 1");
            }
            Sweep::Beta { gamma_s_db, gamma_w_db, alpha_s, start, stop, steps }
        }
        other => bail!("unknown sweep '{other}' (expected users, alpha, or beta)"),
    };

    config.validate()?;
    Ok(SimulationSpec { config, sweep })
}
