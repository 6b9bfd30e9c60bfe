//! `pairlab`: downlink NOMA pairing laboratory.
//!
//! Three subcommands: `bounds` prints the closed-form power-split and SIC
//! bounds for one candidate pair, `pair` runs a pairing algorithm over a
//! users file, and `simulate` runs the stochastic-geometry Monte Carlo
//! sweeps and writes CSV results plus a manifest.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pairlab_core::bounds::{alpha_lower_positivity, alpha_upper, feasible_region};
use pairlab_core::netsim::run_experiment;
use pairlab_core::pairing::{
    evaluate_plan, pair_near_far, pair_ucgd, plan_aup, BaselineSplit, PairPlan,
};
use pairlab_core::rates::{
    dr_rate, noma_sinr_pair, oma_rate, DrTable, PowerSplit, RateModel, SicImperfection,
};
use pairlab_core::units::db_to_linear;

use config::{Sweep, SimulationSpec};
use output::{
    model_name, sweep_csv, users_sweep_csv, BoundsOutput, Format, PairOutput, RunManifest,
    SweepRow, UsersRow,
};

/// Thread cap for parallel realizations.
const THREADS_ENV: &str = "NOMA_PAIRLAB_THREADS";

#[derive(Parser)]
#[command(name = "pairlab", version, about = "Downlink NOMA pairing laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds and the pairing criterion for one candidate pair.
    Bounds(BoundsArgs),
    /// Pair the users of a file and report per-user and total rates.
    Pair(PairArgs),
    /// Run a simulation sweep and write CSV results plus a manifest.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Strong user's OMA SINR in dB.
    #[arg(long, conflicts_with = "gamma_s_linear")]
    gamma_s_db: Option<f64>,
    /// Weak user's OMA SINR in dB.
    #[arg(long, conflicts_with = "gamma_w_linear")]
    gamma_w_db: Option<f64>,
    /// Strong user's OMA SINR in linear scale.
    #[arg(long)]
    gamma_s_linear: Option<f64>,
    /// Weak user's OMA SINR in linear scale.
    #[arg(long)]
    gamma_w_linear: Option<f64>,
    /// Power split to evaluate the beta bound at; defaults to the midpoint
    /// of the two alpha bounds.
    #[arg(long)]
    alpha: Option<f64>,
    /// Residual SIC interference fraction for the strong-user bound.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct PairArgs {
    /// Users file: one `user_id,gamma_db` per line, `#` comments.
    #[arg(long)]
    input: PathBuf,
    /// Residual SIC interference fraction.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// aup, nf, or ucgd.
    #[arg(long, default_value = "aup")]
    algorithm: String,
    /// midpoint, grid:<n>, or (baselines only) fixed:<alpha>.
    /// Defaults: grid:101 for aup, fixed:0.25 for nf/ucgd.
    #[arg(long)]
    split: Option<String>,
    /// lr or dr.
    #[arg(long, default_value = "lr")]
    rate_model: String,
    /// DR staircase override: `<threshold_db>:<rate>,...`
    #[arg(long)]
    dr_table: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat `key = value` simulation config.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated pairing algorithms to compare.
    #[arg(long, default_value = "aup,nf,ucgd,oma")]
    algorithms: String,
    /// Output directory for the manifest and CSV files.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Pair(args) => cmd_pair(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve_gamma(name: &str, db: Option<f64>, linear: Option<f64>) -> Result<f64> {
    match (db, linear) {
        (Some(db), None) => Ok(db_to_linear(db)),
        (None, Some(lin)) => Ok(lin),
        (None, None) => bail!("missing --{name}-db or --{name}-linear"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let gamma_s = resolve_gamma("gamma-s", args.gamma_s_db, args.gamma_s_linear)?;
    let gamma_w = resolve_gamma("gamma-w", args.gamma_w_db, args.gamma_w_linear)?;
    let alpha_s = match args.alpha {
        Some(a) => a,
        None => 0.5 * (alpha_lower_positivity(gamma_s, gamma_w)? + alpha_upper(gamma_w)?),
    };
    let region = feasible_region(gamma_s, gamma_w, alpha_s, args.beta)?;
    let report = BoundsOutput::new(gamma_s, gamma_w, alpha_s, args.beta, &region);
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn cmd_pair(args: PairArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let users = config::parse_users_file(&text)?;
    let sic = SicImperfection::new(args.beta)?;
    let model = config::parse_rate_model(&args.rate_model)?;
    let table = match &args.dr_table {
        Some(spec) => config::parse_dr_table(spec)?,
        None => DrTable::default(),
    };

    let algorithm = args.algorithm.to_ascii_lowercase();
    let plan: PairPlan = match algorithm.as_str() {
        "aup" | "a-up" => {
            let policy = match &args.split {
                Some(spec) => config::parse_split_policy(spec)
                    .context("adaptive pairing picks splits inside the feasible interval")?,
                None => Default::default(),
            };
            plan_aup(&users, sic, policy)?
        }
        "nf" | "ucgd" => {
            let split = match &args.split {
                Some(spec) => config::parse_baseline_split(spec)?,
                None => BaselineSplit::default(),
            };
            if algorithm == "nf" {
                pair_near_far(&users, sic, split)?
            } else {
                pair_ucgd(&users, sic, split)?
            }
        }
        other => bail!("unknown algorithm '{other}' (expected aup, nf, or ucgd)"),
    };

    let report = evaluate_plan(&plan, sic, model, &table)?;
    let out = PairOutput::new(&algorithm, args.beta, model, &plan, &report);
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => print!("{}", out.to_csv()),
    }
    Ok(())
}

fn init_thread_pool() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
        if threads == 0 {
            bail!("{THREADS_ENV} must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// Per-user rates of one pair at the given split and residual interference,
/// under the configured rate model.
fn pair_rates_row(
    gamma_s: f64,
    gamma_w: f64,
    alpha_s: f64,
    beta: f64,
    model: RateModel,
    table: &DrTable,
) -> Result<SweepRow> {
    let split = PowerSplit::new(alpha_s)?;
    let sic = SicImperfection::new(beta)?;
    let (ghs, ghw) = noma_sinr_pair(gamma_s, gamma_w, split, sic)?;
    let row = match model {
        RateModel::Lr => SweepRow {
            value: 0.0,
            r_s_noma: (1.0 + ghs).log2(),
            r_w_noma: (1.0 + ghw).log2(),
            r_s_oma: oma_rate(gamma_s)?,
            r_w_oma: oma_rate(gamma_w)?,
        },
        RateModel::Dr => SweepRow {
            value: 0.0,
            r_s_noma: dr_rate(ghs, table, false)?,
            r_w_noma: dr_rate(ghw, table, false)?,
            r_s_oma: dr_rate(gamma_s, table, true)?,
            r_w_oma: dr_rate(gamma_w, table, true)?,
        },
    };
    Ok(row)
}

fn grid(start: f64, stop: f64, steps: usize) -> impl Iterator<Item = f64> {
    let width = stop - start;
    (0..steps).map(move |i| start + width * i as f64 / (steps - 1) as f64)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    init_thread_pool()?;
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let SimulationSpec { mut config, sweep } = config::parse_sim_config(&text)?;
    let algorithms = config::parse_algorithms(&args.algorithms)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    // the manifest goes first so no data file is ever left without it
    let manifest = RunManifest::new(&config, &algorithms, format!("{sweep:?}"));
    write_output(&args.out, "manifest.json", &serde_json::to_string_pretty(&manifest)?)?;

    match sweep {
        Sweep::Users { users_per_bs_list } => {
            let mut rows = Vec::new();
            for &n in &users_per_bs_list {
                config.users_per_bs = Some(n);
                let report = run_experiment(&config, &algorithms)?;
                for stats in &report.per_algorithm {
                    rows.push(UsersRow {
                        n_users: n,
                        algorithm: stats.algorithm,
                        mean_asr: stats.mean_asr,
                        std_asr: stats.std_asr,
                        realizations: stats.realizations,
                        seed: config.seed,
                    });
                }
            }
            write_output(&args.out, "asr_vs_users.csv", &users_sweep_csv(&rows))?;
        }
        Sweep::Alpha { gamma_s_db, gamma_w_db, start, stop, steps } => {
            let (gs, gw) = (db_to_linear(gamma_s_db), db_to_linear(gamma_w_db));
            let rows: Vec<SweepRow> = grid(start, stop, steps)
                .map(|alpha| {
                    pair_rates_row(gs, gw, alpha, config.beta, config.rate_model, &config.dr_table)
                        .map(|mut row| {
                            row.value = alpha;
                            row
                        })
                })
                .collect::<Result<_>>()?;
            let context = format!(
                "gamma_s = {gamma_s_db} dB, gamma_w = {gamma_w_db} dB, beta = {}, rate model {}",
                config.beta,
                model_name(config.rate_model)
            );
            write_output(&args.out, "rate_vs_alpha.csv", &sweep_csv("alpha", &context, &rows))?;
        }
        Sweep::Beta { gamma_s_db, gamma_w_db, alpha_s, start, stop, steps } => {
            let (gs, gw) = (db_to_linear(gamma_s_db), db_to_linear(gamma_w_db));
            let rows: Vec<SweepRow> = grid(start, stop, steps)
                .map(|beta| {
                    pair_rates_row(gs, gw, alpha_s, beta, config.rate_model, &config.dr_table)
                        .map(|mut row| {
                            row.value = beta;
                            row
                        })
                })
                .collect::<Result<_>>()?;
            let context = format!(
                "gamma_s = {gamma_s_db} dB, gamma_w = {gamma_w_db} dB, alpha_s = {alpha_s}, rate model {}",
                model_name(config.rate_model)
            );
            write_output(&args.out, "rate_vs_beta.csv", &sweep_csv("beta", &context, &rows))?;
        }
    }
    Ok(())
}
