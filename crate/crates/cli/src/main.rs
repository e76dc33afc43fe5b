//! `persuade`: batch front end for the persuasion solvers.
//!
//! Reads a JSON problem config, dispatches the requested solver or oracle,
//! and writes machine-readable artifacts: a JSON report for solve tasks and
//! a CSV curve for sweep tasks. A given config always produces byte-identical
//! output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use persuasion::{
    brute_force, check_bipooling_condition, conditional_mean, fmt12, grid_search_continuous,
    optimal_censorship, policy_value, pooling_value, sig12, solve_monotone_continuous,
    solve_monotone_discrete, uc_walk, unrestricted_value, CensorshipPolicy, CensorshipReport,
    Condition1Report, ContinuousPrior, ContinuousReport, DiscretePrior, DiscreteReport, Error,
    GridFamily, ObjectiveFn, PartitionKind, PoolingSet, Prior, ProblemConfig, SweepFamily, Task,
};

/// Points on the z-grid when the oracle certifies a discrete instance.
const ORACLE_Z_GRID: usize = 10_000;
/// Points per axis of the pair grids on continuous instances (the grid is
/// K by K, so this is kept moderate).
const ORACLE_PAIR_GRID: usize = 400;
/// Default agreement threshold between oracle and solver values.
const DEFAULT_AGREEMENT_TOL: f64 = 1e-9;

const CSV_HELP: &str = "CSV columns by sweep family:
  uc_z                 z,m,W,delta   (cutoff walk of a discrete instance)
  cutoff               omega,value   (cutoff-rule value over the state space)
  censorship_policies  bitmask,value (every policy of a finite environment)

Exit codes: 0 success, 2 invalid config, 3 solver failure.";

#[derive(Parser)]
#[command(
    name = "persuade",
    version,
    about = "Solve linear persuasion problems described by JSON configs",
    after_help = CSV_HELP
)]
struct Cli {
    /// Problem description file (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Directory receiving report and CSV files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Overrides the config's seed for instance generation.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overrides the grid size of sweeps and oracle searches.
    #[arg(long, value_name = "K")]
    grid: Option<usize>,
    /// Overrides the oracle/solver agreement threshold.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: String) -> Self {
        Self { code: 2, message }
    }

    fn io(message: String) -> Self {
        Self { code: 3, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::ConfigInvalid(_)) { 2 } else { 3 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let text = fs::read_to_string(&cli.config).map_err(|e| {
        Failure::config(format!("cannot read config {}: {e}", cli.config.display()))
    })?;
    let mut config = ProblemConfig::from_json(&text)?;
    apply_overrides(&mut config, cli)?;

    let artifacts = dispatch(&config, cli)?;

    fs::create_dir_all(&cli.out).map_err(|e| {
        Failure::io(format!("cannot create output dir {}: {e}", cli.out.display()))
    })?;
    for (name, content) in artifacts {
        let path = cli.out.join(name);
        write_atomic(&path, &content)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn apply_overrides(config: &mut ProblemConfig, cli: &Cli) -> Result<(), Failure> {
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(grid) = cli.grid {
        if let Some(sweep) = &mut config.sweep {
            sweep.grid = grid;
        }
    }
    if let Some(tol) = cli.tol {
        let tolerances = config.tolerances.get_or_insert_with(Default::default);
        tolerances.value = Some(tol);
    }
    config.validate().map_err(Failure::from)
}

type Artifacts = Vec<(String, String)>;

fn dispatch(config: &ProblemConfig, cli: &Cli) -> Result<Artifacts, Failure> {
    match config.task {
        Task::SolveDiscrete => {
            let prior = need_prior(config)?.build_discrete("prior")?;
            let v = need_objective(config)?.build("objective")?;
            let solution = solve_monotone_discrete(&prior, &v)?;
            let report = DiscreteReport::from_solution("solver", &solution);
            Ok(vec![(report_name(config), to_json(&report))])
        }
        Task::SolveContinuous => {
            let prior = need_prior(config)?.build_continuous("prior")?;
            let v = need_objective(config)?.build("objective")?;
            let solution = solve_monotone_continuous(&prior, &v)?;
            let unrestricted = unrestricted_value(&prior, &v)?;
            let report = ContinuousReport::from_solution("solver", &solution, &unrestricted);
            Ok(vec![(report_name(config), to_json(&report))])
        }
        Task::Censorship => {
            let env = need_environment(config)?.build("environment")?;
            let outcome = optimal_censorship(&env)?;
            let report = CensorshipReport::from_outcome("solver", &env, &outcome);
            Ok(vec![(report_name(config), to_json(&report))])
        }
        Task::Oracle => {
            let v = need_objective(config)?.build("objective")?;
            let report = match need_prior(config)?.build("prior")? {
                Prior::Discrete(prior) => oracle_discrete(config, cli, &prior, &v)?,
                Prior::Continuous(prior) => oracle_continuous(cli, &prior, &v)?,
            };
            Ok(vec![(report_name(config), report)])
        }
        Task::Sweep => {
            let sweep = config
                .sweep
                .as_ref()
                .expect("validate() requires the sweep fragment");
            let csv = match sweep.family {
                SweepFamily::UcZ => {
                    let prior = need_prior(config)?.build_discrete("prior")?;
                    let v = need_objective(config)?.build("objective")?;
                    sweep_uc_z(&prior, &v, sweep.grid)
                }
                SweepFamily::Cutoff => {
                    let prior = need_prior(config)?.build_continuous("prior")?;
                    let v = need_objective(config)?.build("objective")?;
                    sweep_cutoff(&prior, &v, sweep.grid)?
                }
                SweepFamily::CensorshipPolicies => {
                    let env = need_environment(config)?.build("environment")?;
                    sweep_policies(&env)?
                }
            };
            Ok(vec![(csv_name(config), csv)])
        }
    }
}

fn oracle_discrete(
    config: &ProblemConfig,
    cli: &Cli,
    prior: &DiscretePrior,
    v: &ObjectiveFn,
) -> Result<String, Failure> {
    let brute = brute_force(prior, v, PartitionKind::Monotone)?;
    let k = cli.grid.unwrap_or(ORACLE_Z_GRID).max(100);
    let wrapped = Prior::Discrete(prior.clone());
    let grid = grid_search_continuous(&wrapped, v, k, GridFamily::StochasticUcZ)?;
    let point = uc_walk(prior, v, grid.params[0]);
    let partitions = brute
        .best
        .iter()
        .map(|p| {
            let mp = p
                .to_monotone()
                .expect("monotone enumeration yields consecutive blocks");
            mp.blocks().iter().map(|&(lo, hi)| [lo, hi]).collect()
        })
        .collect();
    let value = grid.value.max(brute.value);
    let report = DiscreteReport::from_parts(
        "oracle",
        point.cutoff_state,
        point.q,
        point.pooled_mean,
        value,
        partitions,
    );
    warn_on_disagreement(config, cli, value, || {
        solve_monotone_discrete(prior, v).map(|s| s.stochastic.value)
    });
    Ok(to_json(&report))
}

fn oracle_continuous(cli: &Cli, prior: &ContinuousPrior, v: &ObjectiveFn) -> Result<String, Failure> {
    let k = cli.grid.unwrap_or(ORACLE_PAIR_GRID).max(100);
    let wrapped = Prior::Continuous(prior.clone());
    let intervals = grid_search_continuous(&wrapped, v, k, GridFamily::IntervalDisclosure)?;
    let (a, b) = (intervals.params[0], intervals.params[1]);
    let pairs = grid_search_continuous(&wrapped, v, k, GridFamily::BipoolingPairs)?;
    let cert = check_bipooling_condition(prior, v);
    let report = ContinuousReport {
        method: "oracle",
        branch: "interval",
        omega_l_star: sig12(a),
        omega_r_star: sig12(b),
        m_l_star: sig12(conditional_mean(&wrapped, 0.0, a)?),
        m_r_star: sig12(conditional_mean(&wrapped, b, 1.0)?),
        value: sig12(intervals.value),
        condition1: Condition1Report::from(&cert),
        unrestricted_value: sig12(pairs.value.max(intervals.value)),
    };
    Ok(to_json(&report))
}

/// Cross-checks the oracle value against the solver when the solver
/// succeeds; disagreement is reported on stderr, never in the artifact.
fn warn_on_disagreement(
    config: &ProblemConfig,
    cli: &Cli,
    oracle_value: f64,
    solver: impl FnOnce() -> Result<f64, Error>,
) {
    let tol = cli
        .tol
        .or(config.tolerances.and_then(|t| t.value))
        .unwrap_or(DEFAULT_AGREEMENT_TOL);
    if let Ok(solver_value) = solver() {
        if (solver_value - oracle_value).abs() > tol {
            eprintln!(
                "warning: solver value {solver_value} and oracle value {oracle_value} \
                 differ by more than {tol}"
            );
        }
    }
}

fn sweep_uc_z(prior: &DiscretePrior, v: &ObjectiveFn, k: usize) -> String {
    let omega = prior.support();
    let (lo, hi) = (omega[0], omega[omega.len() - 1]);
    let mut csv = String::from("z,m,W,delta\n");
    for i in 0..k {
        let z = if k == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        };
        let p = uc_walk(prior, v, z);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt12(p.z),
            fmt12(p.pooled_mean),
            fmt12(p.value),
            fmt12(p.gap)
        ));
    }
    csv
}

fn sweep_cutoff(prior: &ContinuousPrior, v: &ObjectiveFn, k: usize) -> Result<String, Failure> {
    let mut csv = String::from("omega,value\n");
    for i in 0..k {
        let w = if k == 1 {
            0.0
        } else {
            i as f64 / (k - 1) as f64
        };
        // endpoint cutoffs degenerate to a single full pool
        let pools = if w <= 0.0 || w >= 1.0 {
            vec![(0.0, 1.0)]
        } else {
            vec![(0.0, w), (w, 1.0)]
        };
        let value = pooling_value(prior, v, &PoolingSet::new(pools)?);
        csv.push_str(&format!("{},{}\n", fmt12(w), fmt12(value)));
    }
    Ok(csv)
}

fn sweep_policies(env: &persuasion::MediaEnvironment) -> Result<String, Failure> {
    let Some(positions) = env.outlet_positions() else {
        return Err(Failure::config(
            "environment.outlets: the policy sweep needs finitely many outlets".into(),
        ));
    };
    let k = positions.len();
    if k > persuasion::censorship::POLICY_ENUM_CAP {
        return Err(Error::TooLarge {
            detail: format!("{k} outlets means 2^{k} policy rows"),
            cap: persuasion::censorship::POLICY_ENUM_CAP,
        }
        .into());
    }
    let mut csv = String::from("bitmask,value\n");
    for mask in 0..(1u64 << k) {
        let policy = CensorshipPolicy::from_bitmask(mask, k)?;
        let value = policy_value(env, &policy)?;
        csv.push_str(&format!("{mask},{}\n", fmt12(value)));
    }
    Ok(csv)
}

fn need_prior(config: &ProblemConfig) -> Result<&persuasion::PriorConfig, Failure> {
    config
        .prior
        .as_ref()
        .ok_or_else(|| Failure::config("prior: missing".into()))
}

fn need_objective(config: &ProblemConfig) -> Result<&persuasion::ObjectiveConfig, Failure> {
    config
        .objective
        .as_ref()
        .ok_or_else(|| Failure::config("objective: missing".into()))
}

fn need_environment(config: &ProblemConfig) -> Result<&persuasion::EnvironmentConfig, Failure> {
    config
        .environment
        .as_ref()
        .ok_or_else(|| Failure::config("environment: missing".into()))
}

fn report_name(config: &ProblemConfig) -> String {
    config
        .output
        .as_ref()
        .and_then(|o| o.report.clone())
        .unwrap_or_else(|| "report.json".into())
}

fn csv_name(config: &ProblemConfig) -> String {
    config
        .output
        .as_ref()
        .and_then(|o| o.csv.clone())
        .unwrap_or_else(|| "sweep.csv".into())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn write_atomic(path: &Path, content: &str) -> Result<(), Failure> {
    let mut tmp_name = path
        .file_name()
        .expect("artifact paths have file names")
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, content)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}
