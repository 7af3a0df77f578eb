//! `qsynth` — train, benchmark, and inspect circuit-synthesis agents.
//!
//! Exit codes: 0 success, 1 validation error (bad arguments, config values,
//! or unsupported combinations), 2 runtime failure (I/O, malformed
//! artifacts), 3 verification failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qsynth_core::agents::{
    greedy_rollout, qtable_from_text, qtable_to_text, train_dqn, train_q, ActionValues,
    DqnConfig, EpisodeTrace, ExpertTrajectory, PolicyNet, QLearnConfig, Rollout,
};
use qsynth_core::bench::{
    render_report_table, report_json, reproduce_walkthrough, rounds_ndjson, run_benchmark,
    Algorithm, BenchReport, ExperimentConfig, Preset, DEFAULT_BASE_SEED, DEFAULT_MAX_STEPS,
    DEFAULT_ROUNDS,
};
use qsynth_core::envs::{circuit_from_trajectory, make_env, Representation};
use qsynth_core::tasks::{catalog, get_task, TaskName};
use qsynth_core::verify::{all_passed, render_checks, run_checks};

const OUT_DIR_ENV: &str = "QSYNTH_OUT";

#[derive(Parser)]
#[command(name = "qsynth", version, about = "Gate-circuit synthesis by reinforcement learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a single agent and print the circuit it learned
    Train(TrainArgs),
    /// Run repeated training rounds and report success ratios
    Bench(BenchArgs),
    /// Re-derive every built-in identity and replay reference trajectories
    Verify(VerifyArgs),
    /// List the task catalog with action counts and search-space sizes
    Tasks(TasksArgs),
    /// Pretty-print a saved value-table artifact
    ShowQtable(ShowQtableArgs),
    /// Replay a saved agent greedily on a task environment
    Rollout(RolloutArgs),
}

/// Overrides shared by train and bench. Precedence: command-line flags,
/// then the key=value config file, then the preset defaults.
#[derive(Args, Clone, Default)]
struct Overrides {
    /// Hyperparameter preset (section3 | appendix)
    #[arg(long)]
    preset: Option<String>,
    /// Episodes per training run
    #[arg(long)]
    episodes: Option<usize>,
    /// Step limit per episode
    #[arg(long)]
    max_steps: Option<usize>,
    /// Base random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Learning rate for tabular updates
    #[arg(long)]
    alpha: Option<f64>,
    /// Discount factor
    #[arg(long)]
    gamma: Option<f64>,
    /// Initial exploration rate
    #[arg(long)]
    epsilon: Option<f64>,
    /// Multiplicative exploration decay per episode
    #[arg(long)]
    epsilon_decay: Option<f64>,
    /// Exploration floor
    #[arg(long)]
    epsilon_min: Option<f64>,
    /// Learning rate for network updates
    #[arg(long)]
    lr: Option<f64>,
    /// key=value file applied beneath the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default $QSYNTH_OUT or ./runs)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Task name (see `qsynth tasks`)
    task: String,
    /// qlearn | qlearn_reverse | dqn | dqn_reverse | qlearn_tn
    algorithm: String,
    /// Optional explicit representation; must match the algorithm
    representation: Option<String>,
    /// Optional preset as a positional argument
    preset_pos: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
    /// Use the demonstration action set and pre-expanded state tree
    #[arg(long)]
    walkthrough: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Task name, or "all" for the whole catalog
    task: String,
    /// Algorithm name, or "all" for every variant
    algorithm: String,
    #[command(flatten)]
    overrides: Overrides,
    /// Independent training rounds per cell
    #[arg(long)]
    rounds: Option<usize>,
    /// Greedy evaluation attempts per round
    #[arg(long)]
    best_of: Option<usize>,
    /// Worker threads (0 = default)
    #[arg(long)]
    parallelism: Option<usize>,
    /// Also write one JSON line per round next to the report
    #[arg(long)]
    traces: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Deliberately corrupt a gate constant; the checks must catch it
    #[arg(long)]
    corrupt: bool,
    /// Print results as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TasksArgs {
    /// Print the catalog as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ShowQtableArgs {
    /// Path to a qtable.tsv artifact
    path: PathBuf,
    /// Print at most this many state rows
    #[arg(long)]
    max_rows: Option<usize>,
}

#[derive(Args)]
struct RolloutArgs {
    /// Path to a qtable.tsv or policy.json artifact
    artifact: PathBuf,
    /// Task the artifact was trained on
    task: String,
    /// Algorithm the artifact was trained with
    algorithm: String,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

enum CliError {
    Validation(String),
    Runtime(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) | CliError::Verification(m) => m,
        }
    }
}

fn invalid<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

fn failed<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Tasks(args) => cmd_tasks(args),
        Command::ShowQtable(args) => cmd_show_qtable(args),
        Command::Rollout(args) => cmd_rollout(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

// ---------------------------------------------------------------------------
// settings: flag > config file > preset default

#[derive(Clone, Default, Debug, Serialize)]
struct Settings {
    preset: Option<Preset>,
    episodes: Option<usize>,
    max_steps: Option<usize>,
    seed: Option<u64>,
    rounds: Option<usize>,
    best_of: Option<usize>,
    parallelism: Option<usize>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    epsilon_decay: Option<f64>,
    epsilon_min: Option<f64>,
    lr: Option<f64>,
}

impl Settings {
    fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("config file {}: {e}", path.display())))?;
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "config file {}, line {}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                CliError::Validation(format!(
                    "config file {}, line {}: {key}: {e}",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "preset" => s.preset = Some(value.parse().map_err(|e| bad(&e))?),
                "episodes" => s.episodes = Some(value.parse().map_err(|e| bad(&e))?),
                "max_steps" => s.max_steps = Some(value.parse().map_err(|e| bad(&e))?),
                "seed" => s.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "rounds" => s.rounds = Some(value.parse().map_err(|e| bad(&e))?),
                "best_of" => s.best_of = Some(value.parse().map_err(|e| bad(&e))?),
                "parallelism" => s.parallelism = Some(value.parse().map_err(|e| bad(&e))?),
                "alpha" => s.alpha = Some(value.parse().map_err(|e| bad(&e))?),
                "gamma" => s.gamma = Some(value.parse().map_err(|e| bad(&e))?),
                "epsilon" => s.epsilon = Some(value.parse().map_err(|e| bad(&e))?),
                "epsilon_decay" => s.epsilon_decay = Some(value.parse().map_err(|e| bad(&e))?),
                "epsilon_min" => s.epsilon_min = Some(value.parse().map_err(|e| bad(&e))?),
                "lr" => s.lr = Some(value.parse().map_err(|e| bad(&e))?),
                other => {
                    return Err(CliError::Validation(format!(
                        "config file {}, line {}: unknown key '{other}'",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    /// Builds the effective settings: file values first, flags on top.
    fn resolve(overrides: &Overrides) -> Result<Self, CliError> {
        let mut s = match &overrides.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        if let Some(p) = &overrides.preset {
            s.preset = Some(p.parse().map_err(invalid)?);
        }
        s.episodes = overrides.episodes.or(s.episodes);
        s.max_steps = overrides.max_steps.or(s.max_steps);
        s.seed = overrides.seed.or(s.seed);
        s.alpha = overrides.alpha.or(s.alpha);
        s.gamma = overrides.gamma.or(s.gamma);
        s.epsilon = overrides.epsilon.or(s.epsilon);
        s.epsilon_decay = overrides.epsilon_decay.or(s.epsilon_decay);
        s.epsilon_min = overrides.epsilon_min.or(s.epsilon_min);
        s.lr = overrides.lr.or(s.lr);
        Ok(s)
    }

    fn q_config(&self, preset: Preset) -> Result<QLearnConfig, CliError> {
        let mut c = preset.q_config();
        if let Some(v) = self.episodes {
            c.episodes = v;
        }
        if let Some(v) = self.max_steps {
            c.max_steps = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.epsilon_decay {
            c.epsilon_decay = v;
        }
        if let Some(v) = self.epsilon_min {
            c.epsilon_min = v;
        }
        c.validate().map_err(invalid)?;
        Ok(c)
    }

    fn dqn_config(&self, preset: Preset) -> Result<DqnConfig, CliError> {
        let mut c = preset.dqn_config();
        if let Some(v) = self.episodes {
            c.episodes = v;
        }
        if let Some(v) = self.max_steps {
            c.max_steps = v;
        }
        if let Some(v) = self.lr {
            c.lr = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.epsilon_decay {
            c.epsilon_decay = v;
        }
        if let Some(v) = self.epsilon_min {
            c.epsilon_min = v;
        }
        c.validate().map_err(invalid)?;
        Ok(c)
    }
}

fn parse_task(s: &str) -> Result<TaskName, CliError> {
    s.parse().map_err(invalid)
}

fn parse_algorithm(s: &str) -> Result<Algorithm, CliError> {
    s.parse().map_err(invalid)
}

fn output_root(overrides: &Overrides) -> PathBuf {
    overrides
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn make_run_dir(root: &Path, label: &str) -> Result<PathBuf, CliError> {
    let dir = root.join(label);
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// run manifest

#[derive(Serialize)]
struct RunManifest {
    tool: String,
    version: String,
    command: String,
    timestamp_epoch_secs: u64,
    timestamp_utc: String,
    seed: u64,
    config: serde_json::Value,
    artifacts: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, seed: u64, config: serde_json::Value, artifacts: &[PathBuf]) -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: "qsynth".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp_epoch_secs: secs,
            timestamp_utc: iso8601_utc(secs),
            seed,
            config,
            artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        }
    }

    fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(self).map_err(failed)?;
        write_artifact(dir, "manifest.json", &text)
    }
}

/// Civil-date conversion (days-from-epoch to year/month/day) without a
/// calendar dependency.
fn iso8601_utc(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1_460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    format!(
        "{year:04}-{month:02}-{day:02}T{:02}:{:02}:{:02}Z",
        rem / 3_600,
        (rem % 3_600) / 60,
        rem % 60
    )
}

// ---------------------------------------------------------------------------
// train

#[derive(Serialize)]
struct TrainResultRecord {
    task: TaskName,
    algorithm: Algorithm,
    representation: Representation,
    preset: Preset,
    episodes: usize,
    seed: u64,
    success: bool,
    final_fidelity: f64,
    greedy_actions: Vec<String>,
    circuit: Vec<String>,
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let task_name = parse_task(&args.task)?;
    let algorithm = parse_algorithm(&args.algorithm)?;
    let representation = algorithm.representation();
    if let Some(rep) = &args.representation {
        let requested: Representation = rep.parse().map_err(invalid)?;
        if requested != representation {
            return Err(CliError::Validation(format!(
                "algorithm {algorithm} implies the {representation} representation, not {requested}"
            )));
        }
    }
    let settings = Settings::resolve(&args.overrides)?;
    let positional_preset = args
        .preset_pos
        .as_deref()
        .map(|p| p.parse::<Preset>().map_err(invalid))
        .transpose()?;
    if let (Some(a), Some(b)) = (positional_preset, settings.preset) {
        if a != b {
            return Err(CliError::Validation(format!(
                "conflicting presets: {a} (positional) vs {b}"
            )));
        }
    }
    // single training runs default to the demonstration settings
    let preset = settings
        .preset
        .or(positional_preset)
        .unwrap_or(Preset::Section3);
    let seed = settings.seed.unwrap_or(DEFAULT_BASE_SEED);
    let task = get_task(task_name);
    if !task.supports(representation) {
        return Err(invalid(qsynth_core::Error::UnsupportedCombination {
            task: task_name.to_string(),
            representation: representation.to_string(),
        }));
    }

    let root = output_root(&args.overrides);
    let label = format!("train-{task_name}-{algorithm}-s{seed}");
    let dir = make_run_dir(&root, &label)?;
    let mut artifacts = Vec::new();

    if args.walkthrough {
        if algorithm.is_dqn() || task_name != TaskName::BellPhiPlus {
            return Err(CliError::Validation(
                "--walkthrough applies to tabular training on bell_phi_plus only".to_string(),
            ));
        }
        let result = reproduce_walkthrough(representation, seed).map_err(invalid)?;
        let record = TrainResultRecord {
            task: task_name,
            algorithm,
            representation,
            preset: Preset::Section3,
            episodes: QLearnConfig::section3().episodes,
            seed,
            success: result.success,
            final_fidelity: if result.success { 1.0 } else { 0.0 },
            greedy_actions: result.greedy_labels.clone(),
            circuit: circuit_labels(&result.greedy_actions, representation),
        };
        artifacts.push(write_artifact(&dir, "qtable.tsv", &result.table_text)?);
        artifacts.push(write_artifact(
            &dir,
            "traces.ndjson",
            &traces_ndjson(&result.episodes),
        )?);
        artifacts.push(write_artifact(
            &dir,
            "result.json",
            &serde_json::to_string_pretty(&record).map_err(failed)?,
        )?);
        let manifest = RunManifest::new(
            "train",
            seed,
            serde_json::to_value(&record).map_err(failed)?,
            &artifacts,
        );
        manifest.write(&dir)?;
        print!("{}", result.table_text);
        println!();
        print_outcome(&record);
        return Ok(());
    }

    let max_steps = settings.max_steps.unwrap_or(DEFAULT_MAX_STEPS);
    let mut env = make_env(&task, representation, max_steps).map_err(invalid)?;
    let expert = task
        .expert_trajectory(representation)
        .map(|actions| ExpertTrajectory::new(actions, algorithm.expert_passes()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (rollout, traces, episodes) = if algorithm.is_dqn() {
        let config = settings.dqn_config(preset)?;
        let trained = train_dqn(&mut env, &config, expert.as_ref(), &mut rng).map_err(failed)?;
        let mut net = trained.net;
        let rollout =
            greedy_rollout(&mut net, &mut env, max_steps, &mut rng).map_err(failed)?;
        artifacts.push(write_artifact(&dir, "policy.json", &net.to_json())?);
        (rollout, trained.traces, config.episodes)
    } else {
        let config = settings.q_config(preset)?;
        let (mut table, traces) =
            train_q(&mut env, &config, expert.as_ref(), &mut rng).map_err(failed)?;
        let rollout =
            greedy_rollout(&mut table, &mut env, max_steps, &mut rng).map_err(failed)?;
        artifacts.push(write_artifact(
            &dir,
            "qtable.tsv",
            &qtable_to_text(&table, &env.action_labels()),
        )?);
        (rollout, traces, config.episodes)
    };

    let record = TrainResultRecord {
        task: task_name,
        algorithm,
        representation,
        preset,
        episodes,
        seed,
        success: rollout.success,
        final_fidelity: rollout.final_fidelity,
        greedy_actions: rollout.actions.iter().map(|a| a.label()).collect(),
        circuit: circuit_labels(&rollout.actions, representation),
    };
    artifacts.push(write_artifact(&dir, "traces.ndjson", &traces_ndjson(&traces))?);
    artifacts.push(write_artifact(
        &dir,
        "result.json",
        &serde_json::to_string_pretty(&record).map_err(failed)?,
    )?);
    let manifest = RunManifest::new(
        "train",
        seed,
        serde_json::to_value(&record).map_err(failed)?,
        &artifacts,
    );
    manifest.write(&dir)?;
    print_outcome(&record);
    eprintln!("artifacts in {}", dir.display());
    Ok(())
}

fn circuit_labels(
    actions: &[qsynth_core::envs::ActionSpec],
    representation: Representation,
) -> Vec<String> {
    circuit_from_trajectory(actions, representation)
        .iter()
        .map(|p| p.label())
        .collect()
}

fn traces_ndjson(traces: &[EpisodeTrace]) -> String {
    let mut out = String::new();
    for t in traces {
        out.push_str(&serde_json::to_string(t).expect("traces serialize"));
        out.push('\n');
    }
    out
}

fn print_outcome(record: &TrainResultRecord) {
    if record.success {
        println!("{}", record.circuit.join(", "));
        if record.greedy_actions != record.circuit {
            println!("greedy actions: {}", record.greedy_actions.join(", "));
        }
        println!(
            "reached {} with fidelity {:.6} after {} episodes",
            record.task.pretty(),
            record.final_fidelity,
            record.episodes
        );
    } else {
        println!(
            "target {} not reached (best fidelity {:.6} after {} episodes)",
            record.task.pretty(),
            record.final_fidelity,
            record.episodes
        );
    }
}

// ---------------------------------------------------------------------------
// bench

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.overrides)?;
    let preset = settings.preset.unwrap_or(Preset::Appendix);
    let seed = settings.seed.unwrap_or(DEFAULT_BASE_SEED);
    let rounds = args.rounds.or(settings.rounds).unwrap_or(DEFAULT_ROUNDS);
    let best_of = args.best_of.or(settings.best_of).unwrap_or(1);
    let parallelism = args.parallelism.or(settings.parallelism).unwrap_or(0);

    let tasks: Vec<TaskName> = if args.task == "all" {
        TaskName::ALL.to_vec()
    } else {
        vec![parse_task(&args.task)?]
    };
    let algorithms: Vec<Algorithm> = if args.algorithm == "all" {
        Algorithm::ALL.to_vec()
    } else {
        vec![parse_algorithm(&args.algorithm)?]
    };
    let grid = args.task == "all" || args.algorithm == "all";

    let mut cells = Vec::new();
    for &task in &tasks {
        for &algorithm in &algorithms {
            if !algorithm.supports(task) {
                if grid {
                    continue; // full grids silently skip the impossible cells
                }
                return Err(invalid(qsynth_core::Error::UnsupportedCombination {
                    task: task.to_string(),
                    representation: algorithm.representation().to_string(),
                }));
            }
            let mut config = ExperimentConfig::new(task, algorithm);
            config.preset = preset;
            config.rounds = rounds;
            config.episodes = settings.episodes;
            config.max_steps = settings.max_steps.unwrap_or(DEFAULT_MAX_STEPS);
            config.base_seed = seed;
            config.best_of = best_of;
            config.parallelism = parallelism;
            config.validate().map_err(invalid)?;
            cells.push(config);
        }
    }

    let root = output_root(&args.overrides);
    let label = format!("bench-{}-{}-s{seed}", args.task, args.algorithm);
    let dir = make_run_dir(&root, &label)?;
    let mut artifacts = Vec::new();
    let mut reports: Vec<BenchReport> = Vec::new();
    let total = cells.len();
    for (i, config) in cells.iter().enumerate() {
        let started = Instant::now();
        let outcome = run_benchmark(config).map_err(failed)?;
        eprintln!(
            "[{}/{total}] {} / {}: {}/{} rounds ({:.1}s)",
            i + 1,
            config.task,
            config.algorithm,
            outcome.report.successes,
            outcome.report.rounds,
            started.elapsed().as_secs_f64()
        );
        if args.traces {
            let name = format!("rounds-{}-{}.ndjson", config.task, config.algorithm);
            artifacts.push(write_artifact(&dir, &name, &rounds_ndjson(&outcome.rounds))?);
        }
        reports.push(outcome.report);
    }

    let table = render_report_table(&reports);
    let json = report_json(&reports);
    artifacts.push(write_artifact(&dir, "report.json", &json)?);
    artifacts.push(write_artifact(&dir, "table.txt", &table)?);
    let config_snapshot = serde_json::json!({
        "task": args.task,
        "algorithm": args.algorithm,
        "preset": preset,
        "rounds": rounds,
        "episodes": settings.episodes,
        "max_steps": settings.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        "best_of": best_of,
        "parallelism": parallelism,
    });
    RunManifest::new("bench", seed, config_snapshot, &artifacts).write(&dir)?;
    print!("{table}");
    eprintln!("artifacts in {}", dir.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// verify / tasks / show-qtable / rollout

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let checks = run_checks(args.corrupt);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&checks).map_err(failed)?);
    } else {
        print!("{}", render_checks(&checks));
    }
    if all_passed(&checks) {
        Ok(())
    } else {
        Err(CliError::Verification(
            "one or more checks failed".to_string(),
        ))
    }
}

fn cmd_tasks(args: TasksArgs) -> Result<(), CliError> {
    let rows = catalog();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).map_err(failed)?);
        return Ok(());
    }
    let mut grid: Vec<Vec<String>> = vec![vec![
        "Task".to_string(),
        "Qubits".to_string(),
        "Actions".to_string(),
        "Length".to_string(),
        "Space size".to_string(),
        "Gate set".to_string(),
    ]];
    for row in &rows {
        grid.push(vec![
            row.task.to_string(),
            row.qubits.to_string(),
            row.actions.to_string(),
            row.length.to_string(),
            row.space_size.to_string(),
            row.gate_set.join(" "),
        ]);
    }
    print!("{}", align_grid(&grid));
    Ok(())
}

fn align_grid(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            line.push_str(cell);
            if i + 1 < row.len() {
                for _ in 0..widths[i] - cell.chars().count() + 2 {
                    line.push(' ');
                }
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn cmd_show_qtable(args: ShowQtableArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.path)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", args.path.display())))?;
    let (table, labels) = qtable_from_text(&text).map_err(failed)?;
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["state".to_string()];
    header.extend(labels.iter().cloned());
    grid.push(header);
    let limit = args.max_rows.unwrap_or(usize::MAX).min(table.n_states());
    for state in 0..limit {
        let mut row = vec![state.to_string()];
        for value in table.row_or_zeros(state) {
            let mut cell = String::new();
            let _ = write!(cell, "{value:.3}");
            row.push(cell);
        }
        grid.push(row);
    }
    print!("{}", align_grid(&grid));
    if limit < table.n_states() {
        println!("... {} more states", table.n_states() - limit);
    }
    Ok(())
}

fn cmd_rollout(args: RolloutArgs) -> Result<(), CliError> {
    let task_name = parse_task(&args.task)?;
    let algorithm = parse_algorithm(&args.algorithm)?;
    let representation = algorithm.representation();
    let task = get_task(task_name);
    if !task.supports(representation) {
        return Err(invalid(qsynth_core::Error::UnsupportedCombination {
            task: task_name.to_string(),
            representation: representation.to_string(),
        }));
    }
    let text = fs::read_to_string(&args.artifact)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", args.artifact.display())))?;
    let mut agent: Box<dyn ActionValues> = if args
        .artifact
        .extension()
        .is_some_and(|e| e == "json")
    {
        Box::new(PolicyNet::from_json(&text).map_err(failed)?)
    } else {
        let (table, _) = qtable_from_text(&text).map_err(failed)?;
        Box::new(table)
    };
    let max_steps = args.max_steps.unwrap_or(DEFAULT_MAX_STEPS);
    let mut env = make_env(&task, representation, max_steps).map_err(invalid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(DEFAULT_BASE_SEED));
    let rollout: Rollout =
        greedy_rollout(agent.as_mut(), &mut env, max_steps, &mut rng).map_err(failed)?;
    let circuit = circuit_labels(&rollout.actions, representation);
    if rollout.success {
        println!("{}", circuit.join(", "));
        println!("fidelity {:.6} in {} steps", rollout.final_fidelity, rollout.steps);
    } else {
        println!(
            "target not reached in {} steps (fidelity {:.6})",
            rollout.steps, rollout.final_fidelity
        );
    }
    Ok(())
}
