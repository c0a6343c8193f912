use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use cookltl::agent::{AgentConfig, AgentError, Checkpoint, EpsilonSchedule};
use cookltl::harness::{self, ExperimentConfig, HarnessError, RunFlags};
use cookltl::ltl::RenderMode;
use cookltl::translate::{self, HttpCompletionClient, TranslateError};
use cookltl::vocab::Vocabulary;
use cookltl::world::{build_game_sets, generate_game, write_game_set, GameSetCounts, WorldError};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "cookltl", version, about = "LTL instruction following for cooking text games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate disjoint train/valid/test game sets for one level.
    MakeGames {
        #[arg(long)]
        level: u8,
        #[arg(long, default_value_t = 20)]
        train: usize,
        #[arg(long, default_value_t = 20)]
        valid: usize,
        #[arg(long, default_value_t = 20)]
        test: usize,
        #[arg(long, default_value_t = 2024)]
        master_seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train one agent per seed and write metrics and best checkpoints.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        train_set: PathBuf,
        #[arg(long)]
        valid_set: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Greedy evaluation of a checkpoint on a game set.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        game_set: PathBuf,
        /// Per-game CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play a game interactively on stdin/stdout.
    Play {
        #[arg(long, default_value_t = 0)]
        level: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Take the game from a game-set file instead of generating it.
        #[arg(long)]
        game_set: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        with_ltl: bool,
        #[arg(long, default_value_t = 100)]
        step_cap: usize,
        #[command(flatten)]
        flags: FlagArgs,
    },
    /// Grade few-shot translations from a completion endpoint.
    ///
    /// Endpoint, key and model are read from COOKLTL_COMPLETION_URL,
    /// COOKLTL_COMPLETION_KEY and COOKLTL_COMPLETION_MODEL.
    TranslateSuite {
        /// JSONL test cases with `nl` and `ltl`; generated when absent.
        #[arg(long)]
        test_set: Option<PathBuf>,
        #[arg(long, default_value_t = 234)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        concurrency: usize,
        #[arg(long, default_value_t = 512)]
        max_tokens: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct FlagArgs {
    #[arg(long)]
    no_progression: bool,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    ltl_reward: bool,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    ltl_termination: bool,
    #[arg(long)]
    strip_instructions: bool,
    #[arg(long)]
    force_cookbook: bool,
    #[arg(long)]
    no_ltl_input: bool,
    #[arg(long, value_enum, default_value_t = Render::SingleToken)]
    render_mode: Render,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum Render {
    SingleToken,
    MultiToken,
}

impl From<FlagArgs> for RunFlags {
    fn from(a: FlagArgs) -> Self {
        RunFlags {
            no_progression: a.no_progression,
            ltl_reward: a.ltl_reward,
            ltl_termination: a.ltl_termination,
            strip_instructions: a.strip_instructions,
            force_cookbook: a.force_cookbook,
            no_ltl_input: a.no_ltl_input,
            render_mode: match a.render_mode {
                Render::SingleToken => RenderMode::SingleToken,
                Render::MultiToken => RenderMode::MultiToken,
            },
        }
    }
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    level: u8,
    #[arg(long, default_value_t = 1000)]
    episodes: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [123u64, 321, 666])]
    seeds: Vec<u64>,
    #[command(flatten)]
    flags: FlagArgs,
    #[arg(long, default_value_t = 50)]
    train_step_cap: usize,
    #[arg(long, default_value_t = 100)]
    eval_step_cap: usize,
    #[arg(long, default_value_t = 100)]
    eval_every: usize,
    #[arg(long, default_value_t = 3)]
    patience: usize,
    #[arg(long, default_value_t = cookltl::agent::DEFAULT_DIM)]
    dim: usize,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 50_000)]
    buffer_capacity: usize,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value_t = 0.4)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    train_every: usize,
    #[arg(long, default_value_t = 100)]
    target_sync: usize,
    #[arg(long)]
    epsilon_warmup: Option<usize>,
    #[arg(long)]
    epsilon_anneal: Option<usize>,
    #[arg(long)]
    epsilon_start: Option<f64>,
    #[arg(long)]
    epsilon_end: Option<f64>,
    #[arg(long)]
    boltzmann_tau: Option<f64>,
}

impl From<ConfigArgs> for ExperimentConfig {
    fn from(a: ConfigArgs) -> Self {
        let d = EpsilonSchedule::default();
        ExperimentConfig {
            level: a.level,
            episodes: a.episodes,
            seeds: a.seeds,
            flags: a.flags.into(),
            agent: AgentConfig {
                dim: a.dim,
                gamma: a.gamma,
                learning_rate: a.learning_rate,
                batch_size: a.batch_size,
                buffer_capacity: a.buffer_capacity,
                alpha: a.alpha,
                beta: a.beta,
                train_every: a.train_every,
                target_sync: a.target_sync,
                epsilon: EpsilonSchedule {
                    warmup: a.epsilon_warmup.unwrap_or(d.warmup),
                    anneal: a.epsilon_anneal.unwrap_or(d.anneal),
                    start: a.epsilon_start.unwrap_or(d.start),
                    end: a.epsilon_end.unwrap_or(d.end),
                },
                boltzmann_tau: a.boltzmann_tau,
            },
            train_step_cap: a.train_step_cap,
            eval_step_cap: a.eval_step_cap,
            eval_every: a.eval_every,
            patience: a.patience,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, e: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        message: e.to_string(),
    }
}

fn world_code(e: &WorldError) -> u8 {
    match e {
        WorldError::InvalidLevel(_) => EXIT_CONFIG,
        WorldError::GameSet(_) => EXIT_DATA,
        _ => EXIT_RUNTIME,
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match &e {
            HarnessError::Config(_) => EXIT_CONFIG,
            HarnessError::Data(_) => EXIT_DATA,
            HarnessError::World(w) => world_code(w),
            HarnessError::Agent(AgentError::Checkpoint(_)) => EXIT_DATA,
            HarnessError::Agent(_) | HarnessError::Io(_) => EXIT_RUNTIME,
        };
        fail(code, e)
    }
}

impl From<TranslateError> for Failure {
    fn from(e: TranslateError) -> Self {
        let code = match &e {
            TranslateError::Config(_) | TranslateError::ExampleCount(_) => EXIT_CONFIG,
            TranslateError::Tuple { .. } | TranslateError::Recipe(_) => EXIT_DATA,
            _ => EXIT_RUNTIME,
        };
        fail(code, e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::MakeGames {
            level,
            train,
            valid,
            test,
            master_seed,
            out_dir,
        } => {
            let sets = build_game_sets(level, GameSetCounts { train, valid, test }, master_seed).map_err(|e| fail(world_code(&e), e))?;
            for p in write_game_set(&sets, &out_dir).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", out_dir.display())))? {
                println!("{}", p.display());
            }
        }
        Command::Train {
            config,
            train_set,
            valid_set,
            out_dir,
        } => {
            let config: ExperimentConfig = config.into();
            let report = harness::run_train(&config, &train_set, &valid_set, &out_dir)?;
            let v = report.mean_valid();
            println!(
                "valid: normalized_points {:.4} success_rate {:.4} cookbook_rate {:.4}",
                v.normalized_points, v.success_rate, v.cookbook_rate
            );
            println!("metrics written to {}", out_dir.display());
        }
        Command::Eval { checkpoint, game_set, out } => {
            let ckpt = Checkpoint::load(&checkpoint).map_err(|e| fail(EXIT_DATA, e))?;
            let specs = harness::load_specs(&game_set)?;
            let (m, outcomes) = harness::run_eval(&ckpt, &specs)?;
            println!(
                "games {} normalized_points {:.4} success_rate {:.4} mean_steps {:.2} cookbook_rate {:.4}",
                m.games, m.normalized_points, m.success_rate, m.mean_steps, m.cookbook_rate
            );
            if let Some(path) = out {
                std::fs::write(&path, harness::outcomes_csv(&outcomes)).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", path.display())))?;
            }
        }
        Command::Play {
            level,
            seed,
            game_set,
            index,
            with_ltl,
            step_cap,
            flags,
        } => {
            let spec = match game_set {
                Some(path) => harness::load_specs(&path)?
                    .get(index)
                    .cloned()
                    .ok_or_else(|| fail(EXIT_DATA, format!("{}: no game at index {index}", path.display())))?,
                None => Arc::new(generate_game(level, seed).map_err(|e| fail(world_code(&e), e))?),
            };
            let o = harness::play(spec, flags.into(), with_ltl, step_cap, io::stdin().lock(), io::stdout().lock())?;
            println!(
                "normalized_points {:.4} success {} steps {}",
                o.normalized_points, o.success, o.steps
            );
        }
        Command::TranslateSuite {
            test_set,
            cases,
            seed,
            concurrency,
            max_tokens,
            out_dir,
        } => {
            let tests = match test_set {
                Some(p) => translate::load_test_set(&p).map_err(|e| fail(EXIT_DATA, e))?,
                None => translate::generate_test_set(cases, seed, &Vocabulary::cooking())?,
            };
            let mut client = HttpCompletionClient::from_env()?;
            client.max_tokens = max_tokens;
            let report = translate::run_suite(&client, &translate::prompt_examples(), &tests, concurrency)?;
            report.write(&out_dir).map_err(|e| fail(EXIT_RUNTIME, e))?;
            let s = &report.summary;
            for (g, frac) in &s.fractions {
                println!("{:?}: {} ({:.4})", g, s.counts[g], frac);
            }
            println!("cases {} failures {}", s.cases, s.failures);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
