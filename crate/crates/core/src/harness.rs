//! Episode runner, training and evaluation loops, metrics files.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{
    select_action, train_step, ActionTokens, AgentConfig, AgentError, Checkpoint, NextState, Policy, QModel,
    ReplayBuffer, StateTokens, Transition,
};
use crate::instr::{Event, InstructionQueue};
use crate::ltl::RenderMode;
use crate::shaping::{shape, ShapingFlags};
use crate::vocab::{label, BeliefState, Vocabulary};
use crate::world::{load_game_set, scripted_optimal, Game, GameSpec, Mode, WorldError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Switches that change what the agent sees and how the environment responds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFlags {
    /// Show the instruction as generated, never progressed.
    pub no_progression: bool,
    pub ltl_reward: bool,
    pub ltl_termination: bool,
    /// Stripped observations and no instruction generation.
    pub strip_instructions: bool,
    pub force_cookbook: bool,
    /// Leave the instruction out of the features.
    pub no_ltl_input: bool,
    pub render_mode: RenderMode,
}

impl Default for RunFlags {
    fn default() -> Self {
        RunFlags {
            no_progression: false,
            ltl_reward: true,
            ltl_termination: true,
            strip_instructions: false,
            force_cookbook: false,
            no_ltl_input: false,
            render_mode: RenderMode::SingleToken,
        }
    }
}

impl RunFlags {
    pub fn shaping(&self) -> ShapingFlags {
        ShapingFlags {
            ltl_reward: self.ltl_reward,
            ltl_termination: self.ltl_termination,
        }
    }

    pub fn mode(&self) -> Mode {
        if self.strip_instructions {
            Mode::Stripped
        } else if self.force_cookbook {
            Mode::ForcedCookbook
        } else {
            Mode::Normal
        }
    }
}

/// Result of one agent step inside an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub action: String,
    pub observation: String,
    pub base_reward: f64,
    pub reward: f64,
    pub bonus: i8,
    pub event: Event,
    pub terminal: bool,
    pub generated: usize,
}

/// Summary of a finished episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub normalized_points: f64,
    pub success: bool,
    pub steps: usize,
    pub bonus_total: i32,
    pub cookbook_examined: bool,
}

/// A game wrapped with its instruction queue and shaping.
#[derive(Debug, Clone)]
pub struct Episode {
    game: Game,
    queue: InstructionQueue,
    flags: RunFlags,
    vocab: Arc<Vocabulary>,
    observation: String,
    belief: BeliefState,
    t: usize,
    terminal: bool,
    bonus_total: i32,
}

impl Episode {
    pub fn new(spec: Arc<GameSpec>, flags: RunFlags, step_cap: usize, vocab: Arc<Vocabulary>) -> Self {
        let nav = spec.has_navigation();
        let (game, first) = Game::reset_with_cap(spec, flags.mode(), step_cap);
        let mut queue = InstructionQueue::new();
        if !flags.strip_instructions {
            queue.observe(&first.observation.text, nav, &vocab, 0);
        }
        queue.advance(&label(&first.belief), 0);
        Episode {
            game,
            queue,
            flags,
            vocab,
            observation: first.observation.text,
            belief: first.belief,
            t: 0,
            terminal: first.done,
            bonus_total: 0,
        }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn queue(&self) -> &InstructionQueue {
        &self.queue
    }

    pub fn observation(&self) -> &str {
        &self.observation
    }

    pub fn candidates(&self) -> &[String] {
        self.game.candidates()
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Instruction text as the agent sees it.
    pub fn ltl_text(&self) -> String {
        if self.flags.no_ltl_input {
            String::new()
        } else if self.flags.no_progression {
            self.queue.active_generated_text(self.flags.render_mode)
        } else {
            self.queue.active_text(self.flags.render_mode)
        }
    }

    pub fn state_tokens(&self) -> StateTokens {
        StateTokens::new(&self.observation, &self.ltl_text(), &self.belief)
    }

    pub fn step(&mut self, action_index: usize) -> Result<StepOutcome, WorldError> {
        if self.terminal {
            return Err(WorldError::GameOver);
        }
        let action = self
            .candidates()
            .get(action_index)
            .cloned()
            .ok_or(WorldError::ActionOutOfRange {
                index: action_index,
                len: self.candidates().len(),
            })?;
        let r = self.game.step(action_index)?;
        self.t += 1;
        let generated = if self.flags.strip_instructions {
            0
        } else {
            self.queue
                .observe(&r.observation.text, self.game.spec().has_navigation(), &self.vocab, self.t)
        };
        let event = self.queue.advance(&label(&r.belief), self.t);
        let shaped = shape(r.base_reward, event, r.done, self.flags.shaping());
        self.bonus_total += i32::from(shaped.bonus);
        self.terminal = shaped.terminal;
        self.observation = r.observation.text;
        self.belief = r.belief;
        Ok(StepOutcome {
            action,
            observation: self.observation.clone(),
            base_reward: r.base_reward,
            reward: shaped.reward,
            bonus: shaped.bonus,
            event,
            terminal: shaped.terminal,
            generated,
        })
    }

    pub fn outcome(&self) -> EpisodeOutcome {
        let st = self.game.state();
        EpisodeOutcome {
            normalized_points: f64::from(st.score()) / f64::from(self.game.spec().max_score),
            success: st.success(),
            steps: st.steps(),
            bonus_total: self.bonus_total,
            cookbook_examined: st.cookbook_examined(),
        }
    }
}

/// Aggregate over a set of episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub games: usize,
    pub normalized_points: f64,
    pub success_rate: f64,
    pub mean_steps: f64,
    pub cookbook_rate: f64,
}

impl Metrics {
    pub fn from_outcomes(outcomes: &[EpisodeOutcome]) -> Self {
        let n = outcomes.len().max(1) as f64;
        Metrics {
            games: outcomes.len(),
            normalized_points: outcomes.iter().map(|o| o.normalized_points).sum::<f64>() / n,
            success_rate: outcomes.iter().filter(|o| o.success).count() as f64 / n,
            mean_steps: outcomes.iter().map(|o| o.steps as f64).sum::<f64>() / n,
            cookbook_rate: outcomes.iter().filter(|o| o.cookbook_examined).count() as f64 / n,
        }
    }

    fn score(&self) -> (f64, f64) {
        (self.normalized_points, self.success_rate)
    }
}

/// Play each game once, choosing actions with `choose`.
pub fn evaluate_with<F>(
    specs: &[Arc<GameSpec>],
    flags: RunFlags,
    step_cap: usize,
    mut choose: F,
) -> Result<Vec<EpisodeOutcome>, HarnessError>
where
    F: FnMut(&Episode) -> usize,
{
    if specs.is_empty() {
        return Err(HarnessError::Data("empty game set".into()));
    }
    let vocab = Arc::new(Vocabulary::cooking());
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut ep = Episode::new(spec.clone(), flags, step_cap, vocab.clone());
        while !ep.is_terminal() && !ep.candidates().is_empty() {
            let a = choose(&ep);
            ep.step(a)?;
        }
        out.push(ep.outcome());
    }
    Ok(out)
}

/// Greedy evaluation of a model.
pub fn evaluate_model(
    model: &QModel,
    specs: &[Arc<GameSpec>],
    flags: RunFlags,
    step_cap: usize,
) -> Result<Vec<EpisodeOutcome>, HarnessError> {
    evaluate_with(specs, flags, step_cap, |ep| {
        let st = ep.state_tokens();
        let q: Vec<f64> = ep.candidates().iter().map(|c| model.q_online(&st, &ActionTokens::new(c))).collect();
        crate::agent::argmax(&q).unwrap_or(0)
    })
}

/// Follow the scripted optimal plan. Candidates not in the plan are never chosen.
pub fn evaluate_scripted(specs: &[Arc<GameSpec>], flags: RunFlags, step_cap: usize) -> Result<Vec<EpisodeOutcome>, HarnessError> {
    evaluate_with(specs, flags, step_cap, |ep| {
        // a forced cookbook read counts as the plan's first step
        let plan = scripted_optimal(ep.game().spec());
        let want = plan.get(ep.game().state().steps()).cloned().unwrap_or_default();
        ep.candidates().iter().position(|c| *c == want).unwrap_or(0)
    })
}

/// Uniformly random play.
pub fn evaluate_random(
    specs: &[Arc<GameSpec>],
    flags: RunFlags,
    step_cap: usize,
    seed: u64,
) -> Result<Vec<EpisodeOutcome>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    evaluate_with(specs, flags, step_cap, |ep| rng.gen_range(0..ep.candidates().len()))
}

/// Everything needed for a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub level: u8,
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub flags: RunFlags,
    pub agent: AgentConfig,
    pub train_step_cap: usize,
    pub eval_step_cap: usize,
    pub eval_every: usize,
    pub patience: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            level: 0,
            episodes: 1000,
            seeds: vec![123, 321, 666],
            flags: RunFlags::default(),
            agent: AgentConfig::default(),
            train_step_cap: 50,
            eval_step_cap: 100,
            eval_every: 100,
            patience: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.level > 3 {
            return bad("level must be 0..=3");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.episodes == 0 || self.eval_every == 0 {
            return bad("episodes and eval_every must be positive");
        }
        if !self.agent.dim.is_power_of_two() {
            return bad("feature dimension must be a power of two");
        }
        if self.agent.batch_size == 0 || self.agent.train_every == 0 || self.agent.target_sync == 0 {
            return bad("batch_size, train_every and target_sync must be positive");
        }
        if self.train_step_cap == 0 || self.eval_step_cap == 0 {
            return bad("step caps must be positive");
        }
        Ok(())
    }

    fn run_value(&self) -> serde_json::Value {
        serde_json::json!({ "flags": self.flags, "eval_step_cap": self.eval_step_cap })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub outcome: EpisodeOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub seed: u64,
    pub episode: usize,
    pub metrics: Metrics,
    pub reloaded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    pub episodes: Vec<EpisodeRecord>,
    pub evals: Vec<EvalPoint>,
    pub best: Checkpoint,
    pub best_valid: Metrics,
    /// Best checkpoint replayed greedily on the training games.
    pub train_metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub seeds: Vec<SeedResult>,
}

impl TrainReport {
    pub fn mean_train(&self) -> Metrics {
        mean_metrics(self.seeds.iter().map(|s| s.train_metrics))
    }

    pub fn mean_valid(&self) -> Metrics {
        mean_metrics(self.seeds.iter().map(|s| s.best_valid))
    }

    pub fn episodes_csv(&self) -> String {
        let mut s = String::from("episode,seed,normalized_points,success,steps,bonus_total\n");
        for r in self.seeds.iter().flat_map(|x| &x.episodes) {
            let o = &r.outcome;
            let _ = writeln!(
                s,
                "{},{},{:.6},{},{},{}",
                r.episode,
                r.seed,
                o.normalized_points,
                u8::from(o.success),
                o.steps,
                o.bonus_total
            );
        }
        s
    }

    pub fn evals_csv(&self) -> String {
        let mut s = String::from("seed,episode,normalized_points,success_rate,mean_steps,cookbook_rate,reloaded\n");
        for e in self.seeds.iter().flat_map(|x| &x.evals) {
            let m = &e.metrics;
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{:.6},{:.6},{}",
                e.seed,
                e.episode,
                m.normalized_points,
                m.success_rate,
                m.mean_steps,
                m.cookbook_rate,
                u8::from(e.reloaded)
            );
        }
        s
    }

    pub fn summary_json(&self, config: &ExperimentConfig) -> serde_json::Value {
        serde_json::json!({
            "config": config,
            "mean_valid": self.mean_valid(),
            "mean_train": self.mean_train(),
            "seeds": self.seeds.iter().map(|s| serde_json::json!({
                "seed": s.seed,
                "best_episode": s.best.episode,
                "best_valid": s.best_valid,
                "train": s.train_metrics,
            })).collect::<Vec<_>>(),
        })
    }

    /// Write episodes.csv, evals.csv, summary.json and best_seed{S}.json.
    pub fn write(&self, config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(out_dir)?;
        let mut paths = vec![out_dir.join("episodes.csv"), out_dir.join("evals.csv"), out_dir.join("summary.json")];
        fs::write(&paths[0], self.episodes_csv())?;
        fs::write(&paths[1], self.evals_csv())?;
        let summary = serde_json::to_string_pretty(&self.summary_json(config)).map_err(|e| HarnessError::Data(e.to_string()))?;
        fs::write(&paths[2], summary + "\n")?;
        for s in &self.seeds {
            let p = out_dir.join(format!("best_seed{}.json", s.seed));
            s.best.save(&p)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

fn mean_metrics(items: impl Iterator<Item = Metrics>) -> Metrics {
    let v: Vec<Metrics> = items.collect();
    let n = v.len().max(1) as f64;
    Metrics {
        games: v.iter().map(|m| m.games).sum(),
        normalized_points: v.iter().map(|m| m.normalized_points).sum::<f64>() / n,
        success_rate: v.iter().map(|m| m.success_rate).sum::<f64>() / n,
        mean_steps: v.iter().map(|m| m.mean_steps).sum::<f64>() / n,
        cookbook_rate: v.iter().map(|m| m.cookbook_rate).sum::<f64>() / n,
    }
}

/// Train one seed: exploration, replay updates, periodic validation with
/// best-checkpoint tracking and patience reloads.
pub fn train_seed(
    config: &ExperimentConfig,
    train: &[Arc<GameSpec>],
    valid: &[Arc<GameSpec>],
    seed: u64,
) -> Result<SeedResult, HarnessError> {
    config.validate()?;
    if train.is_empty() || valid.is_empty() {
        return Err(HarnessError::Data("empty game set".into()));
    }
    if let Some(s) = train.iter().chain(valid).find(|s| s.level != config.level) {
        return Err(HarnessError::Data(format!("game level {} differs from config level {}", s.level, config.level)));
    }
    let ac = &config.agent;
    let vocab = Arc::new(Vocabulary::cooking());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = QModel::new(ac.dim);
    let mut buffer = ReplayBuffer::new(ac.buffer_capacity, ac.alpha, ac.beta);
    let mut episodes = Vec::with_capacity(config.episodes);
    let mut evals = Vec::new();
    let mut best: Option<(Metrics, Checkpoint, QModel)> = None;
    let mut declines = 0usize;
    let mut env_steps = 0usize;

    for episode in 0..config.episodes {
        let policy = match ac.boltzmann_tau {
            Some(tau) => Policy::Boltzmann(tau),
            None => Policy::EpsGreedy(ac.epsilon.epsilon(episode)),
        };
        let spec = train[rng.gen_range(0..train.len())].clone();
        let mut ep = Episode::new(spec, config.flags, config.train_step_cap, vocab.clone());
        let mut state = Arc::new(ep.state_tokens());
        let mut cands: Arc<[ActionTokens]> = ep.candidates().iter().map(|c| ActionTokens::new(c)).collect();
        while !ep.is_terminal() && !cands.is_empty() {
            let q = model.q_values(&state, &cands);
            let a = select_action(&q, policy, &mut rng)?;
            let out = ep.step(a)?;
            let next = if out.terminal || ep.candidates().is_empty() {
                None
            } else {
                Some(NextState {
                    state: Arc::new(ep.state_tokens()),
                    candidates: ep.candidates().iter().map(|c| ActionTokens::new(c)).collect(),
                })
            };
            buffer.push(Transition {
                state: state.clone(),
                action: cands[a].clone(),
                reward: out.reward,
                next: next.clone(),
            });
            env_steps += 1;
            if env_steps % ac.train_every == 0 && buffer.len() >= ac.batch_size {
                train_step(&mut model, &mut buffer, ac.batch_size, ac.gamma, ac.learning_rate, &mut rng)?;
            }
            match next {
                Some(n) => {
                    state = n.state;
                    cands = n.candidates;
                }
                None => break,
            }
        }
        episodes.push(EpisodeRecord {
            episode,
            seed,
            outcome: ep.outcome(),
        });
        if (episode + 1) % ac.target_sync == 0 {
            model.sync_target();
        }
        if (episode + 1) % config.eval_every == 0 || episode + 1 == config.episodes {
            let m = Metrics::from_outcomes(&evaluate_model(&model, valid, config.flags, config.eval_step_cap)?);
            let improved = best.as_ref().map_or(true, |(b, _, _)| m.score() > b.score());
            let mut reloaded = false;
            if improved {
                let ck = Checkpoint::capture(&model, ac, config.level, episode + 1, config.run_value(), &rng);
                best = Some((m, ck, model.clone()));
                declines = 0;
            } else if best.as_ref().is_some_and(|(b, _, _)| m.score() < b.score()) {
                declines += 1;
                if declines >= config.patience {
                    if let Some((_, _, saved)) = &best {
                        model = saved.clone();
                    }
                    declines = 0;
                    reloaded = true;
                }
            }
            evals.push(EvalPoint {
                seed,
                episode: episode + 1,
                metrics: m,
                reloaded,
            });
        }
    }
    let (best_valid, best_ck, best_model) = best.expect("at least one evaluation runs");
    let train_metrics = Metrics::from_outcomes(&evaluate_model(&best_model, train, config.flags, config.eval_step_cap)?);
    Ok(SeedResult {
        seed,
        episodes,
        evals,
        best: best_ck,
        best_valid,
        train_metrics,
    })
}

/// Train every configured seed on in-memory game sets.
pub fn run_train_on(
    config: &ExperimentConfig,
    train: &[Arc<GameSpec>],
    valid: &[Arc<GameSpec>],
) -> Result<TrainReport, HarnessError> {
    config.validate()?;
    let seeds = config
        .seeds
        .iter()
        .map(|&s| train_seed(config, train, valid, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrainReport { seeds })
}

pub fn load_specs(path: &Path) -> Result<Vec<Arc<GameSpec>>, HarnessError> {
    match load_game_set(path) {
        Ok(v) => Ok(v.into_iter().map(Arc::new).collect()),
        Err(e) => Err(HarnessError::Data(e.to_string())),
    }
}

/// Train from game-set files and write metrics and checkpoints to `out_dir`.
pub fn run_train(config: &ExperimentConfig, train_path: &Path, valid_path: &Path, out_dir: &Path) -> Result<TrainReport, HarnessError> {
    config.validate()?;
    let train = load_specs(train_path)?;
    let valid = load_specs(valid_path)?;
    let report = run_train_on(config, &train, &valid)?;
    report.write(config, out_dir)?;
    Ok(report)
}

/// Greedy evaluation of a saved checkpoint.
pub fn run_eval(checkpoint: &Checkpoint, specs: &[Arc<GameSpec>]) -> Result<(Metrics, Vec<EpisodeOutcome>), HarnessError> {
    if specs.is_empty() {
        return Err(HarnessError::Data("empty game set".into()));
    }
    if let Some(s) = specs.iter().find(|s| s.level != checkpoint.level) {
        return Err(HarnessError::Data(format!(
            "checkpoint is for level {} but the game set has level {}",
            checkpoint.level, s.level
        )));
    }
    let flags: RunFlags = checkpoint
        .run
        .get("flags")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| HarnessError::Data(format!("checkpoint flags: {e}")))?
        .unwrap_or_default();
    let cap = checkpoint.run.get("eval_step_cap").and_then(|v| v.as_u64()).unwrap_or(100) as usize;
    let model = checkpoint.model()?;
    let outcomes = evaluate_model(&model, specs, flags, cap)?;
    Ok((Metrics::from_outcomes(&outcomes), outcomes))
}

/// Per-game evaluation records as CSV.
pub fn outcomes_csv(outcomes: &[EpisodeOutcome]) -> String {
    let mut s = String::from("game,normalized_points,success,steps,bonus_total,cookbook_examined\n");
    for (i, o) in outcomes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{:.6},{},{},{},{}",
            i,
            o.normalized_points,
            u8::from(o.success),
            o.steps,
            o.bonus_total,
            u8::from(o.cookbook_examined)
        );
    }
    s
}

/// Interactive session: prints observation, instruction and numbered
/// candidates, reads an index or `quit`.
pub fn play<R: BufRead, W: Write>(
    spec: Arc<GameSpec>,
    flags: RunFlags,
    with_ltl: bool,
    step_cap: usize,
    input: R,
    mut output: W,
) -> Result<EpisodeOutcome, HarnessError> {
    let mut ep = Episode::new(spec, flags, step_cap, Arc::new(Vocabulary::cooking()));
    let mut lines = input.lines();
    writeln!(output, "{}", ep.observation())?;
    loop {
        if ep.is_terminal() || ep.candidates().is_empty() {
            break;
        }
        if with_ltl {
            writeln!(output, "[instruction] {}", ep.ltl_text())?;
        }
        for (i, c) in ep.candidates().iter().enumerate() {
            writeln!(output, "  {i}: {c}")?;
        }
        write!(output, "> ")?;
        output.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line == "quit" {
            break;
        }
        let Ok(idx) = line.parse::<usize>() else {
            writeln!(output, "enter a candidate number or 'quit'")?;
            continue;
        };
        match ep.step(idx) {
            Ok(out) => {
                writeln!(output, "{}", out.observation)?;
                writeln!(output, "[reward] base {} bonus {}", out.base_reward, out.bonus)?;
            }
            Err(WorldError::ActionOutOfRange { len, .. }) => {
                writeln!(output, "choose a number below {len}")?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let o = ep.outcome();
    writeln!(
        output,
        "[end] points {:.3} success {} steps {}",
        o.normalized_points, o.success, o.steps
    )?;
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::generate_game;

    fn specs(level: u8, n: u64) -> Vec<Arc<GameSpec>> {
        (0..n).map(|s| Arc::new(generate_game(level, s).unwrap())).collect()
    }

    #[test]
    fn scripted_agent_is_perfect() {
        for level in 0..=3 {
            let m = Metrics::from_outcomes(&evaluate_scripted(&specs(level, 10), RunFlags::default(), 100).unwrap());
            assert_eq!((m.normalized_points, m.success_rate), (1.0, 1.0), "level {level}");
        }
    }

    #[test]
    fn scripted_bonus_equals_max_bonus() {
        let o = evaluate_scripted(&specs(3, 5), RunFlags::default(), 100).unwrap();
        assert!(o.iter().all(|x| x.bonus_total == 3));
        let o = evaluate_scripted(&specs(1, 5), RunFlags::default(), 100).unwrap();
        assert!(o.iter().all(|x| x.bonus_total == 2));
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(matches!(evaluate_random(&[], RunFlags::default(), 100, 0), Err(HarnessError::Data(_))));
    }

    #[test]
    fn first_wrong_action_violates_next() {
        let spec = Arc::new(generate_game(0, 3).unwrap());
        let mut ep = Episode::new(spec, RunFlags::default(), 50, Arc::new(Vocabulary::cooking()));
        assert_eq!(ep.ltl_text(), "cookbook_is_examined");
        let look = ep.candidates().iter().position(|c| c == "look").unwrap();
        let out = ep.step(look).unwrap();
        assert_eq!((out.event, out.bonus, out.terminal), (Event::Violated, -1, true));
    }

    #[test]
    fn no_progression_freezes_text() {
        let spec = Arc::new(generate_game(0, 3).unwrap());
        let flags = RunFlags { no_progression: true, ..RunFlags::default() };
        let ep = Episode::new(spec, flags, 50, Arc::new(Vocabulary::cooking()));
        assert_eq!(ep.ltl_text(), "next cookbook_is_examined");
    }

    #[test]
    fn stripped_run_never_generates() {
        let flags = RunFlags { strip_instructions: true, ..RunFlags::default() };
        let o = evaluate_scripted(&specs(2, 5), flags, 100).unwrap();
        assert!(o.iter().all(|x| x.bonus_total == 0 && x.success));
    }

    #[test]
    fn play_quits_cleanly() {
        let spec = Arc::new(generate_game(0, 1).unwrap());
        let mut out = Vec::new();
        let o = play(spec, RunFlags::default(), true, 100, "x\n999\nquit\n".as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("[instruction] cookbook_is_examined"));
        assert!(text.contains("choose a number below"));
        assert_eq!(o.steps, 0);
    }
}
