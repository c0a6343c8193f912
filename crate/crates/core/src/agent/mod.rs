//! Linear double Q-learning over hashed text features with prioritized replay.

mod features;
mod replay;

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use features::{
    feature_count, featurize, for_each_index, graph_token, ActionTokens, FeatureVector, StateTokens, DEFAULT_DIM,
};
pub use replay::{Batch, NextState, ReplayBuffer, Transition};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("no candidate actions")]
    NoCandidates,
    #[error("replay buffer holds {have} transitions, need {need}")]
    InsufficientBuffer { have: usize, need: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Action selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Policy {
    EpsGreedy(f64),
    Boltzmann(f64),
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map_or(true, |b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

pub fn select_action<R: Rng>(q_values: &[f64], policy: Policy, rng: &mut R) -> Result<usize, AgentError> {
    if q_values.is_empty() {
        return Err(AgentError::NoCandidates);
    }
    match policy {
        Policy::EpsGreedy(eps) => {
            if eps > 0.0 && rng.gen::<f64>() < eps {
                Ok(rng.gen_range(0..q_values.len()))
            } else {
                Ok(argmax(q_values).unwrap_or(0))
            }
        }
        Policy::Boltzmann(tau) => {
            let max = q_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = q_values.iter().map(|q| ((q - max) / tau).exp()).collect();
            let mut u = rng.gen::<f64>() * exps.iter().sum::<f64>();
            for (i, e) in exps.iter().enumerate() {
                if u < *e {
                    return Ok(i);
                }
                u -= e;
            }
            Ok(q_values.len() - 1)
        }
    }
}

/// 1.0 during warm-up, then linear down to `end` over `anneal` episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub warmup: usize,
    pub anneal: usize,
    pub start: f64,
    pub end: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            warmup: 200,
            anneal: 1000,
            start: 1.0,
            end: 0.1,
        }
    }
}

impl EpsilonSchedule {
    pub fn epsilon(&self, episode: usize) -> f64 {
        if episode < self.warmup {
            return self.start;
        }
        if self.anneal == 0 {
            return self.end;
        }
        let t = ((episode - self.warmup) as f64 / self.anneal as f64).min(1.0);
        self.start + (self.end - self.start) * t
    }
}

/// Online and target weight vectors of a linear Q-function.
#[derive(Debug, Clone, PartialEq)]
pub struct QModel {
    online: Vec<f64>,
    target: Vec<f64>,
    pub updates: u64,
    pub syncs: u64,
}

impl QModel {
    pub fn new(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "feature dimension must be a power of two");
        QModel {
            online: vec![0.0; dim],
            target: vec![0.0; dim],
            updates: 0,
            syncs: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.online.len()
    }

    pub fn online_weights(&self) -> &[f64] {
        &self.online
    }

    pub fn online_weights_mut(&mut self) -> &mut [f64] {
        &mut self.online
    }

    pub fn target_weights(&self) -> &[f64] {
        &self.target
    }

    pub fn q_online(&self, state: &StateTokens, action: &ActionTokens) -> f64 {
        dot(&self.online, state, action)
    }

    pub fn q_target(&self, state: &StateTokens, action: &ActionTokens) -> f64 {
        dot(&self.target, state, action)
    }

    pub fn q_values(&self, state: &StateTokens, candidates: &[ActionTokens]) -> Vec<f64> {
        candidates.iter().map(|a| self.q_online(state, a)).collect()
    }

    pub fn sync_target(&mut self) {
        self.target.copy_from_slice(&self.online);
        self.syncs += 1;
    }
}

fn dot(w: &[f64], state: &StateTokens, action: &ActionTokens) -> f64 {
    let mut s = 0.0;
    for_each_index(state, action, w.len(), |i| s += w[i]);
    s
}

/// Dot product of the online weights with `f`.
pub fn q_value(model: &QModel, f: &FeatureVector) -> f64 {
    f.iter().map(|(i, c)| model.online[i] * f64::from(c)).sum()
}

/// Double Q-learning target: the online model picks the successor action,
/// the target model values it, and terminal transitions do not bootstrap.
pub fn ddqn_target(t: &Transition, model: &QModel, gamma: f64) -> f64 {
    match &t.next {
        None => t.reward,
        Some(next) => {
            let q = model.q_values(&next.state, &next.candidates);
            match argmax(&q) {
                Some(a) => t.reward + gamma * model.q_target(&next.state, &next.candidates[a]),
                None => t.reward,
            }
        }
    }
}

/// One prioritized, importance-weighted update. Each sample moves its own
/// Q-value by `learning_rate * weight * td` (a gradient step scaled by the
/// inverse squared feature norm). Returns the TD errors.
pub fn train_step<R: Rng>(
    model: &mut QModel,
    buffer: &mut ReplayBuffer,
    batch_size: usize,
    gamma: f64,
    learning_rate: f64,
    rng: &mut R,
) -> Result<Vec<f64>, AgentError> {
    let batch = buffer.sample(batch_size, rng)?;
    let mut tds = Vec::with_capacity(batch_size);
    for &i in &batch.indices {
        let t = buffer.get(i);
        tds.push(ddqn_target(t, model, gamma) - model.q_online(&t.state, &t.action));
    }
    let dim = model.dim();
    for ((&i, &w), &td) in batch.indices.iter().zip(&batch.weights).zip(&tds) {
        let t = buffer.get(i);
        let n = feature_count(&t.state, &t.action).max(1) as f64;
        let step = learning_rate * w * td / n;
        let online = &mut model.online;
        for_each_index(&t.state, &t.action, dim, |k| online[k] += step);
    }
    for (&i, &td) in batch.indices.iter().zip(&tds) {
        buffer.set_priority(i, td.abs());
    }
    model.updates += 1;
    Ok(tds)
}

/// Hyperparameters of the learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub dim: usize,
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Environment steps between updates.
    pub train_every: usize,
    /// Episodes between target syncs.
    pub target_sync: usize,
    pub epsilon: EpsilonSchedule,
    /// `None` means epsilon-greedy on the schedule.
    pub boltzmann_tau: Option<f64>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            dim: DEFAULT_DIM,
            gamma: 0.9,
            learning_rate: 0.01,
            batch_size: 64,
            buffer_capacity: 50_000,
            alpha: 0.6,
            beta: 0.4,
            train_every: 1,
            target_sync: 100,
            epsilon: EpsilonSchedule::default(),
            boltzmann_tau: None,
        }
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Generator state, enough to resume the exact stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        RngState {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    pub fn restore(&self) -> Result<ChaCha8Rng, AgentError> {
        use rand::SeedableRng;
        let pos: u128 = self
            .word_pos
            .parse()
            .map_err(|_| AgentError::Checkpoint(format!("bad word position '{}'", self.word_pos)))?;
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

/// Versioned model snapshot with sparse weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub level: u8,
    pub episode: usize,
    pub config: AgentConfig,
    /// Free-form run settings of the caller.
    pub run: serde_json::Value,
    pub online: Vec<(usize, f64)>,
    pub target: Vec<(usize, f64)>,
    pub updates: u64,
    pub syncs: u64,
    pub rng: RngState,
}

fn sparse(w: &[f64]) -> Vec<(usize, f64)> {
    w.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| (i, v)).collect()
}

impl Checkpoint {
    pub fn capture(
        model: &QModel,
        config: &AgentConfig,
        level: u8,
        episode: usize,
        run: serde_json::Value,
        rng: &ChaCha8Rng,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            level,
            episode,
            config: config.clone(),
            run,
            online: sparse(&model.online),
            target: sparse(&model.target),
            updates: model.updates,
            syncs: model.syncs,
            rng: RngState::capture(rng),
        }
    }

    pub fn model(&self) -> Result<QModel, AgentError> {
        if self.version != CHECKPOINT_VERSION {
            return Err(AgentError::Checkpoint(format!("unsupported version {}", self.version)));
        }
        if !self.config.dim.is_power_of_two() {
            return Err(AgentError::Checkpoint(format!("bad dimension {}", self.config.dim)));
        }
        let mut m = QModel::new(self.config.dim);
        for (dst, src) in [(&mut m.online, &self.online), (&mut m.target, &self.target)] {
            for &(i, v) in src {
                *dst.get_mut(i).ok_or_else(|| AgentError::Checkpoint(format!("index {i} out of range")))? = v;
            }
        }
        m.updates = self.updates;
        m.syncs = self.syncs;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        let text = serde_json::to_string(self).map_err(|e| AgentError::Checkpoint(e.to_string()))?;
        fs::write(path, text).map_err(|e| AgentError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let text = fs::read_to_string(path).map_err(|e| AgentError::Checkpoint(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| AgentError::Checkpoint(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;

    use super::*;
    use crate::vocab::BeliefState;

    fn state(text: &str) -> Arc<StateTokens> {
        Arc::new(StateTokens::new(text, "", &BeliefState::new()))
    }

    #[test]
    fn argmax_ties_lowest() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&[1.0, 3.0, 2.0], Policy::EpsGreedy(0.0), &mut rng), Ok(1));
        assert_eq!(select_action(&[2.0, 2.0], Policy::EpsGreedy(0.0), &mut rng), Ok(0));
        assert_eq!(select_action(&[], Policy::EpsGreedy(0.0), &mut rng), Err(AgentError::NoCandidates));
    }

    #[test]
    fn schedule_points() {
        let s = EpsilonSchedule { warmup: 1000, anneal: 3000, start: 1.0, end: 0.1 };
        assert_eq!(s.epsilon(0), 1.0);
        assert_eq!(s.epsilon(999), 1.0);
        assert!((s.epsilon(2500) - 0.55).abs() < 1e-12);
        assert!((s.epsilon(4000) - 0.1).abs() < 1e-12);
        assert!((s.epsilon(90_000) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn q_value_linearity() {
        let mut m = QModel::new(1 << 8);
        assert_eq!(q_value(&m, &featurize("a b", "", &BeliefState::new(), "look", 1 << 8)), 0.0);
        m.online[5] = 2.5;
        let single = FeatureVector([(5, 1)].into_iter().collect());
        assert_eq!(q_value(&m, &single), 2.5);
        m.online[7] = -1.0;
        let other = FeatureVector([(7, 1)].into_iter().collect());
        let both = FeatureVector([(5, 1), (7, 1)].into_iter().collect());
        assert_eq!(q_value(&m, &single) + q_value(&m, &other), q_value(&m, &both));
    }

    #[test]
    fn tokens_and_vector_agree() {
        let mut m = QModel::new(1 << 12);
        for (i, w) in m.online.iter_mut().enumerate() {
            *w = (i % 7) as f64 - 3.0;
        }
        let g = BeliefState::new();
        let st = StateTokens::new("you see a fridge", "eventually p", &g);
        let a = ActionTokens::new("open fridge");
        let f = featurize("you see a fridge", "eventually p", &g, "open fridge", 1 << 12);
        assert!((m.q_online(&st, &a) - q_value(&m, &f)).abs() < 1e-9);
    }

    #[test]
    fn repeated_update_does_not_increase_error() {
        let mut m = QModel::new(1 << 10);
        let mut buf = ReplayBuffer::new(4, 0.6, 0.4);
        buf.push(Transition {
            state: state("kitchen"),
            action: ActionTokens::new("look"),
            reward: 1.0,
            next: None,
        });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let td = train_step(&mut m, &mut buf, 1, 0.9, 0.1, &mut rng).unwrap();
            assert!(td[0] * td[0] <= last + 1e-15);
            assert_eq!(buf.priority(0), td[0].abs());
            last = td[0] * td[0];
        }
        assert!(last < 0.01);
    }

    #[test]
    fn target_weights_move_only_on_sync() {
        let mut m = QModel::new(1 << 10);
        let mut buf = ReplayBuffer::new(4, 0.6, 0.4);
        buf.push(Transition {
            state: state("kitchen"),
            action: ActionTokens::new("look"),
            reward: 1.0,
            next: None,
        });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        train_step(&mut m, &mut buf, 1, 0.9, 0.5, &mut rng).unwrap();
        assert!(m.target.iter().all(|&w| w == 0.0));
        m.sync_target();
        assert_eq!(m.target, m.online);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut m = QModel::new(1 << 10);
        m.online[3] = 0.1 + 0.2;
        m.target[9] = -1e-300;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let _: u64 = rng.gen();
        let cfg = AgentConfig { dim: 1 << 10, ..AgentConfig::default() };
        let ck = Checkpoint::capture(&m, &cfg, 0, 12, serde_json::json!({}), &rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        ck.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.model().unwrap(), m);
        let mut restored = back.rng.restore().unwrap();
        assert_eq!(restored.gen::<u64>(), rng.gen::<u64>());
    }
}
