use std::sync::Arc;

use rand::Rng;

use super::features::{ActionTokens, StateTokens};
use super::AgentError;

/// Successor state of a non-terminal transition.
#[derive(Debug, Clone, PartialEq)]
pub struct NextState {
    pub state: Arc<StateTokens>,
    pub candidates: Arc<[ActionTokens]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Arc<StateTokens>,
    pub action: ActionTokens,
    pub reward: f64,
    /// `None` exactly when the transition is terminal.
    pub next: Option<NextState>,
}

impl Transition {
    pub fn is_terminal(&self) -> bool {
        self.next.is_none()
    }
}

/// Binary tree of partial sums over leaf priorities.
#[derive(Debug, Clone)]
struct SumTree {
    leaves: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    fn new(capacity: usize) -> Self {
        let leaves = capacity.next_power_of_two();
        SumTree {
            leaves,
            nodes: vec![0.0; 2 * leaves],
        }
    }

    fn total(&self) -> f64 {
        self.nodes[1]
    }

    fn get(&self, i: usize) -> f64 {
        self.nodes[self.leaves + i]
    }

    fn set(&mut self, i: usize, value: f64) {
        let mut n = self.leaves + i;
        self.nodes[n] = value;
        while n > 1 {
            n /= 2;
            self.nodes[n] = self.nodes[2 * n] + self.nodes[2 * n + 1];
        }
    }

    /// Leaf whose cumulative range contains `mass`.
    fn find(&self, mut mass: f64, len: usize) -> usize {
        let mut n = 1;
        while n < self.leaves {
            let left = self.nodes[2 * n];
            if mass < left {
                n *= 2;
            } else {
                mass -= left;
                n = 2 * n + 1;
            }
        }
        (n - self.leaves).min(len - 1)
    }
}

/// A sampled batch: indices into the buffer and normalised importance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

const PRIORITY_FLOOR: f64 = 1e-6;

/// Ring buffer with proportional prioritized sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    alpha: f64,
    beta: f64,
    items: Vec<Transition>,
    priorities: Vec<f64>,
    tree: SumTree,
    next_slot: usize,
    max_priority: f64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, alpha: f64, beta: f64) -> Self {
        let capacity = capacity.max(1);
        ReplayBuffer {
            capacity,
            alpha,
            beta,
            items: Vec::new(),
            priorities: Vec::new(),
            tree: SumTree::new(capacity),
            next_slot: 0,
            max_priority: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, i: usize) -> &Transition {
        &self.items[i]
    }

    pub fn priority(&self, i: usize) -> f64 {
        self.priorities[i]
    }

    /// Sampling probability of item `i`.
    pub fn probability(&self, i: usize) -> f64 {
        self.tree.get(i) / self.tree.total()
    }

    /// Add a transition at the current maximum priority.
    pub fn push(&mut self, t: Transition) {
        let slot = self.next_slot;
        if self.items.len() < self.capacity {
            self.items.push(t);
            self.priorities.push(self.max_priority);
        } else {
            self.items[slot] = t;
            self.priorities[slot] = self.max_priority;
        }
        self.tree.set(slot, self.scaled(self.max_priority));
        self.next_slot = (slot + 1) % self.capacity;
    }

    fn scaled(&self, p: f64) -> f64 {
        (p + PRIORITY_FLOOR).powf(self.alpha)
    }

    pub fn set_priority(&mut self, i: usize, p: f64) {
        let p = p.abs();
        self.priorities[i] = p;
        self.max_priority = self.max_priority.max(p);
        self.tree.set(i, self.scaled(p));
    }

    /// Draw `n` indices with probability proportional to priority^alpha and
    /// weights (1 / (N * P))^beta divided by their maximum.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Batch, AgentError> {
        let len = self.items.len();
        if len < n || n == 0 {
            return Err(AgentError::InsufficientBuffer { have: len, need: n.max(1) });
        }
        let total = self.tree.total();
        let indices: Vec<usize> = (0..n).map(|_| self.tree.find(rng.gen::<f64>() * total, len)).collect();
        let raw: Vec<f64> = indices
            .iter()
            .map(|&i| (len as f64 * self.probability(i)).recip().powf(self.beta))
            .collect();
        let max = raw.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
        let weights = raw.into_iter().map(|w| w / max).collect();
        Ok(Batch { indices, weights })
    }
}
