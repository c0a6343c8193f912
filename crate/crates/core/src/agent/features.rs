use std::collections::BTreeMap;
use std::hash::Hasher;

use fnv::FnvHasher;

use crate::vocab::BeliefState;

/// Default feature dimension, 2^20.
pub const DEFAULT_DIM: usize = 1 << 20;

fn hash_token(namespace: &str, token: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(namespace.as_bytes());
    h.write_u8(b':');
    h.write(token.as_bytes());
    h.finish()
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finaliser over an order-sensitive combination
    let mut z = a ^ b.rotate_left(29).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn ngrams(namespace: &str, ws: &[String]) -> Vec<u64> {
    let mut out: Vec<u64> = ws.iter().map(|w| hash_token(namespace, w)).collect();
    for pair in ws.windows(2) {
        out.push(hash_token(namespace, &format!("{} {}", pair[0], pair[1])));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Token hashes of a belief triplet rendered as `subj_rel_obj`.
pub fn graph_token(subject: &str, relation: &str, object: &str) -> String {
    format!("{subject}_{relation}_{object}").replace([' ', '-'], "_")
}

/// Hashed, namespaced tokens of the state part of the input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateTokens {
    pub obs: Vec<u64>,
    pub obs_words: Vec<u64>,
    pub ltl: Vec<u64>,
    pub graph: Vec<u64>,
}

impl StateTokens {
    pub fn new(obs_text: &str, ltl_text: &str, belief: &BeliefState) -> Self {
        let ow = words(obs_text);
        let mut obs_words: Vec<u64> = ow.iter().map(|w| hash_token("obs", w)).collect();
        obs_words.sort_unstable();
        obs_words.dedup();
        let lw = words(ltl_text);
        let mut graph: Vec<u64> = belief
            .iter()
            .map(|t| hash_token("graph", &graph_token(&t.subject, &t.relation, &t.object)))
            .collect();
        graph.sort_unstable();
        graph.dedup();
        StateTokens {
            obs: ngrams("obs", &ow),
            obs_words,
            ltl: ngrams("ltl", &lw),
            graph,
        }
    }
}

/// Hashed tokens of one candidate action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTokens {
    /// The whole action text.
    pub id: u64,
    /// The leading verb.
    pub verb: u64,
    pub words: Vec<u64>,
}

impl ActionTokens {
    pub fn new(action: &str) -> Self {
        let ws = words(action);
        let verb = ws.first().map(|w| hash_token("verb", w)).unwrap_or(0);
        ActionTokens {
            id: hash_token("action", action),
            verb,
            words: ngrams("action", &ws),
        }
    }
}

const BIAS: u64 = 0x5bd1_e995_u64;

/// Call `f` once per hashed feature of `(state, action)`, with repeats.
///
/// State tokens enter alone and crossed with the action id and verb, so the
/// same word in different sources or next to different actions lands on
/// different indices.
#[inline]
pub fn for_each_index(state: &StateTokens, action: &ActionTokens, dim: usize, mut f: impl FnMut(usize)) {
    let mask = (dim - 1) as u64;
    let mut emit = |h: u64| f((mix(h, 0) & mask) as usize);
    emit(BIAS);
    emit(action.id);
    for &w in &action.words {
        emit(w);
    }
    for src in [&state.obs, &state.ltl, &state.graph] {
        for &t in src.iter() {
            emit(t);
        }
    }
    for src in [&state.ltl, &state.graph] {
        for &t in src.iter() {
            emit(mix(action.id, t));
            emit(mix(action.verb, t));
        }
    }
    for &t in &state.obs_words {
        emit(mix(action.id, t));
    }
}

/// Number of features `for_each_index` emits.
pub fn feature_count(state: &StateTokens, action: &ActionTokens) -> usize {
    2 + action.words.len()
        + state.obs.len()
        + 3 * (state.ltl.len() + state.graph.len())
        + state.obs_words.len()
}

/// Sparse hashed features: index to count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector(pub BTreeMap<usize, u32>);

impl FeatureVector {
    pub fn from_tokens(state: &StateTokens, action: &ActionTokens, dim: usize) -> Self {
        let mut m = BTreeMap::new();
        for_each_index(state, action, dim, |i| *m.entry(i).or_insert(0) += 1);
        FeatureVector(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&i, &c)| (i, c))
    }

    /// Squared euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.0.values().map(|&c| f64::from(c * c)).sum()
    }
}

/// Features of one (observation, instruction, belief, action) input.
pub fn featurize(obs_text: &str, ltl_text: &str, belief: &BeliefState, action_text: &str, dim: usize) -> FeatureVector {
    FeatureVector::from_tokens(&StateTokens::new(obs_text, ltl_text, belief), &ActionTokens::new(action_text), dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Triplet;

    #[test]
    fn deterministic_and_bounded() {
        let g: BeliefState = [Triplet::new("carrot", "in", "player")].into_iter().collect();
        let a = featurize("You see a fridge.", "eventually p", &g, "open fridge", 1 << 10);
        let b = featurize("You see a fridge.", "eventually p", &g, "open fridge", 1 << 10);
        assert_eq!(a, b);
        assert!(a.iter().all(|(i, _)| i < 1 << 10));
        let total: u32 = a.iter().map(|(_, c)| c).sum();
        let st = StateTokens::new("You see a fridge.", "eventually p", &g);
        assert_eq!(total as usize, feature_count(&st, &ActionTokens::new("open fridge")));
    }

    #[test]
    fn ltl_text_changes_features() {
        let g = BeliefState::new();
        let a = featurize("obs", "", &g, "look", DEFAULT_DIM);
        let b = featurize("obs", "eventually p", &g, "look", DEFAULT_DIM);
        assert_ne!(a, b);
    }

    #[test]
    fn namespaces_separate_sources() {
        let g = BeliefState::new();
        let in_obs = StateTokens::new("carrot", "", &g);
        let in_ltl = StateTokens::new("", "carrot", &g);
        assert_ne!(in_obs.obs, in_ltl.ltl);
    }

    #[test]
    fn graph_triplet_token() {
        assert_eq!(graph_token("carrot", "in", "player"), "carrot_in_player");
        assert_eq!(graph_token("red potato", "is", "chopped"), "red_potato_is_chopped");
        let g: BeliefState = [Triplet::new("carrot", "in", "player")].into_iter().collect();
        let st = StateTokens::new("", "", &g);
        assert_eq!(st.graph, vec![hash_token("graph", "carrot_in_player")]);
    }
}
