//! Proposition vocabulary and the labelling function from belief triplets to
//! truth assignments.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ltl::TruthAssignment;

pub const CUT_STATES: [&str; 3] = ["chopped", "diced", "sliced"];
pub const COOK_STATES: [&str; 3] = ["fried", "roasted", "grilled"];

pub const COOKBOOK_IS_EXAMINED: &str = "cookbook_is_examined";
pub const PLAYER_AT_KITCHEN: &str = "player_at_kitchen";
pub const MEAL_IN_PLAYER: &str = "meal_in_player";
pub const MEAL_IS_CONSUMED: &str = "meal_is_consumed";

/// Every entity name the cooking games and the translation examples use.
pub const ENTITY_REGISTRY: &[&str] = &[
    "banana",
    "black pepper",
    "carrot",
    "chicken breast",
    "cilantro",
    "cookbook",
    "knife",
    "meal",
    "orange bell pepper",
    "parsley",
    "pork chop",
    "purple potato",
    "red apple",
    "red hot pepper",
    "red onion",
    "red potato",
    "salt",
    "white onion",
    "yellow bell pepper",
    "yellow potato",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabError {
    #[error("cannot normalize an empty name")]
    EmptyName,
}

/// Lower-case a display name and join its words with underscores.
pub fn normalize_name(text: &str) -> Result<String, VocabError> {
    let out: String = text
        .trim()
        .chars()
        .map(|c| match c {
            ' ' | '-' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect();
    if out.is_empty() {
        Err(VocabError::EmptyName)
    } else {
        Ok(out)
    }
}

/// One `(subject, relation, object)` fact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triplet {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triplet {
    pub fn new(subject: impl Into<String>, relation: impl Into<String>, object: impl Into<String>) -> Self {
        Triplet {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.relation, self.object)
    }
}

/// A set of triplets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefState(BTreeSet<Triplet>);

impl BeliefState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: Triplet) -> bool {
        self.0.insert(t)
    }

    pub fn contains(&self, t: &Triplet) -> bool {
        self.0.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triplet> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &BeliefState) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Triplet> for BeliefState {
    fn from_iter<I: IntoIterator<Item = Triplet>>(iter: I) -> Self {
        BeliefState(iter.into_iter().collect())
    }
}

fn is_labelled_state(s: &str) -> bool {
    CUT_STATES.contains(&s) || COOK_STATES.contains(&s) || s == "examined" || s == "consumed"
}

/// Map one triplet onto a proposition token, or `None` when the vocabulary
/// has nothing to say about it.
pub fn triplet_to_prop(t: &Triplet) -> Option<String> {
    let subject = normalize_name(&t.subject).ok()?;
    let relation = t.relation.trim().to_ascii_lowercase();
    let object = normalize_name(&t.object).ok()?;
    match relation.as_str() {
        "in" if object == "player" => Some(format!("{subject}_in_player")),
        "is" if is_labelled_state(&object) => Some(format!("{subject}_is_{object}")),
        "at" if subject == "player" && object == "kitchen" => Some(PLAYER_AT_KITCHEN.to_string()),
        _ => None,
    }
}

/// The labelling function: every proposition derivable from the belief.
pub fn label(g: &BeliefState) -> TruthAssignment {
    g.iter().filter_map(triplet_to_prop).collect()
}

/// The proposition vocabulary over a registry of entity names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entities: BTreeSet<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::cooking()
    }
}

impl Vocabulary {
    pub fn cooking() -> Self {
        Self::with_entities(ENTITY_REGISTRY.iter().copied())
    }

    pub fn with_entities<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        Vocabulary {
            entities: names
                .into_iter()
                .filter_map(|n| normalize_name(n).ok())
                .collect(),
        }
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(String::as_str)
    }

    /// Every proposition token this vocabulary can produce, sorted.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.insert(COOKBOOK_IS_EXAMINED.to_string());
        out.insert(PLAYER_AT_KITCHEN.to_string());
        out.insert(MEAL_IN_PLAYER.to_string());
        out.insert(MEAL_IS_CONSUMED.to_string());
        for e in &self.entities {
            out.insert(format!("{e}_in_player"));
            for s in CUT_STATES.iter().chain(COOK_STATES.iter()) {
                out.insert(format!("{e}_is_{s}"));
            }
            out.insert(format!("{e}_is_examined"));
            out.insert(format!("{e}_is_consumed"));
        }
        out
    }

    pub fn is_derivable(&self, prop: &str) -> bool {
        if [COOKBOOK_IS_EXAMINED, PLAYER_AT_KITCHEN, MEAL_IN_PLAYER, MEAL_IS_CONSUMED].contains(&prop) {
            return true;
        }
        if let Some(e) = prop.strip_suffix("_in_player") {
            return self.entities.contains(e);
        }
        CUT_STATES
            .iter()
            .chain(COOK_STATES.iter())
            .chain(["examined", "consumed"].iter())
            .any(|s| {
                prop.strip_suffix(&format!("_is_{s}"))
                    .is_some_and(|e| self.entities.contains(e))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_names() {
        assert_eq!(normalize_name("red potato").unwrap(), "red_potato");
        assert_eq!(normalize_name("Red-Hot Pepper").unwrap(), "red_hot_pepper");
        assert_eq!(normalize_name(""), Err(VocabError::EmptyName));
        assert_eq!(normalize_name("   "), Err(VocabError::EmptyName));
    }

    #[test]
    fn maps_triplets() {
        let t = |s, r, o| Triplet::new(s, r, o);
        assert_eq!(triplet_to_prop(&t("cookbook", "is", "examined")).as_deref(), Some("cookbook_is_examined"));
        assert_eq!(triplet_to_prop(&t("red potato", "is", "chopped")).as_deref(), Some("red_potato_is_chopped"));
        assert_eq!(triplet_to_prop(&t("fridge", "is", "open")), None);
        assert_eq!(triplet_to_prop(&t("carrot", "in", "player")).as_deref(), Some("carrot_in_player"));
        assert_eq!(triplet_to_prop(&t("player", "at", "kitchen")).as_deref(), Some("player_at_kitchen"));
        assert_eq!(triplet_to_prop(&t("player", "at", "corridor")), None);
        assert_eq!(triplet_to_prop(&t("carrot", "in", "fridge")), None);
        assert_eq!(triplet_to_prop(&t("meal", "is", "consumed")).as_deref(), Some("meal_is_consumed"));
        assert_eq!(triplet_to_prop(&t("carrot", "is", "roasted")).as_deref(), Some("carrot_is_roasted"));
    }

    #[test]
    fn labels_belief() {
        assert!(label(&BeliefState::new()).is_empty());
        let g: BeliefState = [Triplet::new("carrot", "in", "player"), Triplet::new("fridge", "is", "open")]
            .into_iter()
            .collect();
        assert_eq!(label(&g), ["carrot_in_player"].into_iter().collect());
        let g: BeliefState = [Triplet::new("player", "at", "kitchen"), Triplet::new("cookbook", "is", "examined")]
            .into_iter()
            .collect();
        assert_eq!(label(&g), ["player_at_kitchen", "cookbook_is_examined"].into_iter().collect());
    }

    #[test]
    fn vocabulary_derivability() {
        let v = Vocabulary::cooking();
        assert!(v.is_derivable("red_potato_is_chopped"));
        assert!(v.is_derivable("meal_in_player"));
        assert!(v.is_derivable("cookbook_is_examined"));
        assert!(!v.is_derivable("zucchini_fry_player"));
        assert!(!v.is_derivable("banana_is_frozen"));
        for p in v.propositions() {
            assert!(v.is_derivable(&p), "{p}");
        }
    }
}
