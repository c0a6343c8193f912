//! Instruction generation from game observations and the sequential
//! instruction queue.
//!
//! Two generation events can happen per episode: the initial observation
//! yields the kitchen/cookbook instructions, and reading the cookbook yields
//! the recipe. Only the active instruction is progressed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ltl::{progress, render, Formula, LtlError, RenderMode, TruthAssignment};
use crate::vocab::{normalize_name, Vocabulary, COOKBOOK_IS_EXAMINED, MEAL_IN_PLAYER, MEAL_IS_CONSUMED, PLAYER_AT_KITCHEN};

/// The sentence of the opening observation that points at the cookbook.
pub const COOKBOOK_DIRECTIVE: &str = "check the cookbook in the kitchen for the recipe";

const CUT_VERBS: [(&str, &str); 3] = [("chop", "chopped"), ("dice", "diced"), ("slice", "sliced")];
const COOK_VERBS: [(&str, &str); 3] = [("fry", "fried"), ("roast", "roasted"), ("grill", "grilled")];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstrError {
    #[error("observation does not contain the cookbook directive")]
    MissingDirective,
    #[error("cannot parse recipe: {0}")]
    Recipe(String),
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error("golden file: {0}")]
    Golden(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    InitialNav,
    InitialCookbook,
    Recipe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pending,
    Active,
    Satisfied,
    Violated,
}

/// Result of progressing the queue by one truth assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    #[default]
    None,
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    /// The formula as generated.
    pub formula: Formula,
    /// The formula after progression so far.
    pub current: Formula,
    pub origin: Origin,
    pub status: Status,
    /// First step whose truth assignment this instruction is progressed by.
    pub activation_step: Option<usize>,
}

impl Instruction {
    fn pending(formula: Formula, origin: Origin) -> Self {
        Instruction {
            current: formula.clone(),
            formula,
            origin,
            status: Status::Pending,
            activation_step: None,
        }
    }

    fn activate(&mut self, step: usize) {
        debug_assert_eq!(self.status, Status::Pending);
        self.status = Status::Active;
        self.activation_step = Some(step);
    }
}

/// A parsed cookbook recipe.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Recipe {
    /// Normalized ingredient tokens in listed order.
    pub ingredients: Vec<String>,
    /// `(ingredient, state)` pairs in direction order.
    pub directions: Vec<(String, String)>,
    pub prepare_meal: bool,
}

impl Recipe {
    /// Propositions the recipe asks for, in instruction order.
    pub fn propositions(&self, include_consumed: bool) -> Vec<String> {
        let mut props: Vec<String> = self.ingredients.iter().map(|i| format!("{i}_in_player")).collect();
        props.extend(self.directions.iter().map(|(i, s)| format!("{i}_is_{s}")));
        if self.prepare_meal {
            props.push(MEAL_IN_PLAYER.to_string());
        }
        if include_consumed {
            props.push(MEAL_IS_CONSUMED.to_string());
        }
        props
    }

    /// `eventually p1 and eventually p2 and ...`
    pub fn formula(&self, include_consumed: bool) -> Option<Formula> {
        Formula::conjunction(
            self.propositions(include_consumed)
                .into_iter()
                .map(|p| Formula::eventually(Formula::atom(p)))
                .collect::<Vec<_>>(),
        )
    }
}

fn tokens(text: &str) -> Vec<String> {
    let mut spaced = String::with_capacity(text.len() + 16);
    for c in text.to_lowercase().chars() {
        match c {
            ':' | ',' | '.' | '\n' | ';' => {
                spaced.push(' ');
                spaced.push(if c == '\n' { ',' } else { c });
                spaced.push(' ');
            }
            c => spaced.push(c),
        }
    }
    spaced.split_whitespace().map(str::to_string).collect()
}

fn is_separator(tok: &str) -> bool {
    matches!(tok, ":" | "," | "." | ";")
}

fn find_section(toks: &[String], name: &str, from: usize) -> Option<usize> {
    (from..toks.len().saturating_sub(1)).find(|&i| toks[i] == name && toks[i + 1] == ":")
}

/// Split words into registry entities by greedy longest match; `None` when a
/// word is left over.
fn segment(words: &[String], vocab: &Vocabulary) -> Option<Vec<String>> {
    let known: Vec<String> = vocab.entities().map(str::to_string).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let mut matched = None;
        for end in (i + 1..=words.len()).rev() {
            let cand = words[i..end].join("_");
            if known.contains(&cand) {
                matched = Some((cand, end));
                break;
            }
        }
        let (name, end) = matched?;
        out.push(name);
        i = end;
    }
    Some(out)
}

fn verb_state(word: &str) -> Option<&'static str> {
    CUT_VERBS
        .iter()
        .chain(COOK_VERBS.iter())
        .find(|(v, _)| *v == word)
        .map(|(_, s)| *s)
}

/// Parse the text shown after reading the cookbook.
///
/// Accepts both comma-separated directions and the flattened, lower-cased
/// form where ingredients and directions follow each other without
/// separators; in that case ingredient boundaries come from the vocabulary.
pub fn parse_recipe(cookbook_obs: &str, vocab: &Vocabulary) -> Result<Recipe, InstrError> {
    let toks = tokens(cookbook_obs);
    let ing_at = find_section(&toks, "ingredients", 0)
        .ok_or_else(|| InstrError::Recipe("missing 'ingredients :' section".into()))?;
    let dir_at = find_section(&toks, "directions", ing_at + 2)
        .ok_or_else(|| InstrError::Recipe("missing 'directions :' section".into()))?;

    let mut ingredients = Vec::new();
    for chunk in toks[ing_at + 2..dir_at].split(|t| is_separator(t)) {
        if chunk.is_empty() {
            continue;
        }
        match segment(chunk, vocab) {
            Some(names) => ingredients.extend(names),
            None => ingredients.push(normalize_name(&chunk.join(" ")).map_err(|e| InstrError::Recipe(e.to_string()))?),
        }
    }
    if ingredients.is_empty() {
        return Err(InstrError::Recipe("no ingredients listed".into()));
    }

    let body: Vec<&String> = toks[dir_at + 2..].iter().filter(|t| !is_separator(t)).collect();
    let starts_step = |i: usize| -> bool {
        (verb_state(body[i]).is_some() && body.get(i + 1).is_some_and(|t| *t == "the"))
            || (body[i] == "prepare" && body.get(i + 1).is_some_and(|t| *t == "meal"))
    };
    let mut directions = Vec::new();
    let mut prepare_meal = false;
    let mut i = 0;
    while i < body.len() {
        if body[i] == "prepare" && body.get(i + 1).is_some_and(|t| *t == "meal") {
            prepare_meal = true;
            i += 2;
        } else if let (Some(state), true) = (verb_state(body[i]), body.get(i + 1).is_some_and(|t| *t == "the")) {
            let start = i + 2;
            let mut end = start;
            while end < body.len() && !starts_step(end) {
                end += 1;
            }
            if end == start {
                return Err(InstrError::Recipe(format!("direction '{}' names no ingredient", body[i])));
            }
            let name = body[start..end].iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");
            directions.push((normalize_name(&name).map_err(|e| InstrError::Recipe(e.to_string()))?, state.to_string()));
            i = end;
        } else {
            // flavour text between steps, e.g. a trailing sentence
            i += 1;
        }
    }
    Ok(Recipe {
        ingredients,
        directions,
        prepare_meal,
    })
}

/// Instructions generated from the opening observation.
pub fn gen_initial(obs: &str, has_navigation: bool) -> Result<Vec<Instruction>, InstrError> {
    if !obs.to_lowercase().contains(COOKBOOK_DIRECTIVE) {
        return Err(InstrError::MissingDirective);
    }
    let mut out = Vec::new();
    if has_navigation {
        out.push(Instruction::pending(
            Formula::eventually(Formula::atom(PLAYER_AT_KITCHEN)),
            Origin::InitialNav,
        ));
    }
    out.push(Instruction::pending(
        Formula::next(Formula::atom(COOKBOOK_IS_EXAMINED)),
        Origin::InitialCookbook,
    ));
    Ok(out)
}

/// The recipe instruction generated from the cookbook text.
pub fn gen_recipe(cookbook_obs: &str, vocab: &Vocabulary) -> Result<Instruction, InstrError> {
    let recipe = parse_recipe(cookbook_obs, vocab)?;
    let formula = recipe
        .formula(true)
        .ok_or_else(|| InstrError::Recipe("empty recipe".into()))?;
    Ok(Instruction::pending(formula, Origin::Recipe))
}

/// Whether the observation looks like a cookbook reading.
pub fn is_cookbook_reading(obs: &str) -> bool {
    let toks = tokens(obs);
    find_section(&toks, "ingredients", 0)
        .and_then(|i| find_section(&toks, "directions", i + 2))
        .is_some()
}

/// Ordered instructions of one episode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstructionQueue {
    items: Vec<Instruction>,
    generation_events: usize,
    initial_generated: bool,
    recipe_generated: bool,
    /// Set after a violation; nothing further is activated.
    halted: bool,
}

impl InstructionQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[Instruction] {
        &self.items
    }

    pub fn generation_events(&self) -> usize {
        self.generation_events
    }

    pub fn active(&self) -> Option<&Instruction> {
        self.items.iter().find(|i| i.status == Status::Active)
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    fn enqueue(&mut self, new: Vec<Instruction>, step: usize) {
        self.items.extend(new);
        self.generation_events += 1;
        self.activate_next(step);
    }

    fn activate_next(&mut self, step: usize) {
        if self.halted || self.active().is_some() {
            return;
        }
        if let Some(next) = self.items.iter_mut().find(|i| i.status == Status::Pending) {
            next.activate(step);
        }
    }

    /// Generate the initial instructions at most once per episode.
    pub fn generate_initial(&mut self, obs: &str, has_navigation: bool, step: usize) -> Result<usize, InstrError> {
        if self.initial_generated {
            return Ok(0);
        }
        let new = gen_initial(obs, has_navigation)?;
        self.initial_generated = true;
        let n = new.len();
        self.enqueue(new, step);
        Ok(n)
    }

    /// Generate the recipe instruction at most once per episode.
    pub fn generate_recipe(&mut self, cookbook_obs: &str, vocab: &Vocabulary, step: usize) -> Result<usize, InstrError> {
        if self.recipe_generated {
            return Ok(0);
        }
        let new = gen_recipe(cookbook_obs, vocab)?;
        self.recipe_generated = true;
        self.enqueue(vec![new], step);
        Ok(1)
    }

    /// Run whichever generator the observation triggers. Observations that
    /// trigger nothing, or that repeat an earlier trigger, are ignored.
    pub fn observe(&mut self, obs: &str, has_navigation: bool, vocab: &Vocabulary, step: usize) -> usize {
        let mut added = 0;
        if !self.initial_generated && obs.to_lowercase().contains(COOKBOOK_DIRECTIVE) {
            added += self.generate_initial(obs, has_navigation, step).unwrap_or(0);
        }
        if !self.recipe_generated && is_cookbook_reading(obs) {
            added += self.generate_recipe(obs, vocab, step).unwrap_or(0);
        }
        added
    }

    /// Progress the active instruction by the assignment observed at `step`.
    /// When it is satisfied, its successor becomes active at the same step
    /// and is progressed by the same assignment.
    pub fn advance(&mut self, sigma: &TruthAssignment, step: usize) -> Event {
        let mut event = Event::None;
        while let Some(idx) = self.items.iter().position(|i| i.status == Status::Active) {
            let item = &mut self.items[idx];
            if item.activation_step.is_some_and(|s| s > step) {
                break;
            }
            match progress(sigma, &item.current) {
                Formula::True => {
                    item.current = Formula::True;
                    item.status = Status::Satisfied;
                    event = Event::Satisfied;
                    self.activate_next(step);
                }
                Formula::False => {
                    item.current = Formula::False;
                    item.status = Status::Violated;
                    self.halted = true;
                    return Event::Violated;
                }
                residual => {
                    item.current = residual;
                    break;
                }
            }
        }
        event
    }

    /// Rendering of the active instruction's progressed formula, or `""`.
    pub fn active_text(&self, mode: RenderMode) -> String {
        self.active()
            .and_then(|i| render(&i.current, mode).ok())
            .unwrap_or_default()
    }

    /// Rendering of the active instruction as generated, ignoring progression.
    pub fn active_generated_text(&self, mode: RenderMode) -> String {
        self.active()
            .and_then(|i| render(&i.formula, mode).ok())
            .unwrap_or_default()
    }
}

/// One translator regression record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub observation: String,
    pub navigation: bool,
    pub expected: Vec<String>,
}

/// Read line-delimited golden records, skipping blank lines.
pub fn load_golden(path: &Path) -> Result<Vec<GoldenRecord>, InstrError> {
    let text = fs::read_to_string(path).map_err(|e| InstrError::Golden(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| InstrError::Golden(format!("line {}: {e}", n + 1))))
        .collect()
}

/// Run the translator on a golden record and render what it generates.
pub fn translate_record(record: &GoldenRecord, vocab: &Vocabulary) -> Result<Vec<String>, InstrError> {
    let instructions = if is_cookbook_reading(&record.observation) {
        vec![gen_recipe(&record.observation, vocab)?]
    } else {
        gen_initial(&record.observation, record.navigation)?
    };
    instructions
        .iter()
        .map(|i| render(&i.formula, RenderMode::SingleToken).map_err(InstrError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEVEL1_COOKBOOK: &str = "You open the copy of \"Cooking : a modern approach (3rd ed.)\" and start reading: recipe #1 --------- Gather all following ingredients and follow the directions to prepare this tasty meal. Ingredients: red potato: directions: chop the red potato, prepare meal";
    const LEVEL2_COOKBOOK: &str = "You open the copy of \"Cooking : a modern approach (3rd ed.)\" and start reading: recipe #1 --------- Gather all following ingredients and follow the directions to prepare this tasty meal. Ingredients: red potato: directions: chop the red potato, fry the red potato, prepare meal";
    const OPENING: &str = "You are hungry! Let's cook a delicious meal. Check the cookbook in the kitchen for the recipe. Once done, enjoy your meal!";

    fn sig(props: &[&str]) -> TruthAssignment {
        props.iter().copied().collect()
    }

    fn text(i: &Instruction) -> String {
        render(&i.formula, RenderMode::SingleToken).unwrap()
    }

    #[test]
    fn initial_with_and_without_navigation() {
        let nav = gen_initial(OPENING, true).unwrap();
        assert_eq!(nav.iter().map(text).collect::<Vec<_>>(), ["eventually player_at_kitchen", "next cookbook_is_examined"]);
        let plain = gen_initial(OPENING, false).unwrap();
        assert_eq!(plain.iter().map(text).collect::<Vec<_>>(), ["next cookbook_is_examined"]);
        assert_eq!(gen_initial("You are hungry! -= Kitchen =-", false), Err(InstrError::MissingDirective));
    }

    #[test]
    fn recipe_levels_one_and_two() {
        let v = Vocabulary::cooking();
        assert_eq!(
            text(&gen_recipe(LEVEL1_COOKBOOK, &v).unwrap()),
            "eventually red_potato_in_player and eventually red_potato_is_chopped and eventually meal_in_player and eventually meal_is_consumed"
        );
        assert_eq!(
            text(&gen_recipe(LEVEL2_COOKBOOK, &v).unwrap()),
            "eventually red_potato_in_player and eventually red_potato_is_chopped and eventually red_potato_is_fried and eventually meal_in_player and eventually meal_is_consumed"
        );
    }

    #[test]
    fn recipe_requires_sections() {
        let v = Vocabulary::cooking();
        let err = gen_recipe("ingredients : carrot , prepare meal", &v).unwrap_err();
        assert!(matches!(err, InstrError::Recipe(_)));
        assert!(matches!(gen_recipe("directions : prepare meal", &v), Err(InstrError::Recipe(_))));
    }

    #[test]
    fn flattened_recipe_uses_vocabulary() {
        let v = Vocabulary::cooking();
        let obs = "recipe # 1 --------- gather all following ingredients and follow the directions to prepare this tasty meal . ingredients : purple potato red onion salt directions : dice the purple potato roast the purple potato dice the red onion fry the red onion prepare meal";
        let r = parse_recipe(obs, &v).unwrap();
        assert_eq!(r.ingredients, ["purple_potato", "red_onion", "salt"]);
        assert_eq!(
            r.directions,
            [
                ("purple_potato".to_string(), "diced".to_string()),
                ("purple_potato".to_string(), "roasted".to_string()),
                ("red_onion".to_string(), "diced".to_string()),
                ("red_onion".to_string(), "fried".to_string()),
            ]
        );
        assert!(r.prepare_meal);
    }

    #[test]
    fn advance_next_then_satisfy() {
        let mut q = InstructionQueue::new();
        let v = Vocabulary::cooking();
        q.generate_initial(OPENING, false, 0).unwrap();
        assert_eq!(q.advance(&sig(&["anything"]), 0), Event::None);
        assert_eq!(q.active_text(RenderMode::SingleToken), "cookbook_is_examined");
        q.observe(LEVEL1_COOKBOOK, false, &v, 1);
        assert_eq!(q.advance(&sig(&["cookbook_is_examined"]), 1), Event::Satisfied);
        let recipe = q.active().unwrap();
        assert_eq!(recipe.origin, Origin::Recipe);
        assert_eq!(recipe.activation_step, Some(1));
        assert_eq!(q.generation_events(), 2);
    }

    #[test]
    fn advance_next_then_violate() {
        let mut q = InstructionQueue::new();
        q.generate_initial(OPENING, false, 0).unwrap();
        q.advance(&sig(&[]), 0);
        assert_eq!(q.advance(&sig(&[]), 1), Event::Violated);
        assert!(q.active().is_none());
        assert!(q.is_halted());
        assert_eq!(q.active_text(RenderMode::SingleToken), "");
        assert_eq!(q.advance(&sig(&["cookbook_is_examined"]), 2), Event::None);
    }

    #[test]
    fn successor_clock_starts_at_handover() {
        let mut q = InstructionQueue::new();
        q.generate_initial(OPENING, true, 0).unwrap();
        assert_eq!(q.advance(&sig(&[]), 0), Event::None);
        assert_eq!(q.advance(&sig(&["player_at_kitchen"]), 1), Event::Satisfied);
        let next = q.active().unwrap();
        assert_eq!(next.origin, Origin::InitialCookbook);
        assert_eq!(next.activation_step, Some(1));
        assert_eq!(next.current, Formula::atom("cookbook_is_examined"));
        let mut late = q.clone();
        assert_eq!(q.advance(&sig(&["cookbook_is_examined"]), 2), Event::Satisfied);
        assert_eq!(late.advance(&sig(&["player_at_kitchen"]), 2), Event::Violated);
    }

    #[test]
    fn handover_feeds_the_same_assignment() {
        let v = Vocabulary::cooking();
        let mut q = InstructionQueue::new();
        q.generate_initial(OPENING, false, 0).unwrap();
        q.advance(&sig(&[]), 0);
        q.observe(LEVEL1_COOKBOOK, false, &v, 1);
        let held = sig(&["cookbook_is_examined", "red_potato_in_player"]);
        assert_eq!(q.advance(&held, 1), Event::Satisfied);
        assert!(!q.active_text(RenderMode::SingleToken).contains("red_potato_in_player"));
    }

    #[test]
    fn active_text_shrinks_with_progress() {
        let mut q = InstructionQueue::new();
        let f = Formula::and(Formula::eventually(Formula::atom("p")), Formula::eventually(Formula::atom("q")));
        q.enqueue(vec![Instruction::pending(f, Origin::Recipe)], 0);
        assert_eq!(q.active_text(RenderMode::SingleToken), "eventually p and eventually q");
        q.advance(&sig(&["p"]), 0);
        assert_eq!(q.active_text(RenderMode::SingleToken), "eventually q");
        assert_eq!(q.active_generated_text(RenderMode::SingleToken), "eventually p and eventually q");
        assert_eq!(InstructionQueue::new().active_text(RenderMode::SingleToken), "");
    }

    #[test]
    fn repeated_observations_do_not_regenerate() {
        let v = Vocabulary::cooking();
        let mut q = InstructionQueue::new();
        assert_eq!(q.observe(OPENING, false, &v, 0), 1);
        assert_eq!(q.observe(OPENING, false, &v, 1), 0);
        assert_eq!(q.observe(LEVEL2_COOKBOOK, false, &v, 2), 1);
        assert_eq!(q.observe(LEVEL2_COOKBOOK, false, &v, 3), 0);
        assert_eq!(q.generation_events(), 2);
        assert_eq!(q.items().len(), 2);
    }
}
