use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::text::{capitalize, cookbook, join_list, opening, with_article, KNIFE_HINT};
use super::{
    CookState, CutState, FurnitureKind, GameSpec, ItemKind, Mode, Observation, StepResult, WorldError,
};
use crate::vocab::{BeliefState, Triplet};

/// Default cap on actions per episode.
pub const DEFAULT_STEP_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Location {
    Furniture { room: usize, furniture: usize },
    Floor(usize),
    Inventory,
    /// Went into the meal.
    Used,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
enum ScoreEvent {
    Take(usize),
    Cut(usize),
    Cook(usize),
    Prepare,
    Eat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ItemState {
    location: Location,
    cut: Option<CutState>,
    cook: Option<CookState>,
}

/// Mutable ground truth of one episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    player_room: usize,
    items: Vec<ItemState>,
    /// Open flag per (room, furniture) for containers.
    open_containers: BTreeSet<(usize, usize)>,
    open_doors: BTreeSet<usize>,
    /// Pickup order of inventory items.
    inventory: Vec<usize>,
    cookbook_examined: bool,
    meal_in_inventory: bool,
    meal_prepared: bool,
    meal_consumed: bool,
    ruined: Option<usize>,
    earned: BTreeSet<ScoreEvent>,
    score: u32,
    steps: usize,
    step_cap: usize,
    done: bool,
    success: bool,
}

impl GameState {
    pub fn score(&self) -> u32 {
        self.score
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn success(&self) -> bool {
        self.success
    }

    pub fn cookbook_examined(&self) -> bool {
        self.cookbook_examined
    }

    pub fn player_room(&self) -> usize {
        self.player_room
    }
}

/// A running game: immutable spec plus episode state.
#[derive(Debug, Clone)]
pub struct Game {
    spec: Arc<GameSpec>,
    mode: Mode,
    state: GameState,
    candidates: Vec<String>,
}

impl Game {
    /// Start an episode. Returns the game and the first step result.
    pub fn reset(spec: Arc<GameSpec>, mode: Mode) -> (Game, StepResult) {
        Self::reset_with_cap(spec, mode, DEFAULT_STEP_CAP)
    }

    pub fn reset_with_cap(spec: Arc<GameSpec>, mode: Mode, step_cap: usize) -> (Game, StepResult) {
        let items = spec
            .items
            .iter()
            .map(|p| ItemState {
                location: Location::Furniture {
                    room: p.room,
                    furniture: p.furniture,
                },
                cut: None,
                cook: None,
            })
            .collect();
        let state = GameState {
            player_room: spec.start_room,
            items,
            open_containers: BTreeSet::new(),
            open_doors: BTreeSet::new(),
            inventory: Vec::new(),
            cookbook_examined: false,
            meal_in_inventory: false,
            meal_prepared: false,
            meal_consumed: false,
            ruined: None,
            earned: BTreeSet::new(),
            score: 0,
            steps: 0,
            step_cap,
            done: false,
            success: false,
        };
        let mut game = Game {
            spec,
            mode,
            state,
            candidates: Vec::new(),
        };
        let mut text = format!("{} {}", opening(mode), game.describe_room());
        if mode == Mode::ForcedCookbook && game.state.player_room == game.spec.kitchen {
            game.state.cookbook_examined = true;
            game.state.steps = 1;
            text.push_str("\n\n");
            text.push_str(&cookbook(&game.spec, mode));
        }
        game.candidates = game.compute_candidates();
        let result = game.result(text, 0.0);
        (game, result)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    /// Apply the candidate at `action_index`.
    pub fn step(&mut self, action_index: usize) -> Result<StepResult, WorldError> {
        if self.state.done {
            return Err(WorldError::GameOver);
        }
        let action = self
            .candidates
            .get(action_index)
            .cloned()
            .ok_or(WorldError::ActionOutOfRange {
                index: action_index,
                len: self.candidates.len(),
            })?;
        let (text, reward) = self.apply(&action);
        self.state.steps += 1;
        if !self.state.done && self.state.steps >= self.state.step_cap {
            self.state.done = true;
        }
        self.candidates = if self.state.done { Vec::new() } else { self.compute_candidates() };
        Ok(self.result(text, reward))
    }

    /// Apply the candidate whose text is `action`.
    pub fn step_text(&mut self, action: &str) -> Result<StepResult, WorldError> {
        let idx = self
            .candidates
            .iter()
            .position(|c| c == action)
            .ok_or_else(|| WorldError::UnknownAction(action.to_string()))?;
        self.step(idx)
    }

    fn result(&self, text: String, reward: f64) -> StepResult {
        StepResult {
            observation: Observation {
                text,
                candidates: self.candidates.clone(),
            },
            base_reward: reward,
            done: self.state.done,
            success: self.state.success,
            belief: self.oracle_belief(),
        }
    }

    fn room_name(&self, room: usize) -> &str {
        &self.spec.rooms[room].name
    }

    fn item_name(&self, idx: usize) -> &str {
        &self.spec.items[idx].name
    }

    fn has_knife(&self) -> bool {
        self.spec.items.iter().any(|i| i.kind == ItemKind::Knife)
    }

    fn holding_knife(&self) -> bool {
        self.state
            .inventory
            .iter()
            .any(|&i| self.spec.items[i].kind == ItemKind::Knife)
    }

    fn container_open(&self, room: usize, furniture: usize) -> bool {
        self.spec.rooms[room].furniture[furniture].kind == FurnitureKind::Surface
            || self.state.open_containers.contains(&(room, furniture))
    }

    /// Items that can be seen (and taken) in the player's room.
    fn visible_items(&self) -> Vec<usize> {
        let room = self.state.player_room;
        (0..self.spec.items.len())
            .filter(|&i| match self.state.items[i].location {
                Location::Furniture { room: r, furniture } => r == room && self.container_open(r, furniture),
                Location::Floor(r) => r == room,
                _ => false,
            })
            .collect()
    }

    fn items_on(&self, room: usize, furniture: usize) -> Vec<usize> {
        (0..self.spec.items.len())
            .filter(|&i| self.state.items[i].location == Location::Furniture { room, furniture })
            .collect()
    }

    fn describe_item(&self, idx: usize) -> String {
        let st = &self.state.items[idx];
        let mut adj = Vec::new();
        if let Some(c) = st.cut {
            adj.push(c.adjective());
        }
        if let Some(c) = st.cook {
            adj.push(c.adjective());
        }
        if self.spec.items[idx].kind == ItemKind::Ingredient && adj.is_empty() {
            adj.push("raw");
        }
        if adj.is_empty() {
            with_article(self.item_name(idx))
        } else {
            let phrase = format!("{} {}", adj.join(" "), self.item_name(idx));
            with_article(&phrase)
        }
    }

    fn describe_room(&self) -> String {
        let room_idx = self.state.player_room;
        let room = &self.spec.rooms[room_idx];
        let mut parts = vec![format!(
            "-= {} =- You find yourself in {}.",
            capitalize(&room.name),
            with_article(&room.name)
        )];
        for (f, furn) in room.furniture.iter().enumerate() {
            let on: Vec<String> = self.items_on(room_idx, f).into_iter().map(|i| self.describe_item(i)).collect();
            match furn.kind {
                FurnitureKind::Container if !self.state.open_containers.contains(&(room_idx, f)) => {
                    parts.push(format!("You can make out a closed {}.", furn.name));
                }
                FurnitureKind::Container if on.is_empty() => {
                    parts.push(format!("You see an open {}. The {} is empty.", furn.name, furn.name));
                }
                FurnitureKind::Container => {
                    parts.push(format!("You see an open {}. In the {} you see {}.", furn.name, furn.name, join_list(&on)));
                }
                FurnitureKind::Surface if on.is_empty() => {
                    parts.push(format!("You see {}, but the thing is empty.", with_article(&furn.name)));
                }
                FurnitureKind::Surface => {
                    parts.push(format!("You see {}. On the {} you see {}.", with_article(&furn.name), furn.name, join_list(&on)));
                }
            }
        }
        for a in &room.appliances {
            parts.push(format!("You see {}.", with_article(a.appliance())));
        }
        let floor: Vec<String> = (0..self.spec.items.len())
            .filter(|&i| self.state.items[i].location == Location::Floor(room_idx))
            .map(|i| self.describe_item(i))
            .collect();
        if !floor.is_empty() {
            parts.push(format!("On the floor you see {}.", join_list(&floor)));
        }
        for exit in &room.exits {
            match exit.door {
                Some(d) => {
                    let state = if self.state.open_doors.contains(&d) { "an open" } else { "a closed" };
                    parts.push(format!("There is {} {} leading {}.", state, self.spec.doors[d], exit.direction.name()));
                }
                None => parts.push(format!("You can go {}.", exit.direction.name())),
            }
        }
        parts.join(" ")
    }

    fn compute_candidates(&self) -> Vec<String> {
        let room_idx = self.state.player_room;
        let room = &self.spec.rooms[room_idx];
        let mut out: BTreeSet<String> = BTreeSet::new();
        out.insert("look".into());
        out.insert("inventory".into());
        if self
            .spec
            .items
            .iter()
            .any(|i| i.kind == ItemKind::Cookbook && i.room == room_idx)
        {
            out.insert("examine cookbook".into());
        }
        for (f, furn) in room.furniture.iter().enumerate() {
            if furn.kind == FurnitureKind::Container {
                if self.state.open_containers.contains(&(room_idx, f)) {
                    out.insert(format!("close {}", furn.name));
                } else {
                    out.insert(format!("open {}", furn.name));
                }
            }
        }
        for exit in &room.exits {
            match exit.door {
                Some(d) if !self.state.open_doors.contains(&d) => {
                    out.insert(format!("open {}", self.spec.doors[d]));
                }
                _ => {
                    out.insert(format!("go {}", exit.direction.name()));
                }
            }
        }
        for i in self.visible_items() {
            if self.spec.items[i].kind != ItemKind::Cookbook {
                out.insert(format!("take {}", self.item_name(i)));
            }
        }
        let knife = self.has_knife();
        for &i in &self.state.inventory {
            let name = self.item_name(i);
            out.insert(format!("drop {name}"));
            if self.spec.items[i].kind != ItemKind::Ingredient {
                continue;
            }
            let st = &self.state.items[i];
            if knife && st.cut.is_none() {
                for c in CutState::ALL {
                    out.insert(format!("{} {name} with knife", c.verb()));
                }
            }
            if st.cook.is_none() {
                for c in &room.appliances {
                    out.insert(format!("{} {name} with {}", c.verb(), c.appliance()));
                }
            }
        }
        if room_idx == self.spec.kitchen && !self.state.meal_prepared {
            out.insert("prepare meal".into());
        }
        if self.state.meal_in_inventory {
            out.insert("eat meal".into());
        }
        out.into_iter().collect()
    }

    fn earn(&mut self, event: ScoreEvent) -> f64 {
        if self.state.earned.insert(event) {
            self.state.score += 1;
            1.0
        } else {
            0.0
        }
    }

    fn ruin(&mut self, item: usize, done_text: String) -> (String, f64) {
        self.state.ruined = Some(item);
        self.state.done = true;
        (
            format!("{done_text} That is not what the recipe calls for, the {} is ruined. *** You lost! ***", self.item_name(item)),
            0.0,
        )
    }

    fn find_item(&self, name: &str) -> Option<usize> {
        self.spec.item_index(name)
    }

    fn apply(&mut self, action: &str) -> (String, f64) {
        let room_idx = self.state.player_room;
        if action == "look" {
            return (self.describe_room(), 0.0);
        }
        if action == "inventory" {
            let mut held: Vec<String> = self.state.inventory.iter().map(|&i| self.describe_item(i)).collect();
            if self.state.meal_in_inventory {
                held.push("a meal".into());
            }
            return if held.is_empty() {
                ("You are carrying nothing.".into(), 0.0)
            } else {
                (format!("You are carrying: {}.", join_list(&held)), 0.0)
            };
        }
        if action == "examine cookbook" {
            self.state.cookbook_examined = true;
            return (cookbook(&self.spec, self.mode), 0.0);
        }
        if action == "prepare meal" {
            return self.prepare_meal();
        }
        if action == "eat meal" {
            self.state.meal_in_inventory = false;
            self.state.meal_consumed = true;
            self.state.done = true;
            self.state.success = true;
            let r = self.earn(ScoreEvent::Eat);
            return ("You eat the meal. Not bad. *** The End ***".into(), r);
        }
        if let Some(dir) = action.strip_prefix("go ") {
            let exit = self.spec.rooms[room_idx]
                .exits
                .iter()
                .find(|e| e.direction.name() == dir)
                .cloned();
            if let Some(exit) = exit {
                self.state.player_room = exit.to;
                return (self.describe_room(), 0.0);
            }
        }
        if let Some(target) = action.strip_prefix("open ") {
            if let Some(f) = self.spec.rooms[room_idx].furniture.iter().position(|f| f.name == target) {
                self.state.open_containers.insert((room_idx, f));
                let inside: Vec<String> = self.items_on(room_idx, f).into_iter().map(|i| self.describe_item(i)).collect();
                let text = if inside.is_empty() {
                    format!("You open the {target}. The {target} is empty.")
                } else {
                    format!("You open the {target}, revealing {}.", join_list(&inside))
                };
                return (text, 0.0);
            }
            if let Some(d) = self.spec.doors.iter().position(|d| d == target) {
                self.state.open_doors.insert(d);
                return (format!("You open the {target}."), 0.0);
            }
        }
        if let Some(target) = action.strip_prefix("close ") {
            if let Some(f) = self.spec.rooms[room_idx].furniture.iter().position(|f| f.name == target) {
                self.state.open_containers.remove(&(room_idx, f));
                return (format!("You close the {target}."), 0.0);
            }
        }
        if let Some(name) = action.strip_prefix("take ") {
            if let Some(i) = self.find_item(name) {
                let from = match self.state.items[i].location {
                    Location::Furniture { room, furniture } => format!(" from the {}", self.spec.rooms[room].furniture[furniture].name),
                    _ => " from the floor".to_string(),
                };
                self.state.items[i].location = Location::Inventory;
                self.state.inventory.push(i);
                let reward = if self.spec.recipe_item(name).is_some() {
                    self.earn(ScoreEvent::Take(i))
                } else {
                    0.0
                };
                return (format!("You take the {name}{from}."), reward);
            }
        }
        if let Some(name) = action.strip_prefix("drop ") {
            if let Some(i) = self.find_item(name) {
                self.state.items[i].location = Location::Floor(room_idx);
                self.state.inventory.retain(|&x| x != i);
                return (format!("You drop the {name}."), 0.0);
            }
        }
        if let Some((verb_part, tool)) = action.split_once(" with ") {
            if let Some((verb, name)) = verb_part.split_once(' ') {
                if let Some(i) = self.find_item(name) {
                    if tool == "knife" {
                        if let Some(cut) = CutState::ALL.into_iter().find(|c| c.verb() == verb) {
                            return self.cut(i, cut);
                        }
                    } else if let Some(cook) = CookState::ALL.into_iter().find(|c| c.verb() == verb && c.appliance() == tool) {
                        return self.cook(i, cook);
                    }
                }
            }
        }
        ("Nothing happens.".into(), 0.0)
    }

    fn cut(&mut self, item: usize, cut: CutState) -> (String, f64) {
        if !self.holding_knife() {
            return match self.mode {
                Mode::Stripped => ("You can't do that yet.".into(), 0.0),
                _ => (KNIFE_HINT.into(), 0.0),
            };
        }
        self.state.items[item].cut = Some(cut);
        let name = self.item_name(item).to_string();
        let text = format!("You {} the {name}.", cut.verb());
        match self.spec.recipe_item(&name).map(|r| r.cut) {
            Some(Some(want)) if want == cut => {
                let r = self.earn(ScoreEvent::Cut(item));
                (text, r)
            }
            Some(_) => self.ruin(item, text),
            None => (text, 0.0),
        }
    }

    fn cook(&mut self, item: usize, cook: CookState) -> (String, f64) {
        self.state.items[item].cook = Some(cook);
        let name = self.item_name(item).to_string();
        let text = format!("You {} the {name} with the {}.", cook.verb(), cook.appliance());
        match self.spec.recipe_item(&name).map(|r| r.cook) {
            Some(Some(want)) if want == cook => {
                let r = self.earn(ScoreEvent::Cook(item));
                (text, r)
            }
            Some(_) => self.ruin(item, text),
            None => (text, 0.0),
        }
    }

    fn prepare_meal(&mut self) -> (String, f64) {
        let mut used = Vec::new();
        for r in &self.spec.recipe {
            let Some(i) = self.spec.item_index(&r.ingredient) else {
                return ("You still miss something to prepare this meal.".into(), 0.0);
            };
            let st = &self.state.items[i];
            if st.location != Location::Inventory || st.cut != r.cut || st.cook != r.cook {
                return ("You still miss something to prepare this meal.".into(), 0.0);
            }
            used.push(i);
        }
        for &i in &used {
            self.state.items[i].location = Location::Used;
            self.state.inventory.retain(|&x| x != i);
        }
        self.state.meal_prepared = true;
        self.state.meal_in_inventory = true;
        let r = self.earn(ScoreEvent::Prepare);
        ("Adding the meal to your inventory.".into(), r)
    }

    /// Ground-truth triplets of the current state.
    pub fn oracle_belief(&self) -> BeliefState {
        let mut g = BeliefState::new();
        g.insert(Triplet::new("player", "at", self.room_name(self.state.player_room)));
        for (i, st) in self.state.items.iter().enumerate() {
            let name = self.item_name(i);
            match st.location {
                Location::Inventory => {
                    g.insert(Triplet::new(name, "in", "player"));
                }
                Location::Furniture { room, furniture } => {
                    let furn = &self.spec.rooms[room].furniture[furniture];
                    let rel = if furn.kind == FurnitureKind::Container { "in" } else { "on" };
                    g.insert(Triplet::new(name, rel, furn.name.as_str()));
                }
                Location::Floor(room) => {
                    g.insert(Triplet::new(name, "in", self.room_name(room)));
                }
                Location::Used => {}
            }
            if let Some(c) = st.cut {
                g.insert(Triplet::new(name, "is", c.adjective()));
            }
            if let Some(c) = st.cook {
                g.insert(Triplet::new(name, "is", c.adjective()));
            }
        }
        if self.state.cookbook_examined {
            g.insert(Triplet::new("cookbook", "is", "examined"));
        }
        if self.state.meal_in_inventory {
            g.insert(Triplet::new("meal", "in", "player"));
        }
        if self.state.meal_consumed {
            g.insert(Triplet::new("meal", "is", "consumed"));
        }
        if let Some(i) = self.state.ruined {
            g.insert(Triplet::new(self.item_name(i), "is", "ruined"));
        }
        for (r, room) in self.spec.rooms.iter().enumerate() {
            for (f, furn) in room.furniture.iter().enumerate() {
                if furn.kind == FurnitureKind::Container {
                    let s = if self.state.open_containers.contains(&(r, f)) { "open" } else { "closed" };
                    g.insert(Triplet::new(furn.name.as_str(), "is", s));
                }
            }
        }
        for (d, door) in self.spec.doors.iter().enumerate() {
            let s = if self.state.open_doors.contains(&d) { "open" } else { "closed" };
            g.insert(Triplet::new(door.as_str(), "is", s));
        }
        g
    }
}
