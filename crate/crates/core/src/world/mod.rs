//! A seeded, choice-based cooking game.
//!
//! Levels 0 to 3 differ in recipe preparation requirements and in whether
//! the player has to find the kitchen first. Each step returns an observation
//! text, the sorted list of candidate actions, the base reward, and the
//! ground-truth belief as triplets.

mod game;
mod generate;
mod gameset;
mod scripted;
mod text;

use serde::{Deserialize, Serialize};

pub use game::{Game, GameState};
pub use gameset::{build_game_sets, load_game_set, write_game_set, GameSetCounts, GameSetRecord, GameSets, MapSummary, Split};
pub use generate::generate_game;
pub use scripted::scripted_optimal;

use crate::vocab::BeliefState;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("invalid level {0}; expected 0..=3")]
    InvalidLevel(u8),
    #[error("action index {index} out of range ({len} candidates)")]
    ActionOutOfRange { index: usize, len: usize },
    #[error("unknown action '{0}'")]
    UnknownAction(String),
    #[error("game is over")]
    GameOver,
    #[error("game set: {0}")]
    GameSet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutState {
    Chopped,
    Diced,
    Sliced,
}

impl CutState {
    pub const ALL: [CutState; 3] = [CutState::Chopped, CutState::Diced, CutState::Sliced];

    pub fn verb(self) -> &'static str {
        match self {
            CutState::Chopped => "chop",
            CutState::Diced => "dice",
            CutState::Sliced => "slice",
        }
    }

    pub fn adjective(self) -> &'static str {
        match self {
            CutState::Chopped => "chopped",
            CutState::Diced => "diced",
            CutState::Sliced => "sliced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CookState {
    Fried,
    Roasted,
    Grilled,
}

impl CookState {
    pub const ALL: [CookState; 3] = [CookState::Fried, CookState::Roasted, CookState::Grilled];

    pub fn verb(self) -> &'static str {
        match self {
            CookState::Fried => "fry",
            CookState::Roasted => "roast",
            CookState::Grilled => "grill",
        }
    }

    pub fn adjective(self) -> &'static str {
        match self {
            CookState::Fried => "fried",
            CookState::Roasted => "roasted",
            CookState::Grilled => "grilled",
        }
    }

    pub fn appliance(self) -> &'static str {
        match self {
            CookState::Fried => "stove",
            CookState::Roasted => "oven",
            CookState::Grilled => "BBQ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RecipeItem {
    pub ingredient: String,
    pub cut: Option<CutState>,
    pub cook: Option<CookState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    pub fn name(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FurnitureKind {
    Surface,
    /// Closed at the start; items inside are hidden until opened.
    Container,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Furniture {
    pub name: String,
    pub kind: FurnitureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exit {
    pub direction: Direction,
    pub to: usize,
    pub door: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Room {
    pub name: String,
    pub furniture: Vec<Furniture>,
    /// Appliances by the cooking state they produce.
    pub appliances: Vec<CookState>,
    pub exits: Vec<Exit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Ingredient,
    Knife,
    Cookbook,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItemPlacement {
    pub name: String,
    pub kind: ItemKind,
    pub room: usize,
    pub furniture: usize,
}

/// A generated game: everything needed to replay it from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameSpec {
    pub level: u8,
    pub seed: u64,
    pub recipe: Vec<RecipeItem>,
    pub rooms: Vec<Room>,
    pub doors: Vec<String>,
    pub kitchen: usize,
    pub start_room: usize,
    pub items: Vec<ItemPlacement>,
    pub max_score: u32,
}

impl GameSpec {
    pub fn has_navigation(&self) -> bool {
        self.rooms.len() > 1
    }

    pub fn needs_knife(&self) -> bool {
        self.recipe.iter().any(|r| r.cut.is_some())
    }

    pub fn recipe_item(&self, ingredient: &str) -> Option<&RecipeItem> {
        self.recipe.iter().find(|r| r.ingredient == ingredient)
    }

    pub fn item_index(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|i| i.name == name)
    }
}

/// How observations are presented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Normal,
    /// Cookbook directive, recipe text and knife hint are removed.
    Stripped,
    /// The cookbook is read as a mandatory first step.
    ForcedCookbook,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub text: String,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    /// 0 or 1.
    pub base_reward: f64,
    pub done: bool,
    pub success: bool,
    pub belief: BeliefState,
}
