use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{generate_game, GameSpec, RecipeItem, WorldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Split::Train => 1,
            Split::Valid => 2,
            Split::Test => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSetCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

impl Default for GameSetCounts {
    fn default() -> Self {
        GameSetCounts {
            train: 20,
            valid: 20,
            test: 20,
        }
    }
}

impl GameSetCounts {
    fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Valid => self.valid,
            Split::Test => self.test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSummary {
    pub rooms: Vec<String>,
    pub kitchen: String,
    pub start: String,
    pub doors: usize,
}

/// One line of a game-set file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSetRecord {
    pub split: Split,
    pub index: usize,
    pub level: u8,
    pub seed: u64,
    pub recipe: Vec<RecipeItem>,
    pub map: MapSummary,
    pub max_score: u32,
}

impl GameSetRecord {
    pub fn from_spec(split: Split, index: usize, spec: &GameSpec) -> Self {
        GameSetRecord {
            split,
            index,
            level: spec.level,
            seed: spec.seed,
            recipe: spec.recipe.clone(),
            map: MapSummary {
                rooms: spec.rooms.iter().map(|r| r.name.clone()).collect(),
                kitchen: spec.rooms[spec.kitchen].name.clone(),
                start: spec.rooms[spec.start_room].name.clone(),
                doors: spec.doors.len(),
            },
            max_score: spec.max_score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSets {
    pub level: u8,
    pub train: Vec<GameSpec>,
    pub valid: Vec<GameSpec>,
    pub test: Vec<GameSpec>,
}

impl GameSets {
    pub fn split(&self, split: Split) -> &[GameSpec] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }
}

/// The game with its seed cleared, so equal content compares equal.
fn fingerprint(spec: &GameSpec) -> GameSpec {
    GameSpec { seed: 0, ..spec.clone() }
}

/// Deterministic, pairwise distinct train/valid/test games.
///
/// Each split draws seeds from its own stream, and test and valid are drawn
/// before train, so changing the train count leaves valid and test unchanged.
pub fn build_game_sets(level: u8, counts: GameSetCounts, master_seed: u64) -> Result<GameSets, WorldError> {
    if level > 3 {
        return Err(WorldError::InvalidLevel(level));
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out: Vec<Vec<GameSpec>> = Vec::new();
    for split in [Split::Test, Split::Valid, Split::Train] {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(split.stream());
        let want = counts.get(split);
        let mut specs = Vec::with_capacity(want);
        let mut attempts = 0usize;
        while specs.len() < want {
            attempts += 1;
            if attempts > want * 1000 + 10_000 {
                return Err(WorldError::GameSet(format!(
                    "could not find {want} distinct {} games for level {level}",
                    split.name()
                )));
            }
            let spec = generate_game(level, rng.gen::<u32>() as u64)?;
            let key = serde_json::to_string(&fingerprint(&spec)).expect("spec serializes");
            if seen.insert(key) {
                specs.push(spec);
            }
        }
        out.push(specs);
    }
    let train = out.pop().unwrap_or_default();
    let valid = out.pop().unwrap_or_default();
    let test = out.pop().unwrap_or_default();
    Ok(GameSets { level, train, valid, test })
}

fn split_path(out_dir: &Path, level: u8, split: Split) -> PathBuf {
    out_dir.join(format!("level{level}")).join(format!("{}.jsonl", split.name()))
}

/// Write `out_dir/level{L}/{train,valid,test}.jsonl` and return the paths.
pub fn write_game_set(sets: &GameSets, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for split in Split::ALL {
        let path = split_path(out_dir, sets.level, split);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut buf = Vec::new();
        for (i, spec) in sets.split(split).iter().enumerate() {
            let rec = GameSetRecord::from_spec(split, i, spec);
            serde_json::to_writer(&mut buf, &rec)?;
            buf.push(b'\n');
        }
        fs::File::create(&path)?.write_all(&buf)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Read a game-set file and regenerate each game from its seed, checking
/// that the regenerated game matches the stored record.
pub fn load_game_set(path: &Path) -> Result<Vec<GameSpec>, WorldError> {
    let text = fs::read_to_string(path).map_err(|e| WorldError::GameSet(format!("{}: {e}", path.display())))?;
    let mut specs = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: GameSetRecord = serde_json::from_str(line)
            .map_err(|e| WorldError::GameSet(format!("{}:{}: {e}", path.display(), n + 1)))?;
        let spec = generate_game(rec.level, rec.seed)?;
        if GameSetRecord::from_spec(rec.split, rec.index, &spec) != rec {
            return Err(WorldError::GameSet(format!(
                "{}:{}: record does not match regenerated game",
                path.display(),
                n + 1
            )));
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(WorldError::GameSet(format!("{}: empty game set", path.display())));
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn distinct(sets: &GameSets) -> usize {
        let all: BTreeSet<String> = Split::ALL
            .iter()
            .flat_map(|&s| sets.split(s).iter())
            .map(|s| serde_json::to_string(&fingerprint(s)).unwrap())
            .collect();
        all.len()
    }

    #[test]
    fn default_and_large_train_sets() {
        let a = build_game_sets(1, GameSetCounts::default(), 42).unwrap();
        assert_eq!(distinct(&a), 60);
        let b = build_game_sets(1, GameSetCounts { train: 100, valid: 20, test: 20 }, 42).unwrap();
        assert_eq!(distinct(&b), 140);
        assert_eq!(a.valid, b.valid);
        assert_eq!(a.test, b.test);
    }

    #[test]
    fn files_are_stable_and_reload() {
        let sets = build_game_sets(3, GameSetCounts { train: 5, valid: 3, test: 3 }, 7).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let p1 = write_game_set(&sets, d1.path()).unwrap();
        let p2 = write_game_set(&build_game_sets(3, GameSetCounts { train: 5, valid: 3, test: 3 }, 7).unwrap(), d2.path()).unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
        }
        assert_eq!(load_game_set(&p1[0]).unwrap(), sets.train);
    }

    #[test]
    fn tampered_record_is_rejected() {
        let sets = build_game_sets(0, GameSetCounts { train: 2, valid: 1, test: 1 }, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_game_set(&sets, dir.path()).unwrap();
        let text = fs::read_to_string(&paths[0]).unwrap().replace("\"max_score\":3", "\"max_score\":4");
        fs::write(&paths[0], text).unwrap();
        assert!(matches!(load_game_set(&paths[0]), Err(WorldError::GameSet(_))));
    }
}
