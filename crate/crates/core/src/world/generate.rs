use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    CookState, CutState, Direction, Exit, Furniture, FurnitureKind, GameSpec, ItemKind, ItemPlacement, RecipeItem,
    Room, WorldError,
};

/// Ingredients that can be cut and cooked.
pub(crate) const INGREDIENTS: &[&str] = &[
    "banana",
    "carrot",
    "chicken breast",
    "orange bell pepper",
    "pork chop",
    "purple potato",
    "red apple",
    "red hot pepper",
    "red onion",
    "red potato",
    "white onion",
    "yellow bell pepper",
    "yellow potato",
];

const OTHER_ROOMS: &[&str] = &[
    "backyard",
    "bathroom",
    "bedroom",
    "cellar",
    "corridor",
    "driveway",
    "garden",
    "laundry room",
    "living room",
    "pantry",
    "shed",
    "study",
];

const ROOM_SURFACES: &[&str] = &["bench", "dresser", "patio table", "shelf", "sofa", "workbench"];

const DOORS: &[&str] = &[
    "barn door",
    "commercial glass door",
    "fiberglass door",
    "frosted-glass door",
    "front door",
    "plain door",
    "screen door",
    "sliding door",
    "sliding patio door",
    "wooden door",
];

pub(crate) const COUNTER: usize = 1;
pub(crate) const TABLE: usize = 2;

const ROOM_COUNT_NAV: usize = 9;

fn kitchen_room(appliances: Vec<CookState>) -> Room {
    Room {
        name: "kitchen".to_string(),
        furniture: vec![
            Furniture {
                name: "fridge".into(),
                kind: FurnitureKind::Container,
            },
            Furniture {
                name: "counter".into(),
                kind: FurnitureKind::Surface,
            },
            Furniture {
                name: "table".into(),
                kind: FurnitureKind::Surface,
            },
        ],
        appliances,
        exits: Vec::new(),
    }
}

/// Deterministically generate a game for `(level, seed)`.
pub fn generate_game(level: u8, seed: u64) -> Result<GameSpec, WorldError> {
    if level > 3 {
        return Err(WorldError::InvalidLevel(level));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(level) + 1);

    let mut pool: Vec<&str> = INGREDIENTS.to_vec();
    pool.shuffle(&mut rng);
    let ingredient = pool[0].to_string();
    let distractor_count = rng.gen_range(1..=2);
    let distractors: Vec<String> = pool[1..=distractor_count].iter().map(|s| s.to_string()).collect();

    let cut = (level == 1 || level == 2).then(|| *CutState::ALL.choose(&mut rng).unwrap());
    let cook = (level == 2).then(|| *CookState::ALL.choose(&mut rng).unwrap());
    let recipe = vec![RecipeItem {
        ingredient: ingredient.clone(),
        cut,
        cook,
    }];

    let appliances = if level == 2 { CookState::ALL.to_vec() } else { Vec::new() };
    let (rooms, doors, kitchen, start_room) = if level == 3 {
        build_map(&mut rng)
    } else {
        (vec![kitchen_room(appliances)], Vec::new(), 0, 0)
    };

    let mut items = vec![ItemPlacement {
        name: "cookbook".into(),
        kind: ItemKind::Cookbook,
        room: kitchen,
        furniture: COUNTER,
    }];
    if cut.is_some() {
        items.push(ItemPlacement {
            name: "knife".into(),
            kind: ItemKind::Knife,
            room: kitchen,
            furniture: *[COUNTER, TABLE].choose(&mut rng).unwrap(),
        });
    }
    for name in std::iter::once(&ingredient).chain(distractors.iter()) {
        let room = if level == 3 { rng.gen_range(0..rooms.len()) } else { kitchen };
        let furniture = rng.gen_range(0..rooms[room].furniture.len());
        items.push(ItemPlacement {
            name: name.clone(),
            kind: ItemKind::Ingredient,
            room,
            furniture,
        });
    }

    let max_score = recipe
        .iter()
        .map(|r| 1 + u32::from(r.cut.is_some()) + u32::from(r.cook.is_some()))
        .sum::<u32>()
        + 2;

    Ok(GameSpec {
        level,
        seed,
        recipe,
        rooms,
        doors,
        kitchen,
        start_room,
        items,
        max_score,
    })
}

/// Grow a connected 9-room map on a grid, add a few loops, and put closed
/// doors on some connections.
fn build_map(rng: &mut ChaCha8Rng) -> (Vec<Room>, Vec<String>, usize, usize) {
    let mut names: Vec<&str> = OTHER_ROOMS.to_vec();
    names.shuffle(rng);
    let mut room_names: Vec<String> = names[..ROOM_COUNT_NAV - 1].iter().map(|s| s.to_string()).collect();
    let kitchen = rng.gen_range(0..ROOM_COUNT_NAV);
    room_names.insert(kitchen, "kitchen".to_string());

    let mut cells: Vec<(i32, i32)> = vec![(0, 0)];
    let mut by_cell: BTreeMap<(i32, i32), usize> = BTreeMap::from([((0, 0), 0)]);
    let mut edges: Vec<(usize, usize, Direction)> = Vec::new();
    while cells.len() < ROOM_COUNT_NAV {
        let from = rng.gen_range(0..cells.len());
        let dir = *Direction::ALL.choose(rng).unwrap();
        let (dx, dy) = dir.delta();
        let cell = (cells[from].0 + dx, cells[from].1 + dy);
        if by_cell.contains_key(&cell) {
            continue;
        }
        let idx = cells.len();
        cells.push(cell);
        by_cell.insert(cell, idx);
        edges.push((from, idx, dir));
    }
    // extra connections between grid neighbours
    for (a, &cell) in cells.iter().enumerate() {
        for dir in [Direction::East, Direction::South] {
            let (dx, dy) = dir.delta();
            if let Some(&b) = by_cell.get(&(cell.0 + dx, cell.1 + dy)) {
                let linked = edges.iter().any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a));
                if !linked && rng.gen_bool(0.2) {
                    edges.push((a, b, dir));
                }
            }
        }
    }

    let mut door_pool: Vec<&str> = DOORS.to_vec();
    door_pool.shuffle(rng);
    let mut doors = Vec::new();
    let mut rooms: Vec<Room> = room_names
        .iter()
        .map(|name| {
            if name == "kitchen" {
                kitchen_room(Vec::new())
            } else {
                Room {
                    name: name.clone(),
                    furniture: vec![Furniture {
                        name: (*ROOM_SURFACES.choose(rng).unwrap()).to_string(),
                        kind: FurnitureKind::Surface,
                    }],
                    appliances: Vec::new(),
                    exits: Vec::new(),
                }
            }
        })
        .collect();
    for (a, b, dir) in edges {
        let door = if doors.len() < door_pool.len() && rng.gen_bool(0.3) {
            doors.push(door_pool[doors.len()].to_string());
            Some(doors.len() - 1)
        } else {
            None
        };
        rooms[a].exits.push(Exit { direction: dir, to: b, door });
        rooms[b].exits.push(Exit {
            direction: dir.opposite(),
            to: a,
            door,
        });
    }
    for room in &mut rooms {
        room.exits.sort_by_key(|e| e.direction);
    }
    let mut start = rng.gen_range(0..ROOM_COUNT_NAV - 1);
    if start >= kitchen {
        start += 1;
    }
    (rooms, doors, kitchen, start)
}
