//! LTL instruction following for choice-based cooking text games.
//!
//! - [`ltl`]: formulas, text grammar, finite-trace evaluation, progression.
//! - [`vocab`]: proposition vocabulary and the belief-to-assignment labelling.
//! - [`instr`]: instruction generation from observations and the queue.
//! - [`shaping`]: instruction-aware reward and termination.
//! - [`world`]: the seeded cooking game.
//! - [`agent`]: hashed-feature double Q-learning agent with prioritized replay.
//! - [`harness`]: episodes, training runs, evaluation and reports.
//! - [`translate`]: natural-language to LTL translation with a completion service.

pub mod agent;
pub mod harness;
pub mod instr;
pub mod ltl;
pub mod shaping;
pub mod translate;
pub mod vocab;
pub mod world;
