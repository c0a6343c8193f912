//! Instruction-aware reward and episode termination.

use serde::{Deserialize, Serialize};

use crate::instr::Event;

/// Which parts of the instruction signal feed back into the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapingFlags {
    pub ltl_reward: bool,
    pub ltl_termination: bool,
}

impl Default for ShapingFlags {
    fn default() -> Self {
        ShapingFlags {
            ltl_reward: true,
            ltl_termination: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapedOutcome {
    pub reward: f64,
    pub terminal: bool,
    /// One of -1, 0, +1.
    pub bonus: i8,
}

pub fn shape(base_reward: f64, event: Event, env_terminal: bool, flags: ShapingFlags) -> ShapedOutcome {
    let bonus: i8 = match (event, flags.ltl_reward) {
        (Event::Satisfied, true) => 1,
        (Event::Violated, true) => -1,
        _ => 0,
    };
    ShapedOutcome {
        reward: base_reward + f64::from(bonus),
        terminal: env_terminal || (event == Event::Violated && flags.ltl_termination),
        bonus,
    }
}

/// Largest total bonus an episode can collect: one per instruction.
pub fn max_bonus(has_navigation: bool) -> u32 {
    if has_navigation {
        3
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: ShapingFlags = ShapingFlags {
        ltl_reward: true,
        ltl_termination: true,
    };

    #[test]
    fn cases() {
        let o = shape(1.0, Event::Satisfied, false, ALL);
        assert_eq!((o.reward, o.terminal, o.bonus), (2.0, false, 1));
        let o = shape(0.0, Event::Violated, false, ALL);
        assert_eq!((o.reward, o.terminal, o.bonus), (-1.0, true, -1));
        let o = shape(1.0, Event::None, true, ALL);
        assert_eq!((o.reward, o.terminal, o.bonus), (1.0, true, 0));
    }

    #[test]
    fn ablation_switches() {
        let x = ShapingFlags { ltl_reward: true, ltl_termination: false };
        let o = shape(0.0, Event::Violated, false, x);
        assert_eq!((o.reward, o.terminal), (-1.0, false));
        let b = ShapingFlags { ltl_reward: false, ltl_termination: true };
        let o = shape(0.0, Event::Violated, false, b);
        assert_eq!((o.reward, o.terminal, o.bonus), (0.0, true, 0));
        let bx = ShapingFlags { ltl_reward: false, ltl_termination: false };
        for ev in [Event::None, Event::Satisfied, Event::Violated] {
            for term in [false, true] {
                let o = shape(1.0, ev, term, bx);
                assert_eq!((o.reward, o.terminal), (1.0, term));
            }
        }
    }

    #[test]
    fn bonus_cap() {
        assert_eq!(max_bonus(false), 2);
        assert_eq!(max_bonus(true), 3);
    }
}
