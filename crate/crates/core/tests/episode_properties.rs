use std::sync::Arc;

use cookltl::harness::{evaluate_random, evaluate_scripted, Episode, Metrics, RunFlags};
use cookltl::instr::Event;
use cookltl::vocab::Vocabulary;
use cookltl::world::{build_game_sets, generate_game, scripted_optimal, Game, GameSetCounts, Mode};
use proptest::prelude::*;

#[test]
fn scripted_play_never_violates_the_recipe() {
    let vocab = Arc::new(Vocabulary::cooking());
    for level in 0..4u8 {
        for seed in 0..40u64 {
            let spec = Arc::new(generate_game(level, seed).unwrap());
            let plan = scripted_optimal(&spec);
            let mut ep = Episode::new(spec, RunFlags::default(), 100, vocab.clone());
            for action in &plan {
                let i = ep.candidates().iter().position(|c| c == action).unwrap();
                let out = ep.step(i).unwrap();
                assert_ne!(out.event, Event::Violated, "level {level} seed {seed}: {action}");
                assert!(out.bonus >= 0);
            }
            let o = ep.outcome();
            assert!(o.success && o.normalized_points == 1.0, "level {level} seed {seed}");
            assert!(ep.queue().active().is_none(), "level {level} seed {seed}: {:?}", ep.queue().items());
        }
    }
}

#[test]
fn scripted_evaluation_is_perfect_with_and_without_forcing() {
    for level in 0..4u8 {
        let specs: Vec<_> = (100..110).map(|s| Arc::new(generate_game(level, s).unwrap())).collect();
        for force_cookbook in [false, true] {
            let flags = RunFlags { force_cookbook, ..RunFlags::default() };
            let m = Metrics::from_outcomes(&evaluate_scripted(&specs, flags, 100).unwrap());
            assert_eq!((m.normalized_points, m.success_rate), (1.0, 1.0), "level {level} forced {force_cookbook}");
        }
    }
}

#[test]
fn random_policy_rarely_succeeds_on_level_two() {
    let sets = build_game_sets(2, GameSetCounts { train: 20, valid: 20, test: 20 }, 2024).unwrap();
    let specs: Vec<_> = sets.test.into_iter().map(Arc::new).collect();
    let m = Metrics::from_outcomes(&evaluate_random(&specs, RunFlags::default(), 100, 7).unwrap());
    assert_eq!(m.games, 20);
    assert!(m.success_rate < 0.05, "{m:?}");
}

#[test]
fn stripped_run_never_generates_or_rewards_instructions() {
    let flags = RunFlags {
        strip_instructions: true,
        ..RunFlags::default()
    };
    let vocab = Arc::new(Vocabulary::cooking());
    for level in 0..4u8 {
        for seed in 0..10u64 {
            let spec = Arc::new(generate_game(level, seed).unwrap());
            let plan = scripted_optimal(&spec);
            let mut ep = Episode::new(spec, flags, 100, vocab.clone());
            for action in &plan {
                let i = ep.candidates().iter().position(|c| c == action).unwrap();
                let out = ep.step(i).unwrap();
                assert_eq!(out.bonus, 0);
                assert_eq!(out.generated, 0);
            }
            assert_eq!(ep.queue().generation_events(), 0);
            assert!(ep.outcome().success);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stripping_leaves_dynamics_unchanged(
        level in 0u8..4,
        seed in 0u64..1000,
        picks in prop::collection::vec(0usize..64, 1..60),
    ) {
        let spec = Arc::new(generate_game(level, seed).unwrap());
        let (mut normal, _) = Game::reset(spec.clone(), Mode::Normal);
        let (mut stripped, _) = Game::reset(spec, Mode::Stripped);
        for p in picks {
            prop_assert_eq!(normal.candidates(), stripped.candidates());
            if normal.state().done() {
                break;
            }
            let action = normal.candidates()[p % normal.candidates().len()].clone();
            let a = normal.step_text(&action).unwrap();
            let b = stripped.step_text(&action).unwrap();
            prop_assert_eq!(a.base_reward, b.base_reward);
            prop_assert_eq!((a.done, a.success), (b.done, b.success));
            prop_assert_eq!(a.belief, b.belief);
        }
        prop_assert_eq!(normal.state().score(), stripped.state().score());
    }

    #[test]
    fn violation_terminates_when_enabled(
        level in 0u8..4,
        seed in 0u64..1000,
        termination in any::<bool>(),
        picks in prop::collection::vec(0usize..64, 1..60),
    ) {
        let flags = RunFlags { ltl_termination: termination, ..RunFlags::default() };
        let mut ep = Episode::new(Arc::new(generate_game(level, seed).unwrap()), flags, 100, Arc::new(Vocabulary::cooking()));
        for p in picks {
            if ep.is_terminal() {
                break;
            }
            let out = ep.step(p % ep.candidates().len()).unwrap();
            if out.event == Event::Violated {
                prop_assert_eq!(out.bonus, -1);
                prop_assert_eq!(out.terminal, termination || ep.game().state().done());
            }
        }
    }
}
