use std::path::PathBuf;

use cookltl::instr::{load_golden, translate_record, InstructionQueue};
use cookltl::ltl::RenderMode;
use cookltl::vocab::Vocabulary;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/generation_golden.jsonl")
}

#[test]
fn golden_observations_translate_exactly() {
    let vocab = Vocabulary::cooking();
    let records = load_golden(&golden_path()).unwrap();
    assert_eq!(records.len(), 3);
    for r in &records {
        assert_eq!(translate_record(r, &vocab).unwrap(), r.expected, "{}", r.observation);
    }
}

#[test]
fn navigation_case_queues_kitchen_first() {
    let vocab = Vocabulary::cooking();
    let records = load_golden(&golden_path()).unwrap();
    let nav = records.iter().find(|r| r.navigation).unwrap();
    let mut q = InstructionQueue::new();
    q.observe(&nav.observation, true, &vocab, 0);
    assert_eq!(q.active_text(RenderMode::SingleToken), "eventually player_at_kitchen");
    assert_eq!(q.items().len(), 2);
    assert_eq!(q.generation_events(), 1);
    q.observe(&nav.observation, true, &vocab, 1);
    assert_eq!(q.items().len(), 2, "repeated observation must not regenerate");
}

#[test]
fn malformed_golden_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.jsonl");
    std::fs::write(&p, "{\"observation\": 3}\n").unwrap();
    assert!(load_golden(&p).is_err());
}
