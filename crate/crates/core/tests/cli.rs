use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn cookltl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cookltl")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn seeds(file: &Path) -> BTreeSet<u64> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["seed"].as_u64().unwrap())
        .collect()
}

#[test]
fn make_games_is_idempotent_and_disjoint() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = cookltl(&["make-games", "--level", "1", "--train", "6", "--valid", "4", "--test", "4", "--out-dir", path(dir.path())]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for split in ["train", "valid", "test"] {
        let rel = format!("level1/{split}.jsonl");
        assert_eq!(fs::read(a.path().join(&rel)).unwrap(), fs::read(b.path().join(&rel)).unwrap());
    }
    let tr = seeds(&a.path().join("level1/train.jsonl"));
    let va = seeds(&a.path().join("level1/valid.jsonl"));
    let te = seeds(&a.path().join("level1/test.jsonl"));
    assert_eq!((tr.len(), va.len(), te.len()), (6, 4, 4));
    assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
}

#[test]
fn train_then_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(cookltl(&["make-games", "--level", "0", "--train", "2", "--valid", "2", "--test", "2", "--out-dir", path(d)]).status.success());
    let run = d.join("run");
    let out = cookltl(&[
        "train",
        "--level", "0",
        "--episodes", "100",
        "--seeds", "5",
        "--eval-every", "50",
        "--dim", "65536",
        "--train-set", path(&d.join("level0/train.jsonl")),
        "--valid-set", path(&d.join("level0/valid.jsonl")),
        "--out-dir", path(&run),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(run.join("episodes.csv")).unwrap();
    assert!(csv.starts_with("episode,seed,normalized_points,success,steps,bonus_total\n"));
    assert_eq!(csv.lines().count(), 101);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());

    let per_game = d.join("eval.csv");
    let out = cookltl(&[
        "eval",
        "--checkpoint", path(&run.join("best_seed5.json")),
        "--game-set", path(&d.join("level0/test.jsonl")),
        "--out", path(&per_game),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("games 2 "));
    assert_eq!(fs::read_to_string(per_game).unwrap().lines().count(), 3);

    assert!(cookltl(&["make-games", "--level", "1", "--train", "1", "--valid", "1", "--test", "1", "--out-dir", path(d)]).status.success());
    let out = cookltl(&["eval", "--checkpoint", path(&run.join("best_seed5.json")), "--game-set", path(&d.join("level1/test.jsonl"))]);
    assert_eq!(out.status.code(), Some(3), "level mismatch is a data error");
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = d.join("missing.jsonl");
    let out = cookltl(&["train", "--level", "7", "--train-set", path(&missing), "--valid-set", path(&missing), "--out-dir", path(d)]);
    assert_eq!(out.status.code(), Some(2));
    let out = cookltl(&["train", "--level", "0", "--train-set", path(&missing), "--valid-set", path(&missing), "--out-dir", path(d)]);
    assert_eq!(out.status.code(), Some(3));
    let out = cookltl(&["eval", "--checkpoint", path(&missing), "--game-set", path(&missing)]);
    assert_eq!(out.status.code(), Some(3));
    let out = cookltl(&["make-games", "--level", "4", "--out-dir", path(d)]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_cookltl"))
        .args(["translate-suite", "--cases", "1", "--out-dir", path(d)])
        .env_remove("COOKLTL_COMPLETION_URL")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn play_shows_instruction_and_quits() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cookltl"))
        .args(["play", "--level", "1", "--seed", "3", "--with-ltl"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"99\n0\nquit\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[instruction] cookbook_is_examined\n"));
    assert!(text.contains("[reward] base 0 bonus 1"));
    assert!(text.contains("[instruction] eventually "));
}
