//! Few-shot natural-language to LTL translation: prompt construction,
//! nested-tuple formula text, a completion client, and grading.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instr::{parse_recipe, InstrError};
use crate::ltl::Formula;
use crate::vocab::Vocabulary;

/// Number of worked examples in a prompt.
pub const PROMPT_EXAMPLES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("expected {PROMPT_EXAMPLES} prompt examples, got {0}")]
    ExampleCount(usize),
    #[error("tuple syntax error at byte {pos}: {message}")]
    Tuple { pos: usize, message: String },
    #[error("network error after {attempts} attempts: {message}")]
    Network { attempts: usize, message: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("completion service: {0}")]
    Service(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Recipe(#[from] InstrError),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationExample {
    pub nl: String,
    pub ltl: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    AbsolutelyCorrect,
    AlmostCorrect,
    Incorrect,
}

impl Grade {
    pub const ALL: [Grade; 3] = [Grade::AbsolutelyCorrect, Grade::AlmostCorrect, Grade::Incorrect];
}

fn op_name(f: &Formula) -> &'static str {
    match f {
        Formula::True => "true",
        Formula::False => "false",
        Formula::Atom(_) => "atom",
        Formula::Not(_) => "not",
        Formula::And(..) => "and",
        Formula::Or(..) => "or",
        Formula::Next(_) => "next",
        Formula::Until(..) => "until",
        Formula::Eventually(_) => "eventually",
        Formula::Always(_) => "always",
    }
}

/// Nested-tuple text, e.g. `('and', ('eventually', 'p'), ('eventually', 'q'))`.
pub fn render_tuple(f: &Formula) -> String {
    match f {
        Formula::Atom(p) => format!("'{p}'"),
        Formula::True | Formula::False => format!("'{}'", op_name(f)),
        Formula::Not(x) | Formula::Next(x) | Formula::Eventually(x) | Formula::Always(x) => {
            format!("('{}', {})", op_name(f), render_tuple(x))
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
            format!("('{}', {}, {})", op_name(f), render_tuple(l), render_tuple(r))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Item {
    Str(String),
    Tuple(Vec<Item>),
}

struct TupleParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TupleParser<'_> {
    fn err<T>(&self, message: &str) -> Result<T, TranslateError> {
        Err(TranslateError::Tuple {
            pos: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
    }

    fn item(&mut self) -> Result<Item, TranslateError> {
        match self.peek() {
            Some('(') => {
                self.bump('(');
                let mut parts = vec![self.item()?];
                loop {
                    match self.peek() {
                        Some(',') => {
                            self.bump(',');
                            parts.push(self.item()?);
                        }
                        Some(')') => {
                            self.bump(')');
                            return Ok(Item::Tuple(parts));
                        }
                        _ => return self.err("expected ',' or ')'"),
                    }
                }
            }
            Some(q @ ('\'' | '‘' | '’')) => {
                self.bump(q);
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if matches!(c, '\'' | '‘' | '’') {
                        let s = self.src[start..self.pos].to_string();
                        self.bump(c);
                        return Ok(Item::Str(s));
                    }
                    self.bump(c);
                }
                self.err("unterminated string")
            }
            _ => self.err("expected '(' or a quoted string"),
        }
    }
}

fn item_to_formula(item: &Item) -> Result<Formula, String> {
    match item {
        Item::Str(s) => Ok(match s.as_str() {
            "true" => Formula::True,
            "false" => Formula::False,
            p if !p.is_empty() => Formula::atom(p),
            _ => return Err("empty proposition".into()),
        }),
        Item::Tuple(parts) => {
            let Some(Item::Str(op)) = parts.first() else {
                return Err("tuple must start with an operator name".into());
            };
            let args = parts[1..].iter().map(item_to_formula).collect::<Result<Vec<_>, _>>()?;
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(format!("'{op}' takes {n} operand(s), got {}", args.len()))
                }
            };
            let mut a = args.clone().into_iter();
            let mut one = || a.next().expect("arity checked");
            match op.as_str() {
                "not" => arity(1).map(|_| Formula::not(one())),
                "next" => arity(1).map(|_| Formula::next(one())),
                "eventually" => arity(1).map(|_| Formula::eventually(one())),
                "always" => arity(1).map(|_| Formula::always(one())),
                "and" => arity(2).map(|_| Formula::and(one(), one())),
                "or" => arity(2).map(|_| Formula::or(one(), one())),
                "until" => arity(2).map(|_| Formula::until(one(), one())),
                other => Err(format!("unknown operator '{other}'")),
            }
        }
    }
}

/// Parse nested-tuple text. Straight and curly single quotes are accepted.
pub fn parse_tuple(text: &str) -> Result<Formula, TranslateError> {
    let mut p = TupleParser { src: text, pos: 0 };
    let item = p.item()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    item_to_formula(&item).map_err(|message| TranslateError::Tuple { pos: 0, message })
}

/// Numbered `k. NL: ... LTL: ...` lines followed by the open test line.
pub fn build_prompt(examples: &[TranslationExample], test_nl: &str) -> Result<String, TranslateError> {
    if examples.len() != PROMPT_EXAMPLES {
        return Err(TranslateError::ExampleCount(examples.len()));
    }
    let mut out = String::new();
    for (k, ex) in examples.iter().enumerate() {
        out.push_str(&format!("{}. NL: {} LTL: {}\n", k + 1, ex.nl, ex.ltl));
    }
    out.push_str(&format!("{}. NL: {} LTL:", PROMPT_EXAMPLES + 1, test_nl));
    Ok(out)
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect()
}

/// Exact after trimming, then equal ignoring all whitespace and parentheses.
pub fn grade(response: &str, gold: &str) -> Grade {
    if response.trim() == gold.trim() {
        Grade::AbsolutelyCorrect
    } else if squash(response) == squash(gold) {
        Grade::AlmostCorrect
    } else {
        Grade::Incorrect
    }
}

/// Gold pair for a cookbook observation: the parsed recipe without the
/// eating conjunct, in tuple text.
pub fn gold_pair(nl: &str, vocab: &Vocabulary) -> Result<TranslationExample, TranslateError> {
    let recipe = parse_recipe(nl, vocab)?;
    let f = recipe
        .formula(false)
        .ok_or_else(|| TranslateError::Recipe(InstrError::Recipe("empty recipe".into())))?;
    Ok(TranslationExample {
        nl: nl.to_string(),
        ltl: render_tuple(&f),
    })
}

const COOKBOOK_PREFIX: &str = "you open the copy of \"cooking : a modern approach ( 3rd ed . )\" and start reading : recipe # 1 --------- gather all following ingredients and follow the directions to prepare this tasty meal . ingredients : ";

/// Flattened, lower-cased cookbook text for a recipe.
pub fn cookbook_nl(ingredients: &[&str], directions: &[(&str, &str)]) -> String {
    let mut s = String::from(COOKBOOK_PREFIX);
    s.push_str(&ingredients.join(" "));
    s.push_str(" directions :");
    for (verb, ing) in directions {
        s.push_str(&format!(" {verb} the {ing}"));
    }
    s.push_str(" prepare meal");
    s
}

/// The six fixed prompt examples.
pub fn prompt_examples() -> Vec<TranslationExample> {
    let cases: [(&[&str], &[(&str, &str)], &str); PROMPT_EXAMPLES] = [
        (
            &["cilantro"],
            &[("dice", "cilantro")],
            "('and', ('eventually', 'cilantro_in_player'), ('and', ('eventually', 'cilantro_is_diced'), ('eventually', 'meal_in_player')))",
        ),
        (
            &["pork chop"],
            &[("chop", "pork chop"), ("fry", "pork chop")],
            "('and', ('eventually', 'pork_chop_in_player'), ('and', ('eventually', 'pork_chop_is_chopped'), ('and', ('eventually', 'pork_chop_is_fried'), ('eventually', 'meal_in_player'))))",
        ),
        (
            &["black pepper"],
            &[],
            "('and', ('eventually', 'black_pepper_in_player'), ('eventually', 'meal_in_player'))",
        ),
        (
            &["purple potato", "red onion", "salt"],
            &[("dice", "purple potato"), ("roast", "purple potato"), ("dice", "red onion"), ("fry", "red onion")],
            "('and', ('eventually', 'purple_potato_in_player'), ('and', ('eventually', 'red_onion_in_player'), ('and', ('eventually', 'salt_in_player'), ('and', ('eventually', 'purple_potato_is_diced'), ('and', ('eventually', 'purple_potato_is_roasted'), ('and', ('eventually', 'red_onion_is_diced'), ('and', ('eventually', 'red_onion_is_fried'), ('eventually', 'meal_in_player'))))))))",
        ),
        (
            &["black pepper", "parsley", "salt"],
            &[("dice", "parsley")],
            "('and', ('eventually', 'black_pepper_in_player'), ('and', ('eventually', 'parsley_in_player'), ('and', ('eventually', 'salt_in_player'), ('and', ('eventually', 'parsley_is_diced'), ('eventually', 'meal_in_player')))))",
        ),
        (
            &["purple potato", "white onion", "yellow bell pepper"],
            &[("roast", "purple potato"), ("roast", "white onion"), ("dice", "yellow bell pepper")],
            "('and', ('eventually', 'purple_potato_in_player'), ('and', ('eventually', 'white_onion_in_player'), ('and', ('eventually', 'yellow_bell_pepper_in_player'), ('and', ('eventually', 'purple_potato_is_roasted'), ('and', ('eventually', 'white_onion_is_roasted'), ('and', ('eventually', 'yellow_bell_pepper_is_diced'), ('eventually', 'meal_in_player')))))))",
        ),
    ];
    cases
        .iter()
        .map(|(ings, dirs, ltl)| TranslationExample {
            nl: cookbook_nl(ings, dirs),
            ltl: ltl.to_string(),
        })
        .collect()
}

/// Reference test observation with one correct and one incorrect completion.
pub fn reference_case() -> (TranslationExample, &'static str, &'static str) {
    let nl = cookbook_nl(
        &["banana", "red hot pepper", "yellow potato"],
        &[
            ("chop", "banana"),
            ("fry", "banana"),
            ("chop", "red hot pepper"),
            ("fry", "red hot pepper"),
            ("slice", "yellow potato"),
            ("fry", "yellow potato"),
        ],
    );
    let gold = "('and', ('eventually', 'banana_in_player'), ('and', ('eventually', 'red_hot_pepper_in_player'), ('and', ('eventually', 'yellow_potato_in_player'), ('and', ('eventually', 'banana_is_chopped'), ('and', ('eventually', 'banana_is_fried'), ('and', ('eventually', 'red_hot_pepper_is_chopped'), ('and', ('eventually', 'red_hot_pepper_is_fried'), ('and', ('eventually', 'yellow_potato_is_sliced'), ('and', ('eventually', 'yellow_potato_is_fried'), ('eventually', 'meal_in_player'))))))))))";
    let wrong = "('and', ('eventually', 'banana_in_player'), ('and', ('eventually', 'red_hot_pepper_in_player'), ('and', ('eventually', 'yellow_potato_in_player'), ('and', ('eventually', 'zucchini_fry_player'), ('and', ('eventually', 'banana_is_frozen'), ('eventually', 'meal_in_player'))))";
    (
        TranslationExample {
            nl,
            ltl: gold.to_string(),
        },
        gold,
        wrong,
    )
}

/// Random recipes rendered as cookbook text with parser-derived gold.
pub fn generate_test_set(n: usize, seed: u64, vocab: &Vocabulary) -> Result<Vec<TranslationExample>, TranslateError> {
    const CUT: [&str; 3] = ["chop", "dice", "slice"];
    const COOK: [&str; 3] = ["fry", "roast", "grill"];
    let pool: Vec<String> = vocab
        .entities()
        .filter(|e| !matches!(*e, "cookbook" | "knife" | "meal"))
        .map(|e| e.replace('_', " "))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.gen_range(1..=3);
        let mut ings: Vec<&str> = pool.choose_multiple(&mut rng, k).map(String::as_str).collect();
        ings.sort_unstable();
        let mut dirs = Vec::new();
        for ing in &ings {
            if rng.gen_bool(0.6) {
                dirs.push((*CUT.choose(&mut rng).unwrap(), *ing));
            }
            if rng.gen_bool(0.5) {
                dirs.push((*COOK.choose(&mut rng).unwrap(), *ing));
            }
        }
        out.push(gold_pair(&cookbook_nl(&ings, &dirs), vocab)?);
    }
    Ok(out)
}

/// A text-completion service.
pub trait CompletionClient: Sync {
    fn complete(&self, prompt: &str) -> Result<String, TranslateError>;
}

/// Cut a completion at its first blank line.
pub fn truncate_completion(text: &str) -> &str {
    let normal = text.find("\n\n");
    let crlf = text.find("\r\n\r\n");
    match (normal, crlf) {
        (Some(a), Some(b)) => &text[..a.min(b)],
        (Some(a), None) | (None, Some(a)) => &text[..a],
        (None, None) => text,
    }
}

/// Send `prompt` and return the completion up to its first blank line.
pub fn translate(client: &dyn CompletionClient, prompt: &str) -> Result<String, TranslateError> {
    client.complete(prompt).map(|t| truncate_completion(&t).to_string())
}

/// HTTP client for a JSON completion endpoint.
///
/// Sends `{prompt, max_tokens, temperature: 0}` (plus `model` when set) and
/// reads `choices[0].text`, `completion` or `text` from the reply.
#[derive(Debug)]
pub struct HttpCompletionClient {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: Option<String>,
    pub max_tokens: u32,
    pub attempts: usize,
    pub backoff: Duration,
    pub timeout: Duration,
    client: reqwest::blocking::Client,
    calls: AtomicUsize,
}

pub const ENV_ENDPOINT: &str = "COOKLTL_COMPLETION_URL";
pub const ENV_API_KEY: &str = "COOKLTL_COMPLETION_KEY";
pub const ENV_MODEL: &str = "COOKLTL_COMPLETION_MODEL";

impl HttpCompletionClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>) -> Result<Self, TranslateError> {
        let timeout = Duration::from_secs(60);
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| TranslateError::Config(e.to_string()))?;
        Ok(HttpCompletionClient {
            endpoint: endpoint.into(),
            api_key,
            model: None,
            max_tokens: 512,
            attempts: 3,
            backoff: Duration::from_millis(500),
            timeout,
            client,
            calls: AtomicUsize::new(0),
        })
    }

    /// Endpoint, key and model from the environment.
    pub fn from_env() -> Result<Self, TranslateError> {
        let endpoint = std::env::var(ENV_ENDPOINT).map_err(|_| TranslateError::Config(format!("{ENV_ENDPOINT} is not set")))?;
        let mut c = Self::new(endpoint, std::env::var(ENV_API_KEY).ok())?;
        c.model = std::env::var(ENV_MODEL).ok();
        Ok(c)
    }

    /// HTTP requests sent so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn once(&self, prompt: &str) -> Result<String, (bool, TranslateError)> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut body = serde_json::json!({
            "prompt": prompt,
            "max_tokens": self.max_tokens,
            "temperature": 0,
        });
        if let Some(m) = &self.model {
            body["model"] = serde_json::Value::String(m.clone());
        }
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(k) = &self.api_key {
            req = req.bearer_auth(k);
        }
        let resp = req.send().map_err(|e| (true, TranslateError::Service(e.to_string())))?;
        let status = resp.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err((false, TranslateError::Auth(format!("HTTP {status}"))));
        }
        if status.is_server_error() || status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            return Err((true, TranslateError::Service(format!("HTTP {status}"))));
        }
        if !status.is_success() {
            return Err((false, TranslateError::Service(format!("HTTP {status}"))));
        }
        let v: serde_json::Value = resp.json().map_err(|e| (false, TranslateError::Service(format!("bad reply: {e}"))))?;
        let text = v
            .pointer("/choices/0/text")
            .or_else(|| v.get("completion"))
            .or_else(|| v.get("text"))
            .and_then(|t| t.as_str())
            .ok_or_else(|| (false, TranslateError::Service("reply has no completion text".into())))?;
        Ok(text.to_string())
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&self, prompt: &str) -> Result<String, TranslateError> {
        let mut last = String::new();
        for attempt in 0..self.attempts.max(1) {
            if attempt > 0 {
                thread::sleep(self.backoff * (1 << (attempt - 1)));
            }
            match self.once(prompt) {
                Ok(t) => return Ok(t),
                Err((true, e)) => last = e.to_string(),
                Err((false, e)) => return Err(e),
            }
        }
        Err(TranslateError::Network {
            attempts: self.attempts.max(1),
            message: last,
        })
    }
}

/// Result for one test case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub nl: String,
    pub gold: String,
    pub response: Option<String>,
    pub error: Option<String>,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub cases: usize,
    pub failures: usize,
    pub counts: BTreeMap<Grade, usize>,
    pub fractions: BTreeMap<Grade, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub records: Vec<CaseRecord>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    /// Write `cases.jsonl` and `summary.json`.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>, TranslateError> {
        let io = |e: std::io::Error| TranslateError::Io(e.to_string());
        fs::create_dir_all(out_dir).map_err(io)?;
        let mut lines = String::new();
        for r in &self.records {
            lines.push_str(&serde_json::to_string(r).expect("record serializes"));
            lines.push('\n');
        }
        let cases = out_dir.join("cases.jsonl");
        let summary = out_dir.join("summary.json");
        fs::write(&cases, lines).map_err(io)?;
        fs::write(&summary, serde_json::to_string_pretty(&self.summary).expect("summary serializes") + "\n").map_err(io)?;
        Ok(vec![cases, summary])
    }
}

/// Translate and grade every test case. Client errors are recorded per case
/// and graded incorrect. Up to `concurrency` requests run at once.
pub fn run_suite(
    client: &dyn CompletionClient,
    examples: &[TranslationExample],
    test_set: &[TranslationExample],
    concurrency: usize,
) -> Result<SuiteReport, TranslateError> {
    let prompts = test_set
        .iter()
        .map(|t| build_prompt(examples, &t.nl))
        .collect::<Result<Vec<_>, _>>()?;
    let mut results: Vec<Option<Result<String, TranslateError>>> = vec![None; test_set.len()];
    let workers = concurrency.max(1);
    for chunk_start in (0..test_set.len()).step_by(workers) {
        let end = (chunk_start + workers).min(test_set.len());
        let chunk: Vec<Result<String, TranslateError>> = thread::scope(|s| {
            let handles: Vec<_> = (chunk_start..end)
                .map(|i| {
                    let p = &prompts[i];
                    s.spawn(move || translate(client, p))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(TranslateError::Service("worker panicked".into()))))
                .collect()
        });
        for (k, r) in chunk.into_iter().enumerate() {
            results[chunk_start + k] = Some(r);
        }
    }
    let records: Vec<CaseRecord> = test_set
        .iter()
        .zip(results)
        .enumerate()
        .map(|(index, (case, r))| match r.expect("every case ran") {
            Ok(resp) => CaseRecord {
                index,
                nl: case.nl.clone(),
                gold: case.ltl.clone(),
                grade: grade(&resp, &case.ltl),
                response: Some(resp),
                error: None,
            },
            Err(e) => CaseRecord {
                index,
                nl: case.nl.clone(),
                gold: case.ltl.clone(),
                response: None,
                error: Some(e.to_string()),
                grade: Grade::Incorrect,
            },
        })
        .collect();
    let n = records.len();
    let mut counts: BTreeMap<Grade, usize> = Grade::ALL.iter().map(|g| (*g, 0)).collect();
    for r in &records {
        *counts.entry(r.grade).or_default() += 1;
    }
    let fractions = counts
        .iter()
        .map(|(g, c)| (*g, if n == 0 { 0.0 } else { *c as f64 / n as f64 }))
        .collect();
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    Ok(SuiteReport {
        summary: SuiteSummary {
            cases: n,
            failures,
            counts,
            fractions,
        },
        records,
    })
}

/// Read test cases from JSONL records with `nl` and `ltl` fields.
pub fn load_test_set(path: &Path) -> Result<Vec<TranslationExample>, TranslateError> {
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| TranslateError::Io(format!("{}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| TranslateError::Io(format!("{}:{}: {e}", path.display(), i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    struct Canned(String);

    impl CompletionClient for Canned {
        fn complete(&self, _prompt: &str) -> Result<String, TranslateError> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn prompt_layout() {
        let (case, _, _) = reference_case();
        let p = build_prompt(&prompt_examples(), &case.nl).unwrap();
        let lines: Vec<&str> = p.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("1. NL: you open the copy of \"cooking"));
        assert!(lines[0].contains(" LTL: ('and', ('eventually', 'cilantro_in_player')"));
        assert!(lines[6].starts_with("7. NL: "));
        assert!(p.ends_with("prepare meal LTL:"));
        assert_eq!(build_prompt(&prompt_examples()[..5], "x"), Err(TranslateError::ExampleCount(5)));
    }

    #[test]
    fn examples_match_parser_gold() {
        let vocab = Vocabulary::cooking();
        for ex in prompt_examples() {
            assert_eq!(gold_pair(&ex.nl, &vocab).unwrap().ltl, ex.ltl);
        }
        let (case, gold, _) = reference_case();
        assert_eq!(gold_pair(&case.nl, &vocab).unwrap().ltl, gold);
    }

    #[test]
    fn tuple_round_trip() {
        for text in ["eventually p and eventually q", "not (p until q)", "next a or always b", "p"] {
            let f = parse(text).unwrap();
            assert_eq!(parse_tuple(&render_tuple(&f)).unwrap(), f);
        }
        let curly = "(‘and’, (‘eventually’, ‘x’), (‘eventually’, ‘y’))";
        assert_eq!(parse_tuple(curly).unwrap(), parse("eventually x and eventually y").unwrap());
        assert!(matches!(parse_tuple("('and', 'x')"), Err(TranslateError::Tuple { .. })));
        assert!(matches!(parse_tuple("('eventually', 'x'"), Err(TranslateError::Tuple { .. })));
    }

    #[test]
    fn grading_tiers() {
        let (_, gold, wrong) = reference_case();
        assert_eq!(grade(gold, gold), Grade::AbsolutelyCorrect);
        assert_eq!(grade(&format!("  {gold}\n"), gold), Grade::AbsolutelyCorrect);
        assert_eq!(grade(wrong, gold), Grade::Incorrect);
        let loose = gold.replace(", ", ",  ").replacen(')', "", 2);
        assert_eq!(grade(&loose, gold), Grade::AlmostCorrect);
        assert_eq!(grade("", gold), Grade::Incorrect);
    }

    #[test]
    fn truncates_at_blank_line() {
        assert_eq!(truncate_completion(" ('x')\n\n8. NL: more"), " ('x')");
        assert_eq!(truncate_completion("a\r\n\r\nb"), "a");
        assert_eq!(translate(&Canned("".into()), "p").unwrap(), "");
    }

    #[test]
    fn suite_fractions() {
        let vocab = Vocabulary::cooking();
        let tests = generate_test_set(12, 5, &vocab).unwrap();
        let gold = tests[0].ltl.clone();
        let r = run_suite(&Canned(gold), &prompt_examples(), &tests, 4).unwrap();
        let total: f64 = r.summary.fractions.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.summary.counts[&Grade::AbsolutelyCorrect] >= 1);
        let empty = run_suite(&Canned(String::new()), &prompt_examples(), &tests, 2).unwrap();
        assert_eq!(empty.summary.fractions[&Grade::Incorrect], 1.0);
    }

    #[test]
    fn generated_gold_omits_consumption() {
        let vocab = Vocabulary::cooking();
        for t in generate_test_set(30, 9, &vocab).unwrap() {
            assert!(!t.ltl.contains("meal_is_consumed"));
            assert!(t.ltl.ends_with("('eventually', 'meal_in_player')") || t.ltl.contains("'meal_in_player')"));
            parse_tuple(&t.ltl).unwrap();
        }
    }
}
