//! C ABI over cookltl.
//!
//! Every fallible call returns a [`CookltlStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be fetched
//! with [`cookltl_last_error`]. Strings returned to the caller are owned by
//! the caller and released with [`cookltl_string_free`]; handles are released
//! with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use libc::{c_char, size_t};

use cookltl::harness::{Episode, RunFlags};
use cookltl::ltl::{self, Formula, RenderMode, TruthAssignment};
use cookltl::vocab::{label, Vocabulary};
use cookltl::world::{generate_game, Game, Mode, WorldError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CookltlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    OutOfRange = 5,
    GameOver = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CookltlMode {
    Normal = 0,
    Stripped = 1,
    ForcedCookbook = 2,
}

/// Episode switches. Zero-initialised means everything off.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CookltlFlags {
    pub no_progression: bool,
    pub ltl_reward: bool,
    pub ltl_termination: bool,
    pub strip_instructions: bool,
    pub force_cookbook: bool,
    pub no_ltl_input: bool,
    pub multi_token: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CookltlStep {
    pub base_reward: f64,
    pub reward: f64,
    pub bonus: i8,
    pub terminal: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CookltlOutcome {
    pub normalized_points: f64,
    pub success: bool,
    pub steps: size_t,
    pub bonus_total: i32,
    pub cookbook_examined: bool,
}

/// Opaque LTL formula.
pub struct CookltlFormula(Formula);

/// Opaque game without instructions.
pub struct CookltlGame {
    game: Game,
    observation: String,
}

/// Opaque game plus instruction queue and shaping.
pub struct CookltlEpisode(Episode);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CookltlStatus, String);

impl From<WorldError> for Fail {
    fn from(e: WorldError) -> Self {
        let status = match e {
            WorldError::InvalidLevel(_) => CookltlStatus::InvalidArgument,
            WorldError::ActionOutOfRange { .. } => CookltlStatus::OutOfRange,
            WorldError::GameOver => CookltlStatus::GameOver,
            _ => CookltlStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CookltlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CookltlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CookltlStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(CookltlStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(CookltlStatus::InvalidUtf8, e.to_string()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: &str) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(CookltlStatus::Internal, e.to_string()))?;
    if out.is_null() {
        return Err(null());
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn handle_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

fn render_mode(multi_token: bool) -> RenderMode {
    if multi_token {
        RenderMode::MultiToken
    } else {
        RenderMode::SingleToken
    }
}

/// Message for the last failed call on this thread, or null. Free with
/// `cookltl_string_free`.
#[no_mangle]
pub extern "C" fn cookltl_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cookltl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse formula text such as `eventually a and next b`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_parse(text: *const c_char, out: *mut *mut CookltlFormula) -> CookltlStatus {
    guard(|| {
        let f = ltl::parse(str_arg(text)?).map_err(|e| Fail(CookltlStatus::ParseError, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(CookltlFormula(f))))
    })
}

/// # Safety
/// `f` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_free(f: *mut CookltlFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_render(f: *const CookltlFormula, multi_token: bool, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| {
        let text = ltl::render(&handle(f)?.0, render_mode(multi_token)).map_err(|e| Fail(CookltlStatus::InvalidArgument, e.to_string()))?;
        write_string(out, &text)
    })
}

/// Progress `f` through one step where exactly the `n` listed propositions
/// hold. The result is a new handle.
///
/// # Safety
/// `props` must point to `n` NUL-terminated strings (or be null when `n` is 0).
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_progress(
    f: *const CookltlFormula,
    props: *const *const c_char,
    n: size_t,
    out: *mut *mut CookltlFormula,
) -> CookltlStatus {
    guard(|| {
        let f = handle(f)?;
        let mut sigma = TruthAssignment::new();
        if n > 0 {
            if props.is_null() {
                return Err(null());
            }
            for p in std::slice::from_raw_parts(props, n) {
                sigma.insert(str_arg(*p)?);
            }
        }
        let next = ltl::progress(&sigma, &f.0);
        write_out(out, Box::into_raw(Box::new(CookltlFormula(next))))
    })
}

/// Truth value of `f` on the empty remaining trace.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_end_eval(f: *const CookltlFormula, out: *mut bool) -> CookltlStatus {
    guard(|| write_out(out, ltl::end_eval(&handle(f)?.0)))
}

/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_formula_equal(a: *const CookltlFormula, b: *const CookltlFormula, out: *mut bool) -> CookltlStatus {
    guard(|| write_out(out, handle(a)?.0 == handle(b)?.0))
}

/// New game for `level` (0..=3) and `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_new(level: u8, seed: u64, mode: CookltlMode, out: *mut *mut CookltlGame) -> CookltlStatus {
    guard(|| {
        let spec = Arc::new(generate_game(level, seed)?);
        let mode = match mode {
            CookltlMode::Normal => Mode::Normal,
            CookltlMode::Stripped => Mode::Stripped,
            CookltlMode::ForcedCookbook => Mode::ForcedCookbook,
        };
        let (game, first) = Game::reset(spec, mode);
        let g = CookltlGame {
            game,
            observation: first.observation.text,
        };
        write_out(out, Box::into_raw(Box::new(g)))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_free(g: *mut CookltlGame) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_observation(g: *const CookltlGame, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| write_string(out, &handle(g)?.observation))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_candidate_count(g: *const CookltlGame, out: *mut size_t) -> CookltlStatus {
    guard(|| write_out(out, handle(g)?.game.candidates().len()))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_candidate(g: *const CookltlGame, index: size_t, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| {
        let c = handle(g)?.game.candidates();
        let a = c
            .get(index)
            .ok_or_else(|| Fail(CookltlStatus::OutOfRange, format!("candidate {index} of {}", c.len())))?;
        write_string(out, a)
    })
}

/// Take candidate `index`; writes the base reward and whether the game ended.
///
/// # Safety
/// `g` must be a live handle; `reward` and `done` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_step(g: *mut CookltlGame, index: size_t, reward: *mut f64, done: *mut bool) -> CookltlStatus {
    guard(|| {
        if reward.is_null() || done.is_null() {
            return Err(null());
        }
        let g = handle_mut(g)?;
        let r = g.game.step(index)?;
        g.observation = r.observation.text;
        write_out(reward, r.base_reward)?;
        write_out(done, r.done)
    })
}

/// # Safety
/// `g` must be a live handle; `score`, `done` and `success` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_status(g: *const CookltlGame, score: *mut u32, done: *mut bool, success: *mut bool) -> CookltlStatus {
    guard(|| {
        let s = handle(g)?.game.state();
        write_out(score, s.score())?;
        write_out(done, s.done())?;
        write_out(success, s.success())
    })
}

/// Propositions true in the current state, space separated.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_game_label(g: *const CookltlGame, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| {
        let sigma = label(&handle(g)?.game.oracle_belief());
        write_string(out, &sigma.iter().collect::<Vec<_>>().join(" "))
    })
}

/// New episode for `level` and `seed` with instruction tracking and shaping.
///
/// # Safety
/// `flags` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_new(
    level: u8,
    seed: u64,
    flags: *const CookltlFlags,
    step_cap: size_t,
    out: *mut *mut CookltlEpisode,
) -> CookltlStatus {
    guard(|| {
        let f = *handle(flags)?;
        if step_cap == 0 {
            return Err(Fail(CookltlStatus::InvalidArgument, "step_cap must be positive".into()));
        }
        let run = RunFlags {
            no_progression: f.no_progression,
            ltl_reward: f.ltl_reward,
            ltl_termination: f.ltl_termination,
            strip_instructions: f.strip_instructions,
            force_cookbook: f.force_cookbook,
            no_ltl_input: f.no_ltl_input,
            render_mode: render_mode(f.multi_token),
        };
        let spec = Arc::new(generate_game(level, seed)?);
        let ep = Episode::new(spec, run, step_cap, Arc::new(Vocabulary::cooking()));
        write_out(out, Box::into_raw(Box::new(CookltlEpisode(ep))))
    })
}

/// # Safety
/// `e` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_free(e: *mut CookltlEpisode) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_observation(e: *const CookltlEpisode, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| write_string(out, handle(e)?.0.observation()))
}

/// Instruction text as the agent sees it.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_instruction(e: *const CookltlEpisode, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| write_string(out, &handle(e)?.0.ltl_text()))
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_candidate_count(e: *const CookltlEpisode, out: *mut size_t) -> CookltlStatus {
    guard(|| write_out(out, handle(e)?.0.candidates().len()))
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_candidate(e: *const CookltlEpisode, index: size_t, out: *mut *mut c_char) -> CookltlStatus {
    guard(|| {
        let c = handle(e)?.0.candidates();
        let a = c
            .get(index)
            .ok_or_else(|| Fail(CookltlStatus::OutOfRange, format!("candidate {index} of {}", c.len())))?;
        write_string(out, a)
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_step(e: *mut CookltlEpisode, index: size_t, out: *mut CookltlStep) -> CookltlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let ep = &mut handle_mut(e)?.0;
        if ep.is_terminal() {
            return Err(Fail(CookltlStatus::GameOver, "episode is over".into()));
        }
        let s = ep.step(index)?;
        write_out(
            out,
            CookltlStep {
                base_reward: s.base_reward,
                reward: s.reward,
                bonus: s.bonus,
                terminal: s.terminal,
            },
        )
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cookltl_episode_outcome(e: *const CookltlEpisode, out: *mut CookltlOutcome) -> CookltlStatus {
    guard(|| {
        let o = handle(e)?.0.outcome();
        write_out(
            out,
            CookltlOutcome {
                normalized_points: o.normalized_points,
                success: o.success,
                steps: o.steps,
                bonus_total: o.bonus_total,
                cookbook_examined: o.cookbook_examined,
            },
        )
    })
}
