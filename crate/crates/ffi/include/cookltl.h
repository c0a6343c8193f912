#ifndef COOKLTL_H
#define COOKLTL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CookltlMode {
  COOKLTL_MODE_NORMAL = 0,
  COOKLTL_MODE_STRIPPED = 1,
  COOKLTL_MODE_FORCED_COOKBOOK = 2,
} CookltlMode;

typedef enum CookltlStatus {
  COOKLTL_STATUS_OK = 0,
  COOKLTL_STATUS_NULL_POINTER = 1,
  COOKLTL_STATUS_INVALID_UTF8 = 2,
  COOKLTL_STATUS_PARSE_ERROR = 3,
  COOKLTL_STATUS_INVALID_ARGUMENT = 4,
  COOKLTL_STATUS_OUT_OF_RANGE = 5,
  COOKLTL_STATUS_GAME_OVER = 6,
  COOKLTL_STATUS_INTERNAL = 7,
} CookltlStatus;

// Opaque game plus instruction queue and shaping.
typedef struct CookltlEpisode CookltlEpisode;

// Opaque LTL formula.
typedef struct CookltlFormula CookltlFormula;

// Opaque game without instructions.
typedef struct CookltlGame CookltlGame;

// Episode switches. Zero-initialised means everything off.
typedef struct CookltlFlags {
  bool no_progression;
  bool ltl_reward;
  bool ltl_termination;
  bool strip_instructions;
  bool force_cookbook;
  bool no_ltl_input;
  bool multi_token;
} CookltlFlags;

typedef struct CookltlStep {
  double base_reward;
  double reward;
  int8_t bonus;
  bool terminal;
} CookltlStep;

typedef struct CookltlOutcome {
  double normalized_points;
  bool success;
  size_t steps;
  int32_t bonus_total;
  bool cookbook_examined;
} CookltlOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Free with
// `cookltl_string_free`.
char *cookltl_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void cookltl_string_free(char *s);

// Parse formula text such as `eventually a and next b`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum CookltlStatus cookltl_formula_parse(const char *text, struct CookltlFormula **out);

// # Safety
// `f` must be null or a handle from this library, freed once.
void cookltl_formula_free(struct CookltlFormula *f);

// # Safety
// `f` must be a live handle and `out` writable.
enum CookltlStatus cookltl_formula_render(const struct CookltlFormula *f,
                                          bool multi_token,
                                          char **out);

// Progress `f` through one step where exactly the `n` listed propositions
// hold. The result is a new handle.
//
// # Safety
// `props` must point to `n` NUL-terminated strings (or be null when `n` is 0).
enum CookltlStatus cookltl_formula_progress(const struct CookltlFormula *f,
                                            const char *const *props,
                                            size_t n,
                                            struct CookltlFormula **out);

// Truth value of `f` on the empty remaining trace.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum CookltlStatus cookltl_formula_end_eval(const struct CookltlFormula *f, bool *out);

// # Safety
// `a` and `b` must be live handles and `out` writable.
enum CookltlStatus cookltl_formula_equal(const struct CookltlFormula *a,
                                         const struct CookltlFormula *b,
                                         bool *out);

// New game for `level` (0..=3) and `seed`.
//
// # Safety
// `out` must be writable.
enum CookltlStatus cookltl_game_new(uint8_t level,
                                    uint64_t seed,
                                    enum CookltlMode mode,
                                    struct CookltlGame **out);

// # Safety
// `g` must be null or a handle from this library, freed once.
void cookltl_game_free(struct CookltlGame *g);

// # Safety
// `g` must be a live handle and `out` writable.
enum CookltlStatus cookltl_game_observation(const struct CookltlGame *g, char **out);

// # Safety
// `g` must be a live handle and `out` writable.
enum CookltlStatus cookltl_game_candidate_count(const struct CookltlGame *g, size_t *out);

// # Safety
// `g` must be a live handle and `out` writable.
enum CookltlStatus cookltl_game_candidate(const struct CookltlGame *g, size_t index, char **out);

// Take candidate `index`; writes the base reward and whether the game ended.
//
// # Safety
// `g` must be a live handle; `reward` and `done` writable.
enum CookltlStatus cookltl_game_step(struct CookltlGame *g,
                                     size_t index,
                                     double *reward,
                                     bool *done);

// # Safety
// `g` must be a live handle; `score`, `done` and `success` writable.
enum CookltlStatus cookltl_game_status(const struct CookltlGame *g,
                                       uint32_t *score,
                                       bool *done,
                                       bool *success);

// Propositions true in the current state, space separated.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum CookltlStatus cookltl_game_label(const struct CookltlGame *g, char **out);

// New episode for `level` and `seed` with instruction tracking and shaping.
//
// # Safety
// `flags` must be readable and `out` writable.
enum CookltlStatus cookltl_episode_new(uint8_t level,
                                       uint64_t seed,
                                       const struct CookltlFlags *flags,
                                       size_t step_cap,
                                       struct CookltlEpisode **out);

// # Safety
// `e` must be null or a handle from this library, freed once.
void cookltl_episode_free(struct CookltlEpisode *e);

// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_observation(const struct CookltlEpisode *e, char **out);

// Instruction text as the agent sees it.
//
// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_instruction(const struct CookltlEpisode *e, char **out);

// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_candidate_count(const struct CookltlEpisode *e, size_t *out);

// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_candidate(const struct CookltlEpisode *e,
                                             size_t index,
                                             char **out);

// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_step(struct CookltlEpisode *e,
                                        size_t index,
                                        struct CookltlStep *out);

// # Safety
// `e` must be a live handle and `out` writable.
enum CookltlStatus cookltl_episode_outcome(const struct CookltlEpisode *e,
                                           struct CookltlOutcome *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOKLTL_H */
