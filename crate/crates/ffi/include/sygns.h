#ifndef SYGNS_H
#define SYGNS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SygnsStatus {
  SYGNS_STATUS_OK = 0,
  SYGNS_STATUS_NULL_ARGUMENT = 1,
  SYGNS_STATUS_INVALID_UTF8 = 2,
  SYGNS_STATUS_PARSE = 3,
  SYGNS_STATUS_IO = 4,
  SYGNS_STATUS_INFEASIBLE_SPLIT = 5,
  SYGNS_STATUS_CONFIG = 6,
  SYGNS_STATUS_EXTERNAL = 7,
  SYGNS_STATUS_INVALID_ARGUMENT = 8,
  SYGNS_STATUS_PANIC = 9,
} SygnsStatus;

typedef enum SygnsMr {
  SYGNS_MR_FOL = 0,
  SYGNS_MR_VF = 1,
  SYGNS_MR_DRS = 2,
} SygnsMr;

typedef enum SygnsVerdict {
  SYGNS_VERDICT_ENTAILS = 0,
  SYGNS_VERDICT_NOT_ENTAILS = 1,
  SYGNS_VERDICT_UNKNOWN = 2,
} SygnsVerdict;

typedef enum SygnsStrategy {
  SYGNS_STRATEGY_SYSTEMATICITY_MODIFIER = 0,
  SYGNS_STRATEGY_SYSTEMATICITY_NEGATION = 1,
  SYGNS_STRATEGY_PRODUCTIVITY = 2,
  SYGNS_STRATEGY_DEPTH_EXPOSURE = 3,
} SygnsStrategy;

/**
 * Lexicon, composition settings and the last error message.
 */
typedef struct SygnsContext SygnsContext;

typedef struct SygnsMatch {
  size_t matched;
  size_t gold;
  size_t predicted;
  double precision;
  double recall;
  double f;
} SygnsMatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * A context over the built-in lexicon, or null if allocation failed.
 */
struct SygnsContext *sygns_context_new(void);

/**
 * # Safety
 * `ctx` must be null or come from [`sygns_context_new`] and not be used
 * afterwards.
 */
void sygns_context_free(struct SygnsContext *ctx);

/**
 * Replaces the context's lexicon with one read from a TOML file.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`]; `path` a NUL-terminated string.
 */
enum SygnsStatus sygns_context_load_lexicon(struct SygnsContext *ctx, const char *path);

/**
 * Proper nouns as individual constants when `constant`, as predicates
 * otherwise.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`].
 */
enum SygnsStatus sygns_context_set_constant_proper_nouns(struct SygnsContext *ctx, bool constant);

/**
 * Message for the last failed call on `ctx`; empty after a success. The
 * pointer stays valid until the next call on the same context.
 *
 * # Safety
 * `ctx` must be null or come from [`sygns_context_new`].
 */
const char *sygns_last_error(const struct SygnsContext *ctx);

/**
 * Meaning representation of a sentence of the grammar, as a token string;
 * DRS clauses are joined by ` ; `.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`]; `sentence` NUL-terminated; `out`
 * writable. The string written to `out` is freed with [`sygns_string_free`].
 */
enum SygnsStatus sygns_interpret(struct SygnsContext *ctx,
                                 const char *sentence,
                                 enum SygnsMr mr,
                                 char **out);

/**
 * Polarity marks of a formula, e.g. `dog↓ run↑`.
 *
 * # Safety
 * As for [`sygns_interpret`].
 */
enum SygnsStatus sygns_polarity(struct SygnsContext *ctx,
                                const char *formula,
                                enum SygnsMr mr,
                                char **out);

/**
 * Clause-matching scores between two clausal DRSs, each written one clause
 * per line or with clauses separated by `;`.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`]; `gold`, `pred` NUL-terminated; `out`
 * writable.
 */
enum SygnsStatus sygns_clause_match(struct SygnsContext *ctx,
                                    const char *gold,
                                    const char *pred,
                                    bool count_ref,
                                    struct SygnsMatch *out);

/**
 * Whether `premise` entails `conclusion` (first-order formulas), under the
 * default search budget with the given time limit.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`]; formulas NUL-terminated; `out` writable.
 */
enum SygnsStatus sygns_entails(struct SygnsContext *ctx,
                               const char *premise,
                               const char *conclusion,
                               uint64_t timeout_ms,
                               enum SygnsVerdict *out);

/**
 * Builds a split with the strategy's defaults, optionally overridden by a
 * JSON object of spec fields (null for none), and writes `train.jsonl`,
 * `valid.jsonl` and `test.jsonl` into `out_dir`.
 *
 * # Safety
 * `ctx` from [`sygns_context_new`]; `overrides` null or NUL-terminated;
 * `out_dir` NUL-terminated.
 */
enum SygnsStatus sygns_write_split(struct SygnsContext *ctx,
                                   enum SygnsStrategy strategy,
                                   uint64_t seed,
                                   const char *overrides,
                                   const char *out_dir);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void sygns_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYGNS_H */
