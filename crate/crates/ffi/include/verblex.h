#ifndef VERBLEX_H
#define VERBLEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum VerblexStatus {
  VERBLEX_STATUS_OK = 0,
  VERBLEX_STATUS_NULL_ARGUMENT = 1,
  VERBLEX_STATUS_INVALID_UTF8 = 2,
  /**
   * A file could not be read or written.
   */
  VERBLEX_STATUS_IO = 3,
  /**
   * Malformed or inconsistent resource, corpus or fact text.
   */
  VERBLEX_STATUS_SCHEMA = 4,
  /**
   * The named type, word or synset is not in the resource.
   */
  VERBLEX_STATUS_NOT_FOUND = 5,
  /**
   * Well-formed input the pipeline declined (no parse, for example).
   */
  VERBLEX_STATUS_REJECTED = 6,
  VERBLEX_STATUS_PANIC = 7,
} VerblexStatus;

/**
 * A loaded gloss corpus.
 */
typedef struct VerblexCorpus VerblexCorpus;

/**
 * A loaded resource, with its rule files when the directory has them.
 */
typedef struct VerblexResource VerblexResource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last call on this thread, or NULL if it succeeded. Valid
 * until the next verblex call on the same thread.
 */
const char *verblex_last_error(void);

/**
 * Library version, static storage.
 */
const char *verblex_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void verblex_string_free(char *s);

/**
 * Load a resource directory; rule files are picked up when present.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum VerblexStatus verblex_resource_load(const char *dir, struct VerblexResource **out);

/**
 * # Safety
 * `r` must be NULL or a handle from this library, freed once.
 */
void verblex_resource_free(struct VerblexResource *r);

/**
 * Write the resource (and its rules, if loaded with them) to `dir`.
 *
 * # Safety
 * `r` must be a live handle and `dir` a NUL-terminated string.
 */
enum VerblexStatus verblex_resource_save(const struct VerblexResource *r, const char *dir);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum VerblexStatus verblex_corpus_load(const char *path, struct VerblexCorpus **out);

/**
 * # Safety
 * `c` must be NULL or a handle from this library, freed once.
 */
void verblex_corpus_free(struct VerblexCorpus *c);

/**
 * Run the bootstrap loop. The seed handle is left untouched; the new
 * resource goes to `out` and the build report, as JSON, to `report_json`
 * (which may be NULL). `jobs` = 0 uses every core.
 *
 * # Safety
 * Handles must be live; `out` must be writable; `report_json` NULL or writable.
 */
enum VerblexStatus verblex_build(const struct VerblexResource *seed,
                                 const struct VerblexCorpus *corpus,
                                 uint32_t max_iterations,
                                 size_t jobs,
                                 struct VerblexResource **out,
                                 char **report_json);

/**
 * A type's parent, effective roles, axioms (as text) and synsets, as JSON.
 *
 * # Safety
 * `r` must be live, `name` NUL-terminated, `out_json` writable.
 */
enum VerblexStatus verblex_query_type(const struct VerblexResource *r,
                                      const char *name,
                                      char **out_json);

/**
 * Best WuP similarity over the senses of two words.
 *
 * # Safety
 * Handles must be live, words NUL-terminated, `score` writable.
 */
enum VerblexStatus verblex_word_similarity(const struct VerblexResource *r,
                                           const struct VerblexCorpus *corpus,
                                           const char *word1,
                                           const char *word2,
                                           double *score);

/**
 * Forward-chain the facts (one per line) and test the query.
 * `answer` is set to 1 for yes and 0 for unknown; `trace_json` (may be NULL)
 * receives the derivation as a JSON list.
 *
 * # Safety
 * `r` must be live, strings NUL-terminated, out pointers writable.
 */
enum VerblexStatus verblex_entails(const struct VerblexResource *r,
                                   const char *facts,
                                   const char *query,
                                   size_t max_depth,
                                   int32_t *answer,
                                   char **trace_json);

/**
 * Term dump of the best analysis of a definition.
 *
 * # Safety
 * `r` must be live, `gloss` NUL-terminated, `out` writable.
 */
enum VerblexStatus verblex_parse_gloss(const struct VerblexResource *r,
                                       const char *gloss,
                                       char **out);

/**
 * Spearman's rank correlation of two arrays of length `n`.
 *
 * # Safety
 * `xs` and `ys` must point to `n` doubles; `out` must be writable.
 */
enum VerblexStatus verblex_spearman(const double *xs, const double *ys, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VERBLEX_H */
