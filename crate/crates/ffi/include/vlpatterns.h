#ifndef VLPATTERNS_H
#define VLPATTERNS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VlpBudget {
  VLP_BUDGET_TOTAL = 0,
  VLP_BUDGET_PER_GAP = 1,
} VlpBudget;

typedef enum VlpFilter {
  VLP_FILTER_NONE = 0,
  VLP_FILTER_FREQUENCY = 1,
  VLP_FILTER_HARMONY = 2,
  VLP_FILTER_BOTH = 3,
} VlpFilter;

typedef enum VlpMeasure {
  VLP_MEASURE_COUNTS = 0,
  VLP_MEASURE_PMI = 1,
  VLP_MEASURE_PMI_LOCAL = 2,
  VLP_MEASURE_PMI_COVERAGE = 3,
  VLP_MEASURE_DICE = 4,
  VLP_MEASURE_CHI2 = 5,
  VLP_MEASURE_G2 = 6,
} VlpMeasure;

typedef enum VlpSkipMode {
  VLP_SKIP_MODE_FIXED = 0,
  VLP_SKIP_MODE_VARIABLE = 1,
} VlpSkipMode;

/*
 Result codes.
 */
typedef enum VlpStatus {
  VLP_STATUS_OK = 0,
  VLP_STATUS_NULL_ARGUMENT = 1,
  VLP_STATUS_INVALID_ARGUMENT = 2,
  VLP_STATUS_PATTERN_ERROR = 3,
  VLP_STATUS_DATA_ERROR = 4,
  VLP_STATUS_INVARIANT_VIOLATION = 5,
  VLP_STATUS_PANIC = 6,
} VlpStatus;

typedef enum VlpWeight {
  VLP_WEIGHT_COUNT = 0,
  VLP_WEIGHT_PERIODICITY = 1,
  VLP_WEIGHT_RESONANCE = 2,
  VLP_WEIGHT_PROXIMITY = 3,
  VLP_WEIGHT_RESONANT_PERIODICITY = 4,
} VlpWeight;

/*
 An expanded, encoded-ready corpus.
 */
typedef struct VlpCorpus VlpCorpus;

/*
 One pipeline configuration.
 */
typedef struct VlpMineConfig {
  /*
   Members per n-gram.
   */
  uint32_t n;
  enum VlpSkipMode skip_mode;
  /*
   Skip budget for `VLP_SKIP_MODE_FIXED`.
   */
  uint32_t fixed_skip;
  /*
   Window in seconds for `VLP_SKIP_MODE_VARIABLE`.
   */
  double window;
  enum VlpBudget budget;
  enum VlpWeight weight;
  enum VlpFilter filter;
  /*
   Threshold of the frequency filter.
   */
  double min_count;
  enum VlpMeasure measure;
} VlpMineConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next library call on this thread.
 */
const char *vlp_last_error_message(void);

/*
 Releases a string returned by the library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void vlp_string_free(char *s);

/*
 Loads a note-event file or directory.

 # Safety
 `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum VlpStatus vlp_corpus_load(const char *path, struct VlpCorpus **out);

/*
 Parses note-event text held in memory.

 # Safety
 `data` must point to `len` readable bytes and `out` be a valid pointer.
 */
enum VlpStatus vlp_corpus_parse(const uint8_t *data, size_t len, struct VlpCorpus **out);

/*
 Releases a corpus. Null is ignored.

 # Safety
 `corpus` must come from this library and not have been freed.
 */
void vlp_corpus_free(struct VlpCorpus *corpus);

/*
 Number of pieces; 0 for null.

 # Safety
 `corpus` must be null or a live corpus.
 */
size_t vlp_corpus_piece_count(const struct VlpCorpus *corpus);

/*
 Number of slices over all pieces; 0 for null.

 # Safety
 `corpus` must be null or a live corpus.
 */
size_t vlp_corpus_slice_count(const struct VlpCorpus *corpus);

/*
 Rewrites a pattern in canonical form.

 # Safety
 `text` must be nul-terminated and `out` a valid pointer.
 */
enum VlpStatus vlp_pattern_normalize(const char *text, char **out);

/*
 Baseline configuration: trigrams, contiguous, counted, unfiltered,
 ranked by count.
 */
struct VlpMineConfig vlp_mine_config_default(void);

/*
 Ranks the corpus's n-gram types under `config`.

 On success `*out_csv` holds the ranked list (`rank,score,count,coverage,type`)
 and, when `query` is non-null, `*out_query_rank` holds the query's rank
 or -1 if it is absent.

 # Safety
 `corpus` and `config` must be valid; `query` may be null; `out_csv` must
 be valid; `out_query_rank` may be null.
 */
enum VlpStatus vlp_mine(const struct VlpCorpus *corpus,
                        const struct VlpMineConfig *config,
                        const char *query,
                        char **out_csv,
                        int64_t *out_query_rank);

/*
 Runs the full configuration grid for `query` with n-grams of size `n`.
 `jobs` = 0 uses every core. `*out_csv` receives the grid CSV.

 # Safety
 `corpus`, `query` and `out_csv` must be valid.
 */
enum VlpStatus vlp_grid(const struct VlpCorpus *corpus,
                        const char *query,
                        uint32_t n,
                        uint32_t jobs,
                        char **out_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VLPATTERNS_H */
