#ifndef SARCKIT_H
#define SARCKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SarckitStatus {
  SARCKIT_STATUS_OK = 0,
  SARCKIT_STATUS_NULL_ARGUMENT = 1,
  SARCKIT_STATUS_INVALID_UTF8 = 2,
  SARCKIT_STATUS_IO = 3,
  SARCKIT_STATUS_PARSE = 4,
  SARCKIT_STATUS_INVALID_ARGUMENT = 5,
  SARCKIT_STATUS_DATA = 6,
  SARCKIT_STATUS_PANIC = 7,
} SarckitStatus;

typedef enum SarckitFormat {
  SARCKIT_FORMAT_JSONL = 0,
  SARCKIT_FORMAT_CSV = 1,
} SarckitFormat;

typedef enum SarckitLabel {
  SARCKIT_LABEL_SARCASTIC = 0,
  SARCKIT_LABEL_NOT_SARCASTIC = 1,
} SarckitLabel;

/**
 * Tokenizer, tagger and chunker with their lexicons.
 */
typedef struct SarckitAnalyzer SarckitAnalyzer;

typedef struct SarckitCorpus SarckitCorpus;

typedef struct SarckitDetector SarckitDetector;

/**
 * Per-class pattern counts and the template set they were counted with.
 */
typedef struct SarckitPatternStats SarckitPatternStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. Valid until the next call on this thread.
 */
const char *sarckit_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *sarckit_version(void);

/**
 * Word count used by the length filter.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SarckitStatus sarckit_word_count(const char *text, uintptr_t *out);

/**
 * Analyzer with the shipped lexicons, or the directory named by
 * `SARCKIT_LEXICON_DIR` when set.
 *
 * # Safety
 * `out` must be writable.
 */
enum SarckitStatus sarckit_analyzer_new(struct SarckitAnalyzer **out);

/**
 * # Safety
 * `a` must come from [`sarckit_analyzer_new`] and not be used afterwards.
 */
void sarckit_analyzer_free(struct SarckitAnalyzer *a);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SarckitStatus sarckit_corpus_load(const char *path,
                                       enum SarckitFormat format,
                                       struct SarckitCorpus **out);

/**
 * Parses JSON-lines records held in memory.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SarckitStatus sarckit_corpus_from_jsonl(const char *text, struct SarckitCorpus **out);

/**
 * Number of posts; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live corpus handle.
 */
uintptr_t sarckit_corpus_len(const struct SarckitCorpus *c);

/**
 * Number of posts carrying `label`; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live corpus handle.
 */
uintptr_t sarckit_corpus_count_of(const struct SarckitCorpus *c, enum SarckitLabel label);

/**
 * # Safety
 * `c` must come from a corpus constructor and not be used afterwards.
 */
void sarckit_corpus_free(struct SarckitCorpus *c);

/**
 * Counts template instantiations per class over a fully labeled corpus.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SarckitStatus sarckit_count_patterns(const struct SarckitCorpus *corpus,
                                          const struct SarckitAnalyzer *analyzer,
                                          bool adv_adv,
                                          struct SarckitPatternStats **out);

/**
 * Number of distinct patterns; 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
uintptr_t sarckit_pattern_stats_len(const struct SarckitPatternStats *s);

/**
 * Writes the statistics table as TSV.
 *
 * # Safety
 * `s` must be live; `path` must be a NUL-terminated string.
 */
enum SarckitStatus sarckit_pattern_stats_write_tsv(const struct SarckitPatternStats *s,
                                                   const char *path);

/**
 * # Safety
 * `s` must come from [`sarckit_count_patterns`] and not be used afterwards.
 */
void sarckit_pattern_stats_free(struct SarckitPatternStats *s);

/**
 * Detector over the patterns of `label` with frequency ≥ `theta_f` and
 * probability ≥ `theta_p`; it hits a post with ≥ `theta_n` match sites.
 *
 * # Safety
 * `stats` must be live; `out` must be writable.
 */
enum SarckitStatus sarckit_detector_new(const struct SarckitPatternStats *stats,
                                        enum SarckitLabel label,
                                        uint64_t theta_f,
                                        double theta_p,
                                        uintptr_t theta_n,
                                        struct SarckitDetector **out);

/**
 * Number of patterns the detector looks for; 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
uintptr_t sarckit_detector_len(const struct SarckitDetector *d);

/**
 * Classifies one response text. `out_hit` receives whether the detector
 * fires, `out_sites` (may be null) the number of match sites.
 *
 * # Safety
 * Handles must be live; `text` must be a NUL-terminated string; `out_hit`
 * must be writable.
 */
enum SarckitStatus sarckit_detector_classify(const struct SarckitDetector *d,
                                             const struct SarckitAnalyzer *analyzer,
                                             const char *text,
                                             bool *out_hit,
                                             uintptr_t *out_sites);

/**
 * # Safety
 * `d` must come from [`sarckit_detector_new`] and not be used afterwards.
 */
void sarckit_detector_free(struct SarckitDetector *d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SARCKIT_H */
