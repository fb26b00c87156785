#ifndef SNIP_H
#define SNIP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SnipStatus {
  SNIP_STATUS_OK = 0,
  SNIP_STATUS_NULL_POINTER = 1,
  SNIP_STATUS_INVALID_UTF8 = 2,
  SNIP_STATUS_CONFIG_ERROR = 3,
  SNIP_STATUS_DATA_ERROR = 4,
  SNIP_STATUS_IO_ERROR = 5,
  SNIP_STATUS_PANIC = 6,
} SnipStatus;

/**
 * Result of one deduplication run.
 */
typedef struct SnipDedupResult SnipDedupResult;

/**
 * Parsed pedigree data set.
 */
typedef struct SnipPedigreeSet SnipPedigreeSet;

/**
 * Partition comparison. `pairwise_defined` is 0 when pairwise precision or
 * recall has a zero denominator; the pairwise fields are then 0.
 */
typedef struct SnipMetrics {
  double pairwise_precision;
  double pairwise_recall;
  double pairwise_f1;
  int32_t pairwise_defined;
  double cluster_precision;
  double cluster_recall;
  double cluster_f1;
  uint64_t gmd;
} SnipMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *snip_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *snip_version(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void snip_string_free(char *s);

/**
 * Reads a pedigree CSV file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SnipStatus snip_pedigree_set_from_csv_path(const char *path, struct SnipPedigreeSet **out);

/**
 * Parses pedigree CSV text.
 *
 * # Safety
 * `csv` must be a NUL-terminated string; `out` must be writable.
 */
enum SnipStatus snip_pedigree_set_from_csv_str(const char *csv, struct SnipPedigreeSet **out);

/**
 * Number of families, or 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t snip_pedigree_set_family_count(const struct SnipPedigreeSet *set);

/**
 * # Safety
 * `set` must be null or a live handle; it is invalid afterwards.
 */
void snip_pedigree_set_free(struct SnipPedigreeSet *set);

/**
 * Deduplicates `set` with a `key = value` configuration.
 *
 * # Safety
 * `set` must be a live handle, `config` a NUL-terminated string and `out`
 * writable.
 */
enum SnipStatus snip_dedup_run(const struct SnipPedigreeSet *set,
                               const char *config,
                               struct SnipDedupResult **out);

/**
 * Number of clusters, or 0 for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
size_t snip_dedup_result_cluster_count(const struct SnipDedupResult *res);

/**
 * Number of families kept in the deduplicated set, or 0 for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
size_t snip_dedup_result_family_count(const struct SnipDedupResult *res);

/**
 * Cluster assignments as CSV (`famID,clusterID,isRepresentative`).
 *
 * # Safety
 * `res` must be a live handle and `out` writable. Free the string with
 * [`snip_string_free`].
 */
enum SnipStatus snip_dedup_result_clusters_csv(const struct SnipDedupResult *res, char **out);

/**
 * Deduplicated pedigree rows as CSV.
 *
 * # Safety
 * `res` must be a live handle and `out` writable. Free the string with
 * [`snip_string_free`].
 */
enum SnipStatus snip_dedup_result_dedup_csv(const struct SnipDedupResult *res, char **out);

/**
 * # Safety
 * `res` must be null or a live handle; it is invalid afterwards.
 */
void snip_dedup_result_free(struct SnipDedupResult *res);

/**
 * Compares two partitions given as CSV text whose first two columns are a
 * famID and its cluster label.
 *
 * # Safety
 * Both strings must be NUL-terminated and `out` writable.
 */
enum SnipStatus snip_evaluate(const char *clusters_csv,
                              const char *truth_csv,
                              struct SnipMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNIP_H */
