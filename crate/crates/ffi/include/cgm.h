#ifndef CGM_H
#define CGM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgmStatus {
  CGM_STATUS_OK = 0,
  CGM_STATUS_NULL_ARGUMENT = 1,
  CGM_STATUS_INVALID_UTF8 = 2,
  CGM_STATUS_IO = 3,
  CGM_STATUS_CONTRACT = 4,
  CGM_STATUS_MALFORMED = 5,
  CGM_STATUS_OUT_OF_RANGE = 6,
  CGM_STATUS_PANIC = 7,
} CgmStatus;

/**
 * Opaque code graph.
 */
typedef struct CgmGraph CgmGraph;

/**
 * Opaque attention mask.
 */
typedef struct CgmMask CgmMask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a graph from the source directory `root`.
 *
 * # Safety
 * `root` must be a NUL-terminated string; `out` must be writable.
 */
enum CgmStatus cgm_graph_build(const char *root, struct CgmGraph **out);

/**
 * Parses a graph document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CgmStatus cgm_graph_load_json(const char *json, struct CgmGraph **out);

/**
 * # Safety
 * `graph` must come from this library; `out` must be writable.
 */
enum CgmStatus cgm_graph_to_json(const struct CgmGraph *graph, char **out);

/**
 * Writes the number of structural violations; zero means valid.
 *
 * # Safety
 * `graph` must come from this library; `violations` must be writable.
 */
enum CgmStatus cgm_graph_validate(const struct CgmGraph *graph, size_t *violations);

/**
 * # Safety
 * `graph` must come from this library; `nodes` and `edges` must be writable.
 */
enum CgmStatus cgm_graph_counts(const struct CgmGraph *graph, size_t *nodes, size_t *edges);

/**
 * # Safety
 * `graph` must come from this library; `out` must be writable.
 */
enum CgmStatus cgm_graph_linearize(const struct CgmGraph *graph, char **out);

/**
 * # Safety
 * `graph` must come from this library and not be used afterwards. NULL is
 * ignored.
 */
void cgm_graph_free(struct CgmGraph *graph);

/**
 * Mask over the graph's chunks followed by `text_tokens` text positions.
 *
 * # Safety
 * `graph` must come from this library; `out` must be writable.
 */
enum CgmStatus cgm_mask_build(const struct CgmGraph *graph,
                              size_t chunk_size,
                              size_t text_tokens,
                              struct CgmMask **out);

/**
 * Total positions; 0 for NULL.
 *
 * # Safety
 * `mask` must come from this library or be NULL.
 */
size_t cgm_mask_size(const struct CgmMask *mask);

/**
 * Whether position `i` may attend to position `j`.
 *
 * # Safety
 * `mask` must come from this library; `allowed` must be writable.
 */
enum CgmStatus cgm_mask_get(const struct CgmMask *mask, size_t i, size_t j, bool *allowed);

/**
 * # Safety
 * `mask` must come from this library and not be used afterwards. NULL is
 * ignored.
 */
void cgm_mask_free(struct CgmMask *mask);

/**
 * # Safety
 * `prediction` and `reference` must be NUL-terminated; `out` writable.
 */
enum CgmStatus cgm_edit_similarity(const char *prediction, const char *reference, double *out);

/**
 * # Safety
 * `prediction` and `reference` must be NUL-terminated; `out` writable.
 */
enum CgmStatus cgm_exact_match(const char *prediction, const char *reference, uint8_t *out);

/**
 * Copy of the calling thread's last error message, or NULL. Free with
 * `cgm_string_free`.
 */
char *cgm_last_error_message(void);

/**
 * # Safety
 * `s` must be a string returned by this library, or NULL.
 */
void cgm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGM_H */
