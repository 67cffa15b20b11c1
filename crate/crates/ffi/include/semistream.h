#ifndef SEMISTREAM_H
#define SEMISTREAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The nonzero values match the CLI exit codes where both exist.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_OTHER = 1,
  SS_STATUS_PARAMETER = 2,
  SS_STATUS_DOMAIN = 3,
  SS_STATUS_RETRIES_EXHAUSTED = 4,
  SS_STATUS_BUDGET = 5,
  SS_STATUS_MALFORMED_STREAM = 6,
  SS_STATUS_NULL_POINTER = 7,
  SS_STATUS_INVALID_UTF8 = 8,
  SS_STATUS_BUFFER_TOO_SMALL = 9,
  SS_STATUS_PANIC = 10,
} SsStatus;

/**
 * An edge stream, insertion-only or turnstile.
 */
typedef struct SsStream SsStream;

/**
 * A rooted spanning tree with the number of passes that produced it.
 */
typedef struct SsTree SsTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next `ss_*` call on the same thread.
 */
const char *ss_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ss_version(void);

/**
 * Parses a stream in the text format (`n <N> model <ins|turn>` header,
 * then `+ u v` / `- u v` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SsStatus ss_stream_parse(const char *text, struct SsStream **out);

/**
 * Generates a fixture stream, e.g. `gnp:100,0.05` or `layered:1000,25`.
 * With `turnstile` nonzero, deletions of extra edges are mixed in.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SsStatus ss_stream_generate(const char *spec,
                                 uint64_t seed,
                                 int32_t turnstile,
                                 struct SsStream **out);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
uint64_t ss_stream_nodes(const struct SsStream *stream);

/**
 * Nonzero for turnstile streams.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
int32_t ss_stream_is_turnstile(const struct SsStream *stream);

/**
 * # Safety
 * `stream` must be null or a handle not freed before.
 */
void ss_stream_free(struct SsStream *stream);

/**
 * Approximate max-leaf spanning tree.
 *
 * # Safety
 * `stream` must be a live handle and `out` a valid pointer.
 */
enum SsStatus ss_mlst(const struct SsStream *stream,
                      double epsilon,
                      uint64_t seed,
                      struct SsTree **out);

/**
 * Exact BFS tree keeping ceil(n/p) neighbours per node, in O(p) passes
 * (insertion-only streams).
 *
 * # Safety
 * `stream` must be a live handle and `out` a valid pointer.
 */
enum SsStatus ss_bfs_deterministic(const struct SsStream *stream,
                                   uint64_t root,
                                   uint64_t p,
                                   struct SsTree **out);

/**
 * BFS tree from sampled centers. `k` is the center budget and
 * `confidence` the radius constant (3 is the usual choice). Retries up to
 * five times with derived seeds.
 *
 * # Safety
 * `stream` must be a live handle and `out` a valid pointer.
 */
enum SsStatus ss_bfs_randomized(const struct SsStream *stream,
                                uint64_t root,
                                uint64_t k,
                                double confidence,
                                uint64_t seed,
                                struct SsTree **out);

/**
 * DFS tree by layered certificates, freezing `k` layers per round.
 *
 * # Safety
 * `stream` must be a live handle and `out` a valid pointer.
 */
enum SsStatus ss_dfs_simple(const struct SsStream *stream,
                            uint64_t root,
                            uint64_t k,
                            uint64_t seed,
                            struct SsTree **out);

/**
 * DFS tree by separator decomposition with parameters `1 <= s <= k <= n`.
 *
 * # Safety
 * `stream` must be a live handle and `out` a valid pointer.
 */
enum SsStatus ss_dfs_aa(const struct SsStream *stream,
                        uint64_t root,
                        uint64_t k,
                        uint64_t s,
                        uint64_t seed,
                        struct SsTree **out);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `tree` must be null or a live handle.
 */
uint64_t ss_tree_nodes(const struct SsTree *tree);

/**
 * # Safety
 * `tree` must be null or a live handle.
 */
uint64_t ss_tree_root(const struct SsTree *tree);

/**
 * # Safety
 * `tree` must be null or a live handle.
 */
uint64_t ss_tree_leaves(const struct SsTree *tree);

/**
 * Stream passes used to build the tree.
 *
 * # Safety
 * `tree` must be null or a live handle.
 */
uint64_t ss_tree_passes(const struct SsTree *tree);

/**
 * Copies the parent of every node into `buf` (`UINT64_MAX` for the root).
 * `len` must be at least the node count.
 *
 * # Safety
 * `tree` must be a live handle and `buf` valid for `len` writes.
 */
enum SsStatus ss_tree_parents(const struct SsTree *tree, uint64_t *buf, size_t len);

/**
 * Copies the depth of every node into `buf`.
 *
 * # Safety
 * `tree` must be a live handle and `buf` valid for `len` writes.
 */
enum SsStatus ss_tree_depths(const struct SsTree *tree, uint64_t *buf, size_t len);

/**
 * # Safety
 * `tree` must be null or a handle not freed before.
 */
void ss_tree_free(struct SsTree *tree);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMISTREAM_H */
