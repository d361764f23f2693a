#ifndef GDH_H
#define GDH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum GdhStatus {
  GDH_STATUS_OK = 0,
  GDH_STATUS_NULL_POINTER = 1,
  GDH_STATUS_INVALID_UTF8 = 2,
  GDH_STATUS_PARSE = 3,
  GDH_STATUS_INVALID_INPUT = 4,
  GDH_STATUS_THEORY_MISMATCH = 5,
  // A search stopped at its node budget; outputs hold a lower bound.
  GDH_STATUS_BUDGET = 6,
  GDH_STATUS_PANIC = 7,
} GdhStatus;

// A list of forbidden graphs over a theory.
typedef struct GdhFamily GdhFamily;

// A graph over a theory.
typedef struct GdhGraph GdhGraph;

// Position symmetry group of an arity.
typedef struct GdhTheory GdhTheory;

// Outcome of [`gdh_extremal_number`].
typedef struct GdhSearchSummary {
  uint64_t best_edge_count;
  uint64_t nodes_explored;
  double density_bound;
  bool exhaustive;
} GdhSearchSummary;

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *gdh_last_error_message(void);

// # Safety
// `s` must come from this library or be null.
void gdh_string_free(char *s);

// Parse a theory record (`r <arity>` then `gen ...` lines).
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum GdhStatus gdh_theory_parse(const char *text, struct GdhTheory **out);

// # Safety
// `t` must come from [`gdh_theory_parse`] or be null.
void gdh_theory_free(struct GdhTheory *t);

// # Safety
// Pointers must be valid.
enum GdhStatus gdh_theory_info(const struct GdhTheory *t, uintptr_t *arity, uintptr_t *order);

// Parse a graph (`n <count>` then edges, or the JSON mirror).
//
// # Safety
// Pointers must be valid; `text` nul-terminated.
enum GdhStatus gdh_graph_parse(const struct GdhTheory *theory,
                               const char *text,
                               struct GdhGraph **out);

// # Safety
// `g` must come from this library or be null.
void gdh_graph_free(struct GdhGraph *g);

// # Safety
// Pointers must be valid.
enum GdhStatus gdh_graph_counts(const struct GdhGraph *g, uintptr_t *vertices, uintptr_t *edges);

// # Safety
// Pointers must be valid.
enum GdhStatus gdh_graph_density(const struct GdhGraph *g, double *out);

// Text form of the graph; free with [`gdh_string_free`].
//
// # Safety
// Pointers must be valid.
enum GdhStatus gdh_graph_serialize(const struct GdhGraph *g, char **out);

// Parse a family (`family <k>` then graph records separated by `---`).
//
// # Safety
// Pointers must be valid; `text` nul-terminated.
enum GdhStatus gdh_family_parse(const struct GdhTheory *theory,
                                const char *text,
                                struct GdhFamily **out);

// # Safety
// `f` must come from this library or be null.
void gdh_family_free(struct GdhFamily *f);

// # Safety
// Pointers must be valid.
enum GdhStatus gdh_family_len(const struct GdhFamily *f, uintptr_t *out);

// Whether `host` has a subgraph isomorphic to `pattern`.
//
// # Safety
// Pointers must be valid.
enum GdhStatus gdh_contains(const struct GdhGraph *host, const struct GdhGraph *pattern, bool *out);

// Copies of `pattern` in `host` (injective homomorphisms over automorphisms).
//
// # Safety
// Pointers must be valid.
enum GdhStatus gdh_count_copies(const struct GdhGraph *pattern,
                                const struct GdhGraph *host,
                                uint64_t *out);

// Multi-start lower bound on the blowup density. When `weights` is not null
// it receives the maximizing weights and must hold `weights_len` ≥ vertex
// count entries.
//
// # Safety
// Pointers must be valid; `weights` may be null.
enum GdhStatus gdh_blowup_density(const struct GdhGraph *g,
                                  uintptr_t starts,
                                  uint64_t seed,
                                  double *value,
                                  double *weights,
                                  uintptr_t weights_len);

// Exact extremal number on `n` vertices. Returns [`GdhStatus::Budget`] with
// the summary filled in when the budget ran out. `witness` may be null.
//
// # Safety
// Pointers must be valid; `witness` may be null.
enum GdhStatus gdh_extremal_number(const struct GdhTheory *theory,
                                   uintptr_t n,
                                   const struct GdhFamily *family,
                                   uint64_t budget,
                                   struct GdhSearchSummary *summary,
                                   struct GdhGraph **witness);

// The chain-free 2→1 construction on `n` ≥ 3 vertices.
//
// # Safety
// `out` must be writable.
enum GdhStatus gdh_langlois_construction(uintptr_t n, struct GdhGraph **out);

#endif  /* GDH_H */
