#ifndef BNB_TSP_H
#define BNB_TSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Version of this ABI; bumped on any incompatible change.
#define BNB_ABI_VERSION 1

// Cost sentinel for an infinite (forbidden) arc in `bnb_matrix_from_costs`.
#define BNB_INFINITY INT64_MAX

typedef enum BnbStatus {
  BNB_STATUS_OK = 0,
  BNB_STATUS_NULL_ARGUMENT = 1,
  BNB_STATUS_INVALID_UTF8 = 2,
  BNB_STATUS_PARSE = 3,
  BNB_STATUS_INVALID_INPUT = 4,
  BNB_STATUS_UNSUPPORTED_SIZE = 5,
  BNB_STATUS_INVALID_TOUR = 6,
  BNB_STATUS_ARITHMETIC = 7,
  BNB_STATUS_BUFFER_TOO_SMALL = 8,
  BNB_STATUS_PANIC = 9,
} BnbStatus;

typedef enum BnbChainVerdict {
  // Not a chain audit, or no definite verdict.
  BNB_CHAIN_VERDICT_NONE = 0,
  BNB_CHAIN_VERDICT_VIOLATES = 1,
  BNB_CHAIN_VERDICT_SATISFIES = 2,
  BNB_CHAIN_VERDICT_DEGENERATE = 3,
} BnbChainVerdict;

// Opaque cost matrix.
typedef struct BnbMatrix BnbMatrix;

// Opaque audit report.
typedef struct BnbReport BnbReport;

// Opaque solver result with its comparison trace.
typedef struct BnbSolution BnbSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t bnb_abi_version(void);

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *bnb_last_error(void);

// Static name of a status code.
const char *bnb_status_name(enum BnbStatus status);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void bnb_string_free(char *s);

// Parses a matrix in the text or structured format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum BnbStatus bnb_matrix_parse(const char *text, struct BnbMatrix **out);

// Builds a matrix from `n * n` row-major costs. Diagonal entries are
// ignored; `BNB_INFINITY` marks a forbidden arc.
//
// # Safety
// `costs` must point to `n * n` readable values and `out` be valid.
enum BnbStatus bnb_matrix_from_costs(size_t n, const int64_t *costs, struct BnbMatrix **out);

// # Safety
// `m` must be a live matrix handle.
enum BnbStatus bnb_matrix_n(const struct BnbMatrix *m, size_t *n);

// Canonical text form of the matrix.
//
// # Safety
// `m` must be a live matrix handle and `out` a valid pointer.
enum BnbStatus bnb_matrix_to_text(const struct BnbMatrix *m, char **out);

// # Safety
// `m` must be null or a matrix handle not yet freed.
void bnb_matrix_free(struct BnbMatrix *m);

// Runs the traced branch-and-bound solver.
//
// # Safety
// `m` must be a live matrix handle and `out` a valid pointer.
enum BnbStatus bnb_solve(const struct BnbMatrix *m, struct BnbSolution **out);

// # Safety
// `s` must be a live solution handle and `length` a valid pointer.
enum BnbStatus bnb_solution_length(const struct BnbSolution *s, int64_t *length);

// Writes the tour in cycle order starting at vertex 1. `*written` receives
// the tour size; when `capacity` is smaller nothing else is written and
// `BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `buf` must hold `capacity` values; `written` must be valid.
enum BnbStatus bnb_solution_tour(const struct BnbSolution *s,
                                 size_t *buf,
                                 size_t capacity,
                                 size_t *written);

// Number of comparison events, all or nontrivial only.
//
// # Safety
// `s` must be a live solution handle and `count` a valid pointer.
enum BnbStatus bnb_solution_event_count(const struct BnbSolution *s,
                                        bool nontrivial_only,
                                        size_t *count);

// The trace as JSON lines.
//
// # Safety
// `s` must be a live solution handle and `out` a valid pointer.
enum BnbStatus bnb_solution_trace_jsonl(const struct BnbSolution *s,
                                        bool filter_trivial,
                                        char **out);

// # Safety
// `s` must be null or a solution handle not yet freed.
void bnb_solution_free(struct BnbSolution *s);

// Built-in audit of the 5-vertex node counterexample.
//
// # Safety
// `out` must be a valid pointer.
enum BnbStatus bnb_audit_section4(struct BnbReport **out);

// Built-in audit of the 4-vertex chain counterexample.
//
// # Safety
// `out` must be a valid pointer.
enum BnbStatus bnb_audit_section5(struct BnbReport **out);

// Audits the chain of `m` against the tour given in cycle order.
//
// # Safety
// `tour` must hold `len` values; `m` must be live and `out` valid.
enum BnbStatus bnb_audit_chain(const struct BnbMatrix *m,
                               const size_t *tour,
                               size_t len,
                               struct BnbReport **out);

// Randomized check of the fixed witness construction, `4 <= n <= 6`.
//
// # Safety
// `out` must be a valid pointer.
enum BnbStatus bnb_lemma1_suite(uint64_t seed, size_t cases, size_t n, struct BnbReport **out);

// # Safety
// `r` must be a live report handle and `passed` a valid pointer.
enum BnbStatus bnb_report_passed(const struct BnbReport *r, bool *passed);

// # Safety
// `r` must be a live report handle and `verdict` a valid pointer.
enum BnbStatus bnb_report_chain_verdict(const struct BnbReport *r, enum BnbChainVerdict *verdict);

// The report as pretty-printed JSON.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum BnbStatus bnb_report_json(const struct BnbReport *r, char **out);

// Human-readable summary, one line per item.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum BnbStatus bnb_report_summary(const struct BnbReport *r, char **out);

// # Safety
// `r` must be null or a report handle not yet freed.
void bnb_report_free(struct BnbReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BNB_TSP_H */
