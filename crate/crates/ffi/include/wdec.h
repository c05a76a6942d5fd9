#ifndef WDEC_H
#define WDEC_H

/* Generated by cbindgen from the wdec-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Validity over the extended Weihrauch degrees.
 */
#define WDEC_MODE_EXTENDED 0

/*
 Validity over the pointed Weihrauch degrees.
 */
#define WDEC_MODE_POINTED 1

/*
 Status codes returned by every fallible entry point.
 */
typedef enum WdecStatus {
  WdecOk = 0,
  /*
   Malformed term syntax or certificate text.
   */
  WdecErrParse = 1,
  /*
   Pointed mode rejects terms containing `T` or `0`.
   */
  WdecErrUnsupportedTerm = 2,
  /*
   The reachable position budget was exhausted.
   */
  WdecErrBudgetExceeded = 3,
  /*
   Null pointer, unknown handle, bad mode or invalid UTF-8.
   */
  WdecErrInvalidArgument = 4,
  /*
   Certificate replay failed its independent check.
   */
  WdecErrCertificateRejected = 5,
  /*
   Unexpected internal failure; see the last error message.
   */
  WdecErrInternal = 6,
} WdecStatus;

/*
 Opaque term pool. One pool per logical session; term handles must not
 cross pools.
 */
typedef struct WdecPool WdecPool;

/*
 Decision outcome.
 */
typedef struct WdecVerdict {
  /*
   1 when the inequation is universally valid.
   */
  uint8_t valid;
  /*
   Number of reachable game positions explored.
   */
  uint64_t positions_explored;
  /*
   Stable digest of the constructed arena, echoed in certificates.
   */
  uint64_t arena_digest;
} WdecVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread. Owned by the
 library; valid until the next failing call on the same thread.
 */
const char *wdec_last_error_message(void);

/*
 Creates a fresh pool.
 */
struct WdecPool *wdec_pool_new(void);

/*
 Releases a pool and every term in it.

 # Safety
 `pool` must have come from [`wdec_pool_new`] and not been freed yet.
 */
void wdec_pool_free(struct WdecPool *pool);

/*
 Releases a string returned by this library.

 # Safety
 `s` must have been returned through one of this library's string
 out-parameters and not been freed yet.
 */
void wdec_string_free(char *s);

/*
 Parses the concrete term syntax (`|`, `&`, `*`, postfix `^`, `0`, `1`,
 `T`, parentheses) and writes the interned handle to `out_term`.

 # Safety
 `pool` must be a live pool, `text` a NUL-terminated string, and
 `out_term` writable.
 */
enum WdecStatus wdec_parse(const struct WdecPool *pool, const char *text, uint32_t *out_term);

/*
 Renders a term in canonical syntax; the caller frees the string.

 # Safety
 `pool` must be a live pool and `out_text` writable.
 */
enum WdecStatus wdec_print(const struct WdecPool *pool, uint32_t term, char **out_text);

/*
 Writes the number of abstract-syntax nodes of `term` to `out_size`.

 # Safety
 `pool` must be a live pool and `out_size` writable.
 */
enum WdecStatus wdec_term_size(const struct WdecPool *pool, uint32_t term, uint32_t *out_size);

/*
 Decides whether `lhs <= rhs` is universally valid in the chosen mode.
 A `max_positions` of 0 selects the default budget.

 # Safety
 `pool` must be a live pool and `out_verdict` writable.
 */
enum WdecStatus wdec_decide(const struct WdecPool *pool,
                            uint32_t lhs,
                            uint32_t rhs,
                            int32_t mode,
                            uint64_t max_positions,
                            struct WdecVerdict *out_verdict);

/*
 Like [`wdec_decide`], additionally returning the winner's certificate
 as a Graphviz document when `out_certificate` is non-null.

 # Safety
 `pool` must be a live pool, `out_verdict` writable, and
 `out_certificate` either null or writable.
 */
enum WdecStatus wdec_decide_with_certificate(const struct WdecPool *pool,
                                             uint32_t lhs,
                                             uint32_t rhs,
                                             int32_t mode,
                                             uint64_t max_positions,
                                             struct WdecVerdict *out_verdict,
                                             char **out_certificate);

/*
 Replays a certificate produced by [`wdec_decide_with_certificate`]
 against a freshly rebuilt arena. On success writes 1 to
 `out_valid_claim` when the certificate proves validity (Duplicator
 wins) and 0 when it refutes it (Spoiler wins).

 # Safety
 `certificate` must be a NUL-terminated string and `out_valid_claim`
 writable.
 */
enum WdecStatus wdec_check_certificate(const char *certificate, uint8_t *out_valid_claim);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WDEC_H */
