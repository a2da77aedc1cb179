#ifndef MVGALLERY_H
#define MVGALLERY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. The nonzero values match the exit codes of the
// command-line tool where they overlap.
typedef enum MvgStatus {
  MVG_STATUS_OK = 0,
  MVG_STATUS_NULL_POINTER = 1,
  MVG_STATUS_CONFIG = 2,
  MVG_STATUS_INVARIANT = 3,
  MVG_STATUS_PRECISION = 4,
  MVG_STATUS_PANIC = 5,
} MvgStatus;

// A root system with a dominant coweight and its minimal gallery type.
typedef struct MvgModel MvgModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *mvg_last_error(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void mvg_string_free(char *s);

// Builds a model from a type label such as `"A2"` and a dominant coweight
// in simple-coroot coordinates such as `"1,1"`.
//
// # Safety
// `type_label` and `lambda` must be NUL-terminated strings; `out` must be
// writable.
enum MvgStatus mvg_model_new(const char *type_label, const char *lambda, struct MvgModel **out);

// Frees a model. Null is ignored.
//
// # Safety
// `m` must come from [`mvg_model_new`] and not have been freed.
void mvg_model_free(struct MvgModel *m);

// Rank of the root system.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_model_rank(const struct MvgModel *m, uintptr_t *out);

// Length `p` of the minimal gallery type.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_model_gallery_length(const struct MvgModel *m, uintptr_t *out);

// Number of LS galleries, checked against the Weyl dimension formula and
// Freudenthal multiplicities.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_crystal_size(const struct MvgModel *m, uintptr_t *out);

// Weyl dimension of the irreducible representation of highest weight
// lambda.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_weyl_dimension(const struct MvgModel *m, uint64_t *out);

// Crystal graph as JSON. The string is written even when a check fails.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_crystal_json(const struct MvgModel *m, uint64_t seed, char **out);

// MV polytopes of the LS galleries as JSON, restricted to weight `nu`
// (simple-coroot coordinates) unless `nu` is null.
//
// # Safety
// `m` must be a live model, `nu` null or a NUL-terminated string, and
// `out` writable.
enum MvgStatus mvg_polytopes_json(const struct MvgModel *m, const char *nu, char **out);

// Retraction report as JSON (five samples per pair). Type A only.
//
// # Safety
// `m` must be a live model and `out` writable.
enum MvgStatus mvg_verify_retraction_json(const struct MvgModel *m, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MVGALLERY_H */
