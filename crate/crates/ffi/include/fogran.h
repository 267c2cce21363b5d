#ifndef FOGRAN_H
#define FOGRAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FogranStatus {
  FOGRAN_STATUS_OK = 0,
  FOGRAN_STATUS_NULL_POINTER = 1,
  FOGRAN_STATUS_INVALID_ARGUMENT = 2,
  FOGRAN_STATUS_UNSUPPORTED = 3,
  FOGRAN_STATUS_VALIDATION_FAILED = 4,
  FOGRAN_STATUS_BUFFER_TOO_SMALL = 5,
  FOGRAN_STATUS_PANIC = 6,
} FogranStatus;

/**
 * Opaque schedule handle.
 */
typedef struct FogranSchedule FogranSchedule;

/**
 * Opaque network handle.
 */
typedef struct FogranTopology FogranTopology;

typedef struct FogranTransmission {
  size_t slot;
  size_t stage;
  uint8_t phase;
  size_t en;
  size_t user;
  size_t file_id;
  size_t tau;
} FogranTransmission;

typedef struct FogranRational {
  int64_t num;
  int64_t den;
} FogranRational;

typedef struct FogranNdtReport {
  size_t slots;
  size_t deliveries;
  struct FogranRational sum_dof;
  struct FogranRational ndt_exact;
  struct FogranRational ndt_bound;
} FogranNdtReport;

/**
 * `value` is meaningless when `infinite` is set.
 */
typedef struct FogranNdt {
  bool infinite;
  struct FogranRational value;
} FogranNdt;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *fogran_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum FogranStatus fogran_topology_new(size_t k, size_t d, struct FogranTopology **out);

/**
 * # Safety
 * `topology` must be null or a handle from [`fogran_topology_new`] not yet freed.
 */
void fogran_topology_free(struct FogranTopology *topology);

/**
 * Users reached by EN `en`. Writes up to `cap` indices into `buf` and the
 * full count into `len`.
 *
 * # Safety
 * `topology` must be a live handle, `len` writable, and `buf` valid for
 * `cap` elements.
 */
enum FogranStatus fogran_topology_receivers(const struct FogranTopology *topology,
                                            size_t en,
                                            size_t *buf,
                                            size_t cap,
                                            size_t *len);

/**
 * ENs heard by user `user`; same buffer contract as [`fogran_topology_receivers`].
 *
 * # Safety
 * As for [`fogran_topology_receivers`].
 */
enum FogranStatus fogran_topology_transmitters(const struct FogranTopology *topology,
                                               size_t user,
                                               size_t *buf,
                                               size_t cap,
                                               size_t *len);

/**
 * Builds the delivery schedule. `demands` holds `K` 1-based file ids, or may
 * be null to use the canonical demands `((j - 1) mod n_files) + 1`.
 *
 * # Safety
 * `topology` must be a live handle, `demands` null or valid for
 * `demands_len` elements, and `out` writable.
 */
enum FogranStatus fogran_schedule_build(const struct FogranTopology *topology,
                                        const size_t *demands,
                                        size_t demands_len,
                                        size_t n_files,
                                        struct FogranSchedule **out);

/**
 * # Safety
 * `schedule` must be null or a handle from [`fogran_schedule_build`] not yet freed.
 */
void fogran_schedule_free(struct FogranSchedule *schedule);

/**
 * # Safety
 * `schedule` must be a live handle and `out` writable.
 */
enum FogranStatus fogran_schedule_slot_count(const struct FogranSchedule *schedule, size_t *out);

/**
 * Total number of transmissions over all slots.
 *
 * # Safety
 * `schedule` must be a live handle and `out` writable.
 */
enum FogranStatus fogran_schedule_transmission_count(const struct FogranSchedule *schedule,
                                                     size_t *out);

/**
 * The `index`-th transmission (0-based) in dump order.
 *
 * # Safety
 * `schedule` must be a live handle and `out` writable.
 */
enum FogranStatus fogran_schedule_transmission(const struct FogranSchedule *schedule,
                                               size_t index,
                                               struct FogranTransmission *out);

/**
 * The line-oriented schedule dump as a newly allocated string; release it
 * with [`fogran_string_free`].
 *
 * # Safety
 * `schedule` must be a live handle and `out` writable.
 */
enum FogranStatus fogran_schedule_dump(const struct FogranSchedule *schedule, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void fogran_string_free(char *s);

/**
 * Collision and completeness checks; `ValidationFailed` with the first
 * problem as the error message otherwise.
 *
 * # Safety
 * `schedule` must be a live handle.
 */
enum FogranStatus fogran_schedule_validate(const struct FogranSchedule *schedule);

/**
 * # Safety
 * `schedule` must be a live handle and `out` writable.
 */
enum FogranStatus fogran_schedule_measure(const struct FogranSchedule *schedule,
                                          struct FogranNdtReport *out);

/**
 * Random library of `n_files` files of `file_bytes` bytes seeded by `seed`,
 * random demands, full encode/deliver/decode pipeline. Returns
 * `ValidationFailed` if any user fails to recover its file.
 *
 * # Safety
 * `out` must be writable.
 */
enum FogranStatus fogran_simulate(size_t k,
                                  size_t d,
                                  size_t n_files,
                                  size_t file_bytes,
                                  uint64_t seed,
                                  struct FogranNdtReport *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum FogranStatus fogran_prop1_bound(size_t d, struct FogranRational *out);

/**
 * End-to-end NDT of the coded scheme.
 *
 * # Safety
 * `out` must be writable.
 */
enum FogranStatus fogran_delta_ach(struct FogranRational mu,
                                   struct FogranRational r,
                                   size_t d,
                                   struct FogranNdt *out);

/**
 * End-to-end NDT of the full-caching benchmark.
 *
 * # Safety
 * `out` must be writable.
 */
enum FogranStatus fogran_delta_full(struct FogranRational mu,
                                    struct FogranRational r,
                                    size_t d,
                                    struct FogranNdt *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FOGRAN_H */
