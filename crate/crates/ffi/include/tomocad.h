#ifndef TOMOCAD_H
#define TOMOCAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  TC_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside the operation's domain.
   */
  TC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A numerical procedure failed (non-PSD matrix, failed bracketing).
   */
  TC_STATUS_NUMERICAL_FAILURE = 3,
  /**
   * An index was outside a table.
   */
  TC_STATUS_OUT_OF_RANGE = 4,
  /**
   * The library panicked; the handle state is unspecified.
   */
  TC_STATUS_PANIC = 5,
} TcStatus;

/**
 * Which joint count table [`tc_sim_result_joint_count`] reads.
 */
typedef enum TcJointTable {
  /**
   * (Alice's distilled value, Bob's distilled value).
   */
  TC_JOINT_TABLE_ALICE_BOB = 0,
  /**
   * (Alice's distilled value, Eve's guess) over all good blocks.
   */
  TC_JOINT_TABLE_ALICE_EVE = 1,
} TcJointTable;

/**
 * Opaque channel handle.
 */
typedef struct TcChannel TcChannel;

/**
 * Opaque simulation result handle.
 */
typedef struct TcSimResult TcSimResult;

typedef struct TcChannelValues {
  size_t n;
  double epsilon;
  double beta0;
  double beta1;
  double lambda;
} TcChannelValues;

typedef struct TcBlockStats {
  size_t block_length;
  double beta0;
  double beta1;
  double p_accept;
} TcBlockStats;

typedef struct TcEveStats {
  size_t block_length;
  double eta0;
  double eta1;
} TcEveStats;

/**
 * Exact and asymptotic informations; the asymptotic fields are NaN and
 * `has_asymptotic` is false when the noise is 0 or 1.
 */
typedef struct TcInfoReport {
  size_t block_length;
  double i_ab;
  double i_ae;
  double margin;
  double deficit_ab;
  double deficit_ae;
  bool has_asymptotic;
  double i_ab_asym;
  double i_ae_asym;
} TcInfoReport;

typedef struct TcSimSummary {
  size_t n;
  size_t block_length;
  size_t n_blocks;
  uint64_t seed;
  uint64_t accepted;
  uint64_t rejected;
  uint64_t case1;
  uint64_t raw_pairs;
  uint64_t sifted_pairs;
  double p_accept;
  double beta0l;
  double i_ab_hat;
  double i_ae_hat;
} TcSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last non-OK status on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tc_version(void);

/**
 * Creates a channel from dimension `n` and noise `epsilon`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum TcStatus tc_channel_from_noise(size_t n, double epsilon, struct TcChannel **out);

/**
 * Creates a channel from `beta0` and `beta1`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum TcStatus tc_channel_from_betas(size_t n, double beta0, double beta1, struct TcChannel **out);

/**
 * Releases a channel. NULL is ignored.
 *
 * # Safety
 * `channel` must be NULL or a handle from `tc_channel_from_*` not yet freed.
 */
void tc_channel_free(struct TcChannel *channel);

/**
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_channel_values(const struct TcChannel *channel, struct TcChannelValues *out);

/**
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_block_stats(const struct TcChannel *channel,
                             size_t block_length,
                             struct TcBlockStats *out);

/**
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_eve_stats(const struct TcChannel *channel,
                           size_t block_length,
                           struct TcEveStats *out);

/**
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_security_margin(const struct TcChannel *channel,
                                 size_t block_length,
                                 struct TcInfoReport *out);

/**
 * Smallest secure block length up to `l_max`. `*found` is false, and
 * `*out` zero, when no length qualifies.
 *
 * # Safety
 * `channel` must be a live handle; `out` and `found` must be valid for writes.
 */
enum TcStatus tc_min_secure_block_length(const struct TcChannel *channel,
                                         size_t l_max,
                                         size_t *out,
                                         bool *found);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_qed_threshold(size_t n, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_cad_threshold_closed(size_t n, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_cad_threshold_numeric(size_t n, size_t l_max, double tol, double *out);

/**
 * Gram-matrix oracle for the square-root-measurement success probability.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TcStatus tc_srm_success_probability(size_t n, double overlap, double *out);

/**
 * Runs the Monte Carlo CAD experiment.
 *
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_simulate(const struct TcChannel *channel,
                          size_t block_length,
                          size_t n_blocks,
                          uint64_t seed,
                          bool simulate_sifting,
                          struct TcSimResult **out);

/**
 * Releases a simulation result. NULL is ignored.
 *
 * # Safety
 * `result` must be NULL or a handle from `tc_simulate` not yet freed.
 */
void tc_sim_result_free(struct TcSimResult *result);

/**
 * # Safety
 * `result` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_sim_result_summary(const struct TcSimResult *result, struct TcSimSummary *out);

/**
 * Reads one cell of a joint count table.
 *
 * # Safety
 * `result` must be a live handle; `out` must be valid for writes.
 */
enum TcStatus tc_sim_result_joint_count(const struct TcSimResult *result,
                                        enum TcJointTable table,
                                        size_t row,
                                        size_t col,
                                        uint64_t *out);

/**
 * Copies the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the full message length, or 0 if none.
 *
 * # Safety
 * `buf` must be NULL or valid for `len` bytes of writes.
 */
size_t tc_copy_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOMOCAD_H */
