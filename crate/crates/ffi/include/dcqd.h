#ifndef DCQD_H
#define DCQD_H

/* Generated by cbindgen from the dcqd-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 2 to 4 match the command-line exit codes.
 */
typedef enum DcqdStatus {
  DCQD_STATUS_OK = 0,
  DCQD_STATUS_IO = 1,
  DCQD_STATUS_PARSE = 2,
  DCQD_STATUS_ILL_POSED = 3,
  DCQD_STATUS_NUMERICAL = 4,
  DCQD_STATUS_DIMENSION_MISMATCH = 5,
  DCQD_STATUS_NULL_POINTER = 6,
  DCQD_STATUS_BUFFER_TOO_SMALL = 7,
  DCQD_STATUS_PANIC = 8,
} DcqdStatus;

/**
 * Per-pair experimental setting for [`dcqd_outcome_probabilities`].
 */
typedef enum DcqdSetting {
  DCQD_SETTING_POP = 0,
  DCQD_SETTING_COH_Z = 1,
  DCQD_SETTING_COH_X = 2,
  DCQD_SETTING_COH_Y = 3,
} DcqdSetting;

/**
 * Characterization scheme for [`dcqd_resources`].
 */
typedef enum DcqdScheme {
  DCQD_SCHEME_SQPT = 0,
  DCQD_SCHEME_AAPT = 1,
  DCQD_SCHEME_DCQD = 2,
} DcqdScheme;

/**
 * Opaque channel handle.
 */
typedef struct DcqdChannel DcqdChannel;

/**
 * Opaque reconstruction handle.
 */
typedef struct DcqdChi DcqdChi;

/**
 * Input amplitudes `α|00⟩ + β|11⟩`.
 */
typedef struct DcqdAmplitudes {
  double alpha_re;
  double alpha_im;
  double beta_re;
  double beta_im;
} DcqdAmplitudes;

/**
 * Joint relaxation estimate. Infinite time constants stand for no decay.
 */
typedef struct DcqdRelaxEstimate {
  double t1_constant;
  double t2_constant;
  double t_prime_over_t2_prime;
  double p_minus;
  double xx_out;
  uint64_t configurations;
} DcqdRelaxEstimate;

/**
 * One row of the resource table.
 */
typedef struct DcqdResourceRow {
  uint32_t n;
  uint64_t dim_h;
  uint64_t n_in;
  uint64_t n_m;
  uint64_t n_exp;
} DcqdResourceRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dcqd_last_error(void);

/**
 * Builds a channel on `n` qubits from the compact text form, e.g.
 * `"bit_flip:0.25"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcqdStatus dcqd_channel_parse(const char *spec, uintptr_t n, struct DcqdChannel **out);

/**
 * Builds a channel on `n` qubits from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcqdStatus dcqd_channel_from_json(const char *json, uintptr_t n, struct DcqdChannel **out);

/**
 * Builds a channel from `count` Kraus operators on `n` qubits, each a
 * row-major `2^n × 2^n` block of `re` and `im` values laid out back to back.
 *
 * # Safety
 * `re` and `im` must each point to `count · 4^n` doubles.
 */
enum DcqdStatus dcqd_channel_from_kraus(uintptr_t n,
                                        uintptr_t count,
                                        const double *re,
                                        const double *im,
                                        struct DcqdChannel **out);

/**
 * Amplitude damping for `t1` then phase damping for `t2` on one qubit.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcqdStatus dcqd_channel_relaxation(double t1,
                                        double time_t1,
                                        double t2,
                                        double time_t2,
                                        struct DcqdChannel **out);

/**
 * # Safety
 * `channel` must come from a constructor and not have been freed.
 */
uintptr_t dcqd_channel_n_qubits(const struct DcqdChannel *channel);

/**
 * # Safety
 * `channel` must be null or come from a constructor, and is invalid after
 * this call.
 */
void dcqd_channel_free(struct DcqdChannel *channel);

/**
 * Reconstructs χ from exact statistics of all `4^n` configurations.
 * `amplitudes` may be null for the default choice.
 *
 * # Safety
 * `channel` must be a live handle; `out` a valid pointer.
 */
enum DcqdStatus dcqd_characterize(const struct DcqdChannel *channel,
                                  const struct DcqdAmplitudes *amps,
                                  struct DcqdChi **out);

/**
 * Reconstructs χ from `shots` samples per configuration.
 *
 * # Safety
 * `channel` must be a live handle; `out` a valid pointer.
 */
enum DcqdStatus dcqd_characterize_sampled(const struct DcqdChannel *channel,
                                          const struct DcqdAmplitudes *amps,
                                          uint64_t shots,
                                          uint64_t seed,
                                          struct DcqdChi **out);

/**
 * Standard process tomography baseline.
 *
 * # Safety
 * `channel` must be a live handle; `out` a valid pointer.
 */
enum DcqdStatus dcqd_sqpt(const struct DcqdChannel *channel, struct DcqdChi **out);

/**
 * Row and column count of χ, `4^n`; zero for a null handle.
 *
 * # Safety
 * `chi` must be null or a live handle.
 */
uintptr_t dcqd_chi_size(const struct DcqdChi *chi);

/**
 * Experimental configurations consumed by the reconstruction.
 *
 * # Safety
 * `chi` must be null or a live handle.
 */
uintptr_t dcqd_chi_configurations(const struct DcqdChi *chi);

/**
 * Largest entrywise difference between the closed-form and linear-inversion
 * estimates; NaN when no closed form was computed.
 *
 * # Safety
 * `chi` must be null or a live handle.
 */
double dcqd_chi_residual(const struct DcqdChi *chi);

/**
 * Copies χ row-major into `re` and `im`, each of length `len ≥ size²`.
 *
 * # Safety
 * `chi` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum DcqdStatus dcqd_chi_copy(const struct DcqdChi *chi, double *re, double *im, uintptr_t len);

/**
 * # Safety
 * `chi` must be null or a live handle, and is invalid after this call.
 */
void dcqd_chi_free(struct DcqdChi *chi);

/**
 * Exact outcome probabilities of the configuration given by one setting
 * per pair. Writes `4^n_settings` values.
 *
 * # Safety
 * `settings` must hold `n_settings` values; `out` must hold `len` doubles.
 */
enum DcqdStatus dcqd_outcome_probabilities(const struct DcqdChannel *channel,
                                           const enum DcqdSetting *settings,
                                           uintptr_t n_settings,
                                           const struct DcqdAmplitudes *amps,
                                           double *out,
                                           uintptr_t len);

/**
 * Simulates relaxation with the true constants and estimates them back from
 * one configuration; `shots = 0` uses exact statistics. Null `amps`
 * selects `α = √(2/3)`, `β = √(1/3)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcqdStatus dcqd_relax_estimate(double time_t1,
                                    double time_t2,
                                    double t1,
                                    double t2,
                                    const struct DcqdAmplitudes *amps,
                                    uint64_t shots,
                                    uint64_t seed,
                                    struct DcqdRelaxEstimate *out);

/**
 * Resource counts of one scheme on `n` qubits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcqdStatus dcqd_resources(uint32_t n, enum DcqdScheme scheme, struct DcqdResourceRow *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCQD_H */
