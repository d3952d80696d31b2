#ifndef HERALDKEY_H
#define HERALDKEY_H

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HkScenario {
  HK_SCENARIO_TMSV = 0,
  HK_SCENARIO_RECEIVER_PS = 1,
  HK_SCENARIO_TRANSMITTER_PS = 2,
  HK_SCENARIO_RECEIVER_QS = 3,
  HK_SCENARIO_TRANSMITTER_QS = 4,
} HkScenario;

typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_PARAMETER = 2,
  HK_STATUS_CONFIG = 3,
  HK_STATUS_HERALD_FAILURE = 4,
  HK_STATUS_NO_FEASIBLE_KAPPA = 5,
  HK_STATUS_UNPHYSICAL = 6,
  HK_STATUS_FAILED = 7,
  HK_STATUS_PANIC = 8,
} HkStatus;

typedef enum HkChannel {
  HK_CHANNEL_EVE_PURIFICATION = 0,
  HK_CHANNEL_VACUUM_ENVIRONMENT = 1,
} HkChannel;

typedef enum HkMode {
  HK_MODE_A = 0,
  HK_MODE_B = 1,
  HK_MODE_E = 2,
  HK_MODE_F = 3,
  HK_MODE_E_PRIME = 4,
  HK_MODE_C = 5,
  HK_MODE_C_PRIME = 6,
  HK_MODE_D = 7,
} HkMode;

typedef enum HkObjective {
  HK_OBJECTIVE_LOG_NEGATIVITY = 0,
  HK_OBJECTIVE_ENTANGLEMENT_RATE = 1,
  HK_OBJECTIVE_KEY_RATE = 2,
} HkObjective;

// Opaque scenario configuration.
typedef struct HkScenarioConfig HkScenarioConfig;

// Key-rate terms for one point.
typedef struct HkKeyRate {
  double i_ab;
  double chi_be;
  double success_probability;
  double reconciliation_efficiency;
  double k_raw;
  double k_effective;
  double norm_leak;
} HkKeyRate;

// One evaluated point. Quantities that were not reached are NaN; `status`
// says why.
typedef struct HkRecord {
  enum HkStatus status;
  double kappa;
  double g;
  double p_s;
  double e_n;
  double entanglement_rate;
  double i_ab;
  double chi_be;
  double k_raw;
  double k_effective;
  double norm_leak;
} HkRecord;

typedef struct HkOptimum {
  double kappa;
  double value;
} HkOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// New configuration with default cutoffs, splitters and the Eve channel.
// Returns null if either dB value is negative or not finite.
struct HkScenarioConfig *hk_config_new(enum HkScenario scenario_kind,
                                       double squeezing_db,
                                       double loss_db);

// # Safety
// `config` must be null or a handle from `hk_config_new` not yet freed.
void hk_config_free(struct HkScenarioConfig *config);

// # Safety
// `config` must be null or a live handle.
struct HkScenarioConfig *hk_config_clone(const struct HkScenarioConfig *config);

// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_squeezing_db(struct HkScenarioConfig *config, double value);

// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_loss_db(struct HkScenarioConfig *config, double value);

// Photon-subtraction splitter transmissivity, in (0, 1).
//
// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_kappa_ps(struct HkScenarioConfig *config, double value);

// Scissors splitter transmissivity, in (0, 1).
//
// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_kappa_qs(struct HkScenarioConfig *config, double value);

// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_eve_variance(struct HkScenarioConfig *config, double value);

// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_reconciliation_efficiency(struct HkScenarioConfig *config,
                                                      double value);

// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_channel(struct HkScenarioConfig *config, enum HkChannel value);

// Fock cutoff (highest photon number kept) for one mode.
//
// # Safety
// `config` must be null or a live handle.
enum HkStatus hk_config_set_cutoff(struct HkScenarioConfig *config,
                                   enum HkMode which,
                                   size_t cutoff);

// # Safety
// `config` must be null or a live handle; `out` must be null or writable.
enum HkStatus hk_key_rate(const struct HkScenarioConfig *config, struct HkKeyRate *out);

// Evaluates one point the way a sweep row does. A physics failure is
// reported both as the return value and in `out->status`.
//
// # Safety
// `config` must be null or a live handle; `out` must be null or writable.
enum HkStatus hk_evaluate(const struct HkScenarioConfig *config, struct HkRecord *out);

// Best splitter transmissivity for the configured scenario.
//
// # Safety
// `config` must be null or a live handle; `out` must be null or writable.
enum HkStatus hk_optimize_kappa(const struct HkScenarioConfig *config,
                                enum HkObjective target,
                                struct HkOptimum *out);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next `hk_` call on the same thread.
const char *hk_last_error(void);

// Static, NUL-terminated crate version.
const char *hk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERALDKEY_H */
