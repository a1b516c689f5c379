#ifndef MBI_H
#define MBI_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MbiStatus {
  MBI_STATUS_OK = 0,
  MBI_STATUS_NULL_POINTER = 1,
  MBI_STATUS_INVALID_INPUT = 2,
  MBI_STATUS_DEGENERATE = 3,
  MBI_STATUS_NUMERIC = 4,
  MBI_STATUS_PANIC = 5,
} MbiStatus;

typedef enum MbiSigCategory {
  MBI_SIG_CATEGORY_THREE = 0,
  MBI_SIG_CATEGORY_TWO = 1,
  MBI_SIG_CATEGORY_ONE = 2,
  MBI_SIG_CATEGORY_MARGINAL = 3,
  MBI_SIG_CATEGORY_NOT_SIGNIFICANT = 4,
} MbiSigCategory;

/**
 * Result of one comparison together with its inference.
 */
typedef struct MbiComparison MbiComparison;

/**
 * A completed replication run.
 */
typedef struct MbiDance MbiDance;

typedef struct MbiChances {
  double negative;
  double trivial;
  double positive;
} MbiChances;

typedef struct MbiComparisonConfig {
  double ci_level;
  /**
   * Smallest worthwhile change.
   */
  double swc;
  /**
   * When true `swc` is in measurement units, else standardized.
   */
  bool swc_raw;
  /**
   * Pooled variance instead of Welch.
   */
  bool pooled;
  bool log_scale;
  /**
   * Paired designs: standardize by the SD of the differences instead of
   * the baseline SD.
   */
  bool diff_sd_standardizer;
} MbiComparisonConfig;

typedef struct MbiComparisonValues {
  double diff;
  double ci_low;
  double ci_high;
  double se;
  double t_statistic;
  double p_value;
  double df;
  double effect_size;
  double es_ci_low;
  double es_ci_high;
  double standardizer;
  struct MbiChances chances;
  /**
   * Set on the log pathway; the three percent fields are NaN otherwise.
   */
  bool has_pct;
  double pct_diff;
  double pct_ci_low;
  double pct_ci_high;
} MbiComparisonValues;

typedef struct MbiDanceConfig {
  uintptr_t n_experiments;
  uintptr_t n_per_group;
  double sigma;
  double delta_mu;
  double alpha;
  double ci_level;
  uint64_t seed;
  /**
   * Welch variance instead of pooled.
   */
  bool welch;
} MbiDanceConfig;

typedef struct MbiDanceRecord {
  /**
   * 1-based experiment number.
   */
  uintptr_t index;
  double diff;
  double ci_low;
  double ci_high;
  double p_value;
  enum MbiSigCategory sig_category;
} MbiDanceRecord;

typedef struct MbiDanceSummary {
  uintptr_t n_experiments;
  uintptr_t count_significant;
  uintptr_t ci_capture_count;
  double mean_diff;
  double significant_fraction;
  double capture_rate;
} MbiDanceSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *mbi_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void mbi_string_free(char *s);

/**
 * Student t cumulative distribution.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_t_cdf(double t, double df, double *out);

/**
 * Student t quantile.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_t_quantile(double p, double df, double *out);

/**
 * Standard normal cumulative distribution.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_norm_cdf(double x, double *out);

/**
 * Chances that the true effect is below `-swc`, within `±swc` or above
 * `swc`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_chances(double effect, double se, double df, double swc, struct MbiChances *out);

/**
 * Magnitude label of a standardized effect on the default scale, or null
 * for NaN. The string is static.
 */
const char *mbi_classify_magnitude(double d);

/**
 * Expected share of significant results that are false discoveries.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_false_discovery_rate(double prior, double alpha, double power, double *out);

/**
 * Power of a two-sided two-sample t test for standardized effect `d`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbiStatus mbi_theoretical_power(double d, uintptr_t n_per_group, double alpha, double *out);

/**
 * 90% intervals, Welch variance, standardized SWC of 0.2.
 */
struct MbiComparisonConfig mbi_comparison_config_default(void);

/**
 * Compares two independent samples (b minus a).
 *
 * # Safety
 * `a` and `b` must point to `na` and `nb` doubles, `cfg` may be null for
 * defaults, and `out` must be a valid pointer.
 */
enum MbiStatus mbi_compare_independent(const double *a,
                                       uintptr_t na,
                                       const double *b,
                                       uintptr_t nb,
                                       const struct MbiComparisonConfig *cfg,
                                       struct MbiComparison **out);

/**
 * Compares paired measurements (post minus pre).
 *
 * # Safety
 * `pre` and `post` must each point to `n` doubles, `cfg` may be null for
 * defaults, and `out` must be a valid pointer.
 */
enum MbiStatus mbi_compare_paired(const double *pre,
                                  const double *post,
                                  uintptr_t n,
                                  const struct MbiComparisonConfig *cfg,
                                  struct MbiComparison **out);

/**
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum MbiStatus mbi_comparison_values(const struct MbiComparison *h,
                                     struct MbiComparisonValues *out);

/**
 * Qualitative descriptor such as "likely positive". Owned by the handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
const char *mbi_comparison_descriptor(const struct MbiComparison *h);

/**
 * Magnitude label of the effect size. Owned by the handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
const char *mbi_comparison_magnitude(const struct MbiComparison *h);

/**
 * # Safety
 * `h` must come from a compare function and not be freed twice.
 */
void mbi_comparison_free(struct MbiComparison *h);

/**
 * 25 experiments of 20 per group, sigma 20, true difference 10.
 */
struct MbiDanceConfig mbi_dance_config_default(uint64_t seed);

/**
 * # Safety
 * `cfg` and `out` must be valid pointers.
 */
enum MbiStatus mbi_dance_run(const struct MbiDanceConfig *cfg, struct MbiDance **out);

/**
 * Number of records, or 0 for a null handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
uintptr_t mbi_dance_len(const struct MbiDance *h);

/**
 * Record `i`, counted from zero.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum MbiStatus mbi_dance_record(const struct MbiDance *h, uintptr_t i, struct MbiDanceRecord *out);

/**
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum MbiStatus mbi_dance_summary(const struct MbiDance *h, struct MbiDanceSummary *out);

/**
 * The run as CSV. Release with `mbi_string_free`; null for a null handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
char *mbi_dance_to_csv(const struct MbiDance *h);

/**
 * # Safety
 * `h` must come from `mbi_dance_run` and not be freed twice.
 */
void mbi_dance_free(struct MbiDance *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBI_H */
