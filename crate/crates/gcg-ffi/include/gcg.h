#ifndef GCG_H
#define GCG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum GcgStatus {
  GCG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GCG_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside the supported range, or a string is malformed.
   */
  GCG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation reported an error.
   */
  GCG_STATUS_COMPUTATION = 3,
  /**
   * An index is past the end of a handle.
   */
  GCG_STATUS_OUT_OF_RANGE = 4,
  /**
   * A panic was caught at the boundary.
   */
  GCG_STATUS_INTERNAL = 5,
} GcgStatus;

/**
 * Result of a verification run.
 */
typedef struct GcgReport GcgReport;

/**
 * A table of non-negative integers with named columns.
 */
typedef struct GcgTable GcgTable;

/**
 * Parameters of a verification run.
 */
typedef struct GcgConfig {
  uint32_t g;
  /**
   * Number of points for the `t` and `Mo` suites.
   */
  uint32_t n;
  bool tadpoles;
  bool framed;
  uint32_t max_vertices;
  uint32_t max_edges;
  uint32_t max_decorations;
  uint32_t max_weight;
  uint64_t seed;
} GcgConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if the last
 * call succeeded. The pointer stays valid until the next call into this
 * library on the same thread; do not free it.
 */
const char *gcg_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void gcg_string_free(char *s);

/**
 * Dimension table of `t_(g)(n)` in weights `1..=max_weight`: columns
 * `weight`, `dim_free`, `dim_ideal`, `dim_quotient`. With `framed` false
 * this is the non-framed algebra, defined for `g = 1`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`gcg_table_free`].
 */
enum GcgStatus gcg_t_dims(uint32_t n,
                          uint32_t g,
                          bool framed,
                          uint32_t max_weight,
                          struct GcgTable **out);

/**
 * Table of the graded Lie algebras `Z_(g)`, `B_(g)` and `R_(g)` in tuple
 * weights `0..=max_weight`: columns `weight`, `dim_z`, `dim_b`, `dim_r`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`gcg_table_free`].
 */
enum GcgStatus gcg_grt_table(uint32_t g, bool framed, uint32_t max_weight, struct GcgTable **out);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
uintptr_t gcg_table_rows(const struct GcgTable *t);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
uintptr_t gcg_table_cols(const struct GcgTable *t);

/**
 * Name of a column, owned by the handle; null if out of range.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
const char *gcg_table_column_name(const struct GcgTable *t, uintptr_t col);

/**
 * Reads one entry.
 *
 * # Safety
 * `t` must be null or a live handle and `value` a valid pointer.
 */
enum GcgStatus gcg_table_get(const struct GcgTable *t,
                             uintptr_t row,
                             uintptr_t col,
                             uint64_t *value);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void gcg_table_free(struct GcgTable *t);

/**
 * Total residual dimension of `d m + 1/2 [m, m]` for the canonical element
 * of `Mo_(g)(r) (x) t_(g)(r)`, summed over blocks up to `max_weight`. Zero
 * means the Maurer-Cartan equation holds in the truncation.
 *
 * # Safety
 * `residual` must be a valid pointer.
 */
enum GcgStatus gcg_mo_mc_residual(uint32_t r,
                                  uint32_t g,
                                  bool framed,
                                  uint32_t max_weight,
                                  uint64_t *residual);

/**
 * The default parameters, matching the command line defaults.
 */
struct GcgConfig gcg_config_default(void);

/**
 * Runs the comma-separated list of suites (or `all`) and stores every
 * check. A run whose checks fail still returns [`GcgStatus::Ok`]; inspect
 * [`gcg_report_passed`].
 *
 * # Safety
 * `suites` must be a nul-terminated string, `config` and `out` valid
 * pointers. On success `out` receives a handle to free with
 * [`gcg_report_free`].
 */
enum GcgStatus gcg_verify(const char *suites,
                          const struct GcgConfig *config,
                          struct GcgReport **out);

/**
 * Number of checks, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
uintptr_t gcg_report_len(const struct GcgReport *r);

/**
 * Whether every check passed; false for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
bool gcg_report_passed(const struct GcgReport *r);

/**
 * Outcome of check `i`.
 *
 * # Safety
 * `r` must be null or a live handle and `passed` a valid pointer.
 */
enum GcgStatus gcg_report_check_passed(const struct GcgReport *r, uintptr_t i, bool *passed);

/**
 * Anchor of check `i`, owned by the handle; null if out of range.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
const char *gcg_report_check_anchor(const struct GcgReport *r, uintptr_t i);

/**
 * The report as JSON; free with [`gcg_string_free`]. Null for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
char *gcg_report_to_json(const struct GcgReport *r);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void gcg_report_free(struct GcgReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCG_H */
