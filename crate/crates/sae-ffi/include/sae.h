/* C interface for the systolic-array MAC emulator (sae-ffi).
 *
 * Conventions: every fallible call returns a SaeStatus and writes results
 * through out-pointers. Handles are opaque; free them with the paired
 * _free function. All functions are thread-safe; handles are immutable
 * after creation and may be shared across threads.
 */

#ifndef SAE_H
#define SAE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum SaeStatus {
  SAE_STATUS_OK = 0,
  SAE_STATUS_NULL_POINTER = 1,
  SAE_STATUS_INVALID_CONFIG = 2,
  SAE_STATUS_OUT_OF_RANGE = 3,
  SAE_STATUS_DIMENSION_MISMATCH = 4,
  SAE_STATUS_UNSUPPORTED = 5,
} SaeStatus;

typedef enum SaeCellKind {
  SAE_CELL_KIND_EXACT_PPC = 0,
  SAE_CELL_KIND_EXACT_NPPC = 1,
  SAE_CELL_KIND_APPROX_PPC = 2,
  SAE_CELL_KIND_APPROX_NPPC = 3,
} SaeCellKind;

/* Opaque processing-element handle (configuration + built cell grid). */
typedef struct SaePe SaePe;

/* One truth-table row: input bits, output bits, and the error distance of
 * the approximate variant (0 for exact kinds). */
typedef struct SaeTruthRow {
  uint8_t a;
  uint8_t b;
  uint8_t c_in;
  uint8_t s_in;
  uint8_t s;
  uint8_t c;
  int8_t ed;
} SaeTruthRow;

/* Aggregated error metrics of one configuration. */
typedef struct SaeErrorReport {
  double er;
  double med;
  double nmed;
  double mred;
  uint64_t max_ed;
  uint64_t samples;
} SaeErrorReport;

/* Builds a PE handle. width is the operand bit width (2..=16),
 * approx_columns the number of least-significant approximated columns
 * (0..=2*width), acc_width the accumulator width (0 selects the default
 * 2*width + 8). */
SaeStatus sae_pe_new(uint32_t width,
                     bool is_signed,
                     uint32_t approx_columns,
                     uint32_t acc_width,
                     SaePe **out);

/* Releases a handle created by sae_pe_new. Null is a no-op. */
void sae_pe_free(SaePe *pe);

/* Evaluates the fused MAC a*b + c through the cell grid. */
SaeStatus sae_pe_eval(const SaePe *pe, int64_t a, int64_t b, int64_t c, int64_t *out);

/* Ground-truth MAC a*b + c in wide integer arithmetic. */
SaeStatus sae_pe_eval_exact(const SaePe *pe, int64_t a, int64_t b, int64_t c, int64_t *out);

/* Reports the PPC/NPPC product-cell counts of the grid. */
SaeStatus sae_pe_counts(const SaePe *pe, uint64_t *ppc, uint64_t *nppc);

/* Multiplies a (rows x inner) by b (inner x cols) on the cycle-accurate
 * output-stationary array. out receives rows*cols values row-major; cycles
 * (optional, may be NULL) receives the cycle count rows + cols + inner - 2. */
SaeStatus sae_simulate(const SaePe *pe,
                       const int64_t *a,
                       size_t rows,
                       size_t inner,
                       const int64_t *b,
                       size_t cols,
                       int64_t *out,
                       uint64_t *cycles);

/* Reference triple-loop product with wide accumulation. */
SaeStatus sae_matmul_oracle(const int64_t *a,
                            size_t rows,
                            size_t inner,
                            const int64_t *b,
                            size_t cols,
                            int64_t *out);

/* Fills rows[0..16] with the truth table of a cell kind in canonical
 * (a, b, c_in, s_in) order, 0000 to 1111. */
SaeStatus sae_truth_table(SaeCellKind kind, SaeTruthRow *rows);

/* Error metrics of the handle's configuration: exhaustive (a, b) pairs with
 * c = 0 when samples == 0 (widths up to 8), otherwise `samples` random
 * triples drawn deterministically from `seed`. */
SaeStatus sae_analyze(const SaePe *pe, uint64_t samples, uint64_t seed, SaeErrorReport *out);

/* Static version string; do not free. */
const char *sae_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SAE_H */
