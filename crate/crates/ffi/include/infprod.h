#ifndef INFPROD_H
#define INFPROD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define INFPROD_WITNESS_A 1

#define INFPROD_WITNESS_B 2

typedef enum InfprodStatus {
  INFPROD_STATUS_OK = 0,
  INFPROD_STATUS_NULL_POINTER = 1,
  // Malformed text, bad UTF-8 or invalid numbers.
  INFPROD_STATUS_PARSE = 2,
  // Input rejected by a precondition of the operation.
  INFPROD_STATUS_PRECONDITION = 3,
  // An internal consistency check failed.
  INFPROD_STATUS_INTERNAL = 4,
  // A Rust panic was caught at the boundary.
  INFPROD_STATUS_PANIC = 5,
} InfprodStatus;

// A matrix family with its starting vector, in exact rationals.
typedef struct InfprodFamily InfprodFamily;

// A numeration system together with its Bernoulli measure.
typedef struct InfprodSystem InfprodSystem;

typedef struct InfprodEstimate {
  double value;
  double std_error;
} InfprodEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *infprod_last_error(void);

// Library version as a static string.
const char *infprod_version(void);

// Family from row-major entries `a b c d` per matrix. Floats are converted
// exactly.
enum InfprodStatus infprod_family_new(const double *entries,
                                      size_t count,
                                      double v1,
                                      double v2,
                                      struct InfprodFamily **out_family);

// Family from the JSON file format used by the command line tool.
enum InfprodStatus infprod_family_from_json(const char *json, struct InfprodFamily **out_family);

void infprod_family_free(struct InfprodFamily *family);

// Uniform-convergence verdict. Bit `k - 1` of `out_cases` is set when case
// `k` holds.
enum InfprodStatus infprod_classify(const struct InfprodFamily *family,
                                    int *out_converges,
                                    uint32_t *out_cases);

// Numerical convergence probe; see the command line `probe` subcommand.
enum InfprodStatus infprod_probe(const struct InfprodFamily *family,
                                 size_t depth,
                                 size_t samples,
                                 uint64_t seed,
                                 double threshold,
                                 double *out_gap,
                                 int *out_converges);

// System with base `x^2 = a x + b` and digit weights `num[i] / den[i]`
// for the `a + 1` digits.
enum InfprodStatus infprod_system_new(uint32_t a,
                                      uint32_t b,
                                      const int64_t *num,
                                      const int64_t *den,
                                      size_t len,
                                      struct InfprodSystem **out_system);

enum InfprodStatus infprod_system_from_json(const char *json, struct InfprodSystem **out_system);

void infprod_system_free(struct InfprodSystem *system);

// Number of letters of the cylinder alphabet.
enum InfprodStatus infprod_system_letters(const struct InfprodSystem *system, size_t *out_letters);

// `mu*` of the cylinder of `word`, from the exact matrix products.
enum InfprodStatus infprod_cylinder_measure(const struct InfprodSystem *system,
                                            const size_t *word,
                                            size_t len,
                                            double *out_value);

// `mu_p([lo, hi])` (or `mu*` when `star` is nonzero). Endpoints are numbers
// of the base field written like `"1/2"` or `"2-β"`.
enum InfprodStatus infprod_interval_measure(const struct InfprodSystem *system,
                                            const char *lo,
                                            const char *hi,
                                            int star,
                                            double tolerance,
                                            struct InfprodEstimate *out_estimate);

// Monte Carlo estimate of `mu_p([lo, hi])`, or of the fractional-part
// measure when `fractional` is nonzero.
enum InfprodStatus infprod_monte_carlo(const struct InfprodSystem *system,
                                       double lo,
                                       double hi,
                                       uint64_t samples,
                                       uint64_t seed,
                                       int fractional,
                                       struct InfprodEstimate *out_estimate);

// Weak-Gibbs verdict from the two weight inequalities. `out_witnesses`
// receives `INFPROD_WITNESS_A` / `INFPROD_WITNESS_B` bits.
enum InfprodStatus infprod_weak_gibbs(const struct InfprodSystem *system,
                                      int *out_weak_gibbs,
                                      uint32_t *out_witnesses);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFPROD_H */
