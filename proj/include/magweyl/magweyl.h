#ifndef MAGWEYL_H_
#define MAGWEYL_H_

/*
 * C interface to the magweyl library: magnetic Weyl densities, Landau levels,
 * resonance analysis, the constant-coefficient reduction and a lattice
 * eigenvalue-counting oracle.
 *
 * Every function returns an mw_status. On failure a message and, when known,
 * the dotted path of the offending input are available from
 * mw_last_error_message() / mw_last_error_field() on the calling thread.
 *
 * Structured results are returned as UTF-8 JSON strings owned by the caller
 * and released with mw_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(MAGWEYL_BUILDING_LIBRARY)
  #define MW_API __attribute__((visibility("default")))
#else
  #define MW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mw_status {
  MW_OK = 0,
  MW_ERROR_INVALID_ARGUMENT = 1,
  MW_ERROR_COMPUTATION = 2,
  MW_ERROR_BUDGET = 3,
  MW_ERROR_IO = 4,
  MW_ERROR_INTERNAL = 5,
  MW_ERROR_NULL_POINTER = 6
} mw_status;

MW_API const char* mw_version(void);

/* Thread-local; valid until the next failing call on the same thread. */
MW_API const char* mw_last_error_message(void);
MW_API const char* mw_last_error_field(void);

MW_API void mw_string_free(char* s);

/* Opaque handles. */
typedef struct mw_scenario_struct* mw_scenario_t;
typedef struct mw_hamiltonian_struct* mw_hamiltonian_t;

/*
 * Registry scenario with optional parameter overrides given as a JSON object
 * of numbers (NULL or "" for none). mu and h feed the flux-quantized torus
 * lengths; pass 0 for either to leave them unset.
 */
MW_API int mw_scenario_create(mw_scenario_t* out, const char* name, const char* overrides_json,
                              double mu, double h);
MW_API int mw_scenario_destroy(mw_scenario_t s);
MW_API int mw_scenario_dimension(mw_scenario_t s, int* out);

/* Intensity frequencies at point x (length = dimension), descending. `freqs`
   must hold dimension / 2 values; *count receives r. */
MW_API int mw_scenario_frequencies(mw_scenario_t s, const double* x, double* freqs, size_t* count);

/* Frequencies of (g, F), both row-major d x d. `freqs` holds d / 2 values. */
MW_API int mw_characteristic_frequencies(const double* g, const double* F, size_t d, double* freqs,
                                         size_t* count);

/* JSON list of {alpha, energy} for E_alpha <= cap. */
MW_API int mw_landau_levels(const double* f, size_t r, double cap, char** out_json);

/*
 * Lattice operator with n points on every axis. `bc` is "dirichlet",
 * "periodic", or NULL / "" for the scenario default.
 */
MW_API int mw_hamiltonian_assemble(mw_hamiltonian_t* out, mw_scenario_t s, double mu, double h, int n,
                                   const char* bc);
MW_API int mw_hamiltonian_destroy(mw_hamiltonian_t H);
MW_API int mw_hamiltonian_size(mw_hamiltonian_t H, size_t* out);

/* #{lambda <= tau}; method is "auto", "dense", "inertia" or "bloch". */
MW_API int mw_hamiltonian_count(mw_hamiltonian_t H, double tau, const char* method, int64_t* count);

/*
 * Command entry points: JSON options in, JSON report out. The option keys
 * match the command-line flags; see the README.
 */
MW_API int mw_analyze(const char* options_json, char** out_json);
MW_API int mw_weyl(const char* options_json, char** out_json);
MW_API int mw_count(const char* options_json, char** out_json);
MW_API int mw_reduce(const char* options_json, char** out_json);
MW_API int mw_sweep(const char* options_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
