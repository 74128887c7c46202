#ifndef DTNCACHE_H
#define DTNCACHE_H

/* C interface to the dtncache core: cooperative cache allocation for
 * delay-tolerant networks (popularity models, the closed-form optimal
 * allocation with its KKT certificate, contact simulation, and the
 * contact-duration miss model).
 *
 * All objects are opaque handles created and destroyed by this library.
 * Fallible calls return dtn_status; on failure dtn_last_error() describes
 * the problem (per thread, valid until the next failing call). Output
 * buffers are caller-allocated with the obvious sizes (dtn_dist_size /
 * dtn_alloc_size / n_files elements).
 */

#include <stdint.h>

#if defined(_WIN32)
#define DTN_API __declspec(dllexport)
#else
#define DTN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dtn_status {
  DTN_OK = 0,
  DTN_ERROR_INVALID_ARGUMENT = 1,
  DTN_ERROR_NUMERICAL = 2,
  DTN_ERROR_INTERNAL = 3
} dtn_status;

typedef struct dtn_dist dtn_dist;    /* ranked popularity distribution */
typedef struct dtn_alloc dtn_alloc;  /* per-file cache probabilities */
typedef struct dtn_cert dtn_cert;    /* optimality certificate */
typedef struct dtn_rng dtn_rng;      /* deterministic random stream */
typedef struct dtn_users dtn_users;  /* filled user caches */
typedef struct dtn_stats dtn_stats;  /* simulation hit/miss counts */

typedef struct dtn_network_params {
  double lambda_user; /* pairwise encounter rate */
  double lambda_ap;   /* access-point encounter rate */
  double patience;    /* request patience time T */
  uint64_t n_files;
  uint64_t cache_capacity;
  uint64_t n_users;
} dtn_network_params;

DTN_API const char* dtn_last_error(void);

/* --- random streams --- */

DTN_API dtn_rng* dtn_rng_create(uint64_t seed);
/* Substream derived from a master seed and a label; the same pair always
 * yields the same stream. */
DTN_API dtn_rng* dtn_rng_create_labeled(uint64_t master_seed, const char* label);
DTN_API void dtn_rng_free(dtn_rng* rng);

/* --- popularity distributions --- */

/* Zipf-like: p_rank proportional to rank^(-alpha), ranks 1..n_files. */
DTN_API dtn_status dtn_dist_zipf(uint64_t n_files, double alpha, dtn_dist** out);
/* Arbitrary positive weights, sorted nonincreasing and normalized.
 * dtn_dist_permutation reports each rank's index in the input. */
DTN_API dtn_status dtn_dist_from_raw(const double* weights, uint64_t n, dtn_dist** out);
DTN_API uint64_t dtn_dist_size(const dtn_dist* dist);
DTN_API dtn_status dtn_dist_probs(const dtn_dist* dist, double* out);
DTN_API dtn_status dtn_dist_permutation(const dtn_dist* dist, uint64_t* out);
/* Draws a 0-based rank. */
DTN_API dtn_status dtn_dist_sample(const dtn_dist* dist, dtn_rng* rng, uint64_t* out_rank);
DTN_API void dtn_dist_free(dtn_dist* dist);

/* --- allocations and the optimizer --- */

DTN_API dtn_status dtn_alloc_from_q(const double* q, uint64_t n, dtn_alloc** out);
DTN_API uint64_t dtn_alloc_size(const dtn_alloc* alloc);
DTN_API dtn_status dtn_alloc_values(const dtn_alloc* alloc, double* out);
DTN_API void dtn_alloc_free(dtn_alloc* alloc);

/* Indicator allocation of the cache_capacity most popular files. */
DTN_API dtn_status dtn_k_most_popular_allocation(const dtn_dist* dist,
                                                 uint64_t cache_capacity,
                                                 dtn_alloc** out);
/* Uniform allocation cache_capacity / n_files. */
DTN_API dtn_status dtn_random_allocation(const dtn_network_params* params,
                                         dtn_alloc** out);

/* Minimizes the expected miss rate over allocations with entries in [0,1]
 * summing to cache_capacity. tol <= 0 selects the default 1e-9 on
 * |sum q - K|. out_cert is optional (pass NULL to discard). Returns
 * DTN_ERROR_NUMERICAL if the multiplier search stalls. */
DTN_API dtn_status dtn_optimal_allocation(const dtn_dist* dist,
                                          const dtn_network_params* params, double tol,
                                          dtn_alloc** out_alloc, dtn_cert** out_cert);

/* Certificate accessors: eta is the capacity multiplier; mu arrays are the
 * bound multipliers (size n_files); ranks below n1 saturate at 1 and ranks
 * above n2 are zero (1-based; n1 > n2 means no fractional block). */
DTN_API double dtn_cert_eta(const dtn_cert* cert);
DTN_API uint64_t dtn_cert_n1(const dtn_cert* cert);
DTN_API uint64_t dtn_cert_n2(const dtn_cert* cert);
DTN_API dtn_status dtn_cert_mu_upper(const dtn_cert* cert, double* out);
DTN_API dtn_status dtn_cert_mu_lower(const dtn_cert* cert, double* out);
DTN_API void dtn_cert_free(dtn_cert* cert);

/* Expected miss rate of uniformly random K-subset caches. */
DTN_API dtn_status dtn_miss_rate_random(const dtn_network_params* params, double* out);
/* Expected miss rate with per-file cache probabilities q. */
DTN_API dtn_status dtn_miss_rate_selective(const dtn_dist* dist, const dtn_alloc* alloc,
                                           const dtn_network_params* params, double* out);

/* --- contact simulation --- */

/* Pushing-algorithm fill: offers drawn with probability q/K, duplicates
 * rejected, until each cache holds cache_capacity distinct files. */
DTN_API dtn_status dtn_fill_caches_selective(const dtn_alloc* alloc,
                                             const dtn_network_params* params,
                                             dtn_rng* rng, dtn_users** out);
/* Exact-marginal fill: file n lands in a cache with probability exactly q_n. */
DTN_API dtn_status dtn_fill_caches_exact(const dtn_alloc* alloc,
                                         const dtn_network_params* params, dtn_rng* rng,
                                         dtn_users** out);
DTN_API void dtn_users_free(dtn_users* users);

/* Fraction of users caching each file (out has n_files elements). */
DTN_API dtn_status dtn_empirical_allocation(const dtn_users* users, uint64_t n_files,
                                            double* out);

/* Per-request Monte Carlo over the filled caches: own cache, then
 * Poisson(lambda_ap T) access-point encounters, then Poisson(lambda T)
 * distinct peers. */
DTN_API dtn_status dtn_simulate_misses(const dtn_dist* dist,
                                       const dtn_network_params* params,
                                       uint64_t n_requests, const dtn_users* users,
                                       dtn_rng* rng, dtn_stats** out);
DTN_API uint64_t dtn_stats_requests(const dtn_stats* stats);
DTN_API uint64_t dtn_stats_misses(const dtn_stats* stats);
DTN_API dtn_status dtn_stats_per_file_requests(const dtn_stats* stats, uint64_t* out);
DTN_API dtn_status dtn_stats_per_file_misses(const dtn_stats* stats, uint64_t* out);
DTN_API void dtn_stats_free(dtn_stats* stats);

/* --- lambda-T sweep --- */

typedef struct dtn_sweep_row {
  char scheme[32];
  double lambda_t;
  double analytic_miss;
  double empirical_miss;
  uint64_t requests;
  uint64_t seed; /* derived per-cell seed actually used */
} dtn_sweep_row;

/* Runs every scheme at every grid value of lambda*T (patience is adjusted,
 * rates fixed). Schemes: "random", "k_most_popular", "optimal",
 * "pushing_algorithm". Rows are scheme-major and owned by the library;
 * release with dtn_sweep_rows_free. */
DTN_API dtn_status dtn_sweep(const dtn_dist* dist, const dtn_network_params* params,
                             const char* const* schemes, uint64_t n_schemes,
                             const double* grid, uint64_t n_grid, uint64_t seed,
                             uint64_t n_requests, dtn_sweep_row** out_rows,
                             uint64_t* out_n_rows);
DTN_API void dtn_sweep_rows_free(dtn_sweep_row* rows);

/* --- contact-duration model --- */

DTN_API dtn_status dtn_pareto_cdf(double t, double alpha, double* out);
DTN_API dtn_status dtn_sample_pareto(double alpha, dtn_rng* rng, double* out);
/* Poisson(rate) many Pareto contact durations, summed. */
DTN_API dtn_status dtn_sample_total_contact_time(double rate, double alpha, dtn_rng* rng,
                                                 double* out);
/* Characteristic function of that compound total at frequency u. */
DTN_API dtn_status dtn_cf_total_contact_time(double u, double rate, double alpha,
                                             double* out_re, double* out_im);
/* P[total contact time < t0] by numerical inversion; alpha in (1, 100]. */
DTN_API dtn_status dtn_total_contact_time_below(double t0, double rate, double alpha,
                                                double tolerance, double* out);

#define DTN_DURATION_MONTE_CARLO 0
#define DTN_DURATION_CF_INVERSION 1

/* Miss rate when a transfer needs t0 accumulated contact time with holders
 * of the file: sum_n p_n P[T_total,n < t0], rates lambda T q_n.
 * mc_samples/mc_seed drive the Monte Carlo method, cf_tolerance the
 * inversion. out_std_error receives the estimator standard error (0 for
 * inversion); out_per_file (optional, n_files elements) the per-file
 * probabilities. */
DTN_API dtn_status dtn_duration_miss_rate(const dtn_dist* dist,
                                          const dtn_network_params* params,
                                          const dtn_alloc* alloc, double pareto_alpha,
                                          double t0, int method, uint64_t mc_samples,
                                          uint64_t mc_seed, double cf_tolerance,
                                          double* out_miss, double* out_std_error,
                                          double* out_per_file);

/* --- numerics --- */

/* Principal-branch Lambert W for x >= 0. */
DTN_API dtn_status dtn_lambert_w0(double x, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DTNCACHE_H */
