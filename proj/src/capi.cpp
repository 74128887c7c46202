#include "dtncache/dtncache.h"

#include <cstring>
#include <exception>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "duration.hpp"
#include "errors.hpp"
#include "lambert.hpp"
#include "optimizer.hpp"
#include "params.hpp"
#include "popularity.hpp"
#include "rng.hpp"
#include "simulator.hpp"

struct dtn_dist {
  dtn::PopularityDistribution impl;
};
struct dtn_alloc {
  dtn::AllocationVector impl;
};
struct dtn_cert {
  dtn::KKTCertificate impl;
};
struct dtn_rng {
  dtn::RandomStream impl;
};
struct dtn_users {
  std::vector<dtn::UserState> impl;
};
struct dtn_stats {
  dtn::MissStats impl;
};

namespace {

thread_local std::string g_last_error;

dtn_status fail(dtn_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs the body and maps the library's exception taxonomy onto status
// codes; nothing may throw across the C boundary.
template <typename Fn>
dtn_status guarded(Fn&& fn) {
  try {
    fn();
    return DTN_OK;
  } catch (const dtn::invalid_parameter_error& e) {
    g_last_error = e.what();
    return DTN_ERROR_INVALID_ARGUMENT;
  } catch (const dtn::numerical_error& e) {
    g_last_error = e.what();
    return DTN_ERROR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DTN_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DTN_ERROR_INTERNAL;
  }
}

dtn::NetworkParams convert(const dtn_network_params& p) {
  dtn::NetworkParams out;
  out.lambda_user = p.lambda_user;
  out.lambda_ap = p.lambda_ap;
  out.patience = p.patience;
  out.n_files = static_cast<std::size_t>(p.n_files);
  out.cache_capacity = static_cast<std::size_t>(p.cache_capacity);
  out.n_users = static_cast<std::size_t>(p.n_users);
  return out;
}

}  // namespace

extern "C" {

const char* dtn_last_error(void) { return g_last_error.c_str(); }

/* --- random streams --- */

dtn_rng* dtn_rng_create(uint64_t seed) {
  return new (std::nothrow) dtn_rng{dtn::RandomStream(seed)};
}

dtn_rng* dtn_rng_create_labeled(uint64_t master_seed, const char* label) {
  if (!label) return nullptr;
  return new (std::nothrow) dtn_rng{dtn::RandomStream(master_seed, label)};
}

void dtn_rng_free(dtn_rng* rng) { delete rng; }

/* --- popularity distributions --- */

dtn_status dtn_dist_zipf(uint64_t n_files, double alpha, dtn_dist** out) {
  if (!out) return fail(DTN_ERROR_INVALID_ARGUMENT, "out must not be null");
  return guarded([&] {
    *out = new dtn_dist{
        dtn::PopularityDistribution::zipf(static_cast<std::size_t>(n_files), alpha)};
  });
}

dtn_status dtn_dist_from_raw(const double* weights, uint64_t n, dtn_dist** out) {
  if (!out || !weights)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "weights and out must not be null");
  return guarded([&] {
    *out = new dtn_dist{dtn::PopularityDistribution::from_raw(
        std::span<const double>(weights, static_cast<std::size_t>(n)))};
  });
}

uint64_t dtn_dist_size(const dtn_dist* dist) { return dist ? dist->impl.size() : 0; }

dtn_status dtn_dist_probs(const dtn_dist* dist, double* out) {
  if (!dist || !out) return fail(DTN_ERROR_INVALID_ARGUMENT, "dist and out must not be null");
  const std::vector<double>& p = dist->impl.probs();
  std::memcpy(out, p.data(), p.size() * sizeof(double));
  return DTN_OK;
}

dtn_status dtn_dist_permutation(const dtn_dist* dist, uint64_t* out) {
  if (!dist || !out) return fail(DTN_ERROR_INVALID_ARGUMENT, "dist and out must not be null");
  const std::vector<std::size_t>& perm = dist->impl.permutation();
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = perm[i];
  return DTN_OK;
}

dtn_status dtn_dist_sample(const dtn_dist* dist, dtn_rng* rng, uint64_t* out_rank) {
  if (!dist || !rng || !out_rank)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "dist, rng and out must not be null");
  return guarded([&] { *out_rank = dist->impl.sample_rank(rng->impl); });
}

void dtn_dist_free(dtn_dist* dist) { delete dist; }

/* --- allocations and the optimizer --- */

dtn_status dtn_alloc_from_q(const double* q, uint64_t n, dtn_alloc** out) {
  if (!q || !out) return fail(DTN_ERROR_INVALID_ARGUMENT, "q and out must not be null");
  return guarded([&] {
    *out = new dtn_alloc{
        dtn::AllocationVector{std::vector<double>(q, q + static_cast<std::size_t>(n))}};
  });
}

uint64_t dtn_alloc_size(const dtn_alloc* alloc) { return alloc ? alloc->impl.size() : 0; }

dtn_status dtn_alloc_values(const dtn_alloc* alloc, double* out) {
  if (!alloc || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "alloc and out must not be null");
  std::memcpy(out, alloc->impl.q.data(), alloc->impl.q.size() * sizeof(double));
  return DTN_OK;
}

void dtn_alloc_free(dtn_alloc* alloc) { delete alloc; }

dtn_status dtn_k_most_popular_allocation(const dtn_dist* dist, uint64_t cache_capacity,
                                         dtn_alloc** out) {
  if (!dist || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "dist and out must not be null");
  return guarded([&] {
    *out = new dtn_alloc{dtn::k_most_popular_allocation(
        dist->impl, static_cast<std::size_t>(cache_capacity))};
  });
}

dtn_status dtn_random_allocation(const dtn_network_params* params, dtn_alloc** out) {
  if (!params || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "params and out must not be null");
  return guarded([&] { *out = new dtn_alloc{dtn::random_allocation(convert(*params))}; });
}

dtn_status dtn_optimal_allocation(const dtn_dist* dist, const dtn_network_params* params,
                                  double tol, dtn_alloc** out_alloc, dtn_cert** out_cert) {
  if (!dist || !params || !out_alloc)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "dist, params and out_alloc must not be null");
  return guarded([&] {
    dtn::OptimalAllocation result =
        dtn::optimal_allocation(dist->impl, convert(*params), tol > 0.0 ? tol : 1e-9);
    *out_alloc = new dtn_alloc{std::move(result.alloc)};
    if (out_cert) *out_cert = new dtn_cert{std::move(result.cert)};
  });
}

double dtn_cert_eta(const dtn_cert* cert) { return cert ? cert->impl.eta : 0.0; }
uint64_t dtn_cert_n1(const dtn_cert* cert) { return cert ? cert->impl.n1 : 0; }
uint64_t dtn_cert_n2(const dtn_cert* cert) { return cert ? cert->impl.n2 : 0; }

dtn_status dtn_cert_mu_upper(const dtn_cert* cert, double* out) {
  if (!cert || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "cert and out must not be null");
  std::memcpy(out, cert->impl.mu_upper.data(), cert->impl.mu_upper.size() * sizeof(double));
  return DTN_OK;
}

dtn_status dtn_cert_mu_lower(const dtn_cert* cert, double* out) {
  if (!cert || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "cert and out must not be null");
  std::memcpy(out, cert->impl.mu_lower.data(), cert->impl.mu_lower.size() * sizeof(double));
  return DTN_OK;
}

void dtn_cert_free(dtn_cert* cert) { delete cert; }

dtn_status dtn_miss_rate_random(const dtn_network_params* params, double* out) {
  if (!params || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "params and out must not be null");
  return guarded([&] { *out = dtn::analytic_miss_rate_random(convert(*params)); });
}

dtn_status dtn_miss_rate_selective(const dtn_dist* dist, const dtn_alloc* alloc,
                                   const dtn_network_params* params, double* out) {
  if (!dist || !alloc || !params || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "dist, alloc, params and out must not be null");
  return guarded([&] {
    *out = dtn::analytic_miss_rate_selective(dist->impl, alloc->impl, convert(*params));
  });
}

/* --- contact simulation --- */

dtn_status dtn_fill_caches_selective(const dtn_alloc* alloc,
                                     const dtn_network_params* params, dtn_rng* rng,
                                     dtn_users** out) {
  if (!alloc || !params || !rng || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "alloc, params, rng and out must not be null");
  return guarded([&] {
    *out = new dtn_users{
        dtn::fill_caches_selective(alloc->impl, convert(*params), rng->impl)};
  });
}

dtn_status dtn_fill_caches_exact(const dtn_alloc* alloc, const dtn_network_params* params,
                                 dtn_rng* rng, dtn_users** out) {
  if (!alloc || !params || !rng || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "alloc, params, rng and out must not be null");
  return guarded([&] {
    *out = new dtn_users{dtn::fill_caches_exact(alloc->impl, convert(*params), rng->impl)};
  });
}

void dtn_users_free(dtn_users* users) { delete users; }

dtn_status dtn_empirical_allocation(const dtn_users* users, uint64_t n_files, double* out) {
  if (!users || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "users and out must not be null");
  return guarded([&] {
    std::vector<double> freq =
        dtn::empirical_allocation(users->impl, static_cast<std::size_t>(n_files));
    std::memcpy(out, freq.data(), freq.size() * sizeof(double));
  });
}

dtn_status dtn_simulate_misses(const dtn_dist* dist, const dtn_network_params* params,
                               uint64_t n_requests, const dtn_users* users, dtn_rng* rng,
                               dtn_stats** out) {
  if (!dist || !params || !users || !rng || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT,
                "dist, params, users, rng and out must not be null");
  return guarded([&] {
    dtn::SimConfig cfg{convert(*params), dist->impl, dtn::AllocationVector{}, 0,
                       n_requests};
    *out = new dtn_stats{dtn::simulate_misses(cfg, users->impl, rng->impl)};
  });
}

uint64_t dtn_stats_requests(const dtn_stats* stats) {
  return stats ? stats->impl.requests : 0;
}

uint64_t dtn_stats_misses(const dtn_stats* stats) {
  return stats ? stats->impl.misses : 0;
}

dtn_status dtn_stats_per_file_requests(const dtn_stats* stats, uint64_t* out) {
  if (!stats || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "stats and out must not be null");
  const std::vector<std::uint64_t>& v = stats->impl.per_file_requests;
  std::memcpy(out, v.data(), v.size() * sizeof(uint64_t));
  return DTN_OK;
}

dtn_status dtn_stats_per_file_misses(const dtn_stats* stats, uint64_t* out) {
  if (!stats || !out)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "stats and out must not be null");
  const std::vector<std::uint64_t>& v = stats->impl.per_file_misses;
  std::memcpy(out, v.data(), v.size() * sizeof(uint64_t));
  return DTN_OK;
}

void dtn_stats_free(dtn_stats* stats) { delete stats; }

/* --- lambda-T sweep --- */

dtn_status dtn_sweep(const dtn_dist* dist, const dtn_network_params* params,
                     const char* const* schemes, uint64_t n_schemes, const double* grid,
                     uint64_t n_grid, uint64_t seed, uint64_t n_requests,
                     dtn_sweep_row** out_rows, uint64_t* out_n_rows) {
  if (!dist || !params || !schemes || !grid || !out_rows || !out_n_rows)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "all pointer arguments must be non-null");
  return guarded([&] {
    std::vector<std::string> scheme_names;
    scheme_names.reserve(n_schemes);
    for (uint64_t i = 0; i < n_schemes; ++i) {
      if (!schemes[i]) throw dtn::invalid_parameter_error("scheme name must not be null");
      scheme_names.emplace_back(schemes[i]);
    }
    dtn::SimConfig cfg{convert(*params), dist->impl, dtn::AllocationVector{}, seed,
                       n_requests};
    const std::vector<dtn::SweepRow> rows = dtn::sweep_lambda_t(
        scheme_names, std::vector<double>(grid, grid + n_grid), cfg);

    dtn_sweep_row* out = new dtn_sweep_row[rows.size()]();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::strncpy(out[i].scheme, rows[i].scheme.c_str(), sizeof(out[i].scheme) - 1);
      out[i].lambda_t = rows[i].lambda_t;
      out[i].analytic_miss = rows[i].analytic_miss;
      out[i].empirical_miss = rows[i].empirical_miss;
      out[i].requests = rows[i].requests;
      out[i].seed = rows[i].seed;
    }
    *out_rows = out;
    *out_n_rows = rows.size();
  });
}

void dtn_sweep_rows_free(dtn_sweep_row* rows) { delete[] rows; }

/* --- contact-duration model --- */

dtn_status dtn_pareto_cdf(double t, double alpha, double* out) {
  if (!out) return fail(DTN_ERROR_INVALID_ARGUMENT, "out must not be null");
  return guarded([&] { *out = dtn::pareto_cdf(t, alpha); });
}

dtn_status dtn_sample_pareto(double alpha, dtn_rng* rng, double* out) {
  if (!rng || !out) return fail(DTN_ERROR_INVALID_ARGUMENT, "rng and out must not be null");
  return guarded([&] { *out = dtn::sample_pareto(alpha, rng->impl); });
}

dtn_status dtn_sample_total_contact_time(double rate, double alpha, dtn_rng* rng,
                                         double* out) {
  if (!rng || !out) return fail(DTN_ERROR_INVALID_ARGUMENT, "rng and out must not be null");
  return guarded([&] { *out = dtn::sample_total_contact_time(rate, alpha, rng->impl); });
}

dtn_status dtn_cf_total_contact_time(double u, double rate, double alpha, double* out_re,
                                     double* out_im) {
  if (!out_re || !out_im)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "out_re and out_im must not be null");
  return guarded([&] {
    const std::complex<double> value = dtn::cf_total_contact_time(u, rate, alpha);
    *out_re = value.real();
    *out_im = value.imag();
  });
}

dtn_status dtn_total_contact_time_below(double t0, double rate, double alpha,
                                        double tolerance, double* out) {
  if (!out) return fail(DTN_ERROR_INVALID_ARGUMENT, "out must not be null");
  return guarded(
      [&] { *out = dtn::total_contact_time_below(t0, rate, alpha, tolerance); });
}

dtn_status dtn_duration_miss_rate(const dtn_dist* dist, const dtn_network_params* params,
                                  const dtn_alloc* alloc, double pareto_alpha, double t0,
                                  int method, uint64_t mc_samples, uint64_t mc_seed,
                                  double cf_tolerance, double* out_miss,
                                  double* out_std_error, double* out_per_file) {
  if (!dist || !params || !alloc || !out_miss)
    return fail(DTN_ERROR_INVALID_ARGUMENT,
                "dist, params, alloc and out_miss must not be null");
  if (method != DTN_DURATION_MONTE_CARLO && method != DTN_DURATION_CF_INVERSION)
    return fail(DTN_ERROR_INVALID_ARGUMENT, "unknown duration method");
  return guarded([&] {
    dtn::DurationParams dp;
    dp.pareto_alpha = pareto_alpha;
    dp.t0 = t0;
    dp.base = convert(*params);
    dp.alloc = alloc->impl;
    dtn::DurationPrecision precision;
    precision.mc_samples = mc_samples;
    precision.mc_seed = mc_seed;
    precision.cf_tolerance = cf_tolerance;
    const dtn::DurationResult result = dtn::duration_aware_miss_rate(
        dp, dist->impl,
        method == DTN_DURATION_MONTE_CARLO ? dtn::DurationMethod::monte_carlo
                                           : dtn::DurationMethod::cf_inversion,
        precision);
    *out_miss = result.miss_rate;
    if (out_std_error) *out_std_error = result.std_error;
    if (out_per_file)
      std::memcpy(out_per_file, result.per_file_miss.data(),
                  result.per_file_miss.size() * sizeof(double));
  });
}

/* --- numerics --- */

dtn_status dtn_lambert_w0(double x, double* out) {
  if (!out) return fail(DTN_ERROR_INVALID_ARGUMENT, "out must not be null");
  return guarded([&] { *out = dtn::lambert_w0(x); });
}

} /* extern "C" */
