#pragma once

#include <cstddef>
#include <vector>

#include "params.hpp"
#include "popularity.hpp"

namespace dtn {

// Per-file cache probabilities q[0..N): each entry in [0, 1], summing to
// cache_capacity. q is nonincreasing whenever the paired distribution is.
// q[n] is also the expected number of copies of file n per user cache.
struct AllocationVector {
  std::vector<double> q;

  std::size_t size() const { return q.size(); }
  double sum() const;
};

// Dual certificate for an allocation returned by optimal_allocation.
// eta is the multiplier of the sum constraint; mu_upper[n] / mu_lower[n]
// are the multipliers of q[n] <= 1 and -q[n] <= 0. n1/n2 are the 1-based
// bounds of the fractional block: ranks [1, n1) saturate at 1, ranks
// [n1, n2] are interior, ranks (n2, N] are zero. n1 > n2 means no
// fractional block.
struct KKTCertificate {
  double eta = 0.0;
  std::vector<double> mu_upper;
  std::vector<double> mu_lower;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

struct OptimalAllocation {
  AllocationVector alloc;
  KKTCertificate cert;
};

// Worst-case residuals of the first-order optimality system for
// (alloc, cert) on the given instance. All four should be at noise level
// (<= 1e-8) for a certificate produced by optimal_allocation.
struct KKTCheck {
  double max_stationarity = 0.0;    // |mu_up - mu_low + eta - p e^(-LTq)(1+LT-LTq)|
  double max_comp_slackness = 0.0;  // |mu_up (q-1)| and |mu_low q|
  double min_mu = 0.0;              // most negative dual value
  double sum_error = 0.0;           // |sum(q) - K|
};

// Closed-form unique minimizer coordinate for a given multiplier:
// clamp(1 + 1/(lambda_t) - W(eta e^(1+lambda_t) / p) / lambda_t, 0, 1).
// Nonincreasing in eta, nondecreasing in p.
double q_of_eta(double eta, double p, double lambda_t);

// Minimizes sum_n p_n (1 - q_n) e^(-lambda_t q_n) over the capped simplex
// {0 <= q <= 1, sum q = K} by binary search on eta between
// p_K e^(-lambda_t) and p_K (1 + lambda_t), stopping when
// |sum q - K| <= tol. When lambda_t is below 1e-12 the objective is
// effectively linear and the exact optimum (cache the K most popular
// files) is returned with the matching linear-program certificate.
//
// Throws numerical_error with the final bracket after max_iters halvings
// without convergence.
OptimalAllocation optimal_allocation(const PopularityDistribution& dist,
                                     const NetworkParams& params, double tol = 1e-9,
                                     int max_iters = 200);

// Expected miss rate when every cache holds a uniformly random K-subset:
// (1 - K/N) exp(-T (lambda_ap + lambda K/N)).
double analytic_miss_rate_random(const NetworkParams& params);

// Expected miss rate for an arbitrary allocation:
// e^(-lambda_ap T) sum_n p_n (1 - q_n) e^(-lambda_t q_n).
double analytic_miss_rate_selective(const PopularityDistribution& dist,
                                    const AllocationVector& alloc,
                                    const NetworkParams& params);

// The optimizer's objective: the selective miss rate without the access
// point factor (which scales every allocation equally).
double selective_objective(const PopularityDistribution& dist,
                           const AllocationVector& alloc, double lambda_t);

// Indicator allocation caching the K highest-ranked files everywhere.
AllocationVector k_most_popular_allocation(const PopularityDistribution& dist,
                                           std::size_t cache_capacity);

// Uniform allocation q_n = K/N.
AllocationVector random_allocation(const NetworkParams& params);

KKTCheck check_kkt(const PopularityDistribution& dist, const AllocationVector& alloc,
                   const KKTCertificate& cert, const NetworkParams& params);

}  // namespace dtn
