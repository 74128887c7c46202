#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "errors.hpp"
#include "lambert.hpp"

namespace dtn {

namespace {

// Compensated accumulation; the optimizer's stopping rule compares sums
// of up to 1e4 terms against a 1e-9 tolerance, which plain summation
// cannot reliably hit.
double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double sum_q_of_eta(double eta, const std::vector<double>& probs, double lambda_t) {
  double sum = 0.0, c = 0.0;
  for (double p : probs) {
    double y = q_of_eta(eta, p, lambda_t) - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void validate_pair(const PopularityDistribution& dist, const NetworkParams& params) {
  params.validate();
  if (dist.size() != params.n_files) {
    throw invalid_parameter_error(
        "distribution has " + std::to_string(dist.size()) + " files but params expect " +
        std::to_string(params.n_files));
  }
}

// Certificate for the interior/boundary split at the final eta. Blocks are
// detected by exact comparison: q_of_eta clamps to literal 0.0 / 1.0.
KKTCertificate make_certificate(const std::vector<double>& q,
                                const std::vector<double>& probs, double eta,
                                double lambda_t) {
  const std::size_t n = q.size();
  KKTCertificate cert;
  cert.eta = eta;
  cert.mu_upper.assign(n, 0.0);
  cert.mu_lower.assign(n, 0.0);

  std::size_t first_interior = n;  // 0-based index of first q < 1
  std::size_t last_interior = 0;   // 0-based index of last q > 0, plus 1
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] < 1.0 && first_interior == n) first_interior = i;
    if (q[i] > 0.0) last_interior = i + 1;
  }

  const double decay = std::exp(-lambda_t);
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] == 1.0) {
      // stationarity: mu_up = p e^(-LT) - eta; tiny negatives are rounding
      cert.mu_upper[i] = std::max(0.0, probs[i] * decay - eta);
    } else if (q[i] == 0.0) {
      cert.mu_lower[i] = std::max(0.0, eta - probs[i] * (1.0 + lambda_t));
    }
  }

  cert.n1 = first_interior + 1;  // 1-based
  cert.n2 = last_interior;       // already 1-based as "count through last nonzero"
  return cert;
}

}  // namespace

double AllocationVector::sum() const { return kahan_sum(q); }

double q_of_eta(double eta, double p, double lambda_t) {
  if (!(eta > 0.0)) throw invalid_parameter_error("q_of_eta: eta must be positive");
  if (!(p > 0.0)) throw invalid_parameter_error("q_of_eta: p must be positive");
  if (!(lambda_t > 0.0))
    throw invalid_parameter_error("q_of_eta: lambda_t must be positive");

  // Solve p e^(-LT q)(1 + LT - LT q) = eta on the unclamped line, then
  // project. Substituting v = 1 + LT - LT q turns it into v e^v =
  // eta e^(1+LT) / p, i.e. v = W of the right-hand side.
  const double log_arg = std::log(eta) + 1.0 + lambda_t - std::log(p);
  double w;
  if (log_arg > 230.0) {
    // argument overflows double; solve w + ln w = log_arg directly
    w = detail::lambert_w0_from_log(log_arg);
  } else {
    w = lambert_w0(std::exp(log_arg));
  }
  const double raw = 1.0 + (1.0 - w) / lambda_t;
  if (raw >= 1.0) return 1.0;
  if (raw <= 0.0) return 0.0;
  return raw;
}

OptimalAllocation optimal_allocation(const PopularityDistribution& dist,
                                     const NetworkParams& params, double tol,
                                     int max_iters) {
  validate_pair(dist, params);
  if (!(tol > 0.0)) throw invalid_parameter_error("optimal_allocation: tol must be positive");
  if (max_iters < 1)
    throw invalid_parameter_error("optimal_allocation: max_iters must be at least 1");

  const std::vector<double>& probs = dist.probs();
  const std::size_t n = probs.size();
  const std::size_t k = params.cache_capacity;
  const double lambda_t = params.lambda_t();

  if (lambda_t < 1e-12) {
    // Objective degenerates to sum p_n (1 - q_n): a linear program whose
    // optimum is the K most popular files. Certificate is the LP dual.
    OptimalAllocation out;
    out.alloc = k_most_popular_allocation(dist, k);
    const double eta = probs[k - 1];
    out.cert.eta = eta;
    out.cert.mu_upper.assign(n, 0.0);
    out.cert.mu_lower.assign(n, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      out.cert.mu_upper[i] = std::max(0.0, probs[i] - eta);
    for (std::size_t i = k; i < n; ++i)
      out.cert.mu_lower[i] = std::max(0.0, eta - probs[i]);
    out.cert.n1 = k + 1;
    out.cert.n2 = k;
    return out;
  }

  if (k == n) {
    OptimalAllocation out;
    out.alloc.q.assign(n, 1.0);
    const double decay = std::exp(-lambda_t);
    out.cert.eta = probs[n - 1] * decay;
    out.cert.mu_upper.assign(n, 0.0);
    out.cert.mu_lower.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      out.cert.mu_upper[i] = std::max(0.0, probs[i] * decay - out.cert.eta);
    out.cert.n1 = n + 1;
    out.cert.n2 = n;
    return out;
  }

  // sum q(eta) is nonincreasing in eta. At eta = p_K e^(-LT) rank K is
  // still saturated (sum >= K); at eta = p_K (1 + LT) ranks K..N are all
  // zero (sum <= K). Widen a few times in case rounding lands outside.
  const double p_k = probs[k - 1];
  double lo = p_k * std::exp(-lambda_t);
  double hi = p_k * (1.0 + lambda_t);
  for (int i = 0; i < 8 && sum_q_of_eta(lo, probs, lambda_t) < static_cast<double>(k); ++i)
    lo /= 2.0;
  for (int i = 0; i < 8 && sum_q_of_eta(hi, probs, lambda_t) > static_cast<double>(k); ++i)
    hi *= 2.0;

  const double target = static_cast<double>(k);
  double eta = hi;
  double sum = sum_q_of_eta(eta, probs, lambda_t);
  bool converged = std::abs(sum - target) <= tol;
  for (int iter = 0; iter < max_iters && !converged; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted at double precision
    sum = sum_q_of_eta(mid, probs, lambda_t);
    eta = mid;
    if (std::abs(sum - target) <= tol) {
      converged = true;
    } else if (sum > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!converged) {
    throw numerical_error("optimal_allocation: eta bisection stalled, |sum q - K| = " +
                              std::to_string(std::abs(sum - target)),
                          lo, hi);
  }

  OptimalAllocation out;
  out.alloc.q.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.alloc.q[i] = q_of_eta(eta, probs[i], lambda_t);
  out.cert = make_certificate(out.alloc.q, probs, eta, lambda_t);
  return out;
}

double analytic_miss_rate_random(const NetworkParams& params) {
  params.validate();
  const double frac =
      static_cast<double>(params.cache_capacity) / static_cast<double>(params.n_files);
  return (1.0 - frac) *
         std::exp(-params.patience * (params.lambda_ap + params.lambda_user * frac));
}

double selective_objective(const PopularityDistribution& dist,
                           const AllocationVector& alloc, double lambda_t) {
  if (alloc.size() != dist.size())
    throw invalid_parameter_error("allocation and distribution sizes differ");
  if (lambda_t < 0.0 || !std::isfinite(lambda_t))
    throw invalid_parameter_error("lambda_t must be finite and nonnegative");
  const std::vector<double>& probs = dist.probs();
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double q = alloc.q[i];
    if (q < 0.0 || q > 1.0 || !std::isfinite(q))
      throw invalid_parameter_error("allocation entries must lie in [0, 1]");
    double y = probs[i] * (1.0 - q) * std::exp(-lambda_t * q) - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double analytic_miss_rate_selective(const PopularityDistribution& dist,
                                    const AllocationVector& alloc,
                                    const NetworkParams& params) {
  params.validate();
  if (dist.size() != params.n_files)
    throw invalid_parameter_error("distribution size does not match params.n_files");
  return std::exp(-params.lambda_ap * params.patience) *
         selective_objective(dist, alloc, params.lambda_t());
}

AllocationVector k_most_popular_allocation(const PopularityDistribution& dist,
                                           std::size_t cache_capacity) {
  if (cache_capacity == 0 || cache_capacity > dist.size())
    throw invalid_parameter_error("cache_capacity must be in [1, n_files]");
  AllocationVector alloc;
  alloc.q.assign(dist.size(), 0.0);
  std::fill(alloc.q.begin(), alloc.q.begin() + static_cast<std::ptrdiff_t>(cache_capacity),
            1.0);
  return alloc;
}

AllocationVector random_allocation(const NetworkParams& params) {
  params.validate();
  AllocationVector alloc;
  alloc.q.assign(params.n_files, static_cast<double>(params.cache_capacity) /
                                     static_cast<double>(params.n_files));
  return alloc;
}

KKTCheck check_kkt(const PopularityDistribution& dist, const AllocationVector& alloc,
                   const KKTCertificate& cert, const NetworkParams& params) {
  validate_pair(dist, params);
  if (alloc.size() != dist.size() || cert.mu_upper.size() != dist.size() ||
      cert.mu_lower.size() != dist.size())
    throw invalid_parameter_error("check_kkt: size mismatch");

  const std::vector<double>& probs = dist.probs();
  const double lambda_t = params.lambda_t();
  KKTCheck check;
  check.min_mu = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double q = alloc.q[i];
    const double grad_term =
        probs[i] * std::exp(-lambda_t * q) * (1.0 + lambda_t - lambda_t * q);
    const double stat =
        std::abs(cert.mu_upper[i] - cert.mu_lower[i] + cert.eta - grad_term);
    check.max_stationarity = std::max(check.max_stationarity, stat);
    check.max_comp_slackness =
        std::max({check.max_comp_slackness, std::abs(cert.mu_upper[i] * (q - 1.0)),
                  std::abs(cert.mu_lower[i] * q)});
    check.min_mu = std::min({check.min_mu, cert.mu_upper[i], cert.mu_lower[i]});
  }
  check.sum_error =
      std::abs(alloc.sum() - static_cast<double>(params.cache_capacity));
  return check;
}

}  // namespace dtn
