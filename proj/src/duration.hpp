#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "optimizer.hpp"
#include "params.hpp"
#include "popularity.hpp"
#include "rng.hpp"

namespace dtn {

// Contact-duration model: a transfer of file n succeeds only if the total
// contact time with holders of n accumulated over a patience window reaches
// the transmission time t0. Encounter counts are Poisson with rate
// lambda_t * q_n and individual contact durations are Pareto-distributed,
// so the total is compound Poisson with an atom exp(-rate) at zero.
struct DurationParams {
  double pareto_alpha = 0.0;
  double t0 = 0.0;
  NetworkParams base;
  AllocationVector alloc;

  // The allocation here may be any vector in [0,1]^N (it need not sum to
  // the cache capacity): the model is evaluated per file, and degenerate
  // inputs like the all-zero allocation are meaningful (no holders at all).
  void validate() const;
};

// P[contact duration <= t] = 1 - (t+1)^(-alpha).
double pareto_cdf(double t, double alpha);

// Inverse-CDF draw: (1-U)^(-1/alpha) - 1.
double sample_pareto(double alpha, RandomStream& rng);

// Draws N ~ Poisson(rate) and sums N independent Pareto durations.
double sample_total_contact_time(double rate, double alpha, RandomStream& rng);

// Characteristic function of the compound Poisson total:
// exp(rate * (phi(u) - 1)) where phi is the Pareto contact-duration CF.
std::complex<double> cf_total_contact_time(double u, double rate, double alpha);

// P[T_total < t0] for one file, by Gil-Pelaez inversion of the CF with the
// zero atom split out analytically. Absolute error <= tolerance. Requires
// alpha in (1, 100]: at alpha <= 1 the frequency integrand's branch point
// defeats the quadrature, and Monte Carlo is the supported estimator.
// Throws numerical_error if the frequency integral fails to converge.
double total_contact_time_below(double t0, double rate, double alpha,
                                double tolerance = 1e-4);

enum class DurationMethod { monte_carlo, cf_inversion };

struct DurationPrecision {
  std::uint64_t mc_samples = 100000;  // per-file Monte Carlo draws
  std::uint64_t mc_seed = 0;          // master seed; files use derived substreams
  double cf_tolerance = 1e-4;         // absolute error target per file
};

struct DurationResult {
  double miss_rate = 0.0;               // sum_n p_n * P[T_total,n < t0]
  double std_error = 0.0;               // estimator standard error (0 for cf_inversion)
  std::vector<double> per_file_miss;    // P[T_total,n < t0] per rank
};

// Expected miss rate when a request for file n fails iff the accumulated
// contact time with its holders falls short of t0.
DurationResult duration_aware_miss_rate(const DurationParams& dp,
                                        const PopularityDistribution& dist,
                                        DurationMethod method,
                                        const DurationPrecision& precision = {});

namespace detail {
// Pareto contact-duration CF phi(u) = integral of e^(iut) dF(t). Series
// expansion for small u, panel quadrature with an asymptotic tail for
// moderate u, pure asymptotic series for large u.
std::complex<double> pareto_cf(double u, double alpha);
}  // namespace detail

}  // namespace dtn
