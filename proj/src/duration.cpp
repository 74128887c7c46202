#include "duration.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace dtn {

namespace {

using cplx = std::complex<double>;

constexpr double kEulerGamma = 0.5772156649015328606;

struct GaussLegendre15 {
  double x[15];
  double w[15];
};

// Nodes and weights computed once by Newton iteration on P_15; exact to
// machine precision, no tables to transcribe.
const GaussLegendre15& gl15() {
  static const GaussLegendre15 table = [] {
    GaussLegendre15 t{};
    constexpr int n = 15;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) {
          p0 = 1.0;
          p1 = x;
          for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (x * p1 - p0) / (x * x - 1.0);
          break;
        }
      }
      t.x[n - 1 - i] = x;
      t.x[i] = -x;
      t.w[i] = t.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return t;
  }();
  return table;
}

// Integral of e^(iut) alpha (1+t)^(-alpha-1) over [L, inf) as the
// integration-by-parts series e^(iuL) sum_k -alpha (alpha+1)_k
// (1+L)^(-alpha-1-k) / (iu)^(k+1). The remainder after m terms is bounded
// by alpha (alpha+1)_m (1+L)^(-alpha-m) / (u^m (alpha+m)); terms are added
// while that bound shrinks, so the result carries the series' best
// accuracy at this u (far below 1e-10 in the regimes that use it).
cplx tail_integral(double u, double L, double alpha) {
  const cplx iu(0.0, u);
  cplx term = -alpha * std::pow(1.0 + L, -alpha - 1.0) / iu;
  double bound = std::pow(1.0 + L, -alpha);
  cplx sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double next_bound =
        bound * (alpha + 1.0 + k) * (alpha + k) / ((1.0 + L) * u * (alpha + k + 1.0));
    if (next_bound >= bound && k > 0) break;  // asymptotic series turned
    sum += term;
    bound = next_bound;
    if (bound < 1e-16) break;
    term *= (alpha + 1.0 + k) / ((1.0 + L) * iu);
  }
  if (L == 0.0) return sum;
  return std::exp(cplx(0.0, u * L)) * sum;
}

// Small-u evaluation through E_nu(-iu), nu = alpha + 1:
// phi(u) = alpha e^(-iu) E_nu(-iu). Integer nu takes the digamma/log
// variant of the series; alpha within 1e-8 of an integer is snapped onto
// it, since the non-integer form loses all precision to the
// Gamma(1-nu) / (k = nu-1 term) cancellation there.
cplx series_cf(double u, double alpha) {
  const cplx iu(0.0, u);  // equals -z for z = -iu
  const double snapped = std::round(alpha);
  const bool integer_shape = std::abs(alpha - snapped) < 1e-8;

  cplx e_nu;
  if (integer_shape) {
    const int a_int = static_cast<int>(snapped);
    const int n = a_int + 1;
    double psi = -kEulerGamma;
    for (int j = 1; j < n; ++j) psi += 1.0 / j;
    const cplx ln_z(std::log(u), -std::numbers::pi / 2.0);
    cplx lead = psi - ln_z;
    for (int j = 0; j < n - 1; ++j) lead *= iu / static_cast<double>(j + 1);
    cplx sum = 0.0;
    cplx c = 1.0;  // (iu)^k / k!
    for (int k = 0; k < 200; ++k) {
      if (k != n - 1) sum += c / static_cast<double>(k - (n - 1));
      c *= iu / static_cast<double>(k + 1);
      if (k > u && std::abs(c) < 1e-18) break;
    }
    e_nu = lead - sum;
    return snapped * std::exp(-iu) * e_nu;
  }

  // Gamma(-alpha) via reflection; z^alpha on the principal branch with
  // arg(-iu) = -pi/2.
  const double gamma_neg =
      -std::numbers::pi / (std::sin(std::numbers::pi * alpha) * std::tgamma(1.0 + alpha));
  const cplx z_pow =
      std::pow(u, alpha) * std::exp(cplx(0.0, -alpha * std::numbers::pi / 2.0));
  cplx sum = 0.0;
  cplx c = 1.0;
  for (int k = 0; k < 200; ++k) {
    sum += c / (static_cast<double>(k) - alpha);
    c *= iu / static_cast<double>(k + 1);
    if (k > u && std::abs(c) < 1e-18) break;
  }
  e_nu = gamma_neg * z_pow - sum;
  return alpha * std::exp(-iu) * e_nu;
}

cplx quadrature_cf(double u, double alpha) {
  const GaussLegendre15& gl = gl15();
  constexpr double kCut = 12.0;
  const double width = std::min(0.7, 8.0 / u);
  const int panels = static_cast<int>(std::ceil(kCut / width));
  const double h = kCut / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    const double half = 0.5 * h;
    for (int j = 0; j < 15; ++j) {
      const double t = mid + half * gl.x[j];
      sum += half * gl.w[j] * std::exp(cplx(0.0, u * t)) * alpha *
             std::pow(1.0 + t, -alpha - 1.0);
    }
  }
  return sum + tail_integral(u, kCut, alpha);
}

// exp(z) - 1 without cancellation for small z.
cplx cexpm1(const cplx& z) {
  if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// CF of the compound total minus its atom at zero. Bounded by min(2,
// 2 rate |phi|) and decaying like 1/u, which drives the inversion's tail.
cplx continuous_part_cf(const cplx& phi, double rate) {
  const cplx scaled = rate * phi;
  if (std::abs(scaled) <= 0.5) return std::exp(-rate) * cexpm1(scaled);
  return std::exp(rate * (phi - 1.0)) - std::exp(-rate);
}

// Frequency nodes for the inversion integral, shared across files: the
// panel layout depends only on t0 and alpha, so each file walks the same
// node sequence and stops where its own tail bound allows. phi values are
// computed once per node.
//
// For non-integer alpha < 2 the integrand behaves like u^(alpha-1) near
// zero (the CF's heavy-tail branch point), so the first subpanel is
// refined dyadically toward zero; GL15 is then accurate on every piece.
struct FrequencyGrid {
  double t0;
  double alpha;
  double half_period;
  int subpanels;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<cplx> phi;
  std::vector<std::size_t> period_end;  // node count through each half-period

  FrequencyGrid(double t0_, double alpha_) : t0(t0_), alpha(alpha_) {
    half_period = std::numbers::pi / t0;
    // Convergence cannot be declared before five half-periods, so a t0 whose
    // fifth half-period already crosses the cap can only fail; refuse it
    // before allocating anything.
    if (5.0 * half_period > kMaxFrequency) {
      throw numerical_error(
          "t0 is too small for characteristic-function inversion "
          "(frequency cap exceeded); use the Monte Carlo method");
    }
    subpanels = static_cast<int>(std::ceil(half_period / 0.7));
  }

  static constexpr double kMaxFrequency = 1e6;
  static constexpr std::size_t kMaxNodes = 5000000;
  static constexpr int kOriginHalvings = 14;

  void add_panel(double lo, double hi) {
    const GaussLegendre15& gl = gl15();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int j = 0; j < 15; ++j) {
      const double u = mid + half * gl.x[j];
      nodes.push_back(u);
      weights.push_back(half * gl.w[j]);
      phi.push_back(detail::pareto_cf(u, alpha));
    }
  }

  void extend() {
    const std::size_t m = period_end.size();
    const double start = static_cast<double>(m) * half_period;
    if (start >= kMaxFrequency) {
      throw numerical_error(
          "characteristic function inversion did not converge below the frequency cap");
    }
    const double w = half_period / subpanels;
    for (int s = 0; s < subpanels; ++s) {
      if (nodes.size() > kMaxNodes) {
        throw numerical_error(
            "characteristic function inversion exceeded its frequency grid budget");
      }
      const double lo = start + s * w;
      const double hi = start + (s + 1) * w;
      if (m == 0 && s == 0) {
        double edge = w * std::pow(0.5, kOriginHalvings);
        add_panel(0.0, edge);
        for (int j = 0; j < kOriginHalvings; ++j) {
          add_panel(edge, 2.0 * edge);
          edge *= 2.0;
        }
      } else {
        add_panel(lo, hi);
      }
    }
    period_end.push_back(nodes.size());
  }
};

// Gil-Pelaez with the atom split out: for t0 > 0,
//   P[T < t0] = 1/2 + e^(-rate)/2 - (1/pi) int_0^inf Im[e^(-iut0) psi(u)]/u du
// with psi the continuous part's CF. Half-period contributions alternate
// once u is past the CF's asymptotic onset, so two consecutive terms under
// tolerance/4 bound the remaining tail by tolerance/4.
double invert_below(FrequencyGrid& grid, double rate, double tolerance) {
  const double onset = 30.0 + 6.0 * grid.alpha;
  double integral = 0.0;
  int consecutive_small = 0;
  for (std::size_t m = 0;; ++m) {
    while (m >= grid.period_end.size()) grid.extend();
    double term = 0.0;
    const std::size_t begin = m == 0 ? 0 : grid.period_end[m - 1];
    for (std::size_t i = begin; i < grid.period_end[m]; ++i) {
      const double u = grid.nodes[i];
      const cplx psi = continuous_part_cf(grid.phi[i], rate);
      const cplx rotated = std::exp(cplx(0.0, -u * grid.t0)) * psi;
      term += grid.weights[i] * rotated.imag() / u;
    }
    integral += term;
    const double u_end = static_cast<double>(m + 1) * grid.half_period;
    if (u_end >= onset && m >= 3) {
      consecutive_small = std::abs(term) < 0.25 * tolerance ? consecutive_small + 1 : 0;
      if (consecutive_small >= 2) break;
    }
  }
  const double p =
      0.5 + 0.5 * std::exp(-rate) - integral / std::numbers::pi;
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

namespace detail {

cplx pareto_cf(double u, double alpha) {
  if (u == 0.0) return 1.0;
  if (u < 0.0) return std::conj(pareto_cf(-u, alpha));
  if (u <= 4.0) return series_cf(u, alpha);
  if (u >= 30.0 + 6.0 * alpha) return tail_integral(u, 0.0, alpha);
  return quadrature_cf(u, alpha);
}

}  // namespace detail

void DurationParams::validate() const {
  if (!(pareto_alpha > 0.0) || !std::isfinite(pareto_alpha))
    throw invalid_parameter_error("pareto_alpha must be positive and finite");
  if (!(t0 >= 0.0) || !std::isfinite(t0))
    throw invalid_parameter_error("t0 must be nonnegative and finite");
  base.validate();
  if (alloc.size() != base.n_files)
    throw invalid_parameter_error("allocation size does not match n_files");
  for (double q : alloc.q) {
    if (!(q >= 0.0) || !(q <= 1.0))
      throw invalid_parameter_error("allocation entries must lie in [0, 1]");
  }
}

double pareto_cdf(double t, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw invalid_parameter_error("pareto_cdf: alpha must be positive");
  if (!(t >= 0.0)) throw invalid_parameter_error("pareto_cdf: t must be nonnegative");
  return -std::expm1(-alpha * std::log1p(t));
}

double sample_pareto(double alpha, RandomStream& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw invalid_parameter_error("sample_pareto: alpha must be positive");
  return std::pow(1.0 - rng.next_double(), -1.0 / alpha) - 1.0;
}

double sample_total_contact_time(double rate, double alpha, RandomStream& rng) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw invalid_parameter_error("sample_total_contact_time: rate must be nonnegative");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw invalid_parameter_error("sample_total_contact_time: alpha must be positive");
  const std::uint64_t n = rng.poisson(rate);
  double total = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) total += sample_pareto(alpha, rng);
  return total;
}

std::complex<double> cf_total_contact_time(double u, double rate, double alpha) {
  if (!std::isfinite(u)) throw invalid_parameter_error("cf: u must be finite");
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw invalid_parameter_error("cf: rate must be nonnegative");
  if (!(alpha > 0.0) || !(alpha <= 100.0))
    throw invalid_parameter_error("cf: alpha must lie in (0, 100]");
  if (rate == 0.0) return 1.0;
  return std::exp(rate * (detail::pareto_cf(u, alpha) - 1.0));
}

double total_contact_time_below(double t0, double rate, double alpha, double tolerance) {
  if (!(t0 >= 0.0) || !std::isfinite(t0))
    throw invalid_parameter_error("t0 must be nonnegative and finite");
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw invalid_parameter_error("rate must be nonnegative");
  if (!(alpha > 1.0) || !(alpha <= 100.0))
    throw invalid_parameter_error(
        "inversion requires alpha in (1, 100]; use Monte Carlo for heavier tails");
  if (!(tolerance >= 1e-8) || !(tolerance <= 0.5))
    throw invalid_parameter_error("tolerance must lie in [1e-8, 0.5]");
  if (t0 == 0.0) return 0.0;
  if (rate == 0.0) return 1.0;
  FrequencyGrid grid(t0, alpha);
  return invert_below(grid, rate, tolerance);
}

DurationResult duration_aware_miss_rate(const DurationParams& dp,
                                        const PopularityDistribution& dist,
                                        DurationMethod method,
                                        const DurationPrecision& precision) {
  dp.validate();
  if (dist.size() != dp.base.n_files)
    throw invalid_parameter_error("distribution size does not match n_files");

  const std::size_t n = dist.size();
  DurationResult result;
  result.per_file_miss.assign(n, 0.0);
  if (dp.t0 == 0.0) return result;  // any nonnegative total suffices

  const double lambda_t = dp.base.lambda_t();
  const std::vector<double>& probs = dist.probs();

  if (method == DurationMethod::monte_carlo) {
    if (precision.mc_samples < 1)
      throw invalid_parameter_error("mc_samples must be at least 1");
    const double m = static_cast<double>(precision.mc_samples);
    double miss = 0.0, miss_c = 0.0, variance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = lambda_t * dp.alloc.q[i];
      double p_miss;
      if (rate == 0.0) {
        p_miss = 1.0;  // no holders: total contact time is 0 < t0
      } else {
        RandomStream rng(precision.mc_seed, "duration/" + std::to_string(i + 1));
        std::uint64_t below = 0;
        for (std::uint64_t s = 0; s < precision.mc_samples; ++s) {
          if (sample_total_contact_time(rate, dp.pareto_alpha, rng) < dp.t0) ++below;
        }
        p_miss = static_cast<double>(below) / m;
        variance += probs[i] * probs[i] * p_miss * (1.0 - p_miss) / m;
      }
      result.per_file_miss[i] = p_miss;
      const double y = probs[i] * p_miss - miss_c;
      const double t = miss + y;
      miss_c = (t - miss) - y;
      miss = t;
    }
    result.miss_rate = miss;
    result.std_error = std::sqrt(variance);
    return result;
  }

  if (!(precision.cf_tolerance >= 1e-8) || !(precision.cf_tolerance <= 0.5))
    throw invalid_parameter_error("cf_tolerance must lie in [1e-8, 0.5]");
  if (!(dp.pareto_alpha > 1.0) || !(dp.pareto_alpha <= 100.0))
    throw invalid_parameter_error(
        "inversion requires pareto_alpha in (1, 100]; use Monte Carlo for heavier tails");
  FrequencyGrid grid(dp.t0, dp.pareto_alpha);
  std::map<double, double> memo;  // saturated blocks share rates
  double miss = 0.0, miss_c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = lambda_t * dp.alloc.q[i];
    double p_miss;
    if (rate == 0.0) {
      p_miss = 1.0;
    } else if (auto it = memo.find(rate); it != memo.end()) {
      p_miss = it->second;
    } else {
      p_miss = invert_below(grid, rate, precision.cf_tolerance);
      memo.emplace(rate, p_miss);
    }
    result.per_file_miss[i] = p_miss;
    const double y = probs[i] * p_miss - miss_c;
    const double t = miss + y;
    miss_c = (t - miss) - y;
    miss = t;
  }
  result.miss_rate = miss;
  return result;
}

}  // namespace dtn
