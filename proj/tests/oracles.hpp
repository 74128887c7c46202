// Independent reference implementations used only by tests. Everything here
// is deliberately slow and simple so disagreement with the library points at
// the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// 0.999 quantile of the chi-square distribution with 99 degrees of freedom.
inline constexpr double kChiSquare99Dof999 = 148.23;

inline double objective_term(double p, double q, double lambda_t) {
  return p * (1.0 - q) * std::exp(-lambda_t * q);
}

inline double objective(const std::vector<double>& p, const std::vector<double>& q,
                        double lambda_t) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    total += objective_term(p[i], q[i], lambda_t);
  return total;
}

// Exact minimizer of the separable convex objective over the discretized
// polytope {q_n in {0, step, 2*step, ..., 1}, sum q = K}. Each coordinate's
// decrement sequence f(q) - f(q + step) is nonincreasing (convexity), so the
// greedy exchange argument for separable convex minimization over the capped
// integer simplex applies: allocating one step at a time to the coordinate
// with the largest decrease yields the exact grid optimum.
inline double grid_search_min(const std::vector<double>& p, std::size_t k,
                              double lambda_t, double step) {
  const std::size_t n = p.size();
  const auto units_per_file = static_cast<std::size_t>(std::llround(1.0 / step));
  const std::size_t total_units = k * units_per_file;
  std::vector<std::size_t> units(n, 0);
  for (std::size_t u = 0; u < total_units; ++u) {
    double best_gain = -1.0;
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (units[i] == units_per_file) continue;
      const double q = static_cast<double>(units[i]) * step;
      const double gain =
          objective_term(p[i], q, lambda_t) - objective_term(p[i], q + step, lambda_t);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == n) throw std::logic_error("grid oracle: no feasible coordinate");
    ++units[best];
  }
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    value += objective_term(p[i], static_cast<double>(units[i]) * step, lambda_t);
  return value;
}

// Brute-force check of the greedy oracle for n = 3: enumerate the full grid.
inline double enumerate_min_3(const std::vector<double>& p, std::size_t k,
                              double lambda_t, double step) {
  if (p.size() != 3) throw std::logic_error("enumeration oracle wants n = 3");
  const auto units_per_file = static_cast<long>(std::llround(1.0 / step));
  const long total = static_cast<long>(k) * units_per_file;
  double best = 1e300;
  for (long a = 0; a <= units_per_file; ++a) {
    for (long b = 0; b <= units_per_file; ++b) {
      const long c = total - a - b;
      if (c < 0 || c > units_per_file) continue;
      const double value = objective_term(p[0], a * step, lambda_t) +
                           objective_term(p[1], b * step, lambda_t) +
                           objective_term(p[2], c * step, lambda_t);
      best = std::min(best, value);
    }
  }
  return best;
}

// Solves eta = p e^(-lambda_t q) (1 + lambda_t - lambda_t q) for q in [0, 1]
// by bisection; the right side is strictly decreasing in q there. Returns
// the clamped endpoint when eta falls outside the attained range.
inline double stationarity_bisection(double eta, double p, double lambda_t) {
  const auto rhs = [&](double q) {
    return p * std::exp(-lambda_t * q) * (1.0 + lambda_t - lambda_t * q);
  };
  if (eta >= rhs(0.0)) return 0.0;
  if (eta <= rhs(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rhs(mid) > eta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Lambert W on [0, inf) by plain bisection on w e^w = x; independent of the
// library's Halley iteration.
inline double lambert_bisection(double x) {
  if (x < 0.0) throw std::logic_error("lambert oracle wants x >= 0");
  if (x == 0.0) return 0.0;
  double lo = 0.0;
  double hi = x < 1.0 ? 1.0 : std::log(x) + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + std::log(mid) < std::log(x) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double total_variation(const std::vector<double>& a,
                              const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace oracle
