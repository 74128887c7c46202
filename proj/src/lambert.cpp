#include "lambert.hpp"

#include <cmath>

#include "errors.hpp"

namespace dtn {

namespace detail {

double lambert_w0_from_log(double log_x) {
  const double llx = std::log(log_x);
  double w = log_x - llx + llx / log_x;
  for (int i = 0; i < 64; ++i) {
    const double f = w + std::log(w) - log_x;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::fabs(step) <= 1e-13 * std::fabs(w)) break;
  }
  return w;
}

}  // namespace detail

double lambert_w0(double x) {
  if (!(x >= 0.0)) {
    throw invalid_parameter_error("lambert_w0: argument must be >= 0 (negative branch unsupported)");
  }
  if (x == 0.0) return 0.0;

  // Taylor series about 0: W(x) = x - x^2 + 3/2 x^3 - ...; truncation error
  // is below 1e-15 relative for x < 1e-8.
  if (x < 1e-8) return x * (1.0 - x * (1.0 - 1.5 * x));

  // Huge arguments: iterate on w + log(w) = log(x) so e^w never overflows.
  if (x > 1e100) return detail::lambert_w0_from_log(std::log(x));

  // Halley iteration from w0 = log(1 + x); globally convergent on [0, inf).
  double w = std::log1p(x);
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::fabs(step) <= 1e-12 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

}  // namespace dtn
