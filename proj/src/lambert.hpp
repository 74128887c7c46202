#pragma once

namespace dtn {

// Principal branch of the Lambert W function (the inverse of y*e^y) on
// [0, +inf). Monotone nondecreasing; relative accuracy ~1e-12 or better
// across the domain. Negative arguments throw invalid_parameter_error: the
// negative branch is unsupported.
double lambert_w0(double x);

namespace detail {

// Solves w + log(w) = log_x, i.e. W(x) given log(x), for log_x large enough
// that w > 1. Lets callers evaluate W(e^a) when e^a itself would overflow.
double lambert_w0_from_log(double log_x);

}  // namespace detail

}  // namespace dtn
