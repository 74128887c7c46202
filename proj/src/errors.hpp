#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dtn {

// Bad caller input: out-of-range parameter, mismatched sizes, malformed
// distribution, infeasible cache configuration.
class invalid_parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative routine failed to converge. For the allocation solver the
// final eta bracket is attached so callers can report it.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
  numerical_error(const std::string& msg, double bracket_lo, double bracket_hi)
      : std::runtime_error(msg), bracket_lo_(bracket_lo), bracket_hi_(bracket_hi) {}

  bool has_bracket() const { return !std::isnan(bracket_lo_); }
  double bracket_lo() const { return bracket_lo_; }
  double bracket_hi() const { return bracket_hi_; }

 private:
  double bracket_lo_ = std::nan("");
  double bracket_hi_ = std::nan("");
};

}  // namespace dtn
