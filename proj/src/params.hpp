#pragma once

#include <cstddef>

#include "errors.hpp"

namespace dtn {

// Global model constants: a population of statistically identical users,
// each caching cache_capacity of the n_files equal-sized files. A user
// meets other users as a Poisson process with rate lambda_user and access
// points with rate lambda_ap, and waits up to `patience` time units for an
// opportunistic delivery before a request counts as a miss.
struct NetworkParams {
  double lambda_user = 0.0;
  double lambda_ap = 0.0;
  double patience = 0.0;
  std::size_t n_files = 0;
  std::size_t cache_capacity = 0;
  std::size_t n_users = 0;  // simulation only

  // Mean number of peer encounters within the patience window.
  double lambda_t() const { return lambda_user * patience; }

  void validate(bool for_simulation = false) const {
    if (!(lambda_user >= 0.0)) throw invalid_parameter_error("lambda_user must be >= 0");
    if (!(lambda_ap >= 0.0)) throw invalid_parameter_error("lambda_ap must be >= 0");
    if (!(patience >= 0.0)) throw invalid_parameter_error("patience must be >= 0");
    if (n_files == 0) throw invalid_parameter_error("n_files must be >= 1");
    if (cache_capacity < 1 || cache_capacity > n_files) {
      throw invalid_parameter_error("cache_capacity must be in [1, n_files]");
    }
    if (for_simulation && n_users < 2) {
      throw invalid_parameter_error("n_users must be >= 2 for simulation");
    }
  }
};

}  // namespace dtn
