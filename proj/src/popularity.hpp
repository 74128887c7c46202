#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rng.hpp"

namespace dtn {

// Ranked request distribution over N files: probs() is strictly positive,
// nonincreasing, and sums to 1. Immutable after construction and safe to
// share across threads; sampling state lives in the caller's RandomStream.
//
// Ranks are 0-based internally. Rank r corresponds to popularity position
// r+1 in formulas and in all external output, which reports 1-based ranks.
class PopularityDistribution {
 public:
  // Zipf-like pmf: probs[r] proportional to (r+1)^(-alpha), normalized.
  // alpha = 0 gives the uniform distribution. Values above 1 are accepted.
  static PopularityDistribution zipf(std::size_t n_files, double alpha);

  // Arbitrary positive weights: sorted nonincreasing (stable, ties keep
  // original order) and normalized. permutation()[rank] is the index the
  // entry had in the caller's vector, so results can be mapped back.
  static PopularityDistribution from_raw(std::span<const double> raw);

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<std::size_t>& permutation() const { return perm_; }

  // Skew exponent when Zipf-constructed, empty for from_raw.
  std::optional<double> alpha() const { return alpha_; }

  // Draws a rank with probability probs()[rank]: inverse CDF over the
  // cumulative table precomputed at construction.
  std::size_t sample_rank(RandomStream& rng) const;

 private:
  PopularityDistribution(std::vector<double> probs, std::vector<std::size_t> perm,
                         std::optional<double> alpha);

  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<std::size_t> perm_;
  std::optional<double> alpha_;
};

}  // namespace dtn
