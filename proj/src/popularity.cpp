#include "popularity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace dtn {

namespace {

// Compensated sum; the normalizer must stay accurate for N up to 1e4+.
double kahan_sum(std::span<const double> values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

PopularityDistribution::PopularityDistribution(std::vector<double> probs,
                                               std::vector<std::size_t> perm,
                                               std::optional<double> alpha)
    : probs_(std::move(probs)), perm_(std::move(perm)), alpha_(alpha) {
  cumulative_.resize(probs_.size());
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double y = probs_[i] - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
    cumulative_[i] = sum;
  }
  cumulative_.back() = 1.0;
}

PopularityDistribution PopularityDistribution::zipf(std::size_t n_files, double alpha) {
  if (n_files == 0) throw invalid_parameter_error("zipf: n_files must be >= 1");
  if (!(alpha >= 0.0)) throw invalid_parameter_error("zipf: alpha must be >= 0");

  std::vector<double> weights(n_files);
  for (std::size_t r = 0; r < n_files; ++r) {
    weights[r] = std::pow(static_cast<double>(r + 1), -alpha);
  }
  const double norm = kahan_sum(weights);
  for (double& w : weights) w /= norm;

  std::vector<std::size_t> perm(n_files);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return PopularityDistribution(std::move(weights), std::move(perm), alpha);
}

PopularityDistribution PopularityDistribution::from_raw(std::span<const double> raw) {
  if (raw.empty()) throw invalid_parameter_error("from_raw: empty probability vector");
  for (double v : raw) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw invalid_parameter_error("from_raw: entries must be finite and > 0");
    }
  }

  std::vector<std::size_t> perm(raw.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });

  std::vector<double> sorted(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) sorted[i] = raw[perm[i]];
  const double norm = kahan_sum(sorted);
  for (double& v : sorted) v /= norm;

  return PopularityDistribution(std::move(sorted), std::move(perm), std::nullopt);
}

std::size_t PopularityDistribution::sample_rank(RandomStream& rng) const {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return probs_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace dtn
