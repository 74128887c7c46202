#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optimizer.hpp"
#include "params.hpp"
#include "popularity.hpp"
#include "rng.hpp"

namespace dtn {

// One user's cache: sorted distinct file ranks, at most K of them.
struct UserState {
  std::vector<std::uint32_t> cache;

  bool has(std::uint32_t rank) const;
};

struct MissStats {
  std::uint64_t requests = 0;
  std::uint64_t misses = 0;
  std::vector<std::uint64_t> per_file_requests;
  std::vector<std::uint64_t> per_file_misses;

  double miss_rate() const {
    return requests ? static_cast<double>(misses) / static_cast<double>(requests) : 0.0;
  }

  // Component-wise addition, for pooling independent replications.
  void merge(const MissStats& other);
};

struct SimConfig {
  NetworkParams params;
  PopularityDistribution dist;
  AllocationVector target_alloc;
  std::uint64_t seed = 0;
  std::uint64_t n_requests = 0;
};

// Access-point pushing: each push offers file n with probability q_n / K,
// the user rejects files already cached, pushes repeat until the cache
// holds K distinct files. Users fill independently, so realized per-file
// frequencies drift from q (heavier tail, popular files slightly under-
// represented) exactly as the pushing scheme does.
std::vector<UserState> fill_caches_selective(const AllocationVector& alloc,
                                             const NetworkParams& params,
                                             RandomStream& rng);

// Cache realization with exact marginals: systematic sampling along the
// cumulative allocation puts file n in a given cache with probability
// exactly q_n while drawing one uniform per user. Models the idealized
// scheme where the population allocation equals q.
std::vector<UserState> fill_caches_exact(const AllocationVector& alloc,
                                         const NetworkParams& params,
                                         RandomStream& rng);

// Fraction of users caching each file; estimates the allocation actually
// realized by a fill.
std::vector<double> empirical_allocation(const std::vector<UserState>& users,
                                         std::size_t n_files);

// Per-request Monte Carlo over static caches. Each request: uniform
// requester, rank drawn from cfg.dist; hit if her own cache holds the
// rank; otherwise E_ap ~ Poisson(lambda_ap T) and E_peer ~ Poisson(lambda T)
// are drawn, the request hits if E_ap >= 1, and otherwise hits if any of
// E_peer users sampled uniformly without replacement from the others
// (capped at n_users - 1) caches the rank.
MissStats simulate_misses(const SimConfig& cfg, const std::vector<UserState>& users,
                          RandomStream& rng);

struct SweepRow {
  std::string scheme;
  double lambda_t = 0.0;
  double analytic_miss = 0.0;
  double empirical_miss = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t seed = 0;
};

// Schemes: "random" (uniform random K-subsets), "k_most_popular" (top-K
// everywhere), "optimal" (exact realization of the optimized allocation),
// "pushing_algorithm" (selective pushing toward the optimized allocation).
//
// Grid values are dimensionless lambda*T, realized by adjusting patience
// at fixed rates. Each (scheme, grid point) cell runs on its own stream
// derived from cfg.seed and the label "<scheme>/<grid index>", so cells
// are reproducible in isolation and may run in any order.
//
// The analytic column is the random-subset formula for "random" and the
// selective formula otherwise; the pushing row evaluates it at the
// allocation its caches actually realized, which is what the simulation
// estimates (the realized allocation, not the target, is what a deployed
// pushing scheme serves).
std::vector<SweepRow> sweep_lambda_t(const std::vector<std::string>& schemes,
                                     const std::vector<double>& grid,
                                     const SimConfig& cfg);

}  // namespace dtn
