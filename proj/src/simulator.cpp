#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "errors.hpp"

namespace dtn {

namespace {

void validate_fill_inputs(const AllocationVector& alloc, const NetworkParams& params) {
  params.validate();
  if (params.n_users < 1)
    throw invalid_parameter_error("cache filling requires at least one user");
  if (alloc.size() != params.n_files)
    throw invalid_parameter_error("allocation size does not match n_files");
  for (double q : alloc.q) {
    if (!(q >= 0.0) || !(q <= 1.0))
      throw invalid_parameter_error("allocation entries must lie in [0, 1]");
  }
  if (std::abs(alloc.sum() - static_cast<double>(params.cache_capacity)) > 1e-6)
    throw invalid_parameter_error("allocation does not sum to the cache capacity");
}

// Sampler over the files with positive allocation, proportional to q.
struct CategoricalTable {
  std::vector<std::uint32_t> ranks;
  std::vector<double> cumulative;

  explicit CategoricalTable(const std::vector<double>& q) {
    ranks.reserve(q.size());
    cumulative.reserve(q.size());
    double c = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > 0.0) {
        ranks.push_back(static_cast<std::uint32_t>(i));
        c += q[i];
        cumulative.push_back(c);
      }
    }
  }

  std::uint32_t sample(RandomStream& rng) const {
    const double x = rng.next_double() * cumulative.back();
    std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
    if (idx >= ranks.size()) idx = ranks.size() - 1;
    return ranks[idx];
  }
};

}  // namespace

bool UserState::has(std::uint32_t rank) const {
  return std::binary_search(cache.begin(), cache.end(), rank);
}

void MissStats::merge(const MissStats& other) {
  if (per_file_requests.size() != other.per_file_requests.size() ||
      per_file_misses.size() != other.per_file_misses.size())
    throw invalid_parameter_error("cannot merge stats over different file counts");
  requests += other.requests;
  misses += other.misses;
  for (std::size_t i = 0; i < per_file_requests.size(); ++i) {
    per_file_requests[i] += other.per_file_requests[i];
    per_file_misses[i] += other.per_file_misses[i];
  }
}

std::vector<UserState> fill_caches_selective(const AllocationVector& alloc,
                                             const NetworkParams& params,
                                             RandomStream& rng) {
  validate_fill_inputs(alloc, params);
  const std::size_t k = params.cache_capacity;
  const CategoricalTable table(alloc.q);
  if (table.ranks.size() < k)
    throw invalid_parameter_error(
        "fewer than cache_capacity files have positive allocation; caches cannot fill");

  std::vector<UserState> users(params.n_users);
  for (UserState& user : users) {
    user.cache.reserve(k);
    while (user.cache.size() < k) {
      const std::uint32_t rank = table.sample(rng);
      if (std::find(user.cache.begin(), user.cache.end(), rank) == user.cache.end())
        user.cache.push_back(rank);
    }
    std::sort(user.cache.begin(), user.cache.end());
  }
  return users;
}

std::vector<UserState> fill_caches_exact(const AllocationVector& alloc,
                                         const NetworkParams& params, RandomStream& rng) {
  validate_fill_inputs(alloc, params);
  const std::size_t k = params.cache_capacity;
  const std::size_t n = alloc.size();

  std::vector<UserState> users(params.n_users);
  for (UserState& user : users) {
    user.cache.reserve(k);
    // Points at U, U+1, ..., U+K-1 along the cumulative allocation select
    // one file each; q_n <= 1 means no file spans two points, so the
    // inclusion probability of file n is exactly q_n.
    double threshold = rng.next_double();
    double c = 0.0;
    for (std::size_t i = 0; i < n && user.cache.size() < k; ++i) {
      c += alloc.q[i];
      if (c > threshold) {
        user.cache.push_back(static_cast<std::uint32_t>(i));
        threshold += 1.0;
      }
    }
    // Rounding in the running sum can leave the last point just past the
    // cumulative total; pad with the largest-allocation file left out.
    while (user.cache.size() < k) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::binary_search(user.cache.begin(), user.cache.end(),
                               static_cast<std::uint32_t>(i)))
          continue;
        if (alloc.q[i] > 0.0 && (best == n || alloc.q[i] > alloc.q[best])) best = i;
      }
      if (best == n)
        throw invalid_parameter_error(
            "fewer than cache_capacity files have positive allocation; caches cannot fill");
      user.cache.insert(std::lower_bound(user.cache.begin(), user.cache.end(),
                                         static_cast<std::uint32_t>(best)),
                        static_cast<std::uint32_t>(best));
    }
  }
  return users;
}

std::vector<double> empirical_allocation(const std::vector<UserState>& users,
                                         std::size_t n_files) {
  if (users.empty()) throw invalid_parameter_error("empirical_allocation: no users");
  std::vector<std::uint64_t> counts(n_files, 0);
  for (const UserState& user : users) {
    for (std::uint32_t rank : user.cache) {
      if (rank >= n_files)
        throw invalid_parameter_error("cached rank exceeds n_files");
      ++counts[rank];
    }
  }
  std::vector<double> freq(n_files);
  for (std::size_t i = 0; i < n_files; ++i)
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(users.size());
  return freq;
}

MissStats simulate_misses(const SimConfig& cfg, const std::vector<UserState>& users,
                          RandomStream& rng) {
  cfg.params.validate(true);
  if (cfg.n_requests < 1)
    throw invalid_parameter_error("n_requests must be at least 1");
  if (users.size() != cfg.params.n_users)
    throw invalid_parameter_error("user vector size does not match n_users");
  if (cfg.dist.size() != cfg.params.n_files)
    throw invalid_parameter_error("distribution size does not match n_files");

  const double ap_mean = cfg.params.lambda_ap * cfg.params.patience;
  const double peer_mean = cfg.params.lambda_t();
  const std::uint64_t n_users = cfg.params.n_users;
  const std::uint64_t max_peers = n_users - 1;

  MissStats stats;
  stats.per_file_requests.assign(cfg.params.n_files, 0);
  stats.per_file_misses.assign(cfg.params.n_files, 0);

  // Partial Fisher-Yates over a virtual identity array: only displaced
  // positions are materialized, so sampling E distinct peers costs O(E)
  // regardless of population size.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> displaced;

  for (std::uint64_t r = 0; r < cfg.n_requests; ++r) {
    const std::uint64_t requester = rng.next_below(n_users);
    const std::uint32_t rank = static_cast<std::uint32_t>(cfg.dist.sample_rank(rng));
    ++stats.requests;
    ++stats.per_file_requests[rank];

    if (users[requester].has(rank)) continue;

    const std::uint64_t e_ap = rng.poisson(ap_mean);
    const std::uint64_t e_peer = rng.poisson(peer_mean);
    if (e_ap >= 1) continue;

    const std::uint64_t n_draws = std::min(e_peer, max_peers);
    bool hit = false;
    displaced.clear();
    auto lookup = [&](std::uint64_t pos) {
      for (const auto& [p, v] : displaced)
        if (p == pos) return v;
      return pos;
    };
    auto store = [&](std::uint64_t pos, std::uint64_t val) {
      for (auto& [p, v] : displaced) {
        if (p == pos) {
          v = val;
          return;
        }
      }
      displaced.emplace_back(pos, val);
    };
    for (std::uint64_t j = 0; j < n_draws && !hit; ++j) {
      const std::uint64_t r2 = j + rng.next_below(max_peers - j);
      const std::uint64_t picked = lookup(r2);
      store(r2, lookup(j));
      const std::uint64_t peer = picked >= requester ? picked + 1 : picked;
      if (users[peer].has(rank)) hit = true;
    }
    if (!hit) {
      ++stats.misses;
      ++stats.per_file_misses[rank];
    }
  }
  return stats;
}

namespace {

enum class Scheme { random, k_most_popular, optimal, pushing_algorithm };

Scheme parse_scheme(const std::string& name) {
  if (name == "random") return Scheme::random;
  if (name == "k_most_popular") return Scheme::k_most_popular;
  if (name == "optimal") return Scheme::optimal;
  if (name == "pushing_algorithm") return Scheme::pushing_algorithm;
  throw invalid_parameter_error("unknown scheme: " + name);
}

}  // namespace

std::vector<SweepRow> sweep_lambda_t(const std::vector<std::string>& schemes,
                                     const std::vector<double>& grid,
                                     const SimConfig& cfg) {
  if (schemes.empty()) throw invalid_parameter_error("sweep: no schemes given");
  if (grid.empty()) throw invalid_parameter_error("sweep: empty grid");
  for (double g : grid) {
    if (!(g >= 0.0) || !std::isfinite(g))
      throw invalid_parameter_error("sweep: grid values must be finite and nonnegative");
  }
  cfg.params.validate(true);
  if (cfg.n_requests < 1) throw invalid_parameter_error("n_requests must be at least 1");
  std::vector<Scheme> parsed;
  parsed.reserve(schemes.size());
  for (const std::string& name : schemes) parsed.push_back(parse_scheme(name));

  std::vector<SweepRow> rows;
  rows.reserve(schemes.size() * grid.size());
  for (std::size_t s = 0; s < parsed.size(); ++s) {
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      NetworkParams params = cfg.params;
      if (grid[gi] == 0.0) {
        params.patience = 0.0;
      } else if (params.lambda_user > 0.0) {
        params.patience = grid[gi] / params.lambda_user;
      } else {
        throw invalid_parameter_error(
            "sweep: nonzero grid value requires positive lambda_user");
      }

      const std::uint64_t cell_seed =
          derive_seed(cfg.seed, schemes[s] + "/" + std::to_string(gi));
      RandomStream rng(cell_seed);

      AllocationVector target;
      std::vector<UserState> users;
      double analytic = 0.0;
      switch (parsed[s]) {
        case Scheme::random:
          target = random_allocation(params);
          users = fill_caches_selective(target, params, rng);
          analytic = analytic_miss_rate_random(params);
          break;
        case Scheme::k_most_popular:
          target = k_most_popular_allocation(cfg.dist, params.cache_capacity);
          users = fill_caches_exact(target, params, rng);
          analytic = analytic_miss_rate_selective(cfg.dist, target, params);
          break;
        case Scheme::optimal:
          target = optimal_allocation(cfg.dist, params).alloc;
          users = fill_caches_exact(target, params, rng);
          analytic = analytic_miss_rate_selective(cfg.dist, target, params);
          break;
        case Scheme::pushing_algorithm: {
          target = optimal_allocation(cfg.dist, params).alloc;
          users = fill_caches_selective(target, params, rng);
          AllocationVector realized{empirical_allocation(users, params.n_files)};
          analytic = analytic_miss_rate_selective(cfg.dist, realized, params);
          break;
        }
      }

      SimConfig cell{params, cfg.dist, target, cell_seed, cfg.n_requests};
      const MissStats stats = simulate_misses(cell, users, rng);

      SweepRow row;
      row.scheme = schemes[s];
      row.lambda_t = grid[gi];
      row.analytic_miss = analytic;
      row.empirical_miss = stats.miss_rate();
      row.requests = stats.requests;
      row.seed = cell_seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace dtn
