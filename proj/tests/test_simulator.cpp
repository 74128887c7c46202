#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "optimizer.hpp"
#include "params.hpp"
#include "popularity.hpp"
#include "rng.hpp"
#include "simulator.hpp"

using dtn::AllocationVector;
using dtn::NetworkParams;
using dtn::PopularityDistribution;
using dtn::SimConfig;
using dtn::UserState;

namespace {

NetworkParams sim_params(std::size_t n, std::size_t k, std::size_t users,
                         double lambda_user, double patience, double lambda_ap = 0.0) {
  NetworkParams p;
  p.lambda_user = lambda_user;
  p.lambda_ap = lambda_ap;
  p.patience = patience;
  p.n_files = n;
  p.cache_capacity = k;
  p.n_users = users;
  return p;
}

void check_cache_shape(const std::vector<UserState>& users, std::size_t k,
                       std::size_t n) {
  for (const UserState& u : users) {
    REQUIRE(u.cache.size() == k);
    for (std::size_t i = 0; i < u.cache.size(); ++i) {
      CHECK(u.cache[i] < n);
      if (i > 0) CHECK(u.cache[i] > u.cache[i - 1]);  // sorted distinct
    }
  }
}

}  // namespace

TEST_CASE("selective fill with an indicator allocation copies the top set") {
  const auto dist = PopularityDistribution::zipf(20, 1.0);
  const auto alloc = dtn::k_most_popular_allocation(dist, 4);
  const auto params = sim_params(20, 4, 50, 1.0, 1.0);
  dtn::RandomStream rng(5);
  const auto users = dtn::fill_caches_selective(alloc, params, rng);
  REQUIRE(users.size() == 50);
  check_cache_shape(users, 4, 20);
  for (const UserState& u : users)
    CHECK(u.cache == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("selective fill of the uniform allocation matches its marginals") {
  const std::size_t n = 200;
  const std::size_t k = 10;
  const std::size_t n_users = 10000;
  const auto params = sim_params(n, k, n_users, 1.0, 1.0);
  const auto alloc = dtn::random_allocation(params);
  dtn::RandomStream rng(19);
  const auto users = dtn::fill_caches_selective(alloc, params, rng);
  check_cache_shape(users, k, n);
  const auto freq = dtn::empirical_allocation(users, n);
  const double q = static_cast<double>(k) / static_cast<double>(n);
  const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(n_users));
  for (double f : freq) CHECK(std::abs(f - q) <= 3.0 * sigma);
}

TEST_CASE("selective fill rejects allocations that cannot fill a cache") {
  AllocationVector sparse;
  sparse.q.assign(10, 0.0);
  sparse.q[0] = sparse.q[1] = sparse.q[2] = 1.0;  // three available files
  dtn::RandomStream rng(1);
  CHECK_THROWS_AS(
      dtn::fill_caches_selective(sparse, sim_params(10, 4, 5, 1.0, 1.0), rng),
      dtn::invalid_parameter_error);

  AllocationVector exact = sparse;
  exact.q[3] = 1.0;  // four files, capacity four: every cache is forced
  const auto users =
      dtn::fill_caches_selective(exact, sim_params(10, 4, 5, 1.0, 1.0), rng);
  for (const UserState& u : users)
    CHECK(u.cache == std::vector<std::uint32_t>{0, 1, 2, 3});

  AllocationVector spread;  // sums to 2 across three files: fill is feasible
  spread.q.assign(10, 0.0);
  spread.q[0] = spread.q[1] = spread.q[2] = 2.0 / 3.0;
  CHECK_NOTHROW(dtn::fill_caches_selective(spread, sim_params(10, 2, 5, 1.0, 1.0), rng));
}

TEST_CASE("exact fill reproduces fractional marginals") {
  const std::size_t n = 50;
  const std::size_t k = 5;
  const std::size_t n_users = 20000;
  const auto dist = PopularityDistribution::zipf(n, 1.0);
  const auto params = sim_params(n, k, n_users, 1.0, 3.0);
  const auto opt = dtn::optimal_allocation(dist, params);
  dtn::RandomStream rng(31);
  const auto users = dtn::fill_caches_exact(opt.alloc, params, rng);
  check_cache_shape(users, k, n);
  const auto freq = dtn::empirical_allocation(users, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = opt.alloc.q[i];
    const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(n_users));
    CHECK(std::abs(freq[i] - q) <= std::max(3.0 * sigma, 1e-12));
  }
}

TEST_CASE("empirical allocation basics") {
  std::vector<UserState> users(1);
  users[0].cache = {0};
  const auto freq = dtn::empirical_allocation(users, 2);
  CHECK(freq == std::vector<double>{1.0, 0.0});

  std::vector<UserState> crowd(8);
  for (auto& u : crowd) u.cache = {1, 3};
  const auto freq2 = dtn::empirical_allocation(crowd, 5);
  CHECK(freq2 == std::vector<double>{0.0, 1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("fills are deterministic under a fixed seed") {
  const auto dist = PopularityDistribution::zipf(100, 1.0);
  const auto params = sim_params(100, 8, 300, 1.0, 2.0);
  const auto opt = dtn::optimal_allocation(dist, params);
  dtn::RandomStream a(77), b(77);
  const auto users_a = dtn::fill_caches_selective(opt.alloc, params, a);
  const auto users_b = dtn::fill_caches_selective(opt.alloc, params, b);
  REQUIRE(users_a.size() == users_b.size());
  for (std::size_t i = 0; i < users_a.size(); ++i)
    CHECK(users_a[i].cache == users_b[i].cache);
}

TEST_CASE("simulation is bit-identical under a fixed seed") {
  const auto dist = PopularityDistribution::zipf(100, 1.0);
  const auto params = sim_params(100, 8, 500, 1.0, 2.0, 0.1);
  const auto opt = dtn::optimal_allocation(dist, params);
  SimConfig cfg{params, dist, opt.alloc, 0, 20000};
  dtn::RandomStream fill_rng(123);
  const auto users = dtn::fill_caches_exact(opt.alloc, params, fill_rng);
  dtn::RandomStream a(2024), b(2024);
  const auto sa = dtn::simulate_misses(cfg, users, a);
  const auto sb = dtn::simulate_misses(cfg, users, b);
  CHECK(sa.requests == sb.requests);
  CHECK(sa.misses == sb.misses);
  CHECK(sa.per_file_requests == sb.per_file_requests);
  CHECK(sa.per_file_misses == sb.per_file_misses);
  CHECK(sa.requests == 20000);
  CHECK(sa.misses <= sa.requests);
  std::uint64_t req_sum = 0, miss_sum = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    req_sum += sa.per_file_requests[i];
    miss_sum += sa.per_file_misses[i];
  }
  CHECK(req_sum == sa.requests);
  CHECK(miss_sum == sa.misses);
}

TEST_CASE("no contacts and a top-k cache miss exactly the tail mass") {
  const auto dist = PopularityDistribution::zipf(50, 1.0);
  const auto params = sim_params(50, 6, 400, 0.0, 1.0);
  const auto alloc = dtn::k_most_popular_allocation(dist, 6);
  dtn::RandomStream rng(9);
  const auto users = dtn::fill_caches_selective(alloc, params, rng);
  SimConfig cfg{params, dist, alloc, 0, 100000};
  dtn::RandomStream sim_rng(10);
  const auto stats = dtn::simulate_misses(cfg, users, sim_rng);
  double top_mass = 0.0;
  for (std::size_t i = 0; i < 6; ++i) top_mass += dist.probs()[i];
  const double m = 1.0 - top_mass;
  const double sigma = std::sqrt(m * (1.0 - m) / 100000.0);
  CHECK(std::abs(stats.miss_rate() - m) <= 3.0 * sigma);
}

TEST_CASE("full caches never miss") {
  const auto dist = PopularityDistribution::zipf(15, 1.0);
  const auto params = sim_params(15, 15, 30, 1.0, 1.0);
  const auto alloc = dtn::k_most_popular_allocation(dist, 15);
  dtn::RandomStream rng(2);
  const auto users = dtn::fill_caches_selective(alloc, params, rng);
  SimConfig cfg{params, dist, alloc, 0, 5000};
  dtn::RandomStream sim_rng(3);
  const auto stats = dtn::simulate_misses(cfg, users, sim_rng);
  CHECK(stats.misses == 0);
}

TEST_CASE("desk-scale optimal allocation agrees with the selective formula") {
  const auto dist = PopularityDistribution::zipf(1000, 1.0);
  const auto params = sim_params(1000, 10, 10000, 1.0, 5.0);
  const auto opt = dtn::optimal_allocation(dist, params);
  dtn::RandomStream fill_rng(41);
  const auto users = dtn::fill_caches_exact(opt.alloc, params, fill_rng);
  SimConfig cfg{params, dist, opt.alloc, 0, 100000};
  dtn::RandomStream sim_rng(42);
  const auto stats = dtn::simulate_misses(cfg, users, sim_rng);
  const double m = dtn::analytic_miss_rate_selective(dist, opt.alloc, params);
  const double sigma = std::sqrt(m * (1.0 - m) / 100000.0);
  CHECK(std::abs(stats.miss_rate() - m) <= 3.0 * sigma);

  // per-file agreement with the single-file closed form on well-sampled files
  for (std::size_t i = 0; i < 1000; ++i) {
    if (stats.per_file_requests[i] < 1000) continue;
    const double q = opt.alloc.q[i];
    const double mf = (1.0 - q) * std::exp(-params.patience *
                                           (params.lambda_ap + params.lambda_user * q));
    const double emp = static_cast<double>(stats.per_file_misses[i]) /
                       static_cast<double>(stats.per_file_requests[i]);
    const double sf =
        std::sqrt(mf * (1.0 - mf) / static_cast<double>(stats.per_file_requests[i]));
    CHECK(std::abs(emp - mf) <= std::max(3.0 * sf, 1e-12));
  }
}

TEST_CASE("random caches agree with the random-subset formula") {
  const auto dist = PopularityDistribution::zipf(1000, 1.0);
  const auto params = sim_params(1000, 10, 10000, 1.0, 5.0);
  const auto alloc = dtn::random_allocation(params);
  dtn::RandomStream fill_rng(51);
  const auto users = dtn::fill_caches_selective(alloc, params, fill_rng);
  SimConfig cfg{params, dist, alloc, 0, 100000};
  dtn::RandomStream sim_rng(52);
  const auto stats = dtn::simulate_misses(cfg, users, sim_rng);
  const double m = dtn::analytic_miss_rate_random(params);
  const double sigma = std::sqrt(m * (1.0 - m) / 100000.0);
  CHECK(std::abs(stats.miss_rate() - m) <= 3.0 * sigma);
}

TEST_CASE("analytic miss is nonincreasing in the contact budget") {
  const auto dist = PopularityDistribution::zipf(300, 1.0);
  const auto base = sim_params(300, 12, 100, 1.0, 5.0);
  const auto opt = dtn::optimal_allocation(dist, base);
  double prev_selective = 2.0;
  double prev_random = 2.0;
  for (int g = 0; g <= 10; ++g) {
    NetworkParams p = base;
    p.patience = static_cast<double>(g);
    const double selective = dtn::analytic_miss_rate_selective(dist, opt.alloc, p);
    const double random_rate = dtn::analytic_miss_rate_random(p);
    CHECK(selective <= prev_selective + 1e-12);
    CHECK(random_rate <= prev_random + 1e-12);
    prev_selective = selective;
    prev_random = random_rate;
  }
}

TEST_CASE("miss stats merge component-wise") {
  dtn::MissStats a;
  a.requests = 10;
  a.misses = 4;
  a.per_file_requests = {6, 4};
  a.per_file_misses = {1, 3};
  dtn::MissStats b;
  b.requests = 7;
  b.misses = 2;
  b.per_file_requests = {3, 4};
  b.per_file_misses = {2, 0};
  a.merge(b);
  CHECK(a.requests == 17);
  CHECK(a.misses == 6);
  CHECK(a.per_file_requests == std::vector<std::uint64_t>{9, 8});
  CHECK(a.per_file_misses == std::vector<std::uint64_t>{3, 3});
}

TEST_CASE("sweep produces scheme-major rows with derived seeds") {
  const auto dist = PopularityDistribution::zipf(100, 1.0);
  const auto params = sim_params(100, 5, 500, 1.0, 1.0);
  SimConfig cfg{params, dist, AllocationVector{}, 900, 2000};
  const std::vector<std::string> schemes{"random", "k_most_popular", "optimal",
                                         "pushing_algorithm"};
  const std::vector<double> grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto rows = dtn::sweep_lambda_t(schemes, grid, cfg);
  REQUIRE(rows.size() == 44);
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto& row = rows[s * grid.size() + g];
      CHECK(row.scheme == schemes[s]);
      CHECK(row.lambda_t == grid[g]);
      CHECK(row.requests == 2000);
      CHECK(row.seed ==
            dtn::derive_seed(900, schemes[s] + "/" + std::to_string(g)));
      CHECK(row.analytic_miss >= 0.0);
      CHECK(row.analytic_miss <= 1.0);
      CHECK(row.empirical_miss >= 0.0);
      CHECK(row.empirical_miss <= 1.0);
    }
  }
}

TEST_CASE("at zero contact budget the optimal scheme is k most popular") {
  const auto dist = PopularityDistribution::zipf(100, 1.0);
  const auto params = sim_params(100, 5, 200, 1.0, 1.0);
  SimConfig cfg{params, dist, AllocationVector{}, 4, 500};
  const auto rows = dtn::sweep_lambda_t({"k_most_popular", "optimal"}, {0.0}, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].analytic_miss - rows[1].analytic_miss) <= 1e-9);
}

TEST_CASE("optimal analytic curve dominates the alternatives") {
  const auto dist = PopularityDistribution::zipf(100, 1.0);
  const auto params = sim_params(100, 5, 300, 1.0, 1.0);
  SimConfig cfg{params, dist, AllocationVector{}, 8, 300};
  const std::vector<double> grid{0, 2, 4, 7, 10};
  const auto rows =
      dtn::sweep_lambda_t({"random", "k_most_popular", "optimal"}, grid, cfg);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double random_rate = rows[g].analytic_miss;
    const double topk = rows[grid.size() + g].analytic_miss;
    const double optimal = rows[2 * grid.size() + g].analytic_miss;
    CHECK(optimal <= random_rate + 1e-9);
    CHECK(optimal <= topk + 1e-9);
  }
}

TEST_CASE("sweep rejects unknown schemes and bad grids") {
  const auto dist = PopularityDistribution::zipf(10, 1.0);
  const auto params = sim_params(10, 2, 50, 1.0, 1.0);
  SimConfig cfg{params, dist, AllocationVector{}, 0, 100};
  CHECK_THROWS_AS(dtn::sweep_lambda_t({"lru"}, {1.0}, cfg),
                  dtn::invalid_parameter_error);
  CHECK_THROWS_AS(dtn::sweep_lambda_t({"optimal"}, {}, cfg),
                  dtn::invalid_parameter_error);
  CHECK_THROWS_AS(dtn::sweep_lambda_t({"optimal"}, {-1.0}, cfg),
                  dtn::invalid_parameter_error);
  CHECK_THROWS_AS(dtn::sweep_lambda_t({}, {1.0}, cfg), dtn::invalid_parameter_error);
}

TEST_CASE("sweep is deterministic for a fixed master seed") {
  const auto dist = PopularityDistribution::zipf(60, 1.0);
  const auto params = sim_params(60, 4, 150, 1.0, 1.0);
  SimConfig cfg{params, dist, AllocationVector{}, 31, 800};
  const auto a = dtn::sweep_lambda_t({"optimal", "pushing_algorithm"}, {1, 5}, cfg);
  const auto b = dtn::sweep_lambda_t({"optimal", "pushing_algorithm"}, {1, 5}, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].scheme == b[i].scheme);
    CHECK(a[i].lambda_t == b[i].lambda_t);
    CHECK(a[i].analytic_miss == b[i].analytic_miss);
    CHECK(a[i].empirical_miss == b[i].empirical_miss);
    CHECK(a[i].seed == b[i].seed);
  }
}
