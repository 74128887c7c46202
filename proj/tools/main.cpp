// Experiment front end: wires the library into reproducible CSV-producing
// runs. All knobs live in a JSON config; flags override file values which
// override the desk-scale defaults below.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dtncache/dtncache.h"

using nlohmann::json;

namespace {

int verbosity() {
  static const int level = [] {
    const char* v = std::getenv("DTNCACHE_LOG");
    if (!v || !*v) return 0;
    const std::string s(v);
    if (s == "0" || s == "off" || s == "quiet") return 0;
    if (s == "2" || s == "debug") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << "[dtncache] " << msg << "\n";
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(1);
}

// Library failures: invalid arguments are config mistakes (exit 1),
// anything numerical or internal exits 2.
void check(dtn_status status) {
  if (status == DTN_OK) return;
  std::cerr << "error: " << dtn_last_error() << "\n";
  std::exit(status == DTN_ERROR_INVALID_ARGUMENT ? 1 : 2);
}

// Locale-independent, 12 significant digits.
std::string fmt(double value) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

struct DistributionConfig {
  std::string type = "zipf";
  std::uint64_t n = 1000;
  double alpha = 1.0;
  std::vector<double> probs;
};

struct DurationConfig {
  bool present = false;
  double pareto_alpha = 0.0;
  double t0 = 0.0;
  std::string method = "cf_inversion";
  std::uint64_t mc_samples = 100000;
  double cf_tolerance = 1e-4;
};

struct Config {
  DistributionConfig distribution;
  double lambda_user = 1.0;
  double lambda_ap = 0.0;
  double patience = 5.0;
  std::uint64_t cache_capacity = 10;
  std::uint64_t n_users = 10000;
  std::vector<std::string> schemes{"random", "k_most_popular", "optimal",
                                   "pushing_algorithm"};
  std::vector<double> lambda_t_grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t seed = 42;
  std::uint64_t n_requests = 100000;
  std::string out;
  DurationConfig duration;
};

void load_config(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) usage_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    usage_error("config parse failure: " + std::string(e.what()));
  }
  try {
    if (j.contains("distribution")) {
      const json& d = j.at("distribution");
      cfg.distribution.type = d.value("type", cfg.distribution.type);
      cfg.distribution.n = d.value("n", cfg.distribution.n);
      cfg.distribution.alpha = d.value("alpha", cfg.distribution.alpha);
      if (d.contains("probs"))
        cfg.distribution.probs = d.at("probs").get<std::vector<double>>();
    }
    if (j.contains("network")) {
      const json& n = j.at("network");
      cfg.lambda_user = n.value("lambda_user", cfg.lambda_user);
      cfg.lambda_ap = n.value("lambda_ap", cfg.lambda_ap);
      cfg.patience = n.value("patience", cfg.patience);
      cfg.cache_capacity = n.value("cache_capacity", cfg.cache_capacity);
      cfg.n_users = n.value("n_users", cfg.n_users);
    }
    if (j.contains("schemes"))
      cfg.schemes = j.at("schemes").get<std::vector<std::string>>();
    if (j.contains("lambda_t_grid"))
      cfg.lambda_t_grid = j.at("lambda_t_grid").get<std::vector<double>>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.n_requests = j.value("n_requests", cfg.n_requests);
    cfg.out = j.value("out", cfg.out);
    if (j.contains("duration")) {
      const json& d = j.at("duration");
      cfg.duration.present = true;
      if (!d.contains("pareto_alpha") || !d.contains("t0"))
        usage_error("duration block requires pareto_alpha and t0");
      cfg.duration.pareto_alpha = d.at("pareto_alpha").get<double>();
      cfg.duration.t0 = d.at("t0").get<double>();
      cfg.duration.method = d.value("method", cfg.duration.method);
      cfg.duration.mc_samples = d.value("mc_samples", cfg.duration.mc_samples);
      cfg.duration.cf_tolerance = d.value("cf_tolerance", cfg.duration.cf_tolerance);
    }
  } catch (const json::exception& e) {
    usage_error("config value failure: " + std::string(e.what()));
  }
}

dtn_dist* make_dist(const Config& cfg) {
  dtn_dist* dist = nullptr;
  if (cfg.distribution.type == "zipf") {
    check(dtn_dist_zipf(cfg.distribution.n, cfg.distribution.alpha, &dist));
  } else if (cfg.distribution.type == "raw") {
    if (cfg.distribution.probs.empty())
      usage_error("raw distribution requires a probs array");
    check(dtn_dist_from_raw(cfg.distribution.probs.data(),
                            cfg.distribution.probs.size(), &dist));
  } else {
    usage_error("unknown distribution type: " + cfg.distribution.type);
  }
  return dist;
}

dtn_network_params make_params(const Config& cfg, const dtn_dist* dist) {
  dtn_network_params p{};
  p.lambda_user = cfg.lambda_user;
  p.lambda_ap = cfg.lambda_ap;
  p.patience = cfg.patience;
  p.n_files = dtn_dist_size(dist);
  p.cache_capacity = cfg.cache_capacity;
  p.n_users = cfg.n_users;
  return p;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) usage_error("cannot open output file: " + path);
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) usage_error("write failure: " + path);
  log_info("wrote " + path);
}

void cmd_optimize(const Config& cfg) {
  dtn_dist* dist = make_dist(cfg);
  const dtn_network_params params = make_params(cfg, dist);

  dtn_alloc* alloc = nullptr;
  dtn_cert* cert = nullptr;
  check(dtn_optimal_allocation(dist, &params, 0.0, &alloc, &cert));

  const std::uint64_t n = dtn_dist_size(dist);
  std::vector<double> p(n), q(n);
  check(dtn_dist_probs(dist, p.data()));
  check(dtn_alloc_values(alloc, q.data()));

  std::ofstream out = open_out(cfg.out);
  out << "rank,p,q\n";
  for (std::uint64_t i = 0; i < n; ++i)
    out << (i + 1) << ',' << fmt(p[i]) << ',' << fmt(q[i]) << '\n';
  finish_out(out, cfg.out);

  double miss = 0.0;
  check(dtn_miss_rate_selective(dist, alloc, &params, &miss));

  std::cout << "eta = " << fmt(dtn_cert_eta(cert)) << "\n"
            << "n1 = " << dtn_cert_n1(cert) << "\n"
            << "n2 = " << dtn_cert_n2(cert) << "\n"
            << "analytic miss rate = " << fmt(miss) << "\n";

  dtn_cert_free(cert);
  dtn_alloc_free(alloc);
  dtn_dist_free(dist);
}

void cmd_sweep(const Config& cfg) {
  if (cfg.schemes.empty()) usage_error("schemes must not be empty");
  if (cfg.lambda_t_grid.empty()) usage_error("lambda_t_grid must not be empty");
  for (std::size_t i = 1; i < cfg.lambda_t_grid.size(); ++i)
    if (!(cfg.lambda_t_grid[i] > cfg.lambda_t_grid[i - 1]))
      usage_error("lambda_t_grid must be strictly increasing");

  dtn_dist* dist = make_dist(cfg);
  const dtn_network_params params = make_params(cfg, dist);

  std::vector<const char*> scheme_ptrs;
  scheme_ptrs.reserve(cfg.schemes.size());
  for (const std::string& s : cfg.schemes) scheme_ptrs.push_back(s.c_str());

  log_info("sweep: " + std::to_string(cfg.schemes.size()) + " schemes x " +
           std::to_string(cfg.lambda_t_grid.size()) + " grid points, " +
           std::to_string(cfg.n_requests) + " requests each");

  dtn_sweep_row* rows = nullptr;
  std::uint64_t n_rows = 0;
  check(dtn_sweep(dist, &params, scheme_ptrs.data(), scheme_ptrs.size(),
                  cfg.lambda_t_grid.data(), cfg.lambda_t_grid.size(), cfg.seed,
                  cfg.n_requests, &rows, &n_rows));

  std::ofstream out = open_out(cfg.out);
  out << "scheme,lambda_t,analytic_miss,empirical_miss,requests,seed\n";
  for (std::uint64_t i = 0; i < n_rows; ++i)
    out << rows[i].scheme << ',' << fmt(rows[i].lambda_t) << ','
        << fmt(rows[i].analytic_miss) << ',' << fmt(rows[i].empirical_miss) << ','
        << rows[i].requests << ',' << rows[i].seed << '\n';
  finish_out(out, cfg.out);

  dtn_sweep_rows_free(rows);
  dtn_dist_free(dist);
}

void cmd_fig1(const Config& cfg) {
  dtn_dist* dist = make_dist(cfg);
  const dtn_network_params params = make_params(cfg, dist);

  dtn_alloc* alloc = nullptr;
  check(dtn_optimal_allocation(dist, &params, 0.0, &alloc, nullptr));

  dtn_rng* rng = dtn_rng_create_labeled(cfg.seed, "fig1/fill");
  if (!rng) usage_error("rng creation failed");
  dtn_users* users = nullptr;
  check(dtn_fill_caches_selective(alloc, &params, rng, &users));

  const std::uint64_t n = dtn_dist_size(dist);
  std::vector<double> q(n), emp(n);
  check(dtn_alloc_values(alloc, q.data()));
  check(dtn_empirical_allocation(users, n, emp.data()));

  std::ofstream out = open_out(cfg.out);
  out << "rank,q_optimal,q_empirical\n";
  for (std::uint64_t i = 0; i < n; ++i)
    out << (i + 1) << ',' << fmt(q[i]) << ',' << fmt(emp[i]) << '\n';
  finish_out(out, cfg.out);

  dtn_users_free(users);
  dtn_rng_free(rng);
  dtn_alloc_free(alloc);
  dtn_dist_free(dist);
}

void cmd_duration(const Config& cfg) {
  if (!cfg.duration.present)
    usage_error(
        "duration command requires a duration config block "
        "(pareto_alpha, t0, optional method/mc_samples/cf_tolerance)");
  int method = 0;
  if (cfg.duration.method == "monte_carlo") {
    method = DTN_DURATION_MONTE_CARLO;
  } else if (cfg.duration.method == "cf_inversion") {
    method = DTN_DURATION_CF_INVERSION;
  } else {
    usage_error("unknown duration method: " + cfg.duration.method);
  }

  dtn_dist* dist = make_dist(cfg);
  const dtn_network_params params = make_params(cfg, dist);

  dtn_alloc* alloc = nullptr;
  check(dtn_optimal_allocation(dist, &params, 0.0, &alloc, nullptr));

  const std::uint64_t n = dtn_dist_size(dist);
  std::vector<double> p(n), q(n), per_file(n);
  check(dtn_dist_probs(dist, p.data()));
  check(dtn_alloc_values(alloc, q.data()));

  double miss = 0.0;
  double std_error = 0.0;
  check(dtn_duration_miss_rate(dist, &params, alloc, cfg.duration.pareto_alpha,
                               cfg.duration.t0, method, cfg.duration.mc_samples,
                               cfg.seed, cfg.duration.cf_tolerance, &miss, &std_error,
                               per_file.data()));

  const double lambda_t = cfg.lambda_user * cfg.patience;
  std::ofstream out = open_out(cfg.out);
  out << "rank,p,q,rate,prob_miss,method,t0,alpha\n";
  for (std::uint64_t i = 0; i < n; ++i)
    out << (i + 1) << ',' << fmt(p[i]) << ',' << fmt(q[i]) << ','
        << fmt(lambda_t * q[i]) << ',' << fmt(per_file[i]) << ','
        << cfg.duration.method << ',' << fmt(cfg.duration.t0) << ','
        << fmt(cfg.duration.pareto_alpha) << '\n';
  finish_out(out, cfg.out);

  std::cout << "duration-aware miss rate = " << fmt(miss) << "\n"
            << "std error = " << fmt(std_error) << "\n";

  dtn_alloc_free(alloc);
  dtn_dist_free(dist);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative caching experiments for opportunistic networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool paper_scale = false;

  CLI::App* sub_optimize =
      app.add_subcommand("optimize", "solve the cache allocation program");
  CLI::App* sub_sweep =
      app.add_subcommand("sweep", "miss rates for each scheme across a lambda*T grid");
  CLI::App* sub_fig1 = app.add_subcommand(
      "fig1", "realized pushing frequencies next to the optimal allocation");
  CLI::App* sub_duration = app.add_subcommand(
      "duration", "duration-aware miss rates under Pareto contact times");

  for (CLI::App* sub : {sub_optimize, sub_sweep, sub_fig1, sub_duration}) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out_path, "output CSV path (overrides config)");
    sub->add_flag("--paper-scale", paper_scale,
                  "full-scale profile: zipf N=10000, K=100");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  Config cfg;
  if (!config_path.empty()) {
    load_config(config_path, cfg);
    log_info("loaded config " + config_path);
  }
  if (sub->count("--seed") > 0) cfg.seed = seed;
  if (sub->count("--out") > 0) cfg.out = out_path;
  if (paper_scale) {
    cfg.distribution.type = "zipf";
    cfg.distribution.n = 10000;
    cfg.distribution.alpha = 1.0;
    cfg.cache_capacity = 100;
  }

  const std::string name = sub->get_name();
  if (cfg.out.empty()) cfg.out = name + ".csv";

  if (name == "optimize") {
    cmd_optimize(cfg);
  } else if (name == "sweep") {
    cmd_sweep(cfg);
  } else if (name == "fig1") {
    cmd_fig1(cfg);
  } else {
    cmd_duration(cfg);
  }
  return 0;
}
