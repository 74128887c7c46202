#include "rng.hpp"

#include <cmath>

#include "errors.hpp"

namespace dtn {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(master ^ fnv1a64(label));
}

std::uint64_t RandomStream::next_below(std::uint64_t n) {
  if (n == 0) throw invalid_parameter_error("next_below: n must be positive");
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t threshold = -n % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RandomStream::poisson_small(double mean) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double product = next_double();
  while (product > limit) {
    ++k;
    product *= next_double();
  }
  return k;
}

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw invalid_parameter_error("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  std::uint64_t total = 0;
  // Poisson(a + b) = Poisson(a) + Poisson(b) for independent draws.
  while (mean > 30.0) {
    total += poisson_small(30.0);
    mean -= 30.0;
  }
  return total + poisson_small(mean);
}

}  // namespace dtn
