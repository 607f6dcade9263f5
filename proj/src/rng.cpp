#include "coalab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace coalab {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), key_(mix64(mix64(seed) ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t Rng::next() {
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * 0xd1342543de82ef95ULL + 1));
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::exponential(double mean) {
  double u = uniform();
  return -mean * std::log1p(-u);
}

std::uint64_t Rng::geometric(double p) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("Rng::geometric: p outside (0, 1]");
  if (p == 1.0) return 0;
  const double u = uniform();
  return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

Rng Rng::fork(std::uint64_t stream) const { return Rng(mix64(key_) ^ seed_, stream); }

}  // namespace coalab
