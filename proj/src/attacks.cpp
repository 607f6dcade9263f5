#include <utility>
#include "coalab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coalab/rng.hpp"

namespace coalab::attacks {
namespace {

constexpr double kBoundaryTol = 1e-9;

void check_confirmation_args(double eps, double rho) {
  if (!(eps > 0)) throw std::invalid_argument("fee per block must be positive");
  if (!(rho > 0)) throw std::invalid_argument("density must be positive; no S satisfies the bound");
  if (rho > 1) throw std::invalid_argument("density cannot exceed 1");
}

// Smallest S with rho*S > v/eps + offset - 1 (strictly), S >= 0.
std::uint64_t solve(double v, double eps, double rho, double offset) {
  check_confirmation_args(eps, rho);
  const double x = (v / eps + offset - 1) / rho;
  if (x < 0) return 0;
  auto s = static_cast<std::uint64_t>(std::floor(x));
  // Step across the rounding noise of the division in either direction.
  while (s > 0 && confirmation_inequality(v, eps, rho, offset, s - 1)) --s;
  while (!confirmation_inequality(v, eps, rho, offset, s)) ++s;
  return s;
}

}  // namespace

bool confirmation_inequality(double v, double eps, double rho, double offset, std::uint64_t s) {
  const double rhs = eps * (rho * static_cast<double>(s) - offset + 1);
  return rhs - v > kBoundaryTol * std::max({1.0, std::abs(v), std::abs(rhs)});
}

std::uint64_t min_safe_confirmations_observed(double v, double eps, double rho_obs, double delta) {
  return solve(v, eps, rho_obs, delta);
}

std::uint64_t min_safe_confirmations_density(double v, double eps, double rho, double k) {
  if (!(rho > 0.5)) throw std::invalid_argument("density assumption needs rho > 1/2");
  return solve(v, eps, rho, k);
}

std::uint64_t min_safe_confirmations_scan(double v, double eps, double rho, double offset) {
  check_confirmation_args(eps, rho);
  for (std::uint64_t s = 0;; ++s) {
    if (confirmation_inequality(v, eps, rho, offset, s)) return s;
  }
}

double wait_seconds(std::uint64_t s, double g0) { return static_cast<double>(s) * g0; }

namespace {

struct Segment {
  std::int64_t excess = 0;
  std::size_t length = 0;
};

Segment best_segment(std::span<const bool> slots) {
  Segment best;
  std::int64_t excess = 0;
  for (std::size_t len = 1; len <= slots.size(); ++len) {
    excess += slots[slots.size() - len] ? -1 : 1;
    if (excess > best.excess) best = {excess, len};
  }
  return best;
}

}  // namespace

std::uint64_t measure_delta(std::span<const bool> slots_before_b0) {
  return static_cast<std::uint64_t>(best_segment(slots_before_b0).excess);
}

std::size_t delta_segment_length(std::span<const bool> slots_before_b0) {
  return best_segment(slots_before_b0).length;
}

double observed_density(std::span<const bool> slots_after_b0) {
  if (slots_after_b0.empty()) throw std::invalid_argument("no slots after B0");
  const auto produced = std::count(slots_after_b0.begin(), slots_after_b0.end(), true);
  return static_cast<double>(produced) / static_cast<double>(slots_after_b0.size());
}

double takeover_q_hat(double p, double q) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must be in (0, 1)");
  if (!(q >= 0 && q < 1)) throw std::invalid_argument("q must be in [0, 1)");
  return 1.0 / ((1 - p) * (1 - q)) - 1;
}

namespace {

// Returns (d, mu / ell).
std::pair<double, double> takeover_deviation(double ell, double p, double q) {
  if (!(ell > 0)) throw std::invalid_argument("ell must be positive");
  const double mean_factor = (2 + takeover_q_hat(p, q)) * p;
  const double dev = 1 / mean_factor - 1;
  if (!(dev > 0)) {
    throw std::domain_error("(2+q_hat)p >= 1: the expected share already exceeds ell");
  }
  return {dev, mean_factor};
}

}  // namespace

double takeover_log_bound(double ell, double p, double q) {
  const auto [dev, mean_factor] = takeover_deviation(ell, p, q);
  return dev * dev * mean_factor * ell / 3;
}

double takeover_log_bound_any_deviation(double ell, double p, double q) {
  const auto [dev, mean_factor] = takeover_deviation(ell, p, q);
  return dev * dev * mean_factor * ell / (2 + dev);
}

TakeoverMc takeover_monte_carlo(unsigned ell, double p, double q, std::uint64_t trials,
                                std::uint64_t seed) {
  if (ell == 0 || trials == 0) throw std::invalid_argument("need ell > 0 and trials > 0");
  TakeoverMc r;
  r.bound = std::exp(-takeover_log_bound(ell, p, q));
  r.n = static_cast<std::uint64_t>(std::ceil((2 + takeover_q_hat(p, q)) * ell - 1e-9));
  r.trials = trials;

  // Inverse-CDF sampling keeps the draw sequence platform independent.
  std::vector<double> cdf(r.n + 1);
  double pmf = std::pow(1 - p, static_cast<double>(r.n));
  double acc = 0;
  for (std::uint64_t k = 0; k <= r.n; ++k) {
    acc += pmf;
    cdf[k] = acc;
    pmf *= static_cast<double>(r.n - k) / static_cast<double>(k + 1) * p / (1 - p);
  }
  cdf.back() = 1.0;

  Rng rng(seed, 0x7a4e);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double u = rng.uniform();
    const auto y = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (y > ell) ++r.exceed;
  }
  r.empirical = static_cast<double>(r.exceed) / static_cast<double>(trials);
  return r;
}

double bribe_acceptance_threshold(double f, double f_attacker, double p_success, bool ppcoin) {
  if (!(p_success > 0 && p_success <= 1)) throw std::invalid_argument("success probability must be in (0, 1]");
  if (ppcoin) return 0;
  return std::max(0.0, f * (1 - p_success) / p_success - f_attacker);
}

bool accepts_bribe(double mu, double f, double f_attacker, double p_success, bool ppcoin) {
  if (ppcoin) return mu > 0;
  return (mu + f_attacker) * p_success > f * (1 - p_success);
}

}  // namespace coalab::attacks
