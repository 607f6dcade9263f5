#include "coalab/comb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "coalab/hash.hpp"
#include "coalab/rng.hpp"

namespace coalab {

namespace {

bool is_power_of_three(unsigned w) {
  if (w == 0) return false;
  while (w % 3 == 0) w /= 3;
  return w == 1;
}

bool iterated_majority(std::span<const std::uint8_t> bits) {
  if (bits.size() == 1) return bits[0] != 0;
  const std::size_t third = bits.size() / 3;
  const int votes = iterated_majority(bits.subspan(0, third)) +
                    iterated_majority(bits.subspan(third, third)) +
                    iterated_majority(bits.subspan(2 * third, third));
  return votes >= 2;
}

}  // namespace

const char* to_string(CombKind k) {
  switch (k) {
    case CombKind::Concat: return "concat";
    case CombKind::Majority: return "majority";
    case CombKind::IteratedMajority: return "iterated_majority";
  }
  return "unknown";
}

CombKind comb_kind_from_string(const std::string& s) {
  if (s == "concat") return CombKind::Concat;
  if (s == "majority") return CombKind::Majority;
  if (s == "iterated_majority") return CombKind::IteratedMajority;
  throw std::invalid_argument("unknown comb kind '" + s + "'");
}

void CombSpec::validate() const {
  if (kappa == 0 || kappa > 64) throw std::invalid_argument("kappa must be in [1, 64]");
  if (w == 0) throw std::invalid_argument("group width must be positive");
  switch (kind) {
    case CombKind::Concat:
      if (w != 1) throw std::invalid_argument("concat requires w = 1");
      break;
    case CombKind::Majority:
      if (w % 2 == 0) throw std::invalid_argument("majority requires odd w");
      break;
    case CombKind::IteratedMajority:
      if (!is_power_of_three(w)) throw std::invalid_argument("iterated majority requires w a power of 3");
      break;
  }
}

bool comb_group_bit(CombKind kind, std::span<const std::uint8_t> group) {
  switch (kind) {
    case CombKind::Concat:
      return group[0] != 0;
    case CombKind::Majority: {
      std::size_t ones = 0;
      for (auto b : group) ones += b != 0;
      return 2 * ones > group.size();
    }
    case CombKind::IteratedMajority:
      return iterated_majority(group);
  }
  return false;
}

Seed comb_apply(const CombSpec& spec, std::span<const std::uint8_t> bits) {
  spec.validate();
  if (bits.size() != spec.ell()) {
    throw std::invalid_argument("comb input has " + std::to_string(bits.size()) + " bits, expected " +
                                std::to_string(spec.ell()));
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < spec.kappa; ++i) {
    v = (v << 1) | (comb_group_bit(spec.kind, bits.subspan(i * spec.w, spec.w)) ? 1U : 0U);
  }
  return Seed(v, spec.kappa);
}

KzWidth kz_width(double c, double eps) {
  if (c < 1) throw std::invalid_argument("coalition size must be at least 1");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must be in (0, 1)");
  KzWidth out;
  out.formula = 3.0 * std::pow(c / eps, std::log2(3.0));
  // Tolerate floating error when the formula lands on an exact power of 3.
  const double target = out.formula * (1.0 - 1e-9);
  unsigned w = 1;
  while (static_cast<double>(w) < target) w *= 3;
  out.width = w;
  return out;
}

CoalitionBounds coalition_bounds(unsigned ell, unsigned kappa, double eps) {
  if (kappa < 2) throw std::invalid_argument("kappa must be at least 2");
  if (ell % kappa != 0) throw std::invalid_argument("ell must be a multiple of kappa");
  CoalitionBounds b;
  // (ell/(3 kappa))^alpha with alpha = log_3 2 equals 2^k when the ratio is 3^k.
  if (ell % (3 * kappa) == 0 && is_power_of_three(ell / (3 * kappa))) {
    int k = 0;
    for (unsigned r = ell / (3 * kappa); r > 1; r /= 3) ++k;
    b.achievable = std::ldexp(eps, k);
  } else {
    const double alpha = std::log(2.0) / std::log(3.0);
    b.achievable = eps * std::pow(static_cast<double>(ell) / (3.0 * kappa), alpha);
  }
  b.upper = eps * 10.0 * ell / (kappa - 1);
  return b;
}

double majority_tie_probability(unsigned w) {
  if (w % 2 == 0) throw std::invalid_argument("majority width must be odd");
  const unsigned n = w - 1;
  // C(n, n/2) / 2^n built multiplicatively to stay in range.
  double p = 1.0;
  for (unsigned i = 1; i <= n / 2; ++i) {
    p *= static_cast<double>(n / 2 + i) / i;
    p /= 4.0;
  }
  return p;
}

std::uint64_t majority_tie_count(unsigned w) {
  if (w % 2 == 0 || w > 31) throw std::invalid_argument("majority width must be odd and <= 31");
  const unsigned n = w - 1;
  std::uint64_t ties = 0;
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
    if (static_cast<unsigned>(__builtin_popcountll(m)) * 2 == n) ++ties;
  }
  return ties;
}

double majority_tie_asymptotic(unsigned w) { return std::sqrt(2.0 / (std::numbers::pi * w)); }

double iterated_majority_pivot_probability(unsigned w) {
  if (!is_power_of_three(w)) throw std::invalid_argument("width must be a power of 3");
  double p = 1.0;
  for (unsigned r = w; r > 1; r /= 3) p *= 0.5;
  return p;
}

double mu_concat(double p) { return 2 * p - p * p; }

double mu_with_pivot(double p, double pivot) { return pivot * mu_concat(p) + (1 - pivot) * p; }

McEstimate last_player_advantage(const CombSpec& spec, double p, std::uint64_t trials,
                                 std::uint64_t rng_seed) {
  spec.validate();
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must be in (0, 1)");
  if (trials < 1000) throw std::invalid_argument("at least 1000 trials required");
  Rng rng(rng_seed, 0xc0b);
  const unsigned ell = spec.ell();
  std::vector<std::uint8_t> bits(ell);
  // Random oracle: a fresh salt per trial decides which seeds pick the player.
  auto selected = [&](std::uint64_t trial, const Seed& s) {
    ByteWriter w;
    w.tag("coalab-mu").u64(rng_seed).u64(trial).u64(s.value);
    return digest_fraction(w.hash()) < p;
  };
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (unsigned i = 0; i + 1 < ell; ++i) bits[i] = static_cast<std::uint8_t>(rng.next() & 1);
    bits[ell - 1] = 0;
    const Seed s0 = comb_apply(spec, bits);
    bits[ell - 1] = 1;
    const Seed s1 = comb_apply(spec, bits);
    const bool win = selected(t, s0) || (s1 != s0 && selected(t, s1));
    hits += win;
  }
  McEstimate e;
  e.trials = trials;
  e.mean = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(trials));
  return e;
}

CoalitionStrategy target_strategy(const CombSpec& spec, std::function<bool(const Seed&)> target) {
  return [spec, target = std::move(target)](std::vector<std::uint8_t>& bits,
                                            std::span<const std::size_t> coalition) {
    const std::size_t c = coalition.size();
    if (c <= 12) {
      for (std::uint64_t m = 0; m < (1ULL << c); ++m) {
        for (std::size_t k = 0; k < c; ++k) bits[coalition[k]] = static_cast<std::uint8_t>((m >> k) & 1);
        if (target(comb_apply(spec, bits))) return;
      }
      for (auto pos : coalition) bits[pos] = 0;
      return;
    }
    for (auto pos : coalition) bits[pos] = 0;
    if (target(comb_apply(spec, bits))) return;
    for (auto pos : coalition) {
      bits[pos] ^= 1;
      if (target(comb_apply(spec, bits))) return;
    }
  };
}

double coalition_bias(const CombSpec& spec, std::span<const std::size_t> coalition,
                      const CoalitionStrategy& strategy, std::uint64_t trials,
                      std::uint64_t rng_seed) {
  spec.validate();
  if (spec.kappa > 16) throw std::invalid_argument("kappa too large for an exact histogram");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const unsigned ell = spec.ell();
  std::vector<bool> in_coalition(ell, false);
  for (auto pos : coalition) {
    if (pos >= ell) throw std::invalid_argument("coalition index out of range");
    in_coalition[pos] = true;
  }
  std::vector<std::uint64_t> histogram(1ULL << spec.kappa, 0);
  std::vector<std::uint8_t> bits(ell);
  Rng rng(rng_seed, 0xb1a5);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (unsigned i = 0; i < ell; ++i) {
      bits[i] = in_coalition[i] ? 0 : static_cast<std::uint8_t>(rng.next() & 1);
    }
    if (!coalition.empty()) strategy(bits, coalition);
    ++histogram[comb_apply(spec, bits).value];
  }
  const double uniform = 1.0 / static_cast<double>(histogram.size());
  double l1 = 0;
  for (auto h : histogram) l1 += std::abs(static_cast<double>(h) / static_cast<double>(trials) - uniform);
  return 0.5 * l1;
}

}  // namespace coalab
