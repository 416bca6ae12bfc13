#include "mlpinit/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mlpinit/errors.hpp"

namespace mlpinit {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) {
    s = splitmix64(x);
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) {
    throw ValidationError("Rng::below: bound must be positive");
  }
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= limit) return r % bound;
  }
}

double Rng::standard_normal() {
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base ^ (stream * 0xD1B54A32D192ED03ULL);
  splitmix64(x);
  return splitmix64(x);
}

void validate(const Distribution& dist) {
  if (const auto* n = std::get_if<NormalDist>(&dist)) {
    if (!(n->variance > 0.0) || !std::isfinite(n->variance) || !std::isfinite(n->mean)) {
      throw ValidationError("normal distribution needs finite positive variance, got " +
                            std::to_string(n->variance));
    }
  } else {
    const auto& u = std::get<UniformDist>(dist);
    if (!(u.lo < u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi)) {
      throw ValidationError("uniform distribution needs lo < hi, got [" + std::to_string(u.lo) +
                            ", " + std::to_string(u.hi) + "]");
    }
  }
}

double draw(Rng& rng, const Distribution& dist) {
  if (const auto* n = std::get_if<NormalDist>(&dist)) {
    return n->mean + std::sqrt(n->variance) * rng.standard_normal();
  }
  const auto& u = std::get<UniformDist>(dist);
  return u.lo + (u.hi - u.lo) * rng.uniform01();
}

std::vector<double> sample(Rng& rng, const Distribution& dist, std::size_t n) {
  validate(dist);
  std::vector<double> out(n);
  for (double& v : out) {
    v = draw(rng, dist);
  }
  return out;
}

std::vector<std::size_t> permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace mlpinit
