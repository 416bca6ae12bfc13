#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

namespace mlpinit {

// xoshiro256** seeded through splitmix64. Every draw is defined in terms of
// integer arithmetic plus the documented transforms below, so a seed gives the
// same stream regardless of standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  // Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal by Box-Muller: u1 in (0, 1], u2 in [0, 1),
  // z = sqrt(-2 ln u1) * cos(2 pi u2). The sine branch is discarded so that no
  // hidden spare value survives between calls.
  double standard_normal();

 private:
  std::array<std::uint64_t, 4> state_{};
};

// Mixes a base seed with a stream index; used to derive independent per-fold and
// per-cell seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct NormalDist {
  double mean = 0.0;
  double variance = 1.0;
};

struct UniformDist {
  double lo = 0.0;
  double hi = 1.0;
};

using Distribution = std::variant<NormalDist, UniformDist>;

// Throws ValidationError on nonpositive variance or lo >= hi.
void validate(const Distribution& dist);

double draw(Rng& rng, const Distribution& dist);

std::vector<double> sample(Rng& rng, const Distribution& dist, std::size_t n);

// Fisher-Yates over [0, n).
std::vector<std::size_t> permutation(Rng& rng, std::size_t n);

}  // namespace mlpinit
