#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mlpinit/matrix.hpp"
#include "mlpinit/rng.hpp"

namespace mlpinit {

enum class InitFamily { Xavier, Kaiming };
enum class InitDist { Normal, Uniform };

struct InitScheme {
  InitFamily family = InitFamily::Kaiming;
  InitDist dist = InitDist::Normal;

  bool operator==(const InitScheme&) const = default;
};

std::string_view to_string(InitFamily family);
std::string_view to_string(InitDist dist);
InitFamily parse_init_family(std::string_view text);
InitDist parse_init_dist(std::string_view text);

// Weight variance that keeps the forward signal scale fixed for a layer with
// `fan_in` inputs: 1/d for Xavier, 2/d for Kaiming (ReLU zeroes half of a
// symmetric pre-activation, so the second moment entering the layer halves).
double target_variance(InitScheme scheme, std::size_t fan_in);

// Half-width b of the uniform variant; b^2 / 3 equals target_variance.
double uniform_bound(InitScheme scheme, std::size_t fan_in);

// The distribution every weight entry is drawn from.
Distribution weight_distribution(InitScheme scheme, std::size_t fan_in);

// rows x cols matrix of i.i.d. draws. For a layer applied as W * x, fan_in is
// the column count.
Matrix initialize(Rng& rng, InitScheme scheme, std::size_t fan_in, std::size_t rows,
                  std::size_t cols);

// Pushes a standard-normal batch (batch_rows x width) through `depth` square
// zero-bias layers, each computing W * relu(previous). The input is treated as
// the pre-activation of a layer 0. Entry k of the result is
// Var(pre-activation of layer k+1) / Var(input).
std::vector<double> propagate_variance(Rng& rng, InitScheme scheme, std::size_t width,
                                       std::size_t depth, std::size_t batch_rows);

}  // namespace mlpinit
