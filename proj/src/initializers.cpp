#include "mlpinit/initializers.hpp"

#include <cmath>
#include <string>

#include "mlpinit/errors.hpp"

namespace mlpinit {

std::string_view to_string(InitFamily family) {
  return family == InitFamily::Xavier ? "xavier" : "kaiming";
}

std::string_view to_string(InitDist dist) {
  return dist == InitDist::Normal ? "normal" : "uniform";
}

InitFamily parse_init_family(std::string_view text) {
  if (text == "xavier") return InitFamily::Xavier;
  if (text == "kaiming") return InitFamily::Kaiming;
  throw ValidationError("unknown init family '" + std::string(text) + "'");
}

InitDist parse_init_dist(std::string_view text) {
  if (text == "normal") return InitDist::Normal;
  if (text == "uniform") return InitDist::Uniform;
  throw ValidationError("unknown init distribution '" + std::string(text) + "'");
}

namespace {

double gain(InitFamily family) { return family == InitFamily::Xavier ? 1.0 : 2.0; }

void require_fan_in(std::size_t fan_in) {
  if (fan_in == 0) {
    throw ValidationError("fan_in must be at least 1");
  }
}

}  // namespace

double target_variance(InitScheme scheme, std::size_t fan_in) {
  require_fan_in(fan_in);
  return gain(scheme.family) / static_cast<double>(fan_in);
}

// sqrt(3/d) for Xavier, sqrt(6/d) for Kaiming.
double uniform_bound(InitScheme scheme, std::size_t fan_in) {
  require_fan_in(fan_in);
  return std::sqrt(3.0 * gain(scheme.family) / static_cast<double>(fan_in));
}

Distribution weight_distribution(InitScheme scheme, std::size_t fan_in) {
  if (scheme.dist == InitDist::Normal) {
    return NormalDist{0.0, target_variance(scheme, fan_in)};
  }
  const double b = uniform_bound(scheme, fan_in);
  return UniformDist{-b, b};
}

Matrix initialize(Rng& rng, InitScheme scheme, std::size_t fan_in, std::size_t rows,
                  std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ValidationError("initialize: zero dimension in " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  return Matrix(rows, cols, sample(rng, weight_distribution(scheme, fan_in), rows * cols));
}

std::vector<double> propagate_variance(Rng& rng, InitScheme scheme, std::size_t width,
                                       std::size_t depth, std::size_t batch_rows) {
  if (width == 0 || depth == 0 || batch_rows < 2) {
    throw ValidationError("propagate_variance: need width, depth >= 1 and at least 2 rows");
  }
  Matrix x(batch_rows, width, sample(rng, NormalDist{0.0, 1.0}, batch_rows * width));
  const double input_var = variance(x.data());
  std::vector<double> ratios;
  ratios.reserve(depth);
  Matrix current = x;
  for (std::size_t k = 0; k < depth; ++k) {
    current = relu(current);
    // Entries are i.i.d., so the draw can be used directly as W^T.
    const Matrix w_t = initialize(rng, scheme, width, width, width);
    current = matmul(current, w_t);
    ratios.push_back(variance(current.data()) / input_var);
  }
  return ratios;
}

}  // namespace mlpinit
