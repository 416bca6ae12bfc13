#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mlpinit/initializers.hpp"
#include "mlpinit/matrix.hpp"
#include "mlpinit/rng.hpp"

namespace mlpinit {

inline constexpr std::size_t kFeatureCount = 85;
inline constexpr std::size_t kClassCount = 4;

// Number of weight layers. OneLayer has no hidden layer.
enum class Topology { OneLayer = 1, TwoLayer = 2, ThreeLayer = 3 };

std::string_view to_string(Topology topology);
Topology topology_from_depth(int depth);

// [85, 4], [85, 50, 4] or [85, 50, 20, 4].
std::vector<std::size_t> layer_dims(Topology topology);

struct Layer {
  Matrix weights;             // out x in
  std::vector<double> bias;   // out

  bool operator==(const Layer&) const = default;
};

class MlpModel {
 public:
  // Validates that the layer shapes chain and match the topology's dims.
  MlpModel(Topology topology, std::vector<Layer> layers);

  Topology topology() const { return topology_; }
  std::span<const Layer> layers() const { return layers_; }
  std::span<Layer> layers() { return layers_; }
  std::size_t parameter_count() const;

  bool operator==(const MlpModel&) const = default;

 private:
  Topology topology_;
  std::vector<Layer> layers_;
};

struct Gradients {
  std::vector<Layer> layers;  // d_weights, d_bias per layer
};

// Everything backward needs from a forward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;           // input to each layer
  std::vector<Matrix> pre_activations;  // W x + b of each layer
  Matrix probs;                         // softmax of the last pre-activation
};

// Weights from `scheme` with fan-in equal to each layer's input width; zero biases.
MlpModel build_model(Rng& rng, Topology topology, InitScheme scheme);

// Hidden layers use ReLU, the output layer softmax.
ForwardCache forward(const MlpModel& model, const Matrix& batch);

// Gradient of the mean cross-entropy over the cached batch.
Gradients backward(const MlpModel& model, const ForwardCache& cache, std::span<const int> labels);

double loss(const MlpModel& model, const Matrix& batch, std::span<const int> labels);

std::vector<int> predict(const MlpModel& model, const Matrix& batch);

// Central differences over every parameter; returns the largest
// |analytic - numeric| / max(|analytic| + |numeric|, 1e-12).
double grad_check(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                  double epsilon);

}  // namespace mlpinit
