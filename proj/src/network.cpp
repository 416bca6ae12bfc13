#include "mlpinit/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlpinit/errors.hpp"

namespace mlpinit {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::OneLayer:
      return "1-layer";
    case Topology::TwoLayer:
      return "2-layer";
    case Topology::ThreeLayer:
      return "3-layer";
  }
  return "?";
}

Topology topology_from_depth(int depth) {
  if (depth < 1 || depth > 3) {
    throw ValidationError("topology depth must be 1, 2 or 3, got " + std::to_string(depth));
  }
  return static_cast<Topology>(depth);
}

std::vector<std::size_t> layer_dims(Topology topology) {
  switch (topology) {
    case Topology::OneLayer:
      return {kFeatureCount, kClassCount};
    case Topology::TwoLayer:
      return {kFeatureCount, 50, kClassCount};
    case Topology::ThreeLayer:
      return {kFeatureCount, 50, 20, kClassCount};
  }
  throw ValidationError("unknown topology");
}

MlpModel::MlpModel(Topology topology, std::vector<Layer> layers)
    : topology_(topology), layers_(std::move(layers)) {
  const auto dims = layer_dims(topology_);
  if (layers_.size() + 1 != dims.size()) {
    throw ShapeError(std::string(to_string(topology_)) + " model needs " +
                     std::to_string(dims.size() - 1) + " layers, got " +
                     std::to_string(layers_.size()));
  }
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& layer = layers_[k];
    if (layer.weights.rows() != dims[k + 1] || layer.weights.cols() != dims[k] ||
        layer.bias.size() != dims[k + 1]) {
      throw ShapeError("layer " + std::to_string(k) + " has weights " +
                       layer.weights.shape_string() + " and bias " +
                       std::to_string(layer.bias.size()) + ", expected " +
                       std::to_string(dims[k + 1]) + "x" + std::to_string(dims[k]));
    }
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += layer.weights.size() + layer.bias.size();
  }
  return n;
}

MlpModel build_model(Rng& rng, Topology topology, InitScheme scheme) {
  const auto dims = layer_dims(topology);
  std::vector<Layer> layers;
  layers.reserve(dims.size() - 1);
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    layers.push_back({initialize(rng, scheme, dims[k], dims[k + 1], dims[k]),
                      std::vector<double>(dims[k + 1], 0.0)});
  }
  return MlpModel(topology, std::move(layers));
}

ForwardCache forward(const MlpModel& model, const Matrix& batch) {
  if (batch.cols() != kFeatureCount) {
    throw ShapeError("forward: batch " + batch.shape_string() + " needs " +
                     std::to_string(kFeatureCount) + " feature columns");
  }
  const auto layers = model.layers();
  ForwardCache cache;
  cache.inputs.reserve(layers.size());
  cache.pre_activations.reserve(layers.size());
  Matrix current = batch;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Matrix z = matmul_transpose_b(current, layers[k].weights);
    add_row_vector(z, layers[k].bias);
    cache.inputs.push_back(std::move(current));
    current = k + 1 < layers.size() ? relu(z) : softmax(z);
    cache.pre_activations.push_back(std::move(z));
  }
  cache.probs = std::move(current);
  return cache;
}

Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   std::span<const int> labels) {
  const auto layers = model.layers();
  if (cache.inputs.size() != layers.size() || cache.pre_activations.size() != layers.size()) {
    throw ShapeError("backward: activation cache does not belong to this model");
  }
  const std::size_t batch = cache.probs.rows();
  if (labels.size() != batch || cache.probs.cols() != kClassCount) {
    throw ShapeError("backward: " + std::to_string(labels.size()) + " labels for probs " +
                     cache.probs.shape_string());
  }
  if (batch == 0) {
    throw ValidationError("backward: empty batch");
  }

  // d(mean CE)/d(logits) = (probs - onehot) / batch
  Matrix delta = cache.probs;
  const double scale = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= kClassCount) {
      throw ValidationError("backward: label " + std::to_string(label) + " out of range");
    }
    delta(i, static_cast<std::size_t>(label)) -= 1.0;
    for (double& v : delta.row(i)) v *= scale;
  }

  Gradients grads;
  grads.layers.resize(layers.size());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const Matrix& input = cache.inputs[k];
    if (input.rows() != batch || input.cols() != layers[k].weights.cols()) {
      throw ShapeError("backward: cached input " + input.shape_string() +
                       " does not match layer " + std::to_string(k));
    }
    auto& g = grads.layers[k];
    g.weights = matmul_transpose_a(delta, input);
    g.bias.assign(delta.cols(), 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
      const auto r = delta.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) g.bias[j] += r[j];
    }
    if (k == 0) break;
    Matrix upstream = matmul(delta, layers[k].weights);
    const Matrix& z = cache.pre_activations[k - 1];
    auto up = upstream.data();
    const auto zd = z.data();
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (!(zd[i] > 0.0)) up[i] = 0.0;
    }
    delta = std::move(upstream);
  }
  return grads;
}

double loss(const MlpModel& model, const Matrix& batch, std::span<const int> labels) {
  return cross_entropy(forward(model, batch).probs, labels);
}

std::vector<int> predict(const MlpModel& model, const Matrix& batch) {
  return argmax_rows(forward(model, batch).probs);
}

double grad_check(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                  double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw ValidationError("grad_check: epsilon must lie in [1e-7, 1e-3]");
  }
  const Gradients analytic = backward(model, forward(model, batch), labels);
  MlpModel probe = model;
  double worst = 0.0;

  auto check = [&](double& param, double expected) {
    const double saved = param;
    param = saved + epsilon;
    const double plus = loss(probe, batch, labels);
    param = saved - epsilon;
    const double minus = loss(probe, batch, labels);
    param = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double err =
        std::abs(expected - numeric) / std::max(std::abs(expected) + std::abs(numeric), 1e-12);
    worst = std::max(worst, err);
  };

  auto layers = probe.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto w = layers[k].weights.data();
    const auto gw = analytic.layers[k].weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) check(w[i], gw[i]);
    auto& b = layers[k].bias;
    const auto& gb = analytic.layers[k].bias;
    for (std::size_t i = 0; i < b.size(); ++i) check(b[i], gb[i]);
  }
  return worst;
}

}  // namespace mlpinit
