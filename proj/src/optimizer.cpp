#include "mlpinit/optimizer.hpp"

#include <span>
#include <string>

#include "mlpinit/errors.hpp"

namespace mlpinit {

void validate(const Hyperparams& hp) {
  if (hp.batch_size < 1) {
    throw ValidationError("batch size must be at least 1");
  }
  if (!(hp.learning_rate > 0.0)) {
    throw ValidationError("learning rate must be positive, got " + std::to_string(hp.learning_rate));
  }
  if (!(hp.momentum >= 0.0 && hp.momentum < 1.0)) {
    throw ValidationError("momentum must lie in [0, 1), got " + std::to_string(hp.momentum));
  }
}

Hyperparams preset_hyperparams(Topology topology, InitFamily family) {
  const bool xavier = family == InitFamily::Xavier;
  switch (topology) {
    case Topology::OneLayer:
      return xavier ? Hyperparams{24, 0.0001, 0.6} : Hyperparams{36, 0.0001, 0.6};
    case Topology::TwoLayer:
      return xavier ? Hyperparams{24, 0.006, 0.7} : Hyperparams{36, 0.003, 0.7};
    case Topology::ThreeLayer:
      return xavier ? Hyperparams{36, 0.006, 0.7} : Hyperparams{36, 0.0002, 0.6};
  }
  throw ValidationError("unknown topology");
}

SgdMomentum::SgdMomentum(const MlpModel& model) {
  for (const auto& layer : model.layers()) {
    velocity_.push_back({Matrix(layer.weights.rows(), layer.weights.cols()),
                         std::vector<double>(layer.bias.size(), 0.0)});
  }
}

namespace {

void update(std::span<double> param, std::span<double> vel, std::span<const double> grad,
            double lr, double m) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    vel[i] = m * vel[i] + grad[i];
    param[i] -= lr * vel[i];
  }
}

}  // namespace

void SgdMomentum::step(MlpModel& model, const Gradients& grads, const Hyperparams& hp) {
  auto layers = model.layers();
  if (layers.size() != velocity_.size() || grads.layers.size() != velocity_.size()) {
    throw ShapeError("sgd step: layer count mismatch between model, gradients and state");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& p = layers[k];
    auto& v = velocity_[k];
    const auto& g = grads.layers[k];
    if (p.weights.rows() != g.weights.rows() || p.weights.cols() != g.weights.cols() ||
        p.weights.rows() != v.weights.rows() || p.weights.cols() != v.weights.cols() ||
        p.bias.size() != g.bias.size() || p.bias.size() != v.bias.size()) {
      throw ShapeError("sgd step: layer " + std::to_string(k) + " weights " +
                       p.weights.shape_string() + " vs gradient " + g.weights.shape_string());
    }
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weights.data(), velocity_[k].weights.data(), grads.layers[k].weights.data(),
           hp.learning_rate, hp.momentum);
    update(layers[k].bias, velocity_[k].bias, grads.layers[k].bias, hp.learning_rate,
           hp.momentum);
  }
}

}  // namespace mlpinit
