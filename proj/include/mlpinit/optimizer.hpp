#pragma once

#include <cstddef>
#include <vector>

#include "mlpinit/initializers.hpp"
#include "mlpinit/network.hpp"

namespace mlpinit {

struct Hyperparams {
  std::size_t batch_size = 1;
  double learning_rate = 0.01;
  double momentum = 0.0;

  bool operator==(const Hyperparams&) const = default;
};

// Throws ValidationError unless lr > 0, 0 <= momentum < 1, batch_size >= 1.
void validate(const Hyperparams& hp);

// Tuned values per topology and initializer family.
Hyperparams preset_hyperparams(Topology topology, InitFamily family);

// Classic momentum: v <- m v + g; theta <- theta - lr v.
class SgdMomentum {
 public:
  explicit SgdMomentum(const MlpModel& model);

  void step(MlpModel& model, const Gradients& grads, const Hyperparams& hp);

  const std::vector<Layer>& velocity() const { return velocity_; }

 private:
  std::vector<Layer> velocity_;
};

}  // namespace mlpinit
