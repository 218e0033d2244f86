#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "wltag/params.hpp"

namespace wltag {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-9;  // L2 coefficient, added to the gradient
};

struct AdamState {
  TensorSet first_moment;
  TensorSet second_moment;
  std::uint64_t step = 0;

  static AdamState for_params(const TensorSet& params);
};

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(std::string tensor, Eigen::Index row, Eigen::Index col, double value);
  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

using FrozenMask = std::array<bool, kNumParams>;
inline constexpr FrozenMask kNothingFrozen{};

// θ ← θ − lr · m̂ / (sqrt(v̂) + ε) with g ← g + weight_decay · θ. Frozen tensors
// are left alone (and their moments untouched). Throws NonFiniteGradient before
// touching anything when a non-frozen gradient entry is NaN/Inf.
void adam_step(TensorSet& params, const Gradients& grads, AdamState& state, const AdamConfig& config,
               const FrozenMask& frozen = kNothingFrozen);

}  // namespace wltag
