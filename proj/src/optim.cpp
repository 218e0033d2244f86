#include "wltag/optim.hpp"

#include <cmath>

#include "wltag/error.hpp"

namespace wltag {

AdamState AdamState::for_params(const TensorSet& params) {
  return AdamState{TensorSet::zeros_like(params), TensorSet::zeros_like(params), 0};
}

NonFiniteGradient::NonFiniteGradient(std::string tensor, Eigen::Index row, Eigen::Index col, double value)
    : std::runtime_error("non-finite gradient in " + tensor + "(" + std::to_string(row) + ", " + std::to_string(col) +
                         ") = " + std::to_string(value)),
      tensor_(std::move(tensor)) {}

void adam_step(TensorSet& params, const Gradients& grads, AdamState& state, const AdamConfig& config,
               const FrozenMask& frozen) {
  for (std::size_t k = 0; k < kNumParams; ++k) {
    if (frozen[k]) continue;
    const auto& g = grads.tensors[k];
    if (g.rows() != params.tensors[k].rows() || g.cols() != params.tensors[k].cols())
      throw ContractError("gradient shape mismatch for " + std::string(param_name(param_at(k))));
    if (!g.allFinite()) {
      for (Eigen::Index c = 0; c < g.cols(); ++c)
        for (Eigen::Index r = 0; r < g.rows(); ++r)
          if (!std::isfinite(g(r, c))) throw NonFiniteGradient(std::string(param_name(param_at(k))), r, c, g(r, c));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < kNumParams; ++k) {
    if (frozen[k]) continue;
    auto theta = params.tensors[k].array();
    auto m = state.first_moment.tensors[k].array();
    auto v = state.second_moment.tensors[k].array();
    const auto g = grads.tensors[k].array() + config.weight_decay * theta;
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g * g;
    theta -= config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.epsilon);
  }
}

}  // namespace wltag
