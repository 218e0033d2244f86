#pragma once

// Minibatch loss/gradient and decode kernels. `serial` is the reference
// implementation; `parallel` spreads sentences over OpenMP threads.
//
// The parallel gradient kernels split a batch into kReductionChunks fixed,
// contiguous chunks and reduce the chunk gradients in chunk order, so their
// results do not depend on the thread count. They differ from the serial
// kernels only by floating-point summation order.

#include <cstdint>
#include <span>
#include <vector>

#include "wltag/encoder.hpp"
#include "wltag/labels.hpp"
#include "wltag/params.hpp"

namespace wltag {

inline constexpr std::size_t kReductionChunks = 8;

struct TrainingExample {
  std::size_t id = 0;
  EncodedSentence encoded;
  std::vector<LabelId> weak_labels;   // truncated to encoded.size()
  std::vector<std::size_t> sampled;   // UN positions pinned to O
};

struct DropoutOptions {
  bool active = false;
  std::uint64_t seed = 0;  // combined with the example id and `step`
  std::uint64_t step = 0;
};

// Classification loss for one sentence: -sum of log P at typed and sampled positions.
// UN/NT positions contribute nothing. Gradients are added when grads != nullptr.
double classification_example_loss(const TrainingExample& ex, const ModelParams& params, const TypeSystem& types,
                                   const DropoutOptions& dropout, Gradients* grads);

// Partial-CRF loss for one sentence, back-propagated through the encoder.
double sequence_example_loss(const TrainingExample& ex, const ModelParams& params, const TypeSystem& types,
                             const DropoutOptions& dropout, Gradients* grads);

namespace serial {

double classification_loss(std::span<const TrainingExample* const> batch, const ModelParams& params,
                           const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads);
double sequence_loss(std::span<const TrainingExample* const> batch, const ModelParams& params, const TypeSystem& types,
                     const DropoutOptions& dropout, Gradients* grads);
std::vector<std::vector<LabelId>> decode(std::span<const EncodedSentence> sentences, const ModelParams& params);

}  // namespace serial

namespace parallel {

double classification_loss(std::span<const TrainingExample* const> batch, const ModelParams& params,
                           const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads);
double sequence_loss(std::span<const TrainingExample* const> batch, const ModelParams& params, const TypeSystem& types,
                     const DropoutOptions& dropout, Gradients* grads);
std::vector<std::vector<LabelId>> decode(std::span<const EncodedSentence> sentences, const ModelParams& params);

}  // namespace parallel

}  // namespace wltag
