#include "wltag/batch.hpp"

#include <omp.h>

#include <exception>

#include "wltag/error.hpp"
#include "wltag/pcrf.hpp"

namespace wltag {

namespace {

EncoderTape run_encoder(const TrainingExample& ex, const ModelParams& params, const DropoutOptions& dropout) {
  if (ex.weak_labels.size() != ex.encoded.size()) throw ContractError("example labels/tokens length mismatch");
  if (dropout.active) {
    Rng rng(stream_seed(dropout.seed, {ex.id, dropout.step}));
    return encoder_forward(ex.encoded, params, &rng);
  }
  return encoder_forward(ex.encoded, params, nullptr);
}

using ExampleLoss = double (*)(const TrainingExample&, const ModelParams&, const TypeSystem&, const DropoutOptions&,
                               Gradients*);

double serial_batch(ExampleLoss fn, std::span<const TrainingExample* const> batch, const ModelParams& params,
                    const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads) {
  double loss = 0.0;
  for (const auto* ex : batch) loss += fn(*ex, params, types, dropout, grads);
  return loss;
}

double parallel_batch(ExampleLoss fn, std::span<const TrainingExample* const> batch, const ModelParams& params,
                      const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads) {
  const std::size_t n = batch.size();
  const std::size_t chunks = std::min(kReductionChunks, n);
  if (chunks == 0) return 0.0;
  std::vector<double> chunk_loss(chunks, 0.0);
  std::vector<Gradients> chunk_grads;
  if (grads) chunk_grads.assign(chunks, Gradients::zeros_like(*grads));
  std::vector<std::exception_ptr> errors(chunks);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const auto cu = static_cast<std::size_t>(c);
    try {
      const std::size_t lo = cu * n / chunks, hi = (cu + 1) * n / chunks;
      Gradients* g = grads ? &chunk_grads[cu] : nullptr;
      for (std::size_t i = lo; i < hi; ++i) chunk_loss[cu] += fn(*batch[i], params, types, dropout, g);
    } catch (...) {
      errors[cu] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  double loss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    loss += chunk_loss[c];
    if (grads) *grads += chunk_grads[c];
  }
  return loss;
}

}  // namespace

double classification_example_loss(const TrainingExample& ex, const ModelParams& params, const TypeSystem& types,
                                   const DropoutOptions& dropout, Gradients* grads) {
  std::vector<LabelId> target(ex.weak_labels.size(), -1);
  bool any = false;
  for (std::size_t i = 0; i < ex.weak_labels.size(); ++i) {
    if (types.is_typed(ex.weak_labels[i])) {
      target[i] = ex.weak_labels[i];
      any = true;
    }
  }
  for (std::size_t i : ex.sampled) {
    if (i >= target.size()) continue;
    if (ex.weak_labels[i] != types.unlabeled()) throw ContractError("sampled position is not UN");
    target[i] = TypeSystem::outside();
    any = true;
  }
  if (!any) return 0.0;

  const auto tape = run_encoder(ex, params, dropout);
  double loss = 0.0;
  Matrix d = Matrix::Zero(tape.log_probs.rows(), tape.log_probs.cols());
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] < 0) continue;
    const auto t = static_cast<Eigen::Index>(i);
    loss -= tape.log_probs(target[i], t);
    d(target[i], t) = -1.0;
  }
  if (grads) encoder_backward(tape, d, params, *grads);
  return loss;
}

double sequence_example_loss(const TrainingExample& ex, const ModelParams& params, const TypeSystem& types,
                             const DropoutOptions& dropout, Gradients* grads) {
  const auto lattice = build_lattice(ex.weak_labels, ex.sampled, types);
  const auto tape = run_encoder(ex, params, dropout);
  const auto& A = params[ParamId::Transition];
  if (!grads) return pcrf_loss(tape.log_probs, A, lattice);

  Matrix d = Matrix::Zero(tape.log_probs.rows(), tape.log_probs.cols());
  const double loss = pcrf_loss(tape.log_probs, A, lattice, &d, &(*grads)[ParamId::Transition]);
  encoder_backward(tape, d, params, *grads);
  return loss;
}

namespace serial {

double classification_loss(std::span<const TrainingExample* const> batch, const ModelParams& params,
                           const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads) {
  return serial_batch(&classification_example_loss, batch, params, types, dropout, grads);
}

double sequence_loss(std::span<const TrainingExample* const> batch, const ModelParams& params, const TypeSystem& types,
                     const DropoutOptions& dropout, Gradients* grads) {
  return serial_batch(&sequence_example_loss, batch, params, types, dropout, grads);
}

std::vector<std::vector<LabelId>> decode(std::span<const EncodedSentence> sentences, const ModelParams& params) {
  std::vector<std::vector<LabelId>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const auto tape = encoder_forward(s, params, nullptr);
    out.push_back(viterbi_decode(tape.log_probs, params[ParamId::Transition]).labels);
  }
  return out;
}

}  // namespace serial

namespace parallel {

double classification_loss(std::span<const TrainingExample* const> batch, const ModelParams& params,
                           const TypeSystem& types, const DropoutOptions& dropout, Gradients* grads) {
  return parallel_batch(&classification_example_loss, batch, params, types, dropout, grads);
}

double sequence_loss(std::span<const TrainingExample* const> batch, const ModelParams& params, const TypeSystem& types,
                     const DropoutOptions& dropout, Gradients* grads) {
  return parallel_batch(&sequence_example_loss, batch, params, types, dropout, grads);
}

std::vector<std::vector<LabelId>> decode(std::span<const EncodedSentence> sentences, const ModelParams& params) {
  std::vector<std::vector<LabelId>> out(sentences.size());
  std::vector<std::exception_ptr> errors(sentences.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(sentences.size()); ++i) {
    try {
      const auto tape = encoder_forward(sentences[static_cast<std::size_t>(i)], params, nullptr);
      out[static_cast<std::size_t>(i)] = viterbi_decode(tape.log_probs, params[ParamId::Transition]).labels;
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace parallel

}  // namespace wltag
