#pragma once

#include <cstdint>
#include <vector>

#include "wltag/weak_data.hpp"

namespace wltag {

// Non-entity sampling knobs. Defaults: alpha = 0.9, lambda = (0, 0.9, 0.1).
struct SamplingConfig {
  double alpha = 0.9;
  double lambda1 = 0.0;
  double lambda2 = 0.9;
  double lambda3 = 0.1;
  std::uint64_t seed = 17;
  bool resample_each_epoch = false;

  void validate() const;
};

struct NonEntityFeatures {
  double adjoins_entity = 0.0;  // f1
  double entity_ratio = 0.0;    // f2
  double tf_df = 0.0;           // f3
};

// Throws ContractError unless the position carries UN.
NonEntityFeatures feature_scores(std::size_t position, const WeaklyLabeledSentence& sentence,
                                 const CorpusStatistics& stats, const TypeSystem& types);

// p(O) = alpha/3 · (λ1·f1 + λ2·(1 − f2) + λ3·f3)
double sample_probability(const NonEntityFeatures& f, const SamplingConfig& config);

// Bernoulli draw per UN position; the stream is keyed by
// (seed, sentence id, epoch if resampling else 0). Returns sorted positions.
std::vector<std::size_t> apply_sampling(const WeaklyLabeledSentence& sentence, const CorpusStatistics& stats,
                                        const SamplingConfig& config, const TypeSystem& types, std::size_t epoch = 0);

}  // namespace wltag
