#include "wltag/sampling.hpp"

#include "wltag/error.hpp"
#include "wltag/rng.hpp"

namespace wltag {

void SamplingConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(alpha)) throw ConfigError("alpha must lie in [0, 1]");
  if (!unit(lambda1) || !unit(lambda2) || !unit(lambda3)) throw ConfigError("lambda weights must lie in [0, 1]");
}

NonEntityFeatures feature_scores(std::size_t position, const WeaklyLabeledSentence& sentence,
                                 const CorpusStatistics& stats, const TypeSystem& types) {
  if (position >= sentence.size()) throw ContractError("feature position out of range");
  if (sentence.labels[position] != types.unlabeled()) throw ContractError("features requested for a labeled position");

  NonEntityFeatures f;
  const bool left = position > 0 && sentence.anchor_at(position - 1).has_value();
  const bool right = position + 1 < sentence.size() && sentence.anchor_at(position + 1).has_value();
  f.adjoins_entity = (left || right) ? 1.0 : 0.0;
  const auto ws = stats.lookup(sentence.tokens[position]);
  f.entity_ratio = ws.entity_ratio;
  f.tf_df = ws.tf * ws.df;
  return f;
}

double sample_probability(const NonEntityFeatures& f, const SamplingConfig& config) {
  return config.alpha / 3.0 *
         (config.lambda1 * f.adjoins_entity + config.lambda2 * (1.0 - f.entity_ratio) + config.lambda3 * f.tf_df);
}

std::vector<std::size_t> apply_sampling(const WeaklyLabeledSentence& sentence, const CorpusStatistics& stats,
                                        const SamplingConfig& config, const TypeSystem& types, std::size_t epoch) {
  Rng rng(stream_seed(config.seed, {sentence.id, config.resample_each_epoch ? epoch : 0}));
  std::vector<std::size_t> sampled;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence.labels[i] != types.unlabeled()) continue;
    const double p = sample_probability(feature_scores(i, sentence, stats, types), config);
    if (rng.bernoulli(p)) sampled.push_back(i);
  }
  return sampled;
}

}  // namespace wltag
