#pragma once

// Two-stage training: classification pretraining on the noisy portion, then
// Partial-CRF fine-tuning of the same parameters on the high-quality portion.

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "wltag/batch.hpp"
#include "wltag/optim.hpp"
#include "wltag/params.hpp"
#include "wltag/sampling.hpp"
#include "wltag/weak_data.hpp"

namespace wltag {

struct TrainingConfig {
  AdamConfig adam;
  std::size_t batch_size_classification = 64;
  std::size_t batch_size_sequence = 32;
  std::size_t max_epochs_pretrain = 20;
  std::size_t max_epochs_finetune = 50;
  std::size_t patience = 5;
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 2;
  std::uint64_t dropout_seed = 3;
  bool dropout = true;
  bool parallel = true;  // OpenMP kernels; false runs the serial reference

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean per sentence
  std::optional<double> validation_f1;
};

struct StageReport {
  std::string stage;
  bool skipped = false;
  std::string note;
  std::size_t sentences = 0;
  std::size_t steps = 0;
  std::vector<EpochRecord> epochs;
  std::optional<std::size_t> selected_epoch;
  double wall_clock_seconds = 0.0;
};

struct TrainingReport {
  std::vector<StageReport> stages;

  // Timing is excluded when include_timing is false so seeded runs compare equal.
  nlohmann::json to_json(bool include_timing = true) const;
};

// Stop after `patience` consecutive evaluations that do not beat the best so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when the score is a new best.
  bool update(double score);
  bool should_stop() const { return patience_ > 0 && bad_rounds_ >= patience_; }
  std::size_t best_round() const { return best_round_; }  // 1-based, 0 before any update
  double best_score() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t rounds_ = 0;
  std::size_t bad_rounds_ = 0;
  std::size_t best_round_ = 0;
  double best_ = -1.0;
};

// Everything the trainers need besides the parameters.
struct TrainingContext {
  const TypeSystem* types = nullptr;
  const Vocabulary* vocab = nullptr;
  const CorpusStatistics* stats = nullptr;
  SamplingConfig sampling;
  TrainingConfig config;
};

Vocabulary build_vocabulary(const std::vector<WeaklyLabeledSentence>& sentences);

std::vector<TrainingExample> make_examples(const std::vector<WeaklyLabeledSentence>& sentences,
                                           const TrainingContext& ctx, std::size_t epoch);

// Weak labels as evaluation targets: typed labels kept, everything else O.
std::vector<std::string> weak_as_gold(const WeaklyLabeledSentence& s, const TypeSystem& types);

// Decodes sentences and scores them against their weak labels.
double validation_f1(const std::vector<WeaklyLabeledSentence>& sentences, const ModelParams& params,
                     const TrainingContext& ctx);

// Minimizes the classification loss on `noisy`; the transition matrix is frozen.
// An empty set skips the stage and leaves params untouched.
StageReport pretrain_classifier(const std::vector<WeaklyLabeledSentence>& noisy, ModelParams& params,
                                const TrainingContext& ctx);

// Minimizes the Partial-CRF loss on `train`, evaluating on `validation` after each
// epoch. On return params hold the best-validation epoch. Throws ConfigError
// when `train` is empty.
StageReport finetune_sequence(const std::vector<WeaklyLabeledSentence>& train,
                              const std::vector<WeaklyLabeledSentence>& validation, ModelParams& params,
                              const TrainingContext& ctx);

}  // namespace wltag
