#pragma once

// File-level stages behind the command-line tool. Each stage reads the files
// produced by the previous one, so the stages can be run independently.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "wltag/checkpoint.hpp"
#include "wltag/corpus_io.hpp"
#include "wltag/evaluation.hpp"
#include "wltag/training.hpp"

namespace wltag {

namespace fs = std::filesystem;

struct GenerateSummary {
  std::size_t sentences = 0;
  std::size_t typed_mentions = 0;
  std::size_t untyped_mentions = 0;
  std::size_t missing_entities = 0;
  std::size_t dropped_categories = 0;
};

// Anchored corpus + taxonomy + Γ + catalog -> weak corpus. When `types` is
// empty the type order follows the Γ file.
GenerateSummary run_generate(const fs::path& corpus, const fs::path& taxonomy, const fs::path& gamma,
                             const fs::path& catalog, const std::vector<std::string>& types, const fs::path& out);

struct SplitOptions {
  double theta_q = 0.1;
  double theta_n = 0.1;
  std::uint64_t seed = 11;
  double test_min_coverage = 0.3;
};

struct SplitSummary {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
  std::size_t noisy = 0;
};

// Scores and partitions a weak corpus into out_dir/split.conll + out_dir/split.json.
SplitSummary run_split(const fs::path& weak, const fs::path& out_dir, const SplitOptions& options);

struct LoadedSplit {
  TypeSystem types;
  std::vector<WeaklyLabeledSentence> sentences;  // corpus order
  DatasetPartition parts;
};

LoadedSplit load_split(const fs::path& split_dir);

struct ModelOptions {
  EncoderDims dims;
  SamplingConfig sampling;
  TrainingConfig training;
  std::optional<fs::path> embeddings;  // word2vec-style text vectors
};

struct StageResult {
  Checkpoint checkpoint;
  TrainingReport report;
  std::optional<double> test_f1;  // against weak labels of the test partition
};

// Fresh model (vocabulary from the whole split) trained on the noisy partition.
StageResult run_pretrain(const fs::path& split_dir, const ModelOptions& options);

// Partial-CRF fine-tuning. Starts from `init` when given, else from a fresh
// model built exactly as run_pretrain would build it.
StageResult run_train(const fs::path& split_dir, const std::optional<fs::path>& init, const ModelOptions& options);

nlohmann::json stage_report_json(const StageResult& result, bool include_timing = true);

struct TagSummary {
  std::size_t sentences = 0;
  std::size_t truncated = 0;
};

// Labels every sentence with Viterbi over the checkpoint. Input labels, if
// present, must belong to the checkpoint's label set. Tokens past the length
// cap are labeled O.
std::vector<ConllSentence> tag_sentences(const Checkpoint& ckpt, const std::vector<ConllSentence>& input,
                                         bool parallel = true, TagSummary* summary = nullptr);

TagSummary run_tag(const fs::path& model, const fs::path& input, const fs::path& output, bool parallel = true);

// Tokens of gold and prediction must agree sentence by sentence.
EvalResult evaluate_conll(const std::vector<ConllSentence>& gold, const std::vector<ConllSentence>& predicted);
EvalResult run_eval(const fs::path& gold, const fs::path& predicted);

nlohmann::json eval_json(const EvalResult& result);

}  // namespace wltag
