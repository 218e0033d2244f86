#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wltag/labels.hpp"
#include "wltag/taxonomy.hpp"

namespace wltag {

// Anchor span [start, end) linking a mention to an entity id.
struct Anchor {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string entity;
};

struct AnchoredSentence {
  std::size_t id = 0;  // position in the corpus; keys per-sentence RNG streams
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<Anchor> anchors;

  // Throws ContractError on out-of-range, empty or overlapping spans.
  void validate() const;
};

// Anchor after type induction. type == nullopt marks an NT mention.
struct InducedAnchor {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string entity;
  std::optional<std::size_t> type;
  double probability = 0.0;  // p(ỹ | C(e)) from type induction
};

struct WeaklyLabeledSentence {
  std::size_t id = 0;
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<LabelId> labels;  // one weak label per token
  std::vector<InducedAnchor> anchors;
  double quality = 0.0;   // q
  double coverage = 0.0;  // n

  std::size_t size() const { return tokens.size(); }
  std::string span_text(std::size_t start, std::size_t end) const;
  // Index of the anchor covering position i, if any.
  std::optional<std::size_t> anchor_at(std::size_t i) const;
};

struct InductionWarnings {
  std::size_t missing_entities = 0;
};

WeaklyLabeledSentence induce_sentence_labels(const AnchoredSentence& s, const EntityCatalog& catalog,
                                             const TypeResolver& resolver, InductionWarnings* warnings = nullptr);

std::vector<WeaklyLabeledSentence> induce_corpus(const std::vector<AnchoredSentence>& corpus,
                                                 const EntityCatalog& catalog, const TypeResolver& resolver,
                                                 InductionWarnings* warnings = nullptr);

// p(type | span string): how often an anchored span resolved to each type.
// NT resolutions are a separate outcome, so per-span distributions include them.
class LinkPrior {
 public:
  explicit LinkPrior(std::size_t num_types = 0) : num_types_(num_types) {}

  void observe(const std::string& span, std::optional<std::size_t> type);
  // 0 for unseen spans.
  double probability(const std::string& span, std::optional<std::size_t> type) const;
  std::size_t num_spans() const { return counts_.size(); }
  std::size_t num_types() const { return num_types_; }
  const std::unordered_map<std::string, std::vector<std::size_t>>& counts() const { return counts_; }

 private:
  std::size_t num_types_;
  std::unordered_map<std::string, std::vector<std::size_t>> counts_;  // last slot = NT
};

LinkPrior estimate_link_prior(const std::vector<WeaklyLabeledSentence>& corpus, std::size_t num_types);

// q: mean over tokens of p(ỹ|C(e))·p(C(e)|span) for typed tokens, 0 otherwise.
double annotation_confidence(const WeaklyLabeledSentence& s, const LinkPrior& prior, const TypeSystem& types);
// n: fraction of tokens whose weak label lies in Y.
double annotation_coverage(const WeaklyLabeledSentence& s, const TypeSystem& types);

// Fills quality and coverage on every sentence (OpenMP over sentences).
void score_corpus(std::vector<WeaklyLabeledSentence>& corpus, const LinkPrior& prior, const TypeSystem& types);

struct SplitCorpus {
  std::vector<WeaklyLabeledSentence> high_quality;
  std::vector<WeaklyLabeledSentence> noisy;
  double theta_q = 0.0;
  double theta_n = 0.0;
};

// High quality iff q >= theta_q and n >= theta_n. Input order is kept in both lists.
SplitCorpus split_corpus(const std::vector<WeaklyLabeledSentence>& corpus, double theta_q, double theta_n);

struct WordStatistics {
  double entity_ratio = 0.0;
  double tf = 0.0;
  double df = 0.0;
};

struct CorpusStatistics {
  std::unordered_map<std::string, WordStatistics> words;
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;

  // Zeros for unseen words.
  WordStatistics lookup(const std::string& word) const;
};

// entity_ratio = in-anchor occurrences / occurrences; tf and df are divided by
// their corpus-wide maxima. Documents are keyed by doc_id.
CorpusStatistics compute_corpus_statistics(const std::vector<WeaklyLabeledSentence>& corpus);

enum class Partition { Train, Noisy, Validation, Test };
std::string_view partition_name(Partition p);
Partition parse_partition(std::string_view name);

struct DatasetPartition {
  std::vector<WeaklyLabeledSentence> train;  // high-quality remainder
  std::vector<WeaklyLabeledSentence> validation;
  std::vector<WeaklyLabeledSentence> test;
  std::vector<WeaklyLabeledSentence> noisy;  // classification pretraining only
};

// test: top quarter by q of the high-quality sentences whose coverage exceeds
// `test_min_coverage`; validation: seeded random quarter of the remaining
// high-quality sentences; train: the rest. Throws ConfigError when the
// high-quality set is empty.
DatasetPartition partition_datasets(const SplitCorpus& split, std::uint64_t seed, double test_min_coverage = 0.3);

}  // namespace wltag
