#include "wltag/weak_data.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "wltag/error.hpp"
#include "wltag/rng.hpp"
#include "wltag/text.hpp"

namespace wltag {

void AnchoredSentence::validate() const {
  std::vector<const Anchor*> sorted;
  for (const auto& a : anchors) {
    if (a.start >= a.end) throw ContractError("anchor with start >= end in sentence " + std::to_string(id));
    if (a.end > tokens.size()) throw ContractError("anchor past sentence end in sentence " + std::to_string(id));
    sorted.push_back(&a);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->start < sorted[i - 1]->end)
      throw ContractError("overlapping anchors in sentence " + std::to_string(id));
}

std::string WeaklyLabeledSentence::span_text(std::size_t start, std::size_t end) const {
  return join(tokens, start, end);
}

std::optional<std::size_t> WeaklyLabeledSentence::anchor_at(std::size_t i) const {
  for (std::size_t k = 0; k < anchors.size(); ++k)
    if (anchors[k].start <= i && i < anchors[k].end) return k;
  return std::nullopt;
}

WeaklyLabeledSentence induce_sentence_labels(const AnchoredSentence& s, const EntityCatalog& catalog,
                                             const TypeResolver& resolver, InductionWarnings* warnings) {
  s.validate();
  const TypeSystem& ts = resolver.types();
  WeaklyLabeledSentence out;
  out.id = s.id;
  out.doc_id = s.doc_id;
  out.tokens = s.tokens;
  out.labels.assign(s.tokens.size(), ts.unlabeled());

  for (const auto& a : s.anchors) {
    InducedAnchor induced{a.start, a.end, a.entity, std::nullopt, 0.0};
    if (const auto* cats = catalog.categories(a.entity)) {
      const auto t = resolver.induce(std::span<const CategoryId>(*cats));
      induced.type = t.type;
      induced.probability = t.probability;
    } else if (warnings) {
      ++warnings->missing_entities;
    }
    for (std::size_t i = a.start; i < a.end; ++i) {
      const bool first = i == a.start;
      if (induced.type)
        out.labels[i] = first ? TypeSystem::begin(*induced.type) : TypeSystem::inside(*induced.type);
      else
        out.labels[i] = first ? ts.begin_untyped() : ts.inside_untyped();
    }
    out.anchors.push_back(std::move(induced));
  }
  std::sort(out.anchors.begin(), out.anchors.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

std::vector<WeaklyLabeledSentence> induce_corpus(const std::vector<AnchoredSentence>& corpus,
                                                 const EntityCatalog& catalog, const TypeResolver& resolver,
                                                 InductionWarnings* warnings) {
  std::vector<WeaklyLabeledSentence> out(corpus.size());
  std::vector<InductionWarnings> local(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = induce_sentence_labels(corpus[i], catalog, resolver, &local[i]);
  if (warnings)
    for (const auto& w : local) warnings->missing_entities += w.missing_entities;
  return out;
}

void LinkPrior::observe(const std::string& span, std::optional<std::size_t> type) {
  auto& c = counts_[span];
  if (c.empty()) c.assign(num_types_ + 1, 0);
  const std::size_t slot = type ? *type : num_types_;
  if (slot > num_types_) throw ContractError("link prior type index out of range");
  ++c[slot];
}

double LinkPrior::probability(const std::string& span, std::optional<std::size_t> type) const {
  auto it = counts_.find(span);
  if (it == counts_.end()) return 0.0;
  const auto& c = it->second;
  const std::size_t slot = type ? *type : num_types_;
  if (slot > num_types_) return 0.0;
  const std::size_t total = std::accumulate(c.begin(), c.end(), std::size_t{0});
  return static_cast<double>(c[slot]) / static_cast<double>(total);
}

LinkPrior estimate_link_prior(const std::vector<WeaklyLabeledSentence>& corpus, std::size_t num_types) {
  LinkPrior prior(num_types);
  for (const auto& s : corpus)
    for (const auto& a : s.anchors) prior.observe(s.span_text(a.start, a.end), a.type);
  return prior;
}

double annotation_confidence(const WeaklyLabeledSentence& s, const LinkPrior& prior, const TypeSystem& types) {
  if (s.tokens.empty()) throw ContractError("annotation confidence of an empty sentence");
  double sum = 0.0;
  for (const auto& a : s.anchors) {
    if (!a.type) continue;
    const double link = prior.probability(s.span_text(a.start, a.end), a.type);
    for (std::size_t i = a.start; i < a.end; ++i)
      if (types.is_typed(s.labels[i])) sum += a.probability * link;
  }
  return sum / static_cast<double>(s.tokens.size());
}

double annotation_coverage(const WeaklyLabeledSentence& s, const TypeSystem& types) {
  if (s.tokens.empty()) throw ContractError("annotation coverage of an empty sentence");
  const auto typed = std::count_if(s.labels.begin(), s.labels.end(), [&](LabelId y) { return types.is_typed(y); });
  return static_cast<double>(typed) / static_cast<double>(s.tokens.size());
}

void score_corpus(std::vector<WeaklyLabeledSentence>& corpus, const LinkPrior& prior, const TypeSystem& types) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    corpus[i].quality = annotation_confidence(corpus[i], prior, types);
    corpus[i].coverage = annotation_coverage(corpus[i], types);
  }
}

SplitCorpus split_corpus(const std::vector<WeaklyLabeledSentence>& corpus, double theta_q, double theta_n) {
  if (!(theta_q >= 0.0 && theta_q <= 1.0)) throw ConfigError("theta_q must lie in [0, 1]");
  if (!(theta_n >= 0.0 && theta_n <= 1.0)) throw ConfigError("theta_n must lie in [0, 1]");
  SplitCorpus out;
  out.theta_q = theta_q;
  out.theta_n = theta_n;
  for (const auto& s : corpus) {
    if (s.quality >= theta_q && s.coverage >= theta_n)
      out.high_quality.push_back(s);
    else
      out.noisy.push_back(s);
  }
  return out;
}

WordStatistics CorpusStatistics::lookup(const std::string& word) const {
  auto it = words.find(word);
  return it == words.end() ? WordStatistics{} : it->second;
}

CorpusStatistics compute_corpus_statistics(const std::vector<WeaklyLabeledSentence>& corpus) {
  struct Counts {
    std::size_t inside = 0;
    std::size_t total = 0;
    std::size_t docs = 0;
  };
  std::unordered_map<std::string, Counts> counts;
  CorpusStatistics stats;
  stats.sentence_count = corpus.size();

  // Document frequency counts distinct doc ids, which need not be contiguous.
  std::unordered_map<std::string, std::unordered_set<std::string>> docs_of;
  for (const auto& s : corpus) {
    std::vector<bool> inside(s.tokens.size(), false);
    for (const auto& a : s.anchors)
      for (std::size_t i = a.start; i < a.end && i < inside.size(); ++i) inside[i] = true;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      auto& c = counts[s.tokens[i]];
      ++c.total;
      if (inside[i]) ++c.inside;
      docs_of[s.tokens[i]].insert(s.doc_id);
    }
    stats.token_count += s.tokens.size();
  }

  std::size_t max_tf = 0, max_df = 0;
  for (auto& [w, c] : counts) {
    c.docs = docs_of[w].size();
    max_tf = std::max(max_tf, c.total);
    max_df = std::max(max_df, c.docs);
  }
  for (const auto& [w, c] : counts) {
    WordStatistics ws;
    ws.entity_ratio = static_cast<double>(c.inside) / static_cast<double>(c.total);
    ws.tf = static_cast<double>(c.total) / static_cast<double>(max_tf);
    ws.df = static_cast<double>(c.docs) / static_cast<double>(max_df);
    stats.words.emplace(w, ws);
  }
  return stats;
}

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Noisy: return "noisy";
    case Partition::Validation: return "validation";
    case Partition::Test: return "test";
  }
  return "train";
}

Partition parse_partition(std::string_view name) {
  if (name == "train") return Partition::Train;
  if (name == "noisy") return Partition::Noisy;
  if (name == "validation") return Partition::Validation;
  if (name == "test") return Partition::Test;
  throw FormatError("unknown partition: " + std::string(name));
}

DatasetPartition partition_datasets(const SplitCorpus& split, std::uint64_t seed, double test_min_coverage) {
  if (split.high_quality.empty())
    throw ConfigError("no high-quality sentences; relax theta_q / theta_n");
  const auto& hq = split.high_quality;

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < hq.size(); ++i)
    if (hq[i].coverage > test_min_coverage) eligible.push_back(i);
  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](std::size_t a, std::size_t b) { return hq[a].quality > hq[b].quality; });
  const std::size_t n_test = eligible.size() / 4;

  std::vector<bool> is_test(hq.size(), false);
  for (std::size_t k = 0; k < n_test; ++k) is_test[eligible[k]] = true;

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < hq.size(); ++i)
    if (!is_test[i]) rest.push_back(i);
  Rng rng(stream_seed(seed, {0x5157u}));
  std::vector<std::size_t> order = rest;
  rng.shuffle(order);
  const std::size_t n_val = rest.size() / 4;
  std::vector<bool> is_val(hq.size(), false);
  for (std::size_t k = 0; k < n_val; ++k) is_val[order[k]] = true;

  DatasetPartition out;
  for (std::size_t k = 0; k < n_test; ++k) out.test.push_back(hq[eligible[k]]);
  for (std::size_t i = 0; i < hq.size(); ++i) {
    if (is_test[i]) continue;
    (is_val[i] ? out.validation : out.train).push_back(hq[i]);
  }
  out.noisy = split.noisy;
  return out;
}

}  // namespace wltag
