#pragma once

// Readers and writers for the on-disk corpus formats:
//   anchored corpus   JSON lines {"doc_id", "tokens", "anchors": [{"start", "end", "entity"}]}
//   weak corpus       JSON lines; first line {"format": "wltag-weak", "version": 1, "types": [...]},
//                     then one induced sentence per line
//   CoNLL             token<TAB>label per line, blank line between sentences
//   split sidecar     JSON {"types", "theta_q", "theta_n", "sentences": [{"id", "doc_id", "q", "n", "partition"}]}

#include <iosfwd>
#include <string>
#include <vector>

#include "wltag/labels.hpp"
#include "wltag/weak_data.hpp"

namespace wltag {

std::vector<AnchoredSentence> read_anchored_corpus(std::istream& in);
void write_anchored_corpus(std::ostream& out, const std::vector<AnchoredSentence>& corpus);

struct WeakCorpus {
  TypeSystem types;
  std::vector<WeaklyLabeledSentence> sentences;
};

WeakCorpus read_weak_corpus(std::istream& in);
void write_weak_corpus(std::ostream& out, const TypeSystem& types, const std::vector<WeaklyLabeledSentence>& sentences);

struct ConllSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;  // empty when the file carries tokens only
};

// The label is the last tab-separated column when a line has two or more.
std::vector<ConllSentence> read_conll(std::istream& in);
void write_conll(std::ostream& out, const std::vector<ConllSentence>& sentences);

std::vector<ConllSentence> to_conll(const std::vector<WeaklyLabeledSentence>& sentences, const TypeSystem& types);

struct SplitRecord {
  std::size_t id = 0;
  std::string doc_id;
  double quality = 0.0;
  double coverage = 0.0;
  Partition partition = Partition::Train;
};

struct SplitSidecar {
  std::vector<std::string> types;
  double theta_q = 0.0;
  double theta_n = 0.0;
  std::vector<SplitRecord> sentences;
};

void write_split_sidecar(std::ostream& out, const SplitSidecar& sidecar);
SplitSidecar read_split_sidecar(std::istream& in);

// Re-joins a split CoNLL file with its sidecar. Anchors are reconstructed from
// the B-/I- runs (typed and NT) of the weak labels.
std::vector<WeaklyLabeledSentence> join_split(const std::vector<ConllSentence>& conll, const SplitSidecar& sidecar,
                                              const TypeSystem& types);

}  // namespace wltag
