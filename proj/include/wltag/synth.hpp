#pragma once

// Synthetic anchored corpus with known gold labels. Sentences come from a small
// template grammar: filler and function words around typed mention slots, each
// slot usually preceded by a type-specific cue word. Entity names are built
// from type-specific syllables. A fraction `anchor_drop_rate` of mentions is
// left without an anchor, which is the missing-label noise the tagger must
// tolerate.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wltag/corpus_io.hpp"
#include "wltag/labels.hpp"
#include "wltag/weak_data.hpp"

namespace wltag {

struct SynthSpec {
  std::vector<std::string> types{"PER", "LOC", "ORG"};
  std::size_t filler_words = 150;
  std::size_t entities_per_type = 30;
  std::size_t sentences = 2000;
  std::size_t heldout = 200;
  std::size_t sentences_per_doc = 10;
  double anchor_drop_rate = 0.3;
  double untyped_rate = 0.03;      // entities with no categories (NT)
  double noisy_category_rate = 0.1;  // entities with one category from another type
  std::uint64_t seed = 7;

  void validate() const;
};

struct CatalogEntry {
  std::string id;
  std::vector<std::string> categories;
};

struct SynthCorpus {
  std::vector<std::string> types;
  std::vector<std::pair<std::string, std::string>> taxonomy_edges;
  std::vector<std::pair<std::string, std::string>> gamma;
  std::vector<CatalogEntry> catalog;
  std::vector<AnchoredSentence> corpus;
  std::vector<ConllSentence> corpus_gold;  // full BIO for every corpus sentence
  std::vector<ConllSentence> heldout;      // gold-labeled, never anchored
  std::size_t mentions = 0;
  std::size_t dropped_mentions = 0;
  std::size_t vocabulary_size = 0;
};

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec);

// Writes corpus.jsonl, taxonomy.tsv, gamma.tsv, catalog.jsonl, corpus_gold.conll
// and heldout.conll into dir (created if needed).
void write_synthetic_corpus(const SynthCorpus& synth, const std::filesystem::path& dir);

}  // namespace wltag
