#include "wltag/synth.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

#include "wltag/error.hpp"
#include "wltag/rng.hpp"

namespace wltag {

namespace {

const std::vector<std::string> kFunctionWords{"the", "a", "of", "and", "to", "in", "is", "was", "on", "for", "with", "by"};
const std::vector<std::string> kOnsets{"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
const std::vector<std::string> kVowels{"a", "e", "i", "o", "u"};

// Per-type surface material. Types beyond the third reuse the pools with a
// numbered suffix so names stay disjoint across types.
struct TypeStyle {
  std::vector<std::string> cues;
  std::vector<std::string> trailers;
  std::vector<std::string> name_endings;
  std::string root;
};

TypeStyle style_for(std::size_t t, const std::string& type) {
  static const std::vector<TypeStyle> base{
      {{"mr", "dr", "minister", "captain", "professor"}, {"said", "argued"}, {"ov", "ina", "ez"}, "People"},
      {{"near", "visited", "across", "toward", "outside"}, {"city", "region"}, {"ville", "burg", "stan"}, "Places"},
      {{"joined", "acquired", "shares", "sued", "hired"}, {"inc", "group"}, {"corp", "tek", "ex"}, "Organizations"},
  };
  TypeStyle s = base[t % base.size()];
  if (t >= base.size()) {
    const std::string tag = std::to_string(t / base.size());
    for (auto& w : s.cues) w += tag;
    for (auto& w : s.trailers) w += tag;
    for (auto& w : s.name_endings) w += tag;
  }
  s.root = s.root + "_" + type;
  return s;
}

std::string syllables(Rng& rng, std::size_t n) {
  std::string w;
  for (std::size_t i = 0; i < n; ++i) w += kOnsets[rng.below(kOnsets.size())] + kVowels[rng.below(kVowels.size())];
  return w;
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

struct Entity {
  std::string id;
  std::size_t type = 0;
  std::vector<std::string> tokens;
};

struct Mention {
  std::size_t start = 0, end = 0, entity = 0;
};

}  // namespace

void SynthSpec::validate() const {
  if (types.empty()) throw ConfigError("synthetic corpus needs at least one type");
  if (filler_words == 0 || entities_per_type == 0) throw ConfigError("filler and entity pools must be non-empty");
  if (sentences_per_doc == 0) throw ConfigError("sentences_per_doc must be positive");
  for (double r : {anchor_drop_rate, untyped_rate, noisy_category_rate})
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("synthetic corpus rates must lie in [0, 1]");
}

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec) {
  spec.validate();
  (void)TypeSystem::build(spec.types);  // rejects duplicates
  SynthCorpus out;
  out.types = spec.types;
  const std::size_t K = spec.types.size();

  Rng lex(stream_seed(spec.seed, {0x11}));
  std::set<std::string> used(kFunctionWords.begin(), kFunctionWords.end());
  std::vector<TypeStyle> styles;
  for (std::size_t t = 0; t < K; ++t) {
    styles.push_back(style_for(t, spec.types[t]));
    for (const auto& w : styles.back().cues) used.insert(w);
    for (const auto& w : styles.back().trailers) used.insert(w);
  }

  std::vector<std::string> fillers;
  while (fillers.size() < spec.filler_words) {
    std::string w = syllables(lex, 2 + lex.below(2));
    if (used.insert(w).second) fillers.push_back(std::move(w));
  }

  // Taxonomy: root -> 3 groups -> 3 leaves per type, plus one back edge that
  // makes a cycle. Stray categories are never reachable from a root.
  std::vector<std::vector<std::string>> leaves(K);
  for (std::size_t t = 0; t < K; ++t) {
    const std::string& root = styles[t].root;
    for (std::size_t g = 0; g < 3; ++g) {
      const std::string group = root + "_g" + std::to_string(g);
      out.taxonomy_edges.emplace_back(root, group);
      for (std::size_t l = 0; l < 3; ++l) {
        const std::string leaf = group + "_l" + std::to_string(l);
        out.taxonomy_edges.emplace_back(group, leaf);
        leaves[t].push_back(leaf);
      }
    }
    out.taxonomy_edges.emplace_back(leaves[t].back(), root + "_g0");
    out.gamma.emplace_back(spec.types[t], root);
  }
  out.taxonomy_edges.emplace_back("Stray_topics", "Stray_topics_misc");

  std::vector<Entity> entities;
  std::vector<std::vector<std::size_t>> by_type(K);
  for (std::size_t t = 0; t < K; ++t) {
    std::set<std::string> names;
    for (std::size_t k = 0; k < spec.entities_per_type; ++k) {
      Entity e;
      e.id = "E_" + spec.types[t] + "_" + std::to_string(k);
      e.type = t;
      const double r = lex.uniform();
      const std::size_t len = r < 0.6 ? 1 : (r < 0.9 ? 2 : 3);
      std::string joined;
      do {
        e.tokens.clear();
        for (std::size_t i = 0; i < len; ++i) {
          std::string w = capitalize(syllables(lex, 1 + lex.below(2)));
          if (i + 1 == len) w += styles[t].name_endings[lex.below(styles[t].name_endings.size())];
          e.tokens.push_back(std::move(w));
        }
        joined.clear();
        for (const auto& w : e.tokens) joined += w + " ";
      } while (!names.insert(joined).second);

      CatalogEntry cat{e.id, {}};
      if (lex.uniform() >= spec.untyped_rate) {
        const std::size_t ncat = 1 + lex.below(2);
        for (std::size_t c = 0; c < ncat; ++c) cat.categories.push_back(leaves[t][lex.below(leaves[t].size())]);
        if (K > 1 && lex.uniform() < spec.noisy_category_rate) {
          // Keep the true type ahead: two own categories against one foreign.
          if (cat.categories.size() < 2) cat.categories.push_back(leaves[t][lex.below(leaves[t].size())]);
          const std::size_t other = (t + 1 + lex.below(K - 1)) % K;
          cat.categories.push_back(leaves[other][lex.below(leaves[other].size())]);
        }
        if (lex.uniform() < 0.1) cat.categories.push_back(lex.uniform() < 0.5 ? "Stray_topics_misc" : "Unknown_stub");
      } else {
        cat.categories.push_back("Stray_topics_misc");
      }
      by_type[t].push_back(entities.size());
      entities.push_back(std::move(e));
      out.catalog.push_back(std::move(cat));
    }
  }

  std::set<std::string> vocab(used);
  vocab.insert(fillers.begin(), fillers.end());
  for (const auto& e : entities) vocab.insert(e.tokens.begin(), e.tokens.end());
  out.vocabulary_size = vocab.size();

  auto make_sentence = [&](Rng& rng, std::vector<std::string>& tokens, std::vector<Mention>& mentions) {
    auto filler = [&] {
      if (rng.uniform() < 0.4) return kFunctionWords[rng.below(kFunctionWords.size())];
      return fillers[rng.below(fillers.size())];
    };
    const std::size_t slots = 1 + rng.below(3);
    for (std::size_t m = 0; m < slots; ++m) {
      for (std::size_t f = rng.below(4); f > 0; --f) tokens.push_back(filler());
      const std::size_t t = rng.below(K);
      const std::size_t e = by_type[t][rng.below(by_type[t].size())];
      if (rng.uniform() < 0.85) tokens.push_back(styles[t].cues[rng.below(styles[t].cues.size())]);
      Mention mention{tokens.size(), 0, e};
      for (const auto& w : entities[e].tokens) tokens.push_back(w);
      mention.end = tokens.size();
      mentions.push_back(mention);
      if (rng.uniform() < 0.3) tokens.push_back(styles[t].trailers[rng.below(styles[t].trailers.size())]);
    }
    for (std::size_t f = 1 + rng.below(3); f > 0; --f) tokens.push_back(filler());
  };

  auto gold_labels = [&](std::size_t n, const std::vector<Mention>& mentions) {
    std::vector<std::string> labels(n, "O");
    for (const auto& m : mentions) {
      const std::string& type = spec.types[entities[m.entity].type];
      labels[m.start] = "B-" + type;
      for (std::size_t i = m.start + 1; i < m.end; ++i) labels[i] = "I-" + type;
    }
    return labels;
  };

  Rng gen(stream_seed(spec.seed, {0x22}));
  for (std::size_t k = 0; k < spec.sentences; ++k) {
    AnchoredSentence s;
    s.id = k;
    s.doc_id = "doc" + std::to_string(k / spec.sentences_per_doc);
    std::vector<Mention> mentions;
    make_sentence(gen, s.tokens, mentions);
    for (const auto& m : mentions) {
      ++out.mentions;
      if (gen.uniform() < spec.anchor_drop_rate) {
        ++out.dropped_mentions;
        continue;
      }
      s.anchors.push_back({m.start, m.end, entities[m.entity].id});
    }
    out.corpus_gold.push_back({s.tokens, gold_labels(s.tokens.size(), mentions)});
    out.corpus.push_back(std::move(s));
  }

  Rng held(stream_seed(spec.seed, {0x33}));
  for (std::size_t k = 0; k < spec.heldout; ++k) {
    ConllSentence c;
    std::vector<Mention> mentions;
    make_sentence(held, c.tokens, mentions);
    c.labels = gold_labels(c.tokens.size(), mentions);
    out.heldout.push_back(std::move(c));
  }
  return out;
}

void write_synthetic_corpus(const SynthCorpus& synth, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("corpus.jsonl");
    write_anchored_corpus(f, synth.corpus);
  }
  {
    auto f = open("taxonomy.tsv");
    for (const auto& [p, c] : synth.taxonomy_edges) f << p << '\t' << c << '\n';
  }
  {
    auto f = open("gamma.tsv");
    for (const auto& [t, r] : synth.gamma) f << t << '\t' << r << '\n';
  }
  {
    auto f = open("catalog.jsonl");
    for (const auto& e : synth.catalog) f << nlohmann::json{{"id", e.id}, {"categories", e.categories}}.dump() << '\n';
  }
  {
    auto f = open("corpus_gold.conll");
    write_conll(f, synth.corpus_gold);
  }
  {
    auto f = open("heldout.conll");
    write_conll(f, synth.heldout);
  }
}

}  // namespace wltag
