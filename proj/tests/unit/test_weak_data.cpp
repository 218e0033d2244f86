#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "wltag/error.hpp"
#include "wltag/weak_data.hpp"

using namespace wltag;
using fixtures::weak_sentence;

namespace {

struct World {
  TypeSystem types = fixtures::per_loc_org();
  TaxonomyGraph taxonomy;
  GammaMapping gamma;
  EntityCatalog catalog;

  World() {
    taxonomy.add_edge("Organizations", "Basketball teams");
    taxonomy.add_edge("Locations", "Cities");
    taxonomy.add_edge("People", "Athletes");
    gamma.set("PER", "People");
    gamma.set("LOC", "Locations");
    gamma.set("ORG", "Organizations");
    catalog.add("Shell", {taxonomy.id("Basketball teams")});
    catalog.add("Manila", {taxonomy.id("Cities")});
    catalog.add("Orphan", {});
  }
};

AnchoredSentence anchored(std::vector<std::string> tokens, std::vector<Anchor> anchors) {
  AnchoredSentence s;
  s.tokens = std::move(tokens);
  s.anchors = std::move(anchors);
  return s;
}

}  // namespace

TEST_CASE("anchors become B/I labels of the induced type") {
  World w;
  const TypeResolver resolver(w.types, w.taxonomy, w.gamma);
  auto s = anchored({"He", "joined", "Formula", "Shell", "in", "Manila"}, {{2, 4, "Shell"}, {5, 6, "Manila"}});
  const auto weak = induce_sentence_labels(s, w.catalog, resolver);
  CHECK(weak.labels == fixtures::labels_from(w.types, {"UN", "UN", "B-ORG", "I-ORG", "UN", "B-LOC"}));
  REQUIRE(weak.anchors.size() == 2);
  CHECK(weak.anchors[0].type == 2u);
  CHECK(weak.anchors[0].probability == 1.0);

  const auto none = induce_sentence_labels(anchored({"a", "b"}, {}), w.catalog, resolver);
  CHECK(none.labels == fixtures::labels_from(w.types, {"UN", "UN"}));

  const auto nt = induce_sentence_labels(anchored({"x", "Big", "Orphan"}, {{1, 3, "Orphan"}}), w.catalog, resolver);
  CHECK(nt.labels == fixtures::labels_from(w.types, {"UN", "B-NT", "I-NT"}));
  CHECK_FALSE(nt.anchors[0].type.has_value());

  InductionWarnings warn;
  const auto missing =
      induce_sentence_labels(anchored({"Ghost", "Town"}, {{0, 2, "Ghost"}}), w.catalog, resolver, &warn);
  CHECK(missing.labels == fixtures::labels_from(w.types, {"B-NT", "I-NT"}));
  CHECK(warn.missing_entities == 1);
}

TEST_CASE("anchored sentence validation") {
  CHECK_THROWS_AS(anchored({"a", "b"}, {{0, 3, "e"}}).validate(), ContractError);
  CHECK_THROWS_AS(anchored({"a", "b"}, {{1, 1, "e"}}).validate(), ContractError);
  CHECK_THROWS_AS(anchored({"a", "b", "c"}, {{0, 2, "e"}, {1, 3, "f"}}).validate(), ContractError);
  CHECK_NOTHROW(anchored({"a", "b", "c"}, {{0, 1, "e"}, {1, 3, "f"}}).validate());
}

TEST_CASE("link prior is relative span frequency") {
  LinkPrior prior(3);
  for (int i = 0; i < 3; ++i) prior.observe("Ginebra", 2);
  prior.observe("Ginebra", 1);
  prior.observe("Once", 0);
  CHECK(prior.probability("Ginebra", 2) == 0.75);
  CHECK(prior.probability("Ginebra", 1) == 0.25);
  CHECK(prior.probability("Once", 0) == 1.0);
  CHECK(prior.probability("Never", 0) == 0.0);

  const auto types = fixtures::per_loc_org();
  std::vector<WeaklyLabeledSentence> corpus{
      weak_sentence(types, {"Big", "Apple", "x"}, {"B-LOC", "I-LOC", "UN"}),
      weak_sentence(types, {"Big", "Apple"}, {"B-ORG", "I-ORG"}),
      weak_sentence(types, {"Big", "Apple"}, {"B-NT", "I-NT"}),
  };
  const auto est = estimate_link_prior(corpus, 3);
  for (const auto& [span, counts] : est.counts()) {
    double total = 0.0;
    for (std::size_t t = 0; t < 3; ++t) total += est.probability(span, t);
    total += est.probability(span, std::nullopt);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(est.probability("Big Apple", 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("confidence and coverage examples") {
  const auto types = fixtures::per_loc_org();
  auto s = weak_sentence(types, {"Formula", "Shell", "won", "again"}, {"B-ORG", "I-ORG", "UN", "UN"});
  LinkPrior prior(3);
  for (int i = 0; i < 4; ++i) prior.observe("Formula Shell", 2);
  prior.observe("Formula Shell", 1);
  CHECK(annotation_confidence(s, prior, types) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(annotation_coverage(s, types) == 0.5);

  auto un = weak_sentence(types, {"a", "b"}, {"UN", "UN"});
  CHECK(annotation_confidence(un, prior, types) == 0.0);
  CHECK(annotation_coverage(un, types) == 0.0);

  std::vector<std::string> ten(10, "w"), labels(10, "UN");
  labels[0] = "B-PER";
  labels[1] = "I-PER";
  labels[5] = "B-LOC";
  labels[8] = "B-ORG";
  CHECK(annotation_coverage(weak_sentence(types, ten, labels), types) == 0.4);
  CHECK(annotation_coverage(weak_sentence(types, {"a", "b", "c", "d", "e"},
                                          {"B-PER", "I-PER", "B-LOC", "B-ORG", "I-ORG"}),
                            types) == 1.0);
  // NT tokens count in neither score.
  CHECK(annotation_coverage(weak_sentence(types, {"a", "b"}, {"B-NT", "I-NT"}), types) == 0.0);

  WeaklyLabeledSentence empty;
  CHECK_THROWS_AS(annotation_coverage(empty, types), ContractError);
  CHECK_THROWS_AS(annotation_confidence(empty, prior, types), ContractError);
}

TEST_CASE("q never exceeds n and matches a direct recomputation") {
  const auto types = fixtures::per_loc_org();
  Rng rng(21);
  const std::vector<std::string> words{"Alpha", "Beta", "Gamma", "Delta"};
  std::vector<WeaklyLabeledSentence> corpus;
  for (std::size_t k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<std::string> tokens, labels;
    while (tokens.size() < n) {
      const std::size_t kind = rng.below(5);
      const std::size_t len = 1 + rng.below(2);
      if (kind < 2 || tokens.size() + len > n) {
        tokens.push_back("w");
        labels.push_back("UN");
        continue;
      }
      const std::string tag = kind == 4 ? "NT" : types.type_name(rng.below(3));
      for (std::size_t i = 0; i < len; ++i) {
        tokens.push_back(words[rng.below(words.size())]);
        labels.push_back((i == 0 ? "B-" : "I-") + tag);
      }
    }
    auto s = weak_sentence(types, tokens, labels, k);
    for (auto& a : s.anchors) a.probability = a.type ? rng.uniform() : 0.0;
    corpus.push_back(std::move(s));
  }
  const auto prior = estimate_link_prior(corpus, 3);
  score_corpus(corpus, prior, types);
  for (const auto& s : corpus) {
    double expect_q = 0.0, expect_n = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!types.is_typed(s.labels[i]) || s.labels[i] == TypeSystem::outside()) continue;
      const auto a = *s.anchor_at(i);
      expect_q += s.anchors[a].probability * prior.probability(s.span_text(s.anchors[a].start, s.anchors[a].end),
                                                               s.anchors[a].type);
      expect_n += 1.0;
    }
    expect_q /= static_cast<double>(s.size());
    expect_n /= static_cast<double>(s.size());
    CHECK(s.quality == doctest::Approx(expect_q).epsilon(1e-12));
    CHECK(s.coverage == expect_n);
    CHECK(s.quality >= 0.0);
    CHECK(s.quality <= s.coverage + 1e-15);
    CHECK(s.coverage <= 1.0);
  }
}

TEST_CASE("split thresholds") {
  const auto types = fixtures::per_loc_org();
  auto a = weak_sentence(types, {"x"}, {"UN"}, 0);
  a.quality = 0.15;
  a.coverage = 0.95;
  auto b = weak_sentence(types, {"y"}, {"UN"}, 1);
  b.quality = 0.15;
  b.coverage = 0.05;
  const std::vector<WeaklyLabeledSentence> corpus{a, b};
  const auto split = split_corpus(corpus, 0.1, 0.9);
  REQUIRE(split.high_quality.size() == 1);
  CHECK(split.high_quality[0].id == 0);
  REQUIRE(split.noisy.size() == 1);
  CHECK(split.noisy[0].id == 1);

  const auto loose = split_corpus(corpus, 0.0, 0.0);
  CHECK(loose.high_quality.size() == 2);
  CHECK(loose.noisy.empty());

  CHECK_THROWS_AS(split_corpus(corpus, -0.1, 0.5), ConfigError);
  CHECK_THROWS_AS(split_corpus(corpus, 0.1, 1.5), ConfigError);
}

TEST_CASE("corpus statistics") {
  const auto types = fixtures::per_loc_org();
  std::vector<WeaklyLabeledSentence> corpus{
      weak_sentence(types, {"Paris", "and", "Paris"}, {"B-LOC", "UN", "B-LOC"}, 0, "d1"),
      weak_sentence(types, {"Paris", "and", "and"}, {"B-LOC", "UN", "UN"}, 1, "d1"),
      weak_sentence(types, {"Paris", "and"}, {"UN", "UN"}, 2, "d2"),
  };
  const auto stats = compute_corpus_statistics(corpus);
  CHECK(stats.lookup("Paris").entity_ratio == 0.75);
  CHECK(stats.lookup("and").entity_ratio == 0.0);
  CHECK(stats.lookup("and").tf == 1.0);  // 4 occurrences, the most frequent word
  CHECK(stats.lookup("Paris").tf == 1.0);
  CHECK(stats.lookup("and").df == 1.0);
  CHECK(stats.lookup("absent").tf == 0.0);
  CHECK(stats.lookup("absent").df == 0.0);
  CHECK(stats.lookup("absent").entity_ratio == 0.0);
  CHECK(stats.sentence_count == 3);
  CHECK(stats.token_count == 8);

  corpus.push_back(weak_sentence(types, {"rare"}, {"UN"}, 3, "d3"));
  const auto more = compute_corpus_statistics(corpus);
  CHECK(more.lookup("rare").tf == 0.25);
  CHECK(more.lookup("rare").df == 0.5);  // 1 of the 2 docs "and" appears in
}

TEST_CASE("dataset partition") {
  const auto types = fixtures::per_loc_org();
  SplitCorpus split;
  Rng rng(8);
  for (std::size_t k = 0; k < 100; ++k) {
    auto s = weak_sentence(types, {"t"}, {"UN"}, k);
    s.coverage = k < 60 ? 0.31 + 0.005 * static_cast<double>(k) : 0.3;
    s.quality = rng.uniform(0.0, 0.3);
    split.high_quality.push_back(s);
  }
  split.high_quality[99].quality = 0.99;  // highest q, but n = 0.3 is not above the bar
  split.noisy.push_back(weak_sentence(types, {"n"}, {"UN"}, 100));

  const auto parts = partition_datasets(split, 3);
  CHECK(parts.test.size() == 15);
  CHECK(parts.validation.size() == 21);
  CHECK(parts.train.size() == 64);
  CHECK(parts.noisy.size() == 1);

  std::vector<double> eligible_q;
  for (std::size_t k = 0; k < 60; ++k) eligible_q.push_back(split.high_quality[k].quality);
  std::sort(eligible_q.rbegin(), eligible_q.rend());
  std::set<std::size_t> seen;
  for (const auto& s : parts.test) {
    CHECK(s.coverage > 0.3);
    CHECK(s.quality >= eligible_q[14]);
    CHECK(s.id != 99);
  }
  for (const auto* set : {&parts.test, &parts.validation, &parts.train})
    for (const auto& s : *set) CHECK(seen.insert(s.id).second);
  CHECK(seen.size() == 100);

  const auto again = partition_datasets(split, 3);
  auto ids = [](const std::vector<WeaklyLabeledSentence>& v) {
    std::vector<std::size_t> out;
    for (const auto& s : v) out.push_back(s.id);
    return out;
  };
  CHECK(ids(again.validation) == ids(parts.validation));
  CHECK(ids(again.test) == ids(parts.test));
  CHECK(ids(partition_datasets(split, 4).validation) != ids(parts.validation));

  SplitCorpus empty;
  empty.noisy = split.noisy;
  CHECK_THROWS_AS(partition_datasets(empty, 1), ConfigError);
}
