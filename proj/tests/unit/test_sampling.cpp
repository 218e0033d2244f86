#include <doctest.h>

#include "fixtures.hpp"
#include "wltag/error.hpp"
#include "wltag/sampling.hpp"

using namespace wltag;
using fixtures::weak_sentence;

TEST_CASE("probability arithmetic") {
  const SamplingConfig defaults;
  CHECK(sample_probability({1.0, 1.0, 0.0}, defaults) == 0.0);
  CHECK(sample_probability({0.0, 0.0, 1.0}, defaults) == doctest::Approx(0.3).epsilon(1e-15));
  SamplingConfig off = defaults;
  off.alpha = 0.0;
  Rng rng(3);
  for (int i = 0; i < 100; ++i)
    CHECK(sample_probability({rng.uniform(), rng.uniform(), rng.uniform()}, off) == 0.0);
  SamplingConfig all{1.0, 1.0, 1.0, 1.0, 5, false};
  CHECK(sample_probability({1.0, 0.0, 1.0}, all) == 1.0);
}

TEST_CASE("probability bounds and monotonicity under fuzzing") {
  Rng rng(12);
  for (int i = 0; i < 20000; ++i) {
    const SamplingConfig c{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), 0, false};
    const NonEntityFeatures f{rng.uniform(), rng.uniform(), rng.uniform()};
    const double p = sample_probability(f, c);
    const double bound = c.alpha * (c.lambda1 + c.lambda2 + c.lambda3) / 3.0;
    CHECK(p >= 0.0);
    CHECK(p <= bound + 1e-15);
    CHECK(bound <= c.alpha + 1e-15);
    const double d = rng.uniform(0.0, 0.1);
    CHECK(sample_probability({std::min(1.0, f.adjoins_entity + d), f.entity_ratio, f.tf_df}, c) >= p);
    CHECK(sample_probability({f.adjoins_entity, std::min(1.0, f.entity_ratio + d), f.tf_df}, c) <= p);
    CHECK(sample_probability({f.adjoins_entity, f.entity_ratio, std::min(1.0, f.tf_df + d)}, c) >= p);
  }
  CHECK_THROWS_AS((SamplingConfig{1.5, 0, 0, 0, 0, false}).validate(), ConfigError);
  CHECK_THROWS_AS((SamplingConfig{0.5, 0, -0.1, 0, 0, false}).validate(), ConfigError);
}

TEST_CASE("feature scores") {
  const auto types = fixtures::per_loc_org();
  std::vector<WeaklyLabeledSentence> corpus{
      weak_sentence(types, {"Obama", "said", "and", "left"}, {"B-PER", "UN", "UN", "UN"}, 0, "d0"),
      weak_sentence(types, {"and", "then", "and"}, {"UN", "UN", "UN"}, 1, "d1"),
      weak_sentence(types, {"Obama", "and", "rare"}, {"UN", "UN", "UN"}, 2, "d2"),
  };
  const auto stats = compute_corpus_statistics(corpus);
  const auto f_said = feature_scores(1, corpus[0], stats, types);
  CHECK(f_said.adjoins_entity == 1.0);
  CHECK(f_said.entity_ratio == 0.0);
  const auto f_left = feature_scores(3, corpus[0], stats, types);
  CHECK(f_left.adjoins_entity == 0.0);
  const auto f_and = feature_scores(0, corpus[1], stats, types);
  CHECK(f_and.tf_df == 1.0);  // the most frequent word, in every document
  const auto f_rare = feature_scores(2, corpus[2], stats, types);
  CHECK(f_rare.tf_df < f_and.tf_df);
  const auto f_obama = feature_scores(0, corpus[2], stats, types);
  CHECK(f_obama.entity_ratio == 0.5);
  const SamplingConfig defaults;
  CHECK(sample_probability(f_and, defaults) > sample_probability(f_rare, defaults) - 1e-15);
  CHECK(sample_probability(f_and, defaults) > sample_probability(f_obama, defaults));
  CHECK_THROWS_AS(feature_scores(0, corpus[0], stats, types), ContractError);
  CHECK_THROWS_AS(feature_scores(9, corpus[0], stats, types), ContractError);
}

TEST_CASE("sampling is deterministic and only touches UN positions") {
  const auto types = fixtures::per_loc_org();
  Rng rng(77);
  std::vector<WeaklyLabeledSentence> corpus;
  const std::vector<std::string> kinds{"UN", "UN", "UN", "B-PER", "B-NT"};
  for (std::size_t k = 0; k < 200; ++k) {
    std::vector<std::string> tokens, labels;
    for (std::size_t i = 0; i < 8; ++i) {
      tokens.push_back("w" + std::to_string(rng.below(20)));
      labels.push_back(kinds[rng.below(kinds.size())]);
    }
    corpus.push_back(weak_sentence(types, tokens, labels, k, "d" + std::to_string(k % 7)));
  }
  const auto stats = compute_corpus_statistics(corpus);
  SamplingConfig cfg;
  cfg.alpha = 1.0;
  bool epoch_differs = false;
  for (const auto& s : corpus) {
    const auto a = apply_sampling(s, stats, cfg, types, 0);
    CHECK(a == apply_sampling(s, stats, cfg, types, 0));
    CHECK(a == apply_sampling(s, stats, cfg, types, 5));  // epoch ignored without resampling
    CHECK(std::is_sorted(a.begin(), a.end()));
    for (auto i : a) CHECK(s.labels[i] == types.unlabeled());
    SamplingConfig re = cfg;
    re.resample_each_epoch = true;
    epoch_differs |= apply_sampling(s, stats, re, types, 1) != apply_sampling(s, stats, re, types, 2);
  }
  CHECK(epoch_differs);
}

TEST_CASE("probability one always samples") {
  const auto types = fixtures::per_loc_org();
  // "w" is the most frequent word in every document, never anchored, and always next to an anchor.
  std::vector<WeaklyLabeledSentence> corpus{
      weak_sentence(types, {"w", "X", "w"}, {"UN", "B-ORG", "UN"}, 0, "d0"),
      weak_sentence(types, {"w", "Y"}, {"UN", "B-LOC"}, 1, "d1"),
  };
  const auto stats = compute_corpus_statistics(corpus);
  const SamplingConfig certain{1.0, 1.0, 1.0, 1.0, 9, false};
  CHECK(apply_sampling(corpus[0], stats, certain, types) == std::vector<std::size_t>{0, 2});
  CHECK(apply_sampling(corpus[1], stats, certain, types) == std::vector<std::size_t>{0});
}

TEST_CASE("sampled fraction matches the mean probability") {
  const auto types = fixtures::per_loc_org();
  Rng rng(5);
  std::vector<WeaklyLabeledSentence> corpus;
  for (std::size_t k = 0; k < 2000; ++k) {
    std::vector<std::string> tokens, labels;
    for (std::size_t i = 0; i < 12; ++i) {
      tokens.push_back("w" + std::to_string(rng.below(60)));
      labels.push_back(rng.uniform() < 0.2 ? "B-LOC" : "UN");
    }
    corpus.push_back(weak_sentence(types, tokens, labels, k, "d" + std::to_string(k / 10)));
  }
  const auto stats = compute_corpus_statistics(corpus);
  const SamplingConfig cfg;
  double expected = 0.0, hits = 0.0, draws = 0.0;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.labels[i] != types.unlabeled()) continue;
      expected += sample_probability(feature_scores(i, s, stats, types), cfg);
      draws += 1.0;
    }
    hits += static_cast<double>(apply_sampling(s, stats, cfg, types).size());
  }
  REQUIRE(draws > 15000);
  CHECK(std::abs(hits / draws - expected / draws) < 0.02);
}
