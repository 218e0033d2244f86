#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "wltag/checkpoint.hpp"
#include "wltag/error.hpp"
#include "wltag/training.hpp"

using namespace wltag;

namespace {

struct SmallWorld {
  fixtures::InducedSynth data;
  DatasetPartition parts;
  Vocabulary vocab;
  CorpusStatistics stats;

  SmallWorld() {
    SynthSpec spec;
    spec.sentences = 160;
    spec.heldout = 0;
    spec.entities_per_type = 8;
    spec.filler_words = 40;
    spec.seed = 3;
    data = fixtures::induce_synth(generate_synthetic_corpus(spec));
    parts = partition_datasets(split_corpus(data.weak, 0.1, 0.1), 5);
    vocab = build_vocabulary(data.weak);
    stats = compute_corpus_statistics(data.weak);
  }

  TrainingContext context(bool parallel = true) const {
    TrainingContext ctx{&data.types, &vocab, &stats, SamplingConfig{}, TrainingConfig{}};
    ctx.config.parallel = parallel;
    ctx.config.max_epochs_pretrain = 2;
    ctx.config.max_epochs_finetune = 2;
    return ctx;
  }

  ModelParams fresh(std::uint64_t seed = 1) const {
    return ModelParams::initialize(fixtures::tiny_dims(), vocab.num_words(), vocab.num_chars(),
                                   data.types.num_labels(), seed);
  }
};

}  // namespace

TEST_CASE("early stopping rule") {
  EarlyStopping stop(2);
  const std::vector<double> f1{0.5, 0.6, 0.58, 0.59};
  std::size_t stopped_at = 0;
  for (std::size_t e = 0; e < f1.size(); ++e) {
    stop.update(f1[e]);
    if (stop.should_stop()) {
      stopped_at = e + 1;
      break;
    }
  }
  CHECK(stopped_at == 4);
  CHECK(stop.best_round() == 2);
  CHECK(stop.best_score() == 0.6);
}

TEST_CASE("serial and parallel kernels agree") {
  const SmallWorld w;
  const auto ctx = w.context();
  const auto examples = make_examples(w.parts.train, ctx, 0);
  std::vector<const TrainingExample*> ptrs;
  for (const auto& ex : examples) ptrs.push_back(&ex);
  REQUIRE(ptrs.size() > 10);
  const std::span<const TrainingExample* const> batch(ptrs.data(), std::min<std::size_t>(ptrs.size(), 40));
  const auto p = w.fresh();
  const DropoutOptions dropout{true, 4, 2};
  for (auto [s, q] : {std::pair{&serial::classification_loss, &parallel::classification_loss},
                      std::pair{&serial::sequence_loss, &parallel::sequence_loss}}) {
    Gradients gs = p.zero_gradients(), gp = p.zero_gradients();
    const double ls = s(batch, p, w.data.types, dropout, &gs);
    const double lp = q(batch, p, w.data.types, dropout, &gp);
    CHECK(ls == doctest::Approx(lp).epsilon(1e-12));
    for (std::size_t k = 0; k < kNumParams; ++k)
      CHECK((gs.tensors[k] - gp.tensors[k]).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + gs.tensors[k].cwiseAbs().maxCoeff()));
  }
  std::vector<EncodedSentence> enc;
  for (const auto& ex : examples) enc.push_back(ex.encoded);
  CHECK(serial::decode(enc, p) == parallel::decode(enc, p));
}

TEST_CASE("pretraining lowers the loss and never touches transitions") {
  const SmallWorld w;
  auto ctx = w.context(false);
  auto p = w.fresh();
  const auto transitions = p[ParamId::Transition];
  const double* const storage = p[ParamId::WordEmbedding].data();
  const auto examples = make_examples(w.parts.noisy.empty() ? w.parts.train : w.parts.noisy, ctx, 0);
  std::vector<const TrainingExample*> ptrs;
  for (const auto& ex : examples) ptrs.push_back(&ex);
  const std::span<const TrainingExample* const> all(ptrs);
  const double before = serial::classification_loss(all, p, w.data.types, {}, nullptr);

  ctx.config.max_epochs_pretrain = 8;
  const auto report = pretrain_classifier(w.parts.noisy.empty() ? w.parts.train : w.parts.noisy, p, ctx);
  CHECK_FALSE(report.skipped);
  CHECK(report.epochs.size() == 8);
  CHECK(serial::classification_loss(all, p, w.data.types, {}, nullptr) < before);
  CHECK(p[ParamId::Transition] == transitions);
  // The same tensor storage carries on into fine-tuning.
  finetune_sequence(w.parts.train, w.parts.validation, p, ctx);
  CHECK(p[ParamId::WordEmbedding].data() == storage);
  CHECK(p[ParamId::Transition] != transitions);
}

TEST_CASE("degenerate stage inputs") {
  const SmallWorld w;
  const auto ctx = w.context();
  auto p = w.fresh();
  const auto before = p.values;
  const auto skipped = pretrain_classifier({}, p, ctx);
  CHECK(skipped.skipped);
  CHECK_FALSE(skipped.note.empty());
  CHECK(p.values == before);
  CHECK_THROWS_AS(finetune_sequence({}, w.parts.validation, p, ctx), ConfigError);
}

TEST_CASE("fine-tuning is deterministic and keeps the best epoch") {
  const SmallWorld w;
  auto ctx = w.context();
  ctx.config.max_epochs_finetune = 4;
  ctx.config.patience = 1;
  auto a = w.fresh(), b = w.fresh();
  const auto ra = finetune_sequence(w.parts.train, w.parts.validation, a, ctx);
  const auto rb = finetune_sequence(w.parts.train, w.parts.validation, b, ctx);
  CHECK(a.values == b.values);
  TrainingReport ja{{ra}}, jb{{rb}};
  CHECK(ja.to_json(false) == jb.to_json(false));
  REQUIRE(ra.selected_epoch.has_value());
  double best = -1.0;
  for (const auto& e : ra.epochs) best = std::max(best, *e.validation_f1);
  CHECK(*ra.epochs[*ra.selected_epoch - 1].validation_f1 == best);
  CHECK(validation_f1(w.parts.validation, a, ctx) == best);
}

TEST_CASE("checkpoint round trip") {
  const SmallWorld w;
  Checkpoint ck{w.data.types, w.vocab, fixtures::toy_model(w.vocab.num_words(), w.vocab.num_chars(), 7, 8)};
  std::stringstream buf;
  write_checkpoint(buf, ck);
  const auto back = read_checkpoint(buf);
  CHECK(back.types == ck.types);
  CHECK(back.vocab == ck.vocab);
  CHECK(back.params.dims == ck.params.dims);
  CHECK(back.params.values == ck.params.values);

  std::vector<EncodedSentence> probe;
  for (std::size_t k = 0; k < 20; ++k) probe.push_back(encode_tokens(w.data.weak[k].tokens, w.vocab));
  CHECK(serial::decode(probe, back.params) == serial::decode(probe, ck.params));

  auto bytes = std::stringstream().str();
  {
    std::stringstream again;
    write_checkpoint(again, ck);
    bytes = again.str();
  }
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(read_checkpoint(truncated), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream bad_magic(bad);
  CHECK_THROWS_AS(read_checkpoint(bad_magic), FormatError);
}

TEST_CASE("word vectors overwrite matching embedding columns") {
  Vocabulary v;
  v.add_word("cat");
  v.add_word("dog");
  auto p = ModelParams::initialize(fixtures::tiny_dims(), v.num_words(), v.num_chars(), 3, 1);
  const auto dog = p[ParamId::WordEmbedding].col(v.word_id("dog")).eval();
  std::istringstream in("3 4\ncat 1 2 3 4\nbird 0 0 0 0\n");
  CHECK(load_word_vectors(in, v, p) == 1);
  CHECK(p[ParamId::WordEmbedding](0, v.word_id("cat")) == 1.0);
  CHECK(p[ParamId::WordEmbedding](3, v.word_id("cat")) == 4.0);
  CHECK(p[ParamId::WordEmbedding].col(v.word_id("dog")) == dog);
  std::istringstream wrong("cat 1 2\n");
  CHECK_THROWS_AS(load_word_vectors(wrong, v, p), FormatError);
}
