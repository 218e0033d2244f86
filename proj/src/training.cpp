#include "wltag/training.hpp"

#include <chrono>

#include "wltag/error.hpp"
#include "wltag/evaluation.hpp"
#include "wltag/rng.hpp"

namespace wltag {

namespace {

constexpr std::uint64_t kPretrainStage = 1;
constexpr std::uint64_t kFinetuneStage = 2;

using BatchKernel = double (*)(std::span<const TrainingExample* const>, const ModelParams&, const TypeSystem&,
                               const DropoutOptions&, Gradients*);

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// One pass over `examples` in a seeded shuffled order. Returns the mean loss.
double run_epoch(std::vector<TrainingExample>& examples, ModelParams& params, AdamState& adam,
                 const TrainingContext& ctx, BatchKernel kernel, std::size_t batch_size, std::uint64_t stage,
                 std::size_t epoch, const FrozenMask& frozen, std::size_t& steps) {
  std::vector<const TrainingExample*> order;
  order.reserve(examples.size());
  for (const auto& ex : examples) order.push_back(&ex);
  Rng rng(stream_seed(ctx.config.shuffle_seed, {stage, epoch}));
  rng.shuffle(order);

  const DropoutOptions dropout{ctx.config.dropout, ctx.config.dropout_seed, stage * 1'000'000 + epoch};
  Gradients grads = params.zero_gradients();
  double total = 0.0;
  for (std::size_t lo = 0; lo < order.size(); lo += batch_size) {
    const std::size_t hi = std::min(order.size(), lo + batch_size);
    std::span<const TrainingExample* const> batch(order.data() + lo, hi - lo);
    grads.set_zero();
    const double loss = kernel(batch, params, *ctx.types, dropout, &grads);
    total += loss;
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (auto& g : grads.tensors) g *= scale;
    adam_step(params.values, grads, adam, ctx.config.adam, frozen);
    ++steps;
  }
  return order.empty() ? 0.0 : total / static_cast<double>(order.size());
}

}  // namespace

void TrainingConfig::validate() const {
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (adam.weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (batch_size_classification == 0 || batch_size_sequence == 0) throw ConfigError("batch sizes must be positive");
}

nlohmann::json TrainingReport::to_json(bool include_timing) const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : s.epochs) {
      nlohmann::json je{{"epoch", e.epoch}, {"loss", e.loss}};
      je["validation_f1"] = e.validation_f1 ? nlohmann::json(*e.validation_f1) : nlohmann::json(nullptr);
      epochs.push_back(std::move(je));
    }
    nlohmann::json js{{"stage", s.stage},       {"skipped", s.skipped}, {"note", s.note},
                      {"sentences", s.sentences}, {"steps", s.steps},     {"epochs", epochs}};
    js["selected_epoch"] = s.selected_epoch ? nlohmann::json(*s.selected_epoch) : nlohmann::json(nullptr);
    if (include_timing) js["wall_clock_seconds"] = s.wall_clock_seconds;
    out.push_back(std::move(js));
  }
  return nlohmann::json{{"stages", out}};
}

bool EarlyStopping::update(double score) {
  ++rounds_;
  if (score > best_) {
    best_ = score;
    best_round_ = rounds_;
    bad_rounds_ = 0;
    return true;
  }
  ++bad_rounds_;
  return false;
}

Vocabulary build_vocabulary(const std::vector<WeaklyLabeledSentence>& sentences) {
  Vocabulary v;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      v.add_word(t);
      v.add_chars_of(t);
    }
  }
  return v;
}

std::vector<TrainingExample> make_examples(const std::vector<WeaklyLabeledSentence>& sentences,
                                           const TrainingContext& ctx, std::size_t epoch) {
  std::vector<TrainingExample> out(sentences.size());
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& s = sentences[static_cast<std::size_t>(k)];
    auto& ex = out[static_cast<std::size_t>(k)];
    ex.id = s.id;
    ex.encoded = encode_tokens(s.tokens, *ctx.vocab);
    ex.weak_labels.assign(s.labels.begin(), s.labels.begin() + static_cast<std::ptrdiff_t>(ex.encoded.size()));
    for (std::size_t i : apply_sampling(s, *ctx.stats, ctx.sampling, *ctx.types, epoch))
      if (i < ex.encoded.size()) ex.sampled.push_back(i);
  }
  return out;
}

std::vector<std::string> weak_as_gold(const WeaklyLabeledSentence& s, const TypeSystem& types) {
  std::vector<std::string> out;
  out.reserve(s.labels.size());
  for (LabelId y : s.labels) out.push_back(types.is_typed(y) ? types.label_name(y) : "O");
  return out;
}

double validation_f1(const std::vector<WeaklyLabeledSentence>& sentences, const ModelParams& params,
                     const TrainingContext& ctx) {
  std::vector<EncodedSentence> encoded;
  std::vector<std::vector<std::string>> gold;
  for (const auto& s : sentences) {
    if (s.tokens.empty()) continue;
    encoded.push_back(encode_tokens(s.tokens, *ctx.vocab));
    auto g = weak_as_gold(s, *ctx.types);
    g.resize(encoded.back().size());
    gold.push_back(std::move(g));
  }
  const auto decoded = ctx.config.parallel ? parallel::decode(encoded, params) : serial::decode(encoded, params);
  std::vector<std::vector<std::string>> pred;
  for (const auto& labels : decoded) {
    std::vector<std::string> names;
    for (LabelId y : labels) names.push_back(ctx.types->label_name(y));
    pred.push_back(std::move(names));
  }
  return evaluate(gold, pred).overall.f1;
}

StageReport pretrain_classifier(const std::vector<WeaklyLabeledSentence>& noisy, ModelParams& params,
                                const TrainingContext& ctx) {
  ctx.config.validate();
  ctx.sampling.validate();
  StageReport report;
  report.stage = "pretrain";
  report.sentences = noisy.size();
  const auto t0 = std::chrono::steady_clock::now();
  if (noisy.empty()) {
    report.skipped = true;
    report.note = "no noisy sentences; classification pretraining skipped";
    return report;
  }

  FrozenMask frozen{};
  frozen[static_cast<std::size_t>(ParamId::Transition)] = true;
  AdamState adam = AdamState::for_params(params.values);
  const BatchKernel kernel = ctx.config.parallel ? &parallel::classification_loss : &serial::classification_loss;
  auto examples = make_examples(noisy, ctx, 0);
  for (std::size_t epoch = 1; epoch <= ctx.config.max_epochs_pretrain; ++epoch) {
    if (ctx.sampling.resample_each_epoch && epoch > 1) examples = make_examples(noisy, ctx, epoch);
    const double loss = run_epoch(examples, params, adam, ctx, kernel, ctx.config.batch_size_classification,
                                  kPretrainStage, epoch, frozen, report.steps);
    report.epochs.push_back({epoch, loss, std::nullopt});
  }
  if (!report.epochs.empty()) report.selected_epoch = report.epochs.back().epoch;
  report.wall_clock_seconds = seconds_since(t0);
  return report;
}

StageReport finetune_sequence(const std::vector<WeaklyLabeledSentence>& train,
                              const std::vector<WeaklyLabeledSentence>& validation, ModelParams& params,
                              const TrainingContext& ctx) {
  ctx.config.validate();
  ctx.sampling.validate();
  if (train.empty())
    throw ConfigError("no high-quality training sentences; relax the thresholds or tag with the pretrained "
                      "(classification-only) checkpoint");
  StageReport report;
  report.stage = "finetune";
  report.sentences = train.size();
  const auto t0 = std::chrono::steady_clock::now();

  AdamState adam = AdamState::for_params(params.values);
  const BatchKernel kernel = ctx.config.parallel ? &parallel::sequence_loss : &serial::sequence_loss;
  EarlyStopping stopper(ctx.config.patience);
  std::optional<TensorSet> best;
  auto examples = make_examples(train, ctx, 0);
  for (std::size_t epoch = 1; epoch <= ctx.config.max_epochs_finetune; ++epoch) {
    if (ctx.sampling.resample_each_epoch && epoch > 1) examples = make_examples(train, ctx, epoch);
    EpochRecord rec{epoch, 0.0, std::nullopt};
    rec.loss = run_epoch(examples, params, adam, ctx, kernel, ctx.config.batch_size_sequence, kFinetuneStage, epoch,
                         kNothingFrozen, report.steps);
    if (!validation.empty()) {
      rec.validation_f1 = validation_f1(validation, params, ctx);
      if (stopper.update(*rec.validation_f1)) best = params.values;
    }
    report.epochs.push_back(rec);
    if (!validation.empty() && stopper.should_stop()) break;
  }
  if (best) {
    params.values = *best;
    report.selected_epoch = stopper.best_round();
  } else if (!report.epochs.empty()) {
    report.selected_epoch = report.epochs.back().epoch;
  }
  report.wall_clock_seconds = seconds_since(t0);
  return report;
}

}  // namespace wltag
