#include "wltag/pipeline.hpp"

#include <fstream>

#include "wltag/error.hpp"

namespace wltag {

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + p.string());
  return f;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

std::vector<ConllSentence> read_conll_file(const fs::path& p) {
  auto f = open_in(p);
  return read_conll(f);
}

TrainingContext make_context(const TypeSystem& types, const Vocabulary& vocab, const CorpusStatistics& stats,
                             const ModelOptions& options) {
  return TrainingContext{&types, &vocab, &stats, options.sampling, options.training};
}

Checkpoint fresh_model(const LoadedSplit& split, const ModelOptions& options) {
  Checkpoint ckpt;
  ckpt.types = split.types;
  ckpt.vocab = build_vocabulary(split.sentences);
  ckpt.params = ModelParams::initialize(options.dims, ckpt.vocab.num_words(), ckpt.vocab.num_chars(),
                                        split.types.num_labels(), options.training.init_seed);
  if (options.embeddings) {
    auto f = open_in(*options.embeddings);
    load_word_vectors(f, ckpt.vocab, ckpt.params);
  }
  return ckpt;
}

std::optional<double> test_score(const LoadedSplit& split, const Checkpoint& ckpt, const TrainingContext& ctx) {
  if (split.parts.test.empty()) return std::nullopt;
  return validation_f1(split.parts.test, ckpt.params, ctx);
}

}  // namespace

GenerateSummary run_generate(const fs::path& corpus, const fs::path& taxonomy, const fs::path& gamma,
                             const fs::path& catalog, const std::vector<std::string>& types, const fs::path& out) {
  auto tf = open_in(taxonomy);
  const TaxonomyGraph graph = TaxonomyGraph::read_tsv(tf);
  auto gf = open_in(gamma);
  const GammaMapping mapping = GammaMapping::read_tsv(gf);
  std::vector<std::string> names = types;
  if (names.empty())
    for (const auto& [t, r] : mapping.entries()) names.push_back(t);
  const TypeSystem type_system = TypeSystem::build(names);
  mapping.validate(type_system, graph);
  auto cf = open_in(catalog);
  const EntityCatalog entities = EntityCatalog::read_jsonl(cf, graph);
  auto af = open_in(corpus);
  const auto anchored = read_anchored_corpus(af);

  const TypeResolver resolver(type_system, graph, mapping);
  InductionWarnings warnings;
  const auto weak = induce_corpus(anchored, entities, resolver, &warnings);
  auto of = open_out(out);
  write_weak_corpus(of, type_system, weak);

  GenerateSummary s;
  s.sentences = weak.size();
  s.missing_entities = warnings.missing_entities;
  s.dropped_categories = entities.dropped_categories();
  for (const auto& w : weak)
    for (const auto& a : w.anchors) ++(a.type ? s.typed_mentions : s.untyped_mentions);
  return s;
}

SplitSummary run_split(const fs::path& weak, const fs::path& out_dir, const SplitOptions& options) {
  auto wf = open_in(weak);
  WeakCorpus corpus = read_weak_corpus(wf);
  const LinkPrior prior = estimate_link_prior(corpus.sentences, corpus.types.num_types());
  score_corpus(corpus.sentences, prior, corpus.types);
  const SplitCorpus split = split_corpus(corpus.sentences, options.theta_q, options.theta_n);
  const DatasetPartition parts = partition_datasets(split, options.seed, options.test_min_coverage);

  std::vector<Partition> assigned(corpus.sentences.size(), Partition::Train);
  auto mark = [&](const std::vector<WeaklyLabeledSentence>& set, Partition p) {
    for (const auto& s : set) assigned.at(s.id) = p;
  };
  mark(parts.noisy, Partition::Noisy);
  mark(parts.validation, Partition::Validation);
  mark(parts.test, Partition::Test);

  SplitSidecar sidecar{corpus.types.types(), options.theta_q, options.theta_n, {}};
  for (std::size_t k = 0; k < corpus.sentences.size(); ++k) {
    const auto& s = corpus.sentences[k];
    if (s.id != k) throw FormatError("weak corpus ids must be consecutive from 0");
    sidecar.sentences.push_back({s.id, s.doc_id, s.quality, s.coverage, assigned[k]});
  }
  auto cf = open_out(out_dir / "split.conll");
  write_conll(cf, to_conll(corpus.sentences, corpus.types));
  auto jf = open_out(out_dir / "split.json");
  write_split_sidecar(jf, sidecar);
  return {parts.train.size(), parts.validation.size(), parts.test.size(), parts.noisy.size()};
}

LoadedSplit load_split(const fs::path& split_dir) {
  auto jf = open_in(split_dir / "split.json");
  const SplitSidecar sidecar = read_split_sidecar(jf);
  LoadedSplit out;
  out.types = TypeSystem::build(sidecar.types);
  out.sentences = join_split(read_conll_file(split_dir / "split.conll"), sidecar, out.types);
  for (std::size_t k = 0; k < out.sentences.size(); ++k) {
    const auto& s = out.sentences[k];
    switch (sidecar.sentences[k].partition) {
      case Partition::Train: out.parts.train.push_back(s); break;
      case Partition::Noisy: out.parts.noisy.push_back(s); break;
      case Partition::Validation: out.parts.validation.push_back(s); break;
      case Partition::Test: out.parts.test.push_back(s); break;
    }
  }
  return out;
}

StageResult run_pretrain(const fs::path& split_dir, const ModelOptions& options) {
  const LoadedSplit split = load_split(split_dir);
  StageResult result{fresh_model(split, options), {}, std::nullopt};
  const CorpusStatistics stats = compute_corpus_statistics(split.sentences);
  const TrainingContext ctx = make_context(split.types, result.checkpoint.vocab, stats, options);
  result.report.stages.push_back(pretrain_classifier(split.parts.noisy, result.checkpoint.params, ctx));
  result.test_f1 = test_score(split, result.checkpoint, ctx);
  return result;
}

StageResult run_train(const fs::path& split_dir, const std::optional<fs::path>& init, const ModelOptions& options) {
  const LoadedSplit split = load_split(split_dir);
  StageResult result;
  if (init) {
    result.checkpoint = load_checkpoint(*init);
    if (!(result.checkpoint.types == split.types))
      throw ConfigError("initial checkpoint was trained on a different type inventory");
  } else {
    result.checkpoint = fresh_model(split, options);
  }
  const CorpusStatistics stats = compute_corpus_statistics(split.sentences);
  const TrainingContext ctx = make_context(split.types, result.checkpoint.vocab, stats, options);
  result.report.stages.push_back(
      finetune_sequence(split.parts.train, split.parts.validation, result.checkpoint.params, ctx));
  result.test_f1 = test_score(split, result.checkpoint, ctx);
  return result;
}

nlohmann::json stage_report_json(const StageResult& result, bool include_timing) {
  nlohmann::json j = result.report.to_json(include_timing);
  j["test_f1_weak"] = result.test_f1 ? nlohmann::json(*result.test_f1) : nlohmann::json(nullptr);
  return j;
}

std::vector<ConllSentence> tag_sentences(const Checkpoint& ckpt, const std::vector<ConllSentence>& input,
                                         bool parallel, TagSummary* summary) {
  std::vector<EncodedSentence> encoded;
  encoded.reserve(input.size());
  TagSummary local;
  for (std::size_t k = 0; k < input.size(); ++k) {
    for (const auto& label : input[k].labels)
      if (label != "O" && !ckpt.types.find_label(label))
        throw ConfigError("sentence " + std::to_string(k) + ": label " + label + " is not in the model's label set");
    bool truncated = false;
    encoded.push_back(encode_tokens(input[k].tokens, ckpt.vocab, kMaxSentenceLength, &truncated));
    if (truncated) ++local.truncated;
  }
  std::vector<std::vector<LabelId>> decoded(input.size());
  std::vector<EncodedSentence> nonempty;
  std::vector<std::size_t> where;
  for (std::size_t k = 0; k < encoded.size(); ++k) {
    if (encoded[k].size() == 0) continue;
    nonempty.push_back(std::move(encoded[k]));
    where.push_back(k);
  }
  auto paths = parallel ? parallel::decode(nonempty, ckpt.params) : serial::decode(nonempty, ckpt.params);
  for (std::size_t j = 0; j < where.size(); ++j) decoded[where[j]] = std::move(paths[j]);

  std::vector<ConllSentence> out(input.size());
  for (std::size_t k = 0; k < input.size(); ++k) {
    out[k].tokens = input[k].tokens;
    out[k].labels.assign(input[k].tokens.size(), "O");
    for (std::size_t i = 0; i < decoded[k].size(); ++i) out[k].labels[i] = ckpt.types.label_name(decoded[k][i]);
  }
  local.sentences = input.size();
  if (summary) *summary = local;
  return out;
}

TagSummary run_tag(const fs::path& model, const fs::path& input, const fs::path& output, bool parallel) {
  const Checkpoint ckpt = load_checkpoint(model);
  TagSummary summary;
  const auto tagged = tag_sentences(ckpt, read_conll_file(input), parallel, &summary);
  auto f = open_out(output);
  write_conll(f, tagged);
  return summary;
}

EvalResult evaluate_conll(const std::vector<ConllSentence>& gold, const std::vector<ConllSentence>& predicted) {
  if (gold.size() != predicted.size())
    throw ContractError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                        std::to_string(predicted.size()));
  std::vector<std::vector<std::string>> g, p;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (gold[k].tokens != predicted[k].tokens)
      throw ContractError("sentence " + std::to_string(k) + ": tokens differ between gold and prediction");
    g.push_back(gold[k].labels);
    p.push_back(predicted[k].labels);
  }
  return evaluate(g, p);
}

EvalResult run_eval(const fs::path& gold, const fs::path& predicted) {
  return evaluate_conll(read_conll_file(gold), read_conll_file(predicted));
}

nlohmann::json eval_json(const EvalResult& result) {
  auto score = [](const PrfScore& s) {
    return nlohmann::json{{"gold", s.gold},         {"predicted", s.predicted}, {"correct", s.correct},
                          {"precision", s.precision}, {"recall", s.recall},     {"f1", s.f1}};
  };
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto& [t, s] : result.per_type) per_type[t] = score(s);
  return nlohmann::json{{"overall", score(result.overall)}, {"per_type", per_type}};
}

}  // namespace wltag
