// Serial reference kernels against their OpenMP counterparts on a synthetic
// batch with the default encoder size. Set OMP_NUM_THREADS to vary the team.

#include <benchmark/benchmark.h>

#include "wltag/batch.hpp"
#include "wltag/synth.hpp"
#include "wltag/taxonomy.hpp"
#include "wltag/training.hpp"

namespace {

using namespace wltag;

struct Workload {
  TypeSystem types;
  Vocabulary vocab;
  CorpusStatistics stats;
  ModelParams params;
  std::vector<TrainingExample> examples;
  std::vector<EncodedSentence> sentences;

  Workload() {
    SynthSpec spec;
    spec.sentences = 512;
    spec.heldout = 0;
    const auto synth = generate_synthetic_corpus(spec);
    types = TypeSystem::build(synth.types);
    TaxonomyGraph graph;
    for (const auto& [p, c] : synth.taxonomy_edges) graph.add_edge(p, c);
    GammaMapping gamma;
    for (const auto& [t, r] : synth.gamma) gamma.set(t, r);
    EntityCatalog catalog;
    for (const auto& e : synth.catalog) {
      std::vector<CategoryId> cats;
      for (const auto& c : e.categories)
        if (auto id = graph.find(c)) cats.push_back(*id);
      catalog.add(e.id, cats);
    }
    const auto weak = induce_corpus(synth.corpus, catalog, TypeResolver(types, graph, gamma));
    vocab = build_vocabulary(weak);
    stats = compute_corpus_statistics(weak);
    params = ModelParams::initialize(EncoderDims{}, vocab.num_words(), vocab.num_chars(), types.num_labels(), 1);
    const TrainingContext ctx{&types, &vocab, &stats, SamplingConfig{}, TrainingConfig{}};
    examples = make_examples(weak, ctx, 0);
    for (const auto& ex : examples) sentences.push_back(ex.encoded);
  }

  std::vector<const TrainingExample*> batch(std::size_t n) const {
    std::vector<const TrainingExample*> out;
    for (std::size_t i = 0; i < n && i < examples.size(); ++i) out.push_back(&examples[i]);
    return out;
  }
};

const Workload& workload() {
  static const Workload w;
  return w;
}

using LossKernel = double (*)(std::span<const TrainingExample* const>, const ModelParams&, const TypeSystem&,
                              const DropoutOptions&, Gradients*);
using DecodeKernel = std::vector<std::vector<LabelId>> (*)(std::span<const EncodedSentence>, const ModelParams&);

void run_loss(benchmark::State& state, LossKernel kernel) {
  const auto& w = workload();
  const auto ptrs = w.batch(static_cast<std::size_t>(state.range(0)));
  const DropoutOptions dropout{true, 3, 0};
  Gradients g = w.params.zero_gradients();
  for (auto _ : state) {
    g.set_zero();
    benchmark::DoNotOptimize(kernel(ptrs, w.params, w.types, dropout, &g));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ptrs.size()));
}

void run_decode(benchmark::State& state, DecodeKernel kernel) {
  const auto& w = workload();
  const std::span<const EncodedSentence> all(w.sentences.data(),
                                             std::min<std::size_t>(w.sentences.size(), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(all, w.params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}

void BM_ClassificationSerial(benchmark::State& s) { run_loss(s, &serial::classification_loss); }
void BM_ClassificationParallel(benchmark::State& s) { run_loss(s, &parallel::classification_loss); }
void BM_SequenceSerial(benchmark::State& s) { run_loss(s, &serial::sequence_loss); }
void BM_SequenceParallel(benchmark::State& s) { run_loss(s, &parallel::sequence_loss); }
void BM_DecodeSerial(benchmark::State& s) { run_decode(s, &serial::decode); }
void BM_DecodeParallel(benchmark::State& s) { run_decode(s, &parallel::decode); }

}  // namespace

BENCHMARK(BM_ClassificationSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassificationParallel)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SequenceSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SequenceParallel)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DecodeSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecodeParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
