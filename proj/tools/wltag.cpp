// wltag: weakly supervised name tagging from anchored text.
//
//   wltag synth    --out DIR
//   wltag generate --corpus C --taxonomy T --gamma G --catalog E --out weak.jsonl
//   wltag split    --weak weak.jsonl --out-dir DIR
//   wltag pretrain --split-dir DIR --out pre.ckpt
//   wltag train    --split-dir DIR [--init pre.ckpt] --out model.ckpt
//   wltag tag      --model model.ckpt --input in.conll --output out.conll
//   wltag eval     --gold gold.conll --pred out.conll
//
// Global flags (seeds, thresholds, sampling, training) may precede or follow
// the subcommand, and may also come from --config FILE (key = value lines).

#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "wltag/error.hpp"
#include "wltag/pipeline.hpp"
#include "wltag/synth.hpp"

namespace {

using namespace wltag;

void write_json(const std::optional<fs::path>& path, const nlohmann::json& j) {
  if (!path) return;
  if (path->has_parent_path()) fs::create_directories(path->parent_path());
  std::ofstream f(*path);
  if (!f) throw ConfigError("cannot write " + path->string());
  f << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised name tagging with a partial CRF"};
  app.set_config("--config", "", "Read flags from a key = value file");
  app.require_subcommand(1);
  app.fallthrough();

  SplitOptions split_opts;
  ModelOptions model;
  int threads = 0;
  bool serial = false;
  bool no_dropout = false;

  auto* g = &app;
  g->add_option("--theta-q", split_opts.theta_q, "Annotation confidence threshold")->capture_default_str();
  g->add_option("--theta-n", split_opts.theta_n, "Annotation coverage threshold")->capture_default_str();
  g->add_option("--split-seed", split_opts.seed, "Seed for the validation draw")->capture_default_str();
  g->add_option("--alpha", model.sampling.alpha, "Sampling scale")->capture_default_str();
  g->add_option("--lambda1", model.sampling.lambda1, "Weight of the adjacency feature")->capture_default_str();
  g->add_option("--lambda2", model.sampling.lambda2, "Weight of the entity-ratio feature")->capture_default_str();
  g->add_option("--lambda3", model.sampling.lambda3, "Weight of the tf-df feature")->capture_default_str();
  g->add_option("--sampling-seed", model.sampling.seed, "Seed for non-entity sampling")->capture_default_str();
  g->add_flag("--resample-each-epoch", model.sampling.resample_each_epoch, "Redraw sampled positions every epoch");
  g->add_option("--lr", model.training.adam.learning_rate, "Adam learning rate")->capture_default_str();
  g->add_option("--weight-decay", model.training.adam.weight_decay, "L2 coefficient")->capture_default_str();
  g->add_option("--batch-classification", model.training.batch_size_classification)->capture_default_str();
  g->add_option("--batch-sequence", model.training.batch_size_sequence)->capture_default_str();
  g->add_option("--epochs-pretrain", model.training.max_epochs_pretrain)->capture_default_str();
  g->add_option("--epochs-finetune", model.training.max_epochs_finetune)->capture_default_str();
  g->add_option("--patience", model.training.patience, "Early-stopping patience")->capture_default_str();
  g->add_option("--init-seed", model.training.init_seed)->capture_default_str();
  g->add_option("--shuffle-seed", model.training.shuffle_seed)->capture_default_str();
  g->add_option("--dropout-seed", model.training.dropout_seed)->capture_default_str();
  g->add_flag("--no-dropout", no_dropout, "Disable character dropout");
  g->add_option("--word-dim", model.dims.word_dim)->capture_default_str();
  g->add_option("--char-dim", model.dims.char_dim)->capture_default_str();
  g->add_option("--char-filters", model.dims.char_filters)->capture_default_str();
  g->add_option("--char-width", model.dims.char_width)->capture_default_str();
  g->add_option("--hidden", model.dims.hidden, "LSTM units per direction")->capture_default_str();
  g->add_option("--char-dropout", model.dims.char_dropout)->capture_default_str();
  g->add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  g->add_flag("--serial", serial, "Use the serial reference kernels");

  SynthSpec synth;
  fs::path synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic anchored corpus with gold labels");
  c_synth->add_option("--out", synth_out, "Output directory")->required();
  c_synth->add_option("--sentences", synth.sentences)->capture_default_str();
  c_synth->add_option("--heldout", synth.heldout)->capture_default_str();
  c_synth->add_option("--drop-rate", synth.anchor_drop_rate, "Fraction of mentions left unanchored")
      ->capture_default_str();
  c_synth->add_option("--entities-per-type", synth.entities_per_type)->capture_default_str();
  c_synth->add_option("--fillers", synth.filler_words)->capture_default_str();
  c_synth->add_option("--synth-seed", synth.seed)->capture_default_str();
  c_synth->add_option("--types", synth.types)->delimiter(',')->capture_default_str();

  fs::path corpus, taxonomy, gamma, catalog, weak_out;
  std::vector<std::string> types;
  auto* c_gen = app.add_subcommand("generate", "Induce weak labels from an anchored corpus");
  c_gen->add_option("--corpus", corpus)->required();
  c_gen->add_option("--taxonomy", taxonomy)->required();
  c_gen->add_option("--gamma", gamma)->required();
  c_gen->add_option("--catalog", catalog)->required();
  c_gen->add_option("--types", types, "Type order (default: order of the gamma file)")->delimiter(',');
  c_gen->add_option("--out", weak_out)->required();

  fs::path weak_in, split_out;
  auto* c_split = app.add_subcommand("split", "Score weak sentences and partition them");
  c_split->add_option("--weak", weak_in)->required();
  c_split->add_option("--out-dir", split_out)->required();

  fs::path split_dir, model_out;
  std::optional<fs::path> report, init, embeddings;
  auto* c_pre = app.add_subcommand("pretrain", "Classification pretraining on the noisy partition");
  auto* c_train = app.add_subcommand("train", "Partial-CRF training on the high-quality partition");
  for (auto* c : {c_pre, c_train}) {
    c->add_option("--split-dir", split_dir)->required();
    c->add_option("--out", model_out, "Checkpoint to write")->required();
    c->add_option("--report", report, "Training report (JSON)");
    c->add_option("--embeddings", embeddings, "Pretrained word vectors (text)");
  }
  c_train->add_option("--init", init, "Checkpoint to start from");

  fs::path tag_model, tag_in, tag_out;
  auto* c_tag = app.add_subcommand("tag", "Label CoNLL sentences with a trained model");
  c_tag->add_option("--model", tag_model)->required();
  c_tag->add_option("--input", tag_in)->required();
  c_tag->add_option("--output", tag_out)->required();

  fs::path gold, pred;
  std::optional<fs::path> eval_out;
  auto* c_eval = app.add_subcommand("eval", "Entity-level precision, recall and F1");
  c_eval->add_option("--gold", gold)->required();
  c_eval->add_option("--pred", pred)->required();
  c_eval->add_option("--report", eval_out, "Write the scores here as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    model.training.parallel = !serial;
    model.training.dropout = !no_dropout;
    model.embeddings = embeddings;

    if (*c_synth) {
      const SynthCorpus s = generate_synthetic_corpus(synth);
      write_synthetic_corpus(s, synth_out);
      std::cout << nlohmann::json{{"sentences", s.corpus.size()},
                                  {"heldout", s.heldout.size()},
                                  {"mentions", s.mentions},
                                  {"dropped_mentions", s.dropped_mentions},
                                  {"vocabulary", s.vocabulary_size}}
                       .dump()
                << '\n';
    } else if (*c_gen) {
      const auto s = run_generate(corpus, taxonomy, gamma, catalog, types, weak_out);
      std::cout << nlohmann::json{{"sentences", s.sentences},
                                  {"typed_mentions", s.typed_mentions},
                                  {"untyped_mentions", s.untyped_mentions},
                                  {"missing_entities", s.missing_entities},
                                  {"dropped_categories", s.dropped_categories}}
                       .dump()
                << '\n';
    } else if (*c_split) {
      const auto s = run_split(weak_in, split_out, split_opts);
      std::cout << nlohmann::json{{"train", s.train}, {"validation", s.validation}, {"test", s.test}, {"noisy", s.noisy}}
                       .dump()
                << '\n';
    } else if (*c_pre || *c_train) {
      const StageResult r = *c_pre ? run_pretrain(split_dir, model) : run_train(split_dir, init, model);
      save_checkpoint(model_out, r.checkpoint);
      const auto j = stage_report_json(r);
      write_json(report, j);
      std::cout << j.dump() << '\n';
    } else if (*c_tag) {
      const auto s = run_tag(tag_model, tag_in, tag_out, !serial);
      std::cout << nlohmann::json{{"sentences", s.sentences}, {"truncated", s.truncated}}.dump() << '\n';
    } else if (*c_eval) {
      const auto j = eval_json(run_eval(gold, pred));
      write_json(eval_out, j);
      std::cout << j.dump() << '\n';
    }
  } catch (const ContractError& e) {
    std::cerr << "wltag: contract violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wltag: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
