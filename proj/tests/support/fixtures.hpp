#pragma once

// Shared helpers for the unit and acceptance tests: tiny models, random
// matrices, weak sentences built from label names, and brute-force oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "wltag/batch.hpp"
#include "wltag/labels.hpp"
#include "wltag/params.hpp"
#include "wltag/pcrf.hpp"
#include "wltag/rng.hpp"
#include "wltag/synth.hpp"
#include "wltag/weak_data.hpp"

namespace fixtures {

using wltag::LabelId;
using wltag::Matrix;

inline wltag::TypeSystem per_loc_org() { return wltag::TypeSystem::build({"PER", "LOC", "ORG"}); }

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, wltag::Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
  return m;
}

// Small encoder so finite differences stay cheap.
inline wltag::EncoderDims tiny_dims() {
  wltag::EncoderDims d;
  d.word_dim = 4;
  d.char_dim = 3;
  d.char_filters = 3;
  d.char_width = 3;
  d.hidden = 3;
  return d;
}

// Random toy model with non-zero biases and transitions so every gradient path is live.
inline wltag::ModelParams toy_model(std::size_t num_words, std::size_t num_chars, std::size_t num_labels,
                                    std::uint64_t seed, const wltag::EncoderDims& dims = tiny_dims()) {
  auto p = wltag::ModelParams::initialize(dims, num_words, num_chars, num_labels, seed);
  wltag::Rng rng(seed ^ 0xabcdefULL);
  for (std::size_t k = 0; k < wltag::kNumParams; ++k) {
    auto& t = p.values.tensors[k];
    t = random_matrix(t.rows(), t.cols(), rng, 0.5);
  }
  return p;
}

inline std::vector<LabelId> labels_from(const wltag::TypeSystem& types, const std::vector<std::string>& names) {
  std::vector<LabelId> out;
  for (const auto& n : names) out.push_back(types.label(n));
  return out;
}

// Every label sequence of length n over [0, k).
inline void for_each_path(std::size_t n, std::size_t k, const std::function<void(const std::vector<LabelId>&)>& f) {
  std::vector<LabelId> y(n, 0);
  while (true) {
    f(y);
    std::size_t i = 0;
    while (i < n && static_cast<std::size_t>(++y[i]) == k) y[i++] = 0;
    if (i == n) return;
  }
}

// Independent term-by-term score: boundaries first, then emissions, then inner transitions.
inline double oracle_score(const Matrix& E, const Matrix& A, const std::vector<LabelId>& y) {
  const auto K = E.rows();
  double s = A(K, y.front()) + A(y.back(), K + 1);
  for (std::size_t i = 0; i < y.size(); ++i) s += E(y[i], static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i + 1 < y.size(); ++i) s += A(y[i], y[i + 1]);
  return s;
}

struct Enumeration {
  double log_z = 0.0;
  std::vector<LabelId> best;
  double best_score = -std::numeric_limits<double>::infinity();
};

// Brute-force log-partition over lattice paths (numerically stable two-pass) and
// unconstrained argmax with lexicographic-first tie-breaking on the label vector.
inline Enumeration enumerate(const Matrix& E, const Matrix& A, const wltag::LabelLattice* lattice) {
  const auto n = static_cast<std::size_t>(E.cols());
  const auto K = static_cast<std::size_t>(E.rows());
  Enumeration out;
  std::vector<double> scores;
  for_each_path(n, K, [&](const std::vector<LabelId>& y) {
    const double s = oracle_score(E, A, y);
    if (s > out.best_score) {
      out.best_score = s;
      out.best = y;
    }
    if (lattice) {
      for (std::size_t i = 0; i < n; ++i)
        if (!lattice->allows(i, y[i])) return;
    }
    scores.push_back(s);
  });
  const double m = *std::max_element(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - m);
  out.log_z = m + std::log(acc);
  return out;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

struct GroupError {
  wltag::ParamId id;
  double max_relative = 0.0;  // worst entry; entries where both sides are below `floor` count as exact
  std::size_t entries = 0;
};

// Central differences of `loss` for every entry of every tensor, against `analytic`.
inline std::vector<GroupError> gradient_check(wltag::ModelParams& params, const wltag::Gradients& analytic,
                                              const std::function<double(const wltag::ModelParams&)>& loss,
                                              double eps = 1e-4, double floor = 1e-9) {
  std::vector<GroupError> out;
  for (std::size_t k = 0; k < wltag::kNumParams; ++k) {
    GroupError g{wltag::param_at(k), 0.0, 0};
    auto& t = params.values.tensors[k];
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double keep = t.data()[i];
      t.data()[i] = keep + eps;
      const double up = loss(params);
      t.data()[i] = keep - eps;
      const double down = loss(params);
      t.data()[i] = keep;
      const double fd = (up - down) / (2 * eps);
      const double an = analytic.tensors[k].data()[i];
      if (std::abs(fd) >= floor || std::abs(an) >= floor) g.max_relative = std::max(g.max_relative, relative_error(fd, an));
      ++g.entries;
    }
    out.push_back(g);
  }
  return out;
}

// Weak sentence from label names; each maximal B/I run becomes an anchor with
// probability 1 and an id-derived entity name.
inline wltag::WeaklyLabeledSentence weak_sentence(const wltag::TypeSystem& types, std::vector<std::string> tokens,
                                                  const std::vector<std::string>& labels, std::size_t id = 0,
                                                  std::string doc = "d0") {
  wltag::WeaklyLabeledSentence s;
  s.id = id;
  s.doc_id = std::move(doc);
  s.tokens = std::move(tokens);
  s.labels = labels_from(types, labels);
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    const LabelId y = s.labels[i];
    const bool begins = (types.is_typed(y) && wltag::TypeSystem::is_begin(y)) || y == types.begin_untyped();
    if (!begins) continue;
    std::size_t j = i + 1;
    const LabelId inside = y == types.begin_untyped() ? types.inside_untyped() : y + 1;
    while (j < s.labels.size() && s.labels[j] == inside) ++j;
    wltag::InducedAnchor a{i, j, "e" + std::to_string(i), types.type_of(y), 1.0};
    s.anchors.push_back(a);
  }
  return s;
}

// Induces and scores a synthetic corpus in memory (no files).
struct InducedSynth {
  wltag::TypeSystem types;
  std::vector<wltag::WeaklyLabeledSentence> weak;
};

inline InducedSynth induce_synth(const wltag::SynthCorpus& synth) {
  InducedSynth out{wltag::TypeSystem::build(synth.types), {}};
  wltag::TaxonomyGraph graph;
  for (const auto& [p, c] : synth.taxonomy_edges) graph.add_edge(p, c);
  wltag::GammaMapping gamma;
  for (const auto& [t, r] : synth.gamma) gamma.set(t, r);
  wltag::EntityCatalog catalog;
  for (const auto& e : synth.catalog) {
    std::vector<wltag::CategoryId> cats;
    for (const auto& c : e.categories)
      if (auto id = graph.find(c)) cats.push_back(*id);
    catalog.add(e.id, cats);
  }
  const wltag::TypeResolver resolver(out.types, graph, gamma);
  out.weak = wltag::induce_corpus(synth.corpus, catalog, resolver);
  const auto prior = wltag::estimate_link_prior(out.weak, out.types.num_types());
  wltag::score_corpus(out.weak, prior, out.types);
  return out;
}

}  // namespace fixtures
