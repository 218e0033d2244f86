#pragma once

// Linear-chain CRF over a label lattice. Emissions are |Y| x n (column per
// position, log-probabilities from the encoder); transitions are
// (|Y|+2) x (|Y|+2) with START = |Y| and STOP = |Y| + 1.

#include <cstddef>
#include <vector>

#include "wltag/labels.hpp"
#include "wltag/params.hpp"

namespace wltag {

// Allowed labels per position, kept sorted ascending.
class LabelLattice {
 public:
  LabelLattice() = default;
  explicit LabelLattice(std::vector<std::vector<LabelId>> allowed);

  static LabelLattice full(std::size_t length, std::size_t num_labels);
  static LabelLattice path(const std::vector<LabelId>& labels);

  std::size_t size() const { return allowed_.size(); }
  const std::vector<LabelId>& allowed(std::size_t i) const { return allowed_.at(i); }
  bool allows(std::size_t i, LabelId y) const;
  // Number of label sequences through the lattice (saturates at SIZE_MAX).
  std::size_t num_paths() const;

 private:
  std::vector<std::vector<LabelId>> allowed_;
};

// ỹ in Y -> {ỹ}; UN sampled -> {O}; UN -> Y; B-NT -> all B-t; I-NT -> all I-t.
// Throws ContractError when a sampled position is not UN.
LabelLattice build_lattice(const std::vector<LabelId>& weak_labels, const std::vector<std::size_t>& sampled_outside,
                           const TypeSystem& types);

struct ScoredSequence {
  std::vector<LabelId> labels;
  double score = 0.0;
};

// s(X, Y) accumulated left to right: A[START,y1] + P[1,y1] + A[y1,y2] + P[2,y2] + ... + A[yn,STOP].
double sequence_score(const Matrix& emissions, const Matrix& transitions, const std::vector<LabelId>& labels);

// Log-space forward recursion restricted to the lattice.
double log_partition(const Matrix& emissions, const Matrix& transitions, const LabelLattice& lattice);

struct LatticeMarginals {
  double log_z = 0.0;
  Matrix unary;       // |Y| x n; zero outside the lattice
  Matrix transition;  // (|Y|+2)^2 expected transition counts, boundaries included
};

LatticeMarginals forward_backward(const Matrix& emissions, const Matrix& transitions, const LabelLattice& lattice);

// Loss logZ(full) - logZ(constrained) >= 0. Gradients (optional) are added:
// marginal_full - marginal_constrained, per emission and per transition.
double pcrf_loss(const Matrix& emissions, const Matrix& transitions, const LabelLattice& constrained,
                 Matrix* d_emissions = nullptr, Matrix* d_transitions = nullptr);

// Standard CRF negative log-likelihood of one fully labeled path.
double crf_nll(const Matrix& emissions, const Matrix& transitions, const std::vector<LabelId>& labels);

// Unconstrained argmax; ties resolve toward the lower label index.
ScoredSequence viterbi_decode(const Matrix& emissions, const Matrix& transitions);

}  // namespace wltag
