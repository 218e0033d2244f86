#include "wltag/pcrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wltag/error.hpp"

namespace wltag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))) with max shift. A single finite entry is returned as-is.
double log_sum_exp(const double* v, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

void check_shapes(const Matrix& emissions, const Matrix& transitions, std::size_t length) {
  const auto K = emissions.rows();
  if (transitions.rows() != K + 2 || transitions.cols() != K + 2)
    throw ContractError("transition matrix must be (|Y|+2) x (|Y|+2)");
  if (static_cast<std::size_t>(emissions.cols()) != length)
    throw ContractError("emission length does not match the label sequence / lattice");
  if (length == 0) throw ContractError("empty sentence");
}

void check_lattice(const LabelLattice& lattice, Eigen::Index K) {
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (lattice.allowed(i).empty()) throw ContractError("lattice position " + std::to_string(i) + " allows no label");
    for (LabelId y : lattice.allowed(i))
      if (y < 0 || y >= K) throw ContractError("lattice label outside Y");
  }
}

// alpha(y, i) for y in M_i; entries outside the lattice stay -inf.
Matrix forward_scores(const Matrix& P, const Matrix& A, const LabelLattice& lattice, double& log_z) {
  const auto K = P.rows();
  const auto n = P.cols();
  const Eigen::Index start = K, stop = K + 1;
  Matrix alpha = Matrix::Constant(K, n, kNegInf);
  std::vector<double> buf(static_cast<std::size_t>(K));

  for (LabelId y : lattice.allowed(0)) alpha(y, 0) = A(start, y) + P(y, 0);
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto& prev = lattice.allowed(static_cast<std::size_t>(i - 1));
    for (LabelId y : lattice.allowed(static_cast<std::size_t>(i))) {
      for (std::size_t k = 0; k < prev.size(); ++k) buf[k] = alpha(prev[k], i - 1) + A(prev[k], y);
      alpha(y, i) = log_sum_exp(buf.data(), prev.size()) + P(y, i);
    }
  }
  const auto& last = lattice.allowed(static_cast<std::size_t>(n - 1));
  for (std::size_t k = 0; k < last.size(); ++k) buf[k] = alpha(last[k], n - 1) + A(last[k], stop);
  log_z = log_sum_exp(buf.data(), last.size());
  return alpha;
}

}  // namespace

LabelLattice::LabelLattice(std::vector<std::vector<LabelId>> allowed) : allowed_(std::move(allowed)) {
  for (auto& a : allowed_) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
}

LabelLattice LabelLattice::full(std::size_t length, std::size_t num_labels) {
  std::vector<LabelId> all(num_labels);
  for (std::size_t y = 0; y < num_labels; ++y) all[y] = static_cast<LabelId>(y);
  return LabelLattice(std::vector<std::vector<LabelId>>(length, all));
}

LabelLattice LabelLattice::path(const std::vector<LabelId>& labels) {
  std::vector<std::vector<LabelId>> allowed;
  allowed.reserve(labels.size());
  for (LabelId y : labels) allowed.push_back({y});
  return LabelLattice(std::move(allowed));
}

bool LabelLattice::allows(std::size_t i, LabelId y) const {
  const auto& a = allowed_.at(i);
  return std::binary_search(a.begin(), a.end(), y);
}

std::size_t LabelLattice::num_paths() const {
  std::size_t n = allowed_.empty() ? 0 : 1;
  for (const auto& a : allowed_) {
    if (a.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / a.size()) return std::numeric_limits<std::size_t>::max();
    n *= a.size();
  }
  return n;
}

LabelLattice build_lattice(const std::vector<LabelId>& weak_labels, const std::vector<std::size_t>& sampled_outside,
                           const TypeSystem& types) {
  std::vector<bool> sampled(weak_labels.size(), false);
  for (std::size_t i : sampled_outside) {
    if (i >= weak_labels.size() || weak_labels[i] != types.unlabeled())
      throw ContractError("sampled position " + std::to_string(i) + " is not UN");
    sampled[i] = true;
  }
  std::vector<LabelId> all, begins, insides;
  for (std::size_t y = 0; y < types.num_labels(); ++y) all.push_back(static_cast<LabelId>(y));
  for (std::size_t t = 0; t < types.num_types(); ++t) {
    begins.push_back(TypeSystem::begin(t));
    insides.push_back(TypeSystem::inside(t));
  }

  std::vector<std::vector<LabelId>> allowed;
  allowed.reserve(weak_labels.size());
  for (std::size_t i = 0; i < weak_labels.size(); ++i) {
    const LabelId y = weak_labels[i];
    if (types.is_typed(y))
      allowed.push_back({y});
    else if (y == types.unlabeled())
      allowed.push_back(sampled[i] ? std::vector<LabelId>{TypeSystem::outside()} : all);
    else if (y == types.begin_untyped())
      allowed.push_back(begins);
    else if (y == types.inside_untyped())
      allowed.push_back(insides);
    else
      throw ContractError("weak label outside the weak inventory");
  }
  return LabelLattice(std::move(allowed));
}

double sequence_score(const Matrix& emissions, const Matrix& transitions, const std::vector<LabelId>& labels) {
  check_shapes(emissions, transitions, labels.size());
  const auto K = emissions.rows();
  for (LabelId y : labels)
    if (y < 0 || y >= K) throw ContractError("label outside Y");
  const Eigen::Index start = K, stop = K + 1;
  double s = transitions(start, labels[0]) + emissions(labels[0], 0);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    s = s + transitions(labels[i - 1], labels[i]);
    s = s + emissions(labels[i], static_cast<Eigen::Index>(i));
  }
  return s + transitions(labels.back(), stop);
}

double log_partition(const Matrix& emissions, const Matrix& transitions, const LabelLattice& lattice) {
  check_shapes(emissions, transitions, lattice.size());
  check_lattice(lattice, emissions.rows());
  double log_z = 0.0;
  forward_scores(emissions, transitions, lattice, log_z);
  return log_z;
}

LatticeMarginals forward_backward(const Matrix& emissions, const Matrix& transitions, const LabelLattice& lattice) {
  check_shapes(emissions, transitions, lattice.size());
  check_lattice(lattice, emissions.rows());
  const Matrix& P = emissions;
  const Matrix& A = transitions;
  const auto K = P.rows();
  const auto n = P.cols();
  const Eigen::Index start = K, stop = K + 1;

  LatticeMarginals out;
  const Matrix alpha = forward_scores(P, A, lattice, out.log_z);

  Matrix beta = Matrix::Constant(K, n, kNegInf);
  std::vector<double> buf(static_cast<std::size_t>(K));
  for (LabelId y : lattice.allowed(static_cast<std::size_t>(n - 1))) beta(y, n - 1) = A(y, stop);
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const auto& next = lattice.allowed(static_cast<std::size_t>(i + 1));
    for (LabelId y : lattice.allowed(static_cast<std::size_t>(i))) {
      for (std::size_t k = 0; k < next.size(); ++k) buf[k] = A(y, next[k]) + P(next[k], i + 1) + beta(next[k], i + 1);
      beta(y, i) = log_sum_exp(buf.data(), next.size());
    }
  }

  out.unary = Matrix::Zero(K, n);
  out.transition = Matrix::Zero(K + 2, K + 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (LabelId y : lattice.allowed(static_cast<std::size_t>(i)))
      out.unary(y, i) = std::exp(alpha(y, i) + beta(y, i) - out.log_z);

  for (LabelId y : lattice.allowed(0)) out.transition(start, y) += out.unary(y, 0);
  for (LabelId y : lattice.allowed(static_cast<std::size_t>(n - 1))) out.transition(y, stop) += out.unary(y, n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (LabelId y : lattice.allowed(static_cast<std::size_t>(i)))
      for (LabelId y2 : lattice.allowed(static_cast<std::size_t>(i + 1)))
        out.transition(y, y2) += std::exp(alpha(y, i) + A(y, y2) + P(y2, i + 1) + beta(y2, i + 1) - out.log_z);
  }
  return out;
}

double pcrf_loss(const Matrix& emissions, const Matrix& transitions, const LabelLattice& constrained,
                 Matrix* d_emissions, Matrix* d_transitions) {
  const auto full = LabelLattice::full(constrained.size(), static_cast<std::size_t>(emissions.rows()));
  if (!d_emissions && !d_transitions)
    return log_partition(emissions, transitions, full) - log_partition(emissions, transitions, constrained);

  const auto mf = forward_backward(emissions, transitions, full);
  const auto mc = forward_backward(emissions, transitions, constrained);
  if (d_emissions) *d_emissions += mf.unary - mc.unary;
  if (d_transitions) *d_transitions += mf.transition - mc.transition;
  return mf.log_z - mc.log_z;
}

double crf_nll(const Matrix& emissions, const Matrix& transitions, const std::vector<LabelId>& labels) {
  const auto full = LabelLattice::full(labels.size(), static_cast<std::size_t>(emissions.rows()));
  return log_partition(emissions, transitions, full) - sequence_score(emissions, transitions, labels);
}

ScoredSequence viterbi_decode(const Matrix& emissions, const Matrix& transitions) {
  check_shapes(emissions, transitions, static_cast<std::size_t>(emissions.cols()));
  const Matrix& P = emissions;
  const Matrix& A = transitions;
  const auto K = P.rows();
  const auto n = P.cols();
  const Eigen::Index start = K, stop = K + 1;

  Matrix delta(K, n);
  Eigen::MatrixXi back(K, n);
  for (Eigen::Index y = 0; y < K; ++y) delta(y, 0) = A(start, y) + P(y, 0);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index y = 0; y < K; ++y) {
      Eigen::Index best = 0;
      double best_v = delta(0, i - 1) + A(0, y);
      for (Eigen::Index y2 = 1; y2 < K; ++y2) {
        const double v = delta(y2, i - 1) + A(y2, y);
        if (v > best_v) {
          best_v = v;
          best = y2;
        }
      }
      delta(y, i) = best_v + P(y, i);
      back(y, i) = static_cast<int>(best);
    }
  }
  Eigen::Index best = 0;
  double best_v = delta(0, n - 1) + A(0, stop);
  for (Eigen::Index y = 1; y < K; ++y) {
    const double v = delta(y, n - 1) + A(y, stop);
    if (v > best_v) {
      best_v = v;
      best = y;
    }
  }
  ScoredSequence out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    out.labels[static_cast<std::size_t>(i)] = static_cast<LabelId>(best);
    if (i > 0) best = back(best, i);
  }
  out.score = sequence_score(P, A, out.labels);
  return out;
}

}  // namespace wltag
