#include <doctest.h>

#include "fixtures.hpp"
#include "wltag/error.hpp"
#include "wltag/pcrf.hpp"

using namespace wltag;
using fixtures::enumerate;
using fixtures::random_matrix;

namespace {

LabelLattice random_lattice(std::size_t n, std::size_t K, Rng& rng) {
  std::vector<std::vector<LabelId>> allowed(n);
  for (auto& m : allowed) {
    for (std::size_t y = 0; y < K; ++y)
      if (rng.uniform() < 0.5) m.push_back(static_cast<LabelId>(y));
    if (m.empty()) m.push_back(static_cast<LabelId>(rng.below(K)));
  }
  return LabelLattice(std::move(allowed));
}

}  // namespace

TEST_CASE("lattice construction from weak labels") {
  const auto types = fixtures::per_loc_org();
  const auto lat = build_lattice(fixtures::labels_from(types, {"B-ORG", "I-ORG", "UN"}), {}, types);
  CHECK(lat.allowed(0) == std::vector<LabelId>{types.label("B-ORG")});
  CHECK(lat.allowed(1) == std::vector<LabelId>{types.label("I-ORG")});
  CHECK(lat.allowed(2).size() == 7);

  const auto pinned = build_lattice({types.unlabeled()}, {0}, types);
  CHECK(pinned.allowed(0) == std::vector<LabelId>{TypeSystem::outside()});

  const auto nt = build_lattice(fixtures::labels_from(types, {"B-NT", "I-NT"}), {}, types);
  CHECK(nt.allowed(0) == std::vector<LabelId>{1, 3, 5});
  CHECK(nt.allowed(1) == std::vector<LabelId>{2, 4, 6});
  CHECK(nt.num_paths() == 9);

  CHECK_THROWS_AS(build_lattice(fixtures::labels_from(types, {"B-PER", "UN"}), {0}, types), ContractError);
  CHECK_THROWS_AS(log_partition(Matrix::Zero(7, 2), Matrix::Zero(9, 9), LabelLattice({{0}, {}})), ContractError);
}

TEST_CASE("sequence score unrolls term by term") {
  Rng rng(1);
  const Matrix E = random_matrix(7, 4, rng), A = random_matrix(9, 9, rng);
  for (int t = 0; t < 50; ++t) {
    std::vector<LabelId> y(4);
    for (auto& v : y) v = static_cast<LabelId>(rng.below(7));
    CHECK(sequence_score(E, A, y) == doctest::Approx(fixtures::oracle_score(E, A, y)).epsilon(1e-13));
  }
  const Matrix E1 = random_matrix(7, 1, rng);
  CHECK(sequence_score(E1, A, {3}) == A(7, 3) + E1(3, 0) + A(3, 8));
  const Matrix Z = Matrix::Zero(9, 9);
  CHECK(sequence_score(E, Z, {0, 1, 2, 3}) == doctest::Approx(E(0, 0) + E(1, 1) + E(2, 2) + E(3, 3)));
  CHECK_THROWS_AS(sequence_score(E, A, {0, 1}), ContractError);
}

TEST_CASE("log partition matches exhaustive enumeration") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.below(5);
    const Matrix E = random_matrix(7, static_cast<Eigen::Index>(n), rng, 3.0);
    const Matrix A = random_matrix(9, 9, rng, 2.0);
    const auto full = LabelLattice::full(n, 7);
    CHECK(std::abs(log_partition(E, A, full) - enumerate(E, A, nullptr).log_z) < 1e-9);
    const auto lat = random_lattice(n, 7, rng);
    CHECK(std::abs(log_partition(E, A, lat) - enumerate(E, A, &lat).log_z) < 1e-9);
  }
  // One token, two labels, zero transitions.
  Matrix E(3, 1);
  E << 0.2, -1.0, 0.7;
  const double expect = std::log(std::exp(0.2) + std::exp(0.7));
  CHECK(log_partition(E, Matrix::Zero(5, 5), LabelLattice({{0, 2}})) == doctest::Approx(expect).epsilon(1e-14));
  // A single-path lattice reproduces the path score exactly.
  const Matrix E4 = random_matrix(7, 4, rng), A4 = random_matrix(9, 9, rng);
  const std::vector<LabelId> path{1, 2, 0, 5};
  CHECK(log_partition(E4, A4, LabelLattice::path(path)) == sequence_score(E4, A4, path));
}

TEST_CASE("log partition stays finite on long sentences with large scores") {
  Rng rng(3);
  const Matrix E = random_matrix(7, 256, rng, 50.0), A = random_matrix(9, 9, rng, 50.0);
  const double z = log_partition(E, A, LabelLattice::full(256, 7));
  CHECK(std::isfinite(z));
  CHECK(z >= viterbi_decode(E, A).score);
}

TEST_CASE("marginals are distributions and match finite differences") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + rng.below(4);
    const Matrix E = random_matrix(7, static_cast<Eigen::Index>(n), rng);
    const Matrix A = random_matrix(9, 9, rng);
    const auto lat = random_lattice(n, 7, rng);
    const auto m = forward_backward(E, A, lat);
    CHECK(m.log_z == doctest::Approx(log_partition(E, A, lat)).epsilon(1e-13));
    for (std::size_t i = 0; i < n; ++i) CHECK(m.unary.col(static_cast<Eigen::Index>(i)).sum() == doctest::Approx(1.0).epsilon(1e-12));
    // n - 1 inner transitions plus START and STOP.
    CHECK(m.transition.sum() == doctest::Approx(static_cast<double>(n + 1)).epsilon(1e-12));
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < E.cols(); ++i)
      for (Eigen::Index y = 0; y < E.rows(); ++y) {
        Matrix Ep = E, Em = E;
        Ep(y, i) += h;
        Em(y, i) -= h;
        const double fd = (log_partition(Ep, A, lat) - log_partition(Em, A, lat)) / (2 * h);
        CHECK(std::abs(fd - m.unary(y, i)) < 1e-7);
      }
  }
}

TEST_CASE("partial CRF loss") {
  const auto types = fixtures::per_loc_org();
  Rng rng(5);
  const Matrix E = random_matrix(7, 4, rng), A = random_matrix(9, 9, rng);
  CHECK(pcrf_loss(E, A, LabelLattice::full(4, 7)) == 0.0);

  const std::vector<LabelId> gold{1, 2, 0, 3};
  const double nll = pcrf_loss(E, A, LabelLattice::path(gold));
  CHECK(nll == crf_nll(E, A, gold));
  CHECK(nll == doctest::Approx(enumerate(E, A, nullptr).log_z - fixtures::oracle_score(E, A, gold)).epsilon(1e-12));

  for (int t = 0; t < 20; ++t) {
    const auto lat = random_lattice(4, 7, rng);
    const double loss = pcrf_loss(E, A, lat);
    CHECK(loss >= 0.0);
    // Shifting one position's emissions moves both partitions equally.
    Matrix shifted = E;
    shifted.col(2).array() += 3.7;
    CHECK(pcrf_loss(shifted, A, lat) == doctest::Approx(loss).epsilon(1e-9));
    // Removing a label can only lower the constrained partition.
    auto allowed = lat.allowed(1);
    if (allowed.size() > 1) {
      std::vector<std::vector<LabelId>> fewer;
      for (std::size_t i = 0; i < 4; ++i) fewer.push_back(lat.allowed(i));
      fewer[1].pop_back();
      CHECK(log_partition(E, A, LabelLattice(fewer)) <= log_partition(E, A, lat) + 1e-12);
    }
  }
}

TEST_CASE("partial CRF gradients match central differences") {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 1 + rng.below(5);
    const Matrix E = random_matrix(7, static_cast<Eigen::Index>(n), rng);
    const Matrix A = random_matrix(9, 9, rng);
    const auto lat = random_lattice(n, 7, rng);
    Matrix dE = Matrix::Zero(7, static_cast<Eigen::Index>(n)), dA = Matrix::Zero(9, 9);
    pcrf_loss(E, A, lat, &dE, &dA);
    const double h = 1e-4;
    for (Eigen::Index i = 0; i < E.size(); ++i) {
      Matrix p = E, m = E;
      p.data()[i] += h;
      m.data()[i] -= h;
      const double fd = (pcrf_loss(p, A, lat) - pcrf_loss(m, A, lat)) / (2 * h);
      CHECK((fixtures::relative_error(fd, dE.data()[i]) <= 1e-4 || std::abs(fd - dE.data()[i]) < 1e-9));
    }
    for (Eigen::Index i = 0; i < A.size(); ++i) {
      Matrix p = A, m = A;
      p.data()[i] += h;
      m.data()[i] -= h;
      const double fd = (pcrf_loss(E, p, lat) - pcrf_loss(E, m, lat)) / (2 * h);
      CHECK((fixtures::relative_error(fd, dA.data()[i]) <= 1e-4 || std::abs(fd - dA.data()[i]) < 1e-9));
    }
  }
}

TEST_CASE("viterbi finds the enumeration argmax") {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.below(5);
    const Matrix E = random_matrix(7, static_cast<Eigen::Index>(n), rng, 2.0);
    const Matrix A = random_matrix(9, 9, rng, 2.0);
    const auto best = viterbi_decode(E, A);
    const auto oracle = enumerate(E, A, nullptr);
    CHECK(best.labels == oracle.best);
    CHECK(best.score == sequence_score(E, A, best.labels));
  }
  const Matrix E = random_matrix(7, 5, rng);
  const auto dominant = viterbi_decode(E, Matrix::Zero(9, 9));
  for (Eigen::Index i = 0; i < 5; ++i) {
    Eigen::Index arg;
    E.col(i).maxCoeff(&arg);
    CHECK(dominant.labels[static_cast<std::size_t>(i)] == static_cast<LabelId>(arg));
  }
  // Exact ties resolve to the lowest label.
  CHECK(viterbi_decode(Matrix::Zero(7, 3), Matrix::Zero(9, 9)).labels == std::vector<LabelId>{0, 0, 0});
  Matrix tie = Matrix::Constant(7, 1, -1.0);
  tie(4, 0) = tie(6, 0) = 0.0;
  CHECK(viterbi_decode(tie, Matrix::Zero(9, 9)).labels == std::vector<LabelId>{4});
}
