#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dcmu/consensus.hpp"

using namespace dcmu;

namespace {

struct Spectrum {
  double lambda2{0.0};
  double lambda3{0.0};
  Eigen::VectorXd e2;
};

Spectrum oracle(const SquareMatrix& A) {
  const std::size_t n = A.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      L(i, j) = -A(i, j);
      L(i, i) += A(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  Spectrum s;
  s.lambda2 = es.eigenvalues()(1);
  s.lambda3 = n > 2 ? es.eigenvalues()(2) : std::numeric_limits<double>::infinity();
  s.e2 = es.eigenvectors().col(1);
  return s;
}

std::vector<ConsensusState> fresh(std::size_t n, const ConsensusParams& p) {
  std::vector<ConsensusState> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(make_consensus_state(i, n, p));
  return s;
}

SquareMatrix random_connected(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.1, 1.0);
  for (;;) {
    SquareMatrix A(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (u(rng) < 0.5) A(i, j) = A(j, i) = w(rng);
      }
    }
    const Spectrum s = oracle(A);
    if (s.lambda2 > 1e-6 && (n == 2 || s.lambda3 - s.lambda2 > 1e-3 * s.lambda3)) return A;
  }
}

bool same_state(const ConsensusState& a, const ConsensusState& b) {
  if (a.table.size() != b.table.size()) return false;
  for (std::size_t k = 0; k < a.table.size(); ++k) {
    const auto& x = a.table[k];
    const auto& y = b.table[k];
    if (x.present != y.present || x.x != y.x || x.x_lx != y.x_lx || x.degree != y.degree) {
      return false;
    }
  }
  return a.x_tilde == b.x_tilde && a.lambda2_tilde == b.lambda2_tilde &&
         a.e2_component == b.e2_component && a.estimate_complete == b.estimate_complete &&
         a.shift == b.shift && a.round == b.round && a.block == b.block &&
         a.restarts == b.restarts;
}

}  // namespace

TEST_CASE("two robots with weight w estimate 2w") {
  const ConsensusParams p;
  for (double w : {0.1, 0.5, 1.0}) {
    SquareMatrix A(2);
    A(0, 1) = A(1, 0) = w;
    auto s = fresh(2, p);
    run_consensus_epoch(s, A, 200, p);
    for (const auto& r : s) {
      CHECK(r.estimate_complete);
      CHECK(std::abs(r.lambda2_tilde - 2.0 * w) <= 0.05 * 2.0 * w);
    }
    CHECK(std::abs(std::abs(s[0].e2_component) - 1.0 / std::sqrt(2.0)) < 1e-6);
    CHECK(s[0].e2_component == doctest::Approx(-s[1].e2_component));
  }
}

TEST_CASE("isolated robots report zero") {
  const ConsensusParams p;
  auto s = fresh(3, p);
  run_consensus_epoch(s, SquareMatrix(3), 200, p);
  for (const auto& r : s) {
    CHECK(r.lambda2_tilde == 0.0);
    CHECK(r.e2_component == 0.0);
    CHECK_FALSE(r.estimate_complete);
  }
}

TEST_CASE("single robot") {
  const ConsensusParams p;
  auto s = fresh(1, p);
  run_consensus_epoch(s, SquareMatrix(1), 200, p);
  CHECK(s[0].lambda2_tilde == 0.0);
  CHECK(std::isfinite(s[0].x_tilde));
}

TEST_CASE("disconnected team is not reported as connected") {
  const ConsensusParams p;
  SquareMatrix A(4);
  A(0, 1) = A(1, 0) = 1.0;
  A(2, 3) = A(3, 2) = 1.0;
  auto s = fresh(4, p);
  run_consensus_epoch(s, A, 200, p);
  for (const auto& r : s) {
    CHECK_FALSE(r.estimate_complete);
    CHECK(r.lambda2_tilde == 0.0);
  }
}

TEST_CASE("equal initial components restart instead of dividing by zero") {
  const ConsensusParams p;
  SquareMatrix A(3);
  A(0, 1) = A(1, 0) = A(1, 2) = A(2, 1) = 1.0;
  auto s = fresh(3, p);
  for (auto& r : s) r.x_tilde = 0.7;
  const auto diag = run_consensus_epoch(s, A, 200, p);
  CHECK(diag.restarts == 3);
  for (const auto& r : s) {
    CHECK(std::isfinite(r.x_tilde));
    CHECK(std::abs(r.lambda2_tilde - 1.0) <= 0.05);
  }
}

TEST_CASE("path of three") {
  const ConsensusParams p;
  SquareMatrix A(3);
  A(0, 1) = A(1, 0) = A(1, 2) = A(2, 1) = 1.0;
  auto s = fresh(3, p);
  run_consensus_epoch(s, A, 200, p);
  for (const auto& r : s) CHECK(std::abs(r.lambda2_tilde - 1.0) <= 0.05);
  CHECK(std::abs(s[1].e2_component) < 0.05);
  CHECK(s[0].e2_component * s[2].e2_component < 0.0);
}

TEST_CASE("random connected graphs converge to the oracle") {
  const ConsensusParams p;
  std::mt19937_64 rng(2024);
  for (int g = 0; g < 20; ++g) {
    const std::size_t n = 2 + g % 5;
    const SquareMatrix A = random_connected(rng, n);
    const Spectrum ref = oracle(A);
    auto s = fresh(n, p);
    run_consensus_epoch(s, A, 200, p);
    const double tol = ref.lambda2 < 1.0 ? 0.05 : 0.05 * ref.lambda2;
    for (const auto& r : s) CHECK(std::abs(r.lambda2_tilde - ref.lambda2) <= tol);

    // Direction check after a longer run.
    run_consensus_epoch(s, A, 800, p);
    double dotp = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dotp += s[i].e2_component * ref.e2(static_cast<Eigen::Index>(i));
      norm += s[i].e2_component * s[i].e2_component;
    }
    CHECK(std::abs(dotp) / std::sqrt(norm) >= 0.95);
  }
}

TEST_CASE("estimates stay bounded over long runs") {
  const ConsensusParams p;
  std::mt19937_64 rng(77);
  const SquareMatrix A = random_connected(rng, 6);
  auto s = fresh(6, p);
  for (int k = 0; k < 10; ++k) {
    run_consensus_epoch(s, A, 1000, p);
    for (const auto& r : s) {
      CHECK(std::isfinite(r.x_tilde));
      CHECK(std::abs(r.x_tilde) <= 1.0 + 1e-9);
      CHECK(r.lambda2_tilde >= 0.0);
      CHECK(r.lambda2_tilde <= 12.0);
    }
  }
}

TEST_CASE("serial and parallel epochs agree bitwise") {
  const ConsensusParams p;
  std::mt19937_64 rng(5);
  for (int g = 0; g < 5; ++g) {
    const SquareMatrix A = random_connected(rng, 6);
    auto a = fresh(6, p);
    auto b = fresh(6, p);
    run_consensus_epoch(a, A, 300, p, ExecPolicy::serial);
    run_consensus_epoch(b, A, 300, p, ExecPolicy::parallel);
    for (std::size_t i = 0; i < 6; ++i) CHECK(same_state(a[i], b[i]));
  }
}

TEST_CASE("runs are deterministic in the seed") {
  std::mt19937_64 rng(6);
  const SquareMatrix A = random_connected(rng, 5);
  ConsensusParams p;
  auto a = fresh(5, p);
  auto b = fresh(5, p);
  run_consensus_epoch(a, A, 123, p);
  run_consensus_epoch(b, A, 123, p);
  for (std::size_t i = 0; i < 5; ++i) CHECK(same_state(a[i], b[i]));
  p.seed = 99;
  auto c = fresh(5, p);
  CHECK(c[0].x_tilde != a[0].x_tilde);
}

TEST_CASE("non-finite messages are dropped") {
  const ConsensusParams p;
  ConsensusState self = make_consensus_state(0, 3, p);
  ConsensusState good = make_consensus_state(1, 3, p);
  ConsensusState bad = make_consensus_state(2, 3, p);
  bad.x_tilde = std::numeric_limits<double>::quiet_NaN();
  const NeighborMessage mg = make_message(good);
  const NeighborMessage mb = make_message(bad);
  const std::vector<InboxEntry> inbox{{&mg, 1.0}, {&mb, 1.0}};
  ConsensusDiagnostics diag;
  const ConsensusState next = consensus_round(self, inbox, p, &diag);
  CHECK(diag.dropped_messages == 1);
  CHECK(std::isfinite(next.x_tilde));
  const std::vector<InboxEntry> only_good{{&mg, 1.0}};
  CHECK(next.x_tilde == consensus_round(self, only_good, p).x_tilde);

  const std::vector<InboxEntry> bad_weight{{&mg, std::numeric_limits<double>::infinity()}};
  ConsensusDiagnostics d2;
  CHECK(std::isfinite(consensus_round(self, bad_weight, p, &d2).x_tilde));
  CHECK(d2.dropped_messages == 1);
}

TEST_CASE("a round depends only on the robot and its inbox") {
  const ConsensusParams p;
  SquareMatrix A(5);
  for (std::size_t i = 0; i + 1 < 5; ++i) A(i, i + 1) = A(i + 1, i) = 1.0;
  auto s = fresh(5, p);
  run_consensus_epoch(s, A, 7, p);

  auto base = s;
  run_consensus_epoch(base, A, 1, p);

  // Robots two or more hops from robot 0 change; robot 0's next state does not.
  auto perturbed = s;
  perturbed[2].x_tilde += 3.0;
  perturbed[3].x_tilde -= 1.0;
  perturbed[4].table.assign(5, FloodEntry{true, 9.0, 9.0, 9.0});
  run_consensus_epoch(perturbed, A, 1, p);
  CHECK(same_state(base[0], perturbed[0]));
  CHECK_FALSE(same_state(base[1], perturbed[1]));

  // Weights a robot does not hold are never read.
  SquareMatrix B = A;
  B(3, 4) = B(4, 3) = 0.5;
  auto other = s;
  run_consensus_epoch(other, B, 1, p);
  CHECK(same_state(base[0], other[0]));
  CHECK(same_state(base[1], other[1]));
}

TEST_CASE("invalid arguments") {
  const ConsensusParams p;
  CHECK_THROWS_AS(make_consensus_state(3, 3, p), std::invalid_argument);
  CHECK_THROWS_AS(make_consensus_state(0, 0, p), std::invalid_argument);
  auto s = fresh(2, p);
  CHECK_THROWS_AS(run_consensus_epoch(s, SquareMatrix(3), 10, p), std::invalid_argument);
  CHECK_THROWS_AS(run_consensus_epoch(s, SquareMatrix(2), 0, p), std::invalid_argument);
}
