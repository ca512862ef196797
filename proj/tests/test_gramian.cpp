#include <doctest.h>

#include "lma/gramian.hpp"
#include "lma/systems.hpp"

using namespace lma;

namespace {

StateMatrix worked() {
  MatrixXd a(2, 2);
  a << 0, 1, -2, -3;
  return StateMatrix(a);
}

double lyap_residual(const MatrixXd& a, const MatrixXd& p,
                     const MatrixXd& q) {
  return (a.transpose() * p + p * a + q).norm();
}

MatrixXd random_spd(int n, unsigned seed) {
  StateMatrix m = random_stable(n, seed, 0.1);
  return m.a * m.a.transpose() + MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("direct Lyapunov solve: residual and symmetry") {
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    int n = 3 + static_cast<int>(seed) * 3;
    StateMatrix a = random_stable(n, seed, 0.05);
    MatrixXd q = random_spd(n, seed + 100);
    MatrixXd p = solve_lyapunov(a, q);
    CHECK((p - p.transpose()).norm() < 1e-10 * p.norm());
    CHECK(lyap_residual(a.a, p, q) < 1e-10 * q.norm());
    // SPD right-hand side with a stable system gives a positive definite P
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(p);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("spectral Gramian agrees with the direct solver path") {
  for (unsigned seed : {5u, 6u, 7u}) {
    int n = 4 + static_cast<int>(seed);
    StateMatrix a = random_stable(n, seed, 0.05);
    EigenStructure eig = eigendecompose(a);
    MatrixXd q = random_spd(n, seed + 200);
    MatrixXd p_direct = solve_lyapunov(a, q);
    MatrixXd p_spectral = spectral_gramian(eig, q);
    CHECK((p_direct - p_spectral).norm() < 1e-9 * p_direct.norm());
  }
}

TEST_CASE("bundle decomposition identities") {
  for (unsigned seed : {8u, 9u}) {
    int n = 6 + static_cast<int>(seed);
    StateMatrix a = random_stable(n, seed, 0.05);
    EigenStructure eig = eigendecompose(a);
    MatrixXd q = random_spd(n, seed + 300);
    GramianBundle b = make_bundle(a, eig, q);
    REQUIRE(b.p.has_value());
    REQUIRE(b.divergent_pairs.empty());

    MatrixXcd sum_singles = MatrixXcd::Zero(n, n);
    for (const auto& s : b.singles) sum_singles += s;
    CHECK((sum_singles - b.p->cast<Complex>()).norm() < 1e-9 * b.p->norm());

    for (int i = 0; i < n; ++i) {
      MatrixXcd row = MatrixXcd::Zero(n, n);
      for (int j = 0; j < n; ++j) row += b.pairs[i][j];
      CHECK((row - b.singles[i]).norm() < 1e-9 * b.p->norm());
    }
  }
}

TEST_CASE("sub-Gramians satisfy their own Lyapunov equations") {
  StateMatrix a = random_stable(8, 13, 0.05);
  EigenStructure eig = eigendecompose(a);
  MatrixXd q = random_spd(8, 42);
  GramianBundle b = make_bundle(a, eig, q);
  ResidualReport rr = verify_bundle(a, eig, b);
  CHECK(rr.full < 1e-10 * q.norm());
  CHECK(rr.max_single < 1e-9 * q.norm());
  CHECK(rr.max_pair < 1e-9 * q.norm());
  for (const auto& s : b.singles)
    CHECK((s - s.adjoint()).norm() < 1e-12 * (1.0 + s.norm()));
}

TEST_CASE("single sub-Gramian is local: one eigentriple plus A suffices") {
  StateMatrix a = random_stable(10, 31, 0.05);
  EigenStructure eig = eigendecompose(a);
  MatrixXd q = random_spd(10, 7);
  GramianBundle b = make_bundle(a, eig, q);
  for (int i = 0; i < 10; ++i) {
    MatrixXcd local = sub_gramian_single(a, eig, q, i);
    CHECK((local - b.singles[i]).norm() < 1e-9 * (1.0 + b.singles[i].norm()));
  }
}

TEST_CASE("participation-factor path rebuilds the same sub-Gramians") {
  StateMatrix a = random_stable(6, 19, 0.05);
  EigenStructure eig = eigendecompose(a);
  PFMatrix pf = conventional_pf(eig);
  MatrixXd q = random_spd(6, 77);
  for (int i = 0; i < 6; ++i) {
    MatrixXcd via_pf = subgramian_via_pf(a, eig, pf, q, i);
    MatrixXcd direct = sub_gramian_single(a, eig, q, i);
    CHECK((via_pf - direct).norm() < 1e-9 * (1.0 + direct.norm()));
    for (int j = 0; j < 6; ++j) {
      MatrixXcd pair_pf = subgramian_via_pf(a, eig, pf, q, i, j);
      MatrixXcd pair = sub_gramian_pair(eig, q, i, j);
      CHECK((pair_pf - pair).norm() < 1e-9 * (1.0 + pair.norm()));
    }
  }
}

TEST_CASE("conjugate pairs give conjugate sub-Gramians") {
  std::vector<Complex> spec = {{-0.3, 1.5}, {-0.3, -1.5}, {-1.0, 0.0}};
  StateMatrix a = matrix_with_spectrum(spec, 3);
  EigenStructure eig = eigendecompose(a);
  MatrixXd q = MatrixXd::Identity(3, 3);
  MatrixXcd p1 = sub_gramian_single(a, eig, q, 0);
  MatrixXcd p2 = sub_gramian_single(a, eig, q, 1);
  CHECK((p1 - p2.conjugate()).norm() < 1e-10 * (1.0 + p1.norm()));
}

TEST_CASE("unstable systems: divergent pairs recorded, no full Gramian") {
  MatrixXd a(2, 2);
  a << 0.5, 0, 0, -1.0;
  StateMatrix sm(a);
  EigenStructure eig = eigendecompose(sm);
  CHECK(pair_divergent(eig, 0, 0));
  CHECK(!pair_divergent(eig, 1, 1));
  MatrixXd q = MatrixXd::Identity(2, 2);

  GramianBundle b = make_bundle(sm, eig, q);
  CHECK(!b.p.has_value());
  CHECK(b.divergent_pairs.count({0, 0}) == 1);
  CHECK_THROWS_AS(spectral_gramian(eig, q), DivergentPair);
  CHECK_THROWS_AS(sub_gramian_pair(eig, q, 0, 0), DivergentPair);
  // the stable mode's pair sub-Gramian still exists
  CHECK_NOTHROW(sub_gramian_pair(eig, q, 1, 1));
}

TEST_CASE("companion 2x2 identity-forced Gramian value") {
  // A^T P + P A = -I for A = [[0,1],[-2,-3]] has the closed form
  // P = [[5/4, 1/4], [1/4, 1/4]].
  MatrixXd p = solve_lyapunov(worked(), MatrixXd::Identity(2, 2));
  MatrixXd expected(2, 2);
  expected << 1.25, 0.25, 0.25, 0.25;
  CHECK((p - expected).norm() < 1e-12);
}
