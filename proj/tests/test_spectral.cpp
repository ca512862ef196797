#include <doctest.h>

#include "lma/spectral.hpp"
#include "lma/systems.hpp"

using namespace lma;

namespace {

StateMatrix worked() {
  MatrixXd a(2, 2);
  a << 0, 1, -2, -3;
  return StateMatrix(a);
}

}  // namespace

TEST_CASE("companion 2x2: eigenvalues ordered least damped first") {
  EigenStructure eig = eigendecompose(worked());
  CHECK(eig.lambdas(0).real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.lambdas(0).imag() == doctest::Approx(0.0));
  CHECK(eig.lambdas(1).real() == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(eig.is_stable());
  CHECK(eig.spectral_abscissa() == doctest::Approx(-1.0));
  CHECK(eig.min_gap == doctest::Approx(1.0));
}

TEST_CASE("eigenvector conventions: biorthogonality, unit norm, phase") {
  StateMatrix a = random_stable(7, 11, 0.1);
  EigenStructure eig = eigendecompose(a);
  const int n = eig.n();

  MatrixXcd vu = eig.v * eig.u;
  CHECK((vu - MatrixXcd::Identity(n, n)).norm() < 1e-10);
  MatrixXcd uv = eig.u * eig.v;
  CHECK((uv - MatrixXcd::Identity(n, n)).norm() < 1e-10);

  for (int i = 0; i < n; ++i) {
    CHECK(eig.u.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // phase: the largest-magnitude component of u_i is real positive
    int arg = 0;
    eig.u.col(i).cwiseAbs().maxCoeff(&arg);
    CHECK(eig.u(arg, i).imag() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(eig.u(arg, i).real() > 0.0);
    // A u_i = lambda_i u_i
    CHECK((a.a.cast<Complex>() * eig.u.col(i) -
           eig.lambdas(i) * eig.u.col(i))
              .norm() < 1e-9);
  }
}

TEST_CASE("conjugate pairs adjacent, +Im first, conjugate vectors") {
  std::vector<Complex> spec = {{-0.5, 0.0},
                               {-1.0, 2.0},
                               {-1.0, -2.0},
                               {-3.0, 0.0}};
  StateMatrix a = matrix_with_spectrum(spec, 5);
  EigenStructure eig = eigendecompose(a);

  // ordering: Re descending, so -0.5, then the pair, then -3
  CHECK(eig.lambdas(0).real() == doctest::Approx(-0.5));
  CHECK(eig.lambdas(1) == std::conj(eig.lambdas(2)));
  CHECK(eig.lambdas(1).imag() > 0.0);
  CHECK(eig.lambdas(3).real() == doctest::Approx(-3.0));

  CHECK(eig.conj_pair[0] == 0);
  CHECK(eig.conj_pair[1] == 2);
  CHECK(eig.conj_pair[2] == 1);
  CHECK(eig.conj_pair[3] == 3);
  CHECK(eig.is_real_mode(0));
  CHECK(!eig.is_real_mode(1));

  CHECK((eig.u.col(2) - eig.u.col(1).conjugate()).norm() < 1e-10);
  CHECK((eig.v.row(2) - eig.v.row(1).conjugate()).norm() < 1e-10);
  // real modes carry exactly real vectors
  CHECK(eig.u.col(0).imag().norm() == 0.0);
  CHECK(eig.v.row(0).imag().norm() == 0.0);
}

TEST_CASE("non-simple spectrum is rejected") {
  MatrixXd jordan(2, 2);
  jordan << -1, 1, 0, -1;
  CHECK_THROWS_AS(eigendecompose(StateMatrix(jordan)), NonSimpleSpectrum);

  MatrixXd repeated = -MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(eigendecompose(StateMatrix(repeated)), NonSimpleSpectrum);

  // tolerance controls the separation requirement
  MatrixXd close(2, 2);
  close << -1.0, 0.0, 0.0, -1.0 + 1e-6;
  CHECK_THROWS_AS(eigendecompose(StateMatrix(close), 1e-3),
                  NonSimpleSpectrum);
  CHECK_NOTHROW(eigendecompose(StateMatrix(close), 1e-9));
}

TEST_CASE("residues: completeness and idempotence") {
  EigenStructure eig = eigendecompose(worked());
  ResidueSet rs = residues(eig);

  MatrixXcd r1_expected(2, 2), r2_expected(2, 2);
  r1_expected << 2, 1, -2, -1;
  r2_expected << -1, -1, 2, 2;
  CHECK((rs.r[0] - r1_expected).norm() < 1e-10);
  CHECK((rs.r[1] - r2_expected).norm() < 1e-10);

  StateMatrix a = random_stable(6, 3, 0.1);
  EigenStructure e2 = eigendecompose(a);
  ResidueSet rs2 = residues(e2);
  MatrixXcd sum = MatrixXcd::Zero(6, 6);
  for (const auto& r : rs2.r) sum += r;
  CHECK((sum - MatrixXcd::Identity(6, 6)).norm() < 1e-10);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      MatrixXcd prod = rs2.r[i] * rs2.r[j];
      if (i == j)
        CHECK((prod - rs2.r[i]).norm() < 1e-9);
      else
        CHECK(prod.norm() < 1e-9);
    }
}

TEST_CASE("conventional participation factors on the companion 2x2") {
  EigenStructure eig = eigendecompose(worked());
  PFMatrix pf = conventional_pf(eig);
  REQUIRE(pf.kind == PFKind::ConventionalMis);

  CHECK(pf.values(0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pf.values(0, 1).real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pf.values(1, 0).real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pf.values(1, 1).real() == doctest::Approx(2.0).epsilon(1e-12));

  // generalized entry p_{k=1, i=1, l=2} = u_1^1 v_1^2 = 1
  CHECK(pf.gen[0](0, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
  // diagonal of gen reproduces the two-index values
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(pf.gen[i](k, k) - pf.values(k, i)) < 1e-12);
}

TEST_CASE("participation factor normalization rows and columns") {
  for (unsigned seed : {1u, 2u, 3u}) {
    StateMatrix a = random_stable(8, seed, 0.05);
    EigenStructure eig = eigendecompose(a);
    PFMatrix pf = conventional_pf(eig);
    for (int k = 0; k < 8; ++k)
      CHECK(std::abs(pf.values.row(k).sum() - 1.0) < 1e-9);
    for (int i = 0; i < 8; ++i)
      CHECK(std::abs(pf.values.col(i).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("state-in-mode participation: nonnegative, rows sum to one") {
  StateMatrix a = random_stable(6, 9, 0.05);
  EigenStructure eig = eigendecompose(a);
  PFMatrix pf = simpf(eig);
  REQUIRE(pf.kind == PFKind::Simpf);
  for (int i = 0; i < 6; ++i) {
    double col = 0.0;
    for (int k = 0; k < 6; ++k) {
      CHECK(pf.values(k, i).imag() == 0.0);
      CHECK(pf.values(k, i).real() >= 0.0);
      col += pf.values(k, i).real();
    }
    CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
  }

  MatrixXd diag = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
  PFMatrix pfd = simpf(eigendecompose(StateMatrix(diag)));
  CHECK(pfd.values(0, 0).real() == doctest::Approx(1.0));
  CHECK(pfd.values(1, 0).real() == doctest::Approx(0.0));
}

TEST_CASE("generalized participations match finite-difference sensitivity") {
  for (unsigned seed : {21u, 22u}) {
    StateMatrix a = random_stable(5, seed, 0.1);
    EigenStructure eig = eigendecompose(a);
    SensitivityReport rep = eigenvalue_sensitivity_check(a, eig, 1e-6);
    CHECK(rep.max_rel_deviation < 1e-4);
  }
}

TEST_CASE("decomposition reconstructs the matrix") {
  StateMatrix a = random_stable(9, 17, 0.05);
  EigenStructure eig = eigendecompose(a);
  MatrixXcd rebuilt = eig.u * eig.lambdas.asDiagonal() * eig.v;
  CHECK((rebuilt - a.a.cast<Complex>()).norm() < 1e-9 * a.a.norm());
  CHECK(rebuilt.imag().norm() < 1e-9 * a.a.norm());
}
