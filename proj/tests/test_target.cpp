#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "gmc/errors.hpp"
#include "gmc/linalg.hpp"
#include "gmc/target.hpp"
#include "gmc/verify.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using gmc::Manifold;
using gmc::Target;

TEST_SUITE("target") {

TEST_CASE("vMF values and gradient") {
  const Manifold sph = Manifold::sphere(3);
  VectorXd e1(3);
  e1 << 1.0, 0.0, 0.0;
  const Target t = Target::vonMisesFisher(sph, 2.0, e1);
  CHECK(t.logDensity(e1) == doctest::Approx(2.0));
  const VectorXd g = t.gradLogDensity(e1);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);

  VectorXd badMu(3);
  badMu << 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(Target::vonMisesFisher(sph, 1.0, badMu), gmc::InvalidInput);
  CHECK_THROWS_AS(Target::vonMisesFisher(sph, -1.0, e1), gmc::InvalidInput);
}

TEST_CASE("uniform target is identically zero") {
  const Manifold sti = Manifold::stiefel(4, 2);
  const Target t = Target::uniform(sti);
  std::mt19937_64 rng(3);
  const VectorXd x = sti.referenceUniformSample(rng);
  CHECK(t.logDensity(x) == 0.0);
  CHECK(t.gradLogDensity(x).norm() == 0.0);
  CHECK(gmc::fdGradientCheck(t, x, 1e-5) == 0.0);
}

TEST_CASE("Bingham-vMF with C=0, A=I, B=I has constant log-density s") {
  const Manifold sti = Manifold::stiefel(4, 2);
  const Target t = Target::binghamVonMisesFisher(sti, MatrixXd::Zero(4, 2),
                                                 MatrixXd::Identity(4, 4), VectorXd::Ones(2));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const VectorXd x = sti.referenceUniformSample(rng);
    CHECK(t.logDensity(x) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("Bingham-vMF gradient matches finite differences") {
  const Manifold sti = Manifold::stiefel(4, 2);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  MatrixXd c(4, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i) c(i, j) = 0.5 * g(rng);
  const MatrixXd a = gmc::verify::randomDensePsd(4, 0.2, 1.5, 11);
  VectorXd b(2);
  b << 1.0, 0.4;
  const Target t = Target::binghamVonMisesFisher(sti, c, a, b);
  for (int k = 0; k < 10; ++k) {
    const VectorXd x = sti.referenceUniformSample(rng);
    CHECK(gmc::fdGradientCheck(t, x, 1e-5) < 1e-6);
  }
}

TEST_CASE("Bingham-vMF validates shapes and symmetry") {
  const Manifold sti = Manifold::stiefel(4, 2);
  MatrixXd nonSym = MatrixXd::Zero(4, 4);
  nonSym(0, 1) = 1.0;
  CHECK_THROWS_AS(
      Target::binghamVonMisesFisher(sti, MatrixXd::Zero(4, 2), nonSym, VectorXd::Ones(2)),
      gmc::InvalidInput);
  CHECK_THROWS_AS(
      Target::binghamVonMisesFisher(sti, MatrixXd::Zero(3, 2), MatrixXd::Identity(4, 4),
                                    VectorXd::Ones(2)),
      gmc::InvalidInput);
}

TEST_CASE("vMF gradient check is exact to roundoff (linear density)") {
  const Manifold sph = Manifold::sphere(3);
  VectorXd mu(3);
  mu << 0.0, 0.0, 1.0;
  const Target t = Target::vonMisesFisher(sph, 2.0, mu);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    CHECK(gmc::fdGradientCheck(t, sph.referenceUniformSample(rng), 1e-5) < 1e-8);
  }
}

TEST_CASE("log-density agrees between matrix and flattened evaluation") {
  // Computing tr(C^T X) + tr(B X^T A X) through the flattened gradient
  // identity vec(C + 2 A X B): directional derivative along random tangent
  // directions matches the matrix-form difference quotient.
  const Manifold sti = Manifold::stiefel(4, 2);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  MatrixXd c(4, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i) c(i, j) = g(rng);
  const MatrixXd a = gmc::verify::randomDensePsd(4, 0.1, 1.0, 19);
  VectorXd b(2);
  b << 0.8, 0.3;
  const Target t = Target::binghamVonMisesFisher(sti, c, a, b);

  const VectorXd xf = sti.referenceUniformSample(rng);
  const MatrixXd x = gmc::linalg::unvec(xf, 4, 2);
  const double direct =
      (c.transpose() * x).trace() + (b.asDiagonal() * (x.transpose() * (a * x))).trace();
  CHECK(t.logDensity(xf) == doctest::Approx(direct).epsilon(1e-14));

  CHECK_THROWS_AS(t.logDensity(VectorXd::Ones(8)), gmc::InvalidInput);
}

}  // TEST_SUITE
