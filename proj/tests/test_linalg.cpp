#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "gmc/errors.hpp"
#include "gmc/linalg.hpp"
#include "gmc/manifold.hpp"
#include "gmc/verify.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace la = gmc::linalg;

namespace {

MatrixXd gaussian(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("factorize: diagonal and identity cases") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  const auto f = la::factorize(d);
  CHECK(f.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(f.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(f.rank == 1);

  const auto fi = la::factorize(MatrixXd::Identity(3, 3));
  CHECK(fi.rank == 3);
  for (int i = 0; i < 3; ++i) CHECK(fi.eigenvalues[i] == doctest::Approx(1.0));
}

TEST_CASE("factorize: reconstruction of random PSD matrices") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd b = gaussian(5, 5, rng);
    MatrixXd a = b * b.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    const auto f = la::factorize(a);
    const MatrixXd rec = f.eigenvectors * f.eigenvalues.asDiagonal() * f.eigenvectors.transpose();
    CHECK((rec - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
    // eigenvalues nonincreasing
    for (int i = 1; i < f.dim(); ++i) CHECK(f.eigenvalues[i] <= f.eigenvalues[i - 1]);
  }
}

TEST_CASE("factorize: rejects non-symmetric input") {
  MatrixXd a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(la::factorize(a), gmc::InvalidInput);
}

TEST_CASE("pseudoInverse: diagonal case and projector fixed point") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  const MatrixXd dp = la::pseudoInverse(la::factorize(d));
  CHECK(dp(0, 0) == doctest::Approx(0.5));
  CHECK(dp(1, 1) == doctest::Approx(0.0));

  // Orthogonal projections are their own pseudo-inverse.
  std::mt19937_64 rng(3);
  VectorXd x = gaussian(4, 1, rng);
  x /= x.norm();
  const MatrixXd p = MatrixXd::Identity(4, 4) - x * x.transpose();
  CHECK((la::pseudoInverse(la::factorize(p)) - p).norm() < 1e-10);
}

TEST_CASE("pseudoInverse: Moore-Penrose axioms on rank-deficient input") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd b = gaussian(4, 2, rng);
    MatrixXd a = b * b.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    const auto f = la::factorize(a);
    CHECK(f.rank == 2);
    const MatrixXd ap = la::pseudoInverse(f);
    CHECK((a * ap * a - a).norm() < 1e-9 * std::max(1.0, a.norm()));
    CHECK((ap * a * ap - ap).norm() < 1e-9 * std::max(1.0, ap.norm()));
    CHECK((a * ap - (a * ap).transpose()).norm() < 1e-9);
  }
}

TEST_CASE("logPseudoDet: diagonal, projector, and a two-route check") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  CHECK(la::logPseudoDet(la::factorize(d)) == doctest::Approx(std::log(2.0)));

  const gmc::Manifold sph = gmc::Manifold::sphere(3);
  std::mt19937_64 rng(5);
  const VectorXd x = sph.referenceUniformSample(rng);
  const MatrixXd p = sph.projector(x);
  CHECK(std::abs(la::logPseudoDet(la::factorize(p))) < 1e-10);

  // Against an independent route: restrict P M P to an orthonormal tangent
  // basis and take the 2x2 determinant directly.
  const MatrixXd m = gmc::verify::randomDensePsd(3, 0.5, 2.0, 99);
  MatrixXd a = p * m * p;
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::HouseholderQR<MatrixXd> qr((MatrixXd(3, 1) << x).finished());
  const MatrixXd full = qr.householderQ();
  const MatrixXd basis = full.rightCols(2);  // orthonormal complement of x
  const MatrixXd restricted = basis.transpose() * a * basis;
  const double det2 = restricted(0, 0) * restricted(1, 1) - restricted(0, 1) * restricted(1, 0);
  CHECK(la::logPseudoDet(la::factorize(a)) == doctest::Approx(std::log(det2)).epsilon(1e-9));
}

TEST_CASE("logPseudoDet: negative retained eigenvalue is rejected") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  auto f = la::factorize(d);
  f.rank = 2;  // force retention of the negative eigenvalue
  CHECK_THROWS_AS(la::logPseudoDet(f), gmc::NotPSD);
}

TEST_CASE("psd sqrt and inverse sqrt") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  const auto f = la::factorize(d);
  CHECK(la::psdSqrt(f)(0, 0) == doctest::Approx(2.0));
  CHECK(la::psdSqrt(f)(1, 1) == doctest::Approx(0.0));
  CHECK(la::psdInvSqrt(f)(0, 0) == doctest::Approx(0.5));

  std::mt19937_64 rng(13);
  const MatrixXd b = gaussian(5, 5, rng);
  MatrixXd a = b * b.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  const MatrixXd s = la::psdSqrt(la::factorize(a));
  CHECK((s * s - a).norm() < 1e-9 * std::max(1.0, a.norm()));
  // sqrt commutes with A and shares its null space here (full rank PSD)
  CHECK((s * a - a * s).norm() < 1e-9 * std::max(1.0, a.norm()));
}

TEST_CASE("commutation matrix basics") {
  CHECK(la::commutationDense(1, 1)(0, 0) == 1.0);

  MatrixXd x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  const VectorXd vx = la::vec(x);
  CHECK(vx[0] == 1.0);
  CHECK(vx[1] == 3.0);
  CHECK(vx[2] == 2.0);
  CHECK(vx[3] == 4.0);
  const VectorXd pv = la::commutationDense(2, 2) * vx;
  CHECK(pv[0] == 1.0);
  CHECK(pv[1] == 2.0);
  CHECK(pv[2] == 3.0);
  CHECK(pv[3] == 4.0);

  // P vec(X) = vec(X^T) on random 3x2 matrices; orthogonality is exact.
  std::mt19937_64 rng(17);
  const MatrixXd p = la::commutationDense(3, 2);
  CHECK((p * p.transpose() - MatrixXd::Identity(6, 6)).norm() == 0.0);
  CHECK((p.transpose() - la::commutationDense(2, 3)).norm() == 0.0);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd m = gaussian(3, 2, rng);
    CHECK((p * la::vec(m) - la::vec(MatrixXd(m.transpose()))).norm() == 0.0);
  }
}

TEST_CASE("kron and vec identities") {
  MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const MatrixXd k = la::kron(MatrixXd::Identity(2, 2), swap);
  CHECK(k.rows() == 4);
  CHECK(k(0, 1) == 1.0);
  CHECK(k(1, 0) == 1.0);
  CHECK(k(2, 3) == 1.0);
  CHECK(k(3, 2) == 1.0);
  CHECK(k(0, 2) == 0.0);

  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd a = gaussian(3, 2, rng);
    const MatrixXd x = gaussian(2, 2, rng);
    const MatrixXd b = gaussian(2, 4, rng);
    const VectorXd lhs = la::vec(MatrixXd(a * x * b));
    const VectorXd rhs = la::kron(MatrixXd(b.transpose()), a) * la::vec(x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("logPseudoDetTopRank skips trailing eigenvalues by count") {
  MatrixXd d = MatrixXd::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  d(2, 2) = -1e-7;  // perturbed structural zero
  const auto f = la::factorize(d);
  CHECK(la::logPseudoDetTopRank(f, 2) == doctest::Approx(std::log(6.0)));
  CHECK_THROWS_AS(la::logPseudoDetTopRank(f, 3), gmc::NotPSD);
}

TEST_CASE("determinism: identical inputs give identical factorizations") {
  std::mt19937_64 rng(23);
  const MatrixXd b = gaussian(6, 6, rng);
  MatrixXd a = b * b.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  const auto f1 = la::factorize(a);
  const auto f2 = la::factorize(a);
  CHECK((f1.eigenvalues - f2.eigenvalues).norm() == 0.0);
  CHECK((f1.eigenvectors - f2.eigenvectors).norm() == 0.0);
}

}  // TEST_SUITE
