#include "gmc/target.hpp"

#include <cmath>

#include "gmc/linalg.hpp"

namespace gmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Target::Target(Manifold manifold, std::string name, LogDensityFn logDensity,
               GradientFn gradient)
    : manifold_(manifold),
      name_(std::move(name)),
      logDensity_(std::move(logDensity)),
      gradient_(std::move(gradient)) {}

Target Target::uniform(const Manifold& m) {
  const int n = m.ambientDim();
  return Target(
      m, "uniform", [](const VectorXd&) { return 0.0; },
      [n](const VectorXd&) { return VectorXd::Zero(n); });
}

Target Target::vonMisesFisher(const Manifold& m, double kappa, VectorXd mu) {
  if (m.kind() != ManifoldKind::Sphere) {
    throw InvalidInput("vonMisesFisher: defined on the sphere");
  }
  if (mu.size() != m.ambientDim()) throw InvalidInput("vonMisesFisher: mu has wrong length");
  if (std::abs(mu.squaredNorm() - 1.0) > 1e-10) {
    throw InvalidInput("vonMisesFisher: mu must be a unit vector");
  }
  if (kappa < 0.0) throw InvalidInput("vonMisesFisher: kappa must be >= 0");
  return Target(
      m, "vmf", [kappa, mu](const VectorXd& x) { return kappa * mu.dot(x); },
      [kappa, mu](const VectorXd&) -> VectorXd { return kappa * mu; });
}

Target Target::binghamVonMisesFisher(const Manifold& m, MatrixXd c, MatrixXd a,
                                     VectorXd bDiag) {
  const int d = m.rows();
  const int s = m.cols();
  if (c.rows() != d || c.cols() != s) throw InvalidInput("binghamVonMisesFisher: C must be d x s");
  if (a.rows() != d || a.cols() != d || !linalg::isSymmetric(a)) {
    throw InvalidInput("binghamVonMisesFisher: A must be symmetric d x d");
  }
  if (bDiag.size() != s) throw InvalidInput("binghamVonMisesFisher: B diagonal must have length s");

  auto logd = [c, a, bDiag, d, s](const VectorXd& xf) {
    const MatrixXd x = linalg::unvec(xf, d, s);
    return (c.transpose() * x).trace() +
           (bDiag.asDiagonal() * (x.transpose() * (a * x))).trace();
  };
  auto grad = [c, a, bDiag, d, s](const VectorXd& xf) -> VectorXd {
    const MatrixXd x = linalg::unvec(xf, d, s);
    const MatrixXd g = c + 2.0 * a * x * bDiag.asDiagonal();
    return linalg::vec(g);
  };
  return Target(m, "bingham_vmf", std::move(logd), std::move(grad));
}

double Target::logDensity(const VectorXd& x) const {
  if (!manifold_.onManifold(x)) throw InvalidInput("logDensity: point is off the manifold");
  return logDensity_(x);
}

VectorXd Target::gradLogDensity(const VectorXd& x) const {
  if (!manifold_.onManifold(x)) throw InvalidInput("gradLogDensity: point is off the manifold");
  return gradient_(x);
}

double fdGradientCheck(const Target& target, const VectorXd& x, double step) {
  if (step <= 0.0) throw InvalidInput("fdGradientCheck: step must be positive");
  const VectorXd grad = target.gradLogDensityAmbient(x);
  double worst = 0.0;
  VectorXd xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] += step;
    xm[i] -= step;
    const double fd =
        (target.logDensityAmbient(xp) - target.logDensityAmbient(xm)) / (2.0 * step);
    xp[i] = x[i];
    xm[i] = x[i];
    const double err = std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace gmc
