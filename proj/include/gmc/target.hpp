#pragma once

// Unnormalized log-densities defined directly in ambient coordinates,
// their ambient (unprojected) gradients, and a finite-difference checker.
// Only differences of log-densities ever enter acceptance ratios, so
// normalizing constants are never computed.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "gmc/manifold.hpp"

namespace gmc {

class Target {
 public:
  using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  /// User-supplied target: a pair of callbacks evaluating the unnormalized
  /// log-density and its ambient gradient.  Both must be defined in a
  /// neighbourhood of the manifold (they are evaluated at slightly
  /// off-manifold points by finite differencing).
  Target(Manifold manifold, std::string name, LogDensityFn logDensity, GradientFn gradient);

  /// Constant density (uniform with respect to the surface measure).
  static Target uniform(const Manifold& m);

  /// log pi(x) = kappa * mu . x with |mu| = 1, kappa >= 0.
  static Target vonMisesFisher(const Manifold& m, double kappa, Eigen::VectorXd mu);

  /// Matrix Bingham-von Mises-Fisher on Stiefel (or the sphere, s = 1):
  /// log pi(X) = tr(C^T X) + tr(B X^T A X), A symmetric d x d, B diagonal
  /// (given by its diagonal), C d x s.
  static Target binghamVonMisesFisher(const Manifold& m, Eigen::MatrixXd c,
                                      Eigen::MatrixXd a, Eigen::VectorXd bDiag);

  /// Unnormalized log-density at an on-manifold point (InvalidInput
  /// otherwise).
  double logDensity(const Eigen::VectorXd& x) const;

  /// The same formula without the membership check (ambient extension).
  double logDensityAmbient(const Eigen::VectorXd& x) const { return logDensity_(x); }

  /// Ambient gradient; not projected onto the tangent space.
  Eigen::VectorXd gradLogDensity(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradLogDensityAmbient(const Eigen::VectorXd& x) const {
    return gradient_(x);
  }

  const Manifold& manifold() const { return manifold_; }
  const std::string& name() const { return name_; }

 private:
  Manifold manifold_;
  std::string name_;
  LogDensityFn logDensity_;
  GradientFn gradient_;
};

/// Worst-case relative error between gradLogDensity and central finite
/// differences of the ambient log-density extension, over coordinates.
/// Each coordinate error is |fd - grad| / max(1, |grad|).
double fdGradientCheck(const Target& target, const Eigen::VectorXd& x, double step);

}  // namespace gmc
