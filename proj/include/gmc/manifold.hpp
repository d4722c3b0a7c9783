#pragma once

// Embedded-manifold abstraction: membership tests, tangent projection,
// geodesic flow, reference uniform sampling, and drift control, with
// sphere and Stiefel implementations working purely in ambient coordinates.
// Stiefel points/velocities are d x s matrices stored flattened
// column-major in vectors of length d*s.

#include <Eigen/Dense>
#include <random>
#include <utility>

#include "gmc/errors.hpp"

namespace gmc {

enum class ManifoldKind { Sphere, Stiefel };

/// Membership tolerance: sphere |x.x - 1|, Stiefel ||X^T X - I||_F.
inline constexpr double kMembershipTol = 1e-10;
/// Tangency acceptance bound for geodesic inputs.
inline constexpr double kTangencyTol = 1e-8;
/// Largest constraint violation reproject() will repair.
inline constexpr double kMaxDrift = 1e-4;

class Manifold {
 public:
  static Manifold sphere(int d);
  static Manifold stiefel(int d, int s);

  ManifoldKind kind() const { return kind_; }
  int rows() const { return d_; }
  int cols() const { return s_; }
  int ambientDim() const { return d_ * s_; }
  int tangentDim() const {
    return kind_ == ManifoldKind::Sphere ? d_ - 1 : d_ * s_ - s_ * (s_ + 1) / 2;
  }

  /// Sphere: |x.x - 1|.  Stiefel: ||X^T X - I_s||_F.
  double constraintViolation(const Eigen::VectorXd& x) const;
  bool onManifold(const Eigen::VectorXd& x, double tol = kMembershipTol) const;

  /// Distance of v from the tangent space at x: sphere |x.v|, Stiefel
  /// ||X^T V + V^T X||_F / 2.
  double tangencyViolation(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  bool isTangent(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                 double tol = kTangencyTol) const;

  /// Matrix-free tangent projection.  The formulas (v - x x^T v for the
  /// sphere, V - X(V^T X + X^T V)/2 for Stiefel) are evaluated as written,
  /// so the map is also defined at near-manifold points; no membership
  /// check is performed here.
  Eigen::VectorXd applyProjector(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;

  /// Dense ambient_dim x ambient_dim tangent projector at an on-manifold
  /// point (InvalidInput otherwise).
  Eigen::MatrixXd projector(const Eigen::VectorXd& x) const;

  /// Same formula without the membership check (ambient extension, used by
  /// finite differencing).
  Eigen::MatrixXd projectorAmbient(const Eigen::VectorXd& x) const;

  /// For Stiefel: the projector assembled from Kronecker products and the
  /// commutation matrix, I - (I_s ox X)(P_{s,s} + I_{s^2})(I_s ox X^T)/2.
  /// Agrees with projector(); kept as an independent construction for
  /// verification.  For the sphere it coincides with projector().
  Eigen::MatrixXd projectorKroneckerForm(const Eigen::VectorXd& x) const;

  /// Exact geodesic flow for time t from (x, v).  Requires x on the
  /// manifold and v tangent at x (InvalidInput otherwise).  Conserves
  /// ||v||; t = 0 and v = 0 are identity cases.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> geodesic(const Eigen::VectorXd& x,
                                                       const Eigen::VectorXd& v,
                                                       double t) const;

  /// Exact uniform (rotation-invariant) sample: normalized Gaussian vector
  /// on the sphere, orientation-corrected QR of a Gaussian matrix on
  /// Stiefel.
  Eigen::VectorXd referenceUniformSample(std::mt19937_64& rng) const;

  /// Pull a near-manifold vector back onto the manifold (sphere: rescale;
  /// Stiefel: orientation-preserving QR).  Idempotent on exact points.
  /// Throws DriftTooLarge if the constraint violation exceeds kMaxDrift.
  Eigen::VectorXd reproject(const Eigen::VectorXd& x) const;

  bool operator==(const Manifold& o) const {
    return kind_ == o.kind_ && d_ == o.d_ && s_ == o.s_;
  }

 private:
  Manifold(ManifoldKind kind, int d, int s) : kind_(kind), d_(d), s_(s) {}
  void requireAmbient(const Eigen::VectorXd& x, const char* who) const;

  ManifoldKind kind_;
  int d_;
  int s_;
};

}  // namespace gmc
