#include "gmc/manifold.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "gmc/linalg.hpp"

namespace gmc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using MatMap = Eigen::Map<const MatrixXd>;

// Thin QR with the sign of diag(R) folded into Q, so the map X -> Q is
// deterministic and fixes orthonormal X (up to roundoff).
MatrixXd orientedQr(const MatrixXd& x) {
  Eigen::HouseholderQR<MatrixXd> qr(x);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(x.rows(), x.cols());
  const MatrixXd r = qr.matrixQR().topRows(x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

Manifold Manifold::sphere(int d) {
  if (d < 2) throw InvalidInput("sphere: need ambient dimension >= 2");
  return Manifold(ManifoldKind::Sphere, d, 1);
}

Manifold Manifold::stiefel(int d, int s) {
  if (s < 1 || s > d) throw InvalidInput("stiefel: need 1 <= s <= d");
  return Manifold(ManifoldKind::Stiefel, d, s);
}

void Manifold::requireAmbient(const VectorXd& x, const char* who) const {
  if (x.size() != ambientDim()) {
    throw InvalidInput(std::string(who) + ": expected vector of length " +
                       std::to_string(ambientDim()));
  }
}

double Manifold::constraintViolation(const VectorXd& x) const {
  requireAmbient(x, "constraintViolation");
  if (kind_ == ManifoldKind::Sphere) return std::abs(x.squaredNorm() - 1.0);
  MatMap X(x.data(), d_, s_);
  return (X.transpose() * X - MatrixXd::Identity(s_, s_)).norm();
}

bool Manifold::onManifold(const VectorXd& x, double tol) const {
  return x.size() == ambientDim() && constraintViolation(x) <= tol;
}

double Manifold::tangencyViolation(const VectorXd& x, const VectorXd& v) const {
  requireAmbient(x, "tangencyViolation");
  requireAmbient(v, "tangencyViolation");
  if (kind_ == ManifoldKind::Sphere) return std::abs(x.dot(v));
  MatMap X(x.data(), d_, s_);
  MatMap V(v.data(), d_, s_);
  return 0.5 * (X.transpose() * V + V.transpose() * X).norm();
}

bool Manifold::isTangent(const VectorXd& x, const VectorXd& v, double tol) const {
  const double scale = std::max(1.0, v.norm());
  return tangencyViolation(x, v) <= tol * scale;
}

VectorXd Manifold::applyProjector(const VectorXd& x, const VectorXd& v) const {
  requireAmbient(x, "applyProjector");
  requireAmbient(v, "applyProjector");
  if (kind_ == ManifoldKind::Sphere) return v - x * x.dot(v);
  MatMap X(x.data(), d_, s_);
  MatMap V(v.data(), d_, s_);
  MatrixXd W = V - 0.5 * X * (V.transpose() * X + X.transpose() * V);
  return linalg::vec(W);
}

MatrixXd Manifold::projectorAmbient(const VectorXd& x) const {
  requireAmbient(x, "projectorAmbient");
  const int n = ambientDim();
  if (kind_ == ManifoldKind::Sphere) {
    return MatrixXd::Identity(n, n) - x * x.transpose();
  }
  MatrixXd p(n, n);
  VectorXd e = VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    p.col(j) = applyProjector(x, e);
    e[j] = 0.0;
  }
  return p;
}

MatrixXd Manifold::projector(const VectorXd& x) const {
  if (!onManifold(x)) throw InvalidInput("projector: point is off the manifold");
  return projectorAmbient(x);
}

MatrixXd Manifold::projectorKroneckerForm(const VectorXd& x) const {
  if (!onManifold(x)) {
    throw InvalidInput("projectorKroneckerForm: point is off the manifold");
  }
  const int n = ambientDim();
  if (kind_ == ManifoldKind::Sphere) return projectorAmbient(x);
  MatMap X(x.data(), d_, s_);
  const MatrixXd is = MatrixXd::Identity(s_, s_);
  const MatrixXd ikx = linalg::kron(is, X);              // ds x s^2
  const MatrixXd comm = linalg::commutationDense(s_, s_);  // s^2 x s^2
  const MatrixXd is2 = MatrixXd::Identity(s_ * s_, s_ * s_);
  return MatrixXd::Identity(n, n) -
         0.5 * ikx * (comm + is2) * ikx.transpose();
}

std::pair<VectorXd, VectorXd> Manifold::geodesic(const VectorXd& x,
                                                 const VectorXd& v,
                                                 double t) const {
  if (!onManifold(x)) throw InvalidInput("geodesic: point is off the manifold");
  if (!isTangent(x, v)) throw InvalidInput("geodesic: velocity is not tangent");
  if (t == 0.0) return {x, v};

  if (kind_ == ManifoldKind::Sphere) {
    const double speed = v.norm();
    if (speed == 0.0) return {x, v};
    const double c = std::cos(speed * t);
    const double s = std::sin(speed * t);
    return {x * c + (v / speed) * s, v * c - x * (speed * s)};
  }

  // Stiefel geodesic of the Euclidean (Frobenius) metric: with A = X^T V
  // (skew) and S = V^T V,
  //   [X(t) V(t)] = [X V] expm(t [[A, -S], [I, A]]) diag(e^{-tA}, e^{-tA}).
  // Solves Xdd = -X (Xd^T Xd); validated against an ODE oracle in tests.
  MatMap X(x.data(), d_, s_);
  MatMap V(v.data(), d_, s_);
  const MatrixXd A = X.transpose() * V;
  const MatrixXd S = V.transpose() * V;
  MatrixXd block(2 * s_, 2 * s_);
  block.topLeftCorner(s_, s_) = A;
  block.topRightCorner(s_, s_) = -S;
  block.bottomLeftCorner(s_, s_) = MatrixXd::Identity(s_, s_);
  block.bottomRightCorner(s_, s_) = A;

  const MatrixXd e = (t * block).exp();
  const MatrixXd eA = (-t * A).exp();
  MatrixXd xv(d_, 2 * s_);
  xv.leftCols(s_) = X;
  xv.rightCols(s_) = V;
  const MatrixXd moved = xv * e;
  MatrixXd xt = moved.leftCols(s_) * eA;
  MatrixXd vt = moved.rightCols(s_) * eA;
  return {linalg::vec(xt), linalg::vec(vt)};
}

VectorXd Manifold::referenceUniformSample(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (kind_ == ManifoldKind::Sphere) {
    VectorXd z(d_);
    double norm = 0.0;
    do {
      for (int i = 0; i < d_; ++i) z[i] = gauss(rng);
      norm = z.norm();
    } while (norm < 1e-12);
    return z / norm;
  }
  MatrixXd z(d_, s_);
  for (int j = 0; j < s_; ++j) {
    for (int i = 0; i < d_; ++i) z(i, j) = gauss(rng);
  }
  MatrixXd q = orientedQr(z);
  return linalg::vec(q);
}

VectorXd Manifold::reproject(const VectorXd& x) const {
  requireAmbient(x, "reproject");
  if (constraintViolation(x) >= kMaxDrift) {
    throw DriftTooLarge("reproject: constraint violation exceeds recoverable bound");
  }
  if (kind_ == ManifoldKind::Sphere) return x / x.norm();
  MatMap X(x.data(), d_, s_);
  MatrixXd q = orientedQr(X);
  return linalg::vec(q);
}

}  // namespace gmc
