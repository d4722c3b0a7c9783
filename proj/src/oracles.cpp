#include "gmc/oracles.hpp"

#include <cmath>

namespace gmc::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd uniformSamples(const Manifold& m, int n, std::mt19937_64& rng) {
  MatrixXd out(n, m.ambientDim());
  for (int i = 0; i < n; ++i) out.row(i) = m.referenceUniformSample(rng).transpose();
  return out;
}

VectorXd vmfSample(const Manifold& sphere, double kappa, const VectorXd& mu,
                   std::mt19937_64& rng) {
  if (sphere.kind() != ManifoldKind::Sphere) {
    throw InvalidInput("vmfSample: defined on the sphere");
  }
  const int d = sphere.rows();
  if (mu.size() != d || std::abs(mu.squaredNorm() - 1.0) > 1e-10) {
    throw InvalidInput("vmfSample: mu must be a unit vector of length d");
  }
  if (kappa < 0.0) throw InvalidInput("vmfSample: kappa must be >= 0");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Beta((d-1)/2, (d-1)/2) via two gammas.
  std::gamma_distribution<double> gamma(0.5 * (d - 1), 1.0);

  const double dm1 = d - 1.0;
  const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1)) / dm1;
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);

  double w = 0.0;
  for (;;) {
    const double g1 = gamma(rng);
    const double g2 = gamma(rng);
    const double z = g1 / (g1 + g2);
    const double u = unif(rng);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }

  // Uniform direction orthogonal to mu.
  VectorXd y(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) y[i] = gauss(rng);
    y -= mu * mu.dot(y);
    norm = y.norm();
  } while (norm < 1e-12);
  y /= norm;

  return w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * y;
}

MatrixXd vmfSamples(const Manifold& sphere, double kappa, const VectorXd& mu, int n,
                    std::mt19937_64& rng) {
  MatrixXd out(n, sphere.ambientDim());
  for (int i = 0; i < n; ++i) out.row(i) = vmfSample(sphere, kappa, mu, rng).transpose();
  return out;
}

}  // namespace gmc::oracle
