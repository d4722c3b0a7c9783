#pragma once

// Reference samplers used by the statistical verification suites: exact
// draws the Markov chains are tested against.

#include <Eigen/Dense>
#include <random>

#include "gmc/manifold.hpp"

namespace gmc::oracle {

/// n exact uniform samples (rows).  Sphere: normalized Gaussians; Stiefel:
/// orientation-corrected QR of Gaussian matrices.
Eigen::MatrixXd uniformSamples(const Manifold& m, int n, std::mt19937_64& rng);

/// One von Mises-Fisher draw on the sphere by the beta-envelope rejection
/// scheme (Ulrich 1984 / Wood 1994): sample the cosine w against mu, then
/// a uniform direction in the orthogonal complement.
Eigen::VectorXd vmfSample(const Manifold& sphere, double kappa,
                          const Eigen::VectorXd& mu, std::mt19937_64& rng);

/// n von Mises-Fisher draws (rows).
Eigen::MatrixXd vmfSamples(const Manifold& sphere, double kappa,
                           const Eigen::VectorXd& mu, int n, std::mt19937_64& rng);

}  // namespace gmc::oracle
