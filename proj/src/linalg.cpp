#include "gmc/linalg.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gmc::linalg {

namespace {

void requireSquare(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidInput(std::string(who) + ": expected a nonempty square matrix");
  }
}

// Eigendecomposition of a symmetric matrix via SVD, used when the
// tridiagonal QL iteration reports non-convergence.  For symmetric A the
// singular triplets satisfy v_i = sign(lambda_i) u_i, so the eigenvalue is
// the singular value with the sign of u_i^T A u_i.
SpectralFactorization svdFallback(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) {
    const double s = svd.matrixU().col(i).dot(svd.matrixV().col(i));
    lam[i] = svd.singularValues()[i] * (s < 0 ? -1.0 : 1.0);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] > lam[j]; });

  SpectralFactorization f;
  f.eigenvalues.resize(n);
  f.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    f.eigenvalues[i] = lam[order[i]];
    f.eigenvectors.col(i) = svd.matrixU().col(order[i]);
  }
  return f;
}

}  // namespace

bool isSymmetric(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

SpectralFactorization factorize(const Eigen::MatrixXd& a, double tolerance) {
  requireSquare(a, "factorize");
  if (!isSymmetric(a)) {
    throw InvalidInput("factorize: matrix is not symmetric within tolerance");
  }
  const int n = static_cast<int>(a.rows());

  SpectralFactorization f;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() == Eigen::Success) {
    // Eigen returns ascending order; flip to nonincreasing.
    f.eigenvalues = es.eigenvalues().reverse();
    f.eigenvectors = es.eigenvectors().rowwise().reverse();
  } else {
    f = svdFallback(a);
    if (!f.eigenvalues.allFinite()) {
      throw NumericalFailure("factorize: eigensolver did not converge");
    }
  }

  const double lamMax = f.eigenvalues.cwiseAbs().maxCoeff();
  f.tolerance = tolerance >= 0.0
                    ? tolerance
                    : n * std::numeric_limits<double>::epsilon() * lamMax;
  f.rank = 0;
  for (int i = 0; i < n; ++i) {
    if (f.eigenvalues[i] > f.tolerance) ++f.rank;
  }
  return f;
}

Eigen::MatrixXd pseudoInverse(const SpectralFactorization& f) {
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(f.dim());
  for (int i = 0; i < f.rank; ++i) inv[i] = 1.0 / f.eigenvalues[i];
  return f.eigenvectors * inv.asDiagonal() * f.eigenvectors.transpose();
}

double logPseudoDet(const SpectralFactorization& f) {
  double s = 0.0;
  for (int i = 0; i < f.rank; ++i) {
    if (f.eigenvalues[i] <= 0.0) {
      throw NotPSD("logPseudoDet: retained eigenvalue is not positive");
    }
    s += std::log(f.eigenvalues[i]);
  }
  return s;
}

double logPseudoDetTopRank(const SpectralFactorization& f, int rank) {
  if (rank < 0 || rank > f.dim()) {
    throw InvalidInput("logPseudoDetTopRank: rank out of range");
  }
  double s = 0.0;
  for (int i = 0; i < rank; ++i) {
    if (f.eigenvalues[i] <= 0.0) {
      throw NotPSD("logPseudoDetTopRank: retained eigenvalue is not positive");
    }
    s += std::log(f.eigenvalues[i]);
  }
  return s;
}

Eigen::MatrixXd psdSqrt(const SpectralFactorization& f) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(f.dim());
  for (int i = 0; i < f.rank; ++i) {
    if (f.eigenvalues[i] < 0.0) throw NotPSD("psdSqrt: negative retained eigenvalue");
    r[i] = std::sqrt(f.eigenvalues[i]);
  }
  return f.eigenvectors * r.asDiagonal() * f.eigenvectors.transpose();
}

Eigen::MatrixXd psdInvSqrt(const SpectralFactorization& f) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(f.dim());
  for (int i = 0; i < f.rank; ++i) {
    if (f.eigenvalues[i] <= 0.0) throw NotPSD("psdInvSqrt: retained eigenvalue is not positive");
    r[i] = 1.0 / std::sqrt(f.eigenvalues[i]);
  }
  return f.eigenvectors * r.asDiagonal() * f.eigenvectors.transpose();
}

std::vector<Eigen::Index> commutationPermutation(int m, int n) {
  if (m < 1 || n < 1) throw InvalidInput("commutationPermutation: m, n must be >= 1");
  std::vector<Eigen::Index> p(static_cast<std::size_t>(m) * n);
  // Row k = i*n + j of P picks entry X(i, j) = vec(X)[j*m + i].
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      p[static_cast<std::size_t>(i) * n + j] = static_cast<Eigen::Index>(j) * m + i;
    }
  }
  return p;
}

Eigen::MatrixXd commutationDense(int m, int n) {
  const auto p = commutationPermutation(m, n);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(p.size(), p.size());
  for (std::size_t k = 0; k < p.size(); ++k) dense(k, p[k]) = 1.0;
  return dense;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return Eigen::kroneckerProduct(a, b);
}

Eigen::VectorXd vec(const Eigen::MatrixXd& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw InvalidInput("unvec: size mismatch");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

}  // namespace gmc::linalg
