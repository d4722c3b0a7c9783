#pragma once

// Dense symmetric-matrix utilities: spectral pseudo-inverse, pseudo-
// determinant, PSD square roots, Kronecker products, vec, and commutation
// (permutation) matrices.  All operations are pure functions on immutable
// inputs and safe to call concurrently.

#include <Eigen/Dense>
#include <vector>

#include "gmc/errors.hpp"

namespace gmc::linalg {

/// Relative bound used when checking that a matrix is symmetric:
/// |A(i,j) - A(j,i)| <= tol * max(1, ||A||_inf).
inline constexpr double kSymmetryTol = 1e-12;

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
/// nonincreasing order.  `rank` counts the eigenvalues strictly above
/// `tolerance`; everything at or below it is treated as the null space by
/// the pseudo-inverse / pseudo-determinant operations.
struct SpectralFactorization {
  Eigen::VectorXd eigenvalues;   // nonincreasing
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, same order
  int rank = 0;
  double tolerance = 0.0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

bool isSymmetric(const Eigen::MatrixXd& a, double tol = kSymmetryTol);

/// Factorize a symmetric matrix.  With `tolerance` < 0 the default rank
/// cutoff n * machine_epsilon * max|eigenvalue| is used.
/// Throws InvalidInput for non-symmetric input and NumericalFailure if the
/// eigensolver (and its SVD fallback) does not converge.
SpectralFactorization factorize(const Eigen::MatrixXd& a, double tolerance = -1.0);

/// Moore-Penrose pseudo-inverse Q diag(1/lambda_i) Q^T over the retained
/// eigenvalues.
Eigen::MatrixXd pseudoInverse(const SpectralFactorization& f);

/// Sum of logs of the retained eigenvalues.  Throws NotPSD if a retained
/// eigenvalue is not strictly positive.
double logPseudoDet(const SpectralFactorization& f);

/// Like logPseudoDet but keeps exactly the `rank` algebraically largest
/// eigenvalues instead of using the factorization's tolerance cutoff.
/// Used where the deficiency of the operator is known structurally and the
/// small eigenvalues may be perturbed away from zero (finite differencing).
double logPseudoDetTopRank(const SpectralFactorization& f, int rank);

/// Q diag(sqrt(lambda_i)) Q^T over the retained eigenvalues (NotPSD if a
/// retained eigenvalue is negative).
Eigen::MatrixXd psdSqrt(const SpectralFactorization& f);

/// Square root of the pseudo-inverse: Q diag(1/sqrt(lambda_i)) Q^T.
Eigen::MatrixXd psdInvSqrt(const SpectralFactorization& f);

/// Commutation permutation for m x n matrices: the returned index vector p
/// satisfies (P v)[k] = v[p[k]] and P vec(X) = vec(X^T).  vec is
/// column-major throughout.
std::vector<Eigen::Index> commutationPermutation(int m, int n);

/// Dense 0/1 materialization of commutationPermutation (test use).
Eigen::MatrixXd commutationDense(int m, int n);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Column-major flattening, so vec(A X B) = (B^T kron A) vec(X).
Eigen::VectorXd vec(const Eigen::MatrixXd& x);
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int rows, int cols);

}  // namespace gmc::linalg
