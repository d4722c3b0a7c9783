#pragma once

// Post-hoc chain statistics: acceptance rate, effective sample size via
// the initial-positive-sequence truncation rule, moment summaries, and
// z-score comparison against oracle samples.  Everything here is a pure
// function of the sample stream.

#include <Eigen/Dense>
#include <vector>

#include "gmc/sampler.hpp"

namespace gmc {

/// Effective sample size n / (1 + 2 sum rho_k), autocorrelations summed in
/// adjacent pairs until a pair goes negative.  Requires length >= 10
/// (InvalidInput).  A zero-variance series is degenerate and reports 0.
double ess(const std::vector<double>& series);

struct ChainSummary {
  int nSamples = 0;
  double acceptanceRate = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd secondMoment;
  double resultantLength = 0.0;  // |mean of x|
  Eigen::VectorXd essPerCoordinate;  // 0 where degenerate or too short
  double maxConstraintDrift = 0.0;
};

ChainSummary summarize(const Eigen::MatrixXd& samples,
                       const std::vector<TransitionRecord>& records);

struct OracleComparison {
  Eigen::VectorXd meanZ;          // per coordinate
  Eigen::VectorXd secondMomentZ;  // per coordinate
  double resultantZ = 0.0;
  double maxAbsZ = 0.0;           // over all of the above
};

/// z-scores for coordinate means, second moments, and the resultant
/// length, with standard errors adjusted by each side's effective sample
/// size.  Identical sample sets give all-zero scores.
OracleComparison compareToOracle(const Eigen::MatrixXd& samples,
                                 const Eigen::MatrixXd& oracle);

}  // namespace gmc
