#include "gmc/diagnostics.hpp"

#include <cmath>

#include "gmc/errors.hpp"

namespace gmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double ess(const std::vector<double>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 10) throw InvalidInput("ess: need at least 10 observations");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  std::vector<double> centered(series);
  for (double& v : centered) v -= mean;

  double c0 = 0.0;
  for (double v : centered) c0 += v * v;
  c0 /= n;
  if (c0 == 0.0) return 0.0;  // constant series: degenerate

  auto acov = [&](int lag) {
    double s = 0.0;
    for (int t = 0; t + lag < n; ++t) s += centered[t] * centered[t + lag];
    return s / n;
  };

  // Geyer initial positive sequence: accumulate rho in adjacent pairs
  // while the pair sums stay positive.
  double sum = 0.0;
  for (int m = 1; 2 * m < n; ++m) {
    const double pair = (acov(2 * m - 1) + acov(2 * m)) / c0;
    if (pair < 0.0) break;
    sum += pair;
  }
  return n / (1.0 + 2.0 * sum);
}

ChainSummary summarize(const MatrixXd& samples, const std::vector<TransitionRecord>& records) {
  ChainSummary s;
  s.nSamples = static_cast<int>(samples.rows());
  const int dim = static_cast<int>(samples.cols());

  if (s.nSamples > 0) {
    s.mean = samples.colwise().mean();
    s.secondMoment = samples.array().square().colwise().mean();
    s.resultantLength = s.mean.norm();
  } else {
    s.mean = VectorXd::Zero(dim);
    s.secondMoment = VectorXd::Zero(dim);
  }

  s.essPerCoordinate = VectorXd::Zero(dim);
  if (s.nSamples >= 10) {
    std::vector<double> col(s.nSamples);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < s.nSamples; ++i) col[i] = samples(i, j);
      s.essPerCoordinate[j] = ess(col);
    }
  }

  int nAcc = 0;
  for (const auto& r : records) {
    nAcc += r.accepted ? 1 : 0;
    s.maxConstraintDrift = std::max(s.maxConstraintDrift, r.constraintDrift);
  }
  s.acceptanceRate = records.empty() ? 0.0 : static_cast<double>(nAcc) / records.size();
  return s;
}

namespace {

struct MomentStats {
  double mean = 0.0;
  double var = 0.0;
  double essN = 0.0;  // effective count used in the standard error
};

MomentStats columnStats(const MatrixXd& m, int j, bool squared) {
  const int n = static_cast<int>(m.rows());
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) {
    const double v = m(i, j);
    col[i] = squared ? v * v : v;
  }
  MomentStats st;
  for (double v : col) st.mean += v;
  st.mean /= n;
  for (double v : col) st.var += (v - st.mean) * (v - st.mean);
  st.var /= n;
  st.essN = n >= 10 ? ess(col) : static_cast<double>(n);
  if (st.essN <= 0.0) st.essN = 1.0;  // degenerate series: variance is 0 anyway
  return st;
}

double zScore(const MomentStats& a, const MomentStats& b) {
  const double num = a.mean - b.mean;
  if (num == 0.0) return 0.0;
  const double se = std::sqrt(a.var / a.essN + b.var / b.essN);
  return se == 0.0 ? std::numeric_limits<double>::infinity() : num / se;
}

}  // namespace

OracleComparison compareToOracle(const MatrixXd& samples, const MatrixXd& oracle) {
  if (samples.rows() == 0 || oracle.rows() == 0) {
    throw InvalidInput("compareToOracle: empty sample set");
  }
  if (samples.cols() != oracle.cols()) {
    throw InvalidInput("compareToOracle: dimension mismatch");
  }
  const int dim = static_cast<int>(samples.cols());

  OracleComparison cmp;
  cmp.meanZ.resize(dim);
  cmp.secondMomentZ.resize(dim);

  VectorXd meanA(dim), meanB(dim);
  VectorXd seA2(dim), seB2(dim);
  for (int j = 0; j < dim; ++j) {
    const auto a1 = columnStats(samples, j, false);
    const auto b1 = columnStats(oracle, j, false);
    const auto a2 = columnStats(samples, j, true);
    const auto b2 = columnStats(oracle, j, true);
    cmp.meanZ[j] = zScore(a1, b1);
    cmp.secondMomentZ[j] = zScore(a2, b2);
    meanA[j] = a1.mean;
    meanB[j] = b1.mean;
    seA2[j] = a1.var / a1.essN;
    seB2[j] = b1.var / b1.essN;
  }

  // Resultant length via the delta method: R = |m|, grad R = m / R.
  const double rA = meanA.norm();
  const double rB = meanB.norm();
  double varA = 0.0, varB = 0.0;
  if (rA > 0.0 && rB > 0.0) {
    for (int j = 0; j < dim; ++j) {
      varA += (meanA[j] / rA) * (meanA[j] / rA) * seA2[j];
      varB += (meanB[j] / rB) * (meanB[j] / rB) * seB2[j];
    }
  } else {
    varA = seA2.sum();
    varB = seB2.sum();
  }
  const double num = rA - rB;
  const double se = std::sqrt(varA + varB);
  cmp.resultantZ = num == 0.0 ? 0.0
                 : se == 0.0 ? std::numeric_limits<double>::infinity()
                             : num / se;

  cmp.maxAbsZ = std::abs(cmp.resultantZ);
  for (int j = 0; j < dim; ++j) {
    cmp.maxAbsZ = std::max({cmp.maxAbsZ, std::abs(cmp.meanZ[j]), std::abs(cmp.secondMomentZ[j])});
  }
  return cmp;
}

}  // namespace gmc
