#include "gmc/sampler.hpp"

#include <cmath>
#include <limits>

#include "gmc/linalg.hpp"

namespace gmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// MassMatrix

MassMatrix MassMatrix::identity() { return MassMatrix(Form::Identity); }

MassMatrix MassMatrix::diagonal(VectorXd entries) {
  if (entries.size() == 0) throw InvalidInput("MassMatrix::diagonal: empty");
  const double maxAbs = entries.cwiseAbs().maxCoeff();
  if (entries.minCoeff() < -1e-10 * maxAbs) {
    throw NotPSD("MassMatrix::diagonal: negative entry");
  }
  MassMatrix m(Form::Diagonal);
  m.diag_ = std::move(entries);
  return m;
}

MassMatrix MassMatrix::dense(MatrixXd mat) {
  if (!linalg::isSymmetric(mat)) {
    throw InvalidInput("MassMatrix::dense: matrix is not symmetric");
  }
  const auto f = linalg::factorize(mat);
  const double lamMax = f.eigenvalues.cwiseAbs().maxCoeff();
  if (f.eigenvalues.minCoeff() < -1e-10 * lamMax) {
    throw NotPSD("MassMatrix::dense: matrix is not positive semi-definite");
  }
  MassMatrix m(Form::Dense);
  m.dense_ = std::move(mat);
  return m;
}

int MassMatrix::dim() const {
  switch (form_) {
    case Form::Identity: return 0;
    case Form::Diagonal: return static_cast<int>(diag_.size());
    case Form::Dense: return static_cast<int>(dense_.rows());
  }
  return 0;
}

VectorXd MassMatrix::apply(const VectorXd& x) const {
  switch (form_) {
    case Form::Identity: return x;
    case Form::Diagonal:
      if (x.size() != diag_.size()) throw InvalidInput("MassMatrix::apply: size mismatch");
      return diag_.cwiseProduct(x);
    case Form::Dense:
      if (x.size() != dense_.rows()) throw InvalidInput("MassMatrix::apply: size mismatch");
      return dense_ * x;
  }
  return x;
}

MatrixXd MassMatrix::denseMatrix(int n) const {
  switch (form_) {
    case Form::Identity: return MatrixXd::Identity(n, n);
    case Form::Diagonal:
      if (n != diag_.size()) throw InvalidInput("MassMatrix::denseMatrix: size mismatch");
      return diag_.asDiagonal();
    case Form::Dense:
      if (n != dense_.rows()) throw InvalidInput("MassMatrix::denseMatrix: size mismatch");
      return dense_;
  }
  return MatrixXd::Identity(n, n);
}

// ---------------------------------------------------------------------------
// ProjectedMass

ProjectedMass::ProjectedMass(const Manifold& m, const MassMatrix& mass, VectorXd x,
                             bool forceIdentityForm)
    : manifold_(m), x_(std::move(x)) {
  if (x_.size() != m.ambientDim()) {
    throw InvalidInput("ProjectedMass: point has wrong dimension");
  }
  if (m.constraintViolation(x_) > kMaxDrift) {
    throw InvalidInput("ProjectedMass: point is too far from the manifold");
  }
  identity_ = forceIdentityForm || mass.isIdentity();
  if (identity_) {
    rank_ = m.tangentDim();
    logPdet_ = 0.0;
    return;
  }

  const int n = m.ambientDim();
  if (mass.dim() != n) throw InvalidInput("ProjectedMass: mass dimension mismatch");
  const MatrixXd p = m.projectorAmbient(x_);
  MatrixXd op = p * mass.denseMatrix(n) * p;
  op = 0.5 * (op + op.transpose()).eval();

  auto f = linalg::factorize(op);
  // Cap the retained rank at the tangent dimension: eigenvalues beyond it
  // are structural zeros of P M P regardless of what roundoff or drift of
  // the base point made of them.
  int r = 0;
  const int cap = std::min(m.tangentDim(), f.dim());
  while (r < cap && f.eigenvalues[r] > f.tolerance) ++r;
  f.rank = r;

  rank_ = r;
  op_ = std::move(op);
  logPdet_ = linalg::logPseudoDet(f);
  pinv_ = linalg::pseudoInverse(f);
  sqrt_ = linalg::psdSqrt(f);
  invSqrt_ = linalg::psdInvSqrt(f);
}

VectorXd ProjectedMass::applyOperator(const VectorXd& v) const {
  return identity_ ? manifold_.applyProjector(x_, v) : VectorXd(op_ * v);
}
VectorXd ProjectedMass::applyPinv(const VectorXd& v) const {
  return identity_ ? manifold_.applyProjector(x_, v) : VectorXd(pinv_ * v);
}
VectorXd ProjectedMass::applySqrt(const VectorXd& v) const {
  return identity_ ? manifold_.applyProjector(x_, v) : VectorXd(sqrt_ * v);
}
VectorXd ProjectedMass::applyInvSqrt(const VectorXd& v) const {
  return identity_ ? manifold_.applyProjector(x_, v) : VectorXd(invSqrt_ * v);
}

double ProjectedMass::quadraticForm(const VectorXd& v) const {
  // Tangent v makes the identity-form quadratic exactly |v|^2.
  return identity_ ? v.squaredNorm() : v.dot(op_ * v);
}

MatrixXd ProjectedMass::operatorMatrix() const {
  return identity_ ? manifold_.projectorAmbient(x_) : op_;
}
MatrixXd ProjectedMass::pinvMatrix() const {
  return identity_ ? manifold_.projectorAmbient(x_) : pinv_;
}
MatrixXd ProjectedMass::sqrtMatrix() const {
  return identity_ ? manifold_.projectorAmbient(x_) : sqrt_;
}
MatrixXd ProjectedMass::invSqrtMatrix() const {
  return identity_ ? manifold_.projectorAmbient(x_) : invSqrt_;
}

// ---------------------------------------------------------------------------
// Config

void ChainConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidInput("ChainConfig: epsilon must be > 0");
  if (nLeapfrog < 1) throw InvalidInput("ChainConfig: nLeapfrog must be >= 1");
  if (nSamples < 0 || nBurnin < 0) throw InvalidInput("ChainConfig: negative counts");
}

const char* toString(Variant v) {
  switch (v) {
    case Variant::Alg1: return "alg1";
    case Variant::Alg2: return "alg2";
    case Variant::Classic: return "classic";
  }
  return "?";
}

const char* toString(SignConvention c) {
  return c == SignConvention::Default ? "default" : "det_gradient";
}

// ---------------------------------------------------------------------------
// Forces and energies

double logPdetAmbient(const Manifold& m, const MatrixXd& massDense, const VectorXd& x) {
  const MatrixXd p = m.projectorAmbient(x);
  MatrixXd op = p * massDense * p;
  op = 0.5 * (op + op.transpose()).eval();
  const auto f = linalg::factorize(op);
  return linalg::logPseudoDetTopRank(f, m.tangentDim());
}

VectorXd logDetForce(const Manifold& m, const MassMatrix& mass, const ProjectedMass& pm,
                     const VectorXd& x) {
  const int n = m.ambientDim();
  if (pm.isIdentityForm()) return VectorXd::Zero(n);
  if (m.kind() == ManifoldKind::Sphere) {
    return pm.applyPinv(m.applyProjector(x, mass.apply(x)));
  }
  // No closed form on Stiefel; differentiate the ambient extension.
  const double h = 1e-5;
  const MatrixXd massDense = mass.denseMatrix(n);
  VectorXd grad(n);
  VectorXd xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (logPdetAmbient(m, massDense, xp) - logPdetAmbient(m, massDense, xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return -0.5 * grad;
}

VectorXd drawVelocity(const ProjectedMass& pm, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd z(pm.point().size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
  return pm.applyInvSqrt(z);
}

VectorXd kick(Variant variant, SignConvention sign, const ProjectedMass& pm,
              const MassMatrix& mass, const VectorXd& gradLogPi, const VectorXd& x,
              const VectorXd& v, double h) {
  VectorXd force;
  if (variant == Variant::Classic || pm.isIdentityForm()) {
    // The determinant force vanishes identically for the identity form.
    force = pm.manifold().applyProjector(x, gradLogPi);
  } else {
    double sigma = variant == Variant::Alg1 ? -1.0 : 1.0;
    if (sign == SignConvention::DetGradient) sigma = -sigma;
    force = pm.applyPinv(gradLogPi + sigma * logDetForce(pm.manifold(), mass, pm, x));
  }
  return v + h * force;
}

double energy(Variant variant, const ProjectedMass& pm, const Target& target,
              const VectorXd& x, const VectorXd& v) {
  // Ambient evaluation: the drift policy, not the energy, polices
  // membership of chain states.
  double e = -target.logDensityAmbient(x) + 0.5 * pm.quadraticForm(v);
  if (variant == Variant::Alg1) e += pm.logPseudoDet();
  return e;
}

// ---------------------------------------------------------------------------
// Leapfrog

LeapfrogState makeLeapfrogState(const Target& target, const MassMatrix& mass,
                                Variant variant, VectorXd x, VectorXd v) {
  ProjectedMass pm(target.manifold(), mass, x, variant == Variant::Classic);
  return LeapfrogState{std::move(x), std::move(v), std::move(pm)};
}

void leapfrogStep(const Target& target, const MassMatrix& mass, Variant variant,
                  SignConvention sign, double epsilon, LeapfrogState& state,
                  bool reproject) {
  const Manifold& m = target.manifold();
  const double half = 0.5 * epsilon;
  state.v = kick(variant, sign, state.pm, mass, target.gradLogDensityAmbient(state.x),
                 state.x, state.v, half);

  // With identity-form geometry the rescaling maps are the projector and
  // act as the identity on tangent vectors; skip them so that all variants
  // run the same arithmetic there.
  const bool rescale = !state.pm.isIdentityForm();
  VectorXd vt = rescale ? state.pm.applySqrt(state.v) : state.v;
  auto [xNew, vtNew] = m.geodesic(state.x, vt, epsilon);
  state.x = std::move(xNew);
  if (reproject) {
    state.x = m.reproject(state.x);
    vtNew = m.applyProjector(state.x, vtNew);
  }
  state.pm = ProjectedMass(m, mass, state.x, variant == Variant::Classic);
  state.v = rescale ? state.pm.applyInvSqrt(vtNew) : vtNew;

  state.v = kick(variant, sign, state.pm, mass, target.gradLogDensityAmbient(state.x),
                 state.x, state.v, half);
}

Trajectory integrateTrajectory(const Target& target, const MassMatrix& mass,
                               const ChainConfig& cfg, const VectorXd& x0,
                               const VectorXd& v0) {
  Trajectory out;
  try {
    LeapfrogState state = makeLeapfrogState(target, mass, cfg.variant, x0, v0);
    for (int i = 0; i < cfg.nLeapfrog; ++i) {
      leapfrogStep(target, mass, cfg.variant, cfg.signConvention, cfg.epsilon, state,
                   cfg.reprojectEachStep);
    }
    out.x = std::move(state.x);
    out.v = std::move(state.v);
  } catch (const Error&) {
    out.x = x0;
    out.v = v0;
    out.failed = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transition and chain

std::pair<VectorXd, TransitionRecord> transition(const Target& target,
                                                 const MassMatrix& mass,
                                                 const ChainConfig& cfg, const VectorXd& x,
                                                 std::mt19937_64& rng) {
  const Manifold& m = target.manifold();
  TransitionRecord rec;

  ProjectedMass pm(m, mass, x, cfg.variant == Variant::Classic);
  const VectorXd v = drawVelocity(pm, rng);
  rec.speedInitial = v.norm();
  rec.energyInitial = energy(cfg.variant, pm, target, x, v);

  const Trajectory traj = integrateTrajectory(target, mass, cfg, x, v);

  // Always consume one uniform so RNG streams align across variants.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);

  if (traj.failed) {
    rec.numericalFailure = true;
    rec.energyProposed = std::numeric_limits<double>::quiet_NaN();
    rec.constraintDrift = m.constraintViolation(x);
    rec.speedFinal = rec.speedInitial;
    return {x, rec};
  }

  ProjectedMass pmEnd(m, mass, traj.x, cfg.variant == Variant::Classic);
  rec.energyProposed = energy(cfg.variant, pmEnd, target, traj.x, traj.v);
  rec.speedFinal = traj.v.norm();
  rec.constraintDrift = m.constraintViolation(traj.x);
  rec.accepted = std::log(u) < rec.energyInitial - rec.energyProposed;
  return {rec.accepted ? traj.x : x, rec};
}

ChainOutput runChain(const Target& target, const MassMatrix& mass, const ChainConfig& cfg,
                     const VectorXd& x0) {
  cfg.validate();
  const Manifold& m = target.manifold();
  if (!m.onManifold(x0)) throw InvalidInput("runChain: x0 is off the manifold");

  std::mt19937_64 rng(cfg.seed);
  ChainOutput out;
  out.samples.resize(cfg.nSamples, m.ambientDim());
  out.records.reserve(cfg.nSamples);

  VectorXd x = x0;
  for (int i = -cfg.nBurnin; i < cfg.nSamples; ++i) {
    auto [xNext, rec] = transition(target, mass, cfg, x, rng);
    x = std::move(xNext);
    const double violation = m.constraintViolation(x);
    if (violation > kMaxDrift) {
      throw DriftTooLarge("runChain: constraint drift exceeded bound at transition " +
                          std::to_string(i + cfg.nBurnin));
    }
    if (cfg.reprojectEachStep) x = m.reproject(x);
    if (i >= 0) {
      out.samples.row(i) = x.transpose();
      out.records.push_back(rec);
    }
  }
  return out;
}

std::uint64_t deriveChainSeed(std::uint64_t seed, int chainIndex) {
  // splitmix64 over (seed, index); distinct streams per chain.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(chainIndex) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gmc
