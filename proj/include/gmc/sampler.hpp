#pragma once

// Split-Hamiltonian transition kernels on embedded manifolds with general
// positive semi-definite mass matrices: degenerate Gaussian velocity
// refresh, half-kick / geodesic / half-kick leapfrog steps with the
// velocity rescaling maps, and Metropolis acceptance driven by per-variant
// energy bookkeeping.
//
// Three kernel variants are provided:
//   Alg1    momentum-derived kernel; its energy carries the log
//           pseudo-determinant of the projected mass.
//   Alg2    velocity-derived kernel; the pseudo-determinant terms cancel
//           out of its acceptance rule.
//   Classic the mass-free kernel (velocity drawn through the bare tangent
//           projector, no rescaling maps).  Ignores the configured mass
//           matrix.
// With an identity mass matrix all three variants collapse to the same
// deterministic map and the same acceptance decisions.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "gmc/manifold.hpp"
#include "gmc/target.hpp"

namespace gmc {

enum class Variant { Alg1, Alg2, Classic };

/// Sign the log-determinant force term carries inside the kick.
/// `Default` uses the sign each variant's update rule states (-1 for Alg1,
/// +1 for Alg2); `DetGradient` uses the sign implied by the analytic
/// gradient of the log pseudo-determinant (the opposite).  The acceptance
/// rule never sees this term, so the stationary law of Alg2/Classic is
/// unchanged by the choice; only energy conservation (and hence acceptance
/// rate) differs.
enum class SignConvention { Default, DetGradient };

class MassMatrix {
 public:
  enum class Form { Identity, Diagonal, Dense };

  static MassMatrix identity();
  /// Diagonal mass; entries must satisfy the PSD bound
  /// min >= -1e-10 * max|entry|.
  static MassMatrix diagonal(Eigen::VectorXd entries);
  /// Dense symmetric PSD mass (smallest eigenvalue >= -1e-10 * largest).
  static MassMatrix dense(Eigen::MatrixXd m);

  Form form() const { return form_; }
  bool isIdentity() const { return form_ == Form::Identity; }
  /// 0 for the identity form (any dimension), otherwise the fixed size.
  int dim() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd denseMatrix(int n) const;

 private:
  explicit MassMatrix(Form f) : form_(f) {}
  Form form_;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd dense_;
};

/// The operator P(x) M P(x) at a chain state, with its spectral caches:
/// pseudo-inverse, log pseudo-determinant, square root and inverse square
/// root.  With an identity mass (or for the Classic variant) the operator
/// is the tangent projector itself, every cache collapses onto it, the log
/// pseudo-determinant is exactly zero, and all applications go through the
/// matrix-free projector formula.
///
/// The retained rank is capped at the manifold's tangent dimension, so
/// harmless constraint drift of the base point cannot promote a spurious
/// near-zero eigenvalue into the pseudo-determinant.
class ProjectedMass {
 public:
  ProjectedMass(const Manifold& m, const MassMatrix& mass, Eigen::VectorXd x,
                bool forceIdentityForm = false);

  bool isIdentityForm() const { return identity_; }
  int rank() const { return rank_; }
  double logPseudoDet() const { return logPdet_; }
  const Eigen::VectorXd& point() const { return x_; }
  const Manifold& manifold() const { return manifold_; }

  Eigen::VectorXd applyOperator(const Eigen::VectorXd& v) const;
  Eigen::VectorXd applyPinv(const Eigen::VectorXd& v) const;
  Eigen::VectorXd applySqrt(const Eigen::VectorXd& v) const;
  Eigen::VectorXd applyInvSqrt(const Eigen::VectorXd& v) const;
  /// v^T (P M P) v.
  double quadraticForm(const Eigen::VectorXd& v) const;

  // Dense views (identity form materializes the projector).
  Eigen::MatrixXd operatorMatrix() const;
  Eigen::MatrixXd pinvMatrix() const;
  Eigen::MatrixXd sqrtMatrix() const;
  Eigen::MatrixXd invSqrtMatrix() const;

 private:
  Manifold manifold_;
  Eigen::VectorXd x_;
  bool identity_;
  int rank_;
  double logPdet_ = 0.0;
  Eigen::MatrixXd op_, pinv_, sqrt_, invSqrt_;
};

struct ChainConfig {
  Variant variant = Variant::Classic;
  double epsilon = 0.1;
  int nLeapfrog = 1;
  int nSamples = 0;
  int nBurnin = 0;
  std::uint64_t seed = 0;
  SignConvention signConvention = SignConvention::Default;
  bool reprojectEachStep = false;

  void validate() const;
};

struct TransitionRecord {
  double energyInitial = 0.0;
  double energyProposed = 0.0;
  bool accepted = false;
  bool numericalFailure = false;
  double constraintDrift = 0.0;  // violation at the proposal endpoint
  double speedInitial = 0.0;
  double speedFinal = 0.0;
};

struct ChainOutput {
  Eigen::MatrixXd samples;  // nSamples x ambientDim
  std::vector<TransitionRecord> records;
};

/// -(1/2) d/dx log pdet(P(x) M P(x)): the force contributed by the log
/// pseudo-determinant half of the potential.  Closed form on the sphere,
/// (P M P)^+ P M x; central finite differences of the ambient extension on
/// Stiefel (the sphere form does not carry over); identically zero for the
/// identity form.
Eigen::VectorXd logDetForce(const Manifold& m, const MassMatrix& mass,
                            const ProjectedMass& pm, const Eigen::VectorXd& x);

/// log pdet(P(x) M P(x)) evaluated off-manifold with the retained rank
/// pinned to the tangent dimension (finite-difference plumbing).
double logPdetAmbient(const Manifold& m, const Eigen::MatrixXd& massDense,
                      const Eigen::VectorXd& x);

/// v = ((P M P)^+)^{1/2} z for standard normal z: a draw from the
/// degenerate Gaussian N(0, (P M P)^+) supported on the tangent space.
Eigen::VectorXd drawVelocity(const ProjectedMass& pm, std::mt19937_64& rng);

/// Half-step velocity update v += h (P M P)^+ (grad log pi + sigma * f)
/// where f is the log-determinant force term; Classic and identity-form
/// kicks reduce to v += h P grad.
Eigen::VectorXd kick(Variant variant, SignConvention sign, const ProjectedMass& pm,
                     const MassMatrix& mass, const Eigen::VectorXd& gradLogPi,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& v, double h);

/// Per-variant energy: -log pi + v^T (P M P) v / 2, plus the log
/// pseudo-determinant for Alg1.
double energy(Variant variant, const ProjectedMass& pm, const Target& target,
              const Eigen::VectorXd& x, const Eigen::VectorXd& v);

struct LeapfrogState {
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  ProjectedMass pm;
};

LeapfrogState makeLeapfrogState(const Target& target, const MassMatrix& mass,
                                Variant variant, Eigen::VectorXd x, Eigen::VectorXd v);

/// One full split-integrator step: half kick, rescale v -> vt, geodesic
/// flow for time epsilon, rescale back with the projected mass of the
/// destination point, half kick.
void leapfrogStep(const Target& target, const MassMatrix& mass, Variant variant,
                  SignConvention sign, double epsilon, LeapfrogState& state,
                  bool reproject = false);

struct Trajectory {
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  bool failed = false;
};

/// The deterministic T-step leapfrog map (no accept/reject).  Numerical
/// failures are reported through `failed` instead of escaping.
Trajectory integrateTrajectory(const Target& target, const MassMatrix& mass,
                               const ChainConfig& cfg, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& v0);

/// One Metropolis transition: velocity refresh, T leapfrog steps, accept
/// with probability min(1, exp(e - e*)) via log u < e - e*.  Failed
/// trajectories are rejected and flagged.  Consumes the same number of
/// random variates regardless of variant or outcome.
std::pair<Eigen::VectorXd, TransitionRecord> transition(const Target& target,
                                                        const MassMatrix& mass,
                                                        const ChainConfig& cfg,
                                                        const Eigen::VectorXd& x,
                                                        std::mt19937_64& rng);

/// Burn-in then nSamples retained transitions.  Deterministic given the
/// seed.  Throws DriftTooLarge if the chain state's constraint violation
/// exceeds the recoverable bound while reprojection is disabled.
ChainOutput runChain(const Target& target, const MassMatrix& mass,
                     const ChainConfig& cfg, const Eigen::VectorXd& x0);

/// Independent per-chain seed stream (splitmix64 over seed and index).
std::uint64_t deriveChainSeed(std::uint64_t seed, int chainIndex);

const char* toString(Variant v);
const char* toString(SignConvention c);

}  // namespace gmc
