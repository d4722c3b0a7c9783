// Acceptance runner: executes the full verification matrix criterion by
// criterion, printing one PASS/FAIL line per criterion (with per-check
// details indented).  Exit code is the number of failed criteria.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "gmc/verify.hpp"

namespace fs = std::filesystem;
using gmc::verify::CheckList;

namespace {

constexpr std::uint64_t kSeed = 20250811;
constexpr int kStatSamples = 50000;

struct Criterion {
  int number;
  std::string title;
  std::function<CheckList()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    }
  }

  const fs::path scratch = fs::temp_directory_path() / "gmc_acceptance";
  fs::create_directories(scratch);

  const std::vector<Criterion> criteria = {
      {1, "identity-mass reduction: variants coincide",
       [] { return gmc::verify::reductionChecks(kSeed); }},
      {2, "determinant-force closed form vs finite differences (sphere)",
       [] { return gmc::verify::detGradientChecks(kSeed); }},
      {3, "Kronecker/commutation projector equals direct formula (Stiefel)",
       [] { return gmc::verify::projectionFormChecks(kSeed); }},
      {4, "log pseudo-determinant of tangent projectors is zero",
       [] { return gmc::verify::projectionDetChecks(kSeed); }},
      {5, "integrator energy-error scaling under step halving",
       [] { return gmc::verify::integratorOrderChecks(kSeed); }},
      {6, "leapfrog reversibility on both manifolds, all variants",
       [] { return gmc::verify::reversibilityChecks(kSeed); }},
      {7, "statistical correctness on the sphere vs oracles",
       [] { return gmc::verify::sphereStatisticalChecks(kSeed, kStatSamples); }},
      {8, "statistical correctness on Stiefel(4,2) vs the Haar oracle",
       [] { return gmc::verify::stiefelStatisticalChecks(kSeed, kStatSamples); }},
      {9, "degenerate Gaussian velocity draws match (P M P)^+",
       [] { return gmc::verify::velocityCovarianceChecks(kSeed); }},
      {10, "determinism: identical config and seed give byte-identical files",
       [scratch] { return gmc::verify::determinismChecks(scratch); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    const CheckList checks = c.run();
    const bool ok = gmc::verify::allPassed(checks);
    if (!ok) ++failures;
    std::cout << "CRITERION " << c.number << " " << (ok ? "PASS" : "FAIL") << " — "
              << c.title << "\n";
    for (const auto& chk : checks) {
      const char* tag = chk.informational ? "info" : (chk.passed ? "pass" : "FAIL");
      std::cout << "    [" << tag << "] " << chk.name << ": " << chk.detail << "\n";
    }
  }
  if (only == 0) {
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                                : "FAILED CRITERIA: " + std::to_string(failures))
              << "\n";
  }
  return failures;
}
