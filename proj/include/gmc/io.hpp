#pragma once

// Run configuration loading, sample/summary file formats, and the batch
// run driver shared by the command-line front-end and the verification
// suites.
//
// Configs are JSON.  Sample files are CSV with a header fixing the column
// order: the flattened ambient coordinates, then the transition energies,
// then the accept flag.  Values are written with %.17g so files round-trip
// exactly and identical runs produce byte-identical output.

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmc/diagnostics.hpp"
#include "gmc/sampler.hpp"
#include "gmc/target.hpp"

namespace gmc::io {

struct RunConfig {
  Manifold manifold;
  Target target;
  MassMatrix mass;
  ChainConfig chain;
  int nChains = 1;
  std::string outputDir = "gmc_output";
  std::optional<Eigen::VectorXd> initial;
};

/// Parse a JSON run configuration.  Throws ConfigError with a
/// line-anchored message for syntax errors and a field-anchored message
/// for semantic ones (inconsistent dimensions, unknown names, ...).
RunConfig loadRunConfig(const std::filesystem::path& path);

/// Whitespace-separated dense matrix, one row per line.
Eigen::MatrixXd readMatrixFile(const std::filesystem::path& path);

void writeSampleFile(const std::filesystem::path& path, const ChainOutput& output);

struct SampleFileData {
  Eigen::MatrixXd samples;
  std::vector<TransitionRecord> records;  // energies and accept flags only
};
SampleFileData readSampleFile(const std::filesystem::path& path);

std::string summaryToJson(const ChainSummary& summary);

struct ChainRunResult {
  int chainIndex = 0;
  std::uint64_t seed = 0;
  std::filesystem::path sampleFile;
  ChainSummary summary;
};

/// Run every chain of the configuration (dispatched over at most `threads`
/// workers), write one sample file per chain plus a combined summary.json,
/// and return the per-chain results in chain order.
std::vector<ChainRunResult> executeRun(const RunConfig& cfg,
                                       const std::filesystem::path& outDir,
                                       int threads = 1);

}  // namespace gmc::io
