// Command-line front-end: run sampling batches from a JSON config, run the
// built-in verification suites, and recompute summaries from sample files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "gmc/diagnostics.hpp"
#include "gmc/io.hpp"
#include "gmc/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDrift = 3;

int cmdSample(const std::string& configPath, std::uint64_t* seedOverride, int threads,
              const std::string& outputOverride) {
  gmc::io::RunConfig cfg = gmc::io::loadRunConfig(configPath);
  if (seedOverride) cfg.chain.seed = *seedOverride;
  const fs::path outDir = outputOverride.empty() ? fs::path(cfg.outputDir)
                                                 : fs::path(outputOverride);
  const auto results = gmc::io::executeRun(cfg, outDir, threads);
  for (const auto& r : results) {
    std::cout << "chain " << r.chainIndex << ": " << r.summary.nSamples << " samples -> "
              << r.sampleFile.string() << " (acceptance "
              << r.summary.acceptanceRate << ")\n";
  }
  std::cout << "summary: " << (outDir / "summary.json").string() << "\n";
  return kExitOk;
}

int cmdVerify(const std::string& suite, std::uint64_t seed, int samples) {
  const auto checks = gmc::verify::runSuite(suite, seed, samples);
  gmc::verify::printChecks(checks);
  const bool ok = gmc::verify::allPassed(checks);
  std::cout << (ok ? "suite passed" : "suite FAILED") << " (" << suite << ")\n";
  return ok ? kExitOk : kExitFailure;
}

int cmdDiagnose(const std::string& inputPath, const std::string& outputPath) {
  const auto data = gmc::io::readSampleFile(inputPath);
  const auto summary = gmc::summarize(data.samples, data.records);
  // Constraint drift is not stored in sample files, so a recomputed
  // summary cannot report it.
  nlohmann::json j = nlohmann::json::parse(gmc::io::summaryToJson(summary));
  j.erase("max_constraint_drift");
  const std::string json = j.dump(2);
  if (outputPath.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(outputPath, std::ios::binary);
    out << json << "\n";
    std::cout << "summary written to " << outputPath << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic Monte Carlo on embedded manifolds (sphere, Stiefel)"};
  app.require_subcommand(1);

  auto* sample = app.add_subcommand("sample", "Run chains described by a JSON config");
  std::string configPath;
  std::uint64_t seedOverride = 0;
  bool haveSeed = false;
  int threads = 1;
  std::string outputOverride;
  sample->add_option("--config", configPath, "Path to the run configuration")->required();
  sample->add_option("--seed", seedOverride, "Override the config seed")
      ->each([&](const std::string&) { haveSeed = true; });
  sample->add_option("--threads", threads, "Max concurrent chains")->default_val(1);
  sample->add_option("--output", outputOverride, "Override the output directory");

  auto* verify = app.add_subcommand("verify", "Run a built-in verification suite");
  std::string suite;
  std::uint64_t verifySeed = 20250811;
  int verifySamples = 50000;
  verify
      ->add_option("suite", suite,
                   "One of: linalg, gradients, reduction, reversibility, statistical")
      ->required();
  verify->add_option("--seed", verifySeed, "Suite seed");
  verify->add_option("--samples", verifySamples, "Chain length for the statistical suite");

  auto* diagnose = app.add_subcommand("diagnose", "Recompute a summary from a sample file");
  std::string inputPath, diagOutput;
  diagnose->add_option("--input", inputPath, "Sample CSV file")->required();
  diagnose->add_option("--output", diagOutput, "Write the summary JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) {
      return cmdSample(configPath, haveSeed ? &seedOverride : nullptr, threads,
                       outputOverride);
    }
    if (verify->parsed()) return cmdVerify(suite, verifySeed, verifySamples);
    if (diagnose->parsed()) return cmdDiagnose(inputPath, diagOutput);
  } catch (const gmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gmc::DriftTooLarge& e) {
    std::cerr << "drift error: " << e.what() << "\n";
    return kExitDrift;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
