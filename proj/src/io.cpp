#include "gmc/io.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace gmc::io {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

int lineOfByte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

VectorXd toVector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, "expected an array of numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

MatrixXd toMatrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected an array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where, "expected nonempty rows");
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) fail(where, "ragged rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Manifold parseManifold(const json& j) {
  if (!j.is_object()) fail("manifold", "expected an object");
  const std::string kind = j.value("kind", "");
  const int d = j.value("d", 0);
  if (kind == "sphere") {
    if (j.value("s", 1) != 1) fail("manifold.s", "sphere requires s = 1");
    return Manifold::sphere(d);
  }
  if (kind == "stiefel") return Manifold::stiefel(d, j.value("s", 0));
  fail("manifold.kind", "expected \"sphere\" or \"stiefel\"");
}

Target parseTarget(const json& j, const Manifold& m) {
  if (!j.is_object()) fail("target", "expected an object");
  const std::string family = j.value("family", "");
  if (family == "uniform") return Target::uniform(m);
  if (family == "vmf") {
    if (!j.contains("kappa") || !j.contains("mu")) fail("target", "vmf needs kappa and mu");
    VectorXd mu = toVector(j.at("mu"), "target.mu");
    if (mu.size() != m.ambientDim()) fail("target.mu", "length must equal d");
    return Target::vonMisesFisher(m, j.at("kappa").get<double>(), std::move(mu));
  }
  if (family == "bingham_vmf") {
    if (!j.contains("C") || !j.contains("A") || !j.contains("B")) {
      fail("target", "bingham_vmf needs C, A and B");
    }
    MatrixXd c = toMatrix(j.at("C"), "target.C");
    MatrixXd a = toMatrix(j.at("A"), "target.A");
    VectorXd b = toVector(j.at("B"), "target.B");
    if (c.rows() != m.rows() || c.cols() != m.cols()) fail("target.C", "must be d x s");
    if (a.rows() != m.rows() || a.cols() != m.rows()) fail("target.A", "must be d x d");
    if (b.size() != m.cols()) fail("target.B", "diagonal must have length s");
    return Target::binghamVonMisesFisher(m, std::move(c), std::move(a), std::move(b));
  }
  fail("target.family", "expected \"uniform\", \"vmf\" or \"bingham_vmf\"");
}

MassMatrix parseMass(const json& j, const Manifold& m, const std::filesystem::path& configDir) {
  if (j.is_null()) return MassMatrix::identity();
  if (!j.is_object()) fail("mass", "expected an object");
  const std::string form = j.value("form", "identity");
  if (form == "identity") return MassMatrix::identity();
  if (form == "diagonal") {
    VectorXd v = toVector(j.at("values"), "mass.values");
    if (v.size() != m.ambientDim()) fail("mass.values", "length must equal ambient dimension");
    return MassMatrix::diagonal(std::move(v));
  }
  if (form == "dense") {
    MatrixXd mat;
    if (j.contains("values")) {
      mat = toMatrix(j.at("values"), "mass.values");
    } else if (j.contains("path")) {
      mat = readMatrixFile(configDir / j.at("path").get<std::string>());
    } else {
      fail("mass", "dense form needs values or path");
    }
    if (mat.rows() != m.ambientDim() || mat.cols() != m.ambientDim()) {
      fail("mass", "dense matrix must be ambient_dim x ambient_dim");
    }
    try {
      return MassMatrix::dense(std::move(mat));
    } catch (const Error& e) {
      fail("mass", e.what());
    }
  }
  fail("mass.form", "expected \"identity\", \"diagonal\" or \"dense\"");
}

Variant parseVariant(const std::string& s) {
  if (s == "alg1") return Variant::Alg1;
  if (s == "alg2") return Variant::Alg2;
  if (s == "classic") return Variant::Classic;
  fail("sampler.variant", "expected \"alg1\", \"alg2\" or \"classic\"");
}

SignConvention parseSignConvention(const std::string& s) {
  if (s == "default") return SignConvention::Default;
  if (s == "det_gradient") return SignConvention::DetGradient;
  fail("sampler.sign_convention", "expected \"default\" or \"det_gradient\"");
}

ChainConfig parseChain(const json& j) {
  if (!j.is_object()) fail("sampler", "expected an object");
  ChainConfig c;
  c.variant = parseVariant(j.value("variant", "classic"));
  c.epsilon = j.value("epsilon", 0.0);
  c.nLeapfrog = j.value("n_leapfrog", 0);
  c.nSamples = j.value("n_samples", 0);
  c.nBurnin = j.value("n_burnin", 0);
  c.seed = j.value("seed", std::uint64_t{0});
  c.signConvention = parseSignConvention(j.value("sign_convention", "default"));
  c.reprojectEachStep = j.value("reproject_each_step", false);
  try {
    c.validate();
  } catch (const Error& e) {
    fail("sampler", e.what());
  }
  return c;
}

}  // namespace

MatrixXd readMatrixFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix file " + path.string() + " is empty");
  MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw ConfigError("matrix file " + path.string() + ": ragged row " + std::to_string(i + 1));
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

RunConfig loadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(lineOfByte(text, e.byte)) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": top level must be an object");

  const Manifold manifold = parseManifold(j.value("manifold", json{}));
  Target target = parseTarget(j.value("target", json{}), manifold);
  MassMatrix mass = parseMass(j.contains("mass") ? j.at("mass") : json{}, manifold,
                              path.has_parent_path() ? path.parent_path()
                                                     : std::filesystem::path("."));
  ChainConfig chain = parseChain(j.value("sampler", json{}));

  RunConfig cfg{manifold, std::move(target), std::move(mass), chain};
  cfg.nChains = j.value("n_chains", 1);
  if (cfg.nChains < 1) fail("n_chains", "must be >= 1");
  cfg.outputDir = j.value("output", std::string("gmc_output"));
  if (j.contains("initial")) {
    VectorXd x0 = toVector(j.at("initial"), "initial");
    if (x0.size() != manifold.ambientDim()) fail("initial", "length must equal ambient dimension");
    if (!manifold.onManifold(x0)) fail("initial", "point is off the manifold");
    cfg.initial = std::move(x0);
  }
  return cfg;
}

void writeSampleFile(const std::filesystem::path& path, const ChainOutput& output) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");

  const int dim = static_cast<int>(output.samples.cols());
  for (int j = 0; j < dim; ++j) out << "x" << j << ",";
  out << "e,e_star,accept\n";

  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (int i = 0; i < output.samples.rows(); ++i) {
    for (int j = 0; j < dim; ++j) put(output.samples(i, j), ',');
    const auto& r = output.records[i];
    put(r.energyInitial, ',');
    put(r.energyProposed, ',');
    out << (r.accepted ? 1 : 0) << "\n";
  }
}

SampleFileData readSampleFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sample file " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw Error("empty sample file " + path.string());

  int dim = 0;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (!col.empty() && col[0] == 'x') ++dim;
    }
  }
  if (dim == 0) throw Error("sample file " + path.string() + ": no coordinate columns");

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != dim + 3) {
      throw Error("sample file " + path.string() + ": bad record width");
    }
    rows.push_back(std::move(row));
  }

  SampleFileData data;
  data.samples.resize(rows.size(), dim);
  data.records.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) data.samples(i, j) = rows[i][j];
    data.records[i].energyInitial = rows[i][dim];
    data.records[i].energyProposed = rows[i][dim + 1];
    data.records[i].accepted = rows[i][dim + 2] != 0.0;
  }
  return data;
}

std::string summaryToJson(const ChainSummary& s) {
  json j;
  j["n_samples"] = s.nSamples;
  j["acceptance_rate"] = s.acceptanceRate;
  j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  j["second_moment"] =
      std::vector<double>(s.secondMoment.data(), s.secondMoment.data() + s.secondMoment.size());
  j["resultant_length"] = s.resultantLength;
  j["ess"] = std::vector<double>(s.essPerCoordinate.data(),
                                 s.essPerCoordinate.data() + s.essPerCoordinate.size());
  j["max_constraint_drift"] = s.maxConstraintDrift;
  return j.dump(2);
}

std::vector<ChainRunResult> executeRun(const RunConfig& cfg,
                                       const std::filesystem::path& outDir, int threads) {
  std::filesystem::create_directories(outDir);
  std::vector<ChainRunResult> results(cfg.nChains);
  std::atomic<int> next{0};
  std::exception_ptr firstError;
  std::mutex errorMutex;

  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= cfg.nChains) return;
      try {
        ChainConfig chain = cfg.chain;
        chain.seed = deriveChainSeed(cfg.chain.seed, k);
        VectorXd x0;
        if (cfg.initial) {
          x0 = *cfg.initial;
        } else {
          std::mt19937_64 initRng(chain.seed ^ 0xD1B54A32D192ED03ULL);
          x0 = cfg.manifold.referenceUniformSample(initRng);
        }
        const ChainOutput out = runChain(cfg.target, cfg.mass, chain, x0);
        ChainRunResult r;
        r.chainIndex = k;
        r.seed = chain.seed;
        r.sampleFile = outDir / ("chain_" + std::to_string(k) + ".csv");
        writeSampleFile(r.sampleFile, out);
        r.summary = summarize(out.samples, out.records);
        results[k] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };

  const int nWorkers = std::max(1, std::min(threads, cfg.nChains));
  std::vector<std::thread> pool;
  pool.reserve(nWorkers);
  for (int i = 0; i < nWorkers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (firstError) std::rethrow_exception(firstError);

  json summary = json::array();
  for (const auto& r : results) {
    json jc = json::parse(summaryToJson(r.summary));
    jc["chain"] = r.chainIndex;
    jc["seed"] = r.seed;
    jc["file"] = r.sampleFile.filename().string();
    summary.push_back(std::move(jc));
  }
  std::ofstream out(outDir / "summary.json", std::ios::binary);
  out << summary.dump(2) << "\n";
  return results;
}

}  // namespace gmc::io
