#ifndef BFPR_IO_HPP
#define BFPR_IO_HPP

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfpr/dataset.hpp"
#include "bfpr/harness.hpp"
#include "bfpr/models.hpp"

namespace bfpr {

using json = nlohmann::ordered_json;

constexpr const char* kSpecVersion = "1";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Dataset files: JSON Lines. First record is a header
//   {"schema":"soft"|"noisy"|"binary", "dim":m | "categories":k, "bounds":[a,b]}
// followed by one {"x":..., "y":...} record per sample.
// ---------------------------------------------------------------------------

struct DatasetFile {
  std::string schema;  // soft | noisy | binary
  std::optional<SoftDataset> soft;
  std::optional<NoisyDataset> noisy;
};

namespace detail {

inline json feature_to_json(const FeatureValue& x) {
  if (x.kind == FeatureValue::Kind::categorical) return json(x.index);
  return json(x.coords);
}

inline FeatureValue feature_from_json(const json& j) {
  if (j.is_number_integer()) return FeatureValue::category(j.get<std::uint32_t>());
  if (j.is_array()) return FeatureValue::point(j.get<std::vector<double>>());
  throw IoError("dataset record: field 'x' must be an integer or a number array");
}

inline void write_feature_header(json& header, const FeatureValue& x,
                                 std::optional<std::size_t> categories) {
  if (x.kind == FeatureValue::Kind::categorical)
    header["categories"] = categories ? *categories : 0;
  else
    header["dim"] = x.coords.size();
}

}  // namespace detail

inline void save_dataset(const SoftDataset& data, std::ostream& out,
                         std::optional<std::size_t> categories = std::nullopt) {
  json header = {{"schema", "soft"}};
  detail::write_feature_header(header, data.samples.front().x, categories);
  out << header.dump() << "\n";
  for (const auto& s : data.samples) {
    json rec = {{"x", detail::feature_to_json(s.x)}, {"y", s.y}};
    out << rec.dump() << "\n";
  }
}

inline void save_dataset(const NoisyDataset& data, std::ostream& out,
                         std::optional<std::size_t> categories = std::nullopt) {
  json header = {
      {"schema", data.label_kind == LabelKind::binary ? "binary" : "noisy"}};
  detail::write_feature_header(header, data.samples.front().x, categories);
  header["bounds"] = {data.bound_lo, data.bound_hi};
  out << header.dump() << "\n";
  for (const auto& s : data.samples) {
    json rec = {{"x", detail::feature_to_json(s.x)}, {"y", s.y_tilde}};
    out << rec.dump() << "\n";
  }
}

inline DatasetFile load_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset file: empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("dataset header: ") + e.what());
  }
  if (!header.contains("schema")) throw IoError("dataset header: missing 'schema'");
  const std::string schema = header["schema"].get<std::string>();
  if (schema != "soft" && schema != "noisy" && schema != "binary")
    throw IoError("dataset header: unknown schema '" + schema + "'");

  std::vector<FeatureValue> xs;
  std::vector<double> ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.contains("x") || !rec.contains("y"))
      throw IoError("dataset line " + std::to_string(lineno) + ": needs 'x' and 'y'");
    xs.push_back(detail::feature_from_json(rec["x"]));
    ys.push_back(rec["y"].get<double>());
  }
  if (xs.empty()) throw IoError("dataset file: no sample records");

  DatasetFile file;
  file.schema = schema;
  if (schema == "soft") {
    std::vector<SoftDataset::Sample> s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.push_back({xs[i], ys[i]});
    file.soft = SoftDataset(std::move(s));
  } else {
    double a = 0.0, b = 1.0;
    if (schema == "noisy") {
      if (!header.contains("bounds") || !header["bounds"].is_array() ||
          header["bounds"].size() != 2)
        throw IoError("dataset header: noisy schema requires 'bounds' [a,b]");
      a = header["bounds"][0].get<double>();
      b = header["bounds"][1].get<double>();
    }
    std::vector<NoisyDataset::Sample> s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.push_back({xs[i], ys[i]});
    file.noisy = NoisyDataset(std::move(s), a, b,
                              schema == "binary" ? LabelKind::binary
                                                 : LabelKind::continuous);
  }
  return file;
}

// CSV importer (columns x0..x{m-1},y), ingestion convenience only.
inline SoftDataset load_soft_csv(std::istream& in) {
  std::vector<SoftDataset::Sample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() < 2) throw IoError("csv: need at least one feature column and y");
    const double y = cols.back();
    cols.pop_back();
    samples.push_back({FeatureValue::point(std::move(cols)), y});
  }
  return SoftDataset(std::move(samples));
}

// ---------------------------------------------------------------------------
// Model / noise / config specs (JSON documents).
// ---------------------------------------------------------------------------

inline GenerativeModel parse_model(const json& j) {
  if (!j.contains("type")) throw IoError("model spec: missing 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "finite") {
    if (!j.contains("p_x") || !j.contains("posterior"))
      throw IoError("model spec: finite model needs 'p_x' and 'posterior'");
    return FiniteModel(j["p_x"].get<std::vector<double>>(),
                       j["posterior"].get<std::vector<double>>());
  }
  if (type == "smooth1d") {
    const std::string name = j.value("name", "sine");
    if (name != "sine") throw IoError("model spec: unknown smooth1d model '" + name + "'");
    return Smooth1DModel::stock_sine();
  }
  throw IoError("model spec: unknown type '" + type + "'");
}

inline json model_to_json(const GenerativeModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FiniteModel>)
          return {{"type", "finite"}, {"p_x", m.p_x}, {"posterior", m.posterior}};
        else
          return {{"type", "smooth1d"}, {"name", m.name},
                  {"holder_c", m.holder_c}, {"holder_beta", m.holder_beta}};
      },
      model);
}

inline NoiseModel parse_noise(const json& j) {
  if (!j.contains("type")) throw IoError("noise spec: missing 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "uniform") {
    if (!j.contains("sigma")) throw IoError("noise spec: uniform needs 'sigma'");
    return UniformAdditiveNoise(j["sigma"].get<double>());
  }
  if (type == "trunc_gauss") {
    if (!j.contains("sigma") || !j.contains("cut"))
      throw IoError("noise spec: trunc_gauss needs 'sigma' and 'cut'");
    return TruncGaussNoise(j["sigma"].get<double>(), j["cut"].get<double>());
  }
  if (type == "bernoulli") return BernoulliBinaryNoise{};
  throw IoError("noise spec: unknown type '" + type + "'");
}

inline json noise_to_json(const NoiseModel& noise) {
  return std::visit(
      [](const auto& nm) -> json {
        using T = std::decay_t<decltype(nm)>;
        if constexpr (std::is_same_v<T, UniformAdditiveNoise>)
          return {{"type", "uniform"}, {"sigma", nm.sigma}};
        else if constexpr (std::is_same_v<T, TruncGaussNoise>)
          return {{"type", "trunc_gauss"}, {"sigma", nm.sigma}, {"cut", nm.cut}};
        else
          return {{"type", "bernoulli"}};
      },
      noise);
}

inline EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "psi1") return EstimatorKind::psi1;
  if (name == "psi2") return EstimatorKind::psi2;
  if (name == "Psi1") return EstimatorKind::big_psi1;
  if (name == "Psi2") return EstimatorKind::big_psi2;
  throw IoError("unknown estimator '" + name + "' (expected psi1|psi2|Psi1|Psi2)");
}

inline ExperimentConfig parse_config(const json& j) {
  for (const char* field : {"model", "estimators", "n_grid", "replicates", "seed"})
    if (!j.contains(field))
      throw IoError(std::string("config: missing field '") + field + "'");
  ExperimentConfig cfg{parse_model(j["model"])};
  if (j.contains("noise")) cfg.noise = parse_noise(j["noise"]);
  for (const auto& ej : j["estimators"]) {
    EstimatorSpec est;
    est.kind = parse_estimator_kind(ej.at("name").get<std::string>());
    if (ej.contains("p0")) est.p0 = ej["p0"].get<double>();
    if (ej.contains("epsilon") && !ej["epsilon"].is_string())
      est.epsilon = ej["epsilon"].get<double>();
    if (ej.contains("ratio")) est.ratio = ej["ratio"].get<double>();
    if (ej.contains("bandwidth") && !ej["bandwidth"].is_string())
      est.bandwidth = ej["bandwidth"].get<double>();
    cfg.estimators.push_back(est);
  }
  cfg.n_grid = j["n_grid"].get<std::vector<std::size_t>>();
  cfg.replicates = j["replicates"].get<std::size_t>();
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.deltas = j.value("deltas", std::vector<double>{});
  cfg.threads = j.value("threads", 1u);
  cfg.checks = j.value("checks", std::vector<std::string>{});
  validate_config(cfg);
  return cfg;
}

// Fully resolved echo of a config (all defaults expanded), so a report file
// alone reproduces its run.
inline json config_to_json(const ExperimentConfig& cfg) {
  json estimators = json::array();
  for (const auto& est : cfg.estimators) {
    json ej = {{"name", estimator_name(est.kind)}};
    if (est.p0)
      ej["p0"] = *est.p0;
    else if (est.kind == EstimatorKind::psi1)
      ej["p0"] = "oracle";
    if (est.kind != EstimatorKind::psi1)
      ej["epsilon"] = est.epsilon ? json(*est.epsilon) : json("auto");
    if (est.kind == EstimatorKind::big_psi1 || est.kind == EstimatorKind::big_psi2)
      ej["ratio"] = est.ratio;
    if (est.kind == EstimatorKind::big_psi2)
      ej["bandwidth"] = est.bandwidth ? json(*est.bandwidth) : json("auto");
    estimators.push_back(ej);
  }
  json out = {{"model", model_to_json(cfg.model)}};
  if (cfg.noise) out["noise"] = noise_to_json(*cfg.noise);
  out["estimators"] = estimators;
  out["n_grid"] = cfg.n_grid;
  out["replicates"] = cfg.replicates;
  out["seed"] = cfg.seed;
  out["deltas"] = cfg.deltas;
  // threads affect only the execution schedule, never the results, and are
  // excluded so reports from different worker counts compare byte-equal
  out["checks"] = cfg.checks;
  return out;
}

// Report file. Per-cell runtimes are deliberately not serialized: report
// files must be byte-identical across reruns and worker counts; runtimes go
// to the CLI summary instead.
inline json report_to_json(const ExperimentReport& report, const json& resolved_config) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json hoeffding = json::array();
    for (const auto& [delta, rate] : c.hoeffding_violation)
      hoeffding.push_back({{"delta", delta}, {"violation_rate", rate}});
    cells.push_back({{"estimator", c.estimator},
                     {"n", c.n},
                     {"mean", c.mean},
                     {"bias", c.bias},
                     {"variance", c.variance},
                     {"variance_bound", c.variance_bound},
                     {"hoeffding", hoeffding},
                     {"ks_statistic", c.ks_statistic},
                     {"median_abs_error", c.median_abs_error}});
  }
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"spec_version", kSpecVersion},
          {"config", resolved_config},
          {"oracle",
           {{"fpr", report.oracle_fpr},
            {"fnr", report.oracle_fnr},
            {"p0_mass", report.p0_mass},
            {"p0_threshold", report.p0_threshold}}},
          {"flags",
           {{"continuity_assumption_violated", report.continuity_assumption_violated},
            {"holder_certified", report.holder_certified}}},
          {"cells", cells},
          {"checks", checks}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace bfpr

#endif  // BFPR_IO_HPP
