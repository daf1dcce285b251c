#include "chtest/io.hpp"

#include <cstdio>
#include <sstream>

#include "chtest/errors.hpp"

namespace chtest {

using nlohmann::json;

std::string format_g12(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a JSON array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

json gaussian_to_json(const ScalarGaussian& g) {
  return json{{"mean", g.mean}, {"variance", g.var}};
}

ScalarGaussian gaussian_from_json(const json& j) {
  ScalarGaussian g{j.at("mean").get<double>(), j.at("variance").get<double>()};
  g.validate();
  return g;
}

json strategy_to_json(const StrategySpec& s) {
  json out{{"kind", s.kind_name()}};
  switch (s.kind) {
    case StrategySpec::Kind::Fixed:
      out["vector"] = vector_to_json(s.fixed_vector);
      break;
    case StrategySpec::Kind::Ensemble:
      out["ensemble"] = ensemble_to_json(s.ensemble);
      break;
    case StrategySpec::Kind::Schedule: {
      json rows = json::array();
      for (const auto& v : s.schedule) rows.push_back(vector_to_json(v));
      out["vectors"] = rows;
      break;
    }
    case StrategySpec::Kind::Bipartite:
      out["degree"] = s.degree;
      out["near_regular"] = s.near_regular;
      break;
    case StrategySpec::Kind::Separate:
    case StrategySpec::Kind::Hamming74:
      break;
  }
  return out;
}

StrategySpec strategy_from_json(const json& j) {
  StrategySpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed") {
    s.kind = StrategySpec::Kind::Fixed;
    s.fixed_vector = vector_from_json(j.at("vector"));
  } else if (kind == "ensemble") {
    s.kind = StrategySpec::Kind::Ensemble;
    s.ensemble = ensemble_from_json(j.at("ensemble"));
  } else if (kind == "schedule") {
    s.kind = StrategySpec::Kind::Schedule;
    for (const auto& row : j.at("vectors")) s.schedule.push_back(vector_from_json(row));
  } else if (kind == "bipartite") {
    s.kind = StrategySpec::Kind::Bipartite;
    s.degree = j.value("degree", 6);
    s.near_regular = j.value("near_regular", false);
  } else if (kind == "separate") {
    s.kind = StrategySpec::Kind::Separate;
  } else if (kind == "hamming74") {
    s.kind = StrategySpec::Kind::Hamming74;
  } else {
    throw ConfigError("unknown strategy kind: " + kind);
  }
  return s;
}

json detector_to_json(const DetectorSpec& d) {
  json out{{"method", d.method}};
  if (!d.label.empty()) out["label"] = d.label;
  if (d.strategy) out["strategy"] = strategy_to_json(*d.strategy);
  if (d.lasso_lambda > 0.0) out["lasso_lambda"] = d.lasso_lambda;
  if (d.method == "mp") {
    out["mp"] = json{{"max_iters", d.mp.max_iters},
                     {"damping", d.mp.damping},
                     {"tol", d.mp.tol}};
  }
  return out;
}

DetectorSpec detector_from_json(const json& j) {
  DetectorSpec d;
  d.method = j.at("method").get<std::string>();
  d.label = j.value("label", std::string());
  if (j.contains("strategy")) d.strategy = strategy_from_json(j.at("strategy"));
  d.lasso_lambda = j.value("lasso_lambda", 0.0);
  if (j.contains("mp")) {
    const json& mp = j.at("mp");
    d.mp.max_iters = mp.value("max_iters", d.mp.max_iters);
    d.mp.damping = mp.value("damping", d.mp.damping);
    d.mp.tol = mp.value("tol", d.mp.tol);
  }
  d.validate();
  return d;
}

}  // namespace

json ensemble_to_json(const SensingEnsemble& ensemble) {
  json vectors = json::array();
  for (const auto& v : ensemble.vectors) vectors.push_back(vector_to_json(v));
  return json{{"n", ensemble.dim()},
              {"vectors", vectors},
              {"probabilities", ensemble.probabilities}};
}

SensingEnsemble ensemble_from_json(const json& j) {
  SensingEnsemble e;
  for (const auto& row : j.at("vectors")) e.vectors.push_back(vector_from_json(row));
  e.probabilities = j.at("probabilities").get<std::vector<double>>();
  e.validate();
  return e;
}

json scenario_to_json(const ScenarioConfig& config) {
  json detectors = json::array();
  for (const auto& d : config.detectors) detectors.push_back(detector_to_json(d));
  return json{{"n", config.n},
              {"k", config.k},
              {"f1", gaussian_to_json(config.f1)},
              {"f2", gaussian_to_json(config.f2)},
              {"strategy", strategy_to_json(config.strategy)},
              {"detectors", detectors},
              {"m_values", config.m_values},
              {"trials", config.trials},
              {"base_seed", config.base_seed},
              {"pin_design", config.pin_design}};
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  c.n = j.at("n").get<int>();
  c.k = j.at("k").get<int>();
  c.f1 = gaussian_from_json(j.at("f1"));
  c.f2 = gaussian_from_json(j.at("f2"));
  c.strategy = strategy_from_json(j.at("strategy"));
  for (const auto& d : j.at("detectors")) c.detectors.push_back(detector_from_json(d));
  c.m_values = j.at("m_values").get<std::vector<int>>();
  c.trials = j.at("trials").get<int>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  c.pin_design = j.value("pin_design", false);
  c.validate();
  return c;
}

SensingStrategy DesignDocument::as_strategy() const {
  return SensingStrategy::schedule(rows);
}

json design_to_json(const DesignDocument& doc) {
  json matrix = json::array();
  for (const auto& row : doc.rows) {
    for (int i = 0; i < row.size(); ++i) matrix.push_back(row(i));
  }
  return json{{"kind", doc.kind},
              {"n", doc.n},
              {"m", doc.m},
              {"matrix", matrix},
              {"metadata", doc.metadata}};
}

json design_to_json(const BipartiteDesign& design) {
  DesignDocument doc;
  doc.kind = "bipartite";
  doc.n = design.n;
  doc.m = design.m;
  doc.rows = design.row_vectors();
  doc.metadata = json{{"seed", design.seed},
                      {"check_degree", design.check_degree},
                      {"variable_degree", design.variable_degree}};
  return design_to_json(doc);
}

DesignDocument design_from_json(const json& j) {
  DesignDocument doc;
  doc.kind = j.at("kind").get<std::string>();
  doc.n = j.at("n").get<int>();
  doc.m = j.at("m").get<int>();
  const auto flat = j.at("matrix").get<std::vector<double>>();
  if (doc.n < 1 || doc.m < 1 || flat.size() != static_cast<std::size_t>(doc.n) * doc.m) {
    throw ConfigError("design JSON: matrix size does not equal m*n");
  }
  doc.rows.reserve(doc.m);
  for (int r = 0; r < doc.m; ++r) {
    Eigen::VectorXd v(doc.n);
    for (int c = 0; c < doc.n; ++c) v(c) = flat[static_cast<std::size_t>(r) * doc.n + c];
    doc.rows.push_back(std::move(v));
  }
  doc.metadata = j.value("metadata", json::object());
  return doc;
}

std::string curve_to_csv(const ErrorCurve& curve) {
  std::string out = "m,detector,trials,errors,error_prob,ci_low,ci_high\n";
  for (const auto& row : curve.rows) {
    out += std::to_string(row.m);
    out += ',';
    out += row.detector;
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += std::to_string(row.errors);
    out += ',';
    out += format_g12(row.error_prob);
    out += ',';
    out += format_g12(row.ci_low);
    out += ',';
    out += format_g12(row.ci_high);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

ObservationSet observations_from_csv(std::istream& in, const DesignDocument* design) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("observations CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "time_index" || header.back() != "value") {
    throw ConfigError("observations CSV: header must be time_index,...,value");
  }
  const bool by_id = header.size() == 3 && header[1] == "vector_id";
  if (by_id && design == nullptr) {
    throw ConfigError("observations CSV references vector ids but no design was given");
  }
  const int inline_dim = static_cast<int>(header.size()) - 2;

  ObservationSet obs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ConfigError("observations CSV: wrong field count on a data row");
    }
    ObservationRecord record;
    if (by_id) {
      const int id = std::stoi(fields[1]);
      if (id < 0 || id >= design->m) throw ConfigError("observations CSV: vector_id out of range");
      record.vector = design->rows[id];
    } else {
      record.vector.resize(inline_dim);
      for (int i = 0; i < inline_dim; ++i) record.vector(i) = std::stod(fields[i + 1]);
    }
    record.value = std::stod(fields.back());
    obs.records.push_back(std::move(record));
  }
  obs.validate();
  return obs;
}

std::string observations_to_csv(const ObservationSet& obs) {
  obs.validate();
  const int n = obs.dim();
  std::string out = "time_index";
  for (int i = 0; i < n; ++i) {
    out += ",a";
    out += std::to_string(i);
  }
  out += ",value\n";
  for (int j = 0; j < obs.size(); ++j) {
    out += std::to_string(j);
    for (int i = 0; i < n; ++i) {
      out += ',';
      out += format_g12(obs.records[j].vector(i));
    }
    out += ',';
    out += format_g12(obs.records[j].value);
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a JSON array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) throw ConfigError("ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace chtest
