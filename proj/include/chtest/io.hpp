#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chtest/design.hpp"
#include "chtest/sim.hpp"

namespace chtest {

/// 12 significant digits, C locale ('.' decimal, no separators).
std::string format_g12(double value);

nlohmann::json ensemble_to_json(const SensingEnsemble& ensemble);
SensingEnsemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const nlohmann::json& j);

/// A serialized design: {kind, n, m, matrix (row-major), metadata}. Bipartite
/// and schedule designs carry 0/1 matrices; optimal-vector designs carry one
/// real row.
struct DesignDocument {
  std::string kind;
  int n = 0;
  int m = 0;
  std::vector<Eigen::VectorXd> rows;
  nlohmann::json metadata;

  SensingStrategy as_strategy() const;  // schedule over the rows
};

nlohmann::json design_to_json(const DesignDocument& doc);
nlohmann::json design_to_json(const BipartiteDesign& design);
DesignDocument design_from_json(const nlohmann::json& j);

std::string curve_to_csv(const ErrorCurve& curve);

/// Observations CSV. Two accepted headers:
///   time_index,vector_id,value            (vector_id indexes design rows)
///   time_index,a0,...,a{n-1},value        (inline coefficients)
ObservationSet observations_from_csv(std::istream& in, const DesignDocument* design);
std::string observations_to_csv(const ObservationSet& obs);

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

}  // namespace chtest
