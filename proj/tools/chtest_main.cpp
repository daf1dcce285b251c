// chtest: anomaly identification from mixed linear observations.
// Subcommands: chernoff, design, simulate, detect, complexity.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chtest/chernoff.hpp"
#include "chtest/design.hpp"
#include "chtest/detect.hpp"
#include "chtest/errors.hpp"
#include "chtest/io.hpp"
#include "chtest/sim.hpp"
#include "chtest/version.hpp"

namespace {

using chtest::ConfigError;
using nlohmann::json;

constexpr double kLn2 = 0.6931471805599453;

struct GlobalOptions {
  std::uint64_t seed = 12345;
  bool seed_given = false;
  std::string output;
  std::string format = "json";
  int threads = 0;
};

std::uint64_t effective_seed(const GlobalOptions& g) {
  if (g.seed_given) return g.seed;
  if (const char* env = std::getenv("CHTEST_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("CHTEST_SEED is not a valid integer");
    }
  }
  return g.seed;
}

json provenance(const GlobalOptions& g, const std::string& command, const json& config_echo) {
  return json{{"version", chtest::kVersion},
              {"command", command},
              {"seed", effective_seed(g)},
              {"config", config_echo}};
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + g.output);
  out << text;
}

chtest::ScalarGaussian parse_gaussian(const std::string& spec, const char* flag) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) {
    throw ConfigError(std::string(flag) + ": expected 'mean,variance'");
  }
  try {
    chtest::ScalarGaussian g{std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
    g.validate();
    return g;
  } catch (const chtest::Error&) {
    throw;
  } catch (...) {
    throw ConfigError(std::string(flag) + ": expected 'mean,variance'");
  }
}

std::vector<int> parse_index_list(const std::string& spec) {
  std::vector<int> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd parse_vector(const std::string& spec) {
  std::vector<double> values;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) values.push_back(std::stod(tok));
  }
  Eigen::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<int>(i)) = values[i];
  return v;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("failed to parse " + path + ": " + e.what());
  }
  return j;
}

std::string method_name(chtest::DivergenceMethod m) {
  return m == chtest::DivergenceMethod::closed_form ? "closed_form" : "numeric_integration";
}

int cmd_chernoff(const GlobalOptions& g, const std::string& mode, const std::string& p_spec,
                 const std::string& q_spec, const std::string& f1_spec,
                 const std::string& f2_spec, const std::string& ensemble_path,
                 const std::string& hv_spec, const std::string& hw_spec) {
  chtest::DivergenceResult result;
  json echo;
  if (mode == "plain") {
    if (p_spec.empty() || q_spec.empty()) throw ConfigError("plain mode needs --p and --q");
    const auto p = parse_gaussian(p_spec, "--p");
    const auto q = parse_gaussian(q_spec, "--q");
    result = chtest::chernoff(p, q);
    echo = json{{"mode", mode}, {"p", p_spec}, {"q", q_spec}};
  } else if (mode == "ic" || mode == "oc") {
    if (ensemble_path.empty() || f1_spec.empty() || f2_spec.empty()) {
      throw ConfigError("ic/oc modes need --ensemble, --f1 and --f2");
    }
    const auto ensemble = chtest::ensemble_from_json(load_json_file(ensemble_path));
    chtest::Hypothesis hv{parse_index_list(hv_spec)};
    chtest::Hypothesis hw{parse_index_list(hw_spec)};
    if (hv.support.empty() || hv.support.size() != hw.support.size()) {
      throw ConfigError("--hv and --hw must list the same number of indices");
    }
    chtest::HypothesisSpace space{ensemble.dim(), static_cast<int>(hv.support.size()),
                                  parse_gaussian(f1_spec, "--f1"),
                                  parse_gaussian(f2_spec, "--f2")};
    result = mode == "ic" ? chtest::inner_conditional_chernoff(ensemble, space, hv, hw)
                          : chtest::outer_conditional_chernoff(ensemble, space, hv, hw);
    echo = json{{"mode", mode},  {"ensemble", ensemble_path}, {"f1", f1_spec},
                {"f2", f2_spec}, {"hv", hv_spec},             {"hw", hw_spec}};
  } else {
    throw ConfigError("unknown --mode (use plain, ic or oc)");
  }

  if (g.format == "json") {
    json out{{"value_nats", result.value},
             {"value_bits", result.value / kLn2},
             {"lambda_star", result.lambda_star},
             {"method", method_name(result.method)},
             {"provenance", provenance(g, "chernoff", echo)}};
    emit(g, out.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "value_nats " << chtest::format_g12(result.value) << "\n"
        << "value_bits " << chtest::format_g12(result.value / kLn2) << "\n"
        << "lambda_star " << chtest::format_g12(result.lambda_star) << "\n"
        << "method " << method_name(result.method) << "\n"
        << "# version=" << chtest::kVersion << " seed=" << effective_seed(g) << "\n";
    emit(g, out.str());
  }
  return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& config_path) {
  auto config = chtest::scenario_from_json(load_json_file(config_path));
  const auto curve = chtest::error_curve(config, g.threads, &std::cerr);
  const std::string csv = chtest::curve_to_csv(curve);
  const json prov = provenance(g, "simulate", chtest::scenario_to_json(config));
  if (!g.output.empty()) {
    emit(g, csv);
    std::ofstream sidecar(g.output + ".provenance.json");
    sidecar << prov.dump(2) << "\n";
  } else {
    std::cout << csv;
    std::cerr << prov.dump(2) << "\n";
  }
  return 0;
}

int cmd_detect(const GlobalOptions& g, const std::string& design_path,
               const std::string& obs_path, const std::string& method, int k,
               const std::string& f1_spec, const std::string& f2_spec, double lasso_lambda,
               int mp_iters, double mp_damping) {
  const auto design = chtest::design_from_json(load_json_file(design_path));
  std::ifstream obs_file(obs_path);
  if (!obs_file) throw ConfigError("cannot open observations file: " + obs_path);
  const auto obs = chtest::observations_from_csv(obs_file, &design);

  chtest::HypothesisSpace space{design.n, k, parse_gaussian(f1_spec, "--f1"),
                                parse_gaussian(f2_spec, "--f2")};
  chtest::DetectionResult result;
  if (method == "lrt") {
    result = chtest::lrt_full(space, obs);
  } else if (method == "pairwise") {
    result = chtest::pairwise_np(space, obs);
  } else if (method == "lasso") {
    result = chtest::lasso_detect(space, obs, lasso_lambda);
  } else if (method == "mp") {
    chtest::MpOptions options;
    options.max_iters = mp_iters;
    options.damping = mp_damping;
    result = chtest::mp_detect(space, obs, options);
  } else {
    throw ConfigError("unknown --method (use lrt, pairwise, lasso or mp)");
  }

  json out;
  if (result.decision) {
    out["support"] = result.decision->support;
  } else {
    out["support"] = nullptr;
    out["failure"] = true;
  }
  out["method"] = method;
  out["scores"] = result.scores;
  out["iterations"] = result.iterations;
  if (result.tie) out["tie"] = true;
  if (!result.converged) out["converged"] = false;
  out["provenance"] =
      provenance(g, "detect", json{{"design", design_path}, {"observations", obs_path}, {"k", k}});
  emit(g, out.dump(2) + "\n");
  return 0;
}

int cmd_complexity(const GlobalOptions& g, int n, int k, double exponent,
                   const std::string& scenario_path, int m_for_design) {
  double e = exponent;
  json echo{{"n", n}, {"k", k}};
  if (!scenario_path.empty()) {
    const auto config = chtest::scenario_from_json(load_json_file(scenario_path));
    n = config.n;
    k = config.k;
    const int m = m_for_design > 0 ? m_for_design : config.m_values.back();
    const auto ensemble = config.strategy.planning_ensemble(config.n, m, effective_seed(g));
    e = chtest::min_pairwise_exponent(ensemble, config.space()).exponent;
    echo = json{{"scenario", scenario_path}, {"m", m}};
  }
  if (!(e > 0.0)) throw ConfigError("hypotheses indistinguishable (exponent <= 0)");
  if (n < 2 || k < 1 || k >= n) throw ConfigError("complexity: requires 1 <= k < n");

  const double deltas[] = {0.1, 0.01, 0.001};
  if (g.format == "json") {
    json out{{"exponent_nats", e}, {"n", n}, {"k", k}, {"bounds", json::array()}};
    for (double d : deltas) {
      out["bounds"].push_back(json{{"delta", d}, {"m", chtest::sample_complexity(n, k, e, d)}});
    }
    out["provenance"] = provenance(g, "complexity", echo);
    emit(g, out.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "exponent_nats " << chtest::format_g12(e) << "\n";
    for (double d : deltas) {
      out << "m(delta=" << chtest::format_g12(d) << ") " << chtest::sample_complexity(n, k, e, d)
          << "\n";
    }
    out << "# version=" << chtest::kVersion << "\n";
    emit(g, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Compressed hypothesis testing: identify anomalous random variables "
      "from mixed linear observations"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base seed (falls back to CHTEST_SEED, then 12345)")
      ->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--output", g.output, "Write output to a file instead of stdout");
  app.add_option("--format", g.format, "Output format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware parallelism)");

  // chernoff
  auto* chernoff_cmd = app.add_subcommand("chernoff", "Chernoff information queries");
  std::string mode = "plain", p_spec, q_spec, f1_spec, f2_spec, ensemble_path;
  std::string hv_spec = "0", hw_spec = "1";
  chernoff_cmd->add_option("--mode", mode, "plain, ic or oc");
  chernoff_cmd->add_option("--p", p_spec, "First distribution, 'mean,variance'");
  chernoff_cmd->add_option("--q", q_spec, "Second distribution, 'mean,variance'");
  chernoff_cmd->add_option("--f1", f1_spec, "Normal distribution, 'mean,variance'");
  chernoff_cmd->add_option("--f2", f2_spec, "Abnormal distribution, 'mean,variance'");
  chernoff_cmd->add_option("--ensemble", ensemble_path, "Sensing ensemble JSON file");
  chernoff_cmd->add_option("--hv", hv_spec, "First hypothesis support (comma list)");
  chernoff_cmd->add_option("--hw", hw_spec, "Second hypothesis support (comma list)");

  // design
  auto* design_cmd = app.add_subcommand("design", "Generate sensing designs");
  design_cmd->require_subcommand(1);
  int n = 0, m = 0, degree = 6;
  bool near_regular = false;
  double mu1 = 0.0, mu2 = 0.0, var = 1.0;
  std::string sigma1_path, sigma2_path, sigma_path, mu1_spec, mu2_spec;
  auto* bipartite = design_cmd->add_subcommand("bipartite", "Sparse bipartite 0/1 design");
  bipartite->add_option("--n", n)->required();
  bipartite->add_option("--m", m)->required();
  bipartite->add_option("--degree", degree);
  bipartite->add_flag("--near-regular", near_regular,
                      "Allow column degrees to differ by one when n does not divide degree*m");
  auto* hamming = design_cmd->add_subcommand("hamming74", "The 3x7 Hamming parity-check rows");
  auto* separate = design_cmd->add_subcommand("separate", "Separate-observation schedule");
  separate->add_option("--n", n)->required();
  separate->add_option("--m", m)->required();
  auto* optimal_mean =
      design_cmd->add_subcommand("optimal-mean", "Equal-mean optimal sensing vector");
  optimal_mean->add_option("--sigma1", sigma1_path, "JSON matrix file")->required();
  optimal_mean->add_option("--sigma2", sigma2_path, "JSON matrix file")->required();
  auto* optimal_cov =
      design_cmd->add_subcommand("optimal-cov", "Equal-covariance optimal sensing vector");
  optimal_cov->add_option("--mu1", mu1_spec, "Comma list")->required();
  optimal_cov->add_option("--mu2", mu2_spec, "Comma list")->required();
  optimal_cov->add_option("--sigma", sigma_path, "JSON matrix file")->required();
  auto* permutation = design_cmd->add_subcommand("permutation", "k=1 pair-mixing design");
  permutation->add_option("--n", n)->required();
  permutation->add_option("--mu1", mu1)->required();
  permutation->add_option("--mu2", mu2)->required();
  permutation->add_option("--var", var)->required();

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  std::string config_path;
  simulate_cmd->add_option("--config", config_path, "Scenario JSON file")->required();

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "One-shot detection from a design + CSV");
  std::string design_path, obs_path, method = "lrt";
  std::string det_f1, det_f2;
  int k = 1, mp_iters = 200;
  double lasso_lambda = 0.0, mp_damping = 0.5;
  detect_cmd->add_option("--design", design_path, "Design JSON file")->required();
  detect_cmd->add_option("--observations", obs_path, "Observations CSV file")->required();
  detect_cmd->add_option("--method", method, "lrt, pairwise, lasso or mp");
  detect_cmd->add_option("--k", k, "Anomaly count");
  detect_cmd->add_option("--f1", det_f1, "Normal distribution, 'mean,variance'")->required();
  detect_cmd->add_option("--f2", det_f2, "Abnormal distribution, 'mean,variance'")->required();
  detect_cmd->add_option("--lambda", lasso_lambda, "LASSO penalty (0 = default)");
  detect_cmd->add_option("--mp-iters", mp_iters, "Message passing iteration cap");
  detect_cmd->add_option("--damping", mp_damping, "Message passing damping");

  // complexity
  auto* complexity_cmd = app.add_subcommand("complexity", "Sample-complexity planning");
  double exponent = 0.0;
  std::string scenario_path;
  int m_for_design = 0;
  complexity_cmd->add_option("--n", n, "Variable count");
  complexity_cmd->add_option("--k", k, "Anomaly count");
  complexity_cmd->add_option("--exponent", exponent, "Error exponent in nats");
  complexity_cmd->add_option("--scenario", scenario_path, "Derive the exponent from a scenario");
  complexity_cmd->add_option("--m", m_for_design, "Design size for bipartite scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (chernoff_cmd->parsed()) {
      return cmd_chernoff(g, mode, p_spec, q_spec, f1_spec, f2_spec, ensemble_path, hv_spec,
                          hw_spec);
    }
    if (design_cmd->parsed()) {
      const std::uint64_t seed = effective_seed(g);
      json out;
      if (bipartite->parsed()) {
        out = chtest::design_to_json(chtest::sparse_bipartite(n, m, degree, seed, near_regular));
      } else if (hamming->parsed()) {
        chtest::DesignDocument doc;
        doc.kind = "hamming74";
        doc.n = 7;
        doc.m = 3;
        doc.rows = chtest::hamming74_rows();
        out = chtest::design_to_json(doc);
      } else if (separate->parsed()) {
        chtest::DesignDocument doc;
        doc.kind = "separate";
        doc.n = n;
        doc.m = m;
        doc.rows = chtest::separate_baseline(n, m, seed).schedule_vectors();
        doc.metadata = json{{"seed", seed}};
        out = chtest::design_to_json(doc);
      } else if (optimal_mean->parsed()) {
        const auto r = chtest::optimal_vector_equal_mean(
            chtest::matrix_from_json(load_json_file(sigma1_path)),
            chtest::matrix_from_json(load_json_file(sigma2_path)));
        chtest::DesignDocument doc;
        doc.kind = "optimal-mean";
        doc.n = static_cast<int>(r.vector.size());
        doc.m = 1;
        doc.rows = {r.vector};
        doc.metadata = json{{"B", r.B}, {"exponent_nats", r.exponent}, {"tie", r.tie}};
        out = chtest::design_to_json(doc);
      } else if (optimal_cov->parsed()) {
        const auto r = chtest::optimal_vector_equal_cov(
            parse_vector(mu1_spec), parse_vector(mu2_spec),
            chtest::matrix_from_json(load_json_file(sigma_path)));
        chtest::DesignDocument doc;
        doc.kind = "optimal-cov";
        doc.n = static_cast<int>(r.vector.size());
        doc.m = 1;
        doc.rows = {r.vector};
        doc.metadata = json{{"exponent_nats", r.exponent}};
        out = chtest::design_to_json(doc);
      } else if (permutation->parsed()) {
        const auto r = chtest::permutation_design(n, mu1, mu2, var);
        out = json{{"kind", "permutation"},
                   {"n", n},
                   {"a_star", json::array()},
                   {"ensemble", chtest::ensemble_to_json(r.ensemble)},
                   {"mixed_exponent_nats", r.mixed_exponent},
                   {"separate_exponent_nats", r.separate_exponent}};
        for (int i = 0; i < r.a_star.size(); ++i) out["a_star"].push_back(r.a_star(i));
      }
      out["provenance"] = provenance(g, "design", json{{"seed", seed}});
      emit(g, out.dump(2) + "\n");
      return 0;
    }
    if (simulate_cmd->parsed()) return cmd_simulate(g, config_path);
    if (detect_cmd->parsed()) {
      return cmd_detect(g, design_path, obs_path, method, k, det_f1, det_f2, lasso_lambda,
                        mp_iters, mp_damping);
    }
    if (complexity_cmd->parsed()) {
      return cmd_complexity(g, n, k, exponent, scenario_path, m_for_design);
    }
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const chtest::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
