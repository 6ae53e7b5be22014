#include "config.hpp"

#include <fstream>
#include <set>

namespace jsdd::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw CliError(2, msg); }

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T require(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) config_error("missing key '" + key + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("key '" + key + "' in " + where + " has the wrong type");
  }
}

template <typename T>
T optional_or(const json& obj, const std::string& where, const std::string& key,
              T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("key '" + key + "' in " + where + " has the wrong type");
  }
}

Scenario parse_scenario(const json& obj) {
  reject_unknown_keys(obj, "scenario",
                      {"antennas", "users", "corr", "constellation", "code", "precoder",
                       "power_dbm", "noise_var", "power_split", "basis", "trials",
                       "coherence_blocks", "seed", "quad_nodes", "eigen_rel_tol",
                       "jsdm_group_size"});
  Scenario scn;
  scn.num_antennas = require<int>(obj, "scenario", "antennas");

  const json& users = obj.contains("users") ? obj.at("users") : json::array();
  if (!users.is_array() || users.empty()) {
    config_error("scenario.users must be a non-empty array");
  }
  for (const json& u : users) {
    reject_unknown_keys(u, "scenario.users[]", {"mean_angle", "spread"});
    UserGeometry g;
    g.mean_angle_deg = require<double>(u, "scenario.users[]", "mean_angle");
    g.spread_deg = require<double>(u, "scenario.users[]", "spread");
    scn.users.push_back(g);
  }

  if (!obj.contains("corr")) config_error("missing key 'corr' in scenario");
  if (obj.at("corr").is_array()) {
    scn.corr = obj.at("corr").get<std::vector<double>>();
  } else {
    scn.corr.assign(scn.users.size(), obj.at("corr").get<double>());
  }

  scn.constellation = optional_or<std::string>(obj, "scenario", "constellation", "qpsk");
  if (!obj.contains("code")) config_error("missing key 'code' in scenario");
  if (obj.at("code").is_array()) {
    scn.codes = obj.at("code").get<std::vector<std::string>>();
  } else {
    scn.codes = {obj.at("code").get<std::string>()};
  }

  scn.precoder_source =
      precoder_from_name(require<std::string>(obj, "scenario", "precoder"));
  scn.power_dbm = require<double>(obj, "scenario", "power_dbm");
  scn.noise_var = optional_or<double>(obj, "scenario", "noise_var", 1.0);

  const bool sum_source = scn.precoder_source == PrecoderSource::SumAverage ||
                          scn.precoder_source == PrecoderSource::SumMinMax;
  const std::string split = optional_or<std::string>(obj, "scenario", "power_split",
                                                     sum_source ? "optimized" : "uniform");
  if (split == "uniform") {
    scn.power_split = PowerSplit::Uniform;
  } else if (split == "optimized") {
    scn.power_split = PowerSplit::Optimized;
  } else {
    config_error("scenario.power_split must be 'uniform' or 'optimized'");
  }

  const std::string basis = optional_or<std::string>(obj, "scenario", "basis", "dft");
  if (basis == "dft") {
    scn.basis = BasisKind::Dft;
  } else if (basis == "evd") {
    scn.basis = BasisKind::Evd;
  } else {
    config_error("scenario.basis must be 'dft' or 'evd'");
  }

  scn.trials = require<int>(obj, "scenario", "trials");
  scn.coherence_blocks = require<int>(obj, "scenario", "coherence_blocks");
  scn.seed = require<std::uint64_t>(obj, "scenario", "seed");
  scn.quad_nodes = optional_or<int>(obj, "scenario", "quad_nodes", 0);
  scn.eigen_rel_tol = optional_or<double>(obj, "scenario", "eigen_rel_tol", 1e-3);
  scn.jsdm_group_size = optional_or<int>(obj, "scenario", "jsdm_group_size", 1);
  return scn;
}

SweepSpec parse_sweep(const json& obj) {
  reject_unknown_keys(obj, "sweep", {"axis", "values"});
  SweepSpec spec;
  spec.present = true;
  spec.axis = axis_from_name(require<std::string>(obj, "sweep", "axis"));
  spec.values = require<std::vector<double>>(obj, "sweep", "values");
  if (spec.values.empty()) config_error("sweep.values must be non-empty");
  return spec;
}

ConvergenceSpec parse_convergence(const json& obj) {
  reject_unknown_keys(obj, "convergence",
                      {"solver", "rank", "streams", "corr", "rho", "alpha", "users",
                       "total_power", "criterion", "seed"});
  ConvergenceSpec spec;
  spec.present = true;
  spec.solver = require<std::string>(obj, "convergence", "solver");
  if (spec.solver != "sca" && spec.solver != "admm") {
    config_error("convergence.solver must be 'sca' or 'admm'");
  }
  spec.rank = optional_or<int>(obj, "convergence", "rank", spec.rank);
  spec.streams = optional_or<int>(obj, "convergence", "streams", spec.streams);
  spec.corr = optional_or<double>(obj, "convergence", "corr", spec.corr);
  spec.rho = optional_or<double>(obj, "convergence", "rho", spec.rho);
  spec.alpha = optional_or<double>(obj, "convergence", "alpha", spec.alpha);
  spec.users = optional_or<int>(obj, "convergence", "users", spec.users);
  spec.total_power = optional_or<double>(obj, "convergence", "total_power", spec.total_power);
  const std::string crit =
      optional_or<std::string>(obj, "convergence", "criterion", "average");
  if (crit == "average") {
    spec.criterion = SumCriterion::Average;
  } else if (crit == "minmax") {
    spec.criterion = SumCriterion::MinMax;
  } else {
    config_error("convergence.criterion must be 'average' or 'minmax'");
  }
  spec.seed = optional_or<std::uint64_t>(obj, "convergence", "seed", 1);
  return spec;
}

CompareBasisSpec parse_compare_basis(const json& obj) {
  reject_unknown_keys(obj, "compare_basis", {"antennas"});
  CompareBasisSpec spec;
  spec.present = true;
  spec.antennas = require<std::vector<int>>(obj, "compare_basis", "antennas");
  if (spec.antennas.empty()) config_error("compare_basis.antennas must be non-empty");
  return spec;
}

OptimizeSpec parse_optimize(const json& obj) {
  reject_unknown_keys(obj, "optimize",
                      {"solver", "rank", "streams", "corr", "rho", "alpha", "seed"});
  OptimizeSpec spec;
  spec.present = true;
  spec.solver = require<std::string>(obj, "optimize", "solver");
  const std::set<std::string> solvers{"sca", "sdr", "high_snr", "low_snr", "no_csi"};
  if (!solvers.count(spec.solver)) {
    config_error("optimize.solver must be one of sca, sdr, high_snr, low_snr, no_csi");
  }
  spec.rank = optional_or<int>(obj, "optimize", "rank", spec.rank);
  spec.streams = optional_or<int>(obj, "optimize", "streams", spec.streams);
  spec.corr = optional_or<double>(obj, "optimize", "corr", spec.corr);
  spec.rho = optional_or<double>(obj, "optimize", "rho", spec.rho);
  spec.alpha = optional_or<double>(obj, "optimize", "alpha", spec.alpha);
  spec.seed = optional_or<std::uint64_t>(obj, "optimize", "seed", 1);
  return spec;
}

}  // namespace

PrecoderSource precoder_from_name(const std::string& name) {
  if (name == "sca") return PrecoderSource::Sca;
  if (name == "sdr") return PrecoderSource::Sdr;
  if (name == "high_snr") return PrecoderSource::HighSnr;
  if (name == "low_snr") return PrecoderSource::LowSnr;
  if (name == "no_csi") return PrecoderSource::NoCsi;
  if (name == "sum_average") return PrecoderSource::SumAverage;
  if (name == "sum_minmax") return PrecoderSource::SumMinMax;
  if (name == "jsdm") return PrecoderSource::JsdmBaseline;
  config_error("unknown precoder source: " + name);
}

const char* precoder_name(PrecoderSource source) {
  switch (source) {
    case PrecoderSource::Sca: return "sca";
    case PrecoderSource::Sdr: return "sdr";
    case PrecoderSource::HighSnr: return "high_snr";
    case PrecoderSource::LowSnr: return "low_snr";
    case PrecoderSource::NoCsi: return "no_csi";
    case PrecoderSource::SumAverage: return "sum_average";
    case PrecoderSource::SumMinMax: return "sum_minmax";
    case PrecoderSource::JsdmBaseline: return "jsdm";
  }
  return "unknown";
}

SweepAxis axis_from_name(const std::string& name) {
  if (name == "power") return SweepAxis::Power;
  if (name == "users") return SweepAxis::Users;
  if (name == "antennas") return SweepAxis::Antennas;
  if (name == "corr") return SweepAxis::Corr;
  config_error("unknown sweep axis: " + name);
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Power: return "power";
    case SweepAxis::Users: return "users";
    case SweepAxis::Antennas: return "antennas";
    case SweepAxis::Corr: return "corr";
  }
  return "unknown";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config root must be a JSON object");
  reject_unknown_keys(doc, "config root",
                      {"scenario", "sweep", "convergence", "compare_basis", "optimize"});

  RunConfig config;
  config.echo = doc;
  if (doc.contains("scenario")) {
    config.scenario = parse_scenario(doc.at("scenario"));
    config.has_scenario = true;
  }
  if (doc.contains("sweep")) config.sweep = parse_sweep(doc.at("sweep"));
  if (doc.contains("convergence")) config.convergence = parse_convergence(doc.at("convergence"));
  if (doc.contains("compare_basis")) {
    config.compare_basis = parse_compare_basis(doc.at("compare_basis"));
  }
  if (doc.contains("optimize")) config.optimize = parse_optimize(doc.at("optimize"));
  return config;
}

void apply_seed_override(RunConfig& config, std::uint64_t seed) {
  config.scenario.seed = seed;
  config.convergence.seed = seed;
  config.optimize.seed = seed;
  if (config.echo.contains("scenario")) config.echo["scenario"]["seed"] = seed;
  if (config.echo.contains("convergence")) config.echo["convergence"]["seed"] = seed;
  if (config.echo.contains("optimize")) config.echo["optimize"]["seed"] = seed;
}

}  // namespace jsdd::cli
