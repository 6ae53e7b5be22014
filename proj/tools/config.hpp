#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsdd/opt_sum.hpp"
#include "jsdd/simlink.hpp"

namespace jsdd::cli {

/// Thrown with exit code 2 for configuration problems, 3 for solver or
/// runtime failures.
struct CliError : std::runtime_error {
  CliError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
  int exit_code;
};

struct SweepSpec {
  bool present = false;
  SweepAxis axis = SweepAxis::Power;
  std::vector<double> values;
};

struct ConvergenceSpec {
  bool present = false;
  std::string solver;  // "sca" or "admm"
  int rank = 6;
  int streams = 2;
  double corr = 0.8;
  double rho = 0.5;
  double alpha = 4.0;        // per-user cap (sca)
  int users = 2;             // admm
  double total_power = 8.0;  // admm
  SumCriterion criterion = SumCriterion::Average;
  std::uint64_t seed = 1;
};

struct CompareBasisSpec {
  bool present = false;
  std::vector<int> antennas;
};

struct OptimizeSpec {
  bool present = false;
  std::string solver;  // sca | sdr | high_snr | low_snr | no_csi
  int rank = 6;
  int streams = 2;
  double corr = 0.8;
  double rho = 0.5;
  double alpha = 4.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  bool has_scenario = false;
  Scenario scenario;
  SweepSpec sweep;
  ConvergenceSpec convergence;
  CompareBasisSpec compare_basis;
  OptimizeSpec optimize;
  nlohmann::json echo;  // resolved document for result records
};

RunConfig load_config(const std::string& path);

/// Command-line overrides take precedence over the file.
void apply_seed_override(RunConfig& config, std::uint64_t seed);

PrecoderSource precoder_from_name(const std::string& name);
const char* precoder_name(PrecoderSource source);
SweepAxis axis_from_name(const std::string& name);
const char* axis_name(SweepAxis axis);

}  // namespace jsdd::cli
