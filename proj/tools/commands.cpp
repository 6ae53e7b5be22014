#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <limits>

#include "jsdd/channel.hpp"
#include "jsdd/opt_individual.hpp"
#include "jsdd/opt_sum.hpp"
#include "jsdd/pep.hpp"
#include "jsdd/simlink.hpp"
#include "writers.hpp"

namespace jsdd::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_scenario(const RunConfig& config) {
  if (!config.has_scenario) throw CliError(2, "this command needs a 'scenario' section");
}

int emit(const RunConfig& config, const CommonFlags& flags, std::uint64_t seed,
         const Table& table, const nlohmann::json& extra = nlohmann::json::object()) {
  const auto write_to = [&](std::ostream& out) {
    if (flags.format == "csv") {
      write_csv(out, table);
    } else if (flags.format == "json") {
      write_json(out, config.echo, seed, table, extra);
    } else {
      throw CliError(2, "format must be 'csv' or 'json'");
    }
  };
  if (flags.out_path == "-") {
    write_to(std::cout);
  } else {
    std::ofstream out(flags.out_path, std::ios::binary);
    if (!out) throw CliError(3, "cannot open output file: " + flags.out_path);
    write_to(out);
  }
  return 0;
}

std::vector<std::string> ber_columns(std::size_t n_users) {
  std::vector<std::string> cols{"axis", "value", "ok"};
  for (std::size_t k = 1; k <= n_users; ++k) cols.push_back("ber_user" + std::to_string(k));
  cols.push_back("aggregate_ber");
  cols.push_back("bits_sent");
  cols.push_back("bit_errors");
  return cols;
}

std::vector<double> ber_row(double axis_id, double value, const SweepPoint& point,
                            std::size_t n_users) {
  std::vector<double> row{axis_id, value, point.ok ? 1.0 : 0.0};
  for (std::size_t k = 0; k < n_users; ++k) {
    row.push_back(point.ok ? point.result.per_user_ber[k] : kNan);
  }
  row.push_back(point.ok ? point.result.aggregate_ber : kNan);
  row.push_back(point.ok ? static_cast<double>(point.result.bits_sent) : kNan);
  row.push_back(point.ok ? static_cast<double>(point.result.bit_errors) : kNan);
  return row;
}

SyntheticInstance instance_from(const std::uint64_t seed, int rank, int streams,
                                double corr, double rho, double alpha) {
  RngStream rng = RngStream::derive(seed, 0x0b7a1u);
  try {
    return make_instance(rng, rank, streams, corr, rho, alpha);
  } catch (const std::invalid_argument& e) {
    throw CliError(2, std::string("invalid problem parameters: ") + e.what());
  }
}

}  // namespace

int cmd_ber(const RunConfig& config, const CommonFlags& flags) {
  require_scenario(config);
  SweepPoint point;
  point.value = config.scenario.power_dbm;
  try {
    point.result = run_ber(config.scenario, flags.threads);
    point.ok = true;
  } catch (const std::invalid_argument& e) {
    throw CliError(2, e.what());
  } catch (const std::exception& e) {
    throw CliError(3, e.what());
  }
  const std::size_t k = config.scenario.users.size();
  Table table;
  table.columns = ber_columns(k);
  table.rows.push_back(
      ber_row(static_cast<double>(SweepAxis::Power), point.value, point, k));
  return emit(config, flags, config.scenario.seed, table);
}

int cmd_sweep(const RunConfig& config, const CommonFlags& flags) {
  require_scenario(config);
  if (!config.sweep.present) throw CliError(2, "sweep command needs a 'sweep' section");
  std::vector<SweepPoint> points;
  try {
    points = sweep(config.scenario, config.sweep.axis, config.sweep.values, flags.threads);
  } catch (const std::invalid_argument& e) {
    throw CliError(2, e.what());
  }
  // Per-user columns follow the scenario user count except on a user-count
  // sweep, where the aggregate is the comparable quantity.
  const std::size_t k =
      config.sweep.axis == SweepAxis::Users ? 0 : config.scenario.users.size();
  Table table;
  table.columns = ber_columns(k);
  nlohmann::json errors = nlohmann::json::array();
  for (const SweepPoint& point : points) {
    table.rows.push_back(
        ber_row(static_cast<double>(config.sweep.axis), point.value, point, k));
    if (!point.ok) {
      errors.push_back({{"value", point.value}, {"error", point.error}});
    }
  }
  nlohmann::json extra;
  extra["errors"] = errors;
  return emit(config, flags, config.scenario.seed, table, extra);
}

int cmd_convergence(const RunConfig& config, const CommonFlags& flags) {
  if (!config.convergence.present) {
    throw CliError(2, "convergence command needs a 'convergence' section");
  }
  const ConvergenceSpec& spec = config.convergence;
  Table table;
  try {
    if (spec.solver == "sca") {
      const SyntheticInstance inst = instance_from(spec.seed, spec.rank, spec.streams,
                                                   spec.corr, spec.rho, spec.alpha);
      const ScaResult result = solve_sca(inst.problem, spec.seed);
      table.columns = {"iter", "objective"};
      for (std::size_t i = 0; i < result.trace.objective_per_iter.size(); ++i) {
        table.rows.push_back(
            {static_cast<double>(i), result.trace.objective_per_iter[i]});
      }
    } else {
      SumProblem prob;
      prob.total_power = spec.total_power;
      prob.criterion = spec.criterion;
      for (int k = 0; k < spec.users; ++k) {
        const SyntheticInstance inst =
            instance_from(spec.seed + k, spec.rank, spec.streams, spec.corr, spec.rho,
                          spec.total_power / spec.users);
        prob.users.push_back(inst.problem);
        prob.weights.push_back(1.0);
      }
      const SumSolution sol = solve_sum(prob);
      table.columns = {"iter", "objective", "residual"};
      for (std::size_t i = 0; i < sol.admm_trace.residual_per_iter.size(); ++i) {
        table.rows.push_back({static_cast<double>(i),
                              sol.admm_trace.objective_per_iter[i],
                              sol.admm_trace.residual_per_iter[i]});
      }
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError(3, e.what());
  }
  return emit(config, flags, spec.seed, table);
}

int cmd_compare_basis(const RunConfig& config, const CommonFlags& flags) {
  require_scenario(config);
  if (!config.compare_basis.present) {
    throw CliError(2, "compare-basis command needs a 'compare_basis' section");
  }
  Table table;
  table.columns = {"antennas", "alignment", "ber_dft", "ber_evd"};
  try {
    for (int m : config.compare_basis.antennas) {
      Scenario scn = config.scenario;
      scn.num_antennas = m;

      double alignment = 0.0;
      for (const UserGeometry& geom : scn.users) {
        const ChannelStats stats =
            eigen_truncate(toeplitz_covariance(geom, m, scn.quad_nodes), scn.eigen_rel_tol);
        alignment += subspace_alignment(stats, dft_select(geom, m));
      }
      alignment /= static_cast<double>(scn.users.size());

      scn.basis = BasisKind::Dft;
      const BerResult dft = run_ber(scn, flags.threads);
      scn.basis = BasisKind::Evd;
      const BerResult evd = run_ber(scn, flags.threads);
      table.rows.push_back({static_cast<double>(m), alignment, dft.aggregate_ber,
                            evd.aggregate_ber});
    }
  } catch (const std::invalid_argument& e) {
    throw CliError(2, e.what());
  } catch (const std::exception& e) {
    throw CliError(3, e.what());
  }
  return emit(config, flags, config.scenario.seed, table);
}

int cmd_optimize(const RunConfig& config, const CommonFlags& flags) {
  if (!config.optimize.present) {
    throw CliError(2, "optimize command needs an 'optimize' section");
  }
  const OptimizeSpec& spec = config.optimize;
  const double corr = (spec.solver == "no_csi") ? 0.0 : spec.corr;
  const SyntheticInstance inst =
      instance_from(spec.seed, spec.rank, spec.streams, corr, spec.rho, spec.alpha);
  Table table;
  table.columns = {"iter", "objective", "power"};
  try {
    if (spec.solver == "sca") {
      const ScaResult result = solve_sca(inst.problem, spec.seed);
      for (std::size_t i = 0; i < result.trace.objective_per_iter.size(); ++i) {
        const double pw =
            (i + 1 == result.trace.objective_per_iter.size())
                ? result.precoder.m.squaredNorm()
                : kNan;
        table.rows.push_back(
            {static_cast<double>(i), result.trace.objective_per_iter[i], pw});
      }
    } else if (spec.solver == "sdr") {
      const SdrResult result = solve_sdr(inst.problem);
      for (std::size_t i = 0; i < result.trace.objective_per_iter.size(); ++i) {
        const double pw = (i + 1 == result.trace.objective_per_iter.size())
                              ? result.omega.trace().real()
                              : kNan;
        table.rows.push_back(
            {static_cast<double>(i), result.trace.objective_per_iter[i], pw});
      }
    } else {
      Precoder m;
      if (spec.solver == "high_snr") {
        m = waterfill_high_snr(inst.problem);
      } else if (spec.solver == "low_snr") {
        m = solve_low_snr(inst.problem, inst.est_ch, inst.corr, inst.eigvals);
      } else {
        m = waterfill_no_csi(inst.problem);
      }
      table.rows.push_back({0.0, objective(inst.problem, m), m.m.squaredNorm()});
    }
  } catch (const std::exception& e) {
    throw CliError(3, e.what());
  }
  return emit(config, flags, spec.seed, table);
}

}  // namespace jsdd::cli
