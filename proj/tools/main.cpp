#include <CLI11.hpp>
#include <json.hpp>
#include <iostream>

#include "commands.hpp"
#include "config.hpp"
#include "jsdd/version.hpp"

namespace {

using jsdd::cli::CliError;
using jsdd::cli::CommonFlags;
using jsdd::cli::RunConfig;

struct Args {
  std::string config_path;
  CommonFlags flags;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("config", args.config_path, "experiment configuration file (JSON)")
      ->required();
  cmd->add_option("--out", args.flags.out_path, "output path ('-' = stdout)");
  cmd->add_option("--format", args.flags.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", args.flags.threads, "worker thread cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "override every seed in the config")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

int fail(const std::string& message, int code) {
  nlohmann::json err;
  err["error"] = message;
  err["exit_code"] = code;
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-level simulation and precoder optimization experiments"};
  app.set_version_flag("--version", JSDD_VERSION);
  app.require_subcommand(1);

  Args args;
  CLI::App* ber = app.add_subcommand("ber", "single BER point");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "BER sweep along one axis");
  CLI::App* conv = app.add_subcommand("convergence", "solver iteration traces");
  CLI::App* cmp = app.add_subcommand("compare-basis", "DFT vs exact eigenbasis");
  CLI::App* opt = app.add_subcommand("optimize", "single-problem solver dump");
  for (CLI::App* cmd : {ber, sweep_cmd, conv, cmp, opt}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    return fail(e.what(), 2);
  }

  try {
    RunConfig config = jsdd::cli::load_config(args.config_path);
    if (args.seed_set) jsdd::cli::apply_seed_override(config, args.seed);
    if (ber->parsed()) return jsdd::cli::cmd_ber(config, args.flags);
    if (sweep_cmd->parsed()) return jsdd::cli::cmd_sweep(config, args.flags);
    if (conv->parsed()) return jsdd::cli::cmd_convergence(config, args.flags);
    if (cmp->parsed()) return jsdd::cli::cmd_compare_basis(config, args.flags);
    if (opt->parsed()) return jsdd::cli::cmd_optimize(config, args.flags);
    return fail("no command selected", 2);
  } catch (const CliError& e) {
    return fail(e.what(), e.exit_code);
  } catch (const std::invalid_argument& e) {
    return fail(e.what(), 2);
  } catch (const std::exception& e) {
    return fail(e.what(), 3);
  }
}
