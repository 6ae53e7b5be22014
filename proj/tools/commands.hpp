#pragma once

#include <string>

#include "config.hpp"

namespace jsdd::cli {

struct CommonFlags {
  std::string out_path = "-";  // '-' writes to stdout
  std::string format = "csv";
  int threads = 1;
};

int cmd_ber(const RunConfig& config, const CommonFlags& flags);
int cmd_sweep(const RunConfig& config, const CommonFlags& flags);
int cmd_convergence(const RunConfig& config, const CommonFlags& flags);
int cmd_compare_basis(const RunConfig& config, const CommonFlags& flags);
int cmd_optimize(const RunConfig& config, const CommonFlags& flags);

}  // namespace jsdd::cli
