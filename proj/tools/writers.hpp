#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

namespace jsdd::cli {

/// Result table with a fixed column order. Numeric cells are rendered with
/// the shortest round-trip representation so identical runs produce
/// byte-identical files.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double value);

void write_csv(std::ostream& out, const Table& table);

/// Single JSON result record: resolved config echo, tool version, seed,
/// column names and numeric rows.
void write_json(std::ostream& out, const nlohmann::json& config_echo,
                std::uint64_t seed, const Table& table,
                const nlohmann::json& extra = nlohmann::json::object());

}  // namespace jsdd::cli
