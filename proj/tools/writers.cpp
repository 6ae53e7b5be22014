#include "writers.hpp"

#include <charconv>
#include <cmath>

#include "jsdd/version.hpp"

namespace jsdd::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const nlohmann::json& config_echo,
                std::uint64_t seed, const Table& table, const nlohmann::json& extra) {
  nlohmann::json doc;
  doc["tool_version"] = JSDD_VERSION;
  doc["seed"] = seed;
  doc["config"] = config_echo;
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) {
      if (std::isnan(v)) {
        r.push_back(nullptr);
      } else {
        r.push_back(v);
      }
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  for (const auto& [key, value] : extra.items()) doc[key] = value;
  out << doc.dump(2) << '\n';
}

}  // namespace jsdd::cli
