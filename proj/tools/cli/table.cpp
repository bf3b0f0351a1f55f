// table.cpp
#include "cli/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace phaseloss::cli {

std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "1" : "0";
  return std::get<std::string>(v);
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_value(row[c]);
    os << '\n';
  }
}

nlohmann::json to_json(const Table& t, const nlohmann::json& meta) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
              r[t.columns[c]] = std::isfinite(x) ? nlohmann::json(std::stod(format_value(x))) : nlohmann::json();
            } else {
              r[t.columns[c]] = x;
            }
          },
          row[c]);
    }
    rows.push_back(std::move(r));
  }
  return {{"meta", meta}, {"columns", t.columns}, {"rows", rows}};
}

}  // namespace phaseloss::cli
