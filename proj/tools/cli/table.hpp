// table.hpp - result tables and their CSV / JSON writers
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace phaseloss::cli {

using Value = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

// Doubles use 12 significant digits; non-finite values print as nan / inf / -inf.
std::string format_value(const Value& v);

void write_csv(std::ostream& os, const Table& t);

// {"meta": ..., "columns": [...], "rows": [{column: value}, ...]}; non-finite
// doubles become null.
nlohmann::json to_json(const Table& t, const nlohmann::json& meta);

}  // namespace phaseloss::cli
