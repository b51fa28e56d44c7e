#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace wfmgf::cli {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::int64_t, double, std::string>;

enum class Format { csv, json };

Format parse_format(const std::string& name);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// CSV: one "# {meta}" line, a header line, then the rows. Doubles use the
/// shortest round-trip form. JSON: {"meta": ..., "rows": [{column: value}]}.
void write_table(std::ostream& os, const Table& table, const Json& meta, Format format);

}  // namespace wfmgf::cli
