#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace excires {

// Tabular results destined for CSV: named columns, rows of doubles.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Writes `content` to `path` atomically: the bytes land in a temporary file
// in the same directory which is then renamed over the target, so the target
// path never holds a partial file.  Throws std::runtime_error on I/O errors.
void write_text_atomic(const std::string& path, const std::string& content);

// CSV emission: header row, decimal point, 10 significant digits per value.
// The text is stable under a read-back/re-serialize cycle.  Empty tables are
// rejected (ParameterError) and no file is created.
std::string format_csv(const ResultTable& table);
void write_csv(const ResultTable& table, const std::string& path);

// JSON emission with stable (insertion) key order; doubles serialize as
// shortest round-trip decimals, so read-back reproduces values exactly.
void write_json(const nlohmann::ordered_json& doc, const std::string& path);

}  // namespace excires
