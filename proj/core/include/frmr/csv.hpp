#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "frmr/matrix.hpp"

namespace frmr {

struct CsvParseError : Error {
  CsvParseError(const std::string& message, int line, int column)
      : Error(message), line(line), column(column) {}
  int line;    // 1-based
  int column;  // 1-based field index
};

// Matrix payloads are plain CSV: one row per line, no header, every value
// finite. Values are written with 17 significant digits so a write/read
// round trip is bit-exact.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

std::string format_full(double v);

// Result tables: header row plus pre-formatted data rows.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace frmr
