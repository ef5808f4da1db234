#include "frmr/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace frmr {

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void fail(const std::filesystem::path& path,
                       const std::string& what, int line, int column) {
  std::ostringstream msg;
  msg << path.string() << ":" << line << ":" << column << ": " << what;
  throw CsvParseError(msg.str(), line, column);
}

double parse_field(const std::filesystem::path& path, const std::string& field,
                   int line, int column) {
  if (field.empty()) fail(path, "empty field", line, column);
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + field.size())
    fail(path, "not a number: '" + field + "'", line, column);
  if (!std::isfinite(v))
    fail(path, "non-finite value: '" + field + "'", line, column);
  return v;
}

}  // namespace

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file", 1, 1);

  std::vector<std::vector<double>> rows;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() && in.peek() == std::char_traits<char>::eof()) break;

    std::vector<double> row;
    size_t start = 0;
    int column = 0;
    while (true) {
      ++column;
      const size_t comma = text.find(',', start);
      const std::string field = text.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start);
      row.push_back(parse_field(path, field, line_no, column));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, "expected " + std::to_string(rows.front().size()) +
                     " fields, found " + std::to_string(row.size()),
           line_no, static_cast<int>(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "no data", 1, 1);

  Matrix m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_full(m(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

}  // namespace frmr
