#include "rflogit/csv_io.hpp"

#include "rflogit/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace rflogit {

namespace {

// Splits into lines on '\n'; a final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", row, col);
  }
  return v;
}

void parse_row(std::string_view line, std::size_t row, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  std::size_t col = 1;
  while (true) {
    const std::size_t end = line.find(',', pos);
    const std::string_view cell = line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    out.push_back(parse_cell(cell, row, col));
    if (end == std::string_view::npos) break;
    pos = end + 1;
    ++col;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RawCurves parse_curves_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("curves file is empty", 1, 1);

  std::vector<double> cells;
  parse_row(lines[0], 1, cells);
  const auto j = cells.size();
  if (j < 2) throw ParseError("grid header needs at least two points", 1, 1);
  Vector grid = Eigen::Map<Vector>(cells.data(), static_cast<Index>(j));
  for (std::size_t k = 1; k < j; ++k) {
    if (!(grid(static_cast<Index>(k)) > grid(static_cast<Index>(k - 1)))) {
      throw ParseError("grid header is not strictly increasing", 1, k + 1);
    }
  }

  const auto n = lines.size() - 1;
  Matrix values(static_cast<Index>(n), static_cast<Index>(j));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = i + 2;
    parse_row(lines[i + 1], row, cells);
    if (cells.size() != j) {
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(j), row,
                       std::min(cells.size(), j) + 1);
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (!std::isfinite(cells[k])) throw ParseError("non-finite value", row, k + 1);
      values(static_cast<Index>(i), static_cast<Index>(k)) = cells[k];
    }
  }
  return RawCurves{std::move(grid), std::move(values)};
}

Vector parse_response_csv(std::string_view text) {
  const auto lines = split_lines(text);
  Vector y(static_cast<Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view cell = lines[i];
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    if (cell == "0") {
      y(static_cast<Index>(i)) = 0.0;
    } else if (cell == "1") {
      y(static_cast<Index>(i)) = 1.0;
    } else {
      throw ParseError("response value '" + std::string(cell) + "' is not 0 or 1", i + 1, 1);
    }
  }
  return y;
}

RawCurves read_curves_csv(const std::filesystem::path& path) { return parse_curves_csv(read_text_file(path)); }

Vector read_response_csv(const std::filesystem::path& path) { return parse_response_csv(read_text_file(path)); }

void write_curves_csv(std::ostream& out, const RawCurves& curves) {
  std::string line;
  auto emit_row = [&](const auto& row) {
    line.clear();
    for (Index k = 0; k < row.size(); ++k) {
      if (k > 0) line += ',';
      line += format_double(row(k));
    }
    line += '\n';
    out << line;
  };
  emit_row(curves.grid);
  for (Index i = 0; i < curves.values.rows(); ++i) emit_row(curves.values.row(i));
}

void write_response_csv(std::ostream& out, const Vector& y) {
  for (Index i = 0; i < y.size(); ++i) out << (y(i) == 1.0 ? "1\n" : "0\n");
}

void write_curves_csv(const std::filesystem::path& path, const RawCurves& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'", 0, 0);
  write_curves_csv(out, curves);
}

void write_response_csv(const std::filesystem::path& path, const Vector& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'", 0, 0);
  write_response_csv(out, y);
}

}  // namespace rflogit
