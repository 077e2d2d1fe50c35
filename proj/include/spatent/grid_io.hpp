#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spatent/errors.hpp"
#include "spatent/grid.hpp"

namespace spatent {

/// Loaded grid plus the remapping applied to its codes:
/// code_map[dense_code] = original code from the file. Dense codes are
/// assigned by sorted order of the distinct input codes.
struct GridLoadResult {
  CategoricalGrid grid;
  std::vector<long long> code_map;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline long long parse_int(const Token& tok, std::size_t line_no) {
  long long value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw parse_error("expected an integer, got '" + std::string(tok.text) + "'",
                      line_no, tok.column);
  return value;
}

inline double parse_float(const Token& tok, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const std::string s(tok.text);
    const double value = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw parse_error("expected a number, got '" + std::string(tok.text) + "'",
                      line_no, tok.column);
  }
}

/// Remaps arbitrary integer codes to dense 0..I-1 (sorted order of the
/// distinct input codes) and reports the mapping.
inline std::pair<std::vector<int>, std::vector<long long>> densify(
    const std::vector<long long>& raw) {
  std::map<long long, int> remap;
  for (long long v : raw) remap.emplace(v, 0);
  std::vector<long long> code_map;
  code_map.reserve(remap.size());
  int next = 0;
  for (auto& [orig, dense] : remap) {
    dense = next++;
    code_map.push_back(orig);
  }
  std::vector<int> dense_values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    dense_values[i] = remap.find(raw[i])->second;
  return {std::move(dense_values), std::move(code_map)};
}

}  // namespace detail

/// Reads the ASCII grid format: five header lines (ncols, nrows, xllcorner,
/// yllcorner, cellsize) followed by nrows rows of integer codes, the first
/// body row being the TOP of the window. Codes are densified to 0..I-1.
inline GridLoadResult load_ascii_grid(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  const char* keys[5] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"};
  double header[5] = {0, 0, 0, 0, 0};
  for (int h = 0; h < 5; ++h) {
    if (!std::getline(in, line))
      throw parse_error(std::string("missing header line '") + keys[h] + "'",
                        line_no + 1, 1);
    ++line_no;
    const auto toks = detail::tokenize(line);
    if (toks.size() != 2 || detail::lower(toks[0].text) != keys[h])
      throw parse_error(std::string("expected header '") + keys[h] + " <value>'",
                        line_no, toks.empty() ? 1 : toks[0].column);
    header[h] = (h < 2) ? static_cast<double>(detail::parse_int(toks[1], line_no))
                        : detail::parse_float(toks[1], line_no);
  }
  const long long ncols_ll = static_cast<long long>(header[0]);
  const long long nrows_ll = static_cast<long long>(header[1]);
  if (ncols_ll <= 0 || nrows_ll <= 0)
    throw parse_error("ncols/nrows must be positive", 1, 1);
  const auto ncols = static_cast<std::size_t>(ncols_ll);
  const auto nrows = static_cast<std::size_t>(nrows_ll);
  const double cell_side = header[4];
  if (!(cell_side > 0.0))
    throw parse_error("cellsize must be positive", 5, 1);

  std::vector<long long> raw(nrows * ncols, 0);
  for (std::size_t r = 0; r < nrows; ++r) {
    if (!std::getline(in, line))
      throw parse_error("unexpected end of file: expected " +
                            std::to_string(nrows) + " data rows",
                        line_no + 1, 1);
    ++line_no;
    const auto toks = detail::tokenize(line);
    if (toks.size() != ncols)
      throw parse_error("row has " + std::to_string(toks.size()) +
                            " values, expected " + std::to_string(ncols),
                        line_no, 1);
    // file row r is the (nrows-1-r)th grid row: top of file = highest y
    const std::size_t grid_row = nrows - 1 - r;
    for (std::size_t c = 0; c < ncols; ++c)
      raw[grid_row * ncols + c] = detail::parse_int(toks[c], line_no);
  }
  // trailing content other than whitespace is a format error
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = detail::tokenize(line);
    if (!toks.empty())
      throw parse_error("unexpected data after the last declared row", line_no,
                        toks[0].column);
  }

  auto [dense, code_map] = detail::densify(raw);
  const int n_cat = static_cast<int>(code_map.size());
  return {CategoricalGrid(nrows, ncols, cell_side, {header[2], header[3]},
                          std::move(dense), n_cat),
          std::move(code_map)};
}

inline GridLoadResult load_ascii_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
  return load_ascii_grid(in);
}

/// Writes the ASCII grid format. Floats use max round-trip precision so that
/// save -> load reproduces dims, cell_side and values bit-exactly.
inline void save_ascii_grid(std::ostream& out, const CategoricalGrid& grid) {
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "ncols " << grid.cols() << "\n";
  out << "nrows " << grid.rows() << "\n";
  out << "xllcorner " << fmt(grid.origin().x) << "\n";
  out << "yllcorner " << fmt(grid.origin().y) << "\n";
  out << "cellsize " << fmt(grid.cell_side()) << "\n";
  for (std::size_t r = grid.rows(); r-- > 0;) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c) out << ' ';
      out << grid.at(r, c);
    }
    out << "\n";
  }
}

inline void save_ascii_grid_file(const std::filesystem::path& path,
                                 const CategoricalGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path.string());
  save_ascii_grid(out, grid);
}

/// Reads `row,col,code` triples (optional header line). Every cell of the
/// enclosing rectangle must appear exactly once; row 0 is the bottom row.
/// Geometry is not part of the format, so cell_side/origin are parameters.
inline GridLoadResult load_csv_grid(std::istream& in, double cell_side = 1.0,
                                    Coordinate origin = {}) {
  std::string line;
  std::size_t line_no = 0;
  struct Entry {
    std::size_t row, col;
    long long code;
  };
  std::vector<Entry> entries;
  std::size_t max_row = 0, max_col = 0;

  while (std::getline(in, line)) {
    ++line_no;
    // split on commas, keep column positions for error reporting
    std::vector<detail::Token> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = (comma == std::string::npos) ? line.size() : comma;
      std::size_t a = start, b = end;
      while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
      while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
      fields.push_back({std::string_view(line).substr(a, b - a), a + 1});
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() == 1 && fields[0].text.empty()) continue;  // blank line
    if (line_no == 1 && !fields.empty() &&
        detail::lower(fields[0].text) == "row")
      continue;  // header
    if (fields.size() != 3)
      throw parse_error("expected 'row,col,code'", line_no, 1);
    const long long r = detail::parse_int(fields[0], line_no);
    const long long c = detail::parse_int(fields[1], line_no);
    if (r < 0 || c < 0)
      throw parse_error("row/col must be non-negative", line_no,
                        fields[r < 0 ? 0 : 1].column);
    const long long code = detail::parse_int(fields[2], line_no);
    entries.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                       code});
    max_row = std::max(max_row, static_cast<std::size_t>(r));
    max_col = std::max(max_col, static_cast<std::size_t>(c));
  }
  if (entries.empty()) throw parse_error("no data rows", line_no + 1, 1);

  const std::size_t nrows = max_row + 1;
  const std::size_t ncols = max_col + 1;
  std::vector<long long> raw(nrows * ncols, 0);
  std::vector<char> seen(nrows * ncols, 0);
  for (const auto& e : entries) {
    const std::size_t idx = e.row * ncols + e.col;
    if (seen[idx])
      throw parse_error("duplicate cell (" + std::to_string(e.row) + "," +
                            std::to_string(e.col) + ")",
                        1, 1);
    seen[idx] = 1;
    raw[idx] = e.code;
  }
  if (entries.size() != nrows * ncols)
    throw parse_error("grid is not fully covered: got " +
                          std::to_string(entries.size()) + " cells, expected " +
                          std::to_string(nrows * ncols),
                      1, 1);

  auto [dense, code_map] = detail::densify(raw);
  const int n_cat = static_cast<int>(code_map.size());
  return {CategoricalGrid(nrows, ncols, cell_side, origin, std::move(dense),
                          n_cat),
          std::move(code_map)};
}

}  // namespace spatent
