#include "affinest/csv.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace affinest {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + cell.size();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t lineno = 0;
  std::size_t cols = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);

    std::vector<double> values(cells.size());
    std::size_t bad_col = 0;
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        numeric = false;
        bad_col = c + 1;
        break;
      }
    }

    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = cells;  // first row with a non-numeric cell is the header
        cols = cells.size();
        continue;
      }
      throw ParseError("csv: non-numeric cell at row " + std::to_string(lineno) +
                           ", column " + std::to_string(bad_col),
                       lineno, bad_col);
    }
    if (cols == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      throw ParseError("csv: row " + std::to_string(lineno) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(cols),
                       lineno, cells.size());
    }
    rows.push_back(std::move(values));
  }

  if (rows.empty()) throw EmptyInput("csv: no data rows");

  CsvTable table;
  table.header = std::move(header);
  table.values = Matrix(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) table.values(r, c) = rows[r][c];
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv: cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(const Matrix& m, std::ostream& out) {
  char buf[40];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      if (c > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace affinest
