#ifndef AFFINEST_CSV_HPP
#define AFFINEST_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "affinest/linalg.hpp"

namespace affinest {

struct CsvTable {
  std::vector<std::string> header;  // empty if the file had none
  Matrix values;
};

/// Read a comma-separated numeric table.  A first row with any non-numeric
/// cell is taken as a header; later non-numeric cells raise ParseError with
/// the 1-based row and column.  Cells are trimmed of surrounding whitespace.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Write a matrix as CSV at full double precision (round-trips exactly).
void write_csv(const Matrix& m, std::ostream& out);

}  // namespace affinest

#endif  // AFFINEST_CSV_HPP
