#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "acms/coefficient.hpp"
#include "acms/geometry.hpp"
#include "acms/types.hpp"

namespace acms {

/// Decimal with 12 significant digits; the only number format in CSV output.
std::string format_number(double value);
double parse_double(std::string_view text, std::string_view context);
int parse_int(std::string_view text, std::string_view context);

/// Comma-separated table with a header row. Cells are stored preformatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& add(double value);
  CsvTable& add(int value);
  CsvTable& add(std::string value);
  /// Blank cell, e.g. an undefined rate.
  CsvTable& blank();

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os, bool with_header = true) const;
  std::string str() const;

  /// Write to a sibling temporary file and rename it into place.
  void write_atomic(const std::filesystem::path& path) const;
  /// Append rows to an existing table with the same header, or create it.
  void append_to(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Plain-text node and element listing for debugging.
void write_mesh(std::ostream& os, const TwoLevelMesh& mesh);
/// One line per fine element: id, A_xx, A_xy, A_yy, rho.
void write_field_csv(std::ostream& os, const CoefficientField& field);
/// Coordinate format, one `row col value` triple per line.
void write_coordinate(std::ostream& os, const SparseMatrix& matrix);
void write_coordinate(std::ostream& os, const Matrix& matrix);
/// Fine-node table: node, x, y, then one column per function.
void write_fine_functions_csv(std::ostream& os, const TwoLevelMesh& mesh,
                              const std::vector<FineFunction>& functions);

}  // namespace acms
