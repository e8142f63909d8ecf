#include "acms/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acms/errors.hpp"

namespace acms {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double parse_double(std::string_view text, std::string_view context) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidParameter(std::string(context) + ": cannot parse number '" + s + "'");
  }
  return v;
}

int parse_int(std::string_view text, std::string_view context) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidParameter(std::string(context) + ": cannot parse integer '" +
                           std::string(text) + "'");
  }
  return v;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(header_.size());
  return *this;
}

CsvTable& CsvTable::add(double value) { return add(format_number(value)); }
CsvTable& CsvTable::add(int value) { return add(std::to_string(value)); }

CsvTable& CsvTable::add(std::string value) {
  if (rows_.empty()) row();
  if (value.find(',') != std::string::npos) value = '"' + value + '"';
  rows_.back().push_back(std::move(value));
  return *this;
}

CsvTable& CsvTable::blank() { return add(std::string()); }

void CsvTable::write(std::ostream& os, bool with_header) const {
  const auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  if (with_header) line(header_);
  for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void CsvTable::write_atomic(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write(out);
  }
  std::filesystem::rename(tmp, path);
}

void CsvTable::append_to(const std::filesystem::path& path) const {
  if (!std::filesystem::exists(path)) {
    write_atomic(path);
    return;
  }
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  std::ostringstream expected;
  CsvTable(header_).write(expected);
  if (first + '\n' != expected.str()) {
    throw std::runtime_error("CSV header mismatch in " + path.string());
  }
  std::ostringstream existing;
  existing << first << '\n' << in.rdbuf();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << existing.str();
    write(out, false);
  }
  std::filesystem::rename(tmp, path);
}

void write_mesh(std::ostream& os, const TwoLevelMesh& mesh) {
  os << "# coarse vertices " << mesh.coarse.num_vertices() << '\n';
  for (int v = 0; v < mesh.coarse.num_vertices(); ++v) {
    os << v << ' ' << format_number(mesh.coarse.vertices[v].x) << ' '
       << format_number(mesh.coarse.vertices[v].y) << '\n';
  }
  os << "# coarse triangles " << mesh.coarse.num_triangles() << '\n';
  for (int t = 0; t < mesh.coarse.num_triangles(); ++t) {
    const auto& tri = mesh.coarse.triangles[t];
    os << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  os << "# fine vertices " << mesh.num_fine_nodes() << '\n';
  for (int v = 0; v < mesh.num_fine_nodes(); ++v) {
    os << v << ' ' << format_number(mesh.fine_vertices[v].x) << ' '
       << format_number(mesh.fine_vertices[v].y) << '\n';
  }
  os << "# fine triangles " << mesh.fine_triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.fine_triangles.size(); ++t) {
    const auto& tri = mesh.fine_triangles[t];
    os << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
}

void write_field_csv(std::ostream& os, const CoefficientField& field) {
  CsvTable table({"element", "a_xx", "a_xy", "a_yy", "rho"});
  for (std::size_t t = 0; t < field.tensor.size(); ++t) {
    table.row()
        .add(static_cast<int>(t))
        .add(field.tensor[t].xx)
        .add(field.tensor[t].xy)
        .add(field.tensor[t].yy)
        .add(field.rho[t]);
  }
  table.write(os);
}

void write_coordinate(std::ostream& os, const SparseMatrix& matrix) {
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << format_number(it.value()) << '\n';
    }
  }
}

void write_coordinate(std::ostream& os, const Matrix& matrix) {
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      os << i << ' ' << j << ' ' << format_number(matrix(i, j)) << '\n';
    }
  }
}

void write_fine_functions_csv(std::ostream& os, const TwoLevelMesh& mesh,
                              const std::vector<FineFunction>& functions) {
  std::vector<std::string> header{"node", "x", "y"};
  for (std::size_t i = 0; i < functions.size(); ++i) header.push_back("f" + std::to_string(i));
  CsvTable table(std::move(header));
  for (int v = 0; v < mesh.num_fine_nodes(); ++v) {
    table.row().add(v).add(mesh.fine_vertices[v].x).add(mesh.fine_vertices[v].y);
    for (const auto& f : functions) table.add(f.values[v]);
  }
  table.write(os);
}

}  // namespace acms
