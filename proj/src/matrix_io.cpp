#include "ptspec/matrix_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ptspec::io {

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path);
  if (!out) throw FormatError(0, "cannot open '" + path + "' for writing");
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", m(i, j).real(), m(i, j).imag());
      out << buf << (j + 1 < m.cols() ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw FormatError(0, "write to '" + path + "' failed");
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(0, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(1, "missing header");
  std::istringstream header(line);
  long long rows = -1, cols = -1;
  if (!(header >> rows >> cols) || rows < 0 || cols < 0 || rows > 100000 || cols > 100000)
    throw FormatError(1, "malformed header '" + line + "'");
  std::string trailing;
  if (header >> trailing) throw FormatError(1, "trailing tokens in header");

  Eigen::MatrixXcd m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw FormatError(static_cast<int>(i + 2), "unexpected end of file");
    std::istringstream row(line);
    for (long long j = 0; j < cols; ++j) {
      double re, im;
      if (!(row >> re >> im))
        throw FormatError(static_cast<int>(i + 2),
                          "expected " + std::to_string(2 * cols) + " numbers");
      m(i, j) = {re, im};
    }
    if (row >> trailing)
      throw FormatError(static_cast<int>(i + 2), "trailing tokens in row");
  }
  return m;
}

}  // namespace ptspec::io
