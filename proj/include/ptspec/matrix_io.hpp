#pragma once

#include <Eigen/Dense>
#include <string>

#include "ptspec/errors.hpp"

// Text matrix files: first line "rows cols", then one row per line of
// row-major "re im" pairs at 17 significant digits (bit round-trip).

namespace ptspec::io {

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix(const std::string& path);

}  // namespace ptspec::io
