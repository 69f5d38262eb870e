#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace cliquemat {

/// Dense CSV of reals, one matrix row per line. Blank lines and lines
/// starting with '#' are skipped. Throws ParseError on a bad number or a
/// ragged row.
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv_file(const std::string& path);

/// Round-trip precision (17 significant digits).
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace cliquemat
