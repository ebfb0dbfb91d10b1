#pragma once

#include "pmm/types.hpp"

#include <iosfwd>
#include <string>

namespace pmm::linops {

// Matrix Market reader: coordinate (real/integer/pattern; general/symmetric/
// skew-symmetric) and array (real/integer; general/symmetric). Parse failures
// throw ParseError with 1-based line/column.
SpMat read_matrix_market(std::istream& in, const std::string& source = "<stream>");
SpMat read_matrix_market_file(const std::string& path);
Mat read_matrix_market_dense_file(const std::string& path);

// Writes coordinate real general with 17 significant digits.
void write_matrix_market(std::ostream& out, const SpMat& m);
void write_matrix_market_file(const std::string& path, const SpMat& m);

}  // namespace pmm::linops
