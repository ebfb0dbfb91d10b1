#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmm {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by Cholesky-type factorizations. index() is the row/column of the
// original (unpermuted) matrix at which the bad pivot appeared.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(Index index, double pivot)
      : std::runtime_error("matrix is not positive definite: pivot " +
                           std::to_string(pivot) + " at index " +
                           std::to_string(index)),
        index_(index),
        pivot_(pivot) {}
  Index index() const { return index_; }
  double pivot() const { return pivot_; }

 private:
  Index index_;
  double pivot_;
};

class UnsupportedStructure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace pmm
