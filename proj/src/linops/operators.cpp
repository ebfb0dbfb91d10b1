#include "pmm/linops.hpp"

#include <utility>

namespace pmm::linops {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::dense: return "dense";
    case OperatorKind::sparse_triplet: return "sparse-triplet";
    case OperatorKind::bccb_convolution: return "bccb-convolution";
    case OperatorKind::stacked_difference: return "stacked-difference";
    case OperatorKind::composite: return "composite";
  }
  return "unknown";
}

Vec LinearOperator::apply(const Vec& v) const {
  if (v.size() != cols())
    throw InvalidArgument("apply: expected vector of length " + std::to_string(cols()) +
                          ", got " + std::to_string(v.size()));
  Vec out(rows());
  apply_impl(v, out);
  return out;
}

Vec LinearOperator::apply_transpose(const Vec& u) const {
  if (u.size() != rows())
    throw InvalidArgument("apply_transpose: expected vector of length " +
                          std::to_string(rows()) + ", got " + std::to_string(u.size()));
  Vec out(cols());
  apply_transpose_impl(u, out);
  return out;
}

SpMat LinearOperator::to_sparse() const {
  std::vector<Triplet> trips;
  Vec e = Vec::Zero(cols());
  Vec col(rows());
  for (Index j = 0; j < cols(); ++j) {
    e[j] = 1.0;
    apply_impl(e, col);
    e[j] = 0.0;
    for (Index i = 0; i < rows(); ++i)
      if (col[i] != 0.0) trips.emplace_back(int(i), int(j), col[i]);
  }
  SpMat m(rows(), cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Mat LinearOperator::to_dense() const { return Mat(to_sparse()); }

DenseOperator::DenseOperator(Mat m) : m_(std::move(m)) {}

SpMat DenseOperator::to_sparse() const { return m_.sparseView(0.0, 0.0); }

void DenseOperator::apply_impl(const Vec& v, Vec& out) const { out.noalias() = m_ * v; }

void DenseOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  out.noalias() = m_.transpose() * u;
}

SparseOperator::SparseOperator(SpMat m) : m_(std::move(m)) { m_.makeCompressed(); }

SparseOperator::SparseOperator(Index rows, Index cols, const std::vector<Triplet>& triplets)
    : m_(rows, cols) {
  m_.setFromTriplets(triplets.begin(), triplets.end());
  m_.makeCompressed();
}

void SparseOperator::apply_impl(const Vec& v, Vec& out) const { out.noalias() = m_ * v; }

void SparseOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  out.noalias() = m_.transpose() * u;
}

FunctionOperator::FunctionOperator(Index rows, Index cols, Fn apply, Fn apply_transpose)
    : rows_(rows), cols_(cols), f_(std::move(apply)), ft_(std::move(apply_transpose)) {}

void FunctionOperator::apply_impl(const Vec& v, Vec& out) const { out = f_(v); }

void FunctionOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  if (!ft_) throw UnsupportedStructure("function operator has no transpose");
  out = ft_(u);
}

BlockOperator::BlockOperator(std::vector<Index> row_sizes, std::vector<Index> col_sizes,
                             std::vector<std::vector<OperatorPtr>> blocks)
    : rs_(std::move(row_sizes)), cs_(std::move(col_sizes)), blocks_(std::move(blocks)) {
  if (blocks_.size() != rs_.size()) throw InvalidArgument("block operator: row block count");
  for (Index r : rs_) {
    roff_.push_back(total_rows_);
    total_rows_ += r;
  }
  for (Index c : cs_) {
    coff_.push_back(total_cols_);
    total_cols_ += c;
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].size() != cs_.size()) throw InvalidArgument("block operator: column block count");
    for (std::size_t j = 0; j < cs_.size(); ++j) {
      const auto& b = blocks_[i][j];
      if (b && (b->rows() != rs_[i] || b->cols() != cs_[j]))
        throw InvalidArgument("block operator: block (" + std::to_string(i) + "," +
                              std::to_string(j) + ") has wrong shape");
    }
  }
}

void BlockOperator::apply_impl(const Vec& v, Vec& out) const {
  out.setZero();
  for (std::size_t i = 0; i < rs_.size(); ++i)
    for (std::size_t j = 0; j < cs_.size(); ++j)
      if (blocks_[i][j])
        out.segment(roff_[i], rs_[i]) += blocks_[i][j]->apply(v.segment(coff_[j], cs_[j]));
}

void BlockOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  out.setZero();
  for (std::size_t i = 0; i < rs_.size(); ++i)
    for (std::size_t j = 0; j < cs_.size(); ++j)
      if (blocks_[i][j])
        out.segment(coff_[j], cs_[j]) +=
            blocks_[i][j]->apply_transpose(u.segment(roff_[i], rs_[i]));
}

}  // namespace pmm::linops
