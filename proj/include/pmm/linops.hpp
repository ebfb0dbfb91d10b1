#pragma once

#include "pmm/types.hpp"

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pmm::linops {

enum class OperatorKind { dense, sparse_triplet, bccb_convolution, stacked_difference, composite };

std::string to_string(OperatorKind kind);

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual OperatorKind kind() const = 0;

  // Size-checked; throws InvalidArgument on mismatch.
  Vec apply(const Vec& v) const;
  Vec apply_transpose(const Vec& u) const;

  // Explicit CSC copy. Operators without a cheap explicit form assemble it
  // column by column, so keep this to small sizes.
  virtual SpMat to_sparse() const;
  Mat to_dense() const;

 protected:
  virtual void apply_impl(const Vec& v, Vec& out) const = 0;
  virtual void apply_transpose_impl(const Vec& u, Vec& out) const = 0;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Mat m);
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  OperatorKind kind() const override { return OperatorKind::dense; }
  SpMat to_sparse() const override;
  const Mat& matrix() const { return m_; }

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  Mat m_;
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(SpMat m);
  SparseOperator(Index rows, Index cols, const std::vector<Triplet>& triplets);
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  OperatorKind kind() const override { return OperatorKind::sparse_triplet; }
  SpMat to_sparse() const override { return m_; }
  const SpMat& matrix() const { return m_; }

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  SpMat m_;
};

// Forward differences. Row order: direction-major, and within a direction
// the grid points in row-major order (last grid dimension fastest).
class DifferenceOperator final : public LinearOperator {
 public:
  DifferenceOperator(std::vector<Index> grid, std::string label, SpMat m);
  const std::string& label() const { return label_; }
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  OperatorKind kind() const override { return OperatorKind::stacked_difference; }
  SpMat to_sparse() const override { return m_; }
  const SpMat& matrix() const { return m_; }
  const std::vector<Index>& grid() const { return grid_; }

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  std::vector<Index> grid_;
  std::string label_;
  SpMat m_;
};

// Portfolio fused-lasso difference: w is period-major (w_1, ..., w_m each of
// length s) and row (j-1)*s + i is w_{j+1}^i - w_j^i.
std::shared_ptr<DifferenceOperator> make_difference_operator(Index num_periods, Index num_assets);

// Anisotropic TV forward differences on a 1D/2D/3D grid, boundary rows dropped.
std::shared_ptr<DifferenceOperator> make_tv_operator(const std::vector<Index>& grid);

// Operator defined by a pair of closures. Handy for Hessian actions and tests.
class FunctionOperator final : public LinearOperator {
 public:
  using Fn = std::function<Vec(const Vec&)>;
  FunctionOperator(Index rows, Index cols, Fn apply, Fn apply_transpose);
  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  OperatorKind kind() const override { return OperatorKind::composite; }

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  Index rows_, cols_;
  Fn f_, ft_;
};

// Block matrix of operators; null entries are zero blocks.
class BlockOperator final : public LinearOperator {
 public:
  BlockOperator(std::vector<Index> row_sizes, std::vector<Index> col_sizes,
                std::vector<std::vector<OperatorPtr>> blocks);
  Index rows() const override { return total_rows_; }
  Index cols() const override { return total_cols_; }
  OperatorKind kind() const override { return OperatorKind::composite; }

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  std::vector<Index> rs_, cs_, roff_, coff_;
  Index total_rows_ = 0, total_cols_ = 0;
  std::vector<std::vector<OperatorPtr>> blocks_;
};

enum class BlurFamily { gaussian, motion, out_of_focus, identity };

struct BlurKernel {
  BlurFamily family = BlurFamily::gaussian;
  double sigma = 2.0;    // gaussian, pixels
  double length = 9.0;   // motion, pixels
  double angle = 0.0;    // motion, degrees
  double radius = 4.0;   // out of focus, pixels
  Index n1 = 0, n2 = 0;  // image grid

  static BlurKernel gaussian(Index n1, Index n2, double sigma);
  static BlurKernel motion(Index n1, Index n2, double length, double angle_deg);
  static BlurKernel out_of_focus(Index n1, Index n2, double radius);
  static BlurKernel identity(Index n1, Index n2);

  // Point-spread function on the n1 x n2 grid with its center wrapped to
  // index (0, 0); row-major, non-negative, sums to one.
  Mat psf() const;
};

BlurFamily parse_blur_family(const std::string& name);
std::string to_string(BlurFamily family);

// Periodic 2D convolution. Images are row-major vectors, pixel (r, c) at r*n2 + c.
class BccbOperator final : public LinearOperator {
 public:
  explicit BccbOperator(const BlurKernel& kernel);
  // Convolution with an arbitrary wrapped psf (n1 x n2).
  BccbOperator(const Mat& wrapped_psf);

  Index rows() const override { return n1_ * n2_; }
  Index cols() const override { return n1_ * n2_; }
  OperatorKind kind() const override { return OperatorKind::bccb_convolution; }

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  const Mat& psf() const { return psf_; }
  const std::vector<std::complex<double>>& eigenvalues() const { return eig_; }

  // Operator with entrywise squared matrix entries (D∘D). Used for diag(DᵀUD).
  std::shared_ptr<BccbOperator> squared_entries() const;

 protected:
  void apply_impl(const Vec& v, Vec& out) const override;
  void apply_transpose_impl(const Vec& u, Vec& out) const override;

 private:
  struct FftPlans;
  void spectral_multiply(const Vec& v, Vec& out, bool conjugate) const;
  Index n1_, n2_;
  std::shared_ptr<FftPlans> plans_;
  Mat psf_;
  std::vector<std::complex<double>> eig_;  // n1 x (n2/2+1), r2c layout
};

}  // namespace pmm::linops
