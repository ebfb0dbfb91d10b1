#include "pmm/krylov.hpp"

#include <cmath>

namespace pmm::krylov {

void DenseCholesky::factorize(const Mat& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("cholesky: matrix must be square");
  const Index n = m.rows();
  l_ = m.triangularView<Eigen::Lower>();
  for (Index k = 0; k < n; ++k) {
    double pivot = l_(k, k);
    if (k > 0) pivot -= l_.row(k).head(k).squaredNorm();
    if (!(pivot > 0.0)) throw NotPositiveDefinite(k, pivot);
    double lkk = std::sqrt(pivot);
    l_(k, k) = lkk;
    if (k + 1 < n) {
      if (k > 0)
        l_.col(k).tail(n - k - 1).noalias() -=
            l_.bottomLeftCorner(n - k - 1, k) * l_.row(k).head(k).transpose();
      l_.col(k).tail(n - k - 1) /= lkk;
    }
  }
  l_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Vec DenseCholesky::solve(const Vec& rhs) const {
  if (rhs.size() != l_.rows()) throw InvalidArgument("cholesky solve: size mismatch");
  Vec x = l_.triangularView<Eigen::Lower>().solve(rhs);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Mat DenseCholesky::solve(const Mat& rhs) const {
  if (rhs.rows() != l_.rows()) throw InvalidArgument("cholesky solve: size mismatch");
  Mat x = l_.triangularView<Eigen::Lower>().solve(rhs);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Vec cholesky_solve(const Mat& m, const Vec& rhs) { return DenseCholesky(m).solve(rhs); }

Vec cholesky_solve(const SpMat& m, const Vec& rhs) {
  SparseLdl f;
  f.factorize(m, SparseLdl::Mode::positive_definite);
  return f.solve(rhs);
}

std::string to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::identity: return "identity";
    case PreconditionerKind::jacobi: return "jacobi";
    case PreconditionerKind::cholesky: return "cholesky";
    case PreconditionerKind::fmri_block_normal: return "fmri-block-normal";
    case PreconditionerKind::aug_block_diagonal: return "aug-block-diagonal";
  }
  return "unknown";
}

JacobiPreconditioner::JacobiPreconditioner(Vec diagonal) {
  for (Index i = 0; i < diagonal.size(); ++i)
    if (!(diagonal[i] > 0)) throw NotPositiveDefinite(i, diagonal[i]);
  inv_ = diagonal.cwiseInverse();
  info_.factor_kinds = {"diagonal"};
}

Vec JacobiPreconditioner::apply_inverse(const Vec& r) const { return inv_.cwiseProduct(r); }

CholeskyPreconditioner::CholeskyPreconditioner(const Mat& m) : chol_(m) {
  info_.factor_kinds = {"dense-cholesky"};
}

}  // namespace pmm::krylov
