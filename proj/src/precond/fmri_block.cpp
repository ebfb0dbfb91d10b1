#include "pmm/precond.hpp"

#include <chrono>

namespace pmm::precond {

FmriBlocks fmri_normal_blocks(const Vec& w_full, double delta, const Mat& d, const SpMat& l) {
  const Index s = d.rows(), q = d.cols(), nl = l.rows();
  if (l.cols() != q) throw InvalidArgument("fmri blocks: D and L column counts differ");
  if (w_full.size() != s + 2 * q + 2 * nl)
    throw InvalidArgument("fmri blocks: weight vector has wrong length");
  Vec wu = w_full.head(s);
  Vec wpm = w_full.segment(s, q) + w_full.segment(s + q, q);
  Vec wd = w_full.segment(s + 2 * q, nl) + w_full.segment(s + 2 * q + nl, nl);

  FmriBlocks b;
  Mat dw = d * wpm.asDiagonal();
  b.m1 = dw * d.transpose();
  b.m1.diagonal() += wu + Vec::Constant(s, delta);
  b.m2 = dw * l.transpose();
  SpMat lw = l * wpm.asDiagonal();
  b.m3 = lw * l.transpose();
  SpMat diag(nl, nl);
  diag.reserve(Eigen::VectorXi::Constant(nl, 1));
  for (Index i = 0; i < nl; ++i) diag.insert(i, i) = wd[i] + delta;
  b.m3 += diag;
  b.m3.makeCompressed();
  return b;
}

FmriBlockPreconditioner::FmriBlockPreconditioner(const Vec& w_full, double delta, const Mat& d,
                                                 const SpMat& l,
                                                 std::shared_ptr<krylov::SparseLdl> m3_factor)
    : s_(d.rows()), l_(l.rows()), m3_(std::move(m3_factor)) {
  auto t0 = std::chrono::steady_clock::now();
  FmriBlocks b = fmri_normal_blocks(w_full, delta, d, l);
  m1_.factorize(b.m1);
  if (!m3_) m3_ = std::make_shared<krylov::SparseLdl>();
  m3_->factorize(b.m3, krylov::SparseLdl::Mode::positive_definite);
  info_.factor_kinds = {"dense-cholesky", "sparse-ldl"};
  info_.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec FmriBlockPreconditioner::apply_inverse(const Vec& r) const {
  if (r.size() != s_ + l_) throw InvalidArgument("fmri preconditioner: size mismatch");
  Vec out(s_ + l_);
  out.head(s_) = m1_.solve(Vec(r.head(s_)));
  out.tail(l_) = m3_->solve(r.tail(l_));
  return out;
}

}  // namespace pmm::precond
