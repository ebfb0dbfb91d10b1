#include "pmm/precond.hpp"

#include <chrono>

namespace pmm::precond {

SpMat weighted_gram(const SpMat& a, const Vec& h_inv, double delta) {
  if (h_inv.size() != a.cols()) throw InvalidArgument("weighted gram: weight length mismatch");
  SpMat s = a * h_inv.asDiagonal() * a.transpose();
  SpMat d(a.rows(), a.rows());
  d.reserve(Eigen::VectorXi::Constant(a.rows(), 1));
  for (Index i = 0; i < a.rows(); ++i) d.insert(i, i) = delta;
  s += d;
  s.makeCompressed();
  return s;
}

AugBlockDiagPreconditioner::AugBlockDiagPreconditioner(
    const SpMat& a, const Vec& htilde, double delta,
    std::shared_ptr<krylov::SparseLdl> schur_factor)
    : htilde_(htilde), m_(a.rows()), schur_(std::move(schur_factor)) {
  auto t0 = std::chrono::steady_clock::now();
  if (htilde.size() != a.cols()) throw InvalidArgument("aug preconditioner: H̃ length mismatch");
  for (Index i = 0; i < htilde.size(); ++i)
    if (!(htilde[i] > 0)) throw InvalidArgument("aug preconditioner: H̃ must be positive");
  if (!schur_) schur_ = std::make_shared<krylov::SparseLdl>();
  schur_->factorize(weighted_gram(a, htilde.cwiseInverse(), delta),
                    krylov::SparseLdl::Mode::positive_definite);
  info_.factor_kinds = {"diagonal", "sparse-ldl"};
  info_.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec AugBlockDiagPreconditioner::apply_inverse(const Vec& r) const {
  const Index n = htilde_.size();
  if (r.size() != n + m_) throw InvalidArgument("aug preconditioner: size mismatch");
  Vec out(n + m_);
  out.head(n) = r.head(n).cwiseQuotient(htilde_);
  out.tail(m_) = schur_->solve(r.tail(m_));
  return out;
}

}  // namespace pmm::precond
