#include "pmm/krylov.hpp"

#include <cmath>

namespace pmm::krylov {

KrylovOutcome pcg(const linops::LinearOperator& m, const Vec& rhs, const Preconditioner& p,
                  const KrylovOptions& opts) {
  const Index n = rhs.size();
  if (m.rows() != n || m.cols() != n || p.size() != n)
    throw InvalidArgument("pcg: operator, preconditioner and rhs sizes differ");

  KrylovOutcome out;
  out.solution = Vec::Zero(n);
  Vec zb = p.apply_inverse(rhs);
  double bnorm2 = rhs.dot(zb);
  if (bnorm2 < 0) {
    out.breakdown_reason = "preconditioner not positive definite";
    return out;
  }
  if (bnorm2 == 0.0) {
    out.converged = true;
    return out;
  }
  const double bnorm = std::sqrt(bnorm2);

  Vec& x = out.solution;
  Vec r = rhs;
  Vec z = zb;
  Vec d = z;
  double rz = bnorm2;
  double rel = 1.0;

  for (Index k = 0; k < opts.maxit; ++k) {
    Vec q = m.apply(d);
    double dq = d.dot(q);
    if (!(dq > 0.0)) {
      out.breakdown_reason = "indefinite operator (pᵀMp <= 0)";
      break;
    }
    double alpha = rz / dq;
    x += alpha * d;
    r -= alpha * q;
    z = p.apply_inverse(r);
    double rz_new = r.dot(z);
    ++out.iterations;
    if (opts.record_iterates) out.iterates.push_back(x);
    if (rz_new < 0) {
      out.breakdown_reason = "preconditioner not positive definite";
      break;
    }
    rel = std::sqrt(rz_new) / bnorm;
    out.residual_history.push_back(rel);
    if (rel <= opts.tol) {
      // replace the recursive residual by the true one before accepting
      r = rhs - m.apply(x);
      z = p.apply_inverse(r);
      rz_new = r.dot(z);
      rel = std::sqrt(std::max(rz_new, 0.0)) / bnorm;
      if (rel <= opts.tol) {
        out.converged = true;
        break;
      }
      d = z;
      rz = rz_new;
      continue;
    }
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }

  Vec rt = rhs - m.apply(x);
  out.final_relative_residual = std::sqrt(std::max(rt.dot(p.apply_inverse(rt)), 0.0)) / bnorm;
  out.converged = out.converged && out.final_relative_residual <= opts.tol;
  return out;
}

}  // namespace pmm::krylov
