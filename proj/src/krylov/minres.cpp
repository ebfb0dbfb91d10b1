#include "pmm/krylov.hpp"

#include <cmath>
#include <limits>

namespace pmm::krylov {

// Preconditioned MINRES after Paige and Saunders (1975).
KrylovOutcome minres(const linops::LinearOperator& m, const Vec& rhs, const Preconditioner& p,
                     const KrylovOptions& opts) {
  const Index n = rhs.size();
  if (m.rows() != n || m.cols() != n || p.size() != n)
    throw InvalidArgument("minres: operator, preconditioner and rhs sizes differ");

  KrylovOutcome out;
  out.solution = Vec::Zero(n);
  Vec& x = out.solution;

  Vec r1 = rhs;
  Vec y = p.apply_inverse(r1);
  double beta1 = r1.dot(y);
  if (beta1 < 0) {
    out.breakdown_reason = "preconditioner not positive definite";
    return out;
  }
  if (beta1 == 0.0) {
    out.converged = true;
    return out;
  }
  beta1 = std::sqrt(beta1);

  const double eps = std::numeric_limits<double>::epsilon();
  double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1;
  double cs = -1, sn = 0;
  Vec w = Vec::Zero(n), w1(n), w2 = Vec::Zero(n), r2 = r1, v(n);

  for (Index itn = 1; itn <= opts.maxit; ++itn) {
    v = y / beta;
    y = m.apply(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = p.apply_inverse(r2);
    oldb = beta;
    double bb = r2.dot(y);
    if (bb < 0) {
      out.breakdown_reason = "preconditioner not positive definite";
      break;
    }
    beta = std::sqrt(bb);
    double oldeps = epsln;
    double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    ++out.iterations;
    if (opts.record_iterates) out.iterates.push_back(x);

    double rel = phibar / beta1;
    out.residual_history.push_back(rel);
    if (rel <= opts.tol) {
      Vec rt = rhs - m.apply(x);
      double tr = std::sqrt(std::max(rt.dot(p.apply_inverse(rt)), 0.0)) / beta1;
      if (tr <= opts.tol) {
        out.converged = true;
        break;
      }
    }
    if (beta == 0.0) break;  // invariant subspace found
  }

  Vec rt = rhs - m.apply(x);
  out.final_relative_residual = std::sqrt(std::max(rt.dot(p.apply_inverse(rt)), 0.0)) / beta1;
  out.converged = out.final_relative_residual <= opts.tol;
  return out;
}

}  // namespace pmm::krylov
