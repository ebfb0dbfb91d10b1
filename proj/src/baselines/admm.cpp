#include "pmm/baselines.hpp"
#include "pmm/krylov.hpp"

#include <chrono>
#include <cmath>

namespace pmm::baselines {

namespace {

void check_options(const AdmmOptions& opts) {
  if (!(opts.rho > 0)) throw InvalidArgument("admm: rho must be positive");
  if (opts.inner_cg_steps < 1) throw InvalidArgument("admm: inner_cg_steps must be at least 1");
}

// A few CG steps on M·δ = r starting from δ = 0.
Vec inner_cg(const linops::LinearOperator& m, const Vec& r, Index steps) {
  krylov::IdentityPreconditioner ident(r.size());
  krylov::KrylovOptions ko;
  ko.tol = 1e-12;
  ko.maxit = steps;
  return krylov::pcg(m, r, ident, ko).solution;
}

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double operator()() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

FirstOrderResult admm_solve(const QuadraticL1Problem& prob, const AdmmOptions& opts) {
  check_options(opts);
  if (!prob.p || prob.p->rows() != prob.n() || prob.p->cols() != prob.n())
    throw InvalidArgument("admm: P must be n x n");
  const Index n = prob.n();
  const SpMat& l = prob.l.rows() > 0 ? prob.l : SpMat(0, n);
  if (l.cols() != n) throw InvalidArgument("admm: L has the wrong width");
  Clock elapsed;
  const double rho = opts.rho;

  auto apply_m = [&](const Vec& v) -> Vec {
    Vec out = prob.p->apply(v) + rho * v;
    if (l.rows() > 0) out += rho * (l.transpose() * (l * v));
    return out;
  };
  linops::FunctionOperator m(n, n, apply_m, apply_m);

  Vec w = Vec::Zero(n), u = Vec::Zero(n), d = Vec::Zero(l.rows());
  Vec a = Vec::Zero(n), b = Vec::Zero(l.rows());

  FirstOrderResult res;
  res.report.solver = "admm";
  for (Index k = 0; k < opts.stop.maxit; ++k) {
    Vec rhs = prob.q + rho * (u - a);
    if (l.rows() > 0) rhs += rho * (l.transpose() * (d - b));
    w += inner_cg(m, rhs - m.apply(w), opts.inner_cg_steps);

    Vec u_old = u, d_old = d;
    Vec lw = l * w;
    u = soft_threshold(w + a, prob.tau1 / rho);
    d = soft_threshold(lw + b, prob.tau2 / rho);
    a += w - u;
    b += lw - d;

    double r = std::sqrt((w - u).squaredNorm() + (lw - d).squaredNorm());
    Vec sd = u - u_old;
    if (l.rows() > 0) sd += l.transpose() * (d - d_old);
    double s = rho * sd.norm();
    double pscale = std::max({1.0, std::sqrt(w.squaredNorm() + lw.squaredNorm()),
                              std::sqrt(u.squaredNorm() + d.squaredNorm())});
    Vec ya = a;
    if (l.rows() > 0) ya += l.transpose() * b;
    double dscale = std::max(1.0, rho * ya.norm());

    res.report.iterations = k + 1;
    res.report.primal_history.push_back(r / pscale);
    res.report.dual_history.push_back(s / dscale);
    res.report.objective_history.push_back(prob.objective(w));
    res.report.primal_inf = r / pscale;
    if (r / pscale <= opts.stop.tol && s / dscale <= opts.stop.tol) {
      res.report.status = "converged";
      break;
    }
    if (elapsed() > opts.stop.time_limit_seconds) {
      res.report.status = "time-limit";
      break;
    }
  }
  res.w = w;
  res.u = u;
  res.report.objective = prob.objective(w);
  res.report.time_seconds = elapsed();
  return res;
}

FirstOrderResult admm_solve(const problems::FusedLassoLsInstance& inst, const AdmmOptions& opts) {
  return admm_solve(fused_lasso_quadratic(inst), opts);
}

FirstOrderResult admm_solve(const problems::LogisticInstance& inst, const AdmmOptions& opts) {
  check_options(opts);
  inst.validate();
  Clock elapsed;
  const double rho = opts.rho;
  const double tau = inst.effective_tau();
  SpMat design = problems::logistic_design(inst);
  problems::LogisticObjective f(design, inst.labels, tau);
  const Index n = design.cols();
  auto objective = [&](const Vec& v) { return f.loss(v) + tau * v.lpNorm<1>(); };

  Vec w = Vec::Zero(n), u = Vec::Zero(n), a = Vec::Zero(n);
  FirstOrderResult res;
  res.report.solver = "admm";
  for (Index k = 0; k < opts.stop.maxit; ++k) {
    Vec grad = f.loss_gradient(w) + rho * (w - u + a);
    auto apply_h = [&](const Vec& v) -> Vec { return f.loss_hessian_apply(w, v) + rho * v; };
    linops::FunctionOperator h(n, n, apply_h, apply_h);
    w += inner_cg(h, -grad, opts.inner_cg_steps);

    Vec u_old = u;
    u = soft_threshold(w + a, tau / rho);
    a += w - u;

    double r = (w - u).norm();
    double s = rho * (u - u_old).norm();
    double pscale = std::max({1.0, w.norm(), u.norm()});
    double dscale = std::max(1.0, rho * a.norm());

    res.report.iterations = k + 1;
    res.report.primal_history.push_back(r / pscale);
    res.report.dual_history.push_back(s / dscale);
    res.report.objective_history.push_back(objective(w));
    res.report.primal_inf = r / pscale;
    if (r / pscale <= opts.stop.tol && s / dscale <= opts.stop.tol) {
      res.report.status = "converged";
      break;
    }
    if (elapsed() > opts.stop.time_limit_seconds) {
      res.report.status = "time-limit";
      break;
    }
  }
  res.w = w;
  res.u = u;
  res.report.objective = objective(w);
  res.report.time_seconds = elapsed();
  return res;
}

}  // namespace pmm::baselines
