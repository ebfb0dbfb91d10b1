#include "pmm/baselines.hpp"
#include "pmm/krylov.hpp"

#include <chrono>

namespace pmm::baselines {

FirstOrderResult asb_chol_solve(const problems::PortfolioInstance& inst, const AsbOptions& opts) {
  inst.validate();
  if (!(opts.lambda1 > 0 && opts.lambda2 > 0 && opts.lambda3 > 0))
    throw InvalidArgument("asb: all lambdas must be positive");
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  SpMat c = problems::portfolio_covariance(inst);
  SpMat abar = problems::portfolio_budget_matrix(inst);
  SpMat l = problems::portfolio_difference(inst);
  Vec bbar = problems::portfolio_budget_rhs(inst);
  const Index n = c.rows();
  SpMat eye(n, n);
  eye.setIdentity();
  SpMat h = c + opts.lambda1 * SpMat(abar.transpose() * abar) + opts.lambda2 * SpMat(l.transpose() * l) +
            opts.lambda3 * eye;
  krylov::SparseLdl chol;
  try {
    chol.factorize(h, krylov::SparseLdl::Mode::positive_definite);
  } catch (const NotPositiveDefinite& e) {
    throw InvalidArgument(std::string("asb: H is not positive definite for these lambdas: ") + e.what());
  }

  Vec w = problems::naive_portfolio(inst);
  Vec u = w, d = l * w;
  Vec b1 = Vec::Zero(abar.rows()), b2 = Vec::Zero(l.rows()), b3 = Vec::Zero(n);
  const double bnorm = std::max(bbar.norm(), 1e-300);

  auto objective = [&](const Vec& v) {
    return 0.5 * v.dot(c * v) + inst.tau1 * v.lpNorm<1>() + inst.tau2 * (l * v).lpNorm<1>();
  };

  FirstOrderResult res;
  res.report.solver = "asb-chol";
  for (Index k = 0; k < opts.stop.maxit; ++k) {
    Vec rhs = opts.lambda1 * (abar.transpose() * (bbar - b1)) + opts.lambda2 * (l.transpose() * (d - b2)) +
              opts.lambda3 * (u - b3);
    w = chol.solve(rhs);
    Vec lw = l * w;
    u = soft_threshold(w + b3, inst.tau1 / opts.lambda3);
    d = soft_threshold(lw + b2, inst.tau2 / opts.lambda2);
    Vec ra = abar * w - bbar;
    b1 += ra;
    b2 += lw - d;
    b3 += w - u;

    double feas = ra.norm() / bnorm;
    res.report.iterations = k + 1;
    res.report.primal_history.push_back(feas);
    res.report.objective_history.push_back(objective(w));
    res.report.primal_inf = feas;
    if (feas <= opts.stop.tol) {
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
  res.report.factorizations = chol.factorizations();
  res.report.time_seconds = elapsed();
  return res;
}

}  // namespace pmm::baselines
