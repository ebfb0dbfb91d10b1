#pragma once

#include "pmm/linops.hpp"
#include "pmm/problems.hpp"

#include <limits>
#include <string>
#include <vector>

namespace pmm::baselines {

// sign(v)·max(|v| - γ, 0), componentwise.
Vec soft_threshold(const Vec& v, double gamma);

struct FirstOrderReport {
  std::string solver;
  std::string status = "max-iterations";  // converged | max-iterations | time-limit
  Index iterations = 0;
  std::vector<double> primal_history;     // one entry per outer iteration
  std::vector<double> dual_history;       // ADMM only
  std::vector<double> objective_history;
  double primal_inf = 0.0;
  double objective = 0.0;
  double time_seconds = 0.0;
  long factorizations = 0;

  bool converged() const { return status == "converged"; }
  std::string to_json(int indent = 2) const;
};

struct FirstOrderResult {
  Vec w;
  Vec u;  // sparse split copy (ADMM / ASB), empty otherwise
  FirstOrderReport report;
};

struct StopRule {
  double tol = 1e-6;
  Index maxit = 100000;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------- ASB-Chol

struct AsbOptions {
  double lambda1 = 1.0, lambda2 = 1.0, lambda3 = 1.0;
  StopRule stop;
};

// Stops on the relative residual ‖Āw - b̄‖ / ‖b̄‖ of the budget rows.
FirstOrderResult asb_chol_solve(const problems::PortfolioInstance& inst, const AsbOptions& opts = {});

// ---------------------------------------------------------------- quadratic + fused ℓ¹

// min ½wᵀPw - qᵀw + c + τ₁‖w‖₁ + τ₂‖Lw‖₁ with P symmetric PSD. `l` may be 0 x n.
struct QuadraticL1Problem {
  std::shared_ptr<const linops::LinearOperator> p;
  Vec q;
  double constant = 0.0;
  SpMat l;
  double tau1 = 0.0, tau2 = 0.0;

  Index n() const { return q.size(); }
  double objective(const Vec& w) const;
};

QuadraticL1Problem fused_lasso_quadratic(const problems::FusedLassoLsInstance& inst);

// Largest eigenvalue of a symmetric PSD operator by power iteration.
double power_iteration(const linops::LinearOperator& op, Index iters = 100, unsigned seed = 1);

struct FistaOptions {
  Index inner_steps = 10;
  StopRule stop;
};

// FISTA with the prox of ‖L̂w‖₁, L̂ = [τ₁I; τ₂L], approximated by inner_steps
// of a dual projected FISTA.
FirstOrderResult fista_solve(const QuadraticL1Problem& prob, const FistaOptions& opts = {});
FirstOrderResult fista_solve(const problems::FusedLassoLsInstance& inst, const FistaOptions& opts = {});

struct AdmmOptions {
  double rho = 1.0;
  Index inner_cg_steps = 10;
  StopRule stop;
};

// Scaled-dual ADMM on w - u = 0, Lw - d = 0 with an inner CG w-update.
FirstOrderResult admm_solve(const QuadraticL1Problem& prob, const AdmmOptions& opts = {});
FirstOrderResult admm_solve(const problems::FusedLassoLsInstance& inst, const AdmmOptions& opts = {});
// Logistic loss: the w-update takes one Newton step on the augmented
// Lagrangian, solved by inner CG.
FirstOrderResult admm_solve(const problems::LogisticInstance& inst, const AdmmOptions& opts = {});

}  // namespace pmm::baselines
