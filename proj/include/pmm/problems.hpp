#pragma once

#include "pmm/ippmm.hpp"
#include "pmm/linops.hpp"

#include <memory>
#include <vector>

namespace pmm::problems {

// Positive and negative parts, stacked: [max(v,0); max(-v,0)].
Vec split_signs(const Vec& v);

// ---------------------------------------------------------------- portfolio

struct PortfolioInstance {
  std::vector<Mat> covariances;  // C_1..C_m, each s x s SPD
  std::vector<Vec> returns;      // r_1..r_m
  double xi_init = 1.0;
  double xi_term = 1.0;
  double tau1 = 1e-2;
  double tau2 = 1e-2;

  Index assets() const { return covariances.empty() ? 0 : covariances.front().rows(); }
  Index periods() const { return Index(covariances.size()); }
  void validate() const;
};

SpMat portfolio_budget_matrix(const PortfolioInstance& inst);  // Ā, (m+1) x sm
Vec portfolio_budget_rhs(const PortfolioInstance& inst);       // b̄
SpMat portfolio_covariance(const PortfolioInstance& inst);     // blockdiag(C_j)
SpMat portfolio_difference(const PortfolioInstance& inst);     // L, s(m-1) x sm

// Equal split of the current wealth at every rebalancing date.
Vec naive_portfolio(const PortfolioInstance& inst);

ippmm::ConvexProgram build_portfolio_qp(const PortfolioInstance& inst);

double portfolio_objective(const PortfolioInstance& inst, const Vec& w);
Vec portfolio_weights(const PortfolioInstance& inst, const Vec& x);
Vec portfolio_split_point(const PortfolioInstance& inst, const Vec& w);

// ---------------------------------------------------------------- fused lasso LS

struct FusedLassoLsInstance {
  Mat d;                   // s x q, rows are samples
  Vec labels;              // ±1
  std::vector<Index> grid; // voxel grid, prod = q
  double tau1 = 1e-1;
  double tau2 = 1e-1;

  Index samples() const { return d.rows(); }
  Index features() const { return d.cols(); }
  void validate() const;
};

ippmm::ConvexProgram build_fused_lasso_ls(const FusedLassoLsInstance& inst);

double fused_lasso_objective(const FusedLassoLsInstance& inst, const Vec& w);
Vec fused_lasso_weights(const FusedLassoLsInstance& inst, const Vec& x);
Vec fused_lasso_split_point(const FusedLassoLsInstance& inst, const Vec& w);

// Block preconditioner for the normal equations of build_fused_lasso_ls; the
// M3 ordering is computed once and reused across iterations.
ippmm::NormalPreconditionerFactory fmri_preconditioner_factory(const FusedLassoLsInstance& inst);

// ---------------------------------------------------------------- Poisson TV

struct PoissonTvInstance {
  std::shared_ptr<const linops::BccbOperator> blur;
  Vec g;  // observed counts (rescaled), >= 0
  Vec a;  // background, > 0
  double lambda = 1e-2;

  Index pixels() const { return g.size(); }
  std::vector<Index> grid() const { return {blur->n1(), blur->n2()}; }
  void validate() const;
};

// D_KL(Dw + a, g) with the convention g ln(g / v) = 0 for g = 0.
double kl_divergence(const Vec& v, const Vec& g);

// f(x) = D_KL(w) + λ eᵀ(d⁺ + d⁻) for x = [w; d⁺; d⁻].
class KlObjective final : public ippmm::Objective {
 public:
  KlObjective(std::shared_ptr<const linops::BccbOperator> blur, Vec g, Vec a, double lambda, Index l);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hessian_apply(const Vec& x, const Vec& v) const override;
  Vec hessian_diagonal(const Vec& x) const override;
  Vec hessian_surrogate(const Vec& x) const override;
  bool in_domain(const Vec& x) const override;

  double kl(const Vec& w) const;
  Vec kl_gradient(const Vec& w) const;
  Vec kl_hessian_apply(const Vec& w, const Vec& v) const;

 private:
  Vec intensity(const Vec& w) const;  // Dw + a, throws DomainError if not positive

  std::shared_ptr<const linops::BccbOperator> blur_;
  std::shared_ptr<const linops::BccbOperator> blur_sq_;
  Vec g_, a_;
  double lambda_;
  Index n_, l_;
};

ippmm::ConvexProgram build_poisson_tv(const PoissonTvInstance& inst);

double poisson_tv_objective(const PoissonTvInstance& inst, const Vec& w);
Vec poisson_tv_split_point(const PoissonTvInstance& inst, const Vec& w);

// ---------------------------------------------------------------- logistic

struct LogisticInstance {
  SpMat d;     // n x s, rows are samples
  Vec labels;  // ±1
  double tau = 0.0;  // <= 0 means 1/n
  bool bias = true;  // append an all-ones column

  double effective_tau() const { return tau > 0 ? tau : 1.0 / double(d.rows()); }
  void validate() const;
};

// The data matrix actually used (with the bias column when enabled).
SpMat logistic_design(const LogisticInstance& inst);

// log(1 + e^{-t}) without overflow.
double log1p_exp_neg(double t);

// φ(w) + τ eᵀ(d⁺ + d⁻) for x = [w; d⁺; d⁻].
class LogisticObjective final : public ippmm::Objective {
 public:
  LogisticObjective(SpMat design, Vec labels, double tau);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hessian_apply(const Vec& x, const Vec& v) const override;
  Vec hessian_diagonal(const Vec& x) const override;
  Vec hessian_surrogate(const Vec& x) const override;
  std::optional<SpMat> hessian_matrix(const Vec& x) const override;

  double loss(const Vec& w) const;
  Vec loss_gradient(const Vec& w) const;
  Vec loss_hessian_apply(const Vec& w, const Vec& v) const;

 private:
  Vec probabilities(const Vec& w) const;  // p_i = 1 / (1 + exp(g_i wᵀd_i))

  SpMat d_;
  Vec g_;
  double tau_;
  Index s_;
};

ippmm::ConvexProgram build_logistic_l1(const LogisticInstance& inst);

double logistic_objective(const LogisticInstance& inst, const Vec& w);
Vec logistic_weights(const LogisticInstance& inst, const Vec& x);
Vec logistic_split_point(const LogisticInstance& inst, const Vec& w);
// sign(Dw) with ties to +1; `w` includes the bias entry when enabled.
Vec logistic_predict(const LogisticInstance& inst, const SpMat& data, const Vec& w);

}  // namespace pmm::problems
