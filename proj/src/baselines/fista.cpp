#include "pmm/baselines.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace pmm::baselines {

double QuadraticL1Problem::objective(const Vec& w) const {
  double v = 0.5 * w.dot(p->apply(w)) - q.dot(w) + constant + tau1 * w.lpNorm<1>();
  if (l.rows() > 0) v += tau2 * (l * w).lpNorm<1>();
  return v;
}

QuadraticL1Problem fused_lasso_quadratic(const problems::FusedLassoLsInstance& inst) {
  inst.validate();
  auto d = std::make_shared<const Mat>(inst.d);
  const double s = double(inst.samples());
  const Index q = inst.features();
  auto gram = [d, s](const Vec& v) -> Vec { return d->transpose() * (*d * v) / s; };

  QuadraticL1Problem prob;
  prob.p = std::make_shared<linops::FunctionOperator>(q, q, gram, gram);
  prob.q = inst.d.transpose() * inst.labels / s;
  prob.constant = inst.labels.squaredNorm() / (2.0 * s);
  prob.l = linops::make_tv_operator(inst.grid)->matrix();
  prob.tau1 = inst.tau1;
  prob.tau2 = inst.tau2;
  return prob;
}

double power_iteration(const linops::LinearOperator& op, Index iters, unsigned seed) {
  if (op.rows() != op.cols()) throw InvalidArgument("power iteration: operator must be square");
  const Index n = op.rows();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  v.normalize();
  double lambda = 0.0;
  for (Index k = 0; k < iters; ++k) {
    Vec av = op.apply(v);
    lambda = v.dot(av);
    double nrm = av.norm();
    if (nrm == 0.0) return 0.0;
    v = av / nrm;
  }
  return std::max(lambda, v.dot(op.apply(v)));
}

namespace {

// prox of t·‖L̂w‖₁ at v by projected FISTA on the box-constrained dual
// min_{|z|≤1} ½‖v - t L̂ᵀz‖². z is kept between calls as a warm start.
class FusedProx {
 public:
  FusedProx(const QuadraticL1Problem& prob, Index steps) : prob_(prob), steps_(steps) {
    const Index n = prob.n();
    z1_ = Vec::Zero(n);
    z2_ = Vec::Zero(prob.l.rows());
    double lnorm2 = 0.0;
    if (prob.l.rows() > 0) {
      const SpMat& l = prob.l;
      auto ltl = [&l](const Vec& v) -> Vec { return l.transpose() * (l * v); };
      linops::FunctionOperator op(n, n, ltl, ltl);
      lnorm2 = power_iteration(op, 200, 7) * 1.01;
    }
    lhat2_ = prob.tau1 * prob.tau1 + prob.tau2 * prob.tau2 * lnorm2;
  }

  Vec operator()(const Vec& v, double t) {
    if (prob_.tau2 == 0.0 || prob_.l.rows() == 0) return soft_threshold(v, t * prob_.tau1);
    auto primal = [&](const Vec& z1, const Vec& z2) -> Vec {
      return v - t * (prob_.tau1 * z1 + prob_.tau2 * (prob_.l.transpose() * z2));
    };
    const double step = 1.0 / (t * t * lhat2_);
    Vec y1 = z1_, y2 = z2_;
    double theta = 1.0;
    for (Index k = 0; k < steps_; ++k) {
      Vec w = primal(y1, y2);
      // gradient of the dual is -t·L̂w
      Vec n1 = (y1 + step * t * prob_.tau1 * w).cwiseMax(-1.0).cwiseMin(1.0);
      Vec n2 = (y2 + step * t * prob_.tau2 * (prob_.l * w)).cwiseMax(-1.0).cwiseMin(1.0);
      double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      double beta = (theta - 1.0) / theta_next;
      y1 = n1 + beta * (n1 - z1_);
      y2 = n2 + beta * (n2 - z2_);
      z1_ = std::move(n1);
      z2_ = std::move(n2);
      theta = theta_next;
    }
    return primal(z1_, z2_);
  }

 private:
  const QuadraticL1Problem& prob_;
  Index steps_;
  Vec z1_, z2_;
  double lhat2_ = 0.0;
};

}  // namespace

FirstOrderResult fista_solve(const QuadraticL1Problem& prob, const FistaOptions& opts) {
  if (opts.inner_steps < 1) throw InvalidArgument("fista: inner_steps must be at least 1");
  if (!prob.p || prob.p->rows() != prob.n() || prob.p->cols() != prob.n())
    throw InvalidArgument("fista: P must be n x n");
  if (prob.l.rows() > 0 && prob.l.cols() != prob.n()) throw InvalidArgument("fista: L has the wrong width");
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  const Index n = prob.n();
  double lip = power_iteration(*prob.p, 200, 3) * 1.01;
  if (!(lip > 0.0)) lip = 1.0;
  const double t = 1.0 / lip;
  FusedProx prox(prob, opts.inner_steps);

  FirstOrderResult res;
  res.report.solver = "fista";
  Vec w = Vec::Zero(n), y = w;
  double theta = 1.0;
  for (Index k = 0; k < opts.stop.maxit; ++k) {
    Vec grad = prob.p->apply(y) - prob.q;
    Vec next = prox(y - t * grad, t);
    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = next + ((theta - 1.0) / theta_next) * (next - w);
    double change = (next - w).norm() / std::max(1.0, next.norm());
    w = std::move(next);
    theta = theta_next;

    res.report.iterations = k + 1;
    res.report.primal_history.push_back(change);
    res.report.objective_history.push_back(prob.objective(w));
    res.report.primal_inf = change;
    if (change <= opts.stop.tol) {
      res.report.status = "converged";
      break;
    }
    if (elapsed() > opts.stop.time_limit_seconds) {
      res.report.status = "time-limit";
      break;
    }
  }
  res.w = w;
  res.report.objective = prob.objective(w);
  res.report.time_seconds = elapsed();
  return res;
}

FirstOrderResult fista_solve(const problems::FusedLassoLsInstance& inst, const FistaOptions& opts) {
  return fista_solve(fused_lasso_quadratic(inst), opts);
}

}  // namespace pmm::baselines
