#include "pmm/krylov.hpp"
#include "pmm/problems.hpp"

#include <cmath>

namespace pmm::problems {

Vec split_signs(const Vec& v) {
  Vec out(2 * v.size());
  out.head(v.size()) = v.cwiseMax(0.0);
  out.tail(v.size()) = (-v).cwiseMax(0.0);
  return out;
}

void PortfolioInstance::validate() const {
  const Index m = periods(), s = assets();
  if (m < 2) throw InvalidArgument("portfolio: at least two periods are required");
  if (Index(returns.size()) != m) throw InvalidArgument("portfolio: one return vector per period");
  for (Index j = 0; j < m; ++j) {
    if (covariances[j].rows() != s || covariances[j].cols() != s)
      throw InvalidArgument("portfolio: covariance block " + std::to_string(j) + " has wrong size");
    if (returns[j].size() != s)
      throw InvalidArgument("portfolio: return vector " + std::to_string(j) + " has wrong size");
    krylov::DenseCholesky chol(covariances[j]);
  }
  if (tau1 < 0 || tau2 < 0) throw InvalidArgument("portfolio: negative regularization weight");
}

SpMat portfolio_budget_matrix(const PortfolioInstance& inst) {
  const Index m = inst.periods(), s = inst.assets();
  std::vector<Triplet> t;
  for (Index i = 0; i < s; ++i) t.emplace_back(0, int(i), 1.0);
  for (Index j = 1; j < m; ++j)
    for (Index i = 0; i < s; ++i) {
      t.emplace_back(int(j), int(j * s + i), 1.0);
      t.emplace_back(int(j), int((j - 1) * s + i), -(1.0 + inst.returns[j - 1][i]));
    }
  for (Index i = 0; i < s; ++i) t.emplace_back(int(m), int((m - 1) * s + i), 1.0 + inst.returns[m - 1][i]);
  SpMat a(m + 1, m * s);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Vec portfolio_budget_rhs(const PortfolioInstance& inst) {
  Vec b = Vec::Zero(inst.periods() + 1);
  b[0] = inst.xi_init;
  b[inst.periods()] = inst.xi_term;
  return b;
}

SpMat portfolio_covariance(const PortfolioInstance& inst) {
  const Index m = inst.periods(), s = inst.assets();
  std::vector<Triplet> t;
  t.reserve(std::size_t(m * s * s));
  for (Index j = 0; j < m; ++j)
    for (Index c = 0; c < s; ++c)
      for (Index r = 0; r < s; ++r)
        if (inst.covariances[j](r, c) != 0.0)
          t.emplace_back(int(j * s + r), int(j * s + c), inst.covariances[j](r, c));
  SpMat cm(m * s, m * s);
  cm.setFromTriplets(t.begin(), t.end());
  return cm;
}

SpMat portfolio_difference(const PortfolioInstance& inst) {
  return linops::make_difference_operator(inst.periods(), inst.assets())->matrix();
}

Vec naive_portfolio(const PortfolioInstance& inst) {
  const Index m = inst.periods(), s = inst.assets();
  Vec w(m * s);
  double wealth = inst.xi_init;
  for (Index j = 0; j < m; ++j) {
    w.segment(j * s, s).setConstant(wealth / double(s));
    wealth = (Vec::Ones(s) + inst.returns[j]).dot(w.segment(j * s, s));
  }
  return w;
}

ippmm::ConvexProgram build_portfolio_qp(const PortfolioInstance& inst) {
  inst.validate();
  const Index m = inst.periods(), s = inst.assets();
  const Index n = m * s, l = n - s;
  const Index nbar = 2 * (n + l), mbar = (m + 1) + l;
  SpMat c = portfolio_covariance(inst);
  SpMat abar = portfolio_budget_matrix(inst);
  SpMat lm = portfolio_difference(inst);

  std::vector<Triplet> qt;
  qt.reserve(std::size_t(4 * c.nonZeros()));
  for (Index k = 0; k < c.outerSize(); ++k)
    for (SpMat::InnerIterator it(c, k); it; ++it) {
      int r = int(it.row()), col = int(it.col());
      qt.emplace_back(r, col, it.value());
      qt.emplace_back(r + int(n), col + int(n), it.value());
      qt.emplace_back(r, col + int(n), -it.value());
      qt.emplace_back(r + int(n), col, -it.value());
    }
  SpMat q(nbar, nbar);
  q.setFromTriplets(qt.begin(), qt.end());

  Vec cvec(nbar);
  cvec.head(2 * n).setConstant(inst.tau1);
  cvec.tail(2 * l).setConstant(inst.tau2);

  std::vector<Triplet> at;
  for (Index k = 0; k < abar.outerSize(); ++k)
    for (SpMat::InnerIterator it(abar, k); it; ++it) {
      at.emplace_back(int(it.row()), int(it.col()), it.value());
      at.emplace_back(int(it.row()), int(it.col() + n), -it.value());
    }
  for (Index k = 0; k < lm.outerSize(); ++k)
    for (SpMat::InnerIterator it(lm, k); it; ++it) {
      at.emplace_back(int(m + 1 + it.row()), int(it.col()), it.value());
      at.emplace_back(int(m + 1 + it.row()), int(it.col() + n), -it.value());
    }
  for (Index i = 0; i < l; ++i) {
    at.emplace_back(int(m + 1 + i), int(2 * n + i), -1.0);
    at.emplace_back(int(m + 1 + i), int(2 * n + l + i), 1.0);
  }
  ippmm::ConvexProgram p;
  p.A.resize(mbar, nbar);
  p.A.setFromTriplets(at.begin(), at.end());
  p.b = Vec::Zero(mbar);
  p.b.head(m + 1) = portfolio_budget_rhs(inst);
  p.nonneg.assign(std::size_t(nbar), 1);
  p.objective = std::make_shared<ippmm::QuadraticObjective>(q, cvec);
  p.family = "portfolio";
  return p;
}

double portfolio_objective(const PortfolioInstance& inst, const Vec& w) {
  SpMat c = portfolio_covariance(inst);
  SpMat l = portfolio_difference(inst);
  return 0.5 * w.dot(c * w) + inst.tau1 * w.lpNorm<1>() + inst.tau2 * (l * w).lpNorm<1>();
}

Vec portfolio_weights(const PortfolioInstance& inst, const Vec& x) {
  const Index n = inst.periods() * inst.assets();
  return x.head(n) - x.segment(n, n);
}

Vec portfolio_split_point(const PortfolioInstance& inst, const Vec& w) {
  SpMat l = portfolio_difference(inst);
  Vec ws = split_signs(w), ds = split_signs(l * w);
  Vec x(ws.size() + ds.size());
  x << ws, ds;
  return x;
}

}  // namespace pmm::problems
