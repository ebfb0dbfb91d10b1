#include "pmm/metrics.hpp"

#include <cmath>

namespace pmm::metrics {

Index active_positions(const Vec& w) {
  Index n = 0;
  for (Index i = 0; i < w.size(); ++i) n += w[i] > 0.0;
  return n;
}

Index transaction_count(const Vec& w, Index assets, double eps) {
  if (assets <= 0 || w.size() % assets != 0) throw InvalidArgument("transactions: length is not a multiple of assets");
  if (!(eps > 0)) throw InvalidArgument("transactions: eps must be positive");
  const Index periods = w.size() / assets;
  Index t = 0;
  for (Index j = 0; j + 1 < periods; ++j)
    for (Index i = 0; i < assets; ++i) t += std::abs(w[j * assets + i] - w[(j + 1) * assets + i]) >= eps;
  return t;
}

PortfolioRatios portfolio_ratios(const Vec& w_opt, const Vec& w_naive, const SpMat& c, Index assets, double eps) {
  if (w_opt.size() != w_naive.size() || c.rows() != w_opt.size() || c.cols() != w_opt.size())
    throw InvalidArgument("portfolio ratios: dimension mismatch");
  PortfolioRatios r;
  double risk_opt = w_opt.dot(c * w_opt);
  double risk_naive = w_naive.dot(c * w_naive);
  r.active_opt = active_positions(w_opt);
  r.active_naive = active_positions(w_naive);
  r.transactions_opt = transaction_count(w_opt, assets, eps);
  r.transactions_naive = transaction_count(w_naive, assets, eps);
  if (risk_opt == 0.0) throw UndefinedMetric("ratio: optimal portfolio has zero risk");
  if (r.active_opt == 0) throw UndefinedMetric("ratio_h: optimal portfolio has no active positions");
  if (r.transactions_opt == 0) throw UndefinedMetric("ratio_t: optimal portfolio has no transactions");
  r.ratio = risk_naive / risk_opt;
  r.ratio_h = double(r.active_naive) / double(r.active_opt);
  r.ratio_t = double(r.transactions_naive) / double(r.transactions_opt);
  return r;
}

}  // namespace pmm::metrics
