#include "pmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmm::metrics {

Vec threshold_solution(const Vec& w, double fraction) {
  if (fraction < 0) throw InvalidArgument("threshold: negative fraction");
  const double budget = fraction * w.lpNorm<1>();
  std::vector<Index> order(static_cast<std::size_t>(w.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(w[a]) < std::abs(w[b]); });
  Vec out = w;
  double cum = 0.0;
  for (Index i : order) {
    cum += std::abs(w[i]);
    if (cum > budget) break;
    out[i] = 0.0;
  }
  return out;
}

namespace {

Index support_size(const Vec& w) {
  Index n = 0;
  for (Index i = 0; i < w.size(); ++i) n += w[i] != 0.0;
  return n;
}

}  // namespace

double density(const Vec& w) {
  if (w.size() == 0) throw InvalidArgument("density: empty vector");
  return double(support_size(w)) / double(w.size());
}

double accuracy(const Vec& predictions, const Vec& labels) {
  if (predictions.size() != labels.size() || labels.size() == 0)
    throw InvalidArgument("accuracy: prediction and label counts differ");
  Index hit = 0;
  for (Index i = 0; i < labels.size(); ++i) hit += predictions[i] == labels[i];
  return 100.0 * double(hit) / double(labels.size());
}

std::optional<double> corrected_overlap(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() == 0) throw InvalidArgument("overlap: vectors differ in length");
  const Index za = support_size(a), zb = support_size(b);
  if (std::max(za, zb) == 0) return std::nullopt;
  Index both = 0;
  for (Index i = 0; i < a.size(); ++i) both += a[i] != 0.0 && b[i] != 0.0;
  const double q = double(a.size());
  const double e = q * (double(za) / q) * (double(zb) / q);
  return (double(both) - e) / double(std::max(za, zb));
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd m;
  if (values.empty()) return m;
  const double n = double(values.size());
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / (n - 1.0));
  }
  return m;
}

ClassificationScores classification_scores(const std::vector<Vec>& weights, const std::vector<TestFold>& folds,
                                           Index q, double fraction) {
  if (weights.size() != folds.size()) throw InvalidArgument("classification scores: one test fold per weight vector");
  ClassificationScores out;
  std::vector<Vec> supports;
  for (std::size_t f = 0; f < weights.size(); ++f) {
    const Vec& w = weights[f];
    if (w.size() != q && w.size() != q + 1) throw InvalidArgument("classification scores: weight length must be q or q+1");
    if (folds[f].data.cols() != q) throw InvalidArgument("classification scores: test data must have q columns");
    Vec wt = threshold_solution(w, fraction);
    Vec t = folds[f].data * wt.head(q);
    if (w.size() == q + 1) t.array() += wt[q];
    Vec pred = t.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    out.acc.push_back(accuracy(pred, folds[f].labels));
    out.den.push_back(100.0 * density(wt.head(q)));
    supports.push_back(wt.head(q));
  }
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = i + 1; j < supports.size(); ++j) {
      auto o = corrected_overlap(supports[i], supports[j]);
      if (o)
        out.overlap.push_back(100.0 * *o);
      else
        ++out.skipped_pairs;
    }
  out.acc_summary = mean_std(out.acc);
  out.den_summary = mean_std(out.den);
  out.overlap_summary = mean_std(out.overlap);
  return out;
}

}  // namespace pmm::metrics
