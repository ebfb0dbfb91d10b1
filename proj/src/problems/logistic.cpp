#include "pmm/problems.hpp"

#include <cmath>

namespace pmm::problems {

void LogisticInstance::validate() const {
  if (labels.size() != d.rows()) throw InvalidArgument("logistic: one label per sample");
  if (d.rows() == 0) throw InvalidArgument("logistic: empty data set");
  for (Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 1.0 && labels[i] != -1.0) throw InvalidArgument("logistic: labels must be +-1");
}

SpMat logistic_design(const LogisticInstance& inst) {
  if (!inst.bias) return inst.d;
  const Index n = inst.d.rows(), s = inst.d.cols();
  SpMat out(n, s + 1);
  std::vector<Triplet> t;
  t.reserve(std::size_t(inst.d.nonZeros() + n));
  for (Index k = 0; k < inst.d.outerSize(); ++k)
    for (SpMat::InnerIterator it(inst.d, k); it; ++it) t.emplace_back(int(it.row()), int(it.col()), it.value());
  for (Index i = 0; i < n; ++i) t.emplace_back(int(i), int(s), 1.0);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double log1p_exp_neg(double t) { return std::max(-t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

LogisticObjective::LogisticObjective(SpMat design, Vec labels, double tau)
    : d_(std::move(design)), g_(std::move(labels)), tau_(tau), s_(d_.cols()) {}

Vec LogisticObjective::probabilities(const Vec& w) const {
  Vec t = g_.cwiseProduct(d_ * w);
  Vec p(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    if (t[i] >= 0) {
      double e = std::exp(-t[i]);
      p[i] = e / (1.0 + e);
    } else {
      p[i] = 1.0 / (1.0 + std::exp(t[i]));
    }
  }
  return p;
}

double LogisticObjective::loss(const Vec& w) const {
  Vec t = g_.cwiseProduct(d_ * w);
  double s = 0.0;
  for (Index i = 0; i < t.size(); ++i) s += log1p_exp_neg(t[i]);
  return s / double(t.size());
}

Vec LogisticObjective::loss_gradient(const Vec& w) const {
  Vec p = probabilities(w);
  return -(d_.transpose() * g_.cwiseProduct(p)) / double(g_.size());
}

Vec LogisticObjective::loss_hessian_apply(const Vec& w, const Vec& v) const {
  Vec p = probabilities(w);
  Vec sdiag = p.cwiseProduct(Vec::Ones(p.size()) - p);
  return d_.transpose() * sdiag.cwiseProduct(d_ * v) / double(g_.size());
}

double LogisticObjective::value(const Vec& x) const { return loss(x.head(s_)) + tau_ * x.tail(2 * s_).sum(); }

Vec LogisticObjective::gradient(const Vec& x) const {
  Vec out(3 * s_);
  out.head(s_) = loss_gradient(x.head(s_));
  out.tail(2 * s_).setConstant(tau_);
  return out;
}

Vec LogisticObjective::hessian_apply(const Vec& x, const Vec& v) const {
  Vec p = probabilities(x.head(s_));
  Vec sdiag = p.cwiseProduct(Vec::Ones(p.size()) - p);
  Vec out = Vec::Zero(3 * s_);
  out.head(s_) = d_.transpose() * sdiag.cwiseProduct(d_ * v.head(s_)) / double(g_.size());
  return out;
}

Vec LogisticObjective::hessian_diagonal(const Vec& x) const {
  Vec p = probabilities(x.head(s_));
  Vec sdiag = p.cwiseProduct(Vec::Ones(p.size()) - p);
  Vec out = Vec::Zero(3 * s_);
  out.head(s_) = d_.cwiseAbs2().transpose() * sdiag / double(g_.size());
  return out;
}

Vec LogisticObjective::hessian_surrogate(const Vec& x) const {
  Vec diag = hessian_diagonal(x);
  Vec out = Vec::Zero(3 * s_);
  out.head(s_).setConstant(diag.head(s_).mean());
  return out;
}

std::optional<SpMat> LogisticObjective::hessian_matrix(const Vec& x) const {
  Vec p = probabilities(x.head(s_));
  Vec sdiag = p.cwiseProduct(Vec::Ones(p.size()) - p) / double(g_.size());
  SpMat h = SpMat(d_.transpose() * sdiag.asDiagonal() * d_);
  std::vector<Triplet> t;
  t.reserve(std::size_t(h.nonZeros()));
  for (Index k = 0; k < h.outerSize(); ++k)
    for (SpMat::InnerIterator it(h, k); it; ++it) t.emplace_back(int(it.row()), int(it.col()), it.value());
  SpMat out(3 * s_, 3 * s_);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

ippmm::ConvexProgram build_logistic_l1(const LogisticInstance& inst) {
  inst.validate();
  SpMat design = logistic_design(inst);
  const Index s = design.cols();
  std::vector<Triplet> at;
  at.reserve(std::size_t(3 * s));
  for (Index i = 0; i < s; ++i) {
    at.emplace_back(int(i), int(i), 1.0);
    at.emplace_back(int(i), int(s + i), -1.0);
    at.emplace_back(int(i), int(2 * s + i), 1.0);
  }
  ippmm::ConvexProgram p;
  p.A.resize(s, 3 * s);
  p.A.setFromTriplets(at.begin(), at.end());
  p.b = Vec::Zero(s);
  p.nonneg.assign(std::size_t(3 * s), 1);
  for (Index i = 0; i < s; ++i) p.nonneg[std::size_t(i)] = 0;
  p.objective = std::make_shared<LogisticObjective>(design, inst.labels, inst.effective_tau());
  p.family = "classify";
  return p;
}

double logistic_objective(const LogisticInstance& inst, const Vec& w) {
  LogisticObjective f(logistic_design(inst), inst.labels, inst.effective_tau());
  return f.loss(w) + inst.effective_tau() * w.lpNorm<1>();
}

Vec logistic_weights(const LogisticInstance& inst, const Vec& x) {
  const Index s = inst.d.cols() + (inst.bias ? 1 : 0);
  return x.head(s);
}

Vec logistic_split_point(const LogisticInstance&, const Vec& w) {
  Vec ds = split_signs(w);
  Vec x(w.size() + ds.size());
  x << w, ds;
  return x;
}

Vec logistic_predict(const LogisticInstance& inst, const SpMat& data, const Vec& w) {
  Vec t;
  if (inst.bias) {
    const Index s = data.cols();
    if (w.size() != s + 1) throw InvalidArgument("logistic predict: weight length mismatch");
    t = data * w.head(s) + Vec::Constant(data.rows(), w[s]);
  } else {
    if (w.size() != data.cols()) throw InvalidArgument("logistic predict: weight length mismatch");
    t = data * w;
  }
  Vec out(t.size());
  for (Index i = 0; i < t.size(); ++i) out[i] = t[i] >= 0 ? 1.0 : -1.0;
  return out;
}

}  // namespace pmm::problems
