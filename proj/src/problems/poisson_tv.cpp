#include "pmm/problems.hpp"

#include <cmath>

namespace pmm::problems {

void PoissonTvInstance::validate() const {
  if (!blur) throw InvalidArgument("poisson tv: missing blur operator");
  if (g.size() != blur->cols() || a.size() != g.size())
    throw InvalidArgument("poisson tv: g, a and the blur grid differ in size");
  for (Index i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0)) throw InvalidArgument("poisson tv: observed counts must be non-negative");
    if (!(a[i] > 0)) throw InvalidArgument("poisson tv: background must be positive");
  }
  if (lambda < 0) throw InvalidArgument("poisson tv: negative TV weight");
}

double kl_divergence(const Vec& v, const Vec& g) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0)) throw DomainError("KL divergence: non-positive intensity at " + std::to_string(i));
    s += v[i] - g[i];
    if (g[i] > 0) s += g[i] * std::log(g[i] / v[i]);
  }
  return s;
}

KlObjective::KlObjective(std::shared_ptr<const linops::BccbOperator> blur, Vec g, Vec a, double lambda,
                         Index l)
    : blur_(std::move(blur)), g_(std::move(g)), a_(std::move(a)), lambda_(lambda), n_(g_.size()), l_(l) {
  blur_sq_ = blur_->squared_entries();
}

Vec KlObjective::intensity(const Vec& w) const {
  Vec v = blur_->apply(w) + a_;
  for (Index i = 0; i < v.size(); ++i)
    if (!(v[i] > 0)) throw DomainError("KL objective: non-positive intensity at " + std::to_string(i));
  return v;
}

double KlObjective::kl(const Vec& w) const { return kl_divergence(intensity(w), g_); }

Vec KlObjective::kl_gradient(const Vec& w) const {
  Vec v = intensity(w);
  return blur_->apply_transpose(Vec::Ones(n_) - g_.cwiseQuotient(v));
}

Vec KlObjective::kl_hessian_apply(const Vec& w, const Vec& p) const {
  Vec v = intensity(w);
  Vec u2 = g_.cwiseQuotient(v.cwiseProduct(v));
  return blur_->apply_transpose(u2.cwiseProduct(blur_->apply(p)));
}

double KlObjective::value(const Vec& x) const {
  return kl(x.head(n_)) + lambda_ * x.tail(2 * l_).sum();
}

Vec KlObjective::gradient(const Vec& x) const {
  Vec out(n_ + 2 * l_);
  out.head(n_) = kl_gradient(x.head(n_));
  out.tail(2 * l_).setConstant(lambda_);
  return out;
}

Vec KlObjective::hessian_apply(const Vec& x, const Vec& v) const {
  Vec out = Vec::Zero(n_ + 2 * l_);
  out.head(n_) = kl_hessian_apply(x.head(n_), v.head(n_));
  return out;
}

Vec KlObjective::hessian_diagonal(const Vec& x) const {
  Vec v = intensity(x.head(n_));
  Vec u2 = g_.cwiseQuotient(v.cwiseProduct(v));
  Vec out = Vec::Zero(n_ + 2 * l_);
  out.head(n_) = blur_sq_->apply_transpose(u2);
  return out;
}

Vec KlObjective::hessian_surrogate(const Vec& x) const {
  Vec v = intensity(x.head(n_));
  Vec out = Vec::Zero(n_ + 2 * l_);
  out.head(n_) = g_.cwiseQuotient(v.cwiseProduct(v));
  return out;
}

bool KlObjective::in_domain(const Vec& x) const {
  Vec v = blur_->apply(x.head(n_)) + a_;
  return (v.array() > 0).all();
}

ippmm::ConvexProgram build_poisson_tv(const PoissonTvInstance& inst) {
  inst.validate();
  const Index n = inst.pixels();
  double r = (inst.g - inst.a).sum();
  if (!(r > 0))
    throw DomainError("poisson tv: total intensity sum(g - a) must be positive, got " + std::to_string(r));
  SpMat lm = linops::make_tv_operator(inst.grid())->matrix();
  const Index l = lm.rows();

  std::vector<Triplet> at;
  at.reserve(std::size_t(n + lm.nonZeros() + 2 * l));
  for (Index j = 0; j < n; ++j) at.emplace_back(0, int(j), 1.0);
  for (Index k = 0; k < lm.outerSize(); ++k)
    for (SpMat::InnerIterator it(lm, k); it; ++it) at.emplace_back(int(1 + it.row()), int(it.col()), it.value());
  for (Index i = 0; i < l; ++i) {
    at.emplace_back(int(1 + i), int(n + i), -1.0);
    at.emplace_back(int(1 + i), int(n + l + i), 1.0);
  }
  ippmm::ConvexProgram p;
  p.A.resize(1 + l, n + 2 * l);
  p.A.setFromTriplets(at.begin(), at.end());
  p.b = Vec::Zero(1 + l);
  p.b[0] = r;
  p.nonneg.assign(std::size_t(n + 2 * l), 1);
  p.objective = std::make_shared<KlObjective>(inst.blur, inst.g, inst.a, inst.lambda, l);
  p.family = "restore";
  return p;
}

double poisson_tv_objective(const PoissonTvInstance& inst, const Vec& w) {
  SpMat lm = linops::make_tv_operator(inst.grid())->matrix();
  return kl_divergence(inst.blur->apply(w) + inst.a, inst.g) + inst.lambda * (lm * w).lpNorm<1>();
}

Vec poisson_tv_split_point(const PoissonTvInstance& inst, const Vec& w) {
  SpMat lm = linops::make_tv_operator(inst.grid())->matrix();
  Vec ds = split_signs(lm * w);
  Vec x(w.size() + ds.size());
  x << w, ds;
  return x;
}

}  // namespace pmm::problems
