#include "pmm/precond.hpp"
#include "pmm/problems.hpp"

#include <iostream>
#include <numeric>

namespace pmm::problems {

void FusedLassoLsInstance::validate() const {
  Index prod = std::accumulate(grid.begin(), grid.end(), Index(1), std::multiplies<Index>());
  if (grid.empty() || prod != d.cols())
    throw InvalidArgument("fused lasso: grid size does not match the number of features");
  if (labels.size() != d.rows()) throw InvalidArgument("fused lasso: one label per sample");
  for (Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 1.0 && labels[i] != -1.0) throw InvalidArgument("fused lasso: labels must be +-1");
  if (tau1 < 0 || tau2 < 0) throw InvalidArgument("fused lasso: negative regularization weight");
}

ippmm::ConvexProgram build_fused_lasso_ls(const FusedLassoLsInstance& inst) {
  inst.validate();
  if (inst.samples() > inst.features())
    std::cerr << "warning: fused lasso with more samples than features (" << inst.samples() << " > "
              << inst.features() << ")\n";
  const Index s = inst.samples(), q = inst.features();
  SpMat lm = linops::make_tv_operator(inst.grid)->matrix();
  const Index l = lm.rows();
  const Index n = s + 2 * q + 2 * l, m = s + l;

  std::vector<Triplet> at;
  at.reserve(std::size_t(s + 2 * s * q + 2 * lm.nonZeros() + 2 * l));
  for (Index i = 0; i < s; ++i) at.emplace_back(int(i), int(i), -1.0);
  for (Index c = 0; c < q; ++c)
    for (Index r = 0; r < s; ++r) {
      double v = inst.d(r, c);
      if (v == 0.0) continue;
      at.emplace_back(int(r), int(s + c), v);
      at.emplace_back(int(r), int(s + q + c), -v);
    }
  for (Index k = 0; k < lm.outerSize(); ++k)
    for (SpMat::InnerIterator it(lm, k); it; ++it) {
      at.emplace_back(int(s + it.row()), int(s + it.col()), it.value());
      at.emplace_back(int(s + it.row()), int(s + q + it.col()), -it.value());
    }
  for (Index i = 0; i < l; ++i) {
    at.emplace_back(int(s + i), int(s + 2 * q + i), -1.0);
    at.emplace_back(int(s + i), int(s + 2 * q + l + i), 1.0);
  }

  SpMat qm(n, n);
  qm.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < s; ++i) qm.insert(i, i) = 1.0 / double(s);
  qm.makeCompressed();
  Vec c(n);
  c.head(s) = -inst.labels / double(s);
  c.segment(s, 2 * q).setConstant(inst.tau1);
  c.tail(2 * l).setConstant(inst.tau2);

  ippmm::ConvexProgram p;
  p.A.resize(m, n);
  p.A.setFromTriplets(at.begin(), at.end());
  p.b = Vec::Zero(m);
  p.nonneg.assign(std::size_t(n), 1);
  for (Index i = 0; i < s; ++i) p.nonneg[std::size_t(i)] = 0;
  p.objective = std::make_shared<ippmm::QuadraticObjective>(qm, c);
  p.objective_offset = inst.labels.squaredNorm() / (2.0 * double(s));
  p.family = "fmri";
  return p;
}

double fused_lasso_objective(const FusedLassoLsInstance& inst, const Vec& w) {
  SpMat lm = linops::make_tv_operator(inst.grid)->matrix();
  return (inst.d * w - inst.labels).squaredNorm() / (2.0 * double(inst.samples())) +
         inst.tau1 * w.lpNorm<1>() + inst.tau2 * (lm * w).lpNorm<1>();
}

Vec fused_lasso_weights(const FusedLassoLsInstance& inst, const Vec& x) {
  const Index s = inst.samples(), q = inst.features();
  return x.segment(s, q) - x.segment(s + q, q);
}

Vec fused_lasso_split_point(const FusedLassoLsInstance& inst, const Vec& w) {
  SpMat lm = linops::make_tv_operator(inst.grid)->matrix();
  Vec u = inst.d * w;
  Vec ws = split_signs(w), ds = split_signs(lm * w);
  Vec x(u.size() + ws.size() + ds.size());
  x << u, ws, ds;
  return x;
}

ippmm::NormalPreconditionerFactory fmri_preconditioner_factory(const FusedLassoLsInstance& inst) {
  auto d = std::make_shared<const Mat>(inst.d);
  auto l = std::make_shared<const SpMat>(linops::make_tv_operator(inst.grid)->matrix());
  auto cache = std::make_shared<krylov::SparseLdl>();
  if (inst.samples() > l->rows())
    std::cerr << "warning: block preconditioner assumes fewer samples than TV rows\n";
  return [d, l, cache](const ippmm::NormalSystemView& view) -> std::unique_ptr<krylov::Preconditioner> {
    Vec w = Vec::Zero(view.n_full);
    for (std::size_t k = 0; k < view.kept.size(); ++k) w[view.kept[k]] = view.g_inv[Index(k)];
    return std::make_unique<precond::FmriBlockPreconditioner>(w, view.delta, *d, *l, cache);
  };
}

}  // namespace pmm::problems
