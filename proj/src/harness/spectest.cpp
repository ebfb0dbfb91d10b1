#include "pmm/harness.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace pmm::harness {

namespace {

Vec random_xi(std::mt19937_64& rng, const std::vector<char>& nonneg) {
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  Vec xi = Vec::Zero(Index(nonneg.size()));
  for (std::size_t j = 0; j < nonneg.size(); ++j)
    if (nonneg[j]) xi[Index(j)] = std::pow(10.0, ud(rng));
  return xi;
}

Vec random_interior(std::mt19937_64& rng, const std::vector<char>& nonneg) {
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  std::normal_distribution<double> nd;
  Vec x(Index(nonneg.size()));
  for (std::size_t j = 0; j < nonneg.size(); ++j) x[Index(j)] = nonneg[j] ? pos(rng) : 0.3 * nd(rng);
  return x;
}

Mat dense_hessian(const ippmm::Objective& f, const Vec& x) {
  const Index n = x.size();
  Mat h(n, n);
  for (Index j = 0; j < n; ++j) h.col(j) = f.hessian_apply(x, Vec::Unit(n, j));
  return 0.5 * (h + h.transpose());
}

precond::SpectralReport fmri_spectrum(const SpectralTestOptions& o) {
  std::mt19937_64 rng(o.seed);
  auto inst = gen_fused_lasso(o.samples, o.grid, rng());
  auto prog = problems::build_fused_lasso_ls(inst);
  const Index s = inst.samples();
  Vec xi = random_xi(rng, prog.nonneg);
  Vec w(prog.n());
  for (Index j = 0; j < prog.n(); ++j) w[j] = j < s ? 1.0 / (1.0 / double(s) + o.rho) : 1.0 / (xi[j] + o.rho);
  Mat a = Mat(prog.A);
  Mat m = a * w.asDiagonal() * a.transpose();
  m.diagonal().array() += o.delta;
  SpMat l = linops::make_tv_operator(inst.grid)->matrix();
  precond::FmriBlockPreconditioner p(w, o.delta, inst.d, l);
  auto rep = precond::spectral_check(m, p, 1e-8);
  Eigen::JacobiSVD<Mat> svd(inst.d);
  const Vec& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv[i] > 1e-10 * sv[0];
  precond::check_normal_bounds(rep, precond::normal_bound_chi(a, o.rho, o.delta), l.rows() - rank, 1e-10);
  return rep;
}

precond::SpectralReport augmented_spectrum(const ippmm::ConvexProgram& prog, const SpectralTestOptions& o,
                                           std::mt19937_64& rng) {
  Vec x = random_interior(rng, prog.nonneg);
  Vec xi = random_xi(rng, prog.nonneg);
  Mat h = dense_hessian(*prog.objective, x);
  h.diagonal() += xi + Vec::Constant(x.size(), o.rho);
  Vec ht = o.htilde == ippmm::HTildeChoice::diag_h
               ? Vec(h.diagonal())
               : Vec(prog.objective->hessian_surrogate(x) + xi + Vec::Constant(x.size(), o.rho));
  const Index n = prog.n(), m = prog.m();
  Mat k(n + m, n + m);
  k << -h, Mat(prog.A).transpose(), Mat(prog.A), o.delta * Mat::Identity(m, m);
  precond::AugBlockDiagPreconditioner p(prog.A, ht, o.delta);
  auto rep = precond::spectral_check(k, p, 1e-8);
  auto [ah, bh] = precond::hhat_extremes(h, ht);
  precond::check_augmented_bounds(rep, ah, bh, 1e-8);
  return rep;
}

}  // namespace

precond::SpectralReport spectral_test(const SpectralTestOptions& o) {
  if (o.family == "fmri") return fmri_spectrum(o);
  std::mt19937_64 rng(o.seed);
  if (o.family == "restore") {
    std::vector<Index> grid = o.grid.size() == 2 ? o.grid : std::vector<Index>{6, 6};
    Image truth = builtin_image("disk", grid[0], grid[1]);
    BlurOptions bo;
    bo.peak = 50.0;
    auto bi = gen_blur_instance(truth, linops::BlurKernel::gaussian(grid[0], grid[1], 1.0), bo, rng());
    return augmented_spectrum(problems::build_poisson_tv(bi.instance), o, rng);
  }
  if (o.family == "classify") {
    auto data = gen_classification(o.samples, o.features, 2.0, 0.5, rng());
    return augmented_spectrum(problems::build_logistic_l1(data.train), o, rng);
  }
  throw InvalidArgument("spectral test: unknown family '" + o.family + "' (fmri, restore, classify)");
}

}  // namespace pmm::harness
