// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "pmm/baselines.hpp"
#include "pmm/dropping.hpp"
#include "pmm/harness.hpp"
#include "pmm/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace pmm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }
double rel(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

Vec randn(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

Vec randu(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = ud(rng);
  return v;
}

Index rand_int(std::mt19937_64& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

// ---------------------------------------------------------------- 1 and 7

struct PortfolioCase {
  problems::PortfolioInstance inst;
  std::uint64_t seed;
};

std::vector<PortfolioCase> portfolio_suite() {
  std::mt19937_64 rng(2024);
  std::vector<PortfolioCase> out;
  for (int t = 0; t < 20; ++t) {
    Index s = rand_int(rng, 5, 20), m = rand_int(rng, 3, 6);
    std::uint64_t seed = rng();
    out.push_back({harness::gen_portfolio(s, m, seed), seed});
  }
  return out;
}

ippmm::SolverOptions portfolio_options(bool drop, double tol = 1e-6, int max_iter = 40) {
  ippmm::SolverOptions so;
  so.linear_solver = ippmm::LinearSolverKind::direct_augmented;
  so.tol = tol;
  so.max_iter = max_iter;
  so.dropping.enabled = drop;
  so.dropping.eps_drop = 1e-4;
  so.dropping.xi = 1e2;
  return so;
}

Outcome criterion1(const std::vector<PortfolioCase>& suite) {
  Outcome o;
  int worst_iter = 0;
  double worst_gap = 0.0;
  for (const auto& c : suite) {
    auto r = ippmm::solve(problems::build_portfolio_qp(c.inst), portfolio_options(true));
    o.require(r.report.status == ippmm::Status::optimal, "status " + ippmm::to_string(r.report.status));
    o.require(r.report.iterations <= 40, "iterations " + std::to_string(r.report.iterations));
    worst_iter = std::max(worst_iter, r.report.iterations);
    double f_ipm = problems::portfolio_objective(c.inst, problems::portfolio_weights(c.inst, r.x));
    baselines::AsbOptions ao;
    ao.stop.tol = 1e-10;
    ao.stop.maxit = 1000000;
    auto asb = baselines::asb_chol_solve(c.inst, ao);
    o.require(asb.report.status == "converged", "ASB-Chol status " + asb.report.status);
    double f_asb = problems::portfolio_objective(c.inst, asb.w);
    worst_gap = std::max(worst_gap, rel(f_ipm, f_asb));
    o.require(rel(f_ipm, f_asb) <= 1e-4, "objective gap vs ASB-Chol");
  }
  o.detail << "20 instances, max iterations " << worst_iter << ", max relative gap to ASB-Chol " << worst_gap;
  return o;
}

Outcome criterion7(const std::vector<PortfolioCase>& suite) {
  Outcome o;
  int sparse = 0, reduced = 0;
  Index dropped = 0;
  double worst = 0.0;
  for (const auto& c : suite) {
    auto prog = problems::build_portfolio_qp(c.inst);
    auto r1 = ippmm::solve(prog, portfolio_options(true, 1e-11, 100));
    auto r0 = ippmm::solve(prog, portfolio_options(false, 1e-11, 100));
    o.require(r1.report.status == ippmm::Status::optimal && r0.report.status == ippmm::Status::optimal,
              "solve not optimal");
    const auto& audit = r1.report.drop_audit;
    o.require(audit.violated.empty(), std::to_string(audit.violated.size()) + " audit violations");
    // independent audit: recompute z on the dropped set from the final point
    Vec zfull = prog.objective->gradient(r1.x) - Mat(prog.A).transpose() * r1.y;
    for (const auto& d : audit.dropped) {
      o.require(r1.x[d.index] == 0.0, "dropped variable not zero");
      o.require(zfull[d.index] > 0.0, "dropped variable with non-positive multiplier");
    }
    dropped += Index(audit.dropped.size());
    double f1 = prog.objective_value(r1.x), f0 = prog.objective_value(r0.x);
    worst = std::max(worst, rel(f1, f0));
    o.require(rel(f1, f0) <= 1e-6, "objective differs from the dropping-disabled solve");
    // sparse optimum: some non-negative variable of the plain solve sits below eps_drop
    bool has_sparse = false;
    for (Index j = 0; j < prog.n(); ++j) has_sparse = has_sparse || (prog.nonneg[j] && r0.x[j] <= 1e-4);
    if (has_sparse) {
      ++sparse;
      bool smaller = r1.report.final_dimension < r1.report.initial_dimension;
      reduced += smaller;
      o.require(smaller, "final system not smaller on a sparse optimum");
    }
  }
  o.detail << dropped << " variables dropped in total, " << reduced << "/" << sparse
           << " sparse optima reduced, max relative objective difference " << worst;
  return o;
}

// ---------------------------------------------------------------- 2 and 3

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(41);
  Index total_units = 0, total_expected = 0;
  for (int t = 0; t < 10; ++t) {
    harness::SpectralTestOptions so;
    so.family = "fmri";
    so.samples = rand_int(rng, 3, 10);
    so.grid = {rand_int(rng, 2, 4), rand_int(rng, 2, 4), rand_int(rng, 2, 4)};
    if (t == 0) so.grid = {4, 4, 4};
    so.rho = so.delta = 1e-4;
    so.seed = rng();
    auto rep = harness::spectral_test(so);
    // recheck from the raw eigenvalues
    Index units = 0;
    for (double l : rep.eigenvalues) {
      o.require(l > rep.chi - 1e-10 && l < 2.0 + 1e-10, "eigenvalue outside (chi, 2)");
      units += std::abs(l - 1.0) <= 1e-8;
    }
    o.require(units >= rep.expected_unit_count, "too few unit eigenvalues");
    o.require(rep.intervals_hold, "bound check flag");
    total_units += units;
    total_expected += rep.expected_unit_count;
  }
  o.detail << "10 states, unit eigenvalues " << total_units << " (at least " << total_expected << " required)";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(43);
  int states = 0;
  double min_alpha = 1e300, max_beta = 0.0;
  for (const char* fam : {"restore", "classify"})
    for (int t = 0; t < 10; ++t) {
      harness::SpectralTestOptions so;
      so.family = fam;
      so.seed = rng();
      if (std::string(fam) == "restore") {
        so.grid = {6, 6};
      } else {
        so.samples = rand_int(rng, 10, 40);
        so.features = rand_int(rng, 4, 12);
      }
      so.rho = 1e-4 * std::pow(10.0, double(t % 3));
      so.delta = so.rho;
      for (auto ht : {ippmm::HTildeChoice::diag_h, ippmm::HTildeChoice::u_squared}) {
        so.htilde = ht;
        auto rep = harness::spectral_test(so);
        const double a = rep.alpha_h, b = rep.beta_h;
        for (double l : rep.eigenvalues) {
          bool neg = l >= -b - 1.0 - 1e-8 && l <= -a + 1e-8;
          bool pos = l >= 1.0 / (1.0 + b) - 1e-8 && l <= 1.0 + 1e-8;
          o.require(neg || pos, std::string(fam) + ": eigenvalue outside the intervals");
        }
        if (ht == ippmm::HTildeChoice::diag_h)
          o.require(a <= 1.0 + 1e-12 && b >= 1.0 - 1e-12, "alpha_H <= 1 <= beta_H fails for diag(H)");
        min_alpha = std::min(min_alpha, a);
        max_beta = std::max(max_beta, b);
        ++states;
      }
    }
  o.detail << states << " preconditioned spectra (10 restore + 10 logistic states, 2 diagonal choices), alpha_H >= "
           << min_alpha << ", beta_H <= " << max_beta;
  return o;
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(44);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index n = rand_int(rng, 5, 50), m = rand_int(rng, 1, std::min<Index>(n - 1, 20));
    Vec qd = randu(rng, n, 0.1, 2.0), c = randn(rng, n);
    Mat a(m, n);
    for (Index j = 0; j < n; ++j) a.col(j) = randn(rng, m);
    ippmm::ConvexProgram p;
    SpMat q(n, n);
    for (Index j = 0; j < n; ++j) q.insert(j, j) = qd[j];
    p.objective = std::make_shared<ippmm::QuadraticObjective>(q, c);
    p.A = a.sparseView();
    Vec x0 = randu(rng, n, 0.1, 2.0);
    p.nonneg.assign(std::size_t(n), 1);
    for (Index j = 0; j < n; j += 4) p.nonneg[std::size_t(j)] = 0;
    p.b = a * x0;

    ippmm::IpPmmState s = ippmm::initial_state(p, {});
    for (Index j = 0; j < n; ++j) {
      s.x[j] = p.nonneg[j] ? randu(rng, 1, 0.1, 3.0)[0] : randn(rng, 1)[0];
      s.z[j] = p.nonneg[j] ? randu(rng, 1, 0.1, 3.0)[0] : 0.0;
    }
    s.y = randn(rng, m);
    s.zeta = s.x + 0.1 * randn(rng, n);
    s.eta = s.y + 0.1 * randn(rng, m);
    s.mu = ippmm::complementarity(s, p);
    s.rho = 0.3;
    s.delta = 0.2;
    const double sigma = 0.4;

    // dense unreduced Newton system in (dx, dy, dz), built from the definitions
    Mat k = Mat::Zero(2 * n + m, 2 * n + m);
    Vec r = Vec::Zero(2 * n + m);
    Vec g = qd.cwiseProduct(s.x) + c;
    k.block(0, 0, n, n) = -(Mat(qd.asDiagonal()) + s.rho * Mat::Identity(n, n));
    k.block(0, n, n, m) = a.transpose();
    k.block(0, n + m, n, n) = Mat::Identity(n, n);
    r.head(n) = g - a.transpose() * s.y - s.z + sigma * s.rho * (s.x - s.zeta);
    k.block(n, 0, m, n) = a;
    k.block(n, n, m, m) = s.delta * Mat::Identity(m, m);
    r.segment(n, m) = p.b - a * s.x - sigma * s.delta * (s.y - s.eta);
    for (Index j = 0; j < n; ++j) {
      Index row = n + m + j;
      if (p.nonneg[j]) {
        k(row, j) = s.z[j];
        k(row, n + m + j) = s.x[j];
        r[row] = sigma * s.mu - s.x[j] * s.z[j];
      } else {
        k(row, n + m + j) = 1.0;
      }
    }
    Vec dy_dense = k.fullPivLu().solve(r).segment(n, m);

    // normal-equations path: assembled matrix and the PCG Newton solver
    auto ne = ippmm::assemble_normal_equations(s, p, sigma);
    Vec dy_ne = ne.matrix->to_dense().llt().solve(ne.rhs);
    ippmm::SolverOptions so;
    so.linear_solver = ippmm::LinearSolverKind::pcg_normal;
    so.pcg_tol_base = so.pcg_tol_floor = 1e-13;
    auto solver = ippmm::make_newton_solver(so);
    solver->prepare(s, p);
    auto rhs = ippmm::newton_rhs(s, p, g, sigma, Vec());
    Vec sx, dy_pcg;
    Index inner = 0;
    bool inexact = false;
    solver->solve(rhs.r1, rhs.r2, sx, dy_pcg, inner, inexact);
    o.require(!inexact, "PCG did not converge");
    worst = std::max({worst, rel(dy_ne, dy_dense), rel(dy_pcg, dy_dense)});
  }
  o.require(worst <= 1e-8, "normal-equations dy differs");
  o.detail << "10 states, max relative dy difference " << worst;
  return o;
}

// ---------------------------------------------------------------- 5

Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& w) {
  Vec g(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    double h = 1e-5 * std::max(1.0, std::abs(w[i]));
    Vec p = w, m = w;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(45);
  double worst_fd = 0.0, worst_sym = 0.0;

  harness::BlurOptions bo;
  bo.peak = 50.0;
  auto bi = harness::gen_blur_instance(harness::builtin_image("disk", 8, 8),
                                       linops::BlurKernel::gaussian(8, 8, 1.0), bo, 3);
  auto kl_prog = problems::build_poisson_tv(bi.instance);
  const auto& kl = static_cast<const problems::KlObjective&>(*kl_prog.objective);

  auto lg = harness::gen_classification(60, 8, 3.0, 0.5, 5).train;
  auto lg_prog = problems::build_logistic_l1(lg);
  const auto& lo = static_cast<const problems::LogisticObjective&>(*lg_prog.objective);

  for (int t = 0; t < 20; ++t) {
    Vec w = randu(rng, 64, 0.05, 1.5);
    Vec fd = central_gradient([&](const Vec& v) { return kl.kl(v); }, w);
    worst_fd = std::max(worst_fd, rel(fd, kl.kl_gradient(w)));
    Vec x = randu(rng, kl_prog.n(), 0.05, 1.5);
    Vec u = randn(rng, kl_prog.n()), v = randn(rng, kl_prog.n());
    double a = u.dot(kl.hessian_apply(x, v)), b = v.dot(kl.hessian_apply(x, u));
    worst_sym = std::max(worst_sym, std::abs(a - b) / (1 + std::abs(a)));

    Vec wl = randn(rng, 9);
    Vec fdl = central_gradient([&](const Vec& v2) { return lo.loss(v2); }, wl);
    worst_fd = std::max(worst_fd, rel(fdl, lo.loss_gradient(wl)));
    Vec xl = problems::logistic_split_point(lg, wl);
    Vec ul = randn(rng, lg_prog.n()), vl = randn(rng, lg_prog.n());
    double al = ul.dot(lo.hessian_apply(xl, vl)), bl = vl.dot(lo.hessian_apply(xl, ul));
    worst_sym = std::max(worst_sym, std::abs(al - bl) / (1 + std::abs(al)));
  }
  o.require(worst_fd <= 1e-6, "gradient differs from central differences");
  o.require(worst_sym <= 1e-12, "Hessian action not symmetric");
  o.detail << "20 KL + 20 logistic points, max gradient error " << worst_fd << ", max asymmetry " << worst_sym;
  return o;
}

// ---------------------------------------------------------------- 6

Mat circulant(const Mat& psf) {
  const Index n1 = psf.rows(), n2 = psf.cols();
  Mat d(n1 * n2, n1 * n2);
  for (Index r = 0; r < n1; ++r)
    for (Index c = 0; c < n2; ++c)
      for (Index rp = 0; rp < n1; ++rp)
        for (Index cp = 0; cp < n2; ++cp)
          d(r * n2 + c, rp * n2 + cp) = psf(((r - rp) % n1 + n1) % n1, ((c - cp) % n2 + n2) % n2);
  return d;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(46);
  double worst = 0.0;
  std::vector<std::shared_ptr<linops::LinearOperator>> ops;
  for (auto k : {linops::BlurKernel::gaussian(16, 16, 2.0), linops::BlurKernel::motion(16, 16, 9.0, 30.0),
                 linops::BlurKernel::out_of_focus(16, 16, 4.0)}) {
    auto op = std::make_shared<linops::BccbOperator>(k);
    Mat dense = circulant(k.psf());
    for (int t = 0; t < 5; ++t) {
      Vec v = randn(rng, 256);
      worst = std::max({worst, rel(op->apply(v), dense * v), rel(op->apply_transpose(v), dense.transpose() * v)});
    }
    ops.push_back(op);
  }
  o.require(worst <= 1e-10, "BCCB differs from the dense circulant");

  Mat dm(7, 11);
  for (Index j = 0; j < 11; ++j) dm.col(j) = randn(rng, 7);
  auto dense = std::make_shared<linops::DenseOperator>(dm);
  auto diff = linops::make_difference_operator(4, 5);
  auto tv2 = linops::make_tv_operator({5, 6});
  auto tv3 = linops::make_tv_operator({3, 3, 4});
  ops.push_back(dense);
  ops.push_back(std::make_shared<linops::SparseOperator>(tv2->matrix()));
  ops.push_back(diff);
  ops.push_back(tv3);
  ops.push_back(std::make_shared<linops::BlockOperator>(
      std::vector<Index>{7, diff->rows()}, std::vector<Index>{11, diff->cols()},
      std::vector<std::vector<linops::OperatorPtr>>{{dense, nullptr}, {nullptr, diff}}));
  ops.push_back(std::make_shared<linops::FunctionOperator>(
      7, 11, [&](const Vec& v) { return Vec(dm * v); }, [&](const Vec& u) { return Vec(dm.transpose() * u); }));
  double worst_adj = 0.0;
  for (const auto& op : ops)
    for (int k = 0; k < 50; ++k) {
      Vec v = randn(rng, op->cols()), u = randn(rng, op->rows());
      double lhs = u.dot(op->apply(v)), rhs = op->apply_transpose(u).dot(v);
      worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / (1 + u.norm() * v.norm()));
    }
  o.require(worst_adj <= 1e-12, "adjoint probe failed");
  o.detail << "3 kernels on 16x16, max relative error " << worst << "; " << ops.size()
           << " operators, max adjoint defect " << worst_adj;
  return o;
}

// ---------------------------------------------------------------- 8

Outcome criterion8() {
  Outcome o;
  harness::Image truth = harness::builtin_image("squares", 64, 64);
  harness::BlurOptions bo;
  bo.peak = 255.0;
  auto bi = harness::gen_blur_instance(truth, linops::BlurKernel::gaussian(64, 64, 2.0), bo, 1);
  const auto& inst = bi.instance;
  ippmm::SolverOptions so;
  so.linear_solver = ippmm::LinearSolverKind::minres_augmented;
  so.max_iter = 20;
  Vec w0 = inst.g.cwiseMax(1e-3);
  Vec x0 = problems::poisson_tv_split_point(inst, w0);
  x0.tail(x0.size() - w0.size()).array() += 1e-1;
  so.start = ippmm::StartingPoint{x0, {}, {}};
  auto r = ippmm::solve(problems::build_poisson_tv(inst), so);
  o.require(r.report.status != ippmm::Status::numerical_failure, "numerical failure");
  o.require(r.report.iterations <= 20, "more than 20 iterations");
  auto obs = metrics::image_scores(bi.observed.pixels, truth.pixels, 64, 64);
  auto res = metrics::image_scores(r.x.head(inst.pixels()), truth.pixels, 64, 64);
  o.require(res.rmse <= 0.8 * obs.rmse, "RMSE reduced by less than 20%");
  o.require(res.mssim > obs.mssim, "MSSIM not improved");
  o.detail << r.report.iterations << " iterations, RMSE " << obs.rmse << " -> " << res.rmse << ", MSSIM " << obs.mssim
           << " -> " << res.mssim;
  return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  Outcome o;
  const int seeds = 5;
  double err_sum = 0.0, worst_den = 0.0, worst_gap = 0.0;
  std::ostringstream per_seed;
  for (int seed = 1; seed <= seeds; ++seed) {
    auto data = harness::gen_classification(500, 100, 30.0, 0.1, std::uint64_t(seed), 2000);
    ippmm::SolverOptions so;
    so.linear_solver = ippmm::LinearSolverKind::minres_augmented;
    auto t0 = Clock::now();
    auto r = ippmm::solve(problems::build_logistic_l1(data.train), so);
    double t_ipm = seconds_since(t0);
    o.require(r.report.status == ippmm::Status::optimal, "IP-PMM status " + ippmm::to_string(r.report.status));
    Vec w = problems::logistic_weights(data.train, r.x);
    Vec wt = metrics::threshold_solution(w);
    Vec pred = problems::logistic_predict(data.train, data.test_d, wt);
    double err = 100.0 - metrics::accuracy(pred, data.test_labels);
    double den = 100.0 * metrics::density(wt.head(100));
    err_sum += err;
    worst_den = std::max(worst_den, den);
    o.require(den <= 30.0, "density above 30%");

    baselines::AdmmOptions ao;
    ao.rho = 1e-2;
    ao.stop.tol = 1e-14;
    ao.stop.maxit = 100000000;
    ao.stop.time_limit_seconds = 10.0 * t_ipm;
    auto admm = baselines::admm_solve(data.train, ao);
    double f_ipm = problems::logistic_objective(data.train, w);
    double f_admm = problems::logistic_objective(data.train, admm.w);
    worst_gap = std::max(worst_gap, rel(f_ipm, f_admm));
    o.require(rel(f_ipm, f_admm) <= 1e-3, "objective gap to ADMM");
    per_seed << (seed > 1 ? "," : "") << err;
  }
  double mean_err = err_sum / seeds;
  o.require(mean_err <= 5.0, "mean test error above 5%");
  o.detail << "mean test error " << mean_err << "% over seeds 1-" << seeds << " (" << per_seed.str()
           << "), max density " << worst_den << "%, max gap to ADMM " << worst_gap;
  return o;
}

// ---------------------------------------------------------------- 10

Outcome criterion10() {
  Outcome o;
  // ratios: identical portfolios
  problems::PortfolioInstance p = harness::gen_portfolio(4, 3, 7);
  Vec naive = problems::naive_portfolio(p);
  SpMat c = problems::portfolio_covariance(p);
  auto same = metrics::portfolio_ratios(naive, naive, c, 4);
  o.require(same.ratio == 1.0 && same.ratio_h == 1.0 && same.ratio_t == 1.0, "w_opt = w_naive ratios");
  // single asset, two periods, no change
  o.require(metrics::transaction_count(Vec::Constant(2, 0.5), 1, 1e-8) == 0, "T = 0 example");
  // 480 active naive positions against 72
  Vec wn = Vec::Constant(480, 1.0 / 48.0), wo = Vec::Zero(480);
  for (Index i = 0; i < 72; ++i) wo[i * 6] = 1.0 / 7.2;
  SpMat eye(480, 480);
  eye.setIdentity();
  auto ff = metrics::portfolio_ratios(wo, wn, eye, 48);
  o.require(ff.active_naive == 480 && ff.active_opt == 72, "active counts");
  o.require(ff.ratio_h == 480.0 / 72.0, "ratio_h 480/72");
  o.require(std::abs(ff.ratio_h - 6.67) < 5e-3, "ratio_h rounds to 6.67");

  // overlap examples
  Vec a = Vec::Zero(100), b = Vec::Zero(100);
  for (Index i = 0; i < 10; ++i) {
    a[i] = 1.0;
    b[i + 10] = 1.0;
  }
  auto ov = metrics::corrected_overlap(a, a);
  o.require(ov && *ov == 0.9, "identical supports give 0.9");
  auto dj = metrics::corrected_overlap(a, b);
  o.require(dj && *dj == -0.1, "disjoint supports give -E/|Z|");
  // perfect classifier
  Vec labels(4);
  labels << 1, -1, 1, -1;
  o.require(metrics::accuracy(labels, labels) == 100.0, "perfect classifier");

  // thresholding
  Vec t1(3);
  t1 << 1.0, 1e-6, 1e-6;
  Vec th = metrics::threshold_solution(t1);
  o.require(th[0] == 1.0 && th[1] == 0.0 && th[2] == 0.0, "[1, 1e-6, 1e-6] thresholding");
  o.require(metrics::threshold_solution(t1, 0.0) == t1, "fraction 0 keeps w");
  Vec t2(4);
  t2 << 0.0, 3.0, 0.0, 0.0;
  o.require(metrics::threshold_solution(t2) == t2, "zeros removed only");

  // image scores
  Vec img = Vec::LinSpaced(256, 0.0, 1.0);
  auto eq = metrics::image_scores(img, img, 16, 16);
  o.require(eq.rmse == 0.0 && eq.mssim == 1.0 && std::isinf(eq.psnr) && eq.psnr > 0, "w = w_ref scores");
  Vec ref = Vec::Zero(256);
  ref[0] = 1.0;
  Vec noisy = ref.array() + 0.01;
  o.require(std::abs(metrics::psnr(noisy, ref) - 40.0) < 1e-9, "PSNR 40 dB");
  Vec flat = Vec::Constant(256, 0.5), shifted = Vec::Constant(256, 0.6);
  auto cs = metrics::image_scores(shifted, flat, 16, 16);
  o.require(std::abs(cs.rmse - 0.1) < 1e-12 && cs.mssim < 1.0, "constant shift");
  o.detail << "portfolio, overlap, accuracy, threshold and image examples; ratio_h = " << ff.ratio_h;
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  auto suite = portfolio_suite();
  std::vector<Entry> entries = {
      {1, "portfolio KKT convergence", 60, [&] { return criterion1(suite); }},
      {2, "fused-lasso normal-equation spectra", 30, criterion2},
      {3, "augmented-system spectra", 30, criterion3},
      {4, "normal vs augmented dy", 0, criterion4},
      {5, "gradient fidelity", 0, criterion5},
      {6, "operator fidelity", 0, criterion6},
      {7, "dropping soundness", 0, [&] { return criterion7(suite); }},
      {8, "restoration quality", 120, criterion8},
      {9, "classification behavior", 0, criterion9},
      {10, "metric examples", 0, criterion10},
  };
  int failed = 0;
  for (const auto& e : entries) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << "exception: " << ex.what();
    }
    double secs = seconds_since(t0);
    if (e.limit > 0 && secs >= e.limit) {
      o.pass = false;
      o.detail << "; runtime above " << e.limit << " s";
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", e.id, e.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(entries.size()) - failed, entries.size());
  return failed ? 1 : 0;
}
