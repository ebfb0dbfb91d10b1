#include "pmm/ippmm.hpp"
#include "pmm/precond.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace pmm::ippmm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// n x |kept| column selector
SpMat selector(Index n, const std::vector<Index>& kept) {
  SpMat s(n, Index(kept.size()));
  s.reserve(Eigen::VectorXi::Constant(Index(kept.size()), 1));
  for (std::size_t k = 0; k < kept.size(); ++k) s.insert(kept[k], Index(k)) = 1.0;
  s.makeCompressed();
  return s;
}

Vec gather(const Vec& v, const std::vector<Index>& idx) {
  Vec out(Index(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[Index(k)] = v[idx[k]];
  return out;
}

Vec scatter(const Vec& v, const std::vector<Index>& idx, Index n) {
  Vec out = Vec::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = v[Index(k)];
  return out;
}

// Ξ + ρ on the kept variables.
Vec xi_plus_rho(const IpPmmState& s, const ConvexProgram& p, const std::vector<Index>& kept) {
  Vec d(Index(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    Index j = kept[k];
    d[Index(k)] = s.rho + (p.nonneg[j] ? s.z[j] / s.x[j] : 0.0);
  }
  return d;
}

Vec recover_dz(const IpPmmState& s, const ConvexProgram& p, const Vec& dx, const Vec& t) {
  Vec dz = Vec::Zero(p.n());
  for (Index j = 0; j < p.n(); ++j)
    if (p.nonneg[j] && !s.dropped[j]) dz[j] = (t[j] - s.z[j] * dx[j]) / s.x[j] - s.z[j];
  return dz;
}

class DirectAugmentedSolver final : public NewtonSolver {
 public:
  void prepare(const IpPmmState& state, const ConvexProgram& program) override {
    auto t0 = Clock::now();
    kept_ = state.kept(program);
    const Index ng = Index(kept_.size()), m = program.m();
    n_ = ng;
    m_ = m;
    auto h = program.objective->hessian_matrix(state.x);
    if (!h)
      throw UnsupportedStructure(
          "direct augmented solver needs an explicit Hessian; use minres-augmented");
    SpMat sel = selector(program.n(), kept_);
    SpMat hg = sel.transpose() * (*h) * sel;
    SpMat ag = program.A * sel;
    Vec d = xi_plus_rho(state, program, kept_);

    std::vector<Triplet> t;
    t.reserve(std::size_t(hg.nonZeros() + ag.nonZeros() + ng + m));
    for (Index j = 0; j < hg.outerSize(); ++j)
      for (SpMat::InnerIterator it(hg, j); it; ++it)
        if (it.row() < it.col()) t.emplace_back(int(it.row()), int(it.col()), -it.value());
    Vec hd = hg.diagonal();
    for (Index i = 0; i < ng; ++i) t.emplace_back(int(i), int(i), -(hd[i] + d[i]));
    for (Index j = 0; j < ag.outerSize(); ++j)
      for (SpMat::InnerIterator it(ag, j); it; ++it)
        t.emplace_back(int(j), int(ng + it.row()), it.value());
    for (Index i = 0; i < m; ++i) t.emplace_back(int(ng + i), int(ng + i), state.delta);
    k_.resize(ng + m, ng + m);
    k_.setFromTriplets(t.begin(), t.end());
    k_.makeCompressed();
    signs_.assign(std::size_t(ng + m), 1);
    for (Index i = 0; i < ng; ++i) signs_[std::size_t(i)] = -1;
    assembly_seconds += seconds_since(t0);

    auto t1 = Clock::now();
    ldl_.factorize(k_, krylov::SparseLdl::Mode::quasi_definite, signs_);
    factor_seconds += seconds_since(t1);
  }

  void solve(const Vec& r1, const Vec& r2, Vec& dx, Vec& dy, Index& inner, bool& inexact) override {
    auto t0 = Clock::now();
    Vec rhs(n_ + m_);
    rhs << r1, r2;
    Vec sol = ldl_.solve(rhs);
    // one step of iterative refinement
    Vec res = rhs - k_.selfadjointView<Eigen::Upper>() * sol;
    sol += ldl_.solve(res);
    dx = sol.head(n_);
    dy = sol.tail(m_);
    inner = 0;
    inexact = !sol.allFinite();
    solve_seconds += seconds_since(t0);
  }

  Index dimension() const override { return n_ + m_; }

 private:
  std::vector<Index> kept_;
  Index n_ = 0, m_ = 0;
  SpMat k_;  // upper triangle
  std::vector<int> signs_;
  krylov::SparseLdl ldl_;
};

class PcgNormalSolver final : public NewtonSolver {
 public:
  explicit PcgNormalSolver(const SolverOptions& o) : opts_(o) {}

  void prepare(const IpPmmState& state, const ConvexProgram& program) override {
    auto t0 = Clock::now();
    if (!program.objective->hessian_is_diagonal())
      throw UnsupportedStructure(
          "normal equations need a diagonal Hessian; use an augmented-system solver");
    kept_ = state.kept(program);
    SpMat sel = selector(program.n(), kept_);
    ag_ = program.A * sel;
    Vec g = gather(program.objective->hessian_diagonal(state.x), kept_) +
            xi_plus_rho(state, program, kept_);
    g_inv_ = g.cwiseInverse();
    delta_ = state.delta;
    mu_ = state.mu;
    const SpMat* a = &ag_;
    const Vec* gi = &g_inv_;
    double dl = delta_;
    op_ = std::make_shared<linops::FunctionOperator>(
        ag_.rows(), ag_.rows(),
        [a, gi, dl](const Vec& v) -> Vec { return *a * gi->cwiseProduct(a->transpose() * v) + dl * v; },
        [a, gi, dl](const Vec& v) -> Vec { return *a * gi->cwiseProduct(a->transpose() * v) + dl * v; });
    assembly_seconds += seconds_since(t0);

    auto t1 = Clock::now();
    if (opts_.normal_preconditioner) {
      NormalSystemView view;
      view.kept = kept_;
      view.n_full = program.n();
      view.a_kept = &ag_;
      view.g_inv = g_inv_;
      view.delta = state.delta;
      view.rho = state.rho;
      pre_ = opts_.normal_preconditioner(view);
    } else {
      Vec diag = ag_.cwiseAbs2() * g_inv_ + Vec::Constant(ag_.rows(), state.delta);
      pre_ = std::make_unique<krylov::JacobiPreconditioner>(diag);
    }
    factor_seconds += seconds_since(t1);
  }

  void solve(const Vec& r1, const Vec& r2, Vec& dx, Vec& dy, Index& inner, bool& inexact) override {
    auto t0 = Clock::now();
    Vec rhs = r2 + ag_ * g_inv_.cwiseProduct(r1);
    double rn = rhs.norm();
    double tol = rn < 1.0 ? opts_.pcg_tol_base : std::max(opts_.pcg_tol_floor, opts_.pcg_tol_base / rn);
    if (opts_.pcg_forcing > 0 && rn > 0) tol = std::min(tol, std::max(1e-12, opts_.pcg_forcing * mu_ / rn));
    krylov::KrylovOutcome out = krylov::pcg(*op_, rhs, *pre_, {tol, opts_.pcg_maxit, false});
    dy = out.solution;
    dx = g_inv_.cwiseProduct(ag_.transpose() * dy - r1);
    inner = out.iterations;
    inexact = !out.converged;
    solve_seconds += seconds_since(t0);
  }

  Index dimension() const override { return ag_.rows(); }

 private:
  SolverOptions opts_;
  std::vector<Index> kept_;
  SpMat ag_;
  Vec g_inv_;
  double delta_ = 0, mu_ = 1;
  std::shared_ptr<linops::FunctionOperator> op_;
  std::unique_ptr<krylov::Preconditioner> pre_;
};

class MinresAugmentedSolver final : public NewtonSolver {
 public:
  explicit MinresAugmentedSolver(const SolverOptions& o) : opts_(o) {}

  void prepare(const IpPmmState& state, const ConvexProgram& program) override {
    auto t0 = Clock::now();
    kept_ = state.kept(program);
    n_full_ = program.n();
    SpMat sel = selector(program.n(), kept_);
    ag_ = program.A * sel;
    d_ = xi_plus_rho(state, program, kept_);
    x_ = state.x;
    obj_ = program.objective;
    delta_ = state.delta;
    Vec hdiag = opts_.htilde == HTildeChoice::u_squared ? obj_->hessian_surrogate(state.x)
                                                        : obj_->hessian_diagonal(state.x);
    Vec htilde = gather(hdiag, kept_) + d_;
    const Index ng = Index(kept_.size()), m = program.m();
    op_ = std::make_shared<linops::FunctionOperator>(
        ng + m, ng + m, [this](const Vec& v) { return apply(v); },
        [this](const Vec& v) { return apply(v); });
    assembly_seconds += seconds_since(t0);

    auto t1 = Clock::now();
    if (!schur_ || schur_cols_ != ng) {
      schur_ = std::make_shared<krylov::SparseLdl>();
      schur_cols_ = ng;
    }
    pre_ = std::make_unique<precond::AugBlockDiagPreconditioner>(ag_, htilde, delta_, schur_);
    factor_seconds += seconds_since(t1);
  }

  void solve(const Vec& r1, const Vec& r2, Vec& dx, Vec& dy, Index& inner, bool& inexact) override {
    auto t0 = Clock::now();
    Vec rhs(r1.size() + r2.size());
    rhs << r1, r2;
    krylov::KrylovOutcome out =
        krylov::minres(*op_, rhs, *pre_, {opts_.minres_tol, opts_.minres_maxit, false});
    dx = out.solution.head(r1.size());
    dy = out.solution.tail(r2.size());
    inner = out.iterations;
    inexact = !out.converged;
    solve_seconds += seconds_since(t0);
  }

  Index dimension() const override { return ag_.cols() + ag_.rows(); }

 private:
  Vec apply(const Vec& v) const {
    const Index ng = ag_.cols(), m = ag_.rows();
    Vec vx = v.head(ng), vy = v.tail(m);
    Vec hv = gather(obj_->hessian_apply(x_, scatter(vx, kept_, n_full_)), kept_);
    Vec out(ng + m);
    out.head(ng) = -hv - d_.cwiseProduct(vx) + ag_.transpose() * vy;
    out.tail(m) = ag_ * vx + delta_ * vy;
    return out;
  }

  SolverOptions opts_;
  std::vector<Index> kept_;
  Index n_full_ = 0;
  SpMat ag_;
  Vec d_, x_;
  std::shared_ptr<const Objective> obj_;
  double delta_ = 0, mu_ = 1;
  std::shared_ptr<linops::FunctionOperator> op_;
  std::shared_ptr<krylov::SparseLdl> schur_;
  Index schur_cols_ = -1;
  std::unique_ptr<precond::AugBlockDiagPreconditioner> pre_;
};

}  // namespace

NewtonRhs newton_rhs(const IpPmmState& state, const ConvexProgram& program, const Vec& grad,
                     double sigma, const Vec& corr) {
  const Index n = program.n();
  NewtonRhs r;
  r.t = Vec::Zero(n);
  for (Index j = 0; j < n; ++j)
    if (program.nonneg[j] && !state.dropped[j])
      r.t[j] = sigma * state.mu - (corr.size() ? corr[j] : 0.0);
  Vec r1 = grad - program.A.transpose() * state.y + sigma * state.rho * (state.x - state.zeta);
  for (Index j = 0; j < n; ++j)
    if (program.nonneg[j] && !state.dropped[j]) r1[j] -= r.t[j] / state.x[j];
  r.r1 = gather(r1, state.kept(program));
  r.r2 = program.b - program.A * state.x - sigma * state.delta * (state.y - state.eta);
  return r;
}

AugmentedSystem assemble_augmented_system(const IpPmmState& state, const ConvexProgram& program,
                                          double sigma, const Vec& corr) {
  AugmentedSystem sys;
  sys.kept = state.kept(program);
  const Index ng = Index(sys.kept.size()), m = program.m();
  SpMat sel = selector(program.n(), sys.kept);
  SpMat ag = program.A * sel;
  sys.h_diag_part = xi_plus_rho(state, program, sys.kept);
  Vec grad = program.objective->gradient(state.x);
  NewtonRhs r = newton_rhs(state, program, grad, sigma, corr);
  sys.rhs.resize(ng + m);
  sys.rhs << r.r1, r.r2;

  auto h = program.objective->hessian_matrix(state.x);
  if (h) {
    SpMat hg = sel.transpose() * (*h) * sel;
    SpMat top = -hg;
    for (Index i = 0; i < ng; ++i) top.coeffRef(i, i) -= sys.h_diag_part[i];
    std::vector<Triplet> t;
    for (Index j = 0; j < top.outerSize(); ++j)
      for (SpMat::InnerIterator it(top, j); it; ++it) t.emplace_back(int(it.row()), int(it.col()), it.value());
    for (Index j = 0; j < ag.outerSize(); ++j)
      for (SpMat::InnerIterator it(ag, j); it; ++it) {
        t.emplace_back(int(ng + it.row()), int(j), it.value());
        t.emplace_back(int(j), int(ng + it.row()), it.value());
      }
    for (Index i = 0; i < m; ++i) t.emplace_back(int(ng + i), int(ng + i), state.delta);
    SpMat k(ng + m, ng + m);
    k.setFromTriplets(t.begin(), t.end());
    sys.explicit_matrix = k;
    sys.matrix = std::make_shared<linops::SparseOperator>(k);
  } else {
    auto obj = program.objective;
    Vec x = state.x, d = sys.h_diag_part;
    std::vector<Index> kept = sys.kept;
    Index n = program.n();
    double delta = state.delta;
    auto fn = [obj, x, d, kept, n, ag, delta, ng, m](const Vec& v) -> Vec {
      Vec vx = v.head(ng), vy = v.tail(m);
      Vec hv = gather(obj->hessian_apply(x, scatter(vx, kept, n)), kept);
      Vec out(ng + m);
      out.head(ng) = -hv - d.cwiseProduct(vx) + ag.transpose() * vy;
      out.tail(m) = ag * vx + delta * vy;
      return out;
    };
    sys.matrix = std::make_shared<linops::FunctionOperator>(ng + m, ng + m, fn, fn);
  }
  return sys;
}

NormalEquations assemble_normal_equations(const IpPmmState& state, const ConvexProgram& program,
                                          double sigma, const Vec& corr) {
  if (!program.objective->hessian_is_diagonal())
    throw UnsupportedStructure(
        "normal equations need a diagonal Hessian; use the augmented system instead");
  NormalEquations ne;
  ne.kept = state.kept(program);
  SpMat sel = selector(program.n(), ne.kept);
  ne.a_kept = program.A * sel;
  Vec g = gather(program.objective->hessian_diagonal(state.x), ne.kept) +
          xi_plus_rho(state, program, ne.kept);
  ne.g_inv = g.cwiseInverse();
  Vec grad = program.objective->gradient(state.x);
  NewtonRhs r = newton_rhs(state, program, grad, sigma, corr);
  ne.r1 = r.r1;
  ne.rhs = r.r2 + ne.a_kept * ne.g_inv.cwiseProduct(r.r1);
  SpMat a = ne.a_kept;
  Vec gi = ne.g_inv;
  double delta = state.delta;
  auto fn = [a, gi, delta](const Vec& v) -> Vec { return a * gi.cwiseProduct(a.transpose() * v) + delta * v; };
  ne.matrix = std::make_shared<linops::FunctionOperator>(a.rows(), a.rows(), fn, fn);
  return ne;
}

std::unique_ptr<NewtonSolver> make_newton_solver(const SolverOptions& options) {
  switch (options.linear_solver) {
    case LinearSolverKind::direct_augmented: return std::make_unique<DirectAugmentedSolver>();
    case LinearSolverKind::pcg_normal: return std::make_unique<PcgNormalSolver>(options);
    case LinearSolverKind::minres_augmented: return std::make_unique<MinresAugmentedSolver>(options);
  }
  throw InvalidArgument("unknown linear solver");
}

std::pair<double, double> step_lengths(const IpPmmState& state, const ConvexProgram& program,
                                       const Direction& d, double fraction) {
  double ap = std::numeric_limits<double>::infinity(), ad = ap;
  for (Index j = 0; j < program.n(); ++j) {
    if (!program.nonneg[j] || state.dropped[j]) continue;
    if (d.dx[j] < 0) ap = std::min(ap, -state.x[j] / d.dx[j]);
    if (d.dz[j] < 0) ad = std::min(ad, -state.z[j] / d.dz[j]);
  }
  return {std::min(1.0, fraction * ap), std::min(1.0, fraction * ad)};
}

Direction predictor_corrector_step(const IpPmmState& state, const ConvexProgram& program,
                                   NewtonSolver& solver, const SolverOptions& options) {
  const Index n = program.n();
  std::vector<Index> kept = state.kept(program);
  Vec grad = program.objective->gradient(state.x);
  solver.prepare(state, program);

  Direction dir;
  Vec dxg, dy;
  Index inner = 0;
  bool inexact = false;

  // affine-scaling predictor
  NewtonRhs pr = newton_rhs(state, program, grad, 0.0, Vec());
  solver.solve(pr.r1, pr.r2, dxg, dy, inner, inexact);
  dir.inner_iterations += inner;
  dir.inexact = dir.inexact || inexact;
  Direction aff;
  aff.dx = scatter(dxg, kept, n);
  aff.dy = dy;
  aff.dz = recover_dz(state, program, aff.dx, pr.t);

  auto active = state.active_nonneg(program);
  double sigma = options.sigma_min;
  Vec corr = Vec::Zero(n);
  if (!active.empty() && state.mu > 0) {
    auto [ap, ad] = step_lengths(state, program, aff, 1.0);
    double mu_aff = 0.0;
    for (Index j : active) mu_aff += (state.x[j] + ap * aff.dx[j]) * (state.z[j] + ad * aff.dz[j]);
    mu_aff /= double(active.size());
    double ratio = mu_aff / state.mu;
    sigma = std::clamp(ratio * ratio * ratio, options.sigma_min, options.sigma_max);
    for (Index j : active) corr[j] = aff.dx[j] * aff.dz[j];
  }

  // centering-corrector
  NewtonRhs cr = newton_rhs(state, program, grad, sigma, corr);
  solver.solve(cr.r1, cr.r2, dxg, dy, inner, inexact);
  dir.inner_iterations += inner;
  dir.inexact = dir.inexact || inexact;
  dir.dx = scatter(dxg, kept, n);
  dir.dy = dy;
  dir.dz = recover_dz(state, program, dir.dx, cr.t);
  dir.sigma = sigma;
  return dir;
}

}  // namespace pmm::ippmm
