#include "doctest.h"

#include "pmm/ippmm.hpp"
#include "test_util.hpp"

#include <json.hpp>

#include <cmath>

using namespace pmm;
using namespace pmm::ippmm;

namespace {

struct RandomQp {
  ConvexProgram program;
  Mat q;
};

// Feasible, strictly convex QP with a mix of free and non-negative variables.
RandomQp random_qp(std::mt19937_64& rng, Index n, Index m, bool diagonal, double free_frac = 0.3) {
  std::uniform_real_distribution<double> u(0, 1);
  Mat q;
  if (diagonal) {
    q = testutil::randu(rng, n, 0.1, 2.0).asDiagonal();
  } else {
    Mat b = testutil::randn_mat(rng, n, n);
    q = b.transpose() * b / double(n) + 0.1 * Mat::Identity(n, n);
  }
  Mat a = testutil::randn_mat(rng, m, n);
  std::vector<char> nonneg(std::size_t(n), 1);
  Vec x0 = testutil::randu(rng, n, 0.1, 2.0);
  for (Index j = 0; j < n; ++j)
    if (u(rng) < free_frac) {
      nonneg[std::size_t(j)] = 0;
      x0[j] = 2 * u(rng) - 1;
    }
  RandomQp out;
  out.q = q;
  out.program.A = a.sparseView();
  out.program.b = a * x0;
  out.program.nonneg = nonneg;
  out.program.objective = std::make_shared<QuadraticObjective>(SpMat(q.sparseView()), testutil::randn(rng, n));
  out.program.family = "qp";
  return out;
}

// KKT violation of (x, y, z) computed from scratch.
double kkt_violation(const ConvexProgram& p, const Mat& q, const Vec& c, const Vec& x, const Vec& y, const Vec& z) {
  Mat a = Mat(p.A);
  double v = (a * x - p.b).norm() / (1 + p.b.norm());
  Vec g = q * x + c;
  v = std::max(v, (g - a.transpose() * y - z).norm() / (1 + g.norm()));
  for (Index j = 0; j < p.n(); ++j) {
    if (p.nonneg[j]) {
      v = std::max(v, std::max(-x[j], -z[j]));
      v = std::max(v, std::abs(x[j] * z[j]));
    } else {
      v = std::max(v, std::abs(z[j]));
    }
  }
  return v;
}

IpPmmState perturbed_state(std::mt19937_64& rng, const ConvexProgram& p) {
  IpPmmState s = initial_state(p, {});
  for (Index j = 0; j < p.n(); ++j) {
    if (p.nonneg[j]) {
      s.x[j] = testutil::randu(rng, 1, 0.1, 3.0)[0];
      s.z[j] = testutil::randu(rng, 1, 0.1, 3.0)[0];
    } else {
      s.x[j] = testutil::randn(rng, 1)[0];
    }
  }
  s.y = testutil::randn(rng, p.m());
  s.zeta = s.x + 0.1 * testutil::randn(rng, p.n());
  s.eta = s.y + 0.1 * testutil::randn(rng, p.m());
  s.mu = complementarity(s, p);
  s.rho = 0.3;
  s.delta = 0.2;
  return s;
}

// Unreduced Newton system in (dx, dy, dz), solved densely.
void dense_newton(const IpPmmState& s, const ConvexProgram& p, const Mat& q, const Vec& c, double sigma,
                  const Vec& corr, Vec& dx, Vec& dy, Vec& dz) {
  const Index n = p.n(), m = p.m();
  Mat a = Mat(p.A);
  Mat k = Mat::Zero(2 * n + m, 2 * n + m);
  Vec r = Vec::Zero(2 * n + m);
  Vec g = q * s.x + c;
  k.block(0, 0, n, n) = -(q + s.rho * Mat::Identity(n, n));
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
      r[row] = sigma * s.mu - (corr.size() ? corr[j] : 0.0) - s.x[j] * s.z[j];
    } else {
      k(row, n + m + j) = 1.0;
    }
  }
  Vec sol = k.fullPivLu().solve(r);
  dx = sol.head(n);
  dy = sol.segment(n, m);
  dz = sol.tail(n);
}

const Vec& lin_c(const ConvexProgram& p) { return static_cast<const QuadraticObjective&>(*p.objective).c(); }

}  // namespace

TEST_CASE("one-variable problems") {
  // min 0.5 x^2 - x, x >= 0, no constraints
  ConvexProgram qp;
  qp.A = SpMat(0, 1);
  qp.b = Vec(0);
  qp.nonneg = {1};
  SpMat one(1, 1);
  one.insert(0, 0) = 1.0;
  qp.objective = std::make_shared<QuadraticObjective>(one, Vec::Constant(1, -1.0));
  auto r = solve(qp);
  CHECK(r.report.status == Status::optimal);
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-5);

  // min x, x >= 0
  ConvexProgram lp;
  lp.A = SpMat(0, 1);
  lp.b = Vec(0);
  lp.nonneg = {1};
  lp.objective = std::make_shared<QuadraticObjective>(SpMat(1, 1), Vec::Constant(1, 1.0));
  auto r2 = solve(lp);
  CHECK(r2.report.status == Status::optimal);
  CHECK(std::abs(r2.x[0]) <= 1e-5);
  CHECK(std::abs(r2.z[0] - 1.0) <= 1e-5);
}

TEST_CASE("step length examples") {
  ConvexProgram p;
  p.A = SpMat(0, 1);
  p.b = Vec(0);
  p.nonneg = {1};
  p.objective = std::make_shared<QuadraticObjective>(SpMat(1, 1), Vec::Zero(1));
  IpPmmState s = initial_state(p, {});
  Direction d;
  d.dx = Vec::Constant(1, -2.0);
  d.dz = Vec::Constant(1, -4.0);
  d.dy = Vec(0);
  auto [ap, ad] = step_lengths(s, p, d, 0.995);
  CHECK(ap == doctest::Approx(0.4975).epsilon(1e-14));
  CHECK(ad == doctest::Approx(0.995 * 0.25).epsilon(1e-14));
  d.dx[0] = 5;
  d.dz[0] = 0;
  auto [bp, bd] = step_lengths(s, p, d, 0.995);
  CHECK(bp == 1.0);
  CHECK(bd == 1.0);
}

TEST_CASE("penalty update follows the complementarity ratio") {
  std::mt19937_64 rng(3);
  auto qp = random_qp(rng, 6, 2, true, 0.0);
  SolverOptions o;
  IpPmmState s = initial_state(qp.program, o);
  s.x = Vec::Constant(6, 0.1);
  s.z = Vec::Constant(6, 1.0);
  s.rho = 1e-3;
  s.delta = 1e-3;
  update_penalties_and_estimates(s, qp.program, 1.0, o);
  CHECK(s.mu == doctest::Approx(0.1));
  CHECK(s.rho == doctest::Approx(1e-4));
  CHECK(s.delta == doctest::Approx(1e-4));

  s.rho = 1e-8;
  s.delta = 1e-8;
  update_penalties_and_estimates(s, qp.program, 1.0, o);
  CHECK(s.rho == 1e-8);
  CHECK(s.delta == 1e-8);

  // mu growth never increases the penalties
  s.rho = 1e-3;
  update_penalties_and_estimates(s, qp.program, 1e-3, o);
  CHECK(s.rho == 1e-3);
}

TEST_CASE("termination is inclusive") {
  Residuals r;
  r.primal_rel = 1e-6;
  r.dual_rel = 1e-6;
  r.mu = 1e-6;
  CHECK(check_termination(r, 1e-6) == Status::optimal);
  r.mu = 1.0000001e-6;
  CHECK(check_termination(r, 1e-6) != Status::optimal);
}

TEST_CASE("initial point and penalties") {
  std::mt19937_64 rng(5);
  auto qp = random_qp(rng, 8, 3, true);
  IpPmmState s = initial_state(qp.program, {});
  for (Index j = 0; j < 8; ++j) {
    CHECK(s.x[j] == (qp.program.nonneg[j] ? 1.0 : 0.0));
    CHECK(s.z[j] == (qp.program.nonneg[j] ? 1.0 : 0.0));
  }
  CHECK(s.mu == 1.0);
  CHECK(s.rho == 1.0);
  CHECK(s.delta == 1.0);
  SolverOptions bad;
  bad.start = StartingPoint{Vec::Constant(8, -1.0), Vec(), Vec()};
  CHECK_THROWS_AS(initial_state(qp.program, bad), InvalidArgument);
}

TEST_CASE("reduced newton systems match the unreduced dense system") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    Index n = testutil::rand_int(rng, 3, 15), m = testutil::rand_int(rng, 1, n - 1);
    bool diag = t % 2 == 0;
    auto qp = random_qp(rng, n, m, diag);
    const ConvexProgram& p = qp.program;
    IpPmmState s = perturbed_state(rng, p);
    double sigma = testutil::randu(rng, 1, 0, 1)[0];
    Vec corr = Vec::Zero(n);
    for (Index j = 0; j < n; ++j)
      if (p.nonneg[j]) corr[j] = testutil::randn(rng, 1)[0];
    Vec dx, dy, dz;
    dense_newton(s, p, qp.q, lin_c(p), sigma, corr, dx, dy, dz);

    AugmentedSystem aug = assemble_augmented_system(s, p, sigma, corr);
    REQUIRE(aug.explicit_matrix.has_value());
    Mat k = Mat(*aug.explicit_matrix);
    Vec sol = k.lu().solve(aug.rhs);
    CHECK(testutil::rel_err(sol.head(n), dx) < 1e-9);
    CHECK(testutil::rel_err(sol.tail(m), dy) < 1e-9);

    // matrix-free apply agrees with the explicit matrix
    Vec v = testutil::randn(rng, n + m);
    CHECK(testutil::rel_err(aug.matrix->apply(v), k * v) < 1e-12);

    if (diag) {
      NormalEquations ne = assemble_normal_equations(s, p, sigma, corr);
      Mat nm = ne.matrix->to_dense();
      Vec ny = nm.llt().solve(ne.rhs);
      CHECK(testutil::rel_err(ny, dy) < 1e-9);
      Vec nx = ne.g_inv.cwiseProduct(Mat(ne.a_kept).transpose() * ny - ne.r1);
      CHECK(testutil::rel_err(nx, dx) < 1e-9);
    } else {
      CHECK_THROWS_AS(assemble_normal_equations(s, p, sigma, corr), UnsupportedStructure);
    }

    // each Newton solver reproduces the corrector direction
    std::vector<LinearSolverKind> kinds = {LinearSolverKind::direct_augmented,
                                           LinearSolverKind::minres_augmented};
    if (diag) kinds.push_back(LinearSolverKind::pcg_normal);
    for (auto kind : kinds) {
      SolverOptions o;
      o.linear_solver = kind;
      o.minres_tol = 1e-12;
      o.minres_maxit = 500;
      o.pcg_tol_base = 1e-13;
      o.pcg_tol_floor = 1e-13;
      auto solver = make_newton_solver(o);
      solver->prepare(s, p);
      NewtonRhs r = newton_rhs(s, p, qp.q * s.x + lin_c(p), sigma, corr);
      Vec sx, sy;
      Index inner = 0;
      bool inexact = true;
      solver->solve(r.r1, r.r2, sx, sy, inner, inexact);
      CHECK_FALSE(inexact);
      CHECK(testutil::rel_err(sx, dx) < 1e-8);
      CHECK(testutil::rel_err(sy, dy) < 1e-8);
    }
  }
}

TEST_CASE("solver reaches a KKT point with every linear solver") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 12; ++t) {
    Index n = testutil::rand_int(rng, 4, 30), m = testutil::rand_int(rng, 1, n / 2);
    bool diag = t % 3 != 0;
    auto qp = random_qp(rng, n, m, diag);
    std::vector<LinearSolverKind> kinds = {LinearSolverKind::direct_augmented,
                                           LinearSolverKind::minres_augmented};
    if (diag) kinds.push_back(LinearSolverKind::pcg_normal);
    std::vector<double> objs;
    for (auto kind : kinds) {
      SolverOptions o;
      o.linear_solver = kind;
      o.tol = 1e-8;
      o.minres_maxit = 200;
      o.minres_tol = 1e-10;
      auto r = solve(qp.program, o);
      INFO("solver " << to_string(kind) << " trial " << t);
      CHECK(r.report.status == Status::optimal);
      CHECK(kkt_violation(qp.program, qp.q, lin_c(qp.program), r.x, r.y, r.z) < 1e-6);
      objs.push_back(r.report.objective);
      // histories have one entry per iteration plus the start
      CHECK(r.report.primal_history.size() == std::size_t(r.report.iterations + 1));
    }
    for (double o : objs) CHECK(std::abs(o - objs[0]) <= 1e-6 * (1 + std::abs(objs[0])));
  }
}

TEST_CASE("equality-constrained free QP matches the dense KKT solve") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 5; ++t) {
    Index n = 10, m = 4;
    auto qp = random_qp(rng, n, m, false, 1.0);
    Mat a = Mat(qp.program.A);
    Mat k = Mat::Zero(n + m, n + m);
    k.topLeftCorner(n, n) = qp.q;
    k.topRightCorner(n, m) = a.transpose();
    k.bottomLeftCorner(m, n) = a;
    Vec rhs(n + m);
    rhs << -lin_c(qp.program), qp.program.b;
    Vec sol = k.lu().solve(rhs);
    SolverOptions o;
    o.tol = 1e-9;
    auto r = solve(qp.program, o);
    CHECK(r.report.status == Status::optimal);
    CHECK(testutil::rel_err(r.x, sol.head(n)) < 1e-6);
  }
}

TEST_CASE("iteration limit and report json") {
  std::mt19937_64 rng(2);
  auto qp = random_qp(rng, 10, 3, true);
  SolverOptions o;
  o.max_iter = 2;
  int calls = 0;
  o.callback = [&](const IterationInfo& info) {
    ++calls;
    CHECK(info.iteration == calls);
  };
  auto r = solve(qp.program, o);
  CHECK(r.report.status == Status::max_iterations);
  CHECK(r.report.iterations == 2);
  CHECK(calls == 2);
  auto j = nlohmann::json::parse(r.report.to_json());
  for (const char* key : {"status", "iters", "primal_inf", "dual_inf", "mu", "time_s", "inner_iters"})
    CHECK(j.contains(key));
  CHECK(j["status"] == "max-iterations");
  CHECK(j["iters"] == 2);

  o.linear_solver = LinearSolverKind::pcg_normal;
  auto dense = random_qp(rng, 6, 2, false);
  CHECK_THROWS_AS(solve(dense.program, o), UnsupportedStructure);
}

TEST_CASE("enum names round trip") {
  for (auto k : {LinearSolverKind::direct_augmented, LinearSolverKind::pcg_normal,
                 LinearSolverKind::minres_augmented})
    CHECK(parse_linear_solver(to_string(k)) == k);
  CHECK(parse_htilde("u-squared") == HTildeChoice::u_squared);
  CHECK(parse_htilde("diag-h") == HTildeChoice::diag_h);
  CHECK_THROWS_AS(parse_linear_solver("cg"), InvalidArgument);
}
