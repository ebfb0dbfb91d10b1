#include "pmm/ippmm.hpp"

#include <cmath>

namespace pmm::ippmm {

QuadraticObjective::QuadraticObjective(SpMat q, Vec c) : q_(std::move(q)), c_(std::move(c)) {
  if (q_.rows() != q_.cols() || q_.rows() != c_.size())
    throw InvalidArgument("quadratic objective: Q and c sizes differ");
  q_.makeCompressed();
  diag_ = q_.diagonal();
  diagonal_ = true;
  for (Index j = 0; j < q_.outerSize() && diagonal_; ++j)
    for (SpMat::InnerIterator it(q_, j); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) {
        diagonal_ = false;
        break;
      }
}

double QuadraticObjective::value(const Vec& x) const { return 0.5 * x.dot(q_ * x) + c_.dot(x); }

Vec QuadraticObjective::gradient(const Vec& x) const { return q_ * x + c_; }

Vec QuadraticObjective::hessian_apply(const Vec&, const Vec& v) const { return q_ * v; }

Vec QuadraticObjective::hessian_diagonal(const Vec&) const { return diag_; }

std::optional<SpMat> QuadraticObjective::hessian_matrix(const Vec&) const { return q_; }

void ConvexProgram::validate() const {
  if (!objective) throw InvalidArgument("program has no objective");
  if (b.size() != A.rows()) throw InvalidArgument("program: b length differs from rows of A");
  if (Index(nonneg.size()) != A.cols())
    throw InvalidArgument("program: nonneg mask length differs from columns of A");
  for (Index i = 0; i < b.size(); ++i)
    if (!std::isfinite(b[i])) throw InvalidArgument("program: b has non-finite entries");
}

std::string to_string(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::direct_augmented: return "direct-augmented";
    case LinearSolverKind::pcg_normal: return "pcg-normal";
    case LinearSolverKind::minres_augmented: return "minres-augmented";
  }
  return "unknown";
}

std::string to_string(HTildeChoice choice) {
  return choice == HTildeChoice::u_squared ? "u-squared" : "diag-h";
}

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::max_iterations: return "max-iterations";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

LinearSolverKind parse_linear_solver(const std::string& name) {
  if (name == "direct-augmented" || name == "direct") return LinearSolverKind::direct_augmented;
  if (name == "pcg-normal" || name == "pcg") return LinearSolverKind::pcg_normal;
  if (name == "minres-augmented" || name == "minres") return LinearSolverKind::minres_augmented;
  throw InvalidArgument("unknown linear solver '" + name + "'");
}

HTildeChoice parse_htilde(const std::string& name) {
  if (name == "u-squared") return HTildeChoice::u_squared;
  if (name == "diag-h") return HTildeChoice::diag_h;
  throw InvalidArgument("unknown H̃ choice '" + name + "'");
}

std::vector<Index> IpPmmState::active_nonneg(const ConvexProgram& p) const {
  std::vector<Index> out;
  for (Index j = 0; j < p.n(); ++j)
    if (p.nonneg[j] && !dropped[j]) out.push_back(j);
  return out;
}

std::vector<Index> IpPmmState::kept(const ConvexProgram& p) const {
  std::vector<Index> out;
  for (Index j = 0; j < p.n(); ++j)
    if (!dropped[j]) out.push_back(j);
  return out;
}

double complementarity(const IpPmmState& state, const ConvexProgram& program) {
  double sum = 0.0;
  Index count = 0;
  for (Index j = 0; j < program.n(); ++j)
    if (program.nonneg[j] && !state.dropped[j]) {
      sum += state.x[j] * state.z[j];
      ++count;
    }
  return count ? sum / double(count) : 0.0;
}

IpPmmState initial_state(const ConvexProgram& program, const SolverOptions& options) {
  const Index n = program.n(), m = program.m();
  IpPmmState s;
  s.x = Vec::Zero(n);
  s.z = Vec::Zero(n);
  for (Index j = 0; j < n; ++j)
    if (program.nonneg[j]) s.x[j] = s.z[j] = 1.0;
  s.y = Vec::Zero(m);
  if (options.start) {
    const StartingPoint& sp = *options.start;
    if (sp.x.size()) {
      if (sp.x.size() != n) throw InvalidArgument("starting x has wrong length");
      s.x = sp.x;
    }
    if (sp.y.size()) {
      if (sp.y.size() != m) throw InvalidArgument("starting y has wrong length");
      s.y = sp.y;
    }
    if (sp.z.size()) {
      if (sp.z.size() != n) throw InvalidArgument("starting z has wrong length");
      s.z = sp.z;
    }
    for (Index j = 0; j < n; ++j) {
      if (!program.nonneg[j]) {
        s.z[j] = 0.0;
      } else if (!(s.x[j] > 0) || !(s.z[j] > 0)) {
        throw InvalidArgument("starting point must be strictly positive on the non-negative set");
      }
    }
  }
  s.dropped.assign(n, 0);
  s.zeta = s.x;
  s.eta = s.y;
  s.mu = complementarity(s, program);
  s.mu0 = s.mu;
  s.rho = std::max(options.rho_floor, std::min(1.0, s.mu));
  s.delta = std::max(options.delta_floor, std::min(1.0, s.mu));
  Residuals r = residuals(s, program);
  s.primal_ref = r.primal_abs;
  s.dual_ref = r.dual_abs;
  return s;
}

Residuals residuals(const IpPmmState& state, const ConvexProgram& program) {
  Residuals r;
  Vec grad = program.objective->gradient(state.x);
  Vec rp = program.b - program.A * state.x;
  Vec rd = grad - program.A.transpose() * state.y - state.z;
  double gnorm2 = 0.0, rd2 = 0.0;
  for (Index j = 0; j < program.n(); ++j)
    if (!state.dropped[j]) {
      rd2 += rd[j] * rd[j];
      gnorm2 += grad[j] * grad[j];
    }
  r.primal_abs = rp.norm();
  r.dual_abs = std::sqrt(rd2);
  r.primal_rel = r.primal_abs / (1.0 + program.b.norm());
  r.dual_rel = r.dual_abs / (1.0 + std::sqrt(gnorm2));
  r.mu = complementarity(state, program);
  return r;
}

}  // namespace pmm::ippmm
