#include "pmm/dropping.hpp"
#include "pmm/ippmm.hpp"

#include <chrono>
#include <cmath>

namespace pmm::ippmm {

void update_penalties_and_estimates(IpPmmState& state, const ConvexProgram& program, double mu_old,
                                    const SolverOptions& options) {
  double mu_new = complementarity(state, program);
  double ratio = mu_old > 0 ? std::min(1.0, mu_new / mu_old) : 1.0;
  state.rho = std::max(options.rho_floor, state.rho * ratio);
  state.delta = std::max(options.delta_floor, state.delta * ratio);
  state.mu = mu_new;
  Residuals r = residuals(state, program);
  if (r.primal_abs <= options.estimate_decrease * state.primal_ref &&
      r.dual_abs <= options.estimate_decrease * state.dual_ref) {
    state.zeta = state.x;
    state.eta = state.y;
    state.primal_ref = r.primal_abs;
    state.dual_ref = r.dual_abs;
  }
}

Status check_termination(const Residuals& r, double tol) {
  if (r.primal_rel <= tol && r.dual_rel <= tol && r.mu <= tol) return Status::optimal;
  return Status::max_iterations;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SolveResult solve(const ConvexProgram& program, const SolverOptions& options) {
  program.validate();
  if (!(options.tol > 0)) throw InvalidArgument("tol must be positive");
  if (options.max_iter < 0) throw InvalidArgument("max_iter must be non-negative");
  auto t_start = Clock::now();

  SolveReport rep;
  rep.linear_solver = to_string(options.linear_solver);
  IpPmmState state = initial_state(program, options);
  auto solver = make_newton_solver(options);
  const Index n = program.n();
  bool failed = false;

  try {
    for (int it = 0;; ++it) {
      Residuals res = residuals(state, program);
      rep.primal_history.push_back(res.primal_rel);
      rep.dual_history.push_back(res.dual_rel);
      rep.mu_history.push_back(res.mu);
      rep.primal_inf = res.primal_rel;
      rep.dual_inf = res.dual_rel;
      rep.mu = res.mu;
      if (check_termination(res, options.tol) == Status::optimal) {
        rep.status = Status::optimal;
        break;
      }
      if (it >= options.max_iter) {
        rep.status = Status::max_iterations;
        break;
      }
      if (seconds_since(t_start) > options.time_limit_seconds) {
        rep.status = Status::max_iterations;
        rep.message = "time limit reached";
        break;
      }

      Direction d = predictor_corrector_step(state, program, *solver, options);
      if (it == 0) rep.initial_dimension = solver->dimension();
      rep.final_dimension = solver->dimension();
      rep.inner_iterations += d.inner_iterations;
      rep.inner_history.push_back(d.inner_iterations);
      if (d.inexact) ++rep.inexact_directions;
      if (!d.dx.allFinite() || !d.dy.allFinite() || !d.dz.allFinite()) {
        failed = true;
        rep.message = "non-finite Newton direction";
        break;
      }

      auto [ap, ad] = step_lengths(state, program, d, options.boundary_fraction);
      double mu_old = state.mu;
      state.x += ap * d.dx;
      state.y += ad * d.dy;
      state.z += ad * d.dz;
      state.k = it + 1;
      for (Index j = 0; j < n; ++j)
        if (program.nonneg[j] && !state.dropped[j] && !(state.x[j] > 0 && state.z[j] > 0)) {
          failed = true;
          rep.message = "iterate left the positive orthant at variable " + std::to_string(j);
          break;
        }
      if (failed) break;
      if (!program.objective->in_domain(state.x)) {
        failed = true;
        rep.message = "iterate left the objective domain";
        break;
      }

      Index newly = 0;
      if (options.dropping.enabled &&
          complementarity(state, program) <= options.dropping.activation * state.mu0) {
        auto td = Clock::now();
        Vec grad = program.objective->gradient(state.x);
        newly = dropping::scan_and_drop(state, program, grad, options.dropping.eps_drop,
                                        options.dropping.xi);
        rep.time_dropping += seconds_since(td);
      }
      update_penalties_and_estimates(state, program, mu_old, options);
      rep.iterations = it + 1;

      if (options.callback) {
        Residuals r2 = residuals(state, program);
        IterationInfo info;
        info.iteration = it + 1;
        info.primal_inf = r2.primal_rel;
        info.dual_inf = r2.dual_rel;
        info.mu = r2.mu;
        info.rho = state.rho;
        info.delta = state.delta;
        info.sigma = d.sigma;
        info.alpha_primal = ap;
        info.alpha_dual = ad;
        info.inner_iterations = d.inner_iterations;
        info.dropped = newly;
        info.x = &state.x;
        options.callback(info);
      }
    }
  } catch (const NotPositiveDefinite& e) {
    failed = true;
    rep.message = e.what();
  } catch (const DomainError& e) {
    failed = true;
    rep.message = e.what();
  }
  if (failed) rep.status = Status::numerical_failure;

  SolveResult out;
  out.x = state.x;
  out.y = state.y;
  out.z = state.z;
  for (Index j = 0; j < n; ++j)
    if (state.dropped[j]) out.x[j] = 0.0;

  rep.drop_audit = dropping::verify_dropped(out.x, out.y, program, state.drop_log);
  for (std::size_t k = 0; k < state.drop_log.size(); ++k)
    out.z[state.drop_log[k].index] = rep.drop_audit.z_dropped[Index(k)];
  if (!rep.drop_audit.violated.empty() && rep.status != Status::numerical_failure) {
    rep.status = Status::numerical_failure;
    rep.message = "dropped variables with non-positive multiplier: " +
                  std::to_string(rep.drop_audit.violated.size());
  }

  rep.objective = out.x.allFinite() ? program.objective_value(out.x)
                                    : std::numeric_limits<double>::quiet_NaN();
  rep.time_assembly = solver->assembly_seconds;
  rep.time_factor = solver->factor_seconds;
  rep.time_solve = solver->solve_seconds;
  rep.time_seconds = seconds_since(t_start);
  out.report = std::move(rep);
  return out;
}

}  // namespace pmm::ippmm
