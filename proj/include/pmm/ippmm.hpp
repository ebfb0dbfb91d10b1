#pragma once

#include "pmm/krylov.hpp"
#include "pmm/linops.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pmm::ippmm {

// Smooth convex objective. hessian_apply never needs an explicit matrix;
// hessian_matrix is optional and only used by the direct solver.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Vec hessian_apply(const Vec& x, const Vec& v) const = 0;
  virtual Vec hessian_diagonal(const Vec& x) const = 0;
  // Cheap diagonal stand-in for the Hessian (the "u-squared" choice).
  virtual Vec hessian_surrogate(const Vec& x) const { return hessian_diagonal(x); }
  virtual std::optional<SpMat> hessian_matrix(const Vec& /*x*/) const { return std::nullopt; }
  virtual bool hessian_is_diagonal() const { return false; }
  // Points where the oracle is defined (e.g. Dw + a > 0 for KL).
  virtual bool in_domain(const Vec& /*x*/) const { return true; }
};

class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(SpMat q, Vec c);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hessian_apply(const Vec& x, const Vec& v) const override;
  Vec hessian_diagonal(const Vec& x) const override;
  std::optional<SpMat> hessian_matrix(const Vec& x) const override;
  bool hessian_is_diagonal() const override { return diagonal_; }
  const SpMat& q() const { return q_; }
  const Vec& c() const { return c_; }

 private:
  SpMat q_;
  Vec c_;
  Vec diag_;
  bool diagonal_;
};

// min f(x) + offset  s.t.  Ax = b,  x_j >= 0 for nonneg[j], x_j free otherwise.
struct ConvexProgram {
  SpMat A;
  Vec b;
  std::vector<char> nonneg;
  std::shared_ptr<const Objective> objective;
  double objective_offset = 0.0;
  std::string family;

  Index n() const { return A.cols(); }
  Index m() const { return A.rows(); }
  void validate() const;  // throws InvalidArgument
  double objective_value(const Vec& x) const { return objective->value(x) + objective_offset; }
  linops::SparseOperator constraint_operator() const { return linops::SparseOperator(A); }
};

enum class LinearSolverKind { direct_augmented, pcg_normal, minres_augmented };
enum class HTildeChoice { u_squared, diag_h };
enum class Status { optimal, max_iterations, numerical_failure };

std::string to_string(LinearSolverKind kind);
std::string to_string(HTildeChoice choice);
std::string to_string(Status status);
LinearSolverKind parse_linear_solver(const std::string& name);
HTildeChoice parse_htilde(const std::string& name);

// Data handed to a normal-equations preconditioner factory.
struct NormalSystemView {
  std::vector<Index> kept;  // variables in the reduced system
  Index n_full = 0;
  const SpMat* a_kept = nullptr;  // m x |kept|
  Vec g_inv;                      // (∇²f + Ξ + ρI)⁻¹ on kept
  double delta = 0.0;
  double rho = 0.0;
};

using NormalPreconditionerFactory =
    std::function<std::unique_ptr<krylov::Preconditioner>(const NormalSystemView&)>;

struct DroppingOptions {
  bool enabled = false;
  double eps_drop = 1e-4;
  double xi = 1e2;
  double activation = 1e-2;  // scan only once mu <= activation * mu0
};

struct StartingPoint {
  Vec x, y, z;  // any may be empty to keep the default
};

struct IterationInfo {
  int iteration = 0;
  double primal_inf = 0, dual_inf = 0, mu = 0, rho = 0, delta = 0, sigma = 0;
  double alpha_primal = 0, alpha_dual = 0;
  Index inner_iterations = 0;
  Index dropped = 0;
  const Vec* x = nullptr;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 100;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  LinearSolverKind linear_solver = LinearSolverKind::direct_augmented;

  // pcg-normal
  NormalPreconditionerFactory normal_preconditioner;  // Jacobi if empty
  double pcg_tol_base = 1e-4;
  double pcg_tol_floor = 1e-8;
  Index pcg_maxit = 2000;
  // the tolerance above is further capped at pcg_forcing·μ/‖rhs‖ (0 disables)
  double pcg_forcing = 0.1;

  // minres-augmented
  HTildeChoice htilde = HTildeChoice::diag_h;
  double minres_tol = 1e-4;
  Index minres_maxit = 20;

  DroppingOptions dropping;

  double rho_floor = 1e-8;
  double delta_floor = 1e-8;
  double sigma_min = 0.05;
  double sigma_max = 0.95;
  double boundary_fraction = 0.995;
  double estimate_decrease = 0.95;

  std::optional<StartingPoint> start;
  std::function<void(const IterationInfo&)> callback;
};

struct DropRecord {
  Index index = 0;
  int iteration = 0;
};

struct DropAudit {
  std::vector<DropRecord> dropped;
  Vec z_dropped;                // multipliers recomputed at the final point
  std::vector<Index> violated;  // dropped indices with z <= 0
};

struct IpPmmState {
  Vec x, y, z;
  Vec zeta, eta;
  double mu = 1.0, rho = 1.0, delta = 1.0;
  double mu0 = 1.0;
  int k = 0;
  std::vector<char> dropped;  // per variable
  std::vector<DropRecord> drop_log;
  // residual norms recorded at the last (zeta, eta) update
  double primal_ref = std::numeric_limits<double>::infinity();
  double dual_ref = std::numeric_limits<double>::infinity();

  // indices in I \ V
  std::vector<Index> active_nonneg(const ConvexProgram& p) const;
  // indices in F ∪ (I \ V)
  std::vector<Index> kept(const ConvexProgram& p) const;
};

IpPmmState initial_state(const ConvexProgram& program, const SolverOptions& options);

// Average complementarity over I \ V; 0 when that set is empty.
double complementarity(const IpPmmState& state, const ConvexProgram& program);

struct Residuals {
  double primal_abs = 0, dual_abs = 0;
  double primal_rel = 0, dual_rel = 0;
  double mu = 0;
};

// Residuals of the current point on the working (non-dropped) variables.
Residuals residuals(const IpPmmState& state, const ConvexProgram& program);

struct SolveReport {
  Status status = Status::max_iterations;
  int iterations = 0;
  double primal_inf = 0, dual_inf = 0, mu = 0;
  std::vector<double> primal_history, dual_history, mu_history;
  Index inner_iterations = 0;
  std::vector<Index> inner_history;
  Index inexact_directions = 0;
  double time_seconds = 0;
  double time_assembly = 0, time_factor = 0, time_solve = 0, time_dropping = 0;
  double objective = 0;
  Index initial_dimension = 0;  // size of the first Newton system
  Index final_dimension = 0;    // size of the last Newton system
  DropAudit drop_audit;
  std::string message;
  std::string linear_solver;

  std::string to_json(int indent = 2) const;
};

struct SolveResult {
  Vec x, y, z;
  SolveReport report;
};

// Right-hand side of the reduced augmented system for centering sigma and
// complementarity correction corr (length n, zero outside I \ V; may be empty).
struct NewtonRhs {
  Vec r1;  // on kept variables
  Vec r2;
  Vec t;   // sigma*mu*e - corr, full length (used to recover dz)
};
NewtonRhs newton_rhs(const IpPmmState& state, const ConvexProgram& program, const Vec& grad,
                     double sigma, const Vec& corr);

struct AugmentedSystem {
  std::vector<Index> kept;
  std::shared_ptr<linops::LinearOperator> matrix;  // [[-H, Aᵀ], [A, δI]]
  std::optional<SpMat> explicit_matrix;
  Vec h_diag_part;  // Ξ + ρ on kept
  Vec rhs;
};

AugmentedSystem assemble_augmented_system(const IpPmmState& state, const ConvexProgram& program,
                                          double sigma, const Vec& corr = Vec());

struct NormalEquations {
  std::vector<Index> kept;
  SpMat a_kept;
  Vec g_inv;
  std::shared_ptr<linops::LinearOperator> matrix;  // A G⁻¹Aᵀ + δI
  Vec rhs;
  Vec r1;
};

// Throws UnsupportedStructure unless the Hessian is diagonal.
NormalEquations assemble_normal_equations(const IpPmmState& state, const ConvexProgram& program,
                                          double sigma, const Vec& corr = Vec());

struct Direction {
  Vec dx, dy, dz;  // full length; dz_F = 0 and zero on dropped variables
  double sigma = 0.0;
  bool inexact = false;
  Index inner_iterations = 0;
};

// Solves the reduced augmented system at a fixed state for several rhs.
class NewtonSolver {
 public:
  virtual ~NewtonSolver() = default;
  virtual void prepare(const IpPmmState& state, const ConvexProgram& program) = 0;
  // Returns dx on kept variables and dy.
  virtual void solve(const Vec& r1, const Vec& r2, Vec& dx_kept, Vec& dy, Index& inner,
                     bool& inexact) = 0;
  virtual Index dimension() const = 0;
  double factor_seconds = 0, solve_seconds = 0, assembly_seconds = 0;
};

std::unique_ptr<NewtonSolver> make_newton_solver(const SolverOptions& options);

Direction predictor_corrector_step(const IpPmmState& state, const ConvexProgram& program,
                                   NewtonSolver& solver, const SolverOptions& options);

// Fraction-to-the-boundary on I \ V.
std::pair<double, double> step_lengths(const IpPmmState& state, const ConvexProgram& program,
                                       const Direction& d, double fraction = 0.995);

// Updates mu, rho, delta and possibly (zeta, eta) after a step. `mu_old` is
// the complementarity before the step.
void update_penalties_and_estimates(IpPmmState& state, const ConvexProgram& program,
                                    double mu_old, const SolverOptions& options);

Status check_termination(const Residuals& r, double tol);

SolveResult solve(const ConvexProgram& program, const SolverOptions& options = {});

}  // namespace pmm::ippmm
