#pragma once

#include "pmm/linops.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmm::krylov {

// Dense LLᵀ. Throws NotPositiveDefinite naming the failing pivot.
class DenseCholesky {
 public:
  DenseCholesky() = default;
  explicit DenseCholesky(const Mat& m) { factorize(m); }
  void factorize(const Mat& m);
  Vec solve(const Vec& rhs) const;
  Mat solve(const Mat& rhs) const;
  const Mat& factor() const { return l_; }
  Index size() const { return l_.rows(); }

 private:
  Mat l_;  // lower triangle
};

// Sparse LDLᵀ with a fill-reducing (AMD) ordering. The symbolic analysis is
// cached and reused as long as the sparsity pattern does not change.
class SparseLdl {
 public:
  enum class Mode {
    positive_definite,  // every pivot must be > 0
    quasi_definite      // pivot signs must follow the supplied sign vector
  };

  // Only the upper or lower triangle of `m` is read when it is symmetric
  // storage; a full symmetric matrix is also accepted.
  void analyze(const SpMat& m);
  void factorize(const SpMat& m);
  void factorize(const SpMat& m, Mode mode, const std::vector<int>& signs = {});

  Vec solve(const Vec& rhs) const;

  Index size() const { return n_; }
  long analyses() const { return analyses_; }
  long factorizations() const { return factorizations_; }
  // Pivots perturbed away from zero in quasi-definite mode.
  long perturbed_pivots() const { return perturbed_; }
  Index factor_nonzeros() const { return Index(li_.size()); }
  const Vec& pivots() const { return d_; }  // in permuted order
  const std::vector<int>& permutation() const { return perm_; }  // new -> old

 private:
  bool same_pattern(const SpMat& m) const;
  void permuted_upper(const SpMat& m, std::vector<int>& cp, std::vector<int>& ci,
                      std::vector<double>& cx) const;

  Index n_ = 0;
  std::vector<int> perm_, pinv_;
  std::vector<int> parent_, lnz_count_, lp_;
  std::vector<int> li_;
  std::vector<double> lx_;
  Vec d_;
  // pattern of the analyzed matrix, for reuse checks
  std::vector<int> pat_outer_, pat_inner_;
  long analyses_ = 0, factorizations_ = 0, perturbed_ = 0;
};

Vec cholesky_solve(const Mat& m, const Vec& rhs);
Vec cholesky_solve(const SpMat& m, const Vec& rhs);

enum class PreconditionerKind { identity, jacobi, cholesky, fmri_block_normal, aug_block_diagonal };
std::string to_string(PreconditionerKind kind);

struct PreconditionerInfo {
  std::vector<std::string> factor_kinds;  // e.g. "dense-cholesky", "sparse-ldl"
  double build_seconds = 0.0;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual PreconditionerKind kind() const = 0;
  virtual Index size() const = 0;
  virtual Vec apply_inverse(const Vec& r) const = 0;
  const PreconditionerInfo& info() const { return info_; }

 protected:
  PreconditionerInfo info_;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  explicit IdentityPreconditioner(Index n) : n_(n) {}
  PreconditionerKind kind() const override { return PreconditionerKind::identity; }
  Index size() const override { return n_; }
  Vec apply_inverse(const Vec& r) const override { return r; }

 private:
  Index n_;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(Vec diagonal);
  PreconditionerKind kind() const override { return PreconditionerKind::jacobi; }
  Index size() const override { return inv_.size(); }
  Vec apply_inverse(const Vec& r) const override;

 private:
  Vec inv_;
};

// Exact inverse of an explicit SPD matrix.
class CholeskyPreconditioner final : public Preconditioner {
 public:
  explicit CholeskyPreconditioner(const Mat& m);
  PreconditionerKind kind() const override { return PreconditionerKind::cholesky; }
  Index size() const override { return chol_.size(); }
  Vec apply_inverse(const Vec& r) const override { return chol_.solve(r); }

 private:
  DenseCholesky chol_;
};

struct KrylovOutcome {
  Vec solution;
  Index iterations = 0;
  double final_relative_residual = 0.0;  // recomputed from the true residual
  bool converged = false;
  std::optional<std::string> breakdown_reason;
  std::vector<double> residual_history;  // relative preconditioned residual per iteration
  std::vector<Vec> iterates;             // filled only when record_iterates is set
};

struct KrylovOptions {
  double tol = 1e-8;
  Index maxit = 1000;
  bool record_iterates = false;
};

// Stopping rule: sqrt(rᵀP⁻¹r) / sqrt(bᵀP⁻¹b) <= tol.
KrylovOutcome pcg(const linops::LinearOperator& m, const Vec& rhs, const Preconditioner& p,
                  const KrylovOptions& opts);

// Preconditioned MINRES; the residual measured is the P⁻¹-norm residual.
KrylovOutcome minres(const linops::LinearOperator& m, const Vec& rhs, const Preconditioner& p,
                     const KrylovOptions& opts);

}  // namespace pmm::krylov
