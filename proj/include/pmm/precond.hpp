#pragma once

#include "pmm/krylov.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace pmm::precond {

// Blocks of the fused-lasso least-squares normal matrix
//   A G⁻¹ Aᵀ + δI = [[M1, M2], [M2ᵀ, M3]]
// for A = [[-I, D, -D, 0, 0], [0, L, -L, -I, I]] and G⁻¹ = diag(W) laid out
// as [u (s); w+ (q); w- (q); d+ (l); d- (l)].
struct FmriBlocks {
  Mat m1;    // s x s, diag(W_u) + D(W₊+W₋)Dᵀ + δI
  Mat m2;    // s x l, D(W₊+W₋)Lᵀ
  SpMat m3;  // l x l, L(W₊+W₋)Lᵀ + diag(W_d₊+W_d₋) + δI
};

FmriBlocks fmri_normal_blocks(const Vec& w_full, double delta, const Mat& d, const SpMat& l);

class FmriBlockPreconditioner final : public krylov::Preconditioner {
 public:
  // `m3_factor` may carry a previous factorization so the ordering is reused.
  FmriBlockPreconditioner(const Vec& w_full, double delta, const Mat& d, const SpMat& l,
                          std::shared_ptr<krylov::SparseLdl> m3_factor = nullptr);
  krylov::PreconditionerKind kind() const override {
    return krylov::PreconditionerKind::fmri_block_normal;
  }
  Index size() const override { return s_ + l_; }
  Vec apply_inverse(const Vec& r) const override;

 private:
  Index s_, l_;
  krylov::DenseCholesky m1_;
  std::shared_ptr<krylov::SparseLdl> m3_;
};

// P = blockdiag(H̃, A H̃⁻¹ Aᵀ + δI), H̃ diagonal and positive.
class AugBlockDiagPreconditioner final : public krylov::Preconditioner {
 public:
  AugBlockDiagPreconditioner(const SpMat& a, const Vec& htilde, double delta,
                             std::shared_ptr<krylov::SparseLdl> schur_factor = nullptr);
  krylov::PreconditionerKind kind() const override {
    return krylov::PreconditionerKind::aug_block_diagonal;
  }
  Index size() const override { return htilde_.size() + m_; }
  Vec apply_inverse(const Vec& r) const override;
  const Vec& htilde() const { return htilde_; }

 private:
  Vec htilde_;
  Index m_;
  std::shared_ptr<krylov::SparseLdl> schur_;
};

// Sparse A diag(h)⁻¹ Aᵀ + δI.
SpMat weighted_gram(const SpMat& a, const Vec& h_inv, double delta);

struct SpectralReport {
  std::vector<double> eigenvalues;  // ascending
  Index unit_count = 0;             // within unit_tol of 1
  double chi = std::numeric_limits<double>::quiet_NaN();
  double alpha_h = std::numeric_limits<double>::quiet_NaN();
  double beta_h = std::numeric_limits<double>::quiet_NaN();
  double kappa_h = std::numeric_limits<double>::quiet_NaN();
  // filled by the bound checks below
  Index expected_unit_count = 0;
  bool intervals_hold = false;

  std::string to_json() const;
};

// Eigenvalues of P⁻¹M by dense symmetric reduction. Refuses dimension > 2000.
SpectralReport spectral_check(const Mat& m, const krylov::Preconditioner& p, double unit_tol = 1e-8);

// δρ / (σ²max(A) + ρδ).
double normal_bound_chi(const Mat& a, double rho, double delta);

// Extreme eigenvalues of H̃^{-1/2} H H̃^{-1/2}.
std::pair<double, double> hhat_extremes(const Mat& h, const Vec& htilde);

// Interval checks; they also record the bound data in the report.
bool check_normal_bounds(SpectralReport& rep, double chi, Index expected_unit, double tol = 1e-10);
bool check_augmented_bounds(SpectralReport& rep, double alpha_h, double beta_h, double tol = 1e-8);

}  // namespace pmm::precond
