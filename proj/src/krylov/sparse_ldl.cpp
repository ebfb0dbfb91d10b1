#include "pmm/krylov.hpp"

#include <Eigen/OrderingMethods>

#include <cmath>

namespace pmm::krylov {

namespace {

SpMat full_pattern(const SpMat& m) {
  // symmetric pattern of A + Aᵀ; values irrelevant
  SpMat t = m.transpose();
  SpMat f = m.cwiseAbs() + SpMat(t.cwiseAbs());
  f.makeCompressed();
  return f;
}

}  // namespace

bool SparseLdl::same_pattern(const SpMat& m) const {
  if (m.rows() != n_ || m.cols() != n_ || n_ == 0) return false;
  if (Index(pat_inner_.size()) != m.nonZeros()) return false;
  SpMat c = m;
  c.makeCompressed();
  for (Index j = 0; j <= n_; ++j)
    if (c.outerIndexPtr()[j] != pat_outer_[j]) return false;
  for (Index k = 0; k < c.nonZeros(); ++k)
    if (c.innerIndexPtr()[k] != pat_inner_[k]) return false;
  return true;
}

void SparseLdl::permuted_upper(const SpMat& m, std::vector<int>& cp, std::vector<int>& ci,
                               std::vector<double>& cx) const {
  // Upper triangle of P A Pᵀ in CSC. Entries stored on both sides of the
  // diagonal are taken from one side only, so symmetric-full and
  // triangular storage both work.
  const int n = int(n_);
  std::vector<int> count(n + 1, 0);
  bool has_lower = false, has_upper = false;
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it) {
      if (it.row() > it.col()) has_lower = true;
      if (it.row() < it.col()) has_upper = true;
    }
  const bool use_upper = has_upper || !has_lower;
  auto keep = [&](Index i, Index j) { return use_upper ? i <= j : i >= j; };
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it) {
      if (!keep(it.row(), it.col())) continue;
      int pi = pinv_[it.row()], pj = pinv_[it.col()];
      count[std::max(pi, pj)]++;
    }
  cp.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) cp[j + 1] = cp[j] + count[j];
  std::vector<int> next(cp.begin(), cp.end() - 1);
  ci.resize(cp[n]);
  cx.resize(cp[n]);
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it) {
      if (!keep(it.row(), it.col())) continue;
      int pi = pinv_[it.row()], pj = pinv_[it.col()];
      int col = std::max(pi, pj), row = std::min(pi, pj);
      int q = next[col]++;
      ci[q] = row;
      cx[q] = it.value();
    }
}

void SparseLdl::analyze(const SpMat& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("ldl: matrix must be square");
  n_ = m.rows();
  const int n = int(n_);

  SpMat pattern = full_pattern(m);
  Eigen::AMDOrdering<int> amd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
  amd(pattern, pinv);
  perm_.assign(pinv.indices().data(), pinv.indices().data() + n);
  pinv_.assign(n, 0);
  for (int k = 0; k < n; ++k) pinv_[perm_[k]] = k;

  std::vector<int> cp, ci;
  std::vector<double> cx;
  permuted_upper(m, cp, ci, cx);

  // elimination tree and column counts of L
  parent_.assign(n, -1);
  lnz_count_.assign(n, 0);
  std::vector<int> flag(n, -1);
  for (int k = 0; k < n; ++k) {
    flag[k] = k;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      if (i >= k) continue;
      for (; flag[i] != k; i = parent_[i]) {
        if (parent_[i] == -1) parent_[i] = k;
        lnz_count_[i]++;
        flag[i] = k;
      }
    }
  }
  lp_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) lp_[k + 1] = lp_[k] + lnz_count_[k];
  li_.assign(lp_[n], 0);
  lx_.assign(lp_[n], 0.0);

  SpMat c = m;
  c.makeCompressed();
  pat_outer_.assign(c.outerIndexPtr(), c.outerIndexPtr() + n + 1);
  pat_inner_.assign(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros());
  ++analyses_;
}

void SparseLdl::factorize(const SpMat& m) { factorize(m, Mode::positive_definite); }

void SparseLdl::factorize(const SpMat& m, Mode mode, const std::vector<int>& signs) {
  if (!same_pattern(m)) analyze(m);
  const int n = int(n_);
  if (mode == Mode::quasi_definite && Index(signs.size()) != n_)
    throw InvalidArgument("ldl: quasi-definite mode needs one sign per row");

  std::vector<int> cp, ci;
  std::vector<double> cx;
  permuted_upper(m, cp, ci, cx);

  d_.resize(n);
  std::vector<double> y(n, 0.0);
  std::vector<int> pattern(n), flag(n), lnz(n, 0);
  double max_diag = 0.0;
  for (int k = 0; k < n; ++k)
    for (int p = cp[k]; p < cp[k + 1]; ++p)
      if (ci[p] == k) max_diag = std::max(max_diag, std::abs(cx[p]));
  const double tiny = 1e-14 * std::max(1.0, max_diag);

  for (int k = 0; k < n; ++k) {
    y[k] = 0.0;
    int top = n;
    flag[k] = k;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      y[i] += cx[p];
      int len = 0;
      for (; flag[i] != k; i = parent_[i]) {
        pattern[len++] = i;
        flag[i] = k;
      }
      while (len > 0) pattern[--top] = pattern[--len];
    }
    double dk = y[k];
    y[k] = 0.0;
    for (; top < n; ++top) {
      int i = pattern[top];
      double yi = y[i];
      y[i] = 0.0;
      int p2 = lp_[i] + lnz[i];
      for (int p = lp_[i]; p < p2; ++p) y[li_[p]] -= lx_[p] * yi;
      double lki = yi / d_[i];
      dk -= lki * yi;
      li_[p2] = k;
      lx_[p2] = lki;
      ++lnz[i];
    }
    const int orig = perm_[k];
    if (mode == Mode::positive_definite) {
      if (!(dk > 0.0)) throw NotPositiveDefinite(orig, dk);
    } else {
      const int sgn = signs[orig] >= 0 ? 1 : -1;
      if (!(sgn * dk > tiny)) {
        if (!std::isfinite(dk)) throw NotPositiveDefinite(orig, dk);
        dk = sgn * tiny;
        ++perturbed_;
      }
    }
    d_[k] = dk;
  }
  ++factorizations_;
}

Vec SparseLdl::solve(const Vec& rhs) const {
  if (rhs.size() != n_) throw InvalidArgument("ldl solve: size mismatch");
  const int n = int(n_);
  Vec x(n);
  for (int k = 0; k < n; ++k) x[k] = rhs[perm_[k]];
  for (int j = 0; j < n; ++j)
    for (int p = lp_[j]; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * x[j];
  for (int j = 0; j < n; ++j) x[j] /= d_[j];
  for (int j = n - 1; j >= 0; --j)
    for (int p = lp_[j]; p < lp_[j + 1]; ++p) x[j] -= lx_[p] * x[li_[p]];
  Vec out(n);
  for (int k = 0; k < n; ++k) out[perm_[k]] = x[k];
  return out;
}

}  // namespace pmm::krylov
