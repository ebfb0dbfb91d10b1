#include "pmm/precond.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pmm::precond {

SpectralReport spectral_check(const Mat& m, const krylov::Preconditioner& p, double unit_tol) {
  const Index n = m.rows();
  if (m.cols() != n || p.size() != n) throw InvalidArgument("spectral check: size mismatch");
  if (n > 2000) throw InvalidArgument("spectral check: dimension over the dense budget (2000)");

  Mat pinv(n, n);
  Vec e = Vec::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    pinv.col(j) = p.apply_inverse(e);
    e[j] = 0.0;
  }
  pinv = 0.5 * (pinv + pinv.transpose()).eval();
  Eigen::LLT<Mat> llt(pinv);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(0, 0.0);
  Mat r = llt.matrixL();
  // P⁻¹M is similar to Rᵀ M R when P⁻¹ = R Rᵀ
  Mat b = r.transpose() * m * r;
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(b, Eigen::EigenvaluesOnly);

  SpectralReport rep;
  rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  for (double l : rep.eigenvalues)
    if (std::abs(l - 1.0) <= unit_tol) ++rep.unit_count;
  return rep;
}

double normal_bound_chi(const Mat& a, double rho, double delta) {
  Eigen::JacobiSVD<Mat> svd(a);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return delta * rho / (smax * smax + rho * delta);
}

std::pair<double, double> hhat_extremes(const Mat& h, const Vec& htilde) {
  Vec s = htilde.cwiseSqrt().cwiseInverse();
  Mat hh = s.asDiagonal() * h * s.asDiagonal();
  hh = 0.5 * (hh + hh.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(hh, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

bool check_normal_bounds(SpectralReport& rep, double chi, Index expected_unit, double tol) {
  rep.chi = chi;
  rep.expected_unit_count = expected_unit;
  bool ok = rep.unit_count >= expected_unit;
  for (double l : rep.eigenvalues) ok = ok && l > chi - tol && l < 2.0 + tol;
  rep.intervals_hold = ok;
  return ok;
}

bool check_augmented_bounds(SpectralReport& rep, double alpha_h, double beta_h, double tol) {
  rep.alpha_h = alpha_h;
  rep.beta_h = beta_h;
  rep.kappa_h = beta_h / alpha_h;
  bool ok = true;
  for (double l : rep.eigenvalues) {
    bool neg = l >= -beta_h - 1.0 - tol && l <= -alpha_h + tol;
    bool pos = l >= 1.0 / (1.0 + beta_h) - tol && l <= 1.0 + tol;
    ok = ok && (neg || pos);
  }
  rep.intervals_hold = ok;
  return ok;
}

std::string SpectralReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::json j;
  j["eigenvalues"] = eigenvalues;
  j["unit_count"] = unit_count;
  j["expected_unit_count"] = expected_unit_count;
  j["chi"] = num(chi);
  j["alpha_h"] = num(alpha_h);
  j["beta_h"] = num(beta_h);
  j["kappa_h"] = num(kappa_h);
  j["intervals_hold"] = intervals_hold;
  if (!eigenvalues.empty()) {
    j["min_eigenvalue"] = eigenvalues.front();
    j["max_eigenvalue"] = eigenvalues.back();
  }
  return j.dump(2);
}

}  // namespace pmm::precond
