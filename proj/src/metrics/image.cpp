#include "pmm/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace pmm::metrics {

double rmse(const Vec& w, const Vec& ref) {
  if (w.size() != ref.size() || w.size() == 0) throw InvalidArgument("rmse: image sizes differ");
  return (w - ref).norm() / std::sqrt(double(w.size()));
}

double psnr(const Vec& w, const Vec& ref) {
  double e = rmse(w, ref);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  double peak = ref.maxCoeff();
  if (!(peak > 0)) throw UndefinedMetric("psnr: reference peak is not positive");
  return 20.0 * std::log10(peak / e);
}

namespace {

constexpr int kWin = 11;

std::array<double, kWin> gaussian_taps() {
  std::array<double, kWin> g{};
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - kWin / 2;
    g[std::size_t(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += g[std::size_t(i)];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable Gaussian filter over the valid region.
Mat filter_valid(const Mat& img, const std::array<double, kWin>& g) {
  const Index r = img.rows() - kWin + 1, c = img.cols() - kWin + 1;
  Mat tmp = Mat::Zero(r, img.cols());
  for (Index i = 0; i < r; ++i)
    for (int k = 0; k < kWin; ++k) tmp.row(i) += g[std::size_t(k)] * img.row(i + k);
  Mat out = Mat::Zero(r, c);
  for (Index j = 0; j < c; ++j)
    for (int k = 0; k < kWin; ++k) out.col(j) += g[std::size_t(k)] * tmp.col(j + k);
  return out;
}

Mat as_image(const Vec& v, Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

}  // namespace

double mssim(const Vec& a, const Vec& b, Index rows, Index cols, double dynamic_range) {
  if (a.size() != rows * cols || b.size() != rows * cols) throw InvalidArgument("mssim: image sizes differ");
  if (rows < kWin || cols < kWin) throw InvalidArgument("mssim: image smaller than the 11x11 window");
  if (!(dynamic_range > 0)) throw InvalidArgument("mssim: dynamic range must be positive");
  const auto g = gaussian_taps();
  const double c1 = std::pow(0.01 * dynamic_range, 2), c2 = std::pow(0.03 * dynamic_range, 2);
  Mat x = as_image(a, rows, cols), y = as_image(b, rows, cols);
  Mat mx = filter_valid(x, g), my = filter_valid(y, g);
  Mat sxx = filter_valid(x.cwiseProduct(x), g) - mx.cwiseProduct(mx);
  Mat syy = filter_valid(y.cwiseProduct(y), g) - my.cwiseProduct(my);
  Mat sxy = filter_valid(x.cwiseProduct(y), g) - mx.cwiseProduct(my);
  auto num = ((2.0 * mx.cwiseProduct(my)).array() + c1) * ((2.0 * sxy).array() + c2);
  auto den = (mx.cwiseAbs2() + my.cwiseAbs2()).array() + c1;
  auto den2 = (sxx + syy).array() + c2;
  return (num / (den * den2)).mean();
}

ImageScores image_scores(const Vec& w, const Vec& ref, Index rows, Index cols, double dynamic_range) {
  ImageScores s;
  s.rmse = rmse(w, ref);
  s.psnr = psnr(w, ref);
  s.mssim = mssim(w, ref, rows, cols, dynamic_range);
  return s;
}

}  // namespace pmm::metrics
