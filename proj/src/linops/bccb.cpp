#include "pmm/linops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace pmm::linops {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

void splat(Mat& psf, double r, double c, double w) {
  double fr = std::floor(r), fc = std::floor(c);
  double ar = r - fr, ac = c - fc;
  Index r0 = Index(fr), c0 = Index(fc);
  const Index n1 = psf.rows(), n2 = psf.cols();
  psf(wrap(r0, n1), wrap(c0, n2)) += w * (1 - ar) * (1 - ac);
  psf(wrap(r0 + 1, n1), wrap(c0, n2)) += w * ar * (1 - ac);
  psf(wrap(r0, n1), wrap(c0 + 1, n2)) += w * (1 - ar) * ac;
  psf(wrap(r0 + 1, n1), wrap(c0 + 1, n2)) += w * ar * ac;
}

}  // namespace

struct BccbOperator::FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

BlurKernel BlurKernel::gaussian(Index n1, Index n2, double sigma) {
  BlurKernel k;
  k.family = BlurFamily::gaussian;
  k.sigma = sigma;
  k.n1 = n1;
  k.n2 = n2;
  return k;
}

BlurKernel BlurKernel::motion(Index n1, Index n2, double length, double angle_deg) {
  BlurKernel k;
  k.family = BlurFamily::motion;
  k.length = length;
  k.angle = angle_deg;
  k.n1 = n1;
  k.n2 = n2;
  return k;
}

BlurKernel BlurKernel::out_of_focus(Index n1, Index n2, double radius) {
  BlurKernel k;
  k.family = BlurFamily::out_of_focus;
  k.radius = radius;
  k.n1 = n1;
  k.n2 = n2;
  return k;
}

BlurKernel BlurKernel::identity(Index n1, Index n2) {
  BlurKernel k;
  k.family = BlurFamily::identity;
  k.n1 = n1;
  k.n2 = n2;
  return k;
}

Mat BlurKernel::psf() const {
  if (n1 < 1 || n2 < 1) throw InvalidArgument("blur kernel: grid must be non-empty");
  Mat p = Mat::Zero(n1, n2);
  switch (family) {
    case BlurFamily::identity:
      p(0, 0) = 1.0;
      break;
    case BlurFamily::gaussian: {
      if (!(sigma > 0)) throw InvalidArgument("gaussian blur: sigma must be positive");
      Index h = Index(std::ceil(4 * sigma));
      for (Index i = -h; i <= h; ++i)
        for (Index j = -h; j <= h; ++j) {
          p(wrap(i, n1), wrap(j, n2)) += std::exp(-double(i * i + j * j) / (2 * sigma * sigma));
        }
      break;
    }
    case BlurFamily::motion: {
      if (!(length > 0)) throw InvalidArgument("motion blur: length must be positive");
      double th = angle * std::numbers::pi / 180.0;
      // dense sampling along the segment, bilinear weights onto pixels
      Index samples = std::max<Index>(2, Index(std::ceil(length * 20)));
      for (Index k = 0; k < samples; ++k) {
        double t = -length / 2 + length * (k + 0.5) / double(samples);
        splat(p, -t * std::sin(th), t * std::cos(th), 1.0);
      }
      break;
    }
    case BlurFamily::out_of_focus: {
      if (!(radius > 0)) throw InvalidArgument("out-of-focus blur: radius must be positive");
      Index h = Index(std::ceil(radius));
      for (Index i = -h; i <= h; ++i)
        for (Index j = -h; j <= h; ++j)
          if (double(i * i + j * j) <= radius * radius) p(wrap(i, n1), wrap(j, n2)) += 1.0;
      break;
    }
  }
  p /= p.sum();
  return p;
}

BlurFamily parse_blur_family(const std::string& name) {
  if (name == "gaussian" || name == "gb") return BlurFamily::gaussian;
  if (name == "motion" || name == "mb") return BlurFamily::motion;
  if (name == "oof" || name == "out-of-focus" || name == "of") return BlurFamily::out_of_focus;
  if (name == "identity" || name == "none") return BlurFamily::identity;
  throw InvalidArgument("unknown blur family '" + name + "'");
}

std::string to_string(BlurFamily family) {
  switch (family) {
    case BlurFamily::gaussian: return "gaussian";
    case BlurFamily::motion: return "motion";
    case BlurFamily::out_of_focus: return "oof";
    case BlurFamily::identity: return "identity";
  }
  return "unknown";
}

BccbOperator::BccbOperator(const BlurKernel& kernel) : BccbOperator(kernel.psf()) {}

BccbOperator::BccbOperator(const Mat& wrapped_psf)
    : n1_(wrapped_psf.rows()), n2_(wrapped_psf.cols()), psf_(wrapped_psf) {
  if (n1_ < 1 || n2_ < 1) throw InvalidArgument("bccb operator: empty psf");
  const Index nc = n2_ / 2 + 1;
  double* in = fftw_alloc_real(n1_ * n2_);
  fftw_complex* freq = fftw_alloc_complex(n1_ * nc);
  plans_ = std::make_shared<FftPlans>();
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_2d(int(n1_), int(n2_), in, freq, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_2d(int(n1_), int(n2_), freq, in, FFTW_ESTIMATE);
  }
  for (Index r = 0; r < n1_; ++r)
    for (Index c = 0; c < n2_; ++c) in[r * n2_ + c] = psf_(r, c);
  fftw_execute_dft_r2c(plans_->forward, in, freq);
  eig_.resize(n1_ * nc);
  for (Index k = 0; k < n1_ * nc; ++k) eig_[k] = {freq[k][0], freq[k][1]};
  fftw_free(in);
  fftw_free(freq);
}

void BccbOperator::spectral_multiply(const Vec& v, Vec& out, bool conjugate) const {
  const Index n = n1_ * n2_;
  const Index nc = n2_ / 2 + 1;
  double* buf = fftw_alloc_real(n);
  fftw_complex* freq = fftw_alloc_complex(n1_ * nc);
  std::copy(v.data(), v.data() + n, buf);
  fftw_execute_dft_r2c(plans_->forward, buf, freq);
  for (Index k = 0; k < n1_ * nc; ++k) {
    std::complex<double> e = conjugate ? std::conj(eig_[k]) : eig_[k];
    std::complex<double> s(freq[k][0], freq[k][1]);
    s *= e;
    freq[k][0] = s.real();
    freq[k][1] = s.imag();
  }
  // c2r keeps only the real part by construction
  fftw_execute_dft_c2r(plans_->backward, freq, buf);
  out.resize(n);
  const double scale = 1.0 / double(n);
  for (Index i = 0; i < n; ++i) out[i] = buf[i] * scale;
  fftw_free(buf);
  fftw_free(freq);
}

void BccbOperator::apply_impl(const Vec& v, Vec& out) const { spectral_multiply(v, out, false); }

void BccbOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  spectral_multiply(u, out, true);
}

std::shared_ptr<BccbOperator> BccbOperator::squared_entries() const {
  return std::make_shared<BccbOperator>(Mat(psf_.array().square()));
}

}  // namespace pmm::linops
