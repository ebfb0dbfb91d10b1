#include "doctest.h"

#include "pmm/metrics.hpp"
#include "test_util.hpp"

#include <cmath>
#include <limits>

using namespace pmm;
using namespace pmm::metrics;

namespace {

SpMat sparse_identity(Index n) {
  SpMat i(n, n);
  i.setIdentity();
  return i;
}

// SSIM with an explicit 2D window, one window position at a time.
double ssim_oracle(const Mat& x, const Mat& y, double r) {
  Mat w(11, 11);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) w(i, j) = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
  w /= w.sum();
  const double c1 = (0.01 * r) * (0.01 * r), c2 = (0.03 * r) * (0.03 * r);
  double total = 0.0;
  Index count = 0;
  for (Index i = 0; i + 11 <= x.rows(); ++i)
    for (Index j = 0; j + 11 <= x.cols(); ++j) {
      Mat px = x.block(i, j, 11, 11), py = y.block(i, j, 11, 11);
      double mx = w.cwiseProduct(px).sum(), my = w.cwiseProduct(py).sum();
      double vx = w.cwiseProduct((px.array() - mx).square().matrix()).sum();
      double vy = w.cwiseProduct((py.array() - my).square().matrix()).sum();
      double cxy = w.cwiseProduct(((px.array() - mx) * (py.array() - my)).matrix()).sum();
      total += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return total / double(count);
}

Vec flatten(const Mat& m) {
  Vec v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

}  // namespace

TEST_CASE("portfolio ratios") {
  std::mt19937_64 rng(1);
  const Index s = 4, m = 3;
  Vec w = testutil::randu(rng, s * m, 0.05, 0.5);
  Mat cd = testutil::rand_spd(rng, s * m, 0.1);
  SpMat c = cd.sparseView();
  auto same = portfolio_ratios(w, w, c, s);
  CHECK(same.ratio == 1.0);
  CHECK(same.ratio_h == 1.0);
  CHECK(same.ratio_t == 1.0);

  // scale invariance in C
  Vec w2 = testutil::randu(rng, s * m, -0.2, 0.5);
  auto r1 = portfolio_ratios(w2, w, c, s);
  auto r2 = portfolio_ratios(w2, w, SpMat(3.7 * c), s);
  CHECK(r1.ratio == doctest::Approx(r2.ratio).epsilon(1e-14));
  CHECK(r1.ratio == doctest::Approx(w.dot(cd * w) / w2.dot(cd * w2)).epsilon(1e-12));

  // single asset, two periods, no change
  Vec flat = Vec::Constant(2, 0.3);
  CHECK(transaction_count(flat, 1, 1e-8) == 0);
  Vec moved(2);
  moved << 0.3, 0.3 + 2e-8;
  CHECK(transaction_count(moved, 1, 1e-8) == 1);

  CHECK(active_positions(Vec::Zero(5)) == 0);
  Vec mixed(4);
  mixed << 1, -1, 0, 2;
  CHECK(active_positions(mixed) == 2);

  CHECK_THROWS_AS(portfolio_ratios(Vec::Zero(s * m), w, c, s), UndefinedMetric);
  CHECK_THROWS_AS(transaction_count(w, 5, 1e-4), InvalidArgument);
}

TEST_CASE("ratio_h of 480 against 72 active positions") {
  const Index s = 48, m = 10;
  Vec naive = Vec::Constant(s * m, 1.0 / double(s));
  Vec opt = Vec::Zero(s * m);
  // 72 positive positions spread over the periods, with transactions
  for (Index k = 0; k < 72; ++k) opt[(k % m) * s + k / m] = 0.1 + 0.001 * double(k);
  SpMat c = sparse_identity(s * m);
  auto r = portfolio_ratios(opt, naive, c, s);
  CHECK(r.active_naive == 480);
  CHECK(r.active_opt == 72);
  CHECK(r.ratio_h == doctest::Approx(480.0 / 72.0));
  CHECK(std::round(r.ratio_h * 100.0) / 100.0 == doctest::Approx(6.67));
}

TEST_CASE("threshold solution") {
  Vec w(3);
  w << 1, 1e-6, 1e-6;
  Vec t = threshold_solution(w, 1e-4);
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 0.0);
  CHECK(t[2] == 0.0);
  CHECK((threshold_solution(w, 0.0) - w).norm() == 0.0);

  Vec z(5);
  z << 0, 3, 0, 0, 0;
  CHECK((threshold_solution(z) - z).norm() == 0.0);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Index n = testutil::rand_int(rng, 1, 30);
    Vec v = testutil::randn(rng, n);
    for (Index i = 0; i < n; ++i) v[i] *= std::pow(10.0, double(testutil::rand_int(rng, -8, 0)));
    double frac = testutil::randu(rng, 1, 0.0, 0.2)[0];
    Vec tv = threshold_solution(v, frac);
    CHECK((v - tv).lpNorm<1>() <= frac * v.lpNorm<1>() * (1 + 1e-12));
    // every removed entry is no larger than every kept entry
    double max_removed = 0.0, min_kept = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (tv[i] == 0.0 && v[i] != 0.0) max_removed = std::max(max_removed, std::abs(v[i]));
      if (tv[i] != 0.0) min_kept = std::min(min_kept, std::abs(v[i]));
    }
    CHECK(max_removed <= min_kept);
  }
}

TEST_CASE("corrected overlap and density") {
  const Index q = 100;
  Vec a = Vec::Zero(q);
  for (Index i = 0; i < 10; ++i) a[i * 7] = 1.0 + double(i);
  CHECK(density(a) == doctest::Approx(0.1));
  // E = q * 0.1 * 0.1 = 1, overlap (10 - 1) / 10
  CHECK(*corrected_overlap(a, a) == doctest::Approx(0.9));
  Vec b = Vec::Zero(q);
  for (Index i = 0; i < 10; ++i) b[i * 7 + 1] = 1.0;
  CHECK(*corrected_overlap(a, b) == doctest::Approx(-0.1));
  CHECK(!corrected_overlap(Vec::Zero(q), Vec::Zero(q)).has_value());

  Vec pred(4), lab(4);
  pred << 1, -1, 1, 1;
  lab << 1, -1, 1, 1;
  CHECK(accuracy(pred, lab) == 100.0);
  lab[3] = -1;
  CHECK(accuracy(pred, lab) == 75.0);

  auto ms = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_std({4.0}).stddev == 0.0);
}

TEST_CASE("classification scores over folds") {
  std::mt19937_64 rng(3);
  const Index q = 20;
  Vec w = Vec::Zero(q);
  w[2] = 1.5;
  w[7] = -2.0;
  w[11] = 1e-9;  // removed by thresholding
  std::vector<Vec> weights;
  std::vector<TestFold> folds;
  for (int f = 0; f < 3; ++f) {
    Mat x = testutil::randn_mat(rng, 15, q);
    TestFold tf;
    tf.data = x.sparseView();
    Vec t = x * w;
    tf.labels = t.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    folds.push_back(tf);
    weights.push_back(w);
  }
  auto sc = classification_scores(weights, folds, q);
  CHECK(sc.acc_summary.mean == doctest::Approx(100.0));
  CHECK(sc.den_summary.mean == doctest::Approx(10.0));
  CHECK(sc.den_summary.stddev == 0.0);
  REQUIRE(sc.overlap.size() == 3);
  // |Z| = 2, E = 20 * 0.1 * 0.1 = 0.2
  CHECK(sc.overlap_summary.mean == doctest::Approx(100.0 * (2.0 - 0.2) / 2.0));

  // bias as the last weight
  Vec wb(q + 1);
  wb << w, 0.0;
  auto sb = classification_scores({wb, wb, wb}, folds, q);
  CHECK(sb.acc_summary.mean == doctest::Approx(100.0));
  CHECK_THROWS_AS(classification_scores({w}, folds, q), InvalidArgument);
}

TEST_CASE("image scores") {
  std::mt19937_64 rng(4);
  const Index n = 16;
  Mat ref = (testutil::randu(rng, n * n, 0.0, 1.0)).reshaped(n, n);
  Vec r = flatten(ref);
  auto same = image_scores(r, r, n, n);
  CHECK(same.rmse == 0.0);
  CHECK(std::isinf(same.psnr));
  CHECK(same.mssim == doctest::Approx(1.0).epsilon(1e-12));

  // max reference 1, rmse 0.01 -> 40 dB
  Vec one = Vec::Constant(100, 0.5);
  one[0] = 1.0;
  Vec noisy = one;
  noisy.array() += 0.01;
  CHECK(rmse(noisy, one) == doctest::Approx(0.01));
  CHECK(psnr(noisy, one) == doctest::Approx(40.0));

  // constant 16x16 pair shifted by 0.1
  Vec c0 = Vec::Constant(n * n, 0.4), c1 = Vec::Constant(n * n, 0.5);
  auto cs = image_scores(c1, c0, n, n);
  CHECK(cs.rmse == doctest::Approx(0.1));
  const double k1 = 1e-4;
  double expect = (2 * 0.5 * 0.4 + k1) / (0.25 + 0.16 + k1);
  CHECK(cs.mssim == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cs.mssim < 1.0);

  // oracle on random 13x17 pairs, symmetry
  for (int trial = 0; trial < 5; ++trial) {
    Mat x = testutil::randu(rng, 13 * 17, 0.0, 1.0).reshaped(13, 17);
    Mat y = (x + 0.2 * testutil::randn_mat(rng, 13, 17)).eval();
    Vec fx = flatten(x), fy = flatten(y);
    double got = mssim(fx, fy, 13, 17);
    CHECK(got == doctest::Approx(ssim_oracle(x, y, 1.0)).epsilon(1e-12));
    CHECK(std::abs(got - mssim(fy, fx, 13, 17)) < 1e-12);
    CHECK(got <= 1.0);
    CHECK(got >= -1.0);
  }

  // psnr decreases as rmse grows
  double prev = std::numeric_limits<double>::infinity();
  for (double shift : {0.001, 0.01, 0.05, 0.2}) {
    Vec v = r;
    v.array() += shift;
    double p = psnr(v, r);
    CHECK(p < prev);
    prev = p;
  }
  CHECK_THROWS_AS(mssim(Vec::Zero(25), Vec::Zero(25), 5, 5), InvalidArgument);
}
