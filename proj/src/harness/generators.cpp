#include "pmm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmm::harness {

// ---------------------------------------------------------------- Poisson

double PoissonSampler::uniform() {
  // 53-bit uniform in (0, 1)
  return (double(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t PoissonSampler::operator()(double mean) {
  if (!(mean >= 0) || !std::isfinite(mean)) throw InvalidArgument("poisson: mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    double u = uniform();
    double p = std::exp(-mean), cdf = p;
    std::int64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / double(k);
      cdf += p;
      if (p == 0.0 && k > mean) break;  // u above the representable tail
    }
    return k;
  }
  // PTRD (Hörmann 1993)
  const double smu = std::sqrt(mean), logmu = std::log(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::abs(u);
    auto k = std::int64_t(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + double(k) * logmu - std::lgamma(double(k) + 1.0))
      return k;
  }
}

// ---------------------------------------------------------------- portfolio

problems::PortfolioInstance gen_portfolio(Index assets, Index periods, std::uint64_t seed) {
  if (assets < 2 || periods < 2) throw InvalidArgument("gen_portfolio: need at least 2 assets and 2 periods");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-0.05, 0.10);
  const Index k = std::max<Index>(1, assets / 4);
  problems::PortfolioInstance p;
  for (Index j = 0; j < periods; ++j) {
    Mat b(assets, k);
    for (Index c = 0; c < k; ++c)
      for (Index r = 0; r < assets; ++r) b(r, c) = nd(rng);
    Mat c = b * b.transpose();
    c.diagonal().array() += 0.1;
    p.covariances.push_back(c);
    Vec r(assets);
    for (Index i = 0; i < assets; ++i) r[i] = ud(rng);
    p.returns.push_back(r);
  }
  p.xi_init = 1.0;
  Vec naive = problems::naive_portfolio(p);
  p.xi_term = (Vec::Ones(assets) + p.returns.back()).dot(naive.tail(assets));
  return p;
}

// ---------------------------------------------------------------- images

Image builtin_image(const std::string& name, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("builtin image: empty size");
  Image img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(rows * cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const double y = (double(r) + 0.5) / double(rows), x = (double(c) + 0.5) / double(cols);
      double v = 0.1;
      if (name == "squares") {
        if (x > 0.1 && x < 0.45 && y > 0.1 && y < 0.45) v = 0.9;
        if (x > 0.55 && x < 0.9 && y > 0.2 && y < 0.5) v = 0.5;
        if (x > 0.25 && x < 0.75 && y > 0.6 && y < 0.85) v = 0.7;
        if (x > 0.4 && x < 0.6 && y > 0.65 && y < 0.8) v = 0.3;
      } else if (name == "disk") {
        double d2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
        v = d2 < 0.09 ? 0.8 : 0.2;
        if (d2 < 0.01) v = 0.4;
      } else if (name == "phantom") {
        auto inside = [&](double cx, double cy, double ax, double ay) {
          double dx = (x - cx) / ax, dy = (y - cy) / ay;
          return dx * dx + dy * dy <= 1.0;
        };
        v = 0.0;
        if (inside(0.5, 0.5, 0.42, 0.46)) v = 0.8;
        if (inside(0.5, 0.5, 0.36, 0.40)) v = 0.3;
        if (inside(0.38, 0.45, 0.08, 0.15)) v = 0.6;
        if (inside(0.62, 0.45, 0.08, 0.15)) v = 0.6;
        if (inside(0.5, 0.72, 0.12, 0.06)) v = 1.0;
      } else {
        throw InvalidArgument("builtin image: unknown pattern '" + name + "' (squares, disk, phantom)");
      }
      img.pixels[r * cols + c] = v;
    }
  return img;
}

BlurInstance gen_blur_instance(const Image& truth, const linops::BlurKernel& kernel, const BlurOptions& opts,
                               std::uint64_t seed) {
  if (!(opts.peak > 0)) throw InvalidArgument("blur instance: peak must be positive");
  if (!(opts.background > 0)) throw InvalidArgument("blur instance: background must be positive");
  linops::BlurKernel k = kernel;
  k.n1 = truth.rows;
  k.n2 = truth.cols;
  auto blur = std::make_shared<linops::BccbOperator>(k);
  Vec mean = blur->apply(truth.pixels).array() + opts.background;
  Vec g = mean;
  if (opts.noise) {
    PoissonSampler pois(seed);
    for (Index i = 0; i < g.size(); ++i) g[i] = double(pois(std::max(0.0, mean[i]) * opts.peak)) / opts.peak;
  }
  BlurInstance out;
  out.instance.blur = blur;
  out.instance.g = g;
  out.instance.a = Vec::Constant(g.size(), opts.background);
  out.instance.lambda = opts.lambda;
  out.truth = truth;
  out.observed = truth;
  out.observed.pixels = g.array() - opts.background;
  return out;
}

// ---------------------------------------------------------------- classification

ClassificationData gen_classification(Index n, Index s, double separation, double sparsity, std::uint64_t seed,
                                      Index n_test) {
  if (n < 1 || s < 1) throw InvalidArgument("gen_classification: need n, s >= 1");
  if (!(sparsity > 0 && sparsity <= 1)) throw InvalidArgument("gen_classification: sparsity must be in (0, 1]");
  if (!(separation > 0)) throw InvalidArgument("gen_classification: separation must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.5, 1.5);

  ClassificationData out;
  const Index k = std::clamp<Index>(Index(std::lround(sparsity * double(s))), 1, s);
  std::vector<Index> idx(static_cast<std::size_t>(s));
  std::iota(idx.begin(), idx.end(), Index(0));
  std::shuffle(idx.begin(), idx.end(), rng);
  out.planted = Vec::Zero(s);
  for (Index i = 0; i < k; ++i) out.planted[idx[std::size_t(i)]] = (rng() & 1 ? 1.0 : -1.0) * ud(rng);
  const Vec dir = out.planted / out.planted.norm();

  auto draw = [&](Index rows, SpMat& d, Vec& labels) {
    Mat x(rows, s);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < s; ++j) x(i, j) = nd(rng);
    labels.resize(rows);
    Vec t = x * dir;
    for (Index i = 0; i < rows; ++i) labels[i] = separation * t[i] + nd(rng) >= 0 ? 1.0 : -1.0;
    x *= std::sqrt(2.0 / double(s));  // expected squared row norm 2
    d = x.sparseView();
  };
  draw(n, out.train.d, out.train.labels);
  if (n_test > 0) draw(n_test, out.test_d, out.test_labels);
  return out;
}

problems::FusedLassoLsInstance gen_fused_lasso(Index samples, const std::vector<Index>& grid, std::uint64_t seed,
                                               double tau1, double tau2) {
  if (samples < 1 || grid.empty() || grid.size() > 3) throw InvalidArgument("gen_fused_lasso: bad sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Index q = 1;
  for (Index g : grid) {
    if (g < 1) throw InvalidArgument("gen_fused_lasso: grid sizes must be positive");
    q *= g;
  }
  // blob of radius 0.3 around a point in the first quarter of the box
  Vec w = Vec::Zero(q);
  for (Index v = 0; v < q; ++v) {
    Index rem = v;
    double d2 = 0.0;
    for (std::size_t a = grid.size(); a-- > 0;) {
      Index c = rem % grid[a];
      rem /= grid[a];
      double x = (double(c) + 0.5) / double(grid[a]) - 0.35;
      d2 += x * x;
    }
    if (d2 <= 0.09) w[v] = 1.0;
  }
  if (w.isZero()) w[0] = 1.0;
  problems::FusedLassoLsInstance f;
  f.grid = grid;
  f.d.resize(samples, q);
  for (Index j = 0; j < q; ++j)
    for (Index i = 0; i < samples; ++i) f.d(i, j) = nd(rng);
  Vec t = f.d * w;
  f.labels.resize(samples);
  for (Index i = 0; i < samples; ++i) f.labels[i] = t[i] + 0.5 * nd(rng) >= 0 ? 1.0 : -1.0;
  f.tau1 = tau1;
  f.tau2 = tau2;
  return f;
}

std::vector<Index> parse_grid(const std::string& text) {
  std::vector<Index> out;
  if (text.empty() || text.front() == 'x' || text.back() == 'x' || text.find("xx") != std::string::npos)
    throw InvalidArgument("grid: expected sizes like 4x4x4, got '" + text + "'");
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidArgument("grid: expected sizes like 4x4x4, got '" + text + "'");
    out.push_back(std::stol(part));
    if (out.back() < 1) throw InvalidArgument("grid: sizes must be positive");
  }
  if (out.empty() || out.size() > 3) throw InvalidArgument("grid: expected 1 to 3 sizes, got '" + text + "'");
  return out;
}

}  // namespace pmm::harness
