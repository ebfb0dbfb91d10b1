#pragma once

#include "pmm/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmm::metrics {

// ---------------------------------------------------------------- portfolio

struct PortfolioRatios {
  double ratio = 0.0;    // risk reduction
  double ratio_h = 0.0;  // holding-cost reduction
  double ratio_t = 0.0;  // transaction reduction
  Index active_naive = 0, active_opt = 0;
  Index transactions_naive = 0, transactions_opt = 0;
};

// Number of strictly positive entries.
Index active_positions(const Vec& w);

// trace(VᵀV): count of (i, j) with |w_j^i - w_{j+1}^i| >= eps, w period-major
// with `assets` entries per period.
Index transaction_count(const Vec& w, Index assets, double eps);

// Throws UndefinedMetric when a denominator is zero.
PortfolioRatios portfolio_ratios(const Vec& w_opt, const Vec& w_naive, const SpMat& c, Index assets,
                                 double eps = 1e-4);

// ---------------------------------------------------------------- classification

// Zeroes the smallest entries whose cumulative magnitude stays within
// fraction·‖w‖₁ (sorted by increasing magnitude).
Vec threshold_solution(const Vec& w, double fraction = 1e-4);

double density(const Vec& w);  // |Z(w)| / q
// Percent of matching signs; predictions and labels are ±1.
double accuracy(const Vec& predictions, const Vec& labels);
// (|Z(a) ∩ Z(b)| - E) / max(|Z(a)|, |Z(b)|) with E = q·D(a)·D(b); nullopt if
// both supports are empty.
std::optional<double> corrected_overlap(const Vec& a, const Vec& b);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation, 0 for one value
};
MeanStd mean_std(const std::vector<double>& values);

struct TestFold {
  SpMat data;  // rows are test samples, q columns
  Vec labels;  // ±1
};

struct ClassificationScores {
  std::vector<double> acc, den;  // per fold, percent
  std::vector<double> overlap;   // per evaluated pair, percent
  Index skipped_pairs = 0;
  MeanStd acc_summary, den_summary, overlap_summary;
};

// Weights of length q (no bias) or q + 1 (bias last, excluded from the
// support). Scores are computed on threshold_solution(w, fraction).
ClassificationScores classification_scores(const std::vector<Vec>& weights, const std::vector<TestFold>& folds,
                                           Index q, double fraction = 1e-4);

// ---------------------------------------------------------------- images

struct ImageScores {
  double rmse = 0.0;
  double psnr = 0.0;  // +inf when rmse == 0
  double mssim = 0.0;
};

double rmse(const Vec& w, const Vec& ref);
double psnr(const Vec& w, const Vec& ref);
// Row-major rows x cols images; 11x11 Gaussian window (σ = 1.5) over the
// valid region, C1 = (0.01 R)², C2 = (0.03 R)².
double mssim(const Vec& a, const Vec& b, Index rows, Index cols, double dynamic_range = 1.0);
ImageScores image_scores(const Vec& w, const Vec& ref, Index rows, Index cols, double dynamic_range = 1.0);

}  // namespace pmm::metrics
