#pragma once

#include "pmm/linops.hpp"
#include "pmm/precond.hpp"
#include "pmm/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace pmm::harness {

// ---------------------------------------------------------------- files

// Comma-separated numbers, one row per line; blank lines and lines starting
// with '#' are skipped. Ragged rows are a ParseError.
Mat read_csv_matrix(std::istream& in, const std::string& source = "<stream>");
Mat read_csv_matrix_file(const std::string& path);
void write_csv_matrix(std::ostream& out, const Mat& m);
void write_csv_matrix_file(const std::string& path, const Mat& m);

struct Image {
  Index rows = 0, cols = 0;
  Vec pixels;  // row-major, scaled to [0, 1]
};

// P2 (plain) and P5 (raw, maxval up to 65535) graymaps.
Image read_pgm(std::istream& in, const std::string& source = "<stream>");
Image read_pgm_file(const std::string& path);
// Values are clamped to [0, 1] and quantized to maxval.
void write_pgm(std::ostream& out, const Image& img, bool binary = true, int maxval = 255);
void write_pgm_file(const std::string& path, const Image& img, bool binary = true, int maxval = 255);

// Header row plus data rows; fields containing ',' or '"' are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& row);
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

// ---------------------------------------------------------------- config

// key = value lines, '#' starts a comment. Duplicate keys and lines without
// '=' are a ParseError.
std::map<std::string, std::string> parse_config(std::istream& in, const std::string& source = "<stream>");
std::map<std::string, std::string> parse_config_file(const std::string& path);

// ---------------------------------------------------------------- generators

// Poisson sampler: sequential inversion for mean < 30, PTRD transformed
// rejection above.
class PoissonSampler {
 public:
  explicit PoissonSampler(std::uint64_t seed) : rng_(seed) {}
  std::int64_t operator()(double mean);

 private:
  double uniform();
  std::mt19937_64 rng_;
};

problems::PortfolioInstance gen_portfolio(Index assets, Index periods, std::uint64_t seed);

// Piecewise-constant patterns in [0, 1]: "squares", "disk", "phantom".
Image builtin_image(const std::string& name, Index rows, Index cols);

struct BlurOptions {
  double peak = 255.0;       // expected counts at intensity 1
  double background = 1e-2;  // a, in intensity units
  double lambda = 1e-2;
  bool noise = true;         // false: g = Dw̄ + a exactly
};

struct BlurInstance {
  problems::PoissonTvInstance instance;  // g in intensity units (counts / peak)
  Image truth;
  Image observed;  // g - a, for display and scoring
};

BlurInstance gen_blur_instance(const Image& truth, const linops::BlurKernel& kernel, const BlurOptions& opts,
                               std::uint64_t seed);

struct ClassificationData {
  problems::LogisticInstance train;
  SpMat test_d;
  Vec test_labels;
  Vec planted;  // length s
};

// Features N(0, 2/s) so rows have expected squared norm 2; planted weights with
// round(sparsity·s) nonzeros; labels sign(separation·√s·Dw̄/‖w̄‖ + N(0, 1)).
ClassificationData gen_classification(Index n, Index s, double separation, double sparsity, std::uint64_t seed,
                                      Index n_test = 0);

// Smooth planted blob on the grid; labels sign(Dw̄ + 0.5·N(0, 1)).
problems::FusedLassoLsInstance gen_fused_lasso(Index samples, const std::vector<Index>& grid, std::uint64_t seed,
                                               double tau1 = 1e-1, double tau2 = 1e-1);

std::vector<Index> parse_grid(const std::string& text);  // "4x4x4"

// ---------------------------------------------------------------- spectra

struct SpectralTestOptions {
  std::string family = "fmri";  // fmri | restore | classify
  Index samples = 3;            // fmri s, classify n
  std::vector<Index> grid = {2, 2, 2};  // fmri voxels, restore image
  Index features = 6;           // classify
  double rho = 1e-4, delta = 1e-4;
  ippmm::HTildeChoice htilde = ippmm::HTildeChoice::diag_h;
  std::uint64_t seed = 1;
};

// Builds a random interior state for the family and checks the relevant
// eigenvalue bounds of the preconditioned matrix.
precond::SpectralReport spectral_test(const SpectralTestOptions& opts);

// ---------------------------------------------------------------- CLI

// Exit status: 0 on a finished solve, 2 on numerical failure, 1 on usage or
// input errors.
int run_cli(int argc, const char* const* argv);

}  // namespace pmm::harness
