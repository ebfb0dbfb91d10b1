#include "pmm/baselines.hpp"
#include "pmm/harness.hpp"
#include "pmm/matrix_market.hpp"
#include "pmm/metrics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace pmm::harness {

namespace {

struct SolveOpts {
  double tol = 1e-6;
  int max_iter = 100;
  double budget = std::numeric_limits<double>::infinity();
  bool no_drop = false;
  double eps_drop = 1e-4;
  double xi = 1e2;
  std::string htilde = "diag-h";
  std::string linear_solver;  // family default when empty
  Index minres_maxit = 20;
  double minres_tol = 1e-4;
  Index inner_steps = 10;
  double rho_admm = 1.0;
  Index first_order_maxit = 100000;
};

struct Outcome {
  std::string solver;
  std::string status;
  bool failed = false;
  std::string report_json;
  std::vector<std::pair<std::string, std::string>> scores;  // ordered columns
  Vec w;
};

ippmm::SolverOptions ipm_options(const SolveOpts& o) {
  ippmm::SolverOptions s;
  s.tol = o.tol;
  s.max_iter = o.max_iter;
  s.time_limit_seconds = o.budget;
  s.htilde = ippmm::parse_htilde(o.htilde);
  s.minres_maxit = o.minres_maxit;
  s.minres_tol = o.minres_tol;
  return s;
}

void pick_solver(ippmm::SolverOptions& s, const SolveOpts& o, ippmm::LinearSolverKind fallback) {
  s.linear_solver = o.linear_solver.empty() ? fallback : ippmm::parse_linear_solver(o.linear_solver);
}

baselines::StopRule stop_rule(const SolveOpts& o) {
  baselines::StopRule r;
  r.tol = o.tol;
  r.maxit = o.first_order_maxit;
  r.time_limit_seconds = o.budget;
  return r;
}

Outcome from_ipm(const std::string& solver, const ippmm::SolveResult& r) {
  Outcome out;
  out.solver = solver;
  out.status = ippmm::to_string(r.report.status);
  out.failed = r.report.status == ippmm::Status::numerical_failure;
  out.report_json = r.report.to_json();
  out.scores = {{"iters", std::to_string(r.report.iterations)}, {"time_s", format_double(r.report.time_seconds)}};
  return out;
}

Outcome from_first_order(const std::string& name, const baselines::FirstOrderResult& r) {
  Outcome out;
  out.solver = name;
  out.status = r.report.status;
  out.report_json = r.report.to_json();
  out.scores = {{"iters", std::to_string(r.report.iterations)}, {"time_s", format_double(r.report.time_seconds)}};
  out.w = r.w;
  return out;
}

void unknown_solver(const std::string& family, const std::string& solver, const std::string& allowed) {
  throw CLI::ValidationError("--solver", "family " + family + " supports " + allowed + ", not '" + solver + "'");
}

// ---------------------------------------------------------------- families

Outcome solve_portfolio(const problems::PortfolioInstance& p, const std::string& solver, const SolveOpts& o,
                        double eps) {
  Outcome out;
  if (solver == "ippmm") {
    auto so = ipm_options(o);
    pick_solver(so, o, ippmm::LinearSolverKind::direct_augmented);
    so.dropping.enabled = !o.no_drop;
    so.dropping.eps_drop = o.eps_drop;
    so.dropping.xi = o.xi;
    auto r = ippmm::solve(problems::build_portfolio_qp(p), so);
    out = from_ipm("ippmm", r);
    out.w = problems::portfolio_weights(p, r.x);
  } else if (solver == "asb") {
    baselines::AsbOptions ao;
    ao.stop = stop_rule(o);
    out = from_first_order(solver, baselines::asb_chol_solve(p, ao));
  } else {
    unknown_solver("portfolio", solver, "ippmm, asb");
  }
  out.scores.emplace_back("objective", format_double(problems::portfolio_objective(p, out.w)));
  try {
    auto r = metrics::portfolio_ratios(out.w, problems::naive_portfolio(p), problems::portfolio_covariance(p),
                                       p.assets(), eps);
    out.scores.emplace_back("ratio", format_double(r.ratio));
    out.scores.emplace_back("ratio_h", format_double(r.ratio_h));
    out.scores.emplace_back("ratio_t", format_double(r.ratio_t));
  } catch (const UndefinedMetric&) {
    for (const char* k : {"ratio", "ratio_h", "ratio_t"}) out.scores.emplace_back(k, "nan");
  }
  return out;
}

Outcome solve_fmri(const problems::FusedLassoLsInstance& f, const std::string& solver, const SolveOpts& o) {
  Outcome out;
  if (solver == "ippmm") {
    auto so = ipm_options(o);
    pick_solver(so, o, ippmm::LinearSolverKind::pcg_normal);
    so.normal_preconditioner = problems::fmri_preconditioner_factory(f);
    auto r = ippmm::solve(problems::build_fused_lasso_ls(f), so);
    out = from_ipm("ippmm", r);
    out.w = problems::fused_lasso_weights(f, r.x);
  } else if (solver == "fista") {
    baselines::FistaOptions fo;
    fo.inner_steps = o.inner_steps;
    fo.stop = stop_rule(o);
    out = from_first_order(solver, baselines::fista_solve(f, fo));
  } else if (solver == "admm") {
    baselines::AdmmOptions ao;
    ao.rho = o.rho_admm;
    ao.inner_cg_steps = o.inner_steps;
    ao.stop = stop_rule(o);
    out = from_first_order(solver, baselines::admm_solve(f, ao));
  } else {
    unknown_solver("fmri", solver, "ippmm, fista, admm");
  }
  out.scores.emplace_back("objective", format_double(problems::fused_lasso_objective(f, out.w)));
  out.scores.emplace_back("density", format_double(100.0 * metrics::density(metrics::threshold_solution(out.w))));
  return out;
}

Outcome solve_restore(const BlurInstance& b, const std::string& solver, const SolveOpts& o) {
  if (solver != "ippmm") unknown_solver("restore", solver, "ippmm");
  const auto& inst = b.instance;
  auto so = ipm_options(o);
  pick_solver(so, o, ippmm::LinearSolverKind::minres_augmented);
  // w⁰ = g, shifted into the interior; equal shifts keep d⁺ - d⁻ = Lw⁰
  Vec w0 = inst.g.cwiseMax(1e-3);
  Vec x0 = problems::poisson_tv_split_point(inst, w0);
  x0.tail(x0.size() - w0.size()).array() += 1e-1;
  so.start = ippmm::StartingPoint{x0, {}, {}};
  auto r = ippmm::solve(problems::build_poisson_tv(inst), so);
  Outcome out = from_ipm("ippmm", r);
  out.w = r.x.head(inst.pixels());
  auto obs = metrics::image_scores(b.observed.pixels, b.truth.pixels, b.truth.rows, b.truth.cols);
  auto res = metrics::image_scores(out.w, b.truth.pixels, b.truth.rows, b.truth.cols);
  out.scores.emplace_back("objective", format_double(problems::poisson_tv_objective(inst, out.w)));
  out.scores.emplace_back("rmse_observed", format_double(obs.rmse));
  out.scores.emplace_back("rmse", format_double(res.rmse));
  out.scores.emplace_back("psnr_observed", format_double(obs.psnr));
  out.scores.emplace_back("psnr", format_double(res.psnr));
  out.scores.emplace_back("mssim_observed", format_double(obs.mssim));
  out.scores.emplace_back("mssim", format_double(res.mssim));
  return out;
}

Outcome solve_classify(const ClassificationData& d, const std::string& solver, const SolveOpts& o) {
  Outcome out;
  const auto& inst = d.train;
  if (solver == "ippmm") {
    auto so = ipm_options(o);
    pick_solver(so, o, ippmm::LinearSolverKind::minres_augmented);
    auto r = ippmm::solve(problems::build_logistic_l1(inst), so);
    out = from_ipm("ippmm", r);
    out.w = problems::logistic_weights(inst, r.x);
  } else if (solver == "admm") {
    baselines::AdmmOptions ao;
    ao.rho = o.rho_admm;
    ao.inner_cg_steps = o.inner_steps;
    ao.stop = stop_rule(o);
    out = from_first_order(solver, baselines::admm_solve(inst, ao));
  } else {
    unknown_solver("classify", solver, "ippmm, admm");
  }
  out.scores.emplace_back("objective", format_double(problems::logistic_objective(inst, out.w)));
  const Index s = inst.d.cols();
  Vec wt = metrics::threshold_solution(out.w);
  out.scores.emplace_back("density", format_double(100.0 * metrics::density(wt.head(s))));
  if (d.test_d.rows() > 0) {
    Vec pred = problems::logistic_predict(inst, d.test_d, wt);
    out.scores.emplace_back("test_accuracy", format_double(metrics::accuracy(pred, d.test_labels)));
  }
  Vec pred = problems::logistic_predict(inst, inst.d, wt);
  out.scores.emplace_back("train_accuracy", format_double(metrics::accuracy(pred, inst.labels)));
  return out;
}

// ---------------------------------------------------------------- output

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text << '\n';
}

CsvWriter scores_table(const std::string& family, const std::vector<Outcome>& outcomes) {
  std::vector<std::string> header = {"family", "solver", "status"};
  for (const auto& kv : outcomes.front().scores) header.push_back(kv.first);
  CsvWriter csv(header);
  for (const auto& o : outcomes) {
    std::vector<std::string> row = {family, o.solver, o.status};
    for (const auto& kv : o.scores) row.push_back(kv.second);
    csv.add_row(row);
  }
  return csv;
}

int exit_code(const std::vector<Outcome>& outcomes) {
  for (const auto& o : outcomes)
    if (o.failed) return 2;
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Config keys become "--key value" arguments unless the flag is on the
// command line already.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  auto cfg = parse_config_file(path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  std::set<std::string> given;
  for (const auto& a : out)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  for (const auto& [k, v] : cfg) {
    if (given.count(k)) continue;
    if (v == "true") {
      out.push_back("--" + k);
    } else if (v != "false") {
      out.push_back("--" + k);
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"IP-PMM solver toolkit: sparse approximation problems and first-order baselines"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; command-line flags take precedence");

  SolveOpts so;
  std::string out_path, scores_path, solver = "ippmm";
  std::uint64_t seed = 1;
  auto add_common = [&](CLI::App* c, bool first_order) {
    c->add_option("--seed", seed, "generator seed");
    c->add_option("--tol", so.tol, "stopping tolerance");
    c->add_option("--max-iter", so.max_iter, "IP-PMM iteration limit");
    c->add_option("--budget-seconds", so.budget, "wall-time budget per solve");
    c->add_option("--linear-solver", so.linear_solver, "direct-augmented, pcg-normal or minres-augmented");
    c->add_option("--htilde", so.htilde, "MINRES preconditioner diagonal: diag-h or u-squared");
    c->add_option("--minres-maxit", so.minres_maxit, "MINRES iterations per call");
    c->add_option("--minres-tol", so.minres_tol, "MINRES relative tolerance");
    c->add_option("--out", out_path, "report JSON path (stdout if omitted)");
    c->add_option("--scores", scores_path, "scores CSV path");
    if (first_order) {
      c->add_option("--inner-steps", so.inner_steps, "FISTA inner steps / ADMM inner CG steps");
      c->add_option("--rho-admm", so.rho_admm, "ADMM penalty");
      c->add_option("--first-order-maxit", so.first_order_maxit, "baseline iteration limit");
    }
  };

  // portfolio
  auto* pf = app.add_subcommand("portfolio", "multi-period fused-lasso portfolio selection");
  Index assets = 10, periods = 4;
  double tau1 = -1, tau2 = -1, eps_tr = 1e-4;
  std::string returns_csv, cov_csv;
  pf->add_option("--assets,-s", assets, "assets per period");
  pf->add_option("--periods,-m", periods, "number of periods");
  pf->add_option("--returns", returns_csv, "CSV, one row of returns per period");
  pf->add_option("--covariances", cov_csv, "CSV, period covariance blocks stacked vertically");
  pf->add_option("--tau1", tau1, "l1 weight");
  pf->add_option("--tau2", tau2, "fused weight");
  pf->add_option("--solver", solver, "ippmm or asb");
  pf->add_flag("--no-drop", so.no_drop, "disable variable dropping");
  pf->add_option("--eps-drop", so.eps_drop, "dropping threshold");
  pf->add_option("--xi", so.xi, "dropping dual-slack factor");
  pf->add_option("--eps", eps_tr, "transaction threshold for ratio_t");
  add_common(pf, true);

  // fmri
  auto* fm = app.add_subcommand("fmri", "fused-lasso least squares on a voxel grid");
  Index samples = 20;
  std::string grid_spec = "4x4x4", data_csv, labels_csv;
  fm->add_option("--samples", samples, "generated samples");
  fm->add_option("--grid", grid_spec, "voxel grid, e.g. 4x4x4");
  fm->add_option("--data", data_csv, "CSV sample matrix (rows are samples)");
  fm->add_option("--labels", labels_csv, "CSV labels, one per line");
  fm->add_option("--tau1", tau1, "l1 weight");
  fm->add_option("--tau2", tau2, "TV weight");
  fm->add_option("--solver", solver, "ippmm, fista or admm");
  add_common(fm, true);

  // restore
  auto* rs = app.add_subcommand("restore", "TV-regularized Poisson image restoration");
  std::string image_path, builtin = "squares", blur = "gaussian", out_image;
  Index size = 64;
  double sigma = 2.0, len = 9.0, angle = 0.0, radius = 4.0;
  BlurOptions bo;
  bool no_noise = false;
  rs->add_option("--image", image_path, "PGM ground truth");
  rs->add_option("--builtin", builtin, "squares, disk or phantom");
  rs->add_option("--size", size, "builtin image side");
  rs->add_option("--blur", blur, "gaussian, motion, out-of-focus or identity");
  rs->add_option("--sigma", sigma, "gaussian width");
  rs->add_option("--len", len, "motion length");
  rs->add_option("--angle", angle, "motion angle in degrees");
  rs->add_option("--radius", radius, "out-of-focus radius");
  rs->add_option("--peak", bo.peak, "expected counts at intensity 1");
  rs->add_option("--background", bo.background, "background intensity a");
  rs->add_option("--lambda", bo.lambda, "TV weight");
  rs->add_flag("--no-noise", no_noise, "skip Poisson sampling");
  rs->add_option("--iters", so.max_iter, "IP-PMM iterations");
  rs->add_option("--out-image", out_image, "restored PGM");
  add_common(rs, false);

  // classify
  auto* cl = app.add_subcommand("classify", "l1-regularized logistic regression");
  Index n = 500, features = 100, n_test = 500;
  double sparsity = 0.1, separation = 30.0, tau = 0.0;
  std::string mm_path;
  cl->add_option("--n", n, "training samples");
  cl->add_option("--features,-s", features, "features");
  cl->add_option("--n-test", n_test, "test samples");
  cl->add_option("--sparsity", sparsity, "planted density");
  cl->add_option("--separation", separation, "label signal-to-noise");
  cl->add_option("--tau", tau, "l1 weight; <= 0 means 1/n");
  cl->add_option("--data", mm_path, "Matrix Market training matrix");
  cl->add_option("--labels", labels_csv, "CSV labels, one per line");
  cl->add_option("--solver", solver, "ippmm or admm");
  add_common(cl, true);

  // bench
  auto* bn = app.add_subcommand("bench", "run several solvers on one generated instance");
  std::string family = "portfolio", solvers = "ippmm", out_dir = ".";
  bn->add_option("--family", family, "portfolio, fmri, restore or classify");
  bn->add_option("--solvers", solvers, "comma-separated solver list");
  bn->add_option("--out-dir", out_dir, "directory for reports and the combined CSV");
  bn->add_option("--assets,-s", assets, "portfolio assets / classification features");
  bn->add_option("--periods,-m", periods, "portfolio periods");
  bn->add_option("--grid", grid_spec, "fmri voxel grid");
  bn->add_option("--samples", samples, "fmri samples");
  bn->add_option("--size", size, "restore image side");
  bn->add_option("--n", n, "classification samples");
  add_common(bn, true);

  // spectest
  auto* sp = app.add_subcommand("spectest", "eigenvalue bounds of the preconditioned systems");
  SpectralTestOptions st;
  std::string sp_grid;
  sp->add_option("--family", st.family, "fmri, restore or classify");
  sp->add_option("--s", st.samples, "fmri samples / classification samples");
  sp->add_option("--grid", sp_grid, "fmri voxel grid or restore image size");
  sp->add_option("--features", st.features, "classification features");
  sp->add_option("--rho", st.rho, "primal regularization");
  sp->add_option("--delta", st.delta, "dual regularization");
  sp->add_option("--seed", st.seed, "seed");
  sp->add_option("--htilde", so.htilde, "diag-h or u-squared");
  sp->add_option("--out", out_path, "report JSON path");

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    args = merge_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    std::vector<Outcome> outcomes;
    std::string fam;
    if (*pf) {
      fam = "portfolio";
      problems::PortfolioInstance p;
      if (!returns_csv.empty() || !cov_csv.empty()) {
        if (returns_csv.empty() || cov_csv.empty()) throw InvalidArgument("--returns and --covariances go together");
        Mat r = read_csv_matrix_file(returns_csv), c = read_csv_matrix_file(cov_csv);
        const Index s = r.cols();
        if (c.cols() != s || c.rows() != s * r.rows())
          throw InvalidArgument("covariances must stack one s x s block per returns row");
        for (Index j = 0; j < r.rows(); ++j) {
          p.covariances.push_back(c.middleRows(j * s, s));
          p.returns.push_back(r.row(j).transpose());
        }
        p.xi_init = 1.0;
        p.xi_term = (Vec::Ones(s) + p.returns.back()).dot(problems::naive_portfolio(p).tail(s));
      } else {
        p = gen_portfolio(assets, periods, seed);
      }
      if (tau1 >= 0) p.tau1 = tau1;
      if (tau2 >= 0) p.tau2 = tau2;
      outcomes.push_back(solve_portfolio(p, solver, so, eps_tr));
    } else if (*fm) {
      fam = "fmri";
      problems::FusedLassoLsInstance f;
      auto grid = parse_grid(grid_spec);
      if (!data_csv.empty()) {
        f.d = read_csv_matrix_file(data_csv);
        Mat lab = read_csv_matrix_file(labels_csv);
        if (lab.cols() != 1) throw InvalidArgument("labels CSV must have one column");
        f.labels = lab.col(0);
        f.grid = grid;
      } else {
        f = gen_fused_lasso(samples, grid, seed);
      }
      if (tau1 >= 0) f.tau1 = tau1;
      if (tau2 >= 0) f.tau2 = tau2;
      outcomes.push_back(solve_fmri(f, solver, so));
    } else if (*rs) {
      fam = "restore";
      Image truth = image_path.empty() ? builtin_image(builtin, size, size) : read_pgm_file(image_path);
      linops::BlurKernel k;
      switch (linops::parse_blur_family(blur)) {
        case linops::BlurFamily::gaussian: k = linops::BlurKernel::gaussian(truth.rows, truth.cols, sigma); break;
        case linops::BlurFamily::motion: k = linops::BlurKernel::motion(truth.rows, truth.cols, len, angle); break;
        case linops::BlurFamily::out_of_focus:
          k = linops::BlurKernel::out_of_focus(truth.rows, truth.cols, radius);
          break;
        case linops::BlurFamily::identity: k = linops::BlurKernel::identity(truth.rows, truth.cols); break;
      }
      bo.noise = !no_noise;
      auto b = gen_blur_instance(truth, k, bo, seed);
      outcomes.push_back(solve_restore(b, solver, so));
      if (!out_image.empty()) {
        Image restored = truth;
        restored.pixels = outcomes.back().w;
        write_pgm_file(out_image, restored);
      }
    } else if (*cl) {
      fam = "classify";
      ClassificationData d;
      if (!mm_path.empty()) {
        d.train.d = linops::read_matrix_market_file(mm_path);
        Mat lab = read_csv_matrix_file(labels_csv);
        if (lab.cols() != 1) throw InvalidArgument("labels CSV must have one column");
        d.train.labels = lab.col(0);
      } else {
        d = gen_classification(n, features, separation, sparsity, seed, n_test);
      }
      d.train.tau = tau;
      outcomes.push_back(solve_classify(d, solver, so));
    } else if (*bn) {
      fam = family;
      auto list = split_list(solvers);
      if (list.empty()) throw InvalidArgument("--solvers is empty");
      if (family == "portfolio") {
        auto p = gen_portfolio(assets, periods, seed);
        for (const auto& s : list) outcomes.push_back(solve_portfolio(p, s, so, eps_tr));
      } else if (family == "fmri") {
        auto f = gen_fused_lasso(samples, parse_grid(grid_spec), seed);
        for (const auto& s : list) outcomes.push_back(solve_fmri(f, s, so));
      } else if (family == "restore") {
        auto b = gen_blur_instance(builtin_image(builtin, size, size),
                                   linops::BlurKernel::gaussian(size, size, sigma), bo, seed);
        for (const auto& s : list) outcomes.push_back(solve_restore(b, s, so));
      } else if (family == "classify") {
        auto d = gen_classification(n, features, separation, sparsity, seed, n_test);
        for (const auto& s : list) outcomes.push_back(solve_classify(d, s, so));
      } else {
        throw CLI::ValidationError("--family", "unknown family '" + family + "'");
      }
      std::filesystem::create_directories(out_dir);
      for (const auto& o : outcomes) write_text(out_dir + "/" + family + "_" + o.solver + ".json", o.report_json);
      scores_table(family, outcomes).write_file(out_dir + "/" + family + "_bench.csv");
      return exit_code(outcomes);
    } else if (*sp) {
      if (!sp_grid.empty()) st.grid = parse_grid(sp_grid);
      st.htilde = ippmm::parse_htilde(so.htilde);
      auto rep = spectral_test(st);
      auto j = nlohmann::ordered_json::parse(rep.to_json());
      j["family"] = st.family;
      j["seed"] = st.seed;
      write_text(out_path, j.dump(2));
      return 0;
    }
    write_text(out_path, outcomes.front().report_json);
    if (!scores_path.empty()) scores_table(fam, outcomes).write_file(scores_path);
    return exit_code(outcomes);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pmm::harness
