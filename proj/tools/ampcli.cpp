// ampcli: recovery, phase-transition sweeps, and 2D image experiments for
// the AMP-NNSPL solver.
//
// Exit codes: 0 success, 1 solver divergence, 2 usage/dimension error,
// 3 I/O error.

#include "ampnnspl/ampnnspl.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ampnnspl;

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  // Shared solver and protocol knobs (config-file keys use the same names
  // as the long flags).
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string algo = "nnspl1d";
  std::vector<std::string> algos = {"nnspl1d", "indep"};
  int t_max = 200;
  double eps_toc = 1e-6;
  double snr0 = 100.0;
  double damping = 1.0;
  double lambda_eps = kLambdaEps;
  double success_threshold_db = -60.0;
  double support_tol = 1e-4;
  std::optional<double> snr_db;
  int grid_rows = 0;
  int grid_cols = 0;
  std::string adjacency_path;
  std::string out;

  // Block-sparse signal family.
  int n = 100;
  int k = 25;
  int l = 4;
  double mu0 = 3.0;
  double tau0 = 1.0;

  // Sweep.
  std::vector<double> ratios;
  int trials = 100;
  std::string trials_out;

  // Recover.
  std::string matrix_path;
  std::string measurements_path;

  // Image.
  std::string pgm_path;
  bool synthetic = false;
  int rows = 32;
  int cols = 32;
  double sparsity = 0.12;
  double ratio = 0.5;
  std::string metrics_out;
  std::string save_input;
};

TopologyKind parse_algo(const std::string& name) {
  if (name == "nnspl1d") return TopologyKind::Chain1D;
  if (name == "nnspl2d") return TopologyKind::Grid2D;
  if (name == "fullset") return TopologyKind::FullSet;
  if (name == "indep") return TopologyKind::Independent;
  if (name == "custom") return TopologyKind::Custom;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected nnspl1d, nnspl2d, fullset, indep, custom)");
}

SolverConfig make_solver_config(const Options& opt, TopologyKind kind, int n) {
  SolverConfig cfg;
  cfg.t_max = opt.t_max;
  cfg.eps_toc = opt.eps_toc;
  cfg.snr0 = opt.snr0;
  cfg.damping = opt.damping;
  cfg.lambda_eps = opt.lambda_eps;
  cfg.topology_kind = kind;
  if (kind == TopologyKind::Grid2D) {
    cfg.grid_rows = opt.grid_rows;
    cfg.grid_cols = opt.grid_cols;
    if (cfg.grid_rows * cfg.grid_cols != n) {
      throw std::invalid_argument(
          "nnspl2d needs --grid-rows x --grid-cols matching the signal length " +
          std::to_string(n));
    }
  } else if (kind == TopologyKind::Custom) {
    if (opt.adjacency_path.empty()) {
      throw std::invalid_argument("custom topology needs --adjacency FILE");
    }
    const NeighborTopology topo = io::read_adjacency(opt.adjacency_path);
    if (topo.size() != n) {
      throw std::invalid_argument("adjacency file covers " +
                                  std::to_string(topo.size()) +
                                  " indices, expected " + std::to_string(n));
    }
    cfg.custom_adjacency = topo.adjacency();
  }
  cfg.validate();
  return cfg;
}

std::string snr_label(const std::optional<double>& snr) {
  return snr.has_value() ? io::format_double(*snr) : std::string("noiseless");
}

void print_summary(const SolveResult& res) {
  std::printf("status=%s iterations=%d mu0=%s tau0=%s delta0=%s mean_lambda=%s\n",
              status_name(res.status), res.iterations,
              io::format_double(res.hp_final.mu0).c_str(),
              io::format_double(res.hp_final.tau0).c_str(),
              io::format_double(res.hp_final.delta0).c_str(),
              io::format_double(res.hp_final.lambda.mean()).c_str());
}

int cmd_recover(const Options& opt) {
  if (opt.matrix_path.empty() || opt.measurements_path.empty()) {
    throw std::invalid_argument("recover requires --matrix and --measurements");
  }
  MeasurementModel mm;
  mm.A = io::read_matrix(opt.matrix_path);
  mm.y = io::read_vector(opt.measurements_path);
  if (mm.y.size() != mm.A.rows()) {
    throw std::invalid_argument(
        opt.measurements_path + ": has " + std::to_string(mm.y.size()) +
        " entries but " + opt.matrix_path + " has " + std::to_string(mm.A.rows()) +
        " rows");
  }

  const TopologyKind kind = parse_algo(opt.algo);
  const SolverConfig cfg = make_solver_config(opt, kind, mm.n());
  const SolveResult res = AmpSolver(mm, cfg).solve();

  const std::string out = opt.out.empty() ? "xhat.csv" : opt.out;
  io::write_vector(out, res.xhat);
  print_summary(res);
  return res.status == SolveStatus::Diverged ? kExitDiverged : kExitOk;
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<AggregateRow>& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << "ratio,algo,trials,success_rate,pattern_rate,mean_nmse_db,mean_iters,"
         "mean_seconds\n";
  for (const auto& row : table) {
    out << io::format_double(row.ratio) << ',' << topology_name(row.algo) << ','
        << row.trials << ',' << io::format_double(row.success_rate) << ','
        << io::format_double(row.pattern_rate) << ','
        << io::format_double(row.mean_nmse_db) << ','
        << io::format_double(row.mean_iters) << ','
        << io::format_double(row.mean_seconds) << '\n';
  }
  if (!out) throw io_error(path + ": write failed");
}

void write_trials_csv(const std::string& path, const SweepPlan& plan,
                      const SweepResult& res) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << "ratio,algo,trial,seed,snr_db,nmse_db,success,pattern_success,"
         "iterations,status,excluded\n";
  for (std::size_t ri = 0; ri < plan.ratios.size(); ++ri) {
    for (std::size_t ai = 0; ai < plan.algos.size(); ++ai) {
      for (int ti = 0; ti < plan.trials; ++ti) {
        const TrialRecord& rec =
            res.record(plan, static_cast<int>(ri), ti, static_cast<int>(ai));
        out << io::format_double(plan.ratios[ri]) << ',' << topology_name(rec.algo)
            << ',' << ti << ',' << rec.seed << ',' << snr_label(rec.snr_db) << ','
            << io::format_double(rec.nmse_db) << ',' << (rec.success ? 1 : 0) << ','
            << (rec.pattern_success ? 1 : 0) << ',' << rec.iterations << ','
            << status_name(rec.status) << ',' << (rec.excluded ? 1 : 0) << '\n';
      }
    }
  }
  if (!out) throw io_error(path + ": write failed");
}

int cmd_sweep_1d(const Options& opt) {
  SweepPlan plan;
  plan.ratios = opt.ratios;
  plan.trials = opt.trials;
  plan.signal.n = opt.n;
  plan.signal.k = opt.k;
  plan.signal.l = opt.l;
  plan.signal.mu0 = opt.mu0;
  plan.signal.tau0 = opt.tau0;
  plan.snr_db = opt.snr_db;
  plan.base_seed = opt.seed;
  plan.jobs = opt.jobs;
  plan.success_threshold_db = opt.success_threshold_db;
  plan.support_tol = opt.support_tol;
  plan.algos.clear();
  for (const auto& name : opt.algos) plan.algos.push_back(parse_algo(name));
  if (plan.algos.empty()) throw std::invalid_argument("sweep1d: --algos is empty");
  // Solver config shared across algorithms; topology is set per algorithm
  // inside the sweep. Validate grid/custom requirements for every algorithm
  // that needs them now rather than mid-sweep.
  plan.solver = make_solver_config(opt, plan.algos.front(), plan.signal.n);
  for (const TopologyKind kind : plan.algos) {
    const SolverConfig checked = make_solver_config(opt, kind, plan.signal.n);
    if (kind == TopologyKind::Grid2D) {
      plan.solver.grid_rows = checked.grid_rows;
      plan.solver.grid_cols = checked.grid_cols;
    } else if (kind == TopologyKind::Custom) {
      plan.solver.custom_adjacency = checked.custom_adjacency;
    }
  }

  const SweepResult res = run_sweep(plan);

  const std::string out = opt.out.empty() ? "sweep.csv" : opt.out;
  write_aggregate_csv(out, res.table);
  if (!opt.trials_out.empty()) write_trials_csv(opt.trials_out, plan, res);

  std::printf("sweep: %zu ratios x %d trials x %zu algos, snr=%s -> %s\n",
              plan.ratios.size(), plan.trials, plan.algos.size(),
              snr_label(plan.snr_db).c_str(), out.c_str());
  for (const auto& row : res.table) {
    std::printf("  ratio=%.3f algo=%-8s success=%.3f pattern=%.3f nmse=%.2fdB\n",
                row.ratio, topology_name(row.algo), row.success_rate,
                row.pattern_rate, row.mean_nmse_db);
  }
  return kExitOk;
}

int cmd_image(const Options& opt) {
  int rows = 0;
  int cols = 0;
  Vector x;
  Rng rng(opt.seed);
  if (!opt.pgm_path.empty() && opt.synthetic) {
    throw std::invalid_argument("image: pass either --pgm or --synthetic, not both");
  }
  if (!opt.pgm_path.empty()) {
    const io::Pgm img = io::read_pgm(opt.pgm_path);
    rows = img.rows;
    cols = img.cols;
    x = img.pixels;
  } else if (opt.synthetic) {
    rows = opt.rows;
    cols = opt.cols;
    Vector raw = generate_cluster_image(rows, cols, opt.sparsity, rng, opt.mu0,
                                        opt.tau0);
    // Map to pixel space [0, 1]: negatives darken to zero, peak to white.
    double peak = 0.0;
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      if (raw[i] < 0.0) raw[i] = 0.0;
      peak = std::max(peak, raw[i]);
    }
    x = peak > 0.0 ? Vector(raw / peak) : raw;
  } else {
    throw std::invalid_argument("image requires --pgm FILE or --synthetic");
  }

  const int n = rows * cols;
  int m = static_cast<int>(std::llround(opt.ratio * n));
  if (m < 1 || !(opt.ratio > 0.0)) {
    throw std::invalid_argument("image: --ratio must give at least one measurement");
  }

  if (!opt.save_input.empty()) io::write_pgm(opt.save_input, rows, cols, x);

  MeasurementModel mm;
  mm.A = generate_matrix(m, n, rng);
  Vector clean = mm.A * x;
  mm.y = clean;
  if (opt.snr_db.has_value()) {
    Vector w(m);
    for (int a = 0; a < m; ++a) w[a] = rng.normal();
    const double target = clean.norm() * std::pow(10.0, -*opt.snr_db / 20.0);
    if (w.norm() > 0.0 && target > 0.0) mm.y += w * (target / w.norm());
  }

  Options img_opt = opt;
  if (img_opt.algo == "nnspl2d" || img_opt.algo == "nnspl1d") {
    // Default (and 1D default) promote to the grid inferred from the image.
    img_opt.algo = "nnspl2d";
    img_opt.grid_rows = rows;
    img_opt.grid_cols = cols;
  }
  const TopologyKind kind = parse_algo(img_opt.algo);
  const SolverConfig cfg = make_solver_config(img_opt, kind, n);
  const SolveResult res = AmpSolver(mm, cfg).solve();

  const std::string out = opt.out.empty() ? "recon.pgm" : opt.out;
  io::write_pgm(out, rows, cols, res.xhat);

  bool excluded = false;
  double nmse = std::numeric_limits<double>::quiet_NaN();
  bool pattern = false;
  try {
    nmse = nmse_db(res.xhat, x);
    pattern = pattern_match(res.xhat, x, opt.support_tol);
  } catch (const excluded_trial_error&) {
    excluded = true;
  }

  const std::string metrics = opt.metrics_out.empty() ? "metrics.csv" : opt.metrics_out;
  {
    std::ofstream mcsv(metrics, std::ios::binary);
    if (!mcsv) throw io_error(metrics + ": cannot open for writing");
    mcsv << "ratio,n,m,status,iterations,nmse_db,pattern_success,excluded\n";
    mcsv << io::format_double(opt.ratio) << ',' << n << ',' << m << ','
         << status_name(res.status) << ',' << res.iterations << ','
         << io::format_double(nmse) << ',' << (pattern ? 1 : 0) << ','
         << (excluded ? 1 : 0) << '\n';
    if (!mcsv) throw io_error(metrics + ": write failed");
  }

  if (excluded) {
    std::printf("image: reference signal is zero, trial excluded (NMSE undefined)\n");
  } else {
    std::printf("image: %dx%d ratio=%.3f snr=%s nmse=%.2fdB pattern=%d\n", rows,
                cols, opt.ratio, snr_label(opt.snr_db).c_str(), nmse,
                pattern ? 1 : 0);
  }
  print_summary(res);
  return res.status == SolveStatus::Diverged ? kExitDiverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMP-NNSPL compressed-sensing recovery and benchmarks"};
  app.fallthrough(true);
  Options opt;

  app.set_config("--config")->description("flat key = value file; flags override");
  app.allow_config_extras(false);

  app.add_option("--seed", opt.seed, "base RNG seed");
  app.add_option("--jobs", opt.jobs, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--algo", opt.algo,
                 "topology: nnspl1d | nnspl2d | fullset | indep | custom");
  app.add_option("--algos", opt.algos, "sweep algorithms (comma separated)")
      ->delimiter(',');
  app.add_option("--t-max", opt.t_max, "max iterations")->check(CLI::PositiveNumber);
  app.add_option("--eps-toc", opt.eps_toc, "relative stopping tolerance");
  app.add_option("--snr0", opt.snr0, "initialization SNR guess");
  app.add_option("--damping", opt.damping, "damping factor in (0,1]");
  app.add_option("--lambda-eps", opt.lambda_eps,
                 "sparse-ratio clamp width (0 disables clamping)");
  app.add_option("--success-threshold-db", opt.success_threshold_db,
                 "NMSE success threshold");
  app.add_option("--support-tol", opt.support_tol, "support magnitude threshold");
  app.add_option("--snr", opt.snr_db, "measurement SNR in dB (omit for noiseless)");
  app.add_option("--grid-rows", opt.grid_rows, "grid rows for nnspl2d");
  app.add_option("--grid-cols", opt.grid_cols, "grid cols for nnspl2d");
  app.add_option("--adjacency", opt.adjacency_path, "custom adjacency list file");
  app.add_option("--out", opt.out, "primary output file");
  app.add_option("--n", opt.n, "signal length");
  app.add_option("--k", opt.k, "number of nonzeros");
  app.add_option("--l", opt.l, "number of blocks");
  app.add_option("--mu0", opt.mu0, "active-component mean");
  app.add_option("--tau0", opt.tau0, "active-component variance");
  app.add_option("--ratios", opt.ratios, "M/N grid (comma separated)")
      ->delimiter(',');
  app.add_option("--trials", opt.trials, "trials per grid point")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--trials-out", opt.trials_out, "per-trial CSV path");

  auto* recover =
      app.add_subcommand("recover", "recover a signal from A and y files");
  recover->add_option("--matrix", opt.matrix_path, "matrix file (CSV or AMPV1)");
  recover->add_option("--measurements", opt.measurements_path, "vector file");

  auto* sweep = app.add_subcommand("sweep1d", "phase-transition sweep over M/N");

  auto* image = app.add_subcommand("image", "2D recovery from a PGM or synthetic image");
  image->add_option("--pgm", opt.pgm_path, "input P2/P5 grayscale image");
  image->add_flag("--synthetic", opt.synthetic, "generate a clustered image");
  image->add_option("--rows", opt.rows, "synthetic image rows");
  image->add_option("--cols", opt.cols, "synthetic image cols");
  image->add_option("--sparsity", opt.sparsity, "synthetic nonzero fraction");
  image->add_option("--ratio", opt.ratio, "measurement ratio M/N");
  image->add_option("--metrics-out", opt.metrics_out, "metrics CSV path");
  image->add_option("--save-input", opt.save_input, "write the reference image");

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(recover)) return cmd_recover(opt);
    if (app.got_subcommand(sweep)) return cmd_sweep_1d(opt);
    if (app.got_subcommand(image)) return cmd_image(opt);
    std::fprintf(stderr, "ampcli: expected a subcommand (recover, sweep1d, image)\n");
    return kExitUsage;
  } catch (const io_error& e) {
    std::fprintf(stderr, "ampcli: %s\n", e.what());
    return kExitIo;
  } catch (const excluded_trial_error& e) {
    std::fprintf(stderr, "ampcli: %s\n", e.what());
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ampcli: %s\n", e.what());
    return kExitUsage;
  }
}
