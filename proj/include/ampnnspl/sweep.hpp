#ifndef AMPNNSPL_SWEEP_HPP
#define AMPNNSPL_SWEEP_HPP

#include "ampnnspl/amp.hpp"
#include "ampnnspl/common.hpp"
#include "ampnnspl/metrics.hpp"
#include "ampnnspl/model.hpp"
#include "ampnnspl/rng.hpp"
#include "ampnnspl/signals.hpp"
#include "ampnnspl/topology.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ampnnspl {

/// One solved instance. `excluded` marks trials whose reference signal was
/// zero (NMSE undefined); such trials never count as successes.
struct TrialRecord {
  std::uint64_t seed = 0;
  double m_over_n = 0.0;
  std::optional<double> snr_db;
  TopologyKind algo = TopologyKind::Chain1D;
  double nmse_db = std::numeric_limits<double>::quiet_NaN();
  bool excluded = false;
  bool success = false;
  bool pattern_success = false;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  double wall_seconds = 0.0;
};

struct AggregateRow {
  double ratio = 0.0;
  TopologyKind algo = TopologyKind::Chain1D;
  int trials = 0;
  double success_rate = 0.0;
  double pattern_rate = 0.0;
  double mean_nmse_db = std::numeric_limits<double>::quiet_NaN();
  double mean_iters = 0.0;
  double mean_seconds = 0.0;
};

struct SweepPlan {
  std::vector<double> ratios;
  int trials = 100;
  BlockSparseSpec signal;
  std::optional<double> snr_db;  // nullopt = noiseless
  std::vector<TopologyKind> algos = {TopologyKind::Chain1D};
  std::uint64_t base_seed = 0;
  SolverConfig solver;
  double success_threshold_db = -60.0;
  double support_tol = 1e-4;
  int jobs = 1;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // laid out (ratio, trial, algo)
  std::vector<AggregateRow> table;   // one row per (ratio, algo)

  const TrialRecord& record(const SweepPlan& plan, int ratio_idx, int trial_idx,
                            int algo_idx) const {
    const std::size_t k =
        (static_cast<std::size_t>(ratio_idx) * plan.trials + trial_idx) *
            plan.algos.size() +
        algo_idx;
    return records[k];
  }
};

namespace detail {

/// Problem instance shared by all algorithms at one (ratio, trial) cell, so
/// algorithm comparisons are paired. In noisy mode the Gaussian noise is
/// rescaled to hit the requested SNR = 20 log10(||Ax|| / ||w||) exactly.
struct TrialInstance {
  MeasurementModel mm;
  Vector x;
  std::uint64_t seed;
};

inline TrialInstance make_trial_instance(const SweepPlan& plan, int ratio_idx,
                                         int trial_idx) {
  const std::uint64_t seed =
      derive_stream(plan.base_seed, ratio_idx, trial_idx);
  Rng rng(seed);
  const int n = plan.signal.n;
  int m = static_cast<int>(std::llround(plan.ratios[ratio_idx] * n));
  if (m < 1) m = 1;

  TrialInstance inst;
  inst.seed = seed;
  inst.mm.A = generate_matrix(m, n, rng);
  inst.x = generate_block_sparse(plan.signal, rng);
  Vector y = inst.mm.A * inst.x;
  if (plan.snr_db.has_value()) {
    Vector w(m);
    for (int a = 0; a < m; ++a) w[a] = rng.normal();
    const double w_norm = w.norm();
    const double target = y.norm() * std::pow(10.0, -*plan.snr_db / 20.0);
    if (w_norm > 0.0 && target > 0.0) {
      y += w * (target / w_norm);
    }
  }
  inst.mm.y = std::move(y);
  return inst;
}

inline TrialRecord run_trial(const SweepPlan& plan, const TrialInstance& inst,
                             TopologyKind algo) {
  TrialRecord rec;
  rec.seed = inst.seed;
  rec.m_over_n = static_cast<double>(inst.mm.m()) / inst.mm.n();
  rec.snr_db = plan.snr_db;
  rec.algo = algo;

  SolverConfig cfg = plan.solver;
  cfg.topology_kind = algo;

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  try {
    res = AmpSolver(inst.mm, cfg).solve();
  } catch (const std::exception&) {
    // Per-trial failures are recorded, never abort the sweep.
    rec.status = SolveStatus::Diverged;
    return rec;
  }
  const auto t1 = std::chrono::steady_clock::now();

  rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.iterations = res.iterations;
  rec.status = res.status;
  try {
    rec.nmse_db = nmse_db(res.xhat, inst.x);
    rec.success = rec.nmse_db < plan.success_threshold_db;
    rec.pattern_success = pattern_match(res.xhat, inst.x, plan.support_tol);
  } catch (const excluded_trial_error&) {
    rec.excluded = true;
  }
  return rec;
}

}  // namespace detail

/// Runs trials x ratios x algorithms and aggregates per (ratio, algorithm).
/// Trials are independent tasks; with jobs > 1 they run on a small thread
/// pool, and results land in preassigned slots so the output never depends
/// on scheduling. Per-trial solver failures are recorded, not thrown.
inline SweepResult run_sweep(const SweepPlan& plan) {
  plan.signal.validate();
  plan.solver.validate();
  if (plan.trials < 0) throw std::invalid_argument("run_sweep: negative trial count");
  if (plan.algos.empty()) throw std::invalid_argument("run_sweep: no algorithms");

  const int num_ratios = static_cast<int>(plan.ratios.size());
  const int num_algos = static_cast<int>(plan.algos.size());
  const std::size_t num_cells =
      static_cast<std::size_t>(num_ratios) * plan.trials;
  const std::size_t num_tasks = num_cells * num_algos;

  SweepResult out;
  out.records.resize(num_tasks);
  if (num_tasks > 0) {
    // One task = one (ratio, trial) cell; the shared instance is built once
    // and solved by every algorithm.
    const auto run_cell = [&](std::size_t cell) {
      const int ratio_idx = static_cast<int>(cell / plan.trials);
      const int trial_idx = static_cast<int>(cell % plan.trials);
      const auto inst = detail::make_trial_instance(plan, ratio_idx, trial_idx);
      for (int algo_idx = 0; algo_idx < num_algos; ++algo_idx) {
        out.records[cell * num_algos + algo_idx] =
            detail::run_trial(plan, inst, plan.algos[algo_idx]);
      }
    };

    const int jobs = std::max(1, plan.jobs);
    if (jobs == 1) {
      for (std::size_t cell = 0; cell < num_cells; ++cell) run_cell(cell);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> workers;
      workers.reserve(jobs);
      for (int j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
          for (std::size_t cell = next.fetch_add(1); cell < num_cells;
               cell = next.fetch_add(1)) {
            run_cell(cell);
          }
        });
      }
      for (auto& w : workers) w.join();
    }
  }

  if (plan.trials > 0) {
    for (int ratio_idx = 0; ratio_idx < num_ratios; ++ratio_idx) {
      for (int algo_idx = 0; algo_idx < num_algos; ++algo_idx) {
        AggregateRow row;
        row.ratio = plan.ratios[ratio_idx];
        row.algo = plan.algos[algo_idx];
        row.trials = plan.trials;
        int successes = 0;
        int patterns = 0;
        int nmse_count = 0;
        double nmse_sum = 0.0;
        double iter_sum = 0.0;
        double sec_sum = 0.0;
        for (int trial_idx = 0; trial_idx < plan.trials; ++trial_idx) {
          const TrialRecord& rec = out.record(plan, ratio_idx, trial_idx, algo_idx);
          successes += rec.success ? 1 : 0;
          patterns += rec.pattern_success ? 1 : 0;
          if (!rec.excluded && std::isfinite(rec.nmse_db)) {
            nmse_sum += rec.nmse_db;
            ++nmse_count;
          }
          iter_sum += rec.iterations;
          sec_sum += rec.wall_seconds;
        }
        row.success_rate = static_cast<double>(successes) / plan.trials;
        row.pattern_rate = static_cast<double>(patterns) / plan.trials;
        row.mean_nmse_db = nmse_count > 0
                               ? nmse_sum / nmse_count
                               : std::numeric_limits<double>::quiet_NaN();
        row.mean_iters = iter_sum / plan.trials;
        row.mean_seconds = sec_sum / plan.trials;
        out.table.push_back(row);
      }
    }
  }
  return out;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_SWEEP_HPP
