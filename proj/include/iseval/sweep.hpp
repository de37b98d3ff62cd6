#pragma once

// Budget sweep: for a fixed number of evaluations N, build one dataset per
// (k, seed) under BudgetPlan(N, k), train a fresh network on it and compare
// the best validation error
//   - evaluation-equated: within the first `evalaxis_epochs` passes over the
//     dataset (every dataset cost N), and
//   - update-equated: within the first `update_axis_updates` updates.
// Both windows are cut from one training run per (k, seed).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "iseval/error.hpp"
#include "iseval/golden.hpp"
#include "iseval/infoset.hpp"
#include "iseval/parallel.hpp"
#include "iseval/regressor.hpp"

#include <json.hpp>

namespace iseval {

inline const std::vector<std::uint64_t>& default_sweep_ks() {
  static const std::vector<std::uint64_t> ks = {1, 2, 3, 5, 10, 25, 50, 100, 1000};
  return ks;
}

inline TrainConfig default_sweep_train_config() {
  TrainConfig c;
  c.max_updates = 30000;
  c.eval_every = 125;
  c.patience = 20;
  return c;
}

struct SweepConfig {
  std::vector<std::uint64_t> ks = default_sweep_ks();
  std::uint64_t budget = 2'000'000;
  /// Equal update count for the update-equated comparison; 0 means one
  /// update per 100 evaluations of budget.
  std::uint64_t update_axis_updates = 0;
  /// Passes over the dataset counted on the evaluation axis; 0 means train
  /// with patience up to train.max_updates and use the whole trajectory.
  std::uint64_t evalaxis_epochs = 1;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string encoding = "onehot";
  TrainConfig train = default_sweep_train_config();
  unsigned workers = 1;
  /// Emit measured wall-clock seconds; otherwise "NA" so reports stay reproducible.
  bool record_wallclock = false;

  void validate() const {
    if (ks.empty()) throw InvalidInput("sweep needs at least one k");
    for (auto k : ks)
      if (k < 1) throw InvalidInput("every k must be at least 1");
    for (std::size_t i = 0; i < ks.size(); ++i)
      for (std::size_t j = i + 1; j < ks.size(); ++j)
        if (ks[i] == ks[j]) throw InvalidInput("duplicate k " + std::to_string(ks[i]));
    if (seeds.empty()) throw InvalidInput("sweep needs at least one seed");
    if (budget == 0) throw InvalidInput("budget must be positive");
    if (evalaxis_epochs == 0 && update_axis() > train.max_updates)
      throw InvalidInput("update-axis updates exceed the training max updates");
    train.validate();
  }

  std::uint64_t update_axis() const {
    return update_axis_updates > 0 ? update_axis_updates : std::max<std::uint64_t>(1, budget / 100);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["ks"] = ks;
    j["budget"] = budget;
    j["update_axis_updates"] = update_axis();
    j["evalaxis_epochs"] = evalaxis_epochs;
    j["seeds"] = seeds;
    j["encoding"] = encoding;
    j["train"] = train.to_json();
    j["workers"] = workers;
    j["record_wallclock"] = record_wallclock;
    return j;
  }
};

struct RunResult {
  std::uint64_t k = 0;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::uint64_t evaluations = 0;
  std::vector<TrajectoryPoint> trajectory;
  double best_mae_evalaxis = 0;
  double best_mse_evalaxis = 0;
  double best_mae_updateaxis = 0;
  double best_mse_updateaxis = 0;
  std::uint64_t updates_to_best = 0;
  double wallclock_s = 0;
  StopReason stop = StopReason::MaxUpdates;
};

struct RunFailure {
  std::uint64_t k = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  SweepConfig config;
  std::string provider_id;
  std::string golden_sha1;
  /// Indexed [k position * seeds + seed position]; empty where the run is missing.
  std::vector<std::optional<RunResult>> runs;
  std::optional<RunFailure> failure;

  bool complete() const {
    return std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.has_value(); });
  }

  const std::optional<RunResult>& at(std::size_t k_pos, std::size_t seed_pos) const {
    return runs[k_pos * config.seeds.size() + seed_pos];
  }
};

namespace detail {

/// Reduces one training trajectory to both comparison axes.
inline void summarize_run(RunResult& r, std::uint64_t evalaxis_updates, std::uint64_t update_axis_updates) {
  const auto& t = r.trajectory;
  std::size_t best = 0, best_u = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i].updates <= evalaxis_updates && t[i].mae < t[best].mae) best = i;
    if (t[i].updates <= update_axis_updates && t[i].mae < t[best_u].mae) best_u = i;
  }
  r.best_mae_evalaxis = t[best].mae;
  r.best_mse_evalaxis = t[best].mse;
  r.updates_to_best = t[best].updates;
  r.best_mae_updateaxis = t[best_u].mae;
  r.best_mse_updateaxis = t[best_u].mse;
}

}  // namespace detail

/// One training run of the sweep. Checks budget conservation against the
/// provider-side evaluation counter.
template <InformationSetProvider P>
RunResult run_one(const P& provider, const FeatureTable& features, const ValidationSet& validation,
                  const SweepConfig& cfg, std::uint64_t k, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const BudgetPlan plan(cfg.budget, k);
  const std::uint64_t data_seed = stream_id({0x73776565ull, k, seed});
  const Dataset ds = generate_dataset(provider, plan, data_seed, 1);

  std::uint64_t used = 0;
  for (const auto& e : ds.examples) used += e.samples_used;
  if (ds.evaluations != used || ds.evaluations > cfg.budget)
    throw std::logic_error("budget not conserved for k=" + std::to_string(k) + ": counter " +
                           std::to_string(ds.evaluations) + ", labels " + std::to_string(used) + ", budget " +
                           std::to_string(cfg.budget));

  RunResult r;
  r.k = k;
  r.seed = seed;
  r.n = ds.examples.size();
  r.evaluations = ds.evaluations;
  if (ds.examples.empty()) throw InvalidInput("budget smaller than k=" + std::to_string(k) + " leaves no examples");

  TrainConfig tc = cfg.train;
  tc.seed = stream_id({0x7472616Eull, k, seed});
  tc.max_epochs = 0;
  std::uint64_t evalaxis_updates = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t update_axis = cfg.update_axis();
  std::vector<std::uint64_t> checks{update_axis};
  if (cfg.evalaxis_epochs > 0) {
    evalaxis_updates = cfg.evalaxis_epochs * ((r.n + tc.batch_size - 1) / tc.batch_size);
    checks.push_back(evalaxis_updates);
    tc.max_updates = std::max(evalaxis_updates, update_axis);
    tc.min_updates = tc.max_updates;
  } else {
    tc.min_updates = std::max(tc.min_updates, update_axis);
  }
  auto result = train(Mlp::random(layer_sizes(features.width(), tc), tc.seed), make_training_set(ds, features),
                      validation, tc, checks);
  r.trajectory = std::move(result.trajectory);
  r.stop = result.stop;
  detail::summarize_run(r, evalaxis_updates, update_axis);
  r.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Runs every (k, seed) pair, `config.workers` at a time. The first failure
/// stops further runs; finished runs stay in the result and `failure` names
/// the failed pair. Throws NoGroundTruth up front when validation is impossible.
template <InformationSetProvider P>
SweepResult run_sweep(const P& provider, const SweepConfig& config,
                      const std::function<void(const RunResult&)>& on_done = {}) {
  config.validate();
  const FeatureTable features = make_features(provider, config.encoding);
  const ValidationSet validation = make_validation_set(provider, features);

  SweepResult out;
  out.config = config;
  out.provider_id = provider.id();
  if constexpr (requires { provider.golden(); }) {
    if (provider.golden() != nullptr) out.golden_sha1 = provider.golden()->content_sha1();
  }
  const std::size_t n_seeds = config.seeds.size();
  out.runs.resize(config.ks.size() * n_seeds);

  std::atomic<bool> abort{false};
  std::mutex mu;
  std::optional<std::pair<std::size_t, RunFailure>> first_failure;
  // One job per run; jobs are handed out in order so that a failure leaves
  // a prefix of finished runs.
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(out.runs.size())));
  parallel_for(workers, workers, [&](std::size_t) {
    for (;;) {
      if (abort.load()) return;
      const std::size_t job = next.fetch_add(1);
      if (job >= out.runs.size()) return;
      const std::uint64_t k = config.ks[job / n_seeds];
      const std::uint64_t seed = config.seeds[job % n_seeds];
      try {
        auto r = run_one(provider, features, validation, config, k, seed);
        std::lock_guard lock(mu);
        out.runs[job] = std::move(r);
        if (on_done) on_done(*out.runs[job]);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        abort = true;
        if (!first_failure || job < first_failure->first) first_failure = {job, {k, seed, e.what()}};
      }
    }
  });
  if (first_failure) out.failure = first_failure->second;
  return out;
}

// --- reporting -------------------------------------------------------------

struct SeedStats {
  std::size_t present = 0;
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 with one value
  double median = 0;
};

inline SeedStats seed_stats(std::vector<double> v) {
  SeedStats s;
  s.present = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  s.median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  return s;
}

struct KSummary {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  SeedStats mae_evalaxis, mse_evalaxis, mae_updateaxis, mse_updateaxis, updates_to_best;
  std::vector<std::uint64_t> missing_seeds;
};

inline std::vector<KSummary> summarize(const SweepResult& r) {
  std::vector<KSummary> out;
  for (std::size_t i = 0; i < r.config.ks.size(); ++i) {
    KSummary s;
    s.k = r.config.ks[i];
    s.n = BudgetPlan(r.config.budget, s.k).examples();
    std::vector<double> me, se, mu, su, ub;
    for (std::size_t j = 0; j < r.config.seeds.size(); ++j) {
      const auto& run = r.at(i, j);
      if (!run) {
        s.missing_seeds.push_back(r.config.seeds[j]);
        continue;
      }
      me.push_back(run->best_mae_evalaxis);
      se.push_back(run->best_mse_evalaxis);
      mu.push_back(run->best_mae_updateaxis);
      su.push_back(run->best_mse_updateaxis);
      ub.push_back(static_cast<double>(run->updates_to_best));
    }
    s.mae_evalaxis = seed_stats(me);
    s.mse_evalaxis = seed_stats(se);
    s.mae_updateaxis = seed_stats(mu);
    s.mse_updateaxis = seed_stats(su);
    s.updates_to_best = seed_stats(ub);
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline std::string stat_or_na(const SeedStats& s, double SeedStats::*field) {
  return s.present ? format_double(s.*field) : "NA";
}

inline std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : ";") + std::to_string(x);
  return out;
}

}  // namespace detail

inline constexpr const char* kRunsHeader =
    "k,n,seed,best_mae_evalaxis,best_mse_evalaxis,best_mae_updateaxis,best_mse_updateaxis,updates_to_best,wallclock_s";

/// One row per (k, seed); missing runs have every value "missing".
inline std::string runs_csv(const SweepResult& r) {
  std::string out = std::string(kRunsHeader) + '\n';
  for (std::size_t i = 0; i < r.config.ks.size(); ++i) {
    const auto k = r.config.ks[i];
    for (std::size_t j = 0; j < r.config.seeds.size(); ++j) {
      const auto& run = r.at(i, j);
      out += std::to_string(k) + ',' + std::to_string(BudgetPlan(r.config.budget, k).examples()) + ',' +
             std::to_string(r.config.seeds[j]) + ',';
      if (!run) {
        out += "missing,missing,missing,missing,missing,missing\n";
        continue;
      }
      out += format_double(run->best_mae_evalaxis) + ',' + format_double(run->best_mse_evalaxis) + ',' +
             format_double(run->best_mae_updateaxis) + ',' + format_double(run->best_mse_updateaxis) + ',' +
             std::to_string(run->updates_to_best) + ',' +
             (r.config.record_wallclock ? format_fixed(run->wallclock_s, 3) : "NA") + '\n';
    }
  }
  return out;
}

/// One row per k: medians across seeds in the run columns (seed = "median"),
/// then mean and standard deviation and the seeds with no result.
inline std::string summary_csv(const SweepResult& r) {
  using detail::stat_or_na;
  std::string out = std::string(kRunsHeader) +
                    ",mean_mae_evalaxis,std_mae_evalaxis,mean_mae_updateaxis,std_mae_updateaxis,seeds_done,"
                    "missing_seeds\n";
  for (const auto& s : summarize(r)) {
    out += std::to_string(s.k) + ',' + std::to_string(s.n) + ",median," +
           stat_or_na(s.mae_evalaxis, &SeedStats::median) + ',' + stat_or_na(s.mse_evalaxis, &SeedStats::median) +
           ',' + stat_or_na(s.mae_updateaxis, &SeedStats::median) + ',' +
           stat_or_na(s.mse_updateaxis, &SeedStats::median) + ',' +
           stat_or_na(s.updates_to_best, &SeedStats::median) + ",NA," + stat_or_na(s.mae_evalaxis, &SeedStats::mean) +
           ',' + stat_or_na(s.mae_evalaxis, &SeedStats::std) + ',' + stat_or_na(s.mae_updateaxis, &SeedStats::mean) +
           ',' + stat_or_na(s.mae_updateaxis, &SeedStats::std) + ',' + std::to_string(s.mae_evalaxis.present) + ',' +
           (s.missing_seeds.empty() ? "none" : detail::join_seeds(s.missing_seeds)) + '\n';
  }
  return out;
}

/// Long format for plotting: one row per validation check of every run.
inline std::string curves_csv(const SweepResult& r) {
  std::string out = "k,seed,updates,evaluations,mae,mse,mae_weighted\n";
  for (const auto& run : r.runs) {
    if (!run) continue;
    for (const auto& p : run->trajectory)
      out += std::to_string(run->k) + ',' + std::to_string(run->seed) + ',' + std::to_string(p.updates) + ',' +
             std::to_string(p.evaluations) + ',' + format_double(p.mae) + ',' + format_double(p.mse) + ',' +
             format_double(p.mae_weighted) + '\n';
  }
  return out;
}

inline std::string trajectory_file_name(std::uint64_t k, std::uint64_t seed) {
  return "k" + std::to_string(k) + "_seed" + std::to_string(seed) + ".csv";
}

/// Writes runs.csv, summary.csv, curves.csv, sweep.json and
/// trajectories/k<k>_seed<s>.csv under `dir`. Returns the paths written.
inline std::vector<std::string> emit_report(const SweepResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "trajectories", ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  std::vector<std::string> written;
  auto put = [&](const fs::path& p, const std::string& content) {
    write_file(p.string(), content);
    written.push_back(p.string());
  };
  put(fs::path(dir) / "runs.csv", runs_csv(r));
  put(fs::path(dir) / "summary.csv", summary_csv(r));
  put(fs::path(dir) / "curves.csv", curves_csv(r));
  for (const auto& run : r.runs)
    if (run) put(fs::path(dir) / "trajectories" / trajectory_file_name(run->k, run->seed), trajectory_to_csv(run->trajectory));

  nlohmann::ordered_json meta;
  meta["config"] = r.config.to_json();
  meta["config"].erase("workers");
  meta["provider"] = r.provider_id;
  meta["golden_sha1"] = r.golden_sha1;
  meta["complete"] = r.complete();
  if (r.failure) meta["failure"] = {{"k", r.failure->k}, {"seed", r.failure->seed}, {"message", r.failure->message}};
  put(fs::path(dir) / "sweep.json", meta.dump(2) + '\n');
  return written;
}

}  // namespace iseval
