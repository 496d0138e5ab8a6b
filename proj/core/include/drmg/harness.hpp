#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drmg/game.hpp"
#include "drmg/ronavi.hpp"
#include "drmg/simulation.hpp"
#include "drmg/trace.hpp"
#include "drmg/types.hpp"

namespace drmg {

/// UCB1 over the joint arms of an H = 1 Bernoulli-reward instance. Every
/// round is one row whose max_gap is the pseudo-regret of the pulled arm
/// (best mean minus pulled mean), so cum_regret is the cumulative
/// pseudo-regret. Throws std::invalid_argument for any other instance type.
RegretTrace run_bandit_baseline(const GameSpec& spec, int episodes, Rng& rng);

/// CSV with the fixed header
///   k,s1,gap_nash,gap_cce,gap_ce,max_gap,cum_regret,t_ms
/// Numbers use %.12e; unscored gaps and unrecorded times are blank.
std::string trace_to_csv(const RegretTrace& trace);

/// Least-squares slope of log(cum_regret) against log(k) over rows with
/// k >= min_fraction * last k and positive cumulative regret. NaN when fewer
/// than two rows qualify.
double loglog_slope(const RegretTrace& trace, double min_fraction = 0.1);

/// {spec_path, K, delta, divergence, kind, c1, c2, cf, eta_floor, seed, score_every}.
struct ExperimentConfig {
  std::filesystem::path spec_path;
  int episodes = 100;
  double delta = 0.05;
  /// Overrides the spec's divergence when set.
  std::optional<Divergence> divergence;
  EquilibriumKind kind = EquilibriumKind::kCCE;
  double c1 = 1.0;
  double c2 = 1.0;
  double cf = 1.0;
  double eta_floor = 0.0;
  std::uint64_t seed = 0;
  int score_every = 1;
};

/// Relative spec paths are resolved against `base_dir`.
ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct ExperimentSummary {
  int episodes = 0;
  int scored_rows = 0;
  double total_regret = 0.0;
  double slope = 0.0;
  /// cum_regret / K at the last episode.
  double final_avg_gap = 0.0;
  /// 0-based index of the executed policy with the smallest measured gap.
  int certified_index = 0;
  double certified_gap = 0.0;
  std::uint64_t seed = 0;
};

std::string summary_to_json(const ExperimentSummary& summary);

struct ExperimentOutcome {
  OnlineResult result;
  ExperimentSummary summary;
};

/// Loads the spec, runs the online learner, and summarises the trace.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);
ExperimentOutcome run_experiment(const GameSpec& spec, const ExperimentConfig& cfg);

/// Runs an experiment and writes the trace CSV to `csv_path` and the summary
/// next to it (same stem, ".summary.json").
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& csv_path);

std::filesystem::path summary_path_for(const std::filesystem::path& csv_path);

/// Worker count: DRMG_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs independent experiments on up to worker_count() threads. Run j writes
/// out_dir/run_<j>.csv and its summary. Results keep the input order; the
/// first failure is rethrown after all workers finish.
std::vector<ExperimentSummary> run_sweep(const std::vector<ExperimentConfig>& configs,
                                         const std::filesystem::path& out_dir);

/// Either a list of experiment configs or {"base": config, "seeds": [...]}.
std::vector<ExperimentConfig> load_sweep_configs(const std::filesystem::path& path);

}  // namespace drmg
