#include "drmg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "drmg/io.hpp"
#include "json.hpp"

namespace drmg {

using nlohmann::json;

void RegretTrace::append(TraceRow row) {
  const double prev = rows.empty() ? 0.0 : rows.back().cum_regret;
  row.cum_regret = prev + row.max_gap;
  rows.push_back(std::move(row));
}

// ---------------------------------------------------------------------------
// Bandit baseline
// ---------------------------------------------------------------------------

RegretTrace run_bandit_baseline(const GameSpec& spec, int episodes, Rng& rng) {
  if (!spec.bernoulli_rewards() || spec.horizon() != 1 || spec.num_states() != 1) {
    throw std::invalid_argument("bandit baseline needs an H = 1, single-state Bernoulli-reward instance");
  }
  if (episodes < 1) throw std::invalid_argument("K must be >= 1");
  const int arms = spec.num_joint_actions();
  double best = 0.0;
  for (int a = 0; a < arms; ++a) best = std::max(best, spec.reward(0, 0, 0, a));

  std::vector<double> sums(arms, 0.0);
  std::vector<std::int64_t> pulls(arms, 0);
  JointPolicy pi(1, 1, spec.joint_space());
  RegretTrace trace;
  trace.kind = EquilibriumKind::kCCE;
  trace.rows.reserve(episodes);

  for (int k = 1; k <= episodes; ++k) {
    int arm = -1;
    if (k <= arms) {
      arm = k - 1;
    } else {
      double best_index = -std::numeric_limits<double>::infinity();
      const double log_t = std::log(static_cast<double>(k));
      for (int a = 0; a < arms; ++a) {
        const double n = static_cast<double>(pulls[a]);
        const double index = sums[a] / n + std::sqrt(2.0 * log_t / n);
        if (index > best_index) {
          best_index = index;
          arm = a;
        }
      }
    }
    pi.set_pure(0, 0, arm);
    const Trajectory traj = simulate_episode(spec, pi, 0, rng);
    sums[arm] += traj.front().rewards[0];
    ++pulls[arm];

    TraceRow row;
    row.episode = k;
    row.s1 = 0;
    row.max_gap = best - spec.reward(0, 0, 0, arm);
    row.agent_gaps.assign(spec.num_agents(), row.max_gap);
    trace.append(std::move(row));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Trace output
// ---------------------------------------------------------------------------

namespace {

void put_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  out += buf;
}

void put_optional(std::string& out, const std::optional<double>& x) {
  if (x) put_number(out, *x);
}

}  // namespace

std::string trace_to_csv(const RegretTrace& trace) {
  std::string out = "k,s1,gap_nash,gap_cce,gap_ce,max_gap,cum_regret,t_ms\n";
  for (const auto& row : trace.rows) {
    out += std::to_string(row.episode);
    out += ',';
    out += std::to_string(row.s1);
    out += ',';
    put_optional(out, row.gap_nash);
    out += ',';
    put_optional(out, row.gap_cce);
    out += ',';
    put_optional(out, row.gap_ce);
    out += ',';
    put_number(out, row.max_gap);
    out += ',';
    put_number(out, row.cum_regret);
    out += ',';
    put_optional(out, row.t_ms);
    out += '\n';
  }
  return out;
}

double loglog_slope(const RegretTrace& trace, double min_fraction) {
  if (trace.rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double k_min = min_fraction * trace.rows.back().episode;
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : trace.rows) {
    if (row.episode < k_min || !(row.cum_regret > 0.0)) continue;
    const double x = std::log(static_cast<double>(row.episode));
    const double y = std::log(row.cum_regret);
    n += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2.0 || denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object() || !j.contains("spec_path")) throw std::invalid_argument("experiment config needs spec_path");
  ExperimentConfig cfg;
  cfg.spec_path = j.at("spec_path").get<std::string>();
  if (cfg.spec_path.is_relative() && !base_dir.empty()) cfg.spec_path = base_dir / cfg.spec_path;
  cfg.episodes = j.value("K", cfg.episodes);
  cfg.delta = j.value("delta", cfg.delta);
  if (j.contains("divergence") && !j.at("divergence").is_null()) {
    cfg.divergence = parse_divergence(j.at("divergence").get<std::string>());
  }
  if (j.contains("kind")) cfg.kind = parse_equilibrium_kind(j.at("kind").get<std::string>());
  cfg.c1 = j.value("c1", cfg.c1);
  cfg.c2 = j.value("c2", cfg.c2);
  cfg.cf = j.value("cf", cfg.cf);
  cfg.eta_floor = j.value("eta_floor", cfg.eta_floor);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.score_every = j.value("score_every", cfg.score_every);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return experiment_config_from_json(text, path.parent_path());
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j{{"spec_path", cfg.spec_path.string()},
         {"K", cfg.episodes},
         {"delta", cfg.delta},
         {"kind", to_string(cfg.kind)},
         {"c1", cfg.c1},
         {"c2", cfg.c2},
         {"cf", cfg.cf},
         {"eta_floor", cfg.eta_floor},
         {"seed", cfg.seed},
         {"score_every", cfg.score_every}};
  if (cfg.divergence) j["divergence"] = to_string(*cfg.divergence);
  return j.dump(1);
}

std::string summary_to_json(const ExperimentSummary& s) {
  json j{{"episodes", s.episodes},
         {"scored_rows", s.scored_rows},
         {"total_regret", s.total_regret},
         {"final_avg_gap", s.final_avg_gap},
         {"certified_index", s.certified_index},
         {"certified_gap", s.certified_gap},
         {"seed", s.seed}};
  // JSON has no NaN; a missing fit is written as null.
  j["slope"] = std::isfinite(s.slope) ? json(s.slope) : json(nullptr);
  return j.dump(1);
}

ExperimentOutcome run_experiment(const GameSpec& spec_in, const ExperimentConfig& cfg) {
  GameSpec spec = spec_in;
  if (cfg.divergence) spec.set_divergence(*cfg.divergence);

  LearnerConfig lc;
  lc.episodes = cfg.episodes;
  lc.delta = cfg.delta;
  lc.divergence = spec.divergence();
  lc.kind = cfg.kind;
  lc.c1 = cfg.c1;
  lc.c2 = cfg.c2;
  lc.cf = cfg.cf;
  lc.eta_floor = cfg.eta_floor;
  lc.seed = cfg.seed;
  lc.score_every = cfg.score_every;

  ExperimentOutcome out;
  out.result = run_online(spec, lc);
  const auto& trace = out.result.trace;
  auto& s = out.summary;
  s.episodes = cfg.episodes;
  s.scored_rows = static_cast<int>(trace.rows.size());
  s.total_regret = trace.total_regret();
  s.slope = loglog_slope(trace);
  s.final_avg_gap = s.total_regret / cfg.episodes;
  s.certified_index = out.result.certified_index;
  for (const auto& row : trace.rows) {
    if (row.episode == s.certified_index + 1) s.certified_gap = row.max_gap;
  }
  s.seed = cfg.seed;
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(load_game_spec(cfg.spec_path), cfg);
}

std::filesystem::path summary_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".summary.json");
  return p;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& csv_path) {
  const ExperimentOutcome out = run_experiment(cfg);
  write_text_file(csv_path, trace_to_csv(out.result.trace));
  write_text_file(summary_path_for(csv_path), summary_to_json(out.summary) + "\n");
  return out.summary;
}

int worker_count() {
  if (const char* env = std::getenv("DRMG_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExperimentSummary> run_sweep(const std::vector<ExperimentConfig>& configs,
                                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ExperimentSummary> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::size_t next = 0;
  std::mutex mu;

  auto work = [&] {
    for (;;) {
      std::size_t j;
      {
        std::lock_guard lock(mu);
        if (next >= configs.size()) return;
        j = next++;
      }
      try {
        results[j] = run_experiment(configs[j], out_dir / ("run_" + std::to_string(j) + ".csv"));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  const int n = std::min<int>(worker_count(), static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<ExperimentConfig> load_sweep_configs(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto base_dir = path.parent_path();
  std::vector<ExperimentConfig> configs;
  try {
    const json j = json::parse(text);
    if (j.is_array()) {
      for (const auto& c : j) configs.push_back(experiment_config_from_json(c.dump(), base_dir));
    } else {
      if (!j.contains("base")) throw std::invalid_argument("sweep needs a list of configs or a base config");
      const ExperimentConfig base = experiment_config_from_json(j.at("base").dump(), base_dir);
      for (const auto& seed : j.value("seeds", std::vector<std::uint64_t>{base.seed})) {
        configs.push_back(base);
        configs.back().seed = seed;
      }
    }
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return configs;
}

}  // namespace drmg
