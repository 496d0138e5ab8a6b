// drmg: generate games, run the online learner, and query the oracles.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drmg/equilibria.hpp"
#include "drmg/game.hpp"
#include "drmg/harness.hpp"
#include "drmg/io.hpp"
#include "drmg/robust_dual.hpp"
#include "drmg/robust_planning.hpp"
#include "drmg/types.hpp"

namespace {

void print_vector(const char* label, const std::vector<double>& xs) {
  std::printf("%s", label);
  for (double x : xs) std::printf(" %.10f", x);
  std::printf("\n");
}

struct GenArgs {
  std::string kind = "random";
  std::string out;
  int agents = 2;
  int actions = 2;
  std::vector<int> action_list;
  int states = 3;
  int horizon = 3;
  double sigma = 0.3;
  std::vector<double> radii;
  double epsilon = 0.1;
  std::vector<int> secret;
  std::string divergence = "tv";
  std::uint64_t seed = 0;
  bool fail_state = false;
};

int cmd_gen(const GenArgs& g) {
  drmg::GameSpec spec;
  if (g.kind == "initial-shock") {
    std::vector<int> secret = g.secret.empty() ? std::vector<int>(g.agents, 0) : g.secret;
    spec = drmg::build_initial_shock(g.agents, g.actions, g.horizon, g.sigma, secret, g.fail_state);
  } else if (g.kind == "corrupted-bandit") {
    std::vector<int> actions = g.action_list.empty() ? std::vector<int>(g.agents, g.actions) : g.action_list;
    std::vector<int> secret = g.secret.empty() ? std::vector<int>(actions.size(), 0) : g.secret;
    spec = drmg::build_corrupted_bandit(actions, g.epsilon, g.sigma, secret);
  } else if (g.kind == "random") {
    std::vector<int> actions = g.action_list.empty() ? std::vector<int>(g.agents, g.actions) : g.action_list;
    std::vector<double> radii = g.radii.empty() ? std::vector<double>(actions.size(), g.sigma) : g.radii;
    spec = drmg::build_random_game(static_cast<int>(actions.size()), g.states, actions, g.horizon, radii,
                                   drmg::parse_divergence(g.divergence), g.seed);
  } else {
    throw CLI::ValidationError("--kind", "unknown generator '" + g.kind + "'");
  }
  drmg::save_game_spec(spec, g.out);
  const auto report = drmg::validate_spec(spec);
  if (!report.ok()) std::cerr << report.summary() << "\n";
  return 0;
}

int cmd_run(const std::string& config, const std::string& out) {
  const auto cfg = drmg::load_experiment_config(config);
  const auto s = drmg::run_experiment(cfg, out);
  std::printf("episodes %d  regret %.6f  avg gap %.6f  slope %.4f  certified k=%d (gap %.6f)\n", s.episodes,
              s.total_regret, s.final_avg_gap, s.slope, s.certified_index + 1, s.certified_gap);
  std::printf("wrote %s and %s\n", out.c_str(), drmg::summary_path_for(out).string().c_str());
  return 0;
}

int cmd_eval(const std::string& game_path, const std::string& kind_name) {
  const auto game = drmg::load_matrix_game(game_path);
  const auto kind = drmg::parse_equilibrium_kind(kind_name);
  const auto dist = drmg::solve_equilibrium(game, kind);
  print_vector("distribution", dist);
  print_vector("gains", drmg::deviation_gains(game, dist, kind));
  std::printf("gap %.3e\n", drmg::equilibrium_gap(game, dist, kind));
  return 0;
}

int cmd_oracle_query(const std::string& query_path) {
  const auto stored = drmg::load_support_query(query_path);
  const auto q = stored.view();
  const auto r = drmg::robust_expectation(q);
  std::printf("value %.12f\neta %.12f\n", r.value, r.eta);
  if (q.values.size() <= 6 && q.radius > 0.0) {
    const double brute = drmg::brute_force_support(q);
    std::printf("brute_force %.12f\ndifference %.3e\n", brute, std::fabs(brute - r.value));
  }
  return 0;
}

int cmd_oracle_spec(const std::string& spec_path, const std::string& kind_name, const std::string& out) {
  const auto spec = drmg::load_game_spec(spec_path);
  const auto kind = drmg::parse_equilibrium_kind(kind_name);
  const auto sol = drmg::exact_robust_vi(spec, kind);
  const std::string text = drmg::solution_to_json(spec, sol, kind);
  if (out.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  drmg::write_text_file(out, text + "\n");
  for (int s : spec.start_states()) {
    std::printf("s1=%d", s);
    for (const auto& table : sol.values) std::printf(" %.10f", table.v(0, s));
    std::printf("\n");
  }
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out_dir) {
  const auto configs = drmg::load_sweep_configs(config);
  const auto results = drmg::run_sweep(configs, out_dir);
  for (std::size_t j = 0; j < results.size(); ++j) {
    std::printf("run %zu  seed %llu  regret %.6f  slope %.4f\n", j,
                static_cast<unsigned long long>(results[j].seed), results[j].total_regret, results[j].slope);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning in distributionally robust Markov games"};
  app.require_subcommand(1);

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "Write a game spec JSON");
  gen->add_option("--kind", g.kind, "initial-shock | corrupted-bandit | random")->required();
  gen->add_option("--out", g.out, "Output path")->required();
  gen->add_option("--agents", g.agents, "Number of agents");
  gen->add_option("--actions", g.actions, "Actions per agent");
  gen->add_option("--action-list", g.action_list, "Per-agent action counts");
  gen->add_option("--states", g.states, "Regular states (random)");
  gen->add_option("--horizon", g.horizon, "Horizon H");
  gen->add_option("--sigma", g.sigma, "Radius");
  gen->add_option("--radii", g.radii, "Per-agent radii (random)");
  gen->add_option("--epsilon", g.epsilon, "Secret arm advantage (corrupted-bandit)");
  gen->add_option("--secret", g.secret, "Secret joint action profile");
  gen->add_option("--divergence", g.divergence, "tv | kl (random)");
  gen->add_option("--seed", g.seed, "Seed (random)");
  gen->add_flag("--fail-state", g.fail_state, "Append an absorbing fail state (initial-shock)");

  std::string config, out = "trace.csv";
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Trace CSV path");

  std::string game_path, kind = "cce";
  auto* eval = app.add_subcommand("eval", "Solve a matrix game");
  eval->add_option("--game", game_path, "Matrix game JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--kind", kind, "nash | cce | ce");

  std::string query_path, spec_path, values_out;
  auto* oracle = app.add_subcommand("oracle", "Support function query or exact robust values");
  auto* q_opt = oracle->add_option("--query", query_path, "Support query JSON")->check(CLI::ExistingFile);
  auto* s_opt = oracle->add_option("--spec", spec_path, "Game spec JSON")->check(CLI::ExistingFile);
  oracle->add_option("--kind", kind, "nash | cce | ce");
  oracle->add_option("--out", values_out, "Values JSON path");
  q_opt->excludes(s_opt);

  std::string sweep_config, out_dir = "sweep";
  auto* sweep = app.add_subcommand("sweep", "Run independent experiments in parallel (DRMG_THREADS caps workers)");
  sweep->add_option("--config", sweep_config, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(g);
    if (*run) return cmd_run(config, out);
    if (*eval) return cmd_eval(game_path, kind);
    if (*oracle) {
      if (!query_path.empty()) return cmd_oracle_query(query_path);
      if (spec_path.empty()) throw std::invalid_argument("oracle needs --query or --spec");
      return cmd_oracle_spec(spec_path, kind, values_out);
    }
    if (*sweep) return cmd_sweep(sweep_config, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
