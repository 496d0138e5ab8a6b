// Acceptance runner. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any selected criterion fails. `--only N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "drmg/equilibria.hpp"
#include "drmg/harness.hpp"
#include "drmg/io.hpp"
#include "drmg/robust_dual.hpp"
#include "drmg/robust_planning.hpp"
#include "drmg/ronavi.hpp"
#include "reference.hpp"

using namespace drmg;
namespace ref = drmg::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

JointPolicy random_policy(const GameSpec& g, std::mt19937_64& rng) {
  JointPolicy pi(g.horizon(), g.num_states(), g.joint_space());
  for (int h = 0; h < g.horizon(); ++h) {
    for (int s = 0; s < g.num_states(); ++s) pi.set_row(h, s, ref::random_simplex(g.num_joint_actions(), rng));
  }
  return pi;
}

GameSpec reference_game(Divergence d) {
  const std::vector<int> A{2, 2};
  return build_random_game(2, 3, A, 3, std::vector<double>{0.2, 0.2}, d, 7);
}

// 1. TV dual against the LP primal.
Outcome tv_dual() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double H = 5.0;
  double worst = 0.0, dual_time = 0.0;
  for (int n = 0; n < 200; ++n) {
    const int S = dim(rng);
    const auto V = ref::random_values(S, H, rng);
    const auto P = ref::random_simplex(S, rng);
    SupportQuery q;
    q.values = V;
    q.center = P;
    q.radius = unit(rng);
    q.divergence = Divergence::kTV;
    q.value_cap = H;
    const auto t0 = Clock::now();
    const double dual = tv_support(q).value;
    dual_time += seconds_since(t0);
    worst = std::max(worst, std::abs(dual - brute_force_support(q)));
  }
  return {worst <= 1e-8 && dual_time < 1.0,
          "max |dual - LP| = " + fmt("%.3e", worst) + ", dual time " + fmt("%.4f", dual_time) + " s"};
}

// 2. KL dual against the simplex grid.
Outcome kl_dual() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> radius(0.01, 1.0);
  const double H = 3.0;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int n = 0; n < 100; ++n) {
    const auto V = ref::random_values(3, H, rng);
    const auto P = ref::random_simplex(3, rng);
    SupportQuery q;
    q.values = V;
    q.center = P;
    q.radius = radius(rng);
    q.divergence = Divergence::kKL;
    q.value_cap = H;
    worst = std::max(worst, std::abs(kl_support(q).value - brute_force_support(q, 1e-3)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-4 && t < 30.0, "max |dual - grid| = " + fmt("%.3e", worst) + ", " + fmt("%.2f", t) + " s"};
}

// 3. Zero radius reduces to plain dynamic programming.
Outcome zero_radius() {
  std::mt19937_64 rng(303);
  const std::vector<int> A{2, 2};
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const auto d = n % 2 == 0 ? Divergence::kTV : Divergence::kKL;
    const auto g = build_random_game(2, 4, A, 3, std::vector<double>{0.0, 0.0}, d, 3000 + n);
    const auto pi = random_policy(g, rng);
    for (int i = 0; i < 2; ++i) {
      const auto robust = robust_policy_eval(g, pi, i);
      const auto plain = ref::plain_policy_eval(g, pi, i);
      for (int h = 0; h < 3; ++h) {
        for (int s = 0; s < 4; ++s) worst = std::max(worst, std::abs(robust.v(h, s) - plain[h][s]));
      }
    }
    for (auto kind : {EquilibriumKind::kCCE, EquilibriumKind::kCE}) {
      const auto sol = exact_robust_vi(g, kind);
      const auto plain = ref::plain_equilibrium_vi(g, kind);
      for (int i = 0; i < 2; ++i) {
        for (int h = 0; h < 3; ++h) {
          for (int s = 0; s < 4; ++s) worst = std::max(worst, std::abs(sol.values[i].v(h, s) - plain.v[i][h][s]));
        }
      }
    }
  }
  return {worst <= 1e-10, "max deviation " + fmt("%.3e", worst)};
}

// 4. Matrix-game equilibria.
Outcome equilibria() {
  std::mt19937_64 rng(404);
  const std::vector<std::vector<int>> shapes{{2, 2}, {3, 3}, {2, 5}, {4, 3}, {2, 2, 2}, {3, 3, 3}, {2, 3, 4}};
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const auto g = ref::random_matrix_game(shapes[n % shapes.size()], rng);
    for (auto kind : {EquilibriumKind::kCCE, EquilibriumKind::kCE}) {
      worst = std::max(worst, equilibrium_gap(g, solve_equilibrium(g, kind), kind));
    }
  }
  const MatrixGame pennies(JointActionSpace({2, 2}), {{1, -1, -1, 1}, {-1, 1, 1, -1}});
  const auto d = solve_equilibrium(pennies, EquilibriumKind::kNash);
  const double row0 = d[0] + d[1], col0 = d[0] + d[2];
  const double pennies_err = std::max(std::abs(row0 - 0.5), std::abs(col0 - 0.5));
  return {worst <= 1e-6 && pennies_err <= 1e-9,
          "max CCE/CE gap " + fmt("%.3e", worst) + ", pennies marginal error " + fmt("%.3e", pennies_err)};
}

// 5. Span of robust values under the fail-state structure.
Outcome value_span() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> radius(0.1, 1.0);
  std::uniform_int_distribution<int> states(2, 4), horizon(2, 6);
  double worst_excess = -1e300;
  int tables = 0;
  for (int n = 0; n < 50; ++n) {
    const std::vector<int> A{2, 2};
    const std::vector<double> radii{radius(rng), radius(rng)};
    const auto g = build_random_game(2, states(rng), A, horizon(rng), radii, Divergence::kTV, 5000 + n);
    if (!validate_spec(g).ok()) return {false, "generated game " + std::to_string(n) + " violates the fail-state structure"};
    const auto pi = random_policy(g, rng);
    const auto vi = exact_robust_vi(g, EquilibriumKind::kCCE);
    for (int i = 0; i < 2; ++i) {
      const ValueTable evaluated[] = {robust_policy_eval(g, pi, i), robust_best_response(g, pi, i).values,
                                      vi.values[i]};
      for (const auto& t : evaluated) {
        ++tables;
        for (int h = 0; h < g.horizon(); ++h) {
          const auto layer = t.layer(h);
          const double span = *std::max_element(layer.begin(), layer.end()) - *std::min_element(layer.begin(), layer.end());
          const double bound = std::min(1.0 / radii[i], static_cast<double>(g.horizon() - h));
          worst_excess = std::max(worst_excess, span - bound);
        }
      }
    }
  }
  return {worst_excess <= 1e-9,
          std::to_string(tables) + " tables, max(span - bound) = " + fmt("%.3e", worst_excess)};
}

// 6. Optimistic and pessimistic estimates bracket the true robust values.
struct SandwichCount {
  long cells = 0;
  long violations = 0;
  long informative = 0;  // cells where either bound is off its clip value
};

SandwichCount sandwich_runs(double c, int episodes) {
  SandwichCount count;
  std::mt19937_64 pick(606);
  for (int run = 0; run < 50; ++run) {
    const int S = 2 + static_cast<int>(pick() % 3);  // 2..4 including the TV fail state
    const int H = 2 + static_cast<int>(pick() % 2);
    const auto d = run % 2 == 0 ? Divergence::kTV : Divergence::kKL;
    const int regular = d == Divergence::kTV ? S - 1 : S;
    const std::vector<int> A{2, 2};
    const auto g = build_random_game(2, regular, A, H, std::vector<double>{0.2, 0.3}, d, 6000 + run);
    LearnerConfig cfg;
    cfg.divergence = d;
    cfg.delta = 0.05;
    cfg.episodes = episodes;
    cfg.seed = run;
    cfg.c1 = cfg.c2 = cfg.cf = c;
    run_online(g, cfg, [&](int, const EpisodePlan& plan) {
      for (int i = 0; i < 2; ++i) {
        const auto value = robust_policy_eval(g, plan.policy, i);
        const auto dev = robust_best_response(g, plan.policy, i).values;
        for (int h = 0; h < g.horizon(); ++h) {
          for (int s = 0; s < g.num_states(); ++s) {
            for (int a = 0; a < g.num_joint_actions(); ++a) {
              ++count.cells;
              if (plan.bounds.lower[i].q(h, s, a) > 0.0 || plan.bounds.upper[i].q(h, s, a) < g.horizon()) {
                ++count.informative;
              }
              const bool low_ok = plan.bounds.lower[i].q(h, s, a) <= value.q(h, s, a) + 1e-9;
              const bool high_ok = dev.q(h, s, a) <= plan.bounds.upper[i].q(h, s, a) + 1e-9;
              if (!low_ok || !high_ok) ++count.violations;
            }
          }
        }
      }
    });
  }
  return count;
}

Outcome sandwich() {
  const auto gate = sandwich_runs(1.0, 200);
  const auto tuned = sandwich_runs(0.1, 200);
  const double rate = static_cast<double>(gate.violations) / gate.cells;
  const double tuned_rate = static_cast<double>(tuned.violations) / tuned.cells;
  return {rate <= 0.05 && tuned_rate <= 0.05,
          "violation rate " + fmt("%.4f", rate) + " over " + std::to_string(gate.cells) + " cells with " +
              std::to_string(gate.informative) + " unclipped (c = 1), " + fmt("%.4f", tuned_rate) + " with " +
              std::to_string(tuned.informative) + " unclipped (c = 0.1)"};
}

// 7. Sublinear regret on the reference game.
Outcome sublinear_regret() {
  bool pass = true;
  std::string detail;
  for (auto d : {Divergence::kTV, Divergence::kKL}) {
    const auto g = reference_game(d);
    LearnerConfig cfg;
    cfg.divergence = d;
    cfg.episodes = 2000;
    cfg.seed = 1;
    cfg.c1 = cfg.c2 = cfg.cf = 0.1;
    long saturated = 0, cells = 0;
    const auto t0 = Clock::now();
    const auto res = run_online(g, cfg, [&](int k, const EpisodePlan& plan) {
      if (k != cfg.episodes) return;
      for (int i = 0; i < 2; ++i) {
        for (int s = 0; s < g.num_states(); ++s) {
          for (int a = 0; a < g.num_joint_actions(); ++a) {
            ++cells;
            if (plan.bounds.upper[i].q(0, s, a) >= g.horizon()) ++saturated;
          }
        }
      }
    });
    const double t = seconds_since(t0);
    const auto& rows = res.trace.rows;
    const double slope = loglog_slope(res.trace);
    const double avg200 = rows[199].cum_regret / 200.0;
    const double avg2000 = rows.back().cum_regret / 2000.0;
    const bool ok = slope > 0.0 && slope < 0.9 && avg2000 < 0.5 * avg200 && t < 600.0;
    pass = pass && ok;
    detail += std::string(d == Divergence::kTV ? "TV" : "KL") + ": slope " + fmt("%.3f", slope) + ", avg gap " +
              fmt("%.3f", avg200) + " -> " + fmt("%.3f", avg2000) + ", upper Q at cap on " +
              std::to_string(saturated) + "/" + std::to_string(cells) + " first-step cells, " + fmt("%.1f", t) + " s; ";
  }
  return {pass, detail};
}

// 8. Initial Shock uniform-policy gap.
Outcome initial_shock() {
  const int N = 2, M = 2, H = 6;
  const double sigma = 0.3;
  const std::vector<int> secret{1, 0};
  const auto g = build_initial_shock(N, M, H, sigma, secret);
  const int C = H - 1;
  const double p = 1.0 / std::pow(M, N), p_dev = 1.0 / std::pow(M, N - 1);
  const double expected = sigma * (ref::wasted_steps_closed_form(p, C) - ref::wasted_steps_closed_form(p_dev, C));
  const double measured = regret_gap(g, JointPolicy::uniform(g), 0, EquilibriumKind::kCCE).max_gap;
  const double err = std::abs(measured - expected);
  return {err <= 1e-8, "gap " + fmt("%.10f", measured) + ", expected " + fmt("%.10f", expected)};
}

// 9. Bandit baseline regret grows with the number of joint arms.
Outcome bandit_scaling() {
  std::vector<double> medians;
  std::string detail;
  for (int M : {2, 3, 4}) {
    const std::vector<int> A{M, M};
    std::vector<double> totals;
    for (int seed = 0; seed < 20; ++seed) {
      const std::vector<int> secret{seed % M, (seed / M) % M};
      const auto g = build_corrupted_bandit(A, 0.1, 0.1, secret);
      Rng rng(900 + seed);
      totals.push_back(run_bandit_baseline(g, 10000, rng).total_regret());
    }
    std::sort(totals.begin(), totals.end());
    medians.push_back(0.5 * (totals[9] + totals[10]));
    detail += std::to_string(M * M) + " arms: " + fmt("%.1f", medians.back()) + "; ";
  }
  return {medians[0] < medians[1] && medians[1] < medians[2], detail};
}

// 10. Byte-identical traces.
Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "drmg_acceptance_determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  save_game_spec(reference_game(Divergence::kTV), dir / "game.json");
  ExperimentConfig cfg;
  cfg.spec_path = dir / "game.json";
  cfg.episodes = 60;
  cfg.seed = 42;
  cfg.c1 = cfg.c2 = 0.1;
  run_experiment(cfg, dir / "a.csv");
  run_experiment(cfg, dir / "b.csv");
  const auto a = read_text_file(dir / "a.csv");
  const auto b = read_text_file(dir / "b.csv");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--only" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"TV dual matches LP primal", tv_dual},
      {"KL dual matches grid oracle", kl_dual},
      {"zero radius reduces to plain DP", zero_radius},
      {"CCE/CE gaps and matching pennies", equilibria},
      {"robust value span bound", value_span},
      {"optimism sandwich", sandwich},
      {"sublinear regret on the reference game", sublinear_regret},
      {"Initial Shock gap", initial_shock},
      {"bandit regret scaling", bandit_scaling},
      {"byte-identical traces", determinism},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only != 0 && only != static_cast<int>(c) + 1) continue;
    Outcome out;
    try {
      out = criteria[c].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %zu. %s: %s\n", out.pass ? "PASS" : "FAIL", c + 1, criteria[c].first.c_str(), out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
