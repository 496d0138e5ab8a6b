#include "drmg/robust_planning.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "drmg/equilibria.hpp"
#include "drmg/robust_dual.hpp"

namespace drmg {

ValueTable::ValueTable(int horizon, int num_states, int num_joint)
    : horizon_(horizon),
      num_states_(num_states),
      num_joint_(num_joint),
      v_(static_cast<std::size_t>(horizon + 1) * num_states, 0.0),
      q_(static_cast<std::size_t>(horizon) * num_states * num_joint, 0.0) {}

double true_robust_expectation(const GameSpec& spec, int agent, int h, int s, int a,
                               std::span<const double> next_values) {
  SupportQuery q;
  q.values = next_values;
  q.center = spec.transition(h, s, a);
  q.radius = spec.radius(agent, h, s, a);
  q.divergence = spec.divergence();
  q.value_cap = spec.horizon();
  return robust_expectation(q).value;
}

namespace {

void check_policy(const GameSpec& spec, const JointPolicy& pi) {
  if (pi.horizon() != spec.horizon() || pi.num_states() != spec.num_states() ||
      !(pi.joint_space() == spec.joint_space())) {
    throw std::invalid_argument("policy dimensions do not match the game");
  }
}

void check_agent(const GameSpec& spec, int agent) {
  if (agent < 0 || agent >= spec.num_agents()) throw std::out_of_range("agent index out of range");
}

// Q(h, s, a) = r + worst-case E[V(h+1)] for every (s, a) at step h.
void backup_q(const GameSpec& spec, int agent, int h, ValueTable& table) {
  const auto next = table.layer(h + 1);
  for (int s = 0; s < spec.num_states(); ++s) {
    for (int a = 0; a < spec.num_joint_actions(); ++a) {
      table.q(h, s, a) = spec.reward(agent, h, s, a) + true_robust_expectation(spec, agent, h, s, a, next);
    }
  }
}

}  // namespace

ValueTable robust_policy_eval(const GameSpec& spec, const JointPolicy& pi, int agent) {
  require_well_formed(spec);
  check_policy(spec, pi);
  check_agent(spec, agent);
  ValueTable table(spec.horizon(), spec.num_states(), spec.num_joint_actions());
  for (int h = spec.horizon() - 1; h >= 0; --h) {
    backup_q(spec, agent, h, table);
    for (int s = 0; s < spec.num_states(); ++s) {
      const auto row = pi.row(h, s);
      double v = 0.0;
      for (int a = 0; a < spec.num_joint_actions(); ++a) v += row[a] * table.q(h, s, a);
      table.v(h, s) = v;
    }
  }
  return table;
}

BestResponse robust_best_response(const GameSpec& spec, const JointPolicy& pi, int agent) {
  require_well_formed(spec);
  check_policy(spec, pi);
  check_agent(spec, agent);
  const auto& space = spec.joint_space();
  const int S = spec.num_states();
  const int Ai = space.actions(agent);

  BestResponse br;
  br.values = ValueTable(spec.horizon(), S, spec.num_joint_actions());
  br.deviator_q.assign(static_cast<std::size_t>(spec.horizon()) * S * Ai, 0.0);
  br.policy.assign(static_cast<std::size_t>(spec.horizon()) * S, 0);

  for (int h = spec.horizon() - 1; h >= 0; --h) {
    backup_q(spec, agent, h, br.values);
    for (int s = 0; s < S; ++s) {
      const auto others = pi.others_marginal(h, s, agent);
      double best = -std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int b = 0; b < Ai; ++b) {
        double q = 0.0;
        for (int o = 0; o < space.num_others(agent); ++o) q += others[o] * br.values.q(h, s, space.join(o, agent, b));
        br.deviator_q[(static_cast<std::size_t>(h) * S + s) * Ai + b] = q;
        if (q > best) {
          best = q;
          best_action = b;
        }
      }
      br.values.v(h, s) = best;
      br.policy[static_cast<std::size_t>(h) * S + s] = best_action;
    }
  }
  return br;
}

ModificationValue best_modification_value(const GameSpec& spec, const JointPolicy& pi, int agent) {
  require_well_formed(spec);
  check_policy(spec, pi);
  check_agent(spec, agent);
  const auto& space = spec.joint_space();
  const int S = spec.num_states();
  const int Ai = space.actions(agent);

  ModificationValue mod;
  mod.values = ValueTable(spec.horizon(), S, spec.num_joint_actions());
  mod.swap.assign(static_cast<std::size_t>(spec.horizon()) * S * Ai, 0);

  for (int h = spec.horizon() - 1; h >= 0; --h) {
    backup_q(spec, agent, h, mod.values);
    for (int s = 0; s < S; ++s) {
      const auto row = pi.row(h, s);
      double total = 0.0;
      for (int ai = 0; ai < Ai; ++ai) {
        double best = -std::numeric_limits<double>::infinity();
        int best_swap = ai;
        for (int b = 0; b < Ai; ++b) {
          double v = 0.0;
          for (int o = 0; o < space.num_others(agent); ++o) {
            v += row[space.join(o, agent, ai)] * mod.values.q(h, s, space.join(o, agent, b));
          }
          // identity wins ties, then the lowest index
          if (v > best || (v == best && b == ai)) {
            best = v;
            best_swap = b;
          }
        }
        mod.swap[(static_cast<std::size_t>(h) * S + s) * Ai + ai] = best_swap;
        total += best;
      }
      mod.values.v(h, s) = total;
    }
  }
  return mod;
}

GapReport regret_gap(const GameSpec& spec, const JointPolicy& pi, int s1, EquilibriumKind kind) {
  if (s1 < 0 || s1 >= spec.num_states()) throw std::out_of_range("initial state out of range");
  constexpr double kSlack = 1e-9;
  GapReport report;
  report.per_agent.resize(spec.num_agents());
  double worst = 0.0;
  for (int i = 0; i < spec.num_agents(); ++i) {
    const double base = robust_policy_eval(spec, pi, i).v(0, s1);
    const double dev = kind == EquilibriumKind::kCE ? best_modification_value(spec, pi, i).values.v(0, s1)
                                                    : robust_best_response(spec, pi, i).values.v(0, s1);
    report.per_agent[i] = dev - base;
    worst = std::max(worst, dev - base);
  }
  report.max_gap = std::max(0.0, worst - kSlack);
  return report;
}

RobustSolution exact_robust_vi(const GameSpec& spec, EquilibriumKind kind, double tolerance) {
  require_well_formed(spec);
  const int m = spec.num_agents();
  const int S = spec.num_states();
  const int J = spec.num_joint_actions();

  RobustSolution sol{JointPolicy(spec.horizon(), S, spec.joint_space()), {}};
  sol.policy.set_product_structured(kind == EquilibriumKind::kNash);
  for (int i = 0; i < m; ++i) sol.values.emplace_back(spec.horizon(), S, J);

  for (int h = spec.horizon() - 1; h >= 0; --h) {
    for (int i = 0; i < m; ++i) backup_q(spec, i, h, sol.values[i]);
    for (int s = 0; s < S; ++s) {
      MatrixGame stage(spec.joint_space(), std::vector<std::vector<double>>(m, std::vector<double>(J)));
      for (int i = 0; i < m; ++i) {
        for (int a = 0; a < J; ++a) stage.payoffs[i][a] = sol.values[i].q(h, s, a);
      }
      const auto dist = solve_equilibrium(stage, kind, tolerance);
      sol.policy.set_row(h, s, dist);
      for (int i = 0; i < m; ++i) {
        double v = 0.0;
        for (int a = 0; a < J; ++a) v += dist[a] * sol.values[i].q(h, s, a);
        sol.values[i].v(h, s) = v;
      }
    }
  }
  return sol;
}

}  // namespace drmg
