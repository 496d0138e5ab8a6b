#include "drmg/ronavi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "drmg/equilibria.hpp"
#include "drmg/robust_dual.hpp"

namespace drmg {

// ---------------------------------------------------------------------------
// CountStore
// ---------------------------------------------------------------------------

CountStore::CountStore(int horizon, int num_states, int num_joint)
    : horizon_(horizon), num_states_(num_states), num_joint_(num_joint) {
  const std::size_t cells = static_cast<std::size_t>(horizon) * num_states * num_joint;
  visits_.assign(cells, 0);
  transitions_.assign(cells * num_states, 0);
  empirical_.assign(cells * num_states, 0.0);
}

void CountStore::record(int h, int s, int a, int next) {
  if (h < 0 || h >= horizon_ || s < 0 || s >= num_states_ || a < 0 || a >= num_joint_ || next < 0 ||
      next >= num_states_) {
    throw std::out_of_range("transition (h=" + std::to_string(h) + ", s=" + std::to_string(s) +
                            ", a=" + std::to_string(a) + ", s'=" + std::to_string(next) + ") outside the count store");
  }
  const std::size_t c = cell(h, s, a);
  if (visits_[c] == 0) ++visited_cells_;
  ++visits_[c];
  ++transitions_[c * num_states_ + next];
  ++total_;
  const double n = static_cast<double>(visits_[c]);
  for (int sp = 0; sp < num_states_; ++sp) {
    empirical_[c * num_states_ + sp] = static_cast<double>(transitions_[c * num_states_ + sp]) / n;
  }
}

void CountStore::update(std::span<const Step> trajectory) {
  for (const auto& step : trajectory) record(step.h, step.s, step.a, step.next);
}

// ---------------------------------------------------------------------------
// Bonuses
// ---------------------------------------------------------------------------

void validate_config(const LearnerConfig& cfg) {
  if (cfg.episodes < 1) throw std::invalid_argument("K must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(cfg.c1 > 0.0 && cfg.c2 > 0.0 && cfg.cf > 0.0)) throw std::invalid_argument("bonus constants must be positive");
  if (cfg.eta_floor < 0.0) throw std::invalid_argument("eta_floor must be non-negative");
  if (cfg.score_every < 1) throw std::invalid_argument("score_every must be >= 1");
}

double confidence_log(const GameSpec& spec, const LearnerConfig& cfg) {
  const double S = spec.num_states();
  const double A = spec.num_joint_actions();
  const double H = spec.horizon();
  const double K = cfg.episodes;
  return std::log(S * S * A * H * H * std::pow(K, 1.5) / cfg.delta);
}

double bonus_tv(const GameSpec& spec, const CountStore& counts, const ValueBounds& bounds, const LearnerConfig& cfg,
                int agent, int h, int s, int a) {
  const double iota = confidence_log(spec, cfg);
  const double H = spec.horizon();
  const double n = static_cast<double>(std::max<std::int64_t>(counts.visits(h, s, a), 1));
  const auto p = counts.empirical(h, s, a);
  const auto up = bounds.upper[agent].layer(h + 1);
  const auto lo = bounds.lower[agent].layer(h + 1);

  double mean = 0.0, second = 0.0, width = 0.0;
  for (int sp = 0; sp < spec.num_states(); ++sp) {
    const double mid = 0.5 * (up[sp] + lo[sp]);
    mean += p[sp] * mid;
    second += p[sp] * mid * mid;
    width += p[sp] * (up[sp] - lo[sp]);
  }
  const double variance = std::max(0.0, second - mean * mean);
  return std::sqrt(cfg.c1 * iota * variance / n) + cfg.c2 * H * H * spec.num_states() * iota / std::sqrt(n) +
         2.0 * width / H + 1.0 / std::sqrt(static_cast<double>(cfg.episodes));
}

double bonus_kl(const GameSpec& spec, const CountStore& counts, const LearnerConfig& cfg, int agent, int h, int s,
                int a) {
  const double sigma = spec.radius(agent, h, s, a);
  if (!(sigma > 0.0)) throw std::invalid_argument("the KL bonus needs a positive radius at every cell");
  const double tail = 1.0 / std::sqrt(static_cast<double>(cfg.episodes));
  const double iota = confidence_log(spec, cfg);
  const double n = static_cast<double>(std::max<std::int64_t>(counts.visits(h, s, a), 1));
  double p_min = std::numeric_limits<double>::infinity();
  for (double p : counts.empirical(h, s, a)) {
    if (p > 0.0) p_min = std::min(p_min, p);
  }
  if (!std::isfinite(p_min)) p_min = 1.0;
  return 2.0 * cfg.cf * spec.horizon() / sigma * std::sqrt(iota / (n * p_min)) + tail;
}

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

EpisodePlan plan_episode(const GameSpec& spec, const CountStore& counts, const LearnerConfig& cfg) {
  const int m = spec.num_agents();
  const int S = spec.num_states();
  const int J = spec.num_joint_actions();
  const int H = spec.horizon();
  const double cap = H;

  EpisodePlan plan{JointPolicy(H, S, spec.joint_space()), {}, {}};
  plan.policy.set_product_structured(cfg.kind == EquilibriumKind::kNash);
  for (int i = 0; i < m; ++i) {
    plan.bounds.upper.emplace_back(H, S, J);
    plan.bounds.lower.emplace_back(H, S, J);
  }
  plan.bonus.assign(static_cast<std::size_t>(m) * H * S * J, 0.0);

  SupportQuery query;
  query.divergence = cfg.divergence;
  query.value_cap = cap;
  query.assume_zero_min = cfg.divergence == Divergence::kTV;
  query.eta_floor = cfg.eta_floor;

  for (int h = H - 1; h >= 0; --h) {
    for (int i = 0; i < m; ++i) {
      auto& up = plan.bounds.upper[i];
      auto& lo = plan.bounds.lower[i];
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < J; ++a) {
          double beta = 0.0;
          if (!cfg.zero_bonus) {
            beta = cfg.divergence == Divergence::kTV ? bonus_tv(spec, counts, plan.bounds, cfg, i, h, s, a)
                                                     : bonus_kl(spec, counts, cfg, i, h, s, a);
          }
          plan.bonus[((static_cast<std::size_t>(i) * H + h) * S + s) * J + a] = beta;

          const double r = spec.reward(i, h, s, a);
          query.center = counts.empirical(h, s, a);
          query.radius = spec.radius(i, h, s, a);
          query.values = up.layer(h + 1);
          up.q(h, s, a) = std::min(r + robust_expectation(query).value + beta, cap);
          query.values = lo.layer(h + 1);
          lo.q(h, s, a) = std::max(r + robust_expectation(query).value - beta, 0.0);
        }
      }
    }

    for (int s = 0; s < S; ++s) {
      MatrixGame stage(spec.joint_space(), std::vector<std::vector<double>>(m, std::vector<double>(J)));
      for (int i = 0; i < m; ++i) {
        for (int a = 0; a < J; ++a) stage.payoffs[i][a] = plan.bounds.upper[i].q(h, s, a);
      }
      const auto dist = solve_equilibrium(stage, cfg.kind, 1e-8);
      plan.policy.set_row(h, s, dist);
      for (int i = 0; i < m; ++i) {
        double vu = 0.0, vl = 0.0;
        for (int a = 0; a < J; ++a) {
          vu += dist[a] * plan.bounds.upper[i].q(h, s, a);
          vl += dist[a] * plan.bounds.lower[i].q(h, s, a);
        }
        plan.bounds.upper[i].v(h, s) = std::min(vu, cap);
        plan.bounds.lower[i].v(h, s) = std::max(vl, 0.0);
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Online loop
// ---------------------------------------------------------------------------

OnlineResult run_online(const GameSpec& spec, const LearnerConfig& cfg, const PlanObserver& observer) {
  validate_config(cfg);
  require_well_formed(spec);
  if (spec.divergence() != cfg.divergence) {
    throw std::invalid_argument("learner divergence does not match the game's divergence");
  }
  if (spec.bernoulli_rewards()) {
    throw std::invalid_argument("the online learner needs deterministic rewards; use the bandit baseline");
  }

  std::vector<EquilibriumKind> kinds{cfg.kind};
  for (auto k : cfg.extra_score_kinds) {
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }

  OnlineResult result;
  result.trace.kind = cfg.kind;
  result.counts = CountStore(spec);
  result.policies.reserve(cfg.episodes);
  Rng rng(cfg.seed);
  double best_gap = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= cfg.episodes; ++k) {
    const auto start = std::chrono::steady_clock::now();
    EpisodePlan plan = plan_episode(spec, result.counts, cfg);
    if (observer) observer(k, plan);

    const int s1 = sample_initial_state(spec, rng);
    const Trajectory traj = simulate_episode(spec, plan.policy, s1, rng);
    result.counts.update(traj);

    const bool scored = (k - 1) % cfg.score_every == 0 || k == cfg.episodes;
    if (scored) {
      TraceRow row;
      row.episode = k;
      row.s1 = s1;
      for (auto kind : kinds) {
        const GapReport gap = regret_gap(spec, plan.policy, s1, kind);
        switch (kind) {
          case EquilibriumKind::kNash:
            row.gap_nash = gap.max_gap;
            break;
          case EquilibriumKind::kCCE:
            row.gap_cce = gap.max_gap;
            break;
          case EquilibriumKind::kCE:
            row.gap_ce = gap.max_gap;
            break;
        }
        if (kind == cfg.kind) {
          row.agent_gaps = gap.per_agent;
          row.max_gap = gap.max_gap;
        }
      }
      row.visited_cells = result.counts.visited_cells();
      if (cfg.record_timing) {
        row.t_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
      if (row.max_gap < best_gap) {
        best_gap = row.max_gap;
        result.certified_index = k - 1;
      }
      result.trace.append(std::move(row));
    }
    result.initial_states.push_back(s1);
    result.policies.push_back(std::move(plan.policy));
  }
  return result;
}

}  // namespace drmg
