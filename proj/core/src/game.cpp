#include "drmg/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drmg {

// ---------------------------------------------------------------------------
// JointActionSpace
// ---------------------------------------------------------------------------

JointActionSpace::JointActionSpace(std::vector<int> actions_per_agent)
    : actions_(std::move(actions_per_agent)), strides_(actions_.size()) {
  if (actions_.empty()) throw std::invalid_argument("joint action space needs at least one agent");
  num_joint_ = 1;
  for (int i = static_cast<int>(actions_.size()) - 1; i >= 0; --i) {
    if (actions_[i] < 1) throw std::invalid_argument("every agent needs at least one action");
    strides_[i] = num_joint_;
    num_joint_ *= actions_[i];
  }
}

int JointActionSpace::encode(std::span<const int> profile) const {
  return joint_index(profile, actions_);
}

std::vector<int> JointActionSpace::decode(int joint) const { return joint_profile(joint, actions_); }

int JointActionSpace::others_index(int joint, int agent) const {
  const int high = joint / (strides_[agent] * actions_[agent]);
  const int low = joint % strides_[agent];
  return high * strides_[agent] + low;
}

int JointActionSpace::join(int others, int agent, int action) const {
  const int high = others / strides_[agent];
  const int low = others % strides_[agent];
  return (high * actions_[agent] + action) * strides_[agent] + low;
}

int joint_index(std::span<const int> profile, std::span<const int> actions_per_agent) {
  if (profile.size() != actions_per_agent.size()) {
    throw std::out_of_range("profile has " + std::to_string(profile.size()) + " entries, expected " +
                            std::to_string(actions_per_agent.size()));
  }
  int index = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] < 0 || profile[i] >= actions_per_agent[i]) {
      throw std::out_of_range("action " + std::to_string(profile[i]) + " of agent " + std::to_string(i) +
                              " outside [0, " + std::to_string(actions_per_agent[i]) + ")");
    }
    index = index * actions_per_agent[i] + profile[i];
  }
  return index;
}

std::vector<int> joint_profile(int joint, std::span<const int> actions_per_agent) {
  int total = 1;
  for (int a : actions_per_agent) total *= a;
  if (joint < 0 || joint >= total) {
    throw std::out_of_range("joint index " + std::to_string(joint) + " outside [0, " + std::to_string(total) + ")");
  }
  std::vector<int> profile(actions_per_agent.size());
  for (int i = static_cast<int>(actions_per_agent.size()) - 1; i >= 0; --i) {
    profile[i] = joint % actions_per_agent[i];
    joint /= actions_per_agent[i];
  }
  return profile;
}

// ---------------------------------------------------------------------------
// GameSpec
// ---------------------------------------------------------------------------

GameSpec::GameSpec(std::vector<int> actions_per_agent, int num_states, int horizon, Divergence divergence)
    : space_(std::move(actions_per_agent)), num_states_(num_states), horizon_(horizon), divergence_(divergence) {
  if (num_states < 1) throw std::invalid_argument("num_states must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  const std::size_t cells = static_cast<std::size_t>(horizon) * num_states * space_.num_joint();
  rewards_.assign(cells * num_agents(), 0.0);
  radius_.assign(cells * num_agents(), 0.0);
  kernel_.assign(cells * num_states, 0.0);
  base_radii_.assign(num_agents(), 0.0);
}

void GameSpec::set_transition(int h, int s, int a, std::span<const double> row) {
  if (static_cast<int>(row.size()) != num_states_) {
    throw std::invalid_argument("transition row has " + std::to_string(row.size()) + " entries, expected " +
                                std::to_string(num_states_));
  }
  std::copy(row.begin(), row.end(), kernel_.begin() + static_cast<std::ptrdiff_t>(kernel_offset(h, s, a)));
}

void GameSpec::set_base_radius(int agent, double sigma) {
  base_radii_.at(agent) = sigma;
  const std::size_t cells = static_cast<std::size_t>(horizon_) * num_states_ * space_.num_joint();
  std::fill_n(radius_.begin() + static_cast<std::ptrdiff_t>(cells * agent), cells, sigma);
  for (const auto& o : overrides_) {
    if (o.agent < 0 || o.agent == agent) apply_override(o);
  }
}

void GameSpec::add_radius_override(const RadiusOverride& o) {
  if (o.agent >= num_agents() || o.h < 0 || o.h >= horizon_ || o.s < 0 || o.s >= num_states_ ||
      o.joint_action >= num_joint_actions()) {
    throw std::out_of_range("radius override outside the game dimensions");
  }
  overrides_.push_back(o);
  apply_override(o);
}

void GameSpec::apply_override(const RadiusOverride& o) {
  const int first_agent = o.agent < 0 ? 0 : o.agent;
  const int last_agent = o.agent < 0 ? num_agents() : o.agent + 1;
  const int first_a = o.joint_action < 0 ? 0 : o.joint_action;
  const int last_a = o.joint_action < 0 ? num_joint_actions() : o.joint_action + 1;
  for (int i = first_agent; i < last_agent; ++i) {
    for (int a = first_a; a < last_a; ++a) radius_[reward_offset(i, o.h, o.s, a)] = o.sigma;
  }
}

bool GameSpec::any_positive_radius() const {
  return std::any_of(radius_.begin(), radius_.end(), [](double r) { return r > 0.0; });
}

void GameSpec::set_fail_states(std::vector<int> states) {
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  fail_states_ = std::move(states);
}

bool GameSpec::is_fail_state(int s) const {
  return std::binary_search(fail_states_.begin(), fail_states_.end(), s);
}

std::vector<int> GameSpec::start_states() const {
  if (initial_state_) return {*initial_state_};
  std::vector<int> out;
  for (int s = 0; s < num_states_; ++s) {
    if (!is_fail_state(s)) out.push_back(s);
  }
  if (out.empty()) {
    out.resize(num_states_);
    std::iota(out.begin(), out.end(), 0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

bool ValidationReport::has_errors() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::kError; });
}

bool ValidationReport::has_rule(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (const auto& v : violations) {
    out << (v.severity == Severity::kError ? "error" : "assumption") << " [" << v.rule << "] at " << v.location
        << ": " << v.message << '\n';
  }
  return out.str();
}

namespace {

std::string cell(int h, int s, int a) {
  return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

constexpr double kRowSumTolerance = 1e-12;

}  // namespace

ValidationReport validate_spec(const GameSpec& spec) {
  ValidationReport report;
  auto add = [&](Severity sev, std::string rule, std::string where, std::string msg) {
    report.violations.push_back({sev, std::move(rule), std::move(where), std::move(msg)});
  };

  const int S = spec.num_states();
  const int H = spec.horizon();
  const int J = spec.num_joint_actions();
  const int m = spec.num_agents();

  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < J; ++a) {
        const auto row = spec.transition(h, s, a);
        double sum = 0.0;
        bool negative = false;
        for (double p : row) {
          if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
          sum += p;
        }
        if (negative) add(Severity::kError, "kernel-nonnegative", cell(h, s, a), "transition row has a negative entry");
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          add(Severity::kError, "kernel-normalized", cell(h, s, a), "transition row sums to " + std::to_string(sum));
        }
        for (int i = 0; i < m; ++i) {
          const double r = spec.reward(i, h, s, a);
          if (!(r >= 0.0 && r <= 1.0)) {
            add(Severity::kError, "reward-range", "agent " + std::to_string(i) + " " + cell(h, s, a),
                "reward " + std::to_string(r) + " outside [0, 1]");
          }
          const double sigma = spec.radius(i, h, s, a);
          if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
            add(Severity::kError, "radius-nonnegative", "agent " + std::to_string(i) + " " + cell(h, s, a),
                "radius " + std::to_string(sigma) + " is negative or not finite");
          }
        }
      }
    }
  }

  for (int f : spec.fail_states()) {
    if (f < 0 || f >= S) add(Severity::kError, "fail-state-index", "state " + std::to_string(f), "fail state out of range");
  }
  if (spec.initial_state() && (*spec.initial_state() < 0 || *spec.initial_state() >= S)) {
    add(Severity::kError, "initial-state-index", "state " + std::to_string(*spec.initial_state()),
        "initial state out of range");
  }
  if (spec.bernoulli_rewards() && H != 1) {
    add(Severity::kError, "bernoulli-horizon", "rewards", "Bernoulli rewards are only supported with horizon 1");
  }

  if (spec.divergence() == Divergence::kTV && spec.any_positive_radius()) {
    if (spec.fail_states().empty()) {
      add(Severity::kAssumption, "fail-states-missing", "fail_states",
          "TV uncertainty with positive radius requires a non-empty fail-state set");
    }
    for (int f : spec.fail_states()) {
      if (f < 0 || f >= S) continue;
      for (int h = 0; h < H; ++h) {
        for (int a = 0; a < J; ++a) {
          for (int i = 0; i < m; ++i) {
            if (spec.reward(i, h, f, a) != 0.0) {
              add(Severity::kAssumption, "fail-state-reward", "agent " + std::to_string(i) + " " + cell(h, f, a),
                  "fail state must have zero reward");
            }
          }
          const auto row = spec.transition(h, f, a);
          for (int sp = 0; sp < S; ++sp) {
            if (row[sp] > 0.0 && !spec.is_fail_state(sp)) {
              add(Severity::kAssumption, "fail-state-absorbing", cell(h, f, a),
                  "fail state transitions to non-fail state " + std::to_string(sp));
              break;
            }
          }
        }
      }
    }
  }
  return report;
}

void require_well_formed(const GameSpec& spec) {
  const auto report = validate_spec(spec);
  if (report.has_errors()) throw std::invalid_argument("malformed game spec:\n" + report.summary());
}

// ---------------------------------------------------------------------------
// JointPolicy
// ---------------------------------------------------------------------------

JointPolicy::JointPolicy(int horizon, int num_states, JointActionSpace space)
    : horizon_(horizon), num_states_(num_states), space_(std::move(space)) {
  dist_.assign(static_cast<std::size_t>(horizon) * num_states * space_.num_joint(), 0.0);
}

JointPolicy JointPolicy::uniform(const GameSpec& spec) {
  JointPolicy pi(spec.horizon(), spec.num_states(), spec.joint_space());
  std::fill(pi.dist_.begin(), pi.dist_.end(), 1.0 / spec.num_joint_actions());
  pi.product_ = true;
  return pi;
}

void JointPolicy::set_row(int h, int s, std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != space_.num_joint()) {
    throw std::invalid_argument("policy row has wrong length");
  }
  std::copy(probs.begin(), probs.end(), dist_.begin() + static_cast<std::ptrdiff_t>(offset(h, s)));
}

void JointPolicy::set_pure(int h, int s, int joint) {
  auto first = dist_.begin() + static_cast<std::ptrdiff_t>(offset(h, s));
  std::fill(first, first + space_.num_joint(), 0.0);
  first[joint] = 1.0;
}

std::vector<double> JointPolicy::marginal(int h, int s, int agent) const {
  std::vector<double> out(space_.actions(agent), 0.0);
  const auto r = row(h, s);
  for (int a = 0; a < space_.num_joint(); ++a) out[space_.action_of(a, agent)] += r[a];
  return out;
}

std::vector<double> JointPolicy::others_marginal(int h, int s, int agent) const {
  std::vector<double> out(space_.num_others(agent), 0.0);
  const auto r = row(h, s);
  for (int a = 0; a < space_.num_joint(); ++a) out[space_.others_index(a, agent)] += r[a];
  return out;
}

ValidationReport validate_policy(const JointPolicy& policy) {
  ValidationReport report;
  const auto& space = policy.joint_space();
  for (int h = 0; h < policy.horizon(); ++h) {
    for (int s = 0; s < policy.num_states(); ++s) {
      const auto r = policy.row(h, s);
      const std::string where = "(h=" + std::to_string(h) + ", s=" + std::to_string(s) + ")";
      double sum = 0.0;
      for (double p : r) {
        if (!(p >= 0.0)) report.violations.push_back({Severity::kError, "policy-nonnegative", where, "negative entry"});
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        report.violations.push_back({Severity::kError, "policy-normalized", where, "row sums to " + std::to_string(sum)});
      }
      if (policy.product_structured()) {
        std::vector<std::vector<double>> marg;
        for (int i = 0; i < space.num_agents(); ++i) marg.push_back(policy.marginal(h, s, i));
        for (int a = 0; a < space.num_joint(); ++a) {
          double prod = 1.0;
          for (int i = 0; i < space.num_agents(); ++i) prod *= marg[i][space.action_of(a, i)];
          if (std::abs(prod - r[a]) > 1e-10) {
            report.violations.push_back({Severity::kError, "policy-product", where, "row is not a product of marginals"});
            break;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace drmg
