#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drmg/types.hpp"

namespace drmg {

// ---------------------------------------------------------------------------
// Joint actions
// ---------------------------------------------------------------------------

/// Row-major encoding of joint actions (a_1, ..., a_m). Agent 0 is the most
/// significant digit, so with A = (2, 3) the profile (1, 2) maps to 5. Every
/// module shares this encoding.
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> actions_per_agent);

  int num_agents() const { return static_cast<int>(actions_.size()); }
  int num_joint() const { return num_joint_; }
  int actions(int agent) const { return actions_[agent]; }
  std::span<const int> actions_per_agent() const { return actions_; }
  int stride(int agent) const { return strides_[agent]; }

  int encode(std::span<const int> profile) const;
  std::vector<int> decode(int joint) const;

  int action_of(int joint, int agent) const { return (joint / strides_[agent]) % actions_[agent]; }
  /// Joint index obtained by overwriting agent's action in `joint`.
  int replace(int joint, int agent, int action) const {
    return joint + (action - action_of(joint, agent)) * strides_[agent];
  }

  /// Number of joint actions of everyone except `agent`.
  int num_others(int agent) const { return num_joint_ / actions_[agent]; }
  /// Row-major index of a_{-i} (the profile with agent removed).
  int others_index(int joint, int agent) const;
  /// Inverse of others_index: inserts `action` for `agent` into the a_{-i} index.
  int join(int others, int agent, int action) const;

  bool operator==(const JointActionSpace&) const = default;

 private:
  std::vector<int> actions_;
  std::vector<int> strides_;
  int num_joint_ = 1;
};

/// Free-function form of the joint encoding. Throws std::out_of_range when a
/// component exceeds its action count.
int joint_index(std::span<const int> profile, std::span<const int> actions_per_agent);
std::vector<int> joint_profile(int joint, std::span<const int> actions_per_agent);

// ---------------------------------------------------------------------------
// Game specification
// ---------------------------------------------------------------------------

/// Replaces the base radius on one (h, s, a) cell. `agent` and `joint_action`
/// accept -1 as "every agent" / "every joint action".
struct RadiusOverride {
  int agent = -1;
  int h = 0;
  int s = 0;
  int joint_action = -1;
  double sigma = 0.0;

  bool operator==(const RadiusOverride&) const = default;
};

/// Finite-horizon distributionally robust Markov game. Steps are 0-based
/// (h = 0 .. H-1) everywhere in the library.
///
/// A spec is filled through the setters and then shared read-only; none of
/// the algorithms mutate it.
class GameSpec {
 public:
  GameSpec() = default;
  GameSpec(std::vector<int> actions_per_agent, int num_states, int horizon,
           Divergence divergence = Divergence::kTV);

  int num_agents() const { return space_.num_agents(); }
  int num_states() const { return num_states_; }
  int horizon() const { return horizon_; }
  int num_joint_actions() const { return space_.num_joint(); }
  const JointActionSpace& joint_space() const { return space_; }
  std::span<const int> actions_per_agent() const { return space_.actions_per_agent(); }

  Divergence divergence() const { return divergence_; }
  void set_divergence(Divergence d) { divergence_ = d; }

  double reward(int agent, int h, int s, int a) const { return rewards_[reward_offset(agent, h, s, a)]; }
  void set_reward(int agent, int h, int s, int a, double r) { rewards_[reward_offset(agent, h, s, a)] = r; }

  std::span<const double> transition(int h, int s, int a) const {
    return {kernel_.data() + kernel_offset(h, s, a), static_cast<std::size_t>(num_states_)};
  }
  void set_transition(int h, int s, int a, std::span<const double> row);

  double radius(int agent, int h, int s, int a) const { return radius_[reward_offset(agent, h, s, a)]; }
  double base_radius(int agent) const { return base_radii_[agent]; }
  std::span<const double> base_radii() const { return base_radii_; }
  void set_base_radius(int agent, double sigma);
  void add_radius_override(const RadiusOverride& o);
  const std::vector<RadiusOverride>& radius_overrides() const { return overrides_; }
  /// True if any cell of any agent has a strictly positive radius.
  bool any_positive_radius() const;

  std::span<const int> fail_states() const { return fail_states_; }
  void set_fail_states(std::vector<int> states);
  bool is_fail_state(int s) const;

  /// Rewards are Bernoulli means (H = 1 bandit instances only).
  bool bernoulli_rewards() const { return bernoulli_rewards_; }
  void set_bernoulli_rewards(bool on) { bernoulli_rewards_ = on; }

  /// Pinned initial state; when empty episodes start uniformly over the
  /// non-fail states.
  std::optional<int> initial_state() const { return initial_state_; }
  void set_initial_state(std::optional<int> s) { initial_state_ = s; }

  /// States an episode may start in.
  std::vector<int> start_states() const;

 private:
  std::size_t reward_offset(int agent, int h, int s, int a) const {
    return ((static_cast<std::size_t>(agent) * horizon_ + h) * num_states_ + s) * space_.num_joint() + a;
  }
  std::size_t kernel_offset(int h, int s, int a) const {
    return ((static_cast<std::size_t>(h) * num_states_ + s) * space_.num_joint() + a) * num_states_;
  }
  void apply_override(const RadiusOverride& o);

  JointActionSpace space_;
  int num_states_ = 0;
  int horizon_ = 0;
  Divergence divergence_ = Divergence::kTV;
  std::vector<double> rewards_;  // [i][h][s][a]
  std::vector<double> kernel_;   // [h][s][a][s']
  std::vector<double> radius_;   // [i][h][s][a]
  std::vector<double> base_radii_;
  std::vector<RadiusOverride> overrides_;
  std::vector<int> fail_states_;
  bool bernoulli_rewards_ = false;
  std::optional<int> initial_state_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class Severity {
  kError,       // the spec is malformed (kernel, rewards, radii, indices)
  kAssumption,  // well-formed, but the fail-state structure required by TV learning is absent
};

struct Violation {
  Severity severity = Severity::kError;
  std::string rule;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has_errors() const;
  bool has_rule(std::string_view rule) const;
  std::string summary() const;
};

ValidationReport validate_spec(const GameSpec& spec);

/// Throws std::invalid_argument listing the errors when the spec is malformed.
/// Assumption-level findings are tolerated.
void require_well_formed(const GameSpec& spec);

// ---------------------------------------------------------------------------
// Joint policies
// ---------------------------------------------------------------------------

/// Per-step, per-state distribution over joint actions.
class JointPolicy {
 public:
  JointPolicy() = default;
  JointPolicy(int horizon, int num_states, JointActionSpace space);

  static JointPolicy uniform(const GameSpec& spec);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  const JointActionSpace& joint_space() const { return space_; }

  std::span<const double> row(int h, int s) const {
    return {dist_.data() + offset(h, s), static_cast<std::size_t>(space_.num_joint())};
  }
  void set_row(int h, int s, std::span<const double> probs);
  /// Point mass on one joint action.
  void set_pure(int h, int s, int joint);

  bool product_structured() const { return product_; }
  void set_product_structured(bool on) { product_ = on; }

  /// Distribution of agent's own action at (h, s).
  std::vector<double> marginal(int h, int s, int agent) const;
  /// Distribution of a_{-i} at (h, s), indexed by JointActionSpace::others_index.
  std::vector<double> others_marginal(int h, int s, int agent) const;

  bool operator==(const JointPolicy&) const = default;

 private:
  std::size_t offset(int h, int s) const {
    return (static_cast<std::size_t>(h) * num_states_ + s) * space_.num_joint();
  }

  int horizon_ = 0;
  int num_states_ = 0;
  JointActionSpace space_;
  std::vector<double> dist_;
  bool product_ = false;
};

/// Checks row normalisation (1e-12), non-negativity, and when the product flag
/// is set, factorisation into marginals (1e-10).
ValidationReport validate_policy(const JointPolicy& policy);

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

/// Two-state trap game: state 0 is "good", state 1 is the trap that is left
/// only by playing `secret`. Only (h = 0, s = good) carries a TV radius. With
/// `with_fail_state` an absorbing zero-reward state 2 is appended so that the
/// game satisfies the fail-state structure. Episodes start in the good state.
GameSpec build_initial_shock(int num_agents, int actions_per_agent, int horizon, double sigma,
                             std::span<const int> secret, bool with_fail_state = false);

/// Single-state, H = 1 KL game whose rewards are Bernoulli means:
/// 1/2 + epsilon on the secret joint arm and 1/2 elsewhere.
GameSpec build_corrupted_bandit(std::span<const int> actions_per_agent, double epsilon, double sigma,
                                std::span<const int> secret);

/// Random game with Dirichlet(1) transition rows and uniform rewards. For TV
/// with any positive radius, one absorbing zero-reward fail state is appended
/// after the `num_states` regular states. Deterministic for a fixed seed.
GameSpec build_random_game(int num_agents, int num_states, std::span<const int> actions_per_agent,
                           int horizon, std::span<const double> radii, Divergence divergence,
                           std::uint64_t seed);

}  // namespace drmg
