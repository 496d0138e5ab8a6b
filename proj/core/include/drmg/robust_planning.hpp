#pragma once

#include <vector>

#include "drmg/game.hpp"
#include "drmg/types.hpp"

namespace drmg {

/// Robust value and Q tables of one agent. V has H + 1 layers, the last one
/// identically zero; Q is indexed by joint action.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(int horizon, int num_states, int num_joint);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_joint() const { return num_joint_; }

  double& v(int h, int s) { return v_[static_cast<std::size_t>(h) * num_states_ + s]; }
  double v(int h, int s) const { return v_[static_cast<std::size_t>(h) * num_states_ + s]; }
  double& q(int h, int s, int a) { return q_[(static_cast<std::size_t>(h) * num_states_ + s) * num_joint_ + a]; }
  double q(int h, int s, int a) const { return q_[(static_cast<std::size_t>(h) * num_states_ + s) * num_joint_ + a]; }

  /// V at step h as a vector over states (h may equal H).
  std::span<const double> layer(int h) const {
    return {v_.data() + static_cast<std::size_t>(h) * num_states_, static_cast<std::size_t>(num_states_)};
  }

 private:
  int horizon_ = 0;
  int num_states_ = 0;
  int num_joint_ = 0;
  std::vector<double> v_;
  std::vector<double> q_;
};

/// Worst-case expectation of `next_values` over agent i's uncertainty set at
/// (h, s, a) around the spec's nominal kernel.
double true_robust_expectation(const GameSpec& spec, int agent, int h, int s, int a,
                               std::span<const double> next_values);

/// Robust Bellman recursion for a fixed joint policy:
///   Q(h,s,a) = r_i(h,s,a) + inf_{P in U_i(h,s,a)} E_P[V(h+1)],  V(h,s) = E_{pi}[Q(h,s,.)].
ValueTable robust_policy_eval(const GameSpec& spec, const JointPolicy& pi, int agent);

struct BestResponse {
  /// V^dagger, and Q^dagger over joint actions: r + worst-case E[V^dagger(h+1)].
  ValueTable values;
  /// Q^dagger over the deviator's own actions against the others' marginal.
  std::vector<double> deviator_q;  // [h][s][a_i]
  /// Deterministic best action per (h, s); ties go to the lowest index.
  std::vector<int> policy;         // [h][s]
};

/// Robust best response of `agent` to the marginal of the other agents.
BestResponse robust_best_response(const GameSpec& spec, const JointPolicy& pi, int agent);

struct ModificationValue {
  ValueTable values;
  /// Chosen swap phi(h, s, a_i).
  std::vector<int> swap;  // [h][s][a_i]
};

/// Robust value of the best strategy modification phi o pi for `agent`.
ModificationValue best_modification_value(const GameSpec& spec, const JointPolicy& pi, int agent);

struct GapReport {
  std::vector<double> per_agent;  // deviation value minus policy value at s1
  double max_gap = 0.0;           // max over agents, minus 1e-9 slack, clipped at 0
};

/// Equilibrium gap of pi at initial state s1 under the true robust model.
GapReport regret_gap(const GameSpec& spec, const JointPolicy& pi, int s1, EquilibriumKind kind);

struct RobustSolution {
  JointPolicy policy;
  std::vector<ValueTable> values;  // per agent, under `policy`
};

/// Single backward pass with the true kernel: per-state equilibrium of the
/// robust Q matrices, then values under the chosen distribution.
RobustSolution exact_robust_vi(const GameSpec& spec, EquilibriumKind kind, double tolerance = 1e-9);

}  // namespace drmg
