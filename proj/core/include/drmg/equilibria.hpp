#pragma once

#include <span>
#include <vector>

#include "drmg/game.hpp"
#include "drmg/types.hpp"

namespace drmg {

/// One-shot game: payoffs[i][a] for agent i and joint action a (row-major).
struct MatrixGame {
  JointActionSpace space;
  std::vector<std::vector<double>> payoffs;

  MatrixGame() = default;
  MatrixGame(JointActionSpace space, std::vector<std::vector<double>> payoffs);

  int num_agents() const { return space.num_agents(); }
  int num_joint() const { return space.num_joint(); }
};

/// Largest joint action count for which general-sum Nash is attempted.
inline constexpr int kMaxGeneralSumNashJoint = 64;

/// Finds a distribution over joint actions whose equilibrium gap is at most
/// `tolerance`.
///
///  - CCE / CE: linear feasibility over the simplex with no-deviation
///    constraints; among feasible points the total payoff is maximised, then
///    mass is pushed toward low joint indices.
///  - NASH: exact LP for two-player zero-sum games, otherwise support
///    enumeration (games with at most kMaxGeneralSumNashJoint joint actions).
///    The result is a product distribution.
///
/// Throws UnsupportedError for Nash on larger general-sum games and
/// std::runtime_error if no candidate meets the tolerance.
std::vector<double> solve_equilibrium(const MatrixGame& game, EquilibriumKind kind, double tolerance = 1e-8);

/// Per-agent incentive to deviate from `dist`.
///   NASH / CCE: best fixed deviation against the marginal of the others.
///   CE: best swap function, chosen per recommended action.
std::vector<double> deviation_gains(const MatrixGame& game, std::span<const double> dist, EquilibriumKind kind);

/// max_i deviation_gains(...)[i], clipped below at 0.
double equilibrium_gap(const MatrixGame& game, std::span<const double> dist, EquilibriumKind kind);

/// Joint distribution of independent per-agent mixed strategies.
std::vector<double> product_distribution(const JointActionSpace& space, const std::vector<std::vector<double>>& mixes);

}  // namespace drmg
