#pragma once

#include <span>

#include "drmg/types.hpp"

namespace drmg {

/// One worst-case expectation problem: inf { E_Q[V] : D(Q || P) <= radius }.
struct SupportQuery {
  std::span<const double> values;  // V over next states, entries in [0, value_cap]
  std::span<const double> center;  // nominal or empirical distribution P
  double radius = 0.0;
  Divergence divergence = Divergence::kTV;
  /// Upper end of the value range (H). Bounds the TV dual variable to [0, H]
  /// and the KL dual variable to [eta_floor, H / radius].
  double value_cap = 1.0;
  /// TV only: replace min_s V(s) by 0 in the dual (fail states absorb the shifted mass).
  bool assume_zero_min = false;
  /// KL only: lower end of the dual interval; <= 0 selects 1e-8 * value_cap.
  double eta_floor = 0.0;
};

struct SupportResult {
  double value = 0.0;
  double eta = 0.0;  // maximising dual variable (0 for the eta -> 0+ limit)
};

/// TV support function over the ball (1/2)||Q - P||_1 <= radius, maximised
/// exactly over the breakpoints of the concave piecewise-linear dual objective
///   eta - E_P[(eta - V)_+] - radius (eta - v_min)_+,   eta in [0, H].
SupportResult tv_support(const SupportQuery& q);

/// Value of the TV dual objective at a single eta.
double tv_dual_objective(const SupportQuery& q, double eta);

/// KL support function
///   sup_{eta in [floor, H / radius]}  -eta log E_P[exp(-V / eta)] - eta radius
/// by golden-section search (absolute eta tolerance 1e-10) together with the
/// endpoints and the eta -> 0+ limit min_{P(s) > 0} V(s).
/// Requires radius > 0.
SupportResult kl_support(const SupportQuery& q);

/// Value of the KL dual objective at a single eta > 0 (log-sum-exp shifted).
double kl_dual_objective(const SupportQuery& q, double eta);

/// Dispatches on the divergence. A zero radius returns E_P[V]; an all-zero
/// center (unvisited empirical row) returns 0.
SupportResult robust_expectation(const SupportQuery& q);

/// Independent primal oracle for tests and debugging (S <= 6).
///   TV: exact linear program over the TV ball.
///   KL: grid with the given resolution over all but two support points, the
///       last two solved exactly along their segment by bisection, followed by
///       zoomed local grids around the incumbent.
/// Throws std::invalid_argument when the dimension is too large.
double brute_force_support(const SupportQuery& q, double resolution = 1e-3);

}  // namespace drmg
