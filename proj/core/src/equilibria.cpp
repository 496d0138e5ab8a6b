#include "drmg/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "drmg/lp.hpp"

namespace drmg {

MatrixGame::MatrixGame(JointActionSpace s, std::vector<std::vector<double>> p)
    : space(std::move(s)), payoffs(std::move(p)) {
  if (static_cast<int>(payoffs.size()) != space.num_agents()) {
    throw std::invalid_argument("matrix game needs one payoff tensor per agent");
  }
  for (const auto& u : payoffs) {
    if (static_cast<int>(u.size()) != space.num_joint()) {
      throw std::invalid_argument("payoff tensor length must equal the number of joint actions");
    }
    for (double x : u) {
      if (!std::isfinite(x)) throw std::invalid_argument("payoff entries must be finite");
    }
  }
}

std::vector<double> product_distribution(const JointActionSpace& space, const std::vector<std::vector<double>>& mixes) {
  std::vector<double> dist(space.num_joint(), 1.0);
  for (int a = 0; a < space.num_joint(); ++a) {
    for (int i = 0; i < space.num_agents(); ++i) dist[a] *= mixes[i][space.action_of(a, i)];
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Gap checker
// ---------------------------------------------------------------------------

namespace {

void check_distribution(const MatrixGame& game, std::span<const double> dist) {
  if (static_cast<int>(dist.size()) != game.num_joint()) {
    throw std::invalid_argument("distribution length " + std::to_string(dist.size()) + " != joint actions " +
                                std::to_string(game.num_joint()));
  }
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= -1e-12)) throw std::invalid_argument("distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution sums to " + std::to_string(sum));
}

}  // namespace

std::vector<double> deviation_gains(const MatrixGame& game, std::span<const double> dist, EquilibriumKind kind) {
  check_distribution(game, dist);
  const auto& space = game.space;
  std::vector<double> gains(game.num_agents(), 0.0);

  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& u = game.payoffs[i];
    double base = 0.0;
    for (int a = 0; a < game.num_joint(); ++a) base += dist[a] * u[a];

    if (kind == EquilibriumKind::kCE) {
      // Best swap per recommended action a_i.
      double swapped = 0.0;
      for (int ai = 0; ai < space.actions(i); ++ai) {
        double best = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < space.actions(i); ++b) {
          double v = 0.0;
          for (int o = 0; o < space.num_others(i); ++o) {
            const int a = space.join(o, i, ai);
            v += dist[a] * u[space.replace(a, i, b)];
          }
          best = std::max(best, v);
        }
        swapped += best;
      }
      gains[i] = swapped - base;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < space.actions(i); ++b) {
        double v = 0.0;
        for (int a = 0; a < game.num_joint(); ++a) v += dist[a] * u[space.replace(a, i, b)];
        best = std::max(best, v);
      }
      gains[i] = best - base;
    }
  }
  return gains;
}

double equilibrium_gap(const MatrixGame& game, std::span<const double> dist, EquilibriumKind kind) {
  const auto gains = deviation_gains(game, dist, kind);
  return std::max(0.0, *std::max_element(gains.begin(), gains.end()));
}

// ---------------------------------------------------------------------------
// Correlated equilibria
// ---------------------------------------------------------------------------

namespace {

std::vector<double> clean_distribution(std::vector<double> x) {
  for (double& p : x) p = std::max(0.0, p);
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& p : x) p /= sum;
  return x;
}

std::vector<double> solve_correlated(const MatrixGame& game, EquilibriumKind kind) {
  const auto& space = game.space;
  const int J = game.num_joint();
  LinearProgram lp(J);
  lp.add_eq(std::vector<double>(J, 1.0), 1.0);

  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& u = game.payoffs[i];
    if (kind == EquilibriumKind::kCCE) {
      for (int b = 0; b < space.actions(i); ++b) {
        std::vector<double> row(J);
        for (int a = 0; a < J; ++a) row[a] = u[space.replace(a, i, b)] - u[a];
        lp.add_le(std::move(row), 0.0);
      }
    } else {
      for (int ai = 0; ai < space.actions(i); ++ai) {
        for (int b = 0; b < space.actions(i); ++b) {
          if (b == ai) continue;
          std::vector<double> row(J, 0.0);
          for (int o = 0; o < space.num_others(i); ++o) {
            const int a = space.join(o, i, ai);
            row[a] = u[space.replace(a, i, b)] - u[a];
          }
          lp.add_le(std::move(row), 0.0);
        }
      }
    }
  }

  std::vector<double> welfare(J, 0.0);
  for (const auto& u : game.payoffs) {
    for (int a = 0; a < J; ++a) welfare[a] += u[a];
  }
  lp.objective = welfare;
  const LpSolution first = solve_lp(lp);
  if (first.status != LpStatus::kOptimal) throw std::runtime_error("correlated equilibrium LP failed");

  // Among (near) welfare-maximal points prefer mass on low joint indices.
  lp.add_ge(welfare, first.objective - 1e-13 * std::max(1.0, std::abs(first.objective)));
  for (int a = 0; a < J; ++a) lp.objective[a] = -static_cast<double>(a) / J;
  const LpSolution second = solve_lp(lp);
  return clean_distribution(second.status == LpStatus::kOptimal ? second.x : first.x);
}

// ---------------------------------------------------------------------------
// Nash equilibria
// ---------------------------------------------------------------------------

bool is_zero_sum(const MatrixGame& game) {
  if (game.num_agents() != 2) return false;
  double scale = 1.0;
  for (const auto& u : game.payoffs) {
    for (double x : u) scale = std::max(scale, std::abs(x));
  }
  const double c = game.payoffs[0][0] + game.payoffs[1][0];
  for (int a = 0; a < game.num_joint(); ++a) {
    if (std::abs(game.payoffs[0][a] + game.payoffs[1][a] - c) > 1e-12 * scale) return false;
  }
  return true;
}

// Maximin strategy of `agent` in a two-player game with its own payoffs.
std::vector<double> maximin_strategy(const MatrixGame& game, int agent) {
  const auto& space = game.space;
  const int other = 1 - agent;
  const int n = space.actions(agent);
  const auto& u = game.payoffs[agent];
  const double lowest = *std::min_element(u.begin(), u.end());

  // Variables: x (n entries) then the shifted value w >= 0.
  LinearProgram lp(n + 1);
  lp.objective[n] = 1.0;
  std::vector<double> simplex(n + 1, 1.0);
  simplex[n] = 0.0;
  lp.add_eq(simplex, 1.0);
  for (int b = 0; b < space.actions(other); ++b) {
    std::vector<double> row(n + 1, 0.0);
    for (int a = 0; a < n; ++a) {
      std::vector<int> profile(2);
      profile[agent] = a;
      profile[other] = b;
      row[a] = -(u[space.encode(profile)] - lowest + 1.0);
    }
    row[n] = 1.0;
    lp.add_le(std::move(row), 0.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) throw std::runtime_error("zero-sum LP failed");
  return clean_distribution(std::vector<double>(sol.x.begin(), sol.x.begin() + n));
}

struct SupportProfile {
  std::vector<std::uint64_t> masks;
  int total = 0;
  int spread = 0;
};

// Solves the indifference system on a fixed support profile by Newton's
// method. Returns per-agent mixes over all actions, or empty on failure.
std::vector<std::vector<double>> solve_on_support(const MatrixGame& game, const SupportProfile& profile) {
  const auto& space = game.space;
  const int m = game.num_agents();

  std::vector<std::vector<int>> support(m);
  std::vector<int> offset(m);
  int n = 0;
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < space.actions(i); ++a) {
      if (profile.masks[i] >> a & 1U) support[i].push_back(a);
    }
    offset[i] = n;
    n += static_cast<int>(support[i].size()) + 1;  // probabilities then v_i
  }

  // Joint actions inside the support product.
  std::vector<int> cells;
  for (int a = 0; a < space.num_joint(); ++a) {
    bool inside = true;
    for (int i = 0; i < m && inside; ++i) inside = profile.masks[i] >> space.action_of(a, i) & 1U;
    if (inside) cells.push_back(a);
  }

  // position of action a of agent i inside its support
  std::vector<std::vector<int>> pos(m);
  for (int i = 0; i < m; ++i) {
    pos[i].assign(space.actions(i), -1);
    for (std::size_t k = 0; k < support[i].size(); ++k) pos[i][support[i][k]] = static_cast<int>(k);
  }

  Eigen::VectorXd z(n);
  for (int i = 0; i < m; ++i) {
    const int k = static_cast<int>(support[i].size());
    for (int j = 0; j < k; ++j) z[offset[i] + j] = 1.0 / k;
    z[offset[i] + k] = 0.0;
  }

  auto prob = [&](const Eigen::VectorXd& zz, int i, int a) { return zz[offset[i] + pos[i][a]]; };

  Eigen::VectorXd F(n);
  Eigen::MatrixXd Jac(n, n);
  bool converged = false;
  for (int iter = 0; iter < 40; ++iter) {
    F.setZero();
    Jac.setZero();
    for (int i = 0; i < m; ++i) {
      const int k = static_cast<int>(support[i].size());
      // Row offset[i] + j: U_i(support[i][j]) - v_i; row offset[i] + k: sum x_i - 1.
      for (int j = 0; j < k; ++j) {
        F[offset[i] + j] -= z[offset[i] + k];
        Jac(offset[i] + j, offset[i] + k) = -1.0;
      }
      double total = -1.0;
      for (int j = 0; j < k; ++j) {
        total += z[offset[i] + j];
        Jac(offset[i] + k, offset[i] + j) = 1.0;
      }
      F[offset[i] + k] = total;
    }
    for (int c : cells) {
      for (int i = 0; i < m; ++i) {
        const int row = offset[i] + pos[i][space.action_of(c, i)];
        const double u = game.payoffs[i][c];
        double w = u;
        for (int l = 0; l < m; ++l) {
          if (l != i) w *= prob(z, l, space.action_of(c, l));
        }
        F[row] += w;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          double d = u;
          for (int l = 0; l < m; ++l) {
            if (l != i && l != j) d *= prob(z, l, space.action_of(c, l));
          }
          Jac(row, offset[j] + pos[j][space.action_of(c, j)]) += d;
        }
      }
    }
    if (F.lpNorm<Eigen::Infinity>() < 1e-13) {
      converged = true;
      break;
    }
    const Eigen::VectorXd step = Jac.completeOrthogonalDecomposition().solve(-F);
    if (!step.allFinite()) return {};
    z += step;
  }
  if (!converged && F.lpNorm<Eigen::Infinity>() > 1e-10) return {};

  std::vector<std::vector<double>> mixes(m);
  for (int i = 0; i < m; ++i) {
    mixes[i].assign(space.actions(i), 0.0);
    double sum = 0.0;
    for (int a : support[i]) {
      const double p = prob(z, i, a);
      if (p < -1e-10) return {};
      mixes[i][a] = std::max(0.0, p);
      sum += mixes[i][a];
    }
    if (sum <= 0.0) return {};
    for (double& p : mixes[i]) p /= sum;
  }
  return mixes;
}

std::vector<double> solve_nash(const MatrixGame& game, double tolerance) {
  const auto& space = game.space;
  const int m = game.num_agents();

  if (m == 1) {
    const auto& u = game.payoffs[0];
    std::vector<double> dist(game.num_joint(), 0.0);
    dist[std::max_element(u.begin(), u.end()) - u.begin()] = 1.0;
    return dist;
  }
  if (is_zero_sum(game)) {
    return product_distribution(space, {maximin_strategy(game, 0), maximin_strategy(game, 1)});
  }
  if (game.num_joint() > kMaxGeneralSumNashJoint) {
    throw UnsupportedError("Nash equilibrium of a general-sum game with " + std::to_string(game.num_joint()) +
                           " joint actions is not supported (computing Nash is PPAD-hard); use CCE or CE");
  }

  double profiles = 1.0;
  for (int i = 0; i < m; ++i) profiles *= std::ldexp(1.0, space.actions(i)) - 1.0;
  constexpr double kMaxProfiles = 2e5;
  if (profiles > kMaxProfiles) {
    throw UnsupportedError("support enumeration over " + std::to_string(profiles) + " support profiles is too large");
  }

  std::vector<SupportProfile> all{SupportProfile{}};
  for (int i = 0; i < m; ++i) {
    std::vector<SupportProfile> next;
    for (const auto& p : all) {
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << space.actions(i)); ++mask) {
        SupportProfile q = p;
        q.masks.push_back(mask);
        next.push_back(std::move(q));
      }
    }
    all = std::move(next);
  }
  for (auto& p : all) {
    int lo = 1 << 30, hi = 0;
    for (auto mask : p.masks) {
      const int k = std::popcount(mask);
      p.total += k;
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
    p.spread = hi - lo;
  }
  std::stable_sort(all.begin(), all.end(), [](const SupportProfile& a, const SupportProfile& b) {
    return std::tie(a.total, a.spread) < std::tie(b.total, b.spread);
  });

  for (const auto& profile : all) {
    const auto mixes = solve_on_support(game, profile);
    if (mixes.empty()) continue;
    auto dist = product_distribution(space, mixes);
    if (equilibrium_gap(game, dist, EquilibriumKind::kNash) <= tolerance) return dist;
  }
  throw std::runtime_error("support enumeration found no Nash equilibrium within tolerance");
}

}  // namespace

std::vector<double> solve_equilibrium(const MatrixGame& game, EquilibriumKind kind, double tolerance) {
  std::vector<double> dist =
      kind == EquilibriumKind::kNash ? solve_nash(game, tolerance) : solve_correlated(game, kind);
  const double gap = equilibrium_gap(game, dist, kind);
  if (gap > tolerance) {
    char buf[128];
    std::snprintf(buf, sizeof buf, " solver returned gap %.3e above tolerance %.3e", gap, tolerance);
    throw std::runtime_error(std::string(to_string(kind)) + buf);
  }
  return dist;
}

}  // namespace drmg
