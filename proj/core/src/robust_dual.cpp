#include "drmg/robust_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "drmg/lp.hpp"

namespace drmg {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kGoldenTolerance = 1e-10;

void check_query(const SupportQuery& q) {
  if (q.values.size() != q.center.size() || q.values.empty()) {
    throw std::invalid_argument("support query: values and center must be non-empty and of equal length");
  }
  if (!(q.radius >= 0.0)) throw std::invalid_argument("support query: radius must be non-negative");
  double sum = 0.0;
  for (double p : q.center) {
    if (!(p >= 0.0)) throw std::invalid_argument("support query: center has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw std::invalid_argument("support query: center sums to " + std::to_string(sum) + ", not 1");
  }
  const double slack = kNormTolerance * std::max(1.0, q.value_cap);
  for (double v : q.values) {
    if (!(v >= -slack && v <= q.value_cap + slack)) {
      throw std::invalid_argument("support query: value " + std::to_string(v) + " outside [0, " +
                                  std::to_string(q.value_cap) + "]");
    }
  }
}

double expectation(std::span<const double> p, std::span<const double> v) {
  double e = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) e += p[s] * v[s];
  return e;
}

double support_min(const SupportQuery& q) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < q.values.size(); ++s) {
    if (q.center[s] > 0.0) m = std::min(m, q.values[s]);
  }
  return m;
}

double tv_min_term(const SupportQuery& q) {
  if (q.assume_zero_min) return 0.0;
  return *std::min_element(q.values.begin(), q.values.end());
}

}  // namespace

double tv_dual_objective(const SupportQuery& q, double eta) {
  double shortfall = 0.0;
  for (std::size_t s = 0; s < q.values.size(); ++s) shortfall += q.center[s] * std::max(0.0, eta - q.values[s]);
  return eta - shortfall - q.radius * std::max(0.0, eta - tv_min_term(q));
}

SupportResult tv_support(const SupportQuery& q) {
  if (q.divergence != Divergence::kTV) throw std::invalid_argument("tv_support called on a non-TV query");
  check_query(q);

  // The objective is concave and piecewise linear with kinks only at V(s) and
  // at the min term, so its maximum over [0, H] sits on one of these points.
  std::vector<double> candidates(q.values.begin(), q.values.end());
  candidates.push_back(0.0);
  candidates.push_back(q.value_cap);
  candidates.push_back(tv_min_term(q));
  for (double& c : candidates) c = std::clamp(c, 0.0, q.value_cap);
  std::sort(candidates.begin(), candidates.end());

  SupportResult best{-std::numeric_limits<double>::infinity(), 0.0};
  for (double eta : candidates) {
    const double v = tv_dual_objective(q, eta);
    if (v > best.value) best = {v, eta};
  }
  return best;
}

double kl_dual_objective(const SupportQuery& q, double eta) {
  const double vmin = support_min(q);
  double sum = 0.0;
  for (std::size_t s = 0; s < q.values.size(); ++s) {
    if (q.center[s] > 0.0) sum += q.center[s] * std::exp(-(q.values[s] - vmin) / eta);
  }
  return vmin - eta * std::log(sum) - eta * q.radius;
}

SupportResult kl_support(const SupportQuery& q) {
  if (q.divergence != Divergence::kKL) throw std::invalid_argument("kl_support called on a non-KL query");
  if (!(q.radius > 0.0)) throw std::invalid_argument("kl_support needs a positive radius; use the plain expectation");
  check_query(q);

  const double vmin = support_min(q);
  const double mean = expectation(q.center, q.values);
  // eta -> 0+ limit of the dual objective.
  SupportResult best{vmin, 0.0};

  const double lo = q.eta_floor > 0.0 ? q.eta_floor : 1e-8 * q.value_cap;
  const double hi = q.value_cap / q.radius;
  auto consider = [&](double eta) {
    const double v = kl_dual_objective(q, eta);
    if (v > best.value) best = {v, eta};
  };

  if (hi > lo) {
    // Golden-section search on the concave objective.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = kl_dual_objective(q, c);
    double fd = kl_dual_objective(q, d);
    while (b - a > kGoldenTolerance) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = kl_dual_objective(q, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = kl_dual_objective(q, d);
      }
    }
    consider(0.5 * (a + b));
    consider(hi);
  }
  consider(lo);

  best.value = std::clamp(best.value, vmin, mean);
  return best;
}

SupportResult robust_expectation(const SupportQuery& q) {
  const double mass = std::accumulate(q.center.begin(), q.center.end(), 0.0);
  if (mass == 0.0) return {0.0, 0.0};
  if (q.radius == 0.0) return {expectation(q.center, q.values), 0.0};
  return q.divergence == Divergence::kTV ? tv_support(q) : kl_support(q);
}

// ---------------------------------------------------------------------------
// Brute-force primal oracle
// ---------------------------------------------------------------------------

namespace {

double tv_primal_lp(const SupportQuery& q) {
  // Variables: Q_s (S of them) then t_s >= |Q_s - P_s|.
  const int S = static_cast<int>(q.values.size());
  LinearProgram lp(2 * S);
  for (int s = 0; s < S; ++s) lp.objective[s] = -q.values[s];

  std::vector<double> sum_q(2 * S, 0.0);
  for (int s = 0; s < S; ++s) sum_q[s] = 1.0;
  lp.add_eq(sum_q, 1.0);

  for (int s = 0; s < S; ++s) {
    std::vector<double> up(2 * S, 0.0), down(2 * S, 0.0);
    up[s] = 1.0;  // Q_s - t_s <= P_s
    up[S + s] = -1.0;
    lp.add_le(up, q.center[s]);
    down[s] = -1.0;  // -Q_s - t_s <= -P_s
    down[S + s] = -1.0;
    lp.add_le(down, -q.center[s]);
  }
  std::vector<double> budget(2 * S, 0.0);
  for (int s = 0; s < S; ++s) budget[S + s] = 1.0;
  lp.add_le(budget, 2.0 * q.radius);

  const LpSolution sol = solve_lp(lp, 1e-12);
  if (sol.status != LpStatus::kOptimal) throw std::runtime_error("TV primal LP did not solve");
  return expectation(std::span<const double>(sol.x.data(), S), q.values);
}

// Minimises E_Q[V] over {KL(Q || P) <= radius} restricted to supp(P). The
// first k - 2 coordinates live on a grid; the last two share the remaining
// mass and are solved exactly, since E_Q[V] is linear and KL convex along
// that segment. The resulting grid objective is convex, so a zooming walk
// around the incumbent converges.
class KlGridSearch {
 public:
  KlGridSearch(std::vector<double> p, std::vector<double> v, double radius)
      : p_(std::move(p)), v_(std::move(v)), radius_(radius), k_(static_cast<int>(p_.size())), point_(k_ - 2) {}

  int free_dims() const { return k_ - 2; }

  // Full grid with `n` subdivisions per unit over the free coordinates.
  void coarse(int n) {
    step_ = 1.0 / n;
    enumerate_full(0, n);
  }

  // Box grid around the incumbent: +-width in each free coordinate.
  void refine(double width, int points_per_side) {
    if (k_ == 2) return;
    const std::vector<double> center = best_point_;
    const double step = width / points_per_side;
    std::vector<int> idx(k_ - 2, -points_per_side);
    while (true) {
      bool valid = true;
      for (int j = 0; j < k_ - 2; ++j) {
        point_[j] = center[j] + idx[j] * step;
        if (point_[j] < 0.0) valid = false;
      }
      if (valid) evaluate();
      int j = 0;
      while (j < k_ - 2 && ++idx[j] > points_per_side) idx[j++] = -points_per_side;
      if (j == k_ - 2) break;
    }
  }

  void evaluate_free(const std::vector<double>& x) {
    point_ = x;
    evaluate();
  }

  double best() const { return best_; }
  double step() const { return step_; }

 private:
  void enumerate_full(int dim, int remaining) {
    if (dim == k_ - 2) {
      evaluate();
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      point_[dim] = c * step_;
      enumerate_full(dim + 1, remaining - c);
    }
  }

  // Best value over the last two coordinates given the free ones, or +inf.
  double line_minimum() const {
    double used = 0.0, kl = 0.0, value = 0.0;
    for (int j = 0; j < k_ - 2; ++j) {
      used += point_[j];
      if (point_[j] > 0.0) kl += point_[j] * std::log(point_[j] / p_[j]);
      value += point_[j] * v_[j];
    }
    const double r = 1.0 - used;
    if (r < 0.0) return std::numeric_limits<double>::infinity();
    const double pa = p_[k_ - 2], pb = p_[k_ - 1], va = v_[k_ - 2], vb = v_[k_ - 1];
    auto segment_kl = [&](double t) {
      double out = kl;
      if (t > 0.0) out += t * std::log(t / pa);
      if (r - t > 0.0) out += (r - t) * std::log((r - t) / pb);
      return out;
    };
    const double t_star = r * pa / (pa + pb);
    if (segment_kl(t_star) > radius_) return std::numeric_limits<double>::infinity();
    double t = t_star;
    if (va != vb) {
      // Push t towards the cheaper end until the constraint binds.
      const double end = va < vb ? r : 0.0;
      if (segment_kl(end) <= radius_) {
        t = end;
      } else {
        double in = t_star, out = end;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (in + out);
          if (mid == in || mid == out) break;
          (segment_kl(mid) <= radius_ ? in : out) = mid;
        }
        t = in;
      }
    }
    return value + t * va + (r - t) * vb;
  }

  void evaluate() {
    const double e = line_minimum();
    if (e < best_) {
      best_ = e;
      best_point_ = point_;
    }
  }

  std::vector<double> p_;
  std::vector<double> v_;
  double radius_;
  int k_;
  std::vector<double> point_;
  std::vector<double> best_point_;
  double best_ = std::numeric_limits<double>::infinity();
  double step_ = 1.0;
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double kl_primal_grid(const SupportQuery& q, double resolution) {
  std::vector<double> p, v;
  for (std::size_t s = 0; s < q.values.size(); ++s) {
    if (q.center[s] > 0.0) {
      p.push_back(q.center[s]);
      v.push_back(q.values[s]);
    }
  }
  if (p.size() == 1) return v[0];

  const int n = static_cast<int>(std::lround(1.0 / resolution));
  const int k = static_cast<int>(p.size());
  if (n < 1) throw std::invalid_argument("grid resolution must be in (0, 1]");
  if (binomial(n + k - 2, k - 2) > 5e8) {
    throw std::invalid_argument("KL grid oracle: " + std::to_string(k) + " support points at resolution " +
                                std::to_string(resolution) + " is too large");
  }

  KlGridSearch search(p, v, q.radius);
  // the center itself is always feasible
  search.evaluate_free(std::vector<double>(p.begin(), p.end() - 2));
  search.coarse(n);
  const int per_side = k <= 4 ? 10 : (k <= 5 ? 5 : 3);
  double width = 2.0 * search.step();
  for (int level = 0; level < 12; ++level) {
    for (int walk = 0; walk < 100; ++walk) {
      const double before = search.best();
      search.refine(width, per_side);
      if (!(search.best() < before)) break;
    }
    width *= 0.5;
  }
  return search.best();
}

}  // namespace

double brute_force_support(const SupportQuery& q, double resolution) {
  check_query(q);
  if (q.values.size() > 6) {
    throw std::invalid_argument("brute_force_support supports at most 6 states, got " +
                                std::to_string(q.values.size()));
  }
  if (q.radius == 0.0) return expectation(q.center, q.values);
  if (q.divergence == Divergence::kTV) {
    if (q.assume_zero_min) throw std::invalid_argument("the primal oracle solves the exact TV ball only");
    return tv_primal_lp(q);
  }
  return kl_primal_grid(q, resolution);
}

}  // namespace drmg
