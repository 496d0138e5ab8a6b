#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drmg {

/// Divergence used to build the per-agent uncertainty balls.
enum class Divergence { kTV, kKL };

/// Equilibrium notion solved at every planning step and used to score regret.
enum class EquilibriumKind { kNash, kCCE, kCE };

std::string_view to_string(Divergence d);
std::string_view to_string(EquilibriumKind k);

// Parsing is case-insensitive; throws std::invalid_argument on unknown names.
Divergence parse_divergence(std::string_view name);
EquilibriumKind parse_equilibrium_kind(std::string_view name);

/// Raised when a requested computation is outside what the solvers support,
/// e.g. a Nash equilibrium of a large general-sum game.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drmg
