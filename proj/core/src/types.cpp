#include "drmg/types.hpp"

#include <algorithm>
#include <cctype>

namespace drmg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Divergence d) {
  switch (d) {
    case Divergence::kTV:
      return "tv";
    case Divergence::kKL:
      return "kl";
  }
  return "unknown";
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::kNash:
      return "nash";
    case EquilibriumKind::kCCE:
      return "cce";
    case EquilibriumKind::kCE:
      return "ce";
  }
  return "unknown";
}

Divergence parse_divergence(std::string_view name) {
  const std::string n = lower(name);
  if (n == "tv") return Divergence::kTV;
  if (n == "kl") return Divergence::kKL;
  throw std::invalid_argument("unknown divergence '" + std::string(name) + "' (expected tv or kl)");
}

EquilibriumKind parse_equilibrium_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "nash" || n == "ne") return EquilibriumKind::kNash;
  if (n == "cce") return EquilibriumKind::kCCE;
  if (n == "ce") return EquilibriumKind::kCE;
  throw std::invalid_argument("unknown equilibrium kind '" + std::string(name) +
                              "' (expected nash, cce or ce)");
}

}  // namespace drmg
