#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drmg/equilibria.hpp"
#include "drmg/game.hpp"
#include "drmg/robust_dual.hpp"
#include "drmg/robust_planning.hpp"

namespace drmg {

/// Whole-file read/write. Failures throw std::runtime_error naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Game spec JSON:
//   {"num_agents": m, "num_states": S, "actions": [A_1, ...], "horizon": H,
//    "divergence": "tv" | "kl",
//    "radii": [sigma_1, ...]
//           | {"base": [...], "overrides": [{"agent"?, "h", "s", "a"?, "sigma"}, ...]}
//           | [{"h", "s", "a"?, "sigma"}, ...],
//    "rewards": r[i][h][s][a], "kernel": P[h][s][a][s'], "fail_states": [...],
//    "initial_state"?: s, "bernoulli"?: bool}
// An override's "a" is a joint index or an action profile; omitted means all.
GameSpec game_spec_from_json(std::string_view text);
std::string game_spec_to_json(const GameSpec& spec);
GameSpec load_game_spec(const std::filesystem::path& path);
void save_game_spec(const GameSpec& spec, const std::filesystem::path& path);

/// {"actions": [A_1, ...], "payoffs": [[...], ...]} with one row per agent.
MatrixGame matrix_game_from_json(std::string_view text);
MatrixGame load_matrix_game(const std::filesystem::path& path);

/// SupportQuery that owns its vectors.
struct StoredQuery {
  std::vector<double> values;
  std::vector<double> center;
  double radius = 0.0;
  Divergence divergence = Divergence::kTV;
  double value_cap = 1.0;
  bool assume_zero_min = false;
  double eta_floor = 0.0;

  SupportQuery view() const;
};

/// {"values": [...], "center": [...], "radius": r, "divergence": "tv",
///  "value_cap"?: H, "assume_zero_min"?: bool, "eta_floor"?: x}
/// value_cap defaults to max(1, max values).
StoredQuery support_query_from_json(std::string_view text);
StoredQuery load_support_query(const std::filesystem::path& path);

/// Policy rows and per-agent V/Q tables.
std::string solution_to_json(const GameSpec& spec, const RobustSolution& solution, EquilibriumKind kind);

}  // namespace drmg
