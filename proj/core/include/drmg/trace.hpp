#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drmg/types.hpp"

namespace drmg {

/// One scored episode.
struct TraceRow {
  int episode = 0;  // 1-based
  int s1 = 0;
  std::optional<double> gap_nash;
  std::optional<double> gap_cce;
  std::optional<double> gap_ce;
  std::vector<double> agent_gaps;  // for the learner's equilibrium kind
  double max_gap = 0.0;
  double cum_regret = 0.0;
  std::optional<double> t_ms;
  std::int64_t visited_cells = 0;  // distinct (h, s, a) cells with data after the episode
};

/// Per-episode regret record. cum_regret is the running sum of max_gap.
struct RegretTrace {
  EquilibriumKind kind = EquilibriumKind::kCCE;
  std::vector<TraceRow> rows;

  /// Appends a row and fills its cumulative column.
  void append(TraceRow row);
  double total_regret() const { return rows.empty() ? 0.0 : rows.back().cum_regret; }
};

}  // namespace drmg
