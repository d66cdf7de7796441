#pragma once

#include <optional>

#include "gensor/engine.hpp"

namespace gensor {

/// Unidirectional tree construction with a single traffic-reduction
/// objective: the baseline the graph engine is measured against.
struct TreeConfig {
  int beam_width = 4;

  void validate() const;
};

/// Best single halving step at the editing level by the tree objective
/// Q(T)/Q(T'), i.e. the tile action whose child moves the least extra
/// traffic. Ties go to the first axis. Empty when nothing can be halved.
std::optional<Action> greedy_fit_step(const ETIRState& state, const HardwareSpec& hw);

/// Level-by-level greedy beam expansion: halve tiles (never coarsen, never
/// touch virtual threads) until the level's tile fits its capacity, cache,
/// repeat. Deterministic; final states ranked by analytical cost.
std::vector<ScheduleResult> construct_tree(const TensorOpSpec& op, const HardwareSpec& hw,
                                           const TreeConfig& cfg);

}  // namespace gensor
