#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gensor/engine.hpp"

namespace gensor {

struct ChainCaps {
  int max_states = 50000;
  int fixed_iteration = 10;  // anneal point at which the policy is frozen
  bool enable_inv_tile = true;
  std::vector<int64_t> vthread_options{1, 2, 4, 8};
  int64_t max_tile_factor = 2;
};

struct ChainEdge {
  int to = -1;
  double prob = 0.0;
  Action action;
  bool artificial = false;  // absorbing self-loop, not a scheduling move
};

/// Explicit construction chain over an enumerable schedule space. Rows are
/// stochastic: absorbing states carry an artificial self-loop of weight 1.
/// Synthetic chains for analysis can be assembled directly.
struct ChainModel {
  std::vector<ETIRState> states;  // may be empty for synthetic chains
  std::vector<std::vector<ChainEdge>> rows;
  std::vector<int> level_of;
  std::vector<char> complete;
  std::vector<char> absorbing;
  std::vector<double> terminal_value;  // normalized inverse cost at complete states

  int num_states() const { return static_cast<int>(rows.size()); }
  int num_levels() const;
};

/// Breadth-first expansion of every state reachable from the unscheduled
/// state under the engine's policy, frozen at caps.fixed_iteration.
ChainModel enumerate_space(const TensorOpSpec& op, const HardwareSpec& hw, const ChainCaps& caps);

/// Per memory level: true iff every connected component of the within-level
/// subgraph (tile / inverse-tile / vthread edges) is strongly connected.
std::vector<bool> check_irreducible_per_level(const ChainModel& model);

/// True iff every nontrivial within-level component has cycle-length gcd 1.
bool check_aperiodic(const ChainModel& model);

/// Stationary vector of the level-restricted, row-renormalized subchain,
/// by power iteration. Throws NotErgodic unless the level is one strongly
/// connected aperiodic component.
std::vector<double> stationary_distribution(const ChainModel& model, int level);

struct ValueTable {
  std::vector<double> value;
  std::vector<std::optional<Action>> policy;
  int iterations = 0;
};

using ValueObserver = std::function<void(const std::vector<double>&)>;

/// Product-form value iteration: complete states anchor at their terminal
/// value, elsewhere V(i) = max_a p(a|i) V(j), iterated to a 1e-12 fixed
/// point. Throws NoConvergence past 10 * |states| sweeps.
ValueTable value_iteration(const ChainModel& model, const ValueObserver& observer = nullptr);

}  // namespace gensor
