#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "gensor/cost_model.hpp"
#include "gensor/etir.hpp"

namespace gensor {

struct EngineConfig {
  double t0 = 1048576.0;  // 2^20: 20 halvings to threshold 1
  double threshold = 1.0;
  int restarts = 8;
  uint64_t seed = 0;
  int top_k = 10;
  std::vector<int64_t> vthread_options{1, 2, 4, 8};
  int64_t max_tile_factor = 2;

  void validate() const;  // throws ConfigError
};

/// Which moves a policy may propose. The construction engine fills this from
/// EngineConfig; the chain analyzer from its own caps.
struct ActionSpace {
  std::vector<int64_t> vthread_options{1, 2, 4, 8};
  int64_t max_tile_factor = 2;
  bool enable_inv_tile = true;
};

/// Point on the annealing schedule. The cache multiplier keys on the
/// iteration index; the temperature drives loop termination and the
/// record probability.
struct AnnealPoint {
  double temperature = 0.0;
  int iteration = 0;
};

struct ActionCandidate {
  Action action;
  double benefit = 0.0;
  double probability = 0.0;  // 0 iff capacity-gated
};

/// 3 / (1 + e^(-(ln 5 / 10) (iter - 10))): grows the cache action's benefit
/// as iterations accumulate so the walk descends the hierarchy.
double anneal_cache_multiplier(int iteration);

/// 1 - 1/(1 + e^(-0.5 (-ln t - 10))): probability of recording the current
/// state into the result set at temperature t.
double record_probability(double temperature);

/// All legal one-step moves from `state` with benefit-proportional
/// probabilities. Capacity-gated candidates stay listed with probability 0.
/// Throws NoLegalAction when nothing selectable remains.
std::vector<ActionCandidate> enumerate_candidates(const ETIRState& state, const HardwareSpec& hw,
                                                  const ActionSpace& space,
                                                  const AnnealPoint& at);

/// Cumulative-interval roulette draw; returns the index of the selected
/// candidate. Throws EmptyCandidates.
int roulette_select(std::span<const ActionCandidate> candidates, std::mt19937_64& rng);

struct ScheduleResult {
  ETIRState state;
  CostEstimate cost;
  std::vector<Action> trace;
  uint64_t seed = 0;
  int iterations = 0;
};

using StateObserver =
    std::function<void(const ETIRState&, std::span<const ActionCandidate>, const AnnealPoint&)>;

/// One annealed walk from the unscheduled state: roulette-select and apply an
/// action per iteration while the temperature exceeds the threshold, halving
/// it each step and recording intermediate states with record_probability.
/// Deterministic for a fixed seed. Results are raw snapshots; states may be
/// incomplete and carry no cost yet.
std::vector<ScheduleResult> construct(const TensorOpSpec& op, const HardwareSpec& hw,
                                      const EngineConfig& cfg,
                                      const StateObserver& observer = nullptr);

uint64_t derive_seed(uint64_t seed, int restart);

/// Completes `state` to cur_mem_level == L by greedy capacity-fitting tile
/// steps and cache ascents, appending the applied actions to `trace`.
/// Returns false if some level can never fit.
bool complete_schedule(ETIRState& state, const HardwareSpec& hw, std::vector<Action>& trace);

/// Multi-restart construction: merges all restarts' snapshots, completes
/// non-terminal states, ranks by analytical cost (ties: shorter trace, then
/// lexicographic trace) and returns the top_k.
std::vector<ScheduleResult> optimize(const TensorOpSpec& op, const HardwareSpec& hw,
                                     const EngineConfig& cfg,
                                     const StateObserver& observer = nullptr);

/// Uniform double in [0, 1) from the top 53 bits; identical across platforms.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gensor
