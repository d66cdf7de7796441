#include "gensor/engine.hpp"

#include <algorithm>
#include <cmath>

#include "gensor/error.hpp"
#include "gensor/tree_baseline.hpp"

namespace gensor {

void EngineConfig::validate() const {
  if (!(t0 > threshold && threshold > 0))
    throw Error(ErrorCode::ConfigError, "need t0 > threshold > 0");
  if (restarts < 1) throw Error(ErrorCode::ConfigError, "restarts must be >= 1");
  if (top_k < 1) throw Error(ErrorCode::ConfigError, "top_k must be >= 1");
  if (max_tile_factor < 2 || !is_pow2(max_tile_factor))
    throw Error(ErrorCode::ConfigError, "max_tile_factor must be a power of two >= 2");
  if (vthread_options.empty()) throw Error(ErrorCode::ConfigError, "vthread_options is empty");
  for (int64_t v : vthread_options)
    if (v < 1 || !is_pow2(v))
      throw Error(ErrorCode::ConfigError, "vthread options must be powers of two >= 1");
}

double anneal_cache_multiplier(int iteration) {
  return 3.0 / (1.0 + std::exp(-(std::log(5.0) / 10.0) * (iteration - 10)));
}

double record_probability(double temperature) {
  return 1.0 - 1.0 / (1.0 + std::exp(-0.5 * (-std::log(temperature) - 10.0)));
}

std::vector<ActionCandidate> enumerate_candidates(const ETIRState& state, const HardwareSpec& hw,
                                                  const ActionSpace& space,
                                                  const AnnealPoint& at) {
  std::vector<ActionCandidate> candidates;
  std::vector<char> gated;

  std::vector<int64_t> vopts = space.vthread_options;
  std::sort(vopts.begin(), vopts.end());
  vopts.erase(std::unique(vopts.begin(), vopts.end()), vopts.end());

  auto consider = [&](const Action& a, double benefit, bool gate) {
    candidates.push_back({a, benefit, 0.0});
    gated.push_back(gate ? 1 : 0);
  };

  const int naxes = state.op().num_axes();
  for (ActionKind kind : {ActionKind::Tile, ActionKind::InvTile}) {
    if (kind == ActionKind::InvTile && !space.enable_inv_tile) continue;
    if (state.complete()) break;
    for (int ax = 0; ax < naxes; ++ax) {
      for (int64_t f = 2; f <= space.max_tile_factor; f *= 2) {
        Action a{kind, ax, f};
        if (!state.is_legal(a)) continue;
        ETIRState post = state.apply(a);
        consider(a, benefit_tiling(state, post, hw, state.edit_level()), false);
      }
    }
  }
  for (int ax = 0; ax < naxes; ++ax) {
    for (int64_t v : vopts) {
      Action a{ActionKind::SetVThread, ax, v};
      if (!state.is_legal(a)) continue;
      consider(a, benefit_vthread(state, hw, ax, v), false);
    }
  }
  if (!state.complete()) {
    Action a{ActionKind::Cache, -1, 0};
    ETIRState post = state.apply(a);
    double benefit = benefit_caching(state, hw, state.cur_mem_level(), post.cur_mem_level()) *
                     anneal_cache_multiplier(at.iteration);
    consider(a, benefit, !capacity_check(post, hw, post.cur_mem_level()));
  }

  // Normalize the ungated benefits into probabilities, dividing by the max
  // first so huge benefit ratios cannot overflow the sum.
  double bmax = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (!gated[i]) bmax = std::max(bmax, candidates[i].benefit);
  if (bmax <= 0.0)
    throw Error(ErrorCode::NoLegalAction, "no selectable action from " + state.repr());
  double sum = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (!gated[i]) sum += candidates[i].benefit / bmax;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (!gated[i]) candidates[i].probability = (candidates[i].benefit / bmax) / sum;
  return candidates;
}

int roulette_select(std::span<const ActionCandidate> candidates, std::mt19937_64& rng) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "roulette over empty set");
  double u = uniform_unit(rng);
  double cum = 0.0;
  int last_positive = -1;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].probability <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cum += candidates[i].probability;
    if (u < cum) return static_cast<int>(i);
  }
  if (last_positive < 0) throw Error(ErrorCode::EmptyCandidates, "all candidates gated");
  return last_positive;  // u fell into the rounding tail
}

std::vector<ScheduleResult> construct(const TensorOpSpec& op, const HardwareSpec& hw,
                                      const EngineConfig& cfg, const StateObserver& observer) {
  cfg.validate();
  ActionSpace space{cfg.vthread_options, cfg.max_tile_factor, true};
  std::mt19937_64 rng(cfg.seed);

  ETIRState state = ETIRState::initial(op, hw);
  std::vector<Action> trace;
  std::vector<ScheduleResult> results;
  size_t recorded_at = SIZE_MAX;

  double t = cfg.t0;
  int iter = 0;
  while (t > cfg.threshold) {
    AnnealPoint at{t, iter};
    std::vector<ActionCandidate> candidates;
    try {
      candidates = enumerate_candidates(state, hw, space, at);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoLegalAction) break;  // terminal: finalize early
      throw;
    }
    if (observer) observer(state, candidates, at);
    int pick = roulette_select(candidates, rng);
    state = state.apply(candidates[static_cast<size_t>(pick)].action);
    trace.push_back(candidates[static_cast<size_t>(pick)].action);
    if (uniform_unit(rng) < record_probability(t)) {
      results.push_back({state, {}, trace, cfg.seed, iter + 1});
      recorded_at = trace.size();
    }
    t /= 2.0;
    ++iter;
  }
  if (recorded_at != trace.size()) results.push_back({state, {}, trace, cfg.seed, iter});
  return results;
}

uint64_t derive_seed(uint64_t seed, int restart) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(restart + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool complete_schedule(ETIRState& state, const HardwareSpec& hw, std::vector<Action>& trace) {
  while (!state.complete()) {
    int target = state.edit_level();
    while (!capacity_check(state, hw, target)) {
      auto step = greedy_fit_step(state, hw);
      if (!step) return false;
      state = state.apply(*step);
      trace.push_back(*step);
    }
    Action cache{ActionKind::Cache, -1, 0};
    state = state.apply(cache);
    trace.push_back(cache);
  }
  return true;
}

std::vector<ScheduleResult> optimize(const TensorOpSpec& op, const HardwareSpec& hw,
                                     const EngineConfig& cfg, const StateObserver& observer) {
  cfg.validate();
  std::vector<ScheduleResult> pool;
  for (int r = 0; r < cfg.restarts; ++r) {
    EngineConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, r);
    for (ScheduleResult& res : construct(op, hw, run_cfg, observer)) {
      if (!complete_schedule(res.state, hw, res.trace)) continue;
      res.cost = estimate_cost(res.state, hw);
      pool.push_back(std::move(res));
    }
  }

  auto better = [](const ScheduleResult& a, const ScheduleResult& b) {
    if (a.cost.est_seconds != b.cost.est_seconds) return a.cost.est_seconds < b.cost.est_seconds;
    if (a.trace.size() != b.trace.size()) return a.trace.size() < b.trace.size();
    return a.trace < b.trace;
  };
  std::sort(pool.begin(), pool.end(), better);
  pool.erase(std::unique(pool.begin(), pool.end(),
                         [](const ScheduleResult& a, const ScheduleResult& b) {
                           return a.trace == b.trace && a.state == b.state;
                         }),
             pool.end());
  if (pool.size() > static_cast<size_t>(cfg.top_k)) pool.resize(static_cast<size_t>(cfg.top_k));
  return pool;
}

}  // namespace gensor
