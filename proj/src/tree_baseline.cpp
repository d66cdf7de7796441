#include "gensor/tree_baseline.hpp"

#include <algorithm>

#include "gensor/error.hpp"

namespace gensor {

void TreeConfig::validate() const {
  if (beam_width < 1) throw Error(ErrorCode::ConfigError, "beam_width must be >= 1");
}

std::optional<Action> greedy_fit_step(const ETIRState& state, const HardwareSpec& hw) {
  if (state.complete()) return std::nullopt;
  std::optional<Action> best;
  int64_t best_traffic = 0;
  for (int ax = 0; ax < state.op().num_axes(); ++ax) {
    Action a{ActionKind::Tile, ax, 2};
    if (!state.is_legal(a)) continue;
    int64_t traffic = memory_traffic(state.apply(a), hw, state.edit_level());
    if (!best || traffic < best_traffic) {
      best = a;
      best_traffic = traffic;
    }
  }
  return best;
}

namespace {

struct Partial {
  ETIRState state;
  std::vector<Action> trace;
  int64_t traffic = 0;  // at the level under construction
};

// Deterministic beam order: least traffic first, then lexicographic trace.
bool partial_less(const Partial& a, const Partial& b) {
  if (a.traffic != b.traffic) return a.traffic < b.traffic;
  return a.trace < b.trace;
}

void dedupe_and_prune(std::vector<Partial>& items, int beam_width) {
  std::sort(items.begin(), items.end(), partial_less);
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Partial& a, const Partial& b) { return a.state == b.state; }),
              items.end());
  if (items.size() > static_cast<size_t>(beam_width)) items.resize(static_cast<size_t>(beam_width));
}

}  // namespace

std::vector<ScheduleResult> construct_tree(const TensorOpSpec& op, const HardwareSpec& hw,
                                           const TreeConfig& cfg) {
  cfg.validate();

  std::vector<Partial> frontier{{ETIRState::initial(op, hw), {}, 0}};
  for (int level = 1; level <= hw.num_schedulable_levels(); ++level) {
    std::vector<Partial> fitting;
    std::vector<Partial> work = std::move(frontier);
    for (Partial& p : work) p.traffic = memory_traffic(p.state, hw, level);
    dedupe_and_prune(work, cfg.beam_width);

    while (!work.empty()) {
      std::vector<Partial> expanded;
      for (Partial& p : work) {
        if (capacity_check(p.state, hw, level)) {
          // Capacity-saturated; halving further cannot reduce traffic.
          fitting.push_back(std::move(p));
          continue;
        }
        for (int ax = 0; ax < op.num_axes(); ++ax) {
          Action a{ActionKind::Tile, ax, 2};
          if (!p.state.is_legal(a)) continue;
          Partial child{p.state.apply(a), p.trace, 0};
          child.trace.push_back(a);
          child.traffic = memory_traffic(child.state, hw, level);
          expanded.push_back(std::move(child));
        }
      }
      dedupe_and_prune(expanded, cfg.beam_width);
      work = std::move(expanded);
    }

    dedupe_and_prune(fitting, cfg.beam_width);
    frontier.clear();
    Action cache{ActionKind::Cache, -1, 0};
    for (Partial& p : fitting) {
      p.state = p.state.apply(cache);
      p.trace.push_back(cache);
      frontier.push_back(std::move(p));
    }
  }

  std::vector<ScheduleResult> results;
  for (Partial& p : frontier) {
    ScheduleResult res{std::move(p.state), {}, std::move(p.trace), 0, 0};
    res.iterations = static_cast<int>(res.trace.size());
    res.cost = estimate_cost(res.state, hw);
    results.push_back(std::move(res));
  }
  std::sort(results.begin(), results.end(), [](const ScheduleResult& a, const ScheduleResult& b) {
    if (a.cost.est_seconds != b.cost.est_seconds) return a.cost.est_seconds < b.cost.est_seconds;
    if (a.trace.size() != b.trace.size()) return a.trace.size() < b.trace.size();
    return a.trace < b.trace;
  });
  return results;
}

}  // namespace gensor
