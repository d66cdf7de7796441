#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gensor/etir.hpp"
#include "gensor/hardware.hpp"

namespace gensor {

/// Per-level traffic Q (elements moved from level l-1 into level l over a
/// whole kernel) and footprint F (elements resident for one tile instance).
struct TrafficReport {
  struct Level {
    int64_t traffic_elems = 0;
    int64_t footprint_elems = 0;
  };
  std::vector<Level> per_level;  // index 0 = level 1
};

struct CostEstimate {
  double est_seconds = 0.0;
  double compute_seconds = 0.0;
  std::vector<std::pair<std::string, double>> memory_seconds;  // per source level
  std::string bottleneck;

  bool operator==(const CostEstimate&) const = default;
};

/// Closed-form memory traffic into `level`: every level-`level` tile instance
/// reloads its input regions; the output is written once at reduction
/// completion. Counted on the padded scheduling domain.
int64_t memory_traffic(const ETIRState& state, const HardwareSpec& hw, int level);

/// Traffic by direct simulation of the tiled loop nest: walks every tile
/// instance and counts each distinct element the instance touches, with no
/// reuse modeling across instances. Independent check of memory_traffic.
int64_t traffic_oracle(const ETIRState& state, int level);

int64_t tile_footprint_elems(const ETIRState& state, int level);

TrafficReport traffic_report(const ETIRState& state, const HardwareSpec& hw);

/// Traffic-vs-footprint ratio Q(T)F(T') / (Q(T')F(T)) of a one-step
/// tiling/inverse-tiling transition at `level`.
double benefit_tiling(const ETIRState& before, const ETIRState& after, const HardwareSpec& hw,
                      int level);

/// (L_low + S/B_low) / (L_high + S/B_high): relative access-time gain of
/// serving one tile's working set from the nearer level.
double caching_benefit(double latency_low, double bandwidth_low, double latency_high,
                       double bandwidth_high, double s_data_bytes);

double benefit_caching(const ETIRState& state, const HardwareSpec& hw, int from_level,
                       int to_level);

/// ceil(x/W) / ceil(x/(V*W)): ratio of original bank-conflict groups to those
/// remaining with V virtual threads.
double vthread_conflict_ratio(int64_t x, int64_t bank_width, int64_t v);

double benefit_vthread(const ETIRState& state, const HardwareSpec& hw, int axis, int64_t v);

/// Shared-memory efficiency factor applied to compute time: the reciprocal
/// of the worst remaining bank-conflict serialization across spatial axes,
/// clamped to [0.1, 1].
double utilization(const ETIRState& state, const HardwareSpec& hw);

/// Analytical cost of a complete schedule: max of compute time (scaled by
/// utilization) and per-source-level memory transfer times.
CostEstimate estimate_cost(const ETIRState& state, const HardwareSpec& hw);

}  // namespace gensor
