#include "gensor/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "gensor/error.hpp"

namespace gensor {

namespace {

void check_level(const ETIRState& state, int level) {
  if (level < 1 || level > state.num_levels())
    throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
}

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace

int64_t tile_footprint_elems(const ETIRState& state, int level) {
  check_level(state, level);
  std::vector<int64_t> tile = state.tiles_at_level(level);
  std::vector<int64_t> counts = state.op().tile_elem_counts(tile);
  int64_t total = 0;
  for (int64_t c : counts) total += c;
  return total;
}

int64_t memory_traffic(const ETIRState& state, const HardwareSpec& hw, int level) {
  (void)hw;
  check_level(state, level);
  const TensorOpSpec& op = state.op();

  int64_t instances = 1;
  for (int a = 0; a < op.num_axes(); ++a)
    instances *= op.axis(a).padded / state.tile_at(a, level);

  std::vector<int64_t> regions = op.tile_elem_counts(state.tiles_at_level(level));
  int64_t traffic = 0;
  for (int t = 0; t < op.num_tensors(); ++t) {
    if (op.tensors()[static_cast<size_t>(t)].is_output)
      traffic += op.tensor_elems(t, /*padded_domain=*/true);
    else
      traffic += instances * regions[static_cast<size_t>(t)];
  }
  return traffic;
}

int64_t traffic_oracle(const ETIRState& state, int level) {
  check_level(state, level);
  const TensorOpSpec& op = state.op();
  const int naxes = op.num_axes();

  int64_t total_iters = 1;
  for (int a = 0; a < naxes; ++a) total_iters *= op.axis(a).padded;
  if (total_iters > (int64_t{1} << 20))
    throw Error(ErrorCode::TooLargeToEnumerate,
                std::to_string(total_iters) + " iterations in " + op.label());

  std::vector<int64_t> tile = state.tiles_at_level(level);

  // Epoch-stamped touch marks, one slot per padded-domain element.
  std::vector<std::vector<uint32_t>> stamps(static_cast<size_t>(op.num_tensors()));
  for (int t = 0; t < op.num_tensors(); ++t)
    stamps[static_cast<size_t>(t)].assign(static_cast<size_t>(op.tensor_elems(t, true)), 0);

  int64_t traffic = 0;
  uint32_t epoch = 0;
  std::vector<int64_t> origin(static_cast<size_t>(naxes), 0);
  std::vector<int64_t> idx(static_cast<size_t>(naxes), 0);

  // Walk tile origins; within each instance, enumerate the interior and count
  // first touches per tensor.
  bool more_instances = true;
  while (more_instances) {
    ++epoch;
    for (int a = 0; a < naxes; ++a) idx[static_cast<size_t>(a)] = origin[static_cast<size_t>(a)];
    bool more_inner = true;
    while (more_inner) {
      for (int t = 0; t < op.num_tensors(); ++t) {
        if (op.tensors()[static_cast<size_t>(t)].is_output) continue;
        int64_t off = op.tensor_offset(t, idx, /*padded_domain=*/true);
        auto& st = stamps[static_cast<size_t>(t)][static_cast<size_t>(off)];
        if (st != epoch) {
          st = epoch;
          ++traffic;
        }
      }
      more_inner = false;
      for (int a = naxes - 1; a >= 0; --a) {
        auto ua = static_cast<size_t>(a);
        if (++idx[ua] < origin[ua] + tile[ua]) {
          more_inner = true;
          break;
        }
        idx[ua] = origin[ua];
      }
    }
    more_instances = false;
    for (int a = naxes - 1; a >= 0; --a) {
      auto ua = static_cast<size_t>(a);
      origin[ua] += tile[ua];
      if (origin[ua] < op.axis(a).padded) {
        more_instances = true;
        break;
      }
      origin[ua] = 0;
    }
  }

  for (int t = 0; t < op.num_tensors(); ++t)
    if (op.tensors()[static_cast<size_t>(t)].is_output) traffic += op.tensor_elems(t, true);
  return traffic;
}

TrafficReport traffic_report(const ETIRState& state, const HardwareSpec& hw) {
  TrafficReport report;
  for (int level = 1; level <= state.num_levels(); ++level)
    report.per_level.push_back({memory_traffic(state, hw, level), tile_footprint_elems(state, level)});
  return report;
}

double benefit_tiling(const ETIRState& before, const ETIRState& after, const HardwareSpec& hw,
                      int level) {
  double q_before = static_cast<double>(memory_traffic(before, hw, level));
  double q_after = static_cast<double>(memory_traffic(after, hw, level));
  double f_before = static_cast<double>(tile_footprint_elems(before, level));
  double f_after = static_cast<double>(tile_footprint_elems(after, level));
  return (q_before * f_after) / (q_after * f_before);
}

double caching_benefit(double latency_low, double bandwidth_low, double latency_high,
                       double bandwidth_high, double s_data_bytes) {
  return (latency_low + s_data_bytes / bandwidth_low) /
         (latency_high + s_data_bytes / bandwidth_high);
}

double benefit_caching(const ETIRState& state, const HardwareSpec& hw, int from_level,
                       int to_level) {
  if (to_level != from_level + 1 || from_level < 0 || to_level >= hw.num_levels())
    throw Error(ErrorCode::LevelOutOfRange,
                "cache step " + std::to_string(from_level) + "->" + std::to_string(to_level));
  const MemoryLevel& low = hw.level(from_level);
  const MemoryLevel& high = hw.level(to_level);
  double s_bytes = static_cast<double>(tile_footprint_bytes(state, to_level));
  return caching_benefit(low.latency_cycles, low.bandwidth_bytes_per_cycle, high.latency_cycles,
                         high.bandwidth_bytes_per_cycle, s_bytes);
}

double vthread_conflict_ratio(int64_t x, int64_t bank_width, int64_t v) {
  if (bank_width <= 0) return 1.0;
  return static_cast<double>(ceil_div(x, bank_width)) /
         static_cast<double>(ceil_div(x, v * bank_width));
}

double benefit_vthread(const ETIRState& state, const HardwareSpec& hw, int axis, int64_t v) {
  if (state.op().axis(axis).kind != AxisKind::Spatial)
    throw Error(ErrorCode::IllegalAction, "vthread benefit on reduce axis");
  int banked = hw.banked_level();
  if (banked < 0) return 1.0;
  int64_t x = state.tile_at(axis, banked);
  return vthread_conflict_ratio(x, hw.level(banked).bank_width_elems, v);
}

double utilization(const ETIRState& state, const HardwareSpec& hw) {
  int banked = hw.banked_level();
  if (banked < 0) return 1.0;
  int64_t bank_width = hw.level(banked).bank_width_elems;
  int64_t worst = 1;
  for (int a = 0; a < state.op().num_axes(); ++a) {
    if (state.op().axis(a).kind != AxisKind::Spatial) continue;
    int64_t x = state.tile_at(a, banked);
    worst = std::max(worst, ceil_div(x, state.vthread(a) * bank_width));
  }
  return std::clamp(1.0 / static_cast<double>(worst), 0.1, 1.0);
}

CostEstimate estimate_cost(const ETIRState& state, const HardwareSpec& hw) {
  if (!state.complete())
    throw Error(ErrorCode::IncompleteState,
                "cost needs a complete schedule, cur_mem_level=" + std::to_string(state.cur_mem_level()));

  const TensorOpSpec& op = state.op();
  CostEstimate cost;
  cost.compute_seconds =
      static_cast<double>(op.flops_padded()) / hw.peak_flops() / utilization(state, hw);
  cost.est_seconds = cost.compute_seconds;
  cost.bottleneck = "compute";

  auto add_channel = [&](int src_level, int64_t traffic_elems) {
    double bytes = static_cast<double>(traffic_elems) * op.dtype_bytes();
    double seconds = bytes / (hw.level(src_level).bandwidth_bytes_per_cycle * hw.clock_hz());
    cost.memory_seconds.emplace_back(hw.level(src_level).name, seconds);
    if (seconds > cost.est_seconds) {
      cost.est_seconds = seconds;
      cost.bottleneck = hw.level(src_level).name;
    }
  };

  if (state.num_levels() == 0) {
    // Degenerate hierarchy: every element crosses the single level once.
    int64_t total = 0;
    for (int t = 0; t < op.num_tensors(); ++t) total += op.tensor_elems(t, true);
    add_channel(0, total);
  } else {
    for (int level = 1; level <= state.num_levels(); ++level)
      add_channel(level - 1, memory_traffic(state, hw, level));
  }
  return cost;
}

}  // namespace gensor
