#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gensor/op_spec.hpp"

namespace gensor {

class ETIRState;

/// One storage level. Level 0 is the farthest from compute (e.g. global
/// memory); only level 0 may be unlimited.
struct MemoryLevel {
  std::string name;
  bool unlimited = false;
  int64_t capacity_bytes = 0;
  double bandwidth_bytes_per_cycle = 0.0;  // B in the caching benefit
  double latency_cycles = 0.0;             // L in the caching benefit
  int64_t bank_width_elems = 0;            // W in the vthread benefit, 0 = unbanked

  bool operator==(const MemoryLevel&) const = default;
};

/// Declarative memory/compute hierarchy. Levels 1..num_schedulable_levels()
/// are the cache levels a schedule tiles into.
class HardwareSpec {
 public:
  static HardwareSpec load(const Json& doc);
  static HardwareSpec load_text(const std::string& text);
  Json to_json() const;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  int num_schedulable_levels() const { return static_cast<int>(levels_.size()) - 1; }
  const MemoryLevel& level(int i) const { return levels_.at(static_cast<size_t>(i)); }
  const std::vector<MemoryLevel>& levels() const { return levels_; }

  double peak_flops() const { return peak_flops_; }
  double clock_hz() const { return clock_hz_; }
  int64_t max_threads_per_block() const { return max_threads_per_block_; }
  const std::vector<int64_t>& vthread_options() const { return vthread_options_; }
  const std::string& name() const { return name_; }

  /// Innermost banked level (bank_width_elems > 0), or -1 if none.
  int banked_level() const;

  bool operator==(const HardwareSpec& other) const;

 private:
  std::string name_;
  std::vector<MemoryLevel> levels_;
  double peak_flops_ = 1.0;
  double clock_hz_ = 1.0e9;
  int64_t max_threads_per_block_ = 1024;
  std::vector<int64_t> vthread_options_{1, 2, 4, 8};
};

/// True iff the footprint of one level-`level` tile fits that level's capacity.
bool capacity_check(const ETIRState& state, const HardwareSpec& hw, int level);

/// Byte footprint of one level-`level` tile instance (all tensors).
int64_t tile_footprint_bytes(const ETIRState& state, int level);

}  // namespace gensor
