#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gensor/hardware.hpp"
#include "gensor/op_spec.hpp"

namespace gensor {

enum class ActionKind { Tile, InvTile, SetVThread, Cache };

const char* action_kind_name(ActionKind kind);

/// One scheduling primitive: an edge of the construction graph.
/// Tile divides the tile being edited by `factor`, InvTile multiplies it,
/// SetVThread sets a spatial axis's virtual-thread stride to `factor`,
/// Cache commits the current level and moves editing one level inward.
struct Action {
  ActionKind kind = ActionKind::Cache;
  int axis = -1;       // unused for Cache
  int64_t factor = 0;  // power of two; unused for Cache

  auto operator<=>(const Action&) const = default;
};

std::string action_str(const Action& a, const TensorOpSpec& op);

/// A schedule state over the padded iteration domain: per-axis tile sizes for
/// each schedulable memory level plus virtual-thread strides.
///
/// tile_at(axis, level) is the tile edge length at hardware level `level`
/// (1 = outermost cache, num_levels() = innermost). The per-axis chain
///   padded extent >= tile_at(1) >= ... >= tile_at(L) >= vthread >= 1
/// always holds; levels deeper than the editing level track the edited tile
/// until caching reaches them. States are immutable snapshots: apply() returns
/// a new state.
class ETIRState {
 public:
  static ETIRState initial(const TensorOpSpec& op, const HardwareSpec& hw);
  static ETIRState initial(const TensorOpSpec& op, int num_levels);

  const TensorOpSpec& op() const { return *op_; }
  int num_levels() const { return num_levels_; }
  int cur_mem_level() const { return cur_mem_level_; }
  bool complete() const { return cur_mem_level_ == num_levels_; }

  /// Level whose tiles Tile/InvTile currently edit; only valid while the
  /// state is incomplete.
  int edit_level() const { return cur_mem_level_ + 1; }

  int64_t tile_at(int axis, int level) const;
  int64_t vthread(int axis) const { return vthreads_.at(static_cast<size_t>(axis)); }

  /// Tile sizes of all axes at one level (level 0 = padded extents).
  std::vector<int64_t> tiles_at_level(int level) const;

  bool is_legal(const Action& a) const;
  ETIRState apply(const Action& a) const;  // throws IllegalAction / AxisNotFound

  bool operator==(const ETIRState& other) const;
  size_t hash() const;

  /// Compact text form, e.g. "L1 m=[16,8]v2 n=[8,8]v1 k=[64,64]" (debugging,
  /// tie-breaking, hashing).
  std::string repr() const;

 private:
  ETIRState() = default;
  void check_axis(int axis) const;

  const TensorOpSpec* op_ = nullptr;
  int num_levels_ = 0;
  int cur_mem_level_ = 0;
  std::vector<std::vector<int64_t>> tiles_;  // [axis][level-1]
  std::vector<int64_t> vthreads_;            // per axis, 1 on reduce axes
};

}  // namespace gensor
