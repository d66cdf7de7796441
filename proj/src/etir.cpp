#include "gensor/etir.hpp"

#include <functional>
#include <sstream>

#include "gensor/error.hpp"

namespace gensor {

const char* action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::Tile: return "tile";
    case ActionKind::InvTile: return "inv_tile";
    case ActionKind::SetVThread: return "set_vthread";
    case ActionKind::Cache: return "cache";
  }
  return "?";
}

std::string action_str(const Action& a, const TensorOpSpec& op) {
  std::ostringstream os;
  os << action_kind_name(a.kind);
  if (a.kind != ActionKind::Cache)
    os << "(" << op.axis(a.axis).name << "," << a.factor << ")";
  return os.str();
}

ETIRState ETIRState::initial(const TensorOpSpec& op, const HardwareSpec& hw) {
  return initial(op, hw.num_schedulable_levels());
}

ETIRState ETIRState::initial(const TensorOpSpec& op, int num_levels) {
  ETIRState s;
  s.op_ = &op;
  s.num_levels_ = num_levels;
  s.cur_mem_level_ = 0;
  s.tiles_.resize(static_cast<size_t>(op.num_axes()));
  for (int a = 0; a < op.num_axes(); ++a)
    s.tiles_[static_cast<size_t>(a)].assign(static_cast<size_t>(num_levels), op.axis(a).padded);
  s.vthreads_.assign(static_cast<size_t>(op.num_axes()), 1);
  return s;
}

void ETIRState::check_axis(int axis) const {
  if (axis < 0 || axis >= op_->num_axes())
    throw Error(ErrorCode::AxisNotFound, "axis index " + std::to_string(axis));
}

int64_t ETIRState::tile_at(int axis, int level) const {
  if (level < 0 || level > num_levels_)
    throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
  if (level == 0) return op_->axis(axis).padded;
  return tiles_.at(static_cast<size_t>(axis)).at(static_cast<size_t>(level - 1));
}

std::vector<int64_t> ETIRState::tiles_at_level(int level) const {
  std::vector<int64_t> out;
  out.reserve(tiles_.size());
  for (int a = 0; a < op_->num_axes(); ++a) out.push_back(tile_at(a, level));
  return out;
}

bool ETIRState::is_legal(const Action& a) const {
  if (a.kind == ActionKind::Cache) return cur_mem_level_ < num_levels_;

  if (a.axis < 0 || a.axis >= op_->num_axes()) return false;
  const Axis& ax = op_->axis(a.axis);

  if (a.kind == ActionKind::SetVThread) {
    if (ax.kind != AxisKind::Spatial) return false;
    if (a.factor < 1 || !is_pow2(a.factor)) return false;
    if (a.factor == vthread(a.axis)) return false;  // no-op
    return a.factor <= tile_at(a.axis, num_levels_);
  }

  // Tile / InvTile edit the tile at edit_level().
  if (cur_mem_level_ >= num_levels_) return false;
  if (a.factor < 2 || !is_pow2(a.factor)) return false;
  int64_t cur = tile_at(a.axis, edit_level());
  if (a.kind == ActionKind::Tile) {
    if (cur % a.factor != 0) return false;
    return cur / a.factor >= vthread(a.axis);
  }
  // InvTile: stay within the next outer tile (the padded extent for level 1).
  return cur * a.factor <= tile_at(a.axis, edit_level() - 1);
}

ETIRState ETIRState::apply(const Action& a) const {
  if (a.kind != ActionKind::Cache) check_axis(a.axis);
  if (!is_legal(a))
    throw Error(ErrorCode::IllegalAction, action_str(a, *op_) + " in " + repr());

  ETIRState next = *this;
  switch (a.kind) {
    case ActionKind::Cache:
      next.cur_mem_level_ += 1;
      break;
    case ActionKind::SetVThread:
      next.vthreads_[static_cast<size_t>(a.axis)] = a.factor;
      break;
    case ActionKind::Tile:
    case ActionKind::InvTile: {
      int64_t cur = tile_at(a.axis, edit_level());
      int64_t updated = a.kind == ActionKind::Tile ? cur / a.factor : cur * a.factor;
      // Levels deeper than the editing level are unscheduled; they follow it.
      auto& tiles = next.tiles_[static_cast<size_t>(a.axis)];
      for (int l = edit_level(); l <= num_levels_; ++l) tiles[static_cast<size_t>(l - 1)] = updated;
      break;
    }
  }
  return next;
}

bool ETIRState::operator==(const ETIRState& other) const {
  return op_ == other.op_ && num_levels_ == other.num_levels_ &&
         cur_mem_level_ == other.cur_mem_level_ && tiles_ == other.tiles_ &&
         vthreads_ == other.vthreads_;
}

size_t ETIRState::hash() const {
  size_t h = std::hash<int>()(cur_mem_level_);
  auto mix = [&h](int64_t v) { h = h * 1099511628211ULL + static_cast<size_t>(v) + 0x9e3779b9; };
  for (const auto& per_axis : tiles_)
    for (int64_t t : per_axis) mix(t);
  for (int64_t v : vthreads_) mix(v);
  return h;
}

std::string ETIRState::repr() const {
  std::ostringstream os;
  os << "L" << cur_mem_level_;
  for (int a = 0; a < op_->num_axes(); ++a) {
    os << " " << op_->axis(a).name << "=[";
    for (int l = 1; l <= num_levels_; ++l) os << (l > 1 ? "," : "") << tile_at(a, l);
    os << "]";
    if (op_->axis(a).kind == AxisKind::Spatial) os << "v" << vthread(a);
  }
  return os.str();
}

}  // namespace gensor
