#include "gensor/hardware.hpp"

#include <numeric>

#include "gensor/error.hpp"
#include "gensor/etir.hpp"

namespace gensor {

HardwareSpec HardwareSpec::load(const Json& doc) {
  HardwareSpec hw;
  hw.name_ = doc.value("name", std::string("unnamed"));
  if (!doc.contains("levels") || !doc["levels"].is_array() || doc["levels"].empty())
    throw Error(ErrorCode::MissingLevel, "hardware spec needs a nonempty 'levels' array");

  for (const auto& lj : doc["levels"]) {
    MemoryLevel level;
    level.name = lj.value("name", std::string("level") + std::to_string(hw.levels_.size()));
    if (lj.contains("capacity_bytes") && lj["capacity_bytes"].is_string()) {
      if (lj["capacity_bytes"].get<std::string>() != "unlimited")
        throw Error(ErrorCode::ConfigError, "capacity_bytes must be a number or \"unlimited\"");
      level.unlimited = true;
    } else {
      if (!lj.contains("capacity_bytes"))
        throw Error(ErrorCode::ConfigError, "level '" + level.name + "' missing capacity_bytes");
      level.capacity_bytes = lj["capacity_bytes"].get<int64_t>();
      if (level.capacity_bytes <= 0)
        throw Error(ErrorCode::ConfigError, "level '" + level.name + "' capacity must be positive");
    }
    level.bandwidth_bytes_per_cycle = lj.value("bandwidth_bytes_per_cycle", 0.0);
    level.latency_cycles = lj.value("latency_cycles", 0.0);
    level.bank_width_elems = lj.value("bank_width_elems", int64_t{0});
    if (level.bandwidth_bytes_per_cycle <= 0.0)
      throw Error(ErrorCode::ConfigError, "level '" + level.name + "' bandwidth must be positive");
    if (level.latency_cycles < 0.0)
      throw Error(ErrorCode::ConfigError, "level '" + level.name + "' latency must be nonnegative");
    hw.levels_.push_back(level);
  }

  for (size_t i = 1; i < hw.levels_.size(); ++i) {
    const MemoryLevel& outer = hw.levels_[i - 1];
    const MemoryLevel& inner = hw.levels_[i];
    if (inner.unlimited)
      throw Error(ErrorCode::MonotonicityViolation, "only level 0 may be unlimited");
    if (!outer.unlimited && inner.capacity_bytes >= outer.capacity_bytes)
      throw Error(ErrorCode::MonotonicityViolation,
                  "capacity of '" + inner.name + "' must be below '" + outer.name + "'");
    if (inner.bandwidth_bytes_per_cycle <= outer.bandwidth_bytes_per_cycle)
      throw Error(ErrorCode::MonotonicityViolation,
                  "bandwidth of '" + inner.name + "' must exceed '" + outer.name + "'");
  }

  hw.peak_flops_ = doc.value("peak_flops", 1.0e12);
  hw.clock_hz_ = doc.value("clock_hz", 1.0e9);
  hw.max_threads_per_block_ = doc.value("max_threads_per_block", int64_t{1024});
  if (hw.peak_flops_ <= 0 || hw.clock_hz_ <= 0 || hw.max_threads_per_block_ <= 0)
    throw Error(ErrorCode::ConfigError, "peak_flops, clock_hz and max_threads_per_block must be positive");
  if (doc.contains("vthread_options")) {
    hw.vthread_options_.clear();
    for (const auto& v : doc["vthread_options"]) {
      int64_t opt = v.get<int64_t>();
      if (opt < 1 || !is_pow2(opt))
        throw Error(ErrorCode::ConfigError, "vthread options must be powers of two >= 1");
      hw.vthread_options_.push_back(opt);
    }
    if (hw.vthread_options_.empty())
      throw Error(ErrorCode::ConfigError, "vthread_options must not be empty");
  }
  return hw;
}

HardwareSpec HardwareSpec::load_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  return load(doc);
}

Json HardwareSpec::to_json() const {
  Json j;
  j["name"] = name_;
  j["peak_flops"] = peak_flops_;
  j["clock_hz"] = clock_hz_;
  j["max_threads_per_block"] = max_threads_per_block_;
  j["vthread_options"] = vthread_options_;
  j["levels"] = Json::array();
  for (const MemoryLevel& level : levels_) {
    Json lj;
    lj["name"] = level.name;
    if (level.unlimited)
      lj["capacity_bytes"] = "unlimited";
    else
      lj["capacity_bytes"] = level.capacity_bytes;
    lj["bandwidth_bytes_per_cycle"] = level.bandwidth_bytes_per_cycle;
    lj["latency_cycles"] = level.latency_cycles;
    lj["bank_width_elems"] = level.bank_width_elems;
    j["levels"].push_back(lj);
  }
  return j;
}

int HardwareSpec::banked_level() const {
  for (int i = num_levels() - 1; i >= 0; --i)
    if (levels_[static_cast<size_t>(i)].bank_width_elems > 0) return i;
  return -1;
}

bool HardwareSpec::operator==(const HardwareSpec& other) const {
  return name_ == other.name_ && levels_ == other.levels_ && peak_flops_ == other.peak_flops_ &&
         clock_hz_ == other.clock_hz_ && max_threads_per_block_ == other.max_threads_per_block_ &&
         vthread_options_ == other.vthread_options_;
}

int64_t tile_footprint_bytes(const ETIRState& state, int level) {
  std::vector<int64_t> tile = state.tiles_at_level(level);
  std::vector<int64_t> counts = state.op().tile_elem_counts(tile);
  int64_t elems = std::accumulate(counts.begin(), counts.end(), int64_t{0});
  return elems * state.op().dtype_bytes();
}

bool capacity_check(const ETIRState& state, const HardwareSpec& hw, int level) {
  if (level < 0 || level >= hw.num_levels())
    throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
  const MemoryLevel& mem = hw.level(level);
  if (mem.unlimited || level == 0) return true;
  return tile_footprint_bytes(state, level) <= mem.capacity_bytes;
}

}  // namespace gensor
