#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gensor {

// Insertion-ordered JSON: file outputs stay byte-stable across runs.
using Json = nlohmann::ordered_json;

enum class OpKind { Gemm, Gemv, Conv2d, AvgPool2d };

enum class AxisKind { Spatial, Reduce };

/// One loop dimension of an operator's iteration domain. Scheduling runs on
/// the padded extent (next power of two); lowering guards the tail.
struct Axis {
  std::string name;
  int64_t extent = 1;
  int64_t padded = 1;
  AxisKind kind = AxisKind::Spatial;
};

/// A tensor touched by the operator, described in terms of iteration axes.
/// Windowed dims (conv/pool input) pair an output axis with a window axis.
struct TensorDim {
  int axis = -1;        // iteration axis producing this dim
  int window_axis = -1; // second axis for strided-window dims, -1 otherwise
};

struct TensorInfo {
  std::string name;
  bool is_output = false;
  std::vector<TensorDim> dims;
};

const char* op_kind_name(OpKind kind);
int64_t next_pow2(int64_t v);
bool is_pow2(int64_t v);

/// Parsed, validated operator specification: iteration domain, access shapes
/// and the defining arithmetic of one of the four supported operator families.
class TensorOpSpec {
 public:
  static TensorOpSpec parse(const Json& doc);
  static TensorOpSpec parse_text(const std::string& text);

  OpKind kind() const { return kind_; }
  int dtype_bytes() const { return dtype_bytes_; }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int i) const { return axes_.at(static_cast<size_t>(i)); }
  int num_axes() const { return static_cast<int>(axes_.size()); }
  int axis_index(const std::string& name) const;  // throws AxisNotFound
  int64_t stride() const { return stride_; }
  int64_t param(const std::string& name) const;

  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  int num_tensors() const { return static_cast<int>(tensors_.size()); }

  /// Distinct elements of each tensor touched by one tile instance with the
  /// given per-axis tile sizes (padded scheduling domain, closed form).
  std::vector<int64_t> tile_elem_counts(std::span<const int64_t> tile) const;

  /// Concrete dim sizes of tensor `t`, on the true or padded domain.
  std::vector<int64_t> tensor_dims(int t, bool padded_domain) const;
  int64_t tensor_elems(int t, bool padded_domain) const;

  /// Flat offset of the element of tensor `t` addressed by the given
  /// per-axis iteration indices, laid out row-major over `tensor_dims`.
  int64_t tensor_offset(int t, std::span<const int64_t> axis_idx, bool padded_domain) const;

  /// Precomputed row-major strides for hot loops.
  struct AccessPlan {
    std::vector<TensorDim> map;
    std::vector<int64_t> dims;
    std::vector<int64_t> strides;
    int64_t window_stride = 1;

    int64_t offset(std::span<const int64_t> axis_idx) const {
      int64_t off = 0;
      for (size_t i = 0; i < map.size(); ++i) {
        int64_t coord = axis_idx[static_cast<size_t>(map[i].axis)];
        if (map[i].window_axis >= 0)
          coord = coord * window_stride + axis_idx[static_cast<size_t>(map[i].window_axis)];
        off += coord * strides[i];
      }
      return off;
    }
  };
  AccessPlan access_plan(int t, bool padded_domain) const;

  /// Accumulated FLOPs of the whole (padded) iteration space.
  int64_t flops_padded() const;

  Json to_json() const;
  bool operator==(const TensorOpSpec& other) const;

  std::string label() const;

 private:
  TensorOpSpec() = default;
  void build_axes_and_tensors();

  OpKind kind_ = OpKind::Gemm;
  std::map<std::string, int64_t> params_;
  int dtype_bytes_ = 4;
  int64_t stride_ = 1;
  std::vector<Axis> axes_;
  std::vector<TensorInfo> tensors_;
};

}  // namespace gensor
