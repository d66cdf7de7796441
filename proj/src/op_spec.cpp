#include "gensor/op_spec.hpp"

#include <algorithm>
#include <sstream>

#include "gensor/error.hpp"

namespace gensor {

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Gemm: return "gemm";
    case OpKind::Gemv: return "gemv";
    case OpKind::Conv2d: return "conv2d";
    case OpKind::AvgPool2d: return "avgpool2d";
  }
  return "?";
}

bool is_pow2(int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

int64_t next_pow2(int64_t v) {
  int64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

namespace {

int64_t require_int(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw Error(ErrorCode::MissingParam, "missing parameter '" + key + "'");
  if (!doc[key].is_number_integer())
    throw Error(ErrorCode::MissingParam, "parameter '" + key + "' must be an integer");
  return doc[key].get<int64_t>();
}

int64_t require_extent(const Json& doc, const std::string& key) {
  int64_t v = require_int(doc, key);
  if (v < 1) throw Error(ErrorCode::NonPositiveExtent, "'" + key + "' = " + std::to_string(v));
  return v;
}

std::vector<int64_t> require_array4(const Json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 4)
    throw Error(ErrorCode::MissingParam, "'" + key + "' must be a 4-element array");
  std::vector<int64_t> out;
  for (const auto& v : doc[key]) {
    int64_t x = v.get<int64_t>();
    if (x < 1) throw Error(ErrorCode::NonPositiveExtent, "'" + key + "' entry " + std::to_string(x));
    out.push_back(x);
  }
  return out;
}

int64_t derive_out(int64_t in, int64_t window, int64_t stride, const char* what) {
  int64_t out = (in - window) / stride + 1;
  if (in < window || out < 1)
    throw Error(ErrorCode::NonPositiveExtent, std::string(what) + " output extent would be < 1");
  return out;
}

// Distinct positions {o*stride + w : o in [0,to), w in [0,tw)}. Consecutive
// windows overlap only when stride < tw.
int64_t window_span(int64_t to, int64_t tw, int64_t stride) {
  return tw + (to - 1) * std::min(stride, tw);
}

}  // namespace

TensorOpSpec TensorOpSpec::parse(const Json& doc) {
  if (!doc.contains("kind")) throw Error(ErrorCode::MissingParam, "missing parameter 'kind'");
  std::string kind = doc["kind"].get<std::string>();

  TensorOpSpec op;
  if (doc.contains("dtype_bytes")) {
    op.dtype_bytes_ = static_cast<int>(require_extent(doc, "dtype_bytes"));
  }

  if (kind == "gemm") {
    op.kind_ = OpKind::Gemm;
    op.params_["M"] = require_extent(doc, "M");
    op.params_["K"] = require_extent(doc, "K");
    op.params_["N"] = require_extent(doc, "N");
  } else if (kind == "gemv") {
    op.kind_ = OpKind::Gemv;
    op.params_["M"] = require_extent(doc, "M");
    op.params_["N"] = require_extent(doc, "N");
  } else if (kind == "conv2d") {
    op.kind_ = OpKind::Conv2d;
    if (doc.contains("I")) {
      auto in = require_array4(doc, "I");
      auto kn = require_array4(doc, "K");
      op.params_["N"] = in[0];
      op.params_["C"] = in[1];
      op.params_["H"] = in[2];
      op.params_["W"] = in[3];
      op.params_["F"] = kn[0];
      op.params_["R"] = kn[2];
      op.params_["S"] = kn[3];
      if (kn[1] != in[1])
        throw Error(ErrorCode::ConfigError, "conv2d kernel channels do not match input channels");
      op.stride_ = doc.contains("S") ? require_extent(doc, "S") : 1;
    } else {
      for (const char* k : {"N", "C", "H", "W", "F", "R", "S"}) op.params_[k] = require_extent(doc, k);
      op.stride_ = doc.contains("stride") ? require_extent(doc, "stride") : 1;
    }
    op.params_["OH"] = derive_out(op.params_["H"], op.params_["R"], op.stride_, "conv2d");
    op.params_["OW"] = derive_out(op.params_["W"], op.params_["S"], op.stride_, "conv2d");
  } else if (kind == "avgpool2d") {
    op.kind_ = OpKind::AvgPool2d;
    if (doc.contains("I")) {
      auto in = require_array4(doc, "I");
      op.params_["N"] = in[0];
      op.params_["C"] = in[1];
      op.params_["H"] = in[2];
      op.params_["W"] = in[3];
      op.params_["F"] = require_extent(doc, "F");
      op.stride_ = doc.contains("S") ? require_extent(doc, "S") : 1;
    } else {
      for (const char* k : {"N", "C", "H", "W", "F"}) op.params_[k] = require_extent(doc, k);
      op.stride_ = doc.contains("stride") ? require_extent(doc, "stride") : 1;
    }
    op.params_["OH"] = derive_out(op.params_["H"], op.params_["F"], op.stride_, "avgpool2d");
    op.params_["OW"] = derive_out(op.params_["W"], op.params_["F"], op.stride_, "avgpool2d");
  } else {
    throw Error(ErrorCode::UnknownKind, "unsupported op kind '" + kind + "'");
  }

  op.build_axes_and_tensors();
  return op;
}

TensorOpSpec TensorOpSpec::parse_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  return parse(doc);
}

void TensorOpSpec::build_axes_and_tensors() {
  auto ax = [&](const char* name, int64_t extent, AxisKind k) {
    axes_.push_back(Axis{name, extent, next_pow2(extent), k});
  };
  auto p = [&](const std::string& k) { return params_.at(k); };

  switch (kind_) {
    case OpKind::Gemm:
      ax("m", p("M"), AxisKind::Spatial);
      ax("n", p("N"), AxisKind::Spatial);
      ax("k", p("K"), AxisKind::Reduce);
      tensors_ = {
          {"A", false, {{0, -1}, {2, -1}}},
          {"B", false, {{2, -1}, {1, -1}}},
          {"C", true, {{0, -1}, {1, -1}}},
      };
      break;
    case OpKind::Gemv:
      ax("m", p("M"), AxisKind::Spatial);
      ax("n", p("N"), AxisKind::Reduce);
      tensors_ = {
          {"A", false, {{0, -1}, {1, -1}}},
          {"x", false, {{1, -1}}},
          {"y", true, {{0, -1}}},
      };
      break;
    case OpKind::Conv2d:
      ax("n", p("N"), AxisKind::Spatial);
      ax("f", p("F"), AxisKind::Spatial);
      ax("h", p("OH"), AxisKind::Spatial);
      ax("w", p("OW"), AxisKind::Spatial);
      ax("c", p("C"), AxisKind::Reduce);
      ax("r", p("R"), AxisKind::Reduce);
      ax("s", p("S"), AxisKind::Reduce);
      tensors_ = {
          {"I", false, {{0, -1}, {4, -1}, {2, 5}, {3, 6}}},
          {"K", false, {{1, -1}, {4, -1}, {5, -1}, {6, -1}}},
          {"O", true, {{0, -1}, {1, -1}, {2, -1}, {3, -1}}},
      };
      break;
    case OpKind::AvgPool2d:
      ax("n", p("N"), AxisKind::Spatial);
      ax("c", p("C"), AxisKind::Spatial);
      ax("h", p("OH"), AxisKind::Spatial);
      ax("w", p("OW"), AxisKind::Spatial);
      ax("i", p("F"), AxisKind::Reduce);
      ax("j", p("F"), AxisKind::Reduce);
      tensors_ = {
          {"I", false, {{0, -1}, {1, -1}, {2, 4}, {3, 5}}},
          {"O", true, {{0, -1}, {1, -1}, {2, -1}, {3, -1}}},
      };
      break;
  }
}

int TensorOpSpec::axis_index(const std::string& name) const {
  for (size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  throw Error(ErrorCode::AxisNotFound, "no axis '" + name + "' in " + label());
}

int64_t TensorOpSpec::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error(ErrorCode::MissingParam, "no parameter '" + name + "'");
  return it->second;
}

std::vector<int64_t> TensorOpSpec::tile_elem_counts(std::span<const int64_t> tile) const {
  std::vector<int64_t> counts;
  counts.reserve(tensors_.size());
  for (const auto& t : tensors_) {
    int64_t n = 1;
    for (const auto& d : t.dims) {
      if (d.window_axis < 0) {
        n *= tile[static_cast<size_t>(d.axis)];
      } else {
        n *= window_span(tile[static_cast<size_t>(d.axis)], tile[static_cast<size_t>(d.window_axis)], stride_);
      }
    }
    counts.push_back(n);
  }
  return counts;
}

std::vector<int64_t> TensorOpSpec::tensor_dims(int t, bool padded_domain) const {
  const TensorInfo& info = tensors_.at(static_cast<size_t>(t));
  std::vector<int64_t> dims;
  for (const auto& d : info.dims) {
    const Axis& a = axes_[static_cast<size_t>(d.axis)];
    if (d.window_axis < 0) {
      dims.push_back(padded_domain ? a.padded : a.extent);
    } else if (padded_domain) {
      const Axis& w = axes_[static_cast<size_t>(d.window_axis)];
      dims.push_back(window_span(a.padded, w.padded, stride_));
    } else {
      // True-domain windowed dims address the real input tensor.
      dims.push_back(d.axis == 2 ? param("H") : param("W"));
    }
  }
  return dims;
}

int64_t TensorOpSpec::tensor_elems(int t, bool padded_domain) const {
  int64_t n = 1;
  for (int64_t d : tensor_dims(t, padded_domain)) n *= d;
  return n;
}

int64_t TensorOpSpec::tensor_offset(int t, std::span<const int64_t> axis_idx, bool padded_domain) const {
  const TensorInfo& info = tensors_.at(static_cast<size_t>(t));
  std::vector<int64_t> dims = tensor_dims(t, padded_domain);
  int64_t off = 0;
  for (size_t i = 0; i < info.dims.size(); ++i) {
    const TensorDim& d = info.dims[i];
    int64_t coord = axis_idx[static_cast<size_t>(d.axis)];
    if (d.window_axis >= 0) coord = coord * stride_ + axis_idx[static_cast<size_t>(d.window_axis)];
    off = off * dims[i] + coord;
  }
  return off;
}

TensorOpSpec::AccessPlan TensorOpSpec::access_plan(int t, bool padded_domain) const {
  AccessPlan plan;
  plan.map = tensors_.at(static_cast<size_t>(t)).dims;
  plan.dims = tensor_dims(t, padded_domain);
  plan.strides.assign(plan.dims.size(), 1);
  for (size_t i = plan.dims.size(); i-- > 1;)
    plan.strides[i - 1] = plan.strides[i] * plan.dims[i];
  plan.window_stride = stride_;
  return plan;
}

int64_t TensorOpSpec::flops_padded() const {
  int64_t iters = 1;
  for (const Axis& a : axes_) iters *= a.padded;
  switch (kind_) {
    case OpKind::Gemm:
    case OpKind::Gemv:
    case OpKind::Conv2d:
      return 2 * iters;  // multiply + accumulate
    case OpKind::AvgPool2d:
      return iters;
  }
  return iters;
}

Json TensorOpSpec::to_json() const {
  Json j;
  j["kind"] = op_kind_name(kind_);
  switch (kind_) {
    case OpKind::Gemm:
      j["M"] = params_.at("M");
      j["K"] = params_.at("K");
      j["N"] = params_.at("N");
      break;
    case OpKind::Gemv:
      j["M"] = params_.at("M");
      j["N"] = params_.at("N");
      break;
    case OpKind::Conv2d:
      j["I"] = {params_.at("N"), params_.at("C"), params_.at("H"), params_.at("W")};
      j["K"] = {params_.at("F"), params_.at("C"), params_.at("R"), params_.at("S")};
      j["S"] = stride_;
      break;
    case OpKind::AvgPool2d:
      j["I"] = {params_.at("N"), params_.at("C"), params_.at("H"), params_.at("W")};
      j["F"] = params_.at("F");
      j["S"] = stride_;
      break;
  }
  j["dtype_bytes"] = dtype_bytes_;
  return j;
}

bool TensorOpSpec::operator==(const TensorOpSpec& other) const {
  return kind_ == other.kind_ && params_ == other.params_ && stride_ == other.stride_ &&
         dtype_bytes_ == other.dtype_bytes_;
}

std::string TensorOpSpec::label() const {
  std::ostringstream os;
  os << op_kind_name(kind_) << "(";
  bool first = true;
  for (const Axis& a : axes_) {
    if (!first) os << ",";
    os << a.name << "=" << a.extent;
    first = false;
  }
  os << ")";
  return os.str();
}

}  // namespace gensor
