#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "nargact/common.hpp"

namespace nargact {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) {
    if (d < 0) fail("shape", "negative extent");
    n *= d;
  }
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

// Dense row-major 64-bit float tensor. `grad`, when allocated, mirrors the
// data shape; `requires_grad` marks leaf parameters the optimizer owns.
struct Tensor {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until ensure_grad()
  bool requires_grad = false;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0)
      : shape(std::move(s)), data(static_cast<std::size_t>(shape_numel(shape)), fill) {}
  Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (static_cast<std::int64_t>(data.size()) != shape_numel(shape))
      fail("shape", "data length " + std::to_string(data.size()) + " != numel of " + shape_str(shape));
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  std::int64_t dim(std::size_t i) const { return shape.at(i); }
  std::size_t ndim() const { return shape.size(); }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
  void zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  }
  bool has_grad() const { return grad.size() == data.size() && !data.empty(); }

  double& at(std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
  double at(std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(Shape s, double fill = 0.0) {
  return std::make_shared<Tensor>(std::move(s), fill);
}
inline TensorPtr make_tensor(Shape s, std::vector<double> values) {
  return std::make_shared<Tensor>(std::move(s), std::move(values));
}
inline TensorPtr make_param(Shape s, double fill = 0.0) {
  auto t = make_tensor(std::move(s), fill);
  t->requires_grad = true;
  return t;
}
inline TensorPtr make_scalar(double v) { return make_tensor(Shape{}, std::vector<double>{v}); }

}  // namespace nargact
