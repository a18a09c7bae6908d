#pragma once

#include "nargact/rng.hpp"
#include "nargact/tensor.hpp"

namespace nargact {

// Xavier/Glorot uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
// 2-D shapes are (in, out); 4-D conv kernels are (O, C, KH, KW) with
// fan_in = C*KH*KW and fan_out = O*KH*KW. Fill order is row-major.
inline TensorPtr init_xavier(Shape shape, Rng& rng) {
  double fan_in = 0, fan_out = 0;
  if (shape.size() == 2) {
    fan_in = static_cast<double>(shape[0]);
    fan_out = static_cast<double>(shape[1]);
  } else if (shape.size() == 4) {
    fan_in = static_cast<double>(shape[1] * shape[2] * shape[3]);
    fan_out = static_cast<double>(shape[0] * shape[2] * shape[3]);
  } else {
    fail("shape", "init_xavier expects a 2-D or 4-D shape, got " + shape_str(shape));
  }
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  auto t = make_tensor(std::move(shape));
  for (auto& v : t->data) v = rng.uniform(-a, a);
  return t;
}

inline TensorPtr init_uniform(Shape shape, double lo, double hi, Rng& rng) {
  auto t = make_tensor(std::move(shape));
  for (auto& v : t->data) v = rng.uniform(lo, hi);
  return t;
}

inline double xavier_bound(const Shape& shape) {
  if (shape.size() == 2)
    return std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
  return std::sqrt(6.0 / static_cast<double>(shape[1] * shape[2] * shape[3] + shape[0] * shape[2] * shape[3]));
}

}  // namespace nargact
