#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nargact/ops.hpp"
#include "nargact/rng.hpp"
#include "nargact/tape.hpp"
#include "nargact/tensor.hpp"

namespace nargact {

// The learned activation function: a shared n-argument -> scalar MLP,
// n -> 64 -> 64 -> 1 with ReLU after the hidden layers and a linear output.
// One parameter set serves every unit of every layer of the hosting network.
class InnerNet {
 public:
  static constexpr std::int64_t kHidden = 64;

  InnerNet(int arity, Rng& rng);  // Xavier weights, zero biases

  int arity() const { return arity_; }
  std::vector<TensorPtr> parameters() const { return {w1, b1, w2, b2, w3, b3}; }
  std::vector<std::pair<std::string, TensorPtr>> named_parameters() const;
  std::int64_t param_count() const;  // 64n + 4289
  std::uint64_t digest() const;

  // Plain forward of one argument tuple; pure and thread-safe.
  double eval(const double* args) const;
  std::function<double(const std::vector<double>&)> as_function() const;

  // Whether hosting networks express the application as 1x1 convolutions
  // over channel groups (same map either way).
  bool conv_mode = false;

  TensorPtr w1, b1, w2, b2, w3, b3;  // weights are (in, out)

 private:
  int arity_;
};

using InnerNetPtr = std::shared_ptr<InnerNet>;

// Collects the argument tuples fed to the inner net, in application order.
// Rows group as: all sites of a call, batch-major then unit then position.
struct TapSink {
  int arity = 0;
  std::vector<double> rows;              // flattened (count, arity)
  std::vector<std::int64_t> layer_ends;  // cumulative row count after each tapped call
  std::int64_t count() const { return arity ? static_cast<std::int64_t>(rows.size()) / arity : 0; }
  void clear() {
    rows.clear();
    layer_ends.clear();
  }
};

// Applies the shared inner net to contiguous argument blocks of a
// preactivation tensor: features [n*i, n*i+n) form block i. 2-D input
// (B, n*h) -> (B, h); 4-D input (B, n*h, H, W) -> (B, h, H, W) with every
// spatial position an independent application site. Gradients flow to the
// preactivations and accumulate into the shared inner parameters over all
// sites. Implemented as one fused tape op that regathers and recomputes
// hidden activations during backward instead of taping them.
TensorPtr apply_activation(Tape& tape, const InnerNetPtr& net, const TensorPtr& preact,
                           TapSink* tap = nullptr);

// Reference route for the conv representation: slice channel groups, run the
// inner layers as 1x1 convolutions, concatenate the per-group outputs.
// Mathematically identical to apply_activation on the same 4-D tensor.
TensorPtr apply_activation_conv(Tape& tape, const InnerNetPtr& net, const TensorPtr& preact);

struct GridAxis {
  double lo = 0.0, hi = 0.0;
  std::int64_t n = 1;
};

struct GridEval {
  std::vector<GridAxis> axes;
  std::vector<double> values;  // row-major, last axis fastest
};

// Evaluates f at the cell centers of an axis-aligned grid. Degenerate axes
// (lo == hi) collapse to a single evaluation point.
GridEval eval_on_grid(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<GridAxis> axes);
GridEval eval_on_grid(const InnerNet& net, std::vector<GridAxis> axes);

}  // namespace nargact
