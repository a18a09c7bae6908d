#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nargact/inner_net.hpp"

namespace nargact {

enum class OuterKind { kMlp, kConv };
enum class ActivationKind { kInnerNet, kRelu };

// Architecture description of a host classifier. `hidden` holds MLP layer
// widths or conv feature-map counts; conv layers are 3x3 stride-1 with same
// padding, each followed by 2x2 max pooling with stride 2.
struct OuterSpec {
  OuterKind kind = OuterKind::kMlp;
  std::vector<std::int64_t> input_dims;  // {features} for mlp, {C,H,W} for conv
  std::int64_t classes = 10;
  std::vector<std::int64_t> hidden = {64, 64, 64};
  int arity = 2;
  ActivationKind activation = ActivationKind::kInnerNet;
  double dropout = 0.5;
  bool layer_norm = true;

  std::int64_t input_numel() const;
  // spatial extent after each conv+pool stage (conv only)
  std::vector<std::int64_t> spatial_walk() const;
  void validate() const;

  static OuterSpec mlp(std::int64_t input, std::int64_t classes, std::vector<std::int64_t> hidden,
                       int arity, ActivationKind act);
  static OuterSpec conv(std::vector<std::int64_t> chw, std::int64_t classes,
                        std::vector<std::int64_t> maps, int arity, ActivationKind act);
};

struct ParamCount {
  std::int64_t input_layer = 0;
  std::int64_t hidden_stack = 0;
  std::int64_t output_layer = 0;
  std::int64_t inner_net = 0;
  std::int64_t layer_norm = 0;
  std::optional<std::int64_t> paper_formula;  // the published expression; MLP inner-net specs only

  std::int64_t total() const {
    return input_layer + hidden_stack + output_layer + inner_net + layer_norm;
  }
  std::int64_t total_without_layer_norm() const { return total() - layer_norm; }
};

// Counts actual instantiated parameters. Linear/conv layers immediately
// followed by layer norm carry no bias (the LN shift absorbs it); layer-norm
// gains/biases are counted separately and included in total().
ParamCount param_count(const OuterSpec& spec);

struct BaselineMatch {
  OuterSpec spec;          // ReLU net, widths floor(sqrt(n)*h) + beta
  std::int64_t beta = 0;
  std::int64_t proposed_params = 0;
  std::int64_t baseline_params = 0;
  double rel_mismatch = 0.0;
};

// Parameter-matched ReLU baseline: single beta in [0,64] minimizing the
// count gap, ties toward larger beta; error if no beta gets under 2%.
BaselineMatch match_baseline(const OuterSpec& spec);

// Instantiated host network. Holds the single shared inner net when the
// spec asks for one; per-layer order is linear/conv -> layer norm ->
// activation -> dropout -> (pool). The classifier head is a plain linear map.
class OuterNet {
 public:
  OuterNet(OuterSpec spec, InnerNetPtr inner, Rng& rng);

  // x is (B, features) for mlp or (B,C,H,W) for conv. dropout_rng may be
  // null when !training. Taps, when given, collect every inner-net input.
  TensorPtr forward(Tape& tape, const TensorPtr& x, Rng* dropout_rng, bool training,
                    TapSink* tap = nullptr);

  const OuterSpec& spec() const { return spec_; }
  InnerNetPtr inner() const { return inner_; }
  std::vector<TensorPtr> outer_parameters() const;
  std::vector<std::pair<std::string, TensorPtr>> named_outer_parameters() const;
  std::uint64_t outer_digest() const;

 private:
  struct Layer {
    TensorPtr w;                 // (in,out) or (O,C,3,3)
    TensorPtr b;                 // null when layer norm follows
    TensorPtr ln_gain, ln_bias;  // null without layer norm
  };
  OuterSpec spec_;
  InnerNetPtr inner_;
  std::vector<Layer> layers_;
  TensorPtr out_w, out_b;
};

using OuterNetPtr = std::shared_ptr<OuterNet>;

}  // namespace nargact
