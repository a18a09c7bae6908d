#include "nargact/outer_net.hpp"

#include <algorithm>
#include <cmath>

#include "nargact/init.hpp"
#include "nargact/ops.hpp"

namespace nargact {

std::int64_t OuterSpec::input_numel() const {
  std::int64_t n = 1;
  for (auto d : input_dims) n *= d;
  return n;
}

std::vector<std::int64_t> OuterSpec::spatial_walk() const {
  if (kind != OuterKind::kConv) fail("contract", "spatial_walk is for conv specs");
  std::int64_t h = input_dims.at(1), w = input_dims.at(2);
  std::vector<std::int64_t> sizes;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    // 3x3 conv, stride 1, same padding keeps h,w; 2x2/2 pool floors them
    h = (h - 2) / 2 + 1;
    w = (w - 2) / 2 + 1;
    if (h < 1 || w < 1) fail("shape", "conv stack exhausts the spatial extent at stage " + std::to_string(i));
    sizes.push_back(h);
  }
  return sizes;
}

void OuterSpec::validate() const {
  if (hidden.empty()) fail("config", "outer spec needs at least one hidden layer");
  if (classes < 2) fail("config", "outer spec needs at least two classes");
  if (arity < 1 || arity > 3) fail("config", "arity must be 1, 2 or 3");
  if (dropout < 0.0 || dropout >= 1.0) fail("config", "dropout must be in [0,1)");
  if (kind == OuterKind::kMlp && input_dims.size() != 1)
    fail("config", "mlp spec expects one input extent");
  if (kind == OuterKind::kConv && input_dims.size() != 3)
    fail("config", "conv spec expects (C,H,W) input dims");
  if (kind == OuterKind::kConv) spatial_walk();
}

OuterSpec OuterSpec::mlp(std::int64_t input, std::int64_t classes, std::vector<std::int64_t> hidden,
                         int arity, ActivationKind act) {
  OuterSpec s;
  s.kind = OuterKind::kMlp;
  s.input_dims = {input};
  s.classes = classes;
  s.hidden = std::move(hidden);
  s.arity = arity;
  s.activation = act;
  s.validate();
  return s;
}

OuterSpec OuterSpec::conv(std::vector<std::int64_t> chw, std::int64_t classes,
                          std::vector<std::int64_t> maps, int arity, ActivationKind act) {
  OuterSpec s;
  s.kind = OuterKind::kConv;
  s.input_dims = std::move(chw);
  s.classes = classes;
  s.hidden = std::move(maps);
  s.arity = arity;
  s.activation = act;
  s.validate();
  return s;
}

ParamCount param_count(const OuterSpec& spec) {
  spec.validate();
  const bool inner = spec.activation == ActivationKind::kInnerNet;
  const std::int64_t n = inner ? spec.arity : 1;
  const bool ln = spec.layer_norm;
  ParamCount pc;

  const auto& h = spec.hidden;
  const std::int64_t L = static_cast<std::int64_t>(h.size());
  if (spec.kind == OuterKind::kMlp) {
    const std::int64_t x = spec.input_numel();
    pc.input_layer = x * n * h[0] + (ln ? 0 : n * h[0]);
    for (std::int64_t l = 1; l < L; ++l)
      pc.hidden_stack += h[l - 1] * n * h[l] + (ln ? 0 : n * h[l]);
    pc.output_layer = h[L - 1] * spec.classes + spec.classes;
    if (ln)
      for (std::int64_t l = 0; l < L; ++l) pc.layer_norm += 2 * n * h[l];
    if (inner) {
      pc.inner_net = 64 * n + 4289;
      std::int64_t formula = x * (n * h[0] + 1);
      for (std::int64_t l = 1; l < L; ++l) formula += n * h[l - 1] * h[l];
      formula += h[L - 1] * spec.classes + (65 * n + 4288);
      pc.paper_formula = formula;
    }
  } else {
    const std::int64_t cin = spec.input_dims[0];
    pc.input_layer = cin * n * h[0] * 9 + (ln ? 0 : n * h[0]);
    for (std::int64_t l = 1; l < L; ++l)
      pc.hidden_stack += h[l - 1] * n * h[l] * 9 + (ln ? 0 : n * h[l]);
    const auto walk = spec.spatial_walk();
    const std::int64_t hf = walk.back();
    const std::int64_t flat = h[L - 1] * hf * hf;
    pc.output_layer = flat * spec.classes + spec.classes;
    if (ln)
      for (std::int64_t l = 0; l < L; ++l) pc.layer_norm += 2 * n * h[l];
    if (inner) pc.inner_net = 64 * n + 4289;
  }
  return pc;
}

BaselineMatch match_baseline(const OuterSpec& spec) {
  if (spec.activation != ActivationKind::kInnerNet)
    fail("contract", "match_baseline expects an inner-net spec");
  const double root = std::sqrt(static_cast<double>(spec.arity));
  const std::int64_t proposed = param_count(spec).total();

  BaselineMatch best;
  best.proposed_params = proposed;
  std::int64_t best_gap = -1;
  for (std::int64_t beta = 0; beta <= 64; ++beta) {
    OuterSpec cand = spec;
    cand.activation = ActivationKind::kRelu;
    cand.arity = 1;
    for (auto& width : cand.hidden)
      width = static_cast<std::int64_t>(std::floor(root * static_cast<double>(width))) + beta;
    const std::int64_t params = param_count(cand).total();
    const std::int64_t gap = std::llabs(params - proposed);
    if (best_gap < 0 || gap < best_gap || (gap == best_gap && beta > best.beta)) {
      best_gap = gap;
      best.beta = beta;
      best.spec = cand;
      best.baseline_params = params;
    }
  }
  best.rel_mismatch = static_cast<double>(best_gap) / static_cast<double>(proposed);
  if (best.rel_mismatch >= 0.02)
    fail("config", "no beta in [0,64] matches parameter counts within 2% (best " +
                       std::to_string(best.rel_mismatch * 100.0) + "% at beta=" +
                       std::to_string(best.beta) + ")");
  return best;
}

OuterNet::OuterNet(OuterSpec spec, InnerNetPtr inner, Rng& rng)
    : spec_(std::move(spec)), inner_(std::move(inner)) {
  spec_.validate();
  const bool use_inner = spec_.activation == ActivationKind::kInnerNet;
  if (use_inner) {
    if (!inner_) fail("contract", "inner-net spec requires an inner net");
    if (inner_->arity() != spec_.arity)
      fail("contract", "inner net arity " + std::to_string(inner_->arity()) +
                           " != spec arity " + std::to_string(spec_.arity));
  }
  const std::int64_t n = use_inner ? spec_.arity : 1;

  std::int64_t prev = spec_.kind == OuterKind::kMlp ? spec_.input_numel() : spec_.input_dims[0];
  for (std::int64_t width : spec_.hidden) {
    Layer layer;
    const std::int64_t out_feats = n * width;
    if (spec_.kind == OuterKind::kMlp)
      layer.w = init_xavier({prev, out_feats}, rng);
    else
      layer.w = init_xavier({out_feats, prev, 3, 3}, rng);
    layer.w->requires_grad = true;
    if (spec_.layer_norm) {
      layer.ln_gain = make_param({out_feats}, 1.0);
      layer.ln_bias = make_param({out_feats}, 0.0);
    } else {
      layer.b = make_param({out_feats}, 0.0);
    }
    layers_.push_back(std::move(layer));
    prev = width;  // activation collapses n arguments into one output
  }
  std::int64_t flat = prev;
  if (spec_.kind == OuterKind::kConv) {
    const auto walk = spec_.spatial_walk();
    flat = prev * walk.back() * walk.back();
  }
  out_w = init_xavier({flat, spec_.classes}, rng);
  out_w->requires_grad = true;
  out_b = make_param({spec_.classes}, 0.0);
}

TensorPtr OuterNet::forward(Tape& tape, const TensorPtr& x, Rng* dropout_rng, bool training,
                            TapSink* tap) {
  if (training && spec_.dropout > 0.0 && !dropout_rng)
    fail("contract", "training forward needs a dropout rng");
  const bool use_inner = spec_.activation == ActivationKind::kInnerNet;

  TensorPtr cur = x;
  if (spec_.kind == OuterKind::kMlp) {
    if (cur->ndim() != 2) cur = ops::reshape(tape, cur, {cur->dim(0), spec_.input_numel()});
    if (cur->dim(1) != spec_.input_numel())
      fail("shape", "input features " + std::to_string(cur->dim(1)) + " != spec " +
                        std::to_string(spec_.input_numel()));
  } else {
    if (cur->ndim() != 4 || cur->dim(1) != spec_.input_dims[0] ||
        cur->dim(2) != spec_.input_dims[1] || cur->dim(3) != spec_.input_dims[2])
      fail("shape", "conv input " + shape_str(cur->shape) + " does not match spec");
  }

  for (auto& layer : layers_) {
    TensorPtr z = spec_.kind == OuterKind::kMlp ? ops::matmul(tape, cur, layer.w)
                                                : ops::conv2d(tape, cur, layer.w, 1, 1);
    if (layer.b) z = ops::add(tape, z, layer.b);
    if (spec_.layer_norm) z = ops::layernorm(tape, z, layer.ln_gain, layer.ln_bias);
    TensorPtr a = use_inner ? apply_activation(tape, inner_, z, tap) : ops::relu(tape, z);
    if (training && spec_.dropout > 0.0)
      a = ops::dropout(tape, a, spec_.dropout, *dropout_rng, true);
    if (spec_.kind == OuterKind::kConv) a = ops::maxpool2d(tape, a, 2, 2);
    cur = a;
  }
  if (spec_.kind == OuterKind::kConv)
    cur = ops::reshape(tape, cur, {cur->dim(0), cur->dim(1) * cur->dim(2) * cur->dim(3)});
  return ops::add(tape, ops::matmul(tape, cur, out_w), out_b);
}

std::vector<TensorPtr> OuterNet::outer_parameters() const {
  std::vector<TensorPtr> ps;
  for (const auto& l : layers_) {
    ps.push_back(l.w);
    if (l.b) ps.push_back(l.b);
    if (l.ln_gain) ps.push_back(l.ln_gain);
    if (l.ln_bias) ps.push_back(l.ln_bias);
  }
  ps.push_back(out_w);
  ps.push_back(out_b);
  return ps;
}

std::vector<std::pair<std::string, TensorPtr>> OuterNet::named_outer_parameters() const {
  std::vector<std::pair<std::string, TensorPtr>> ps;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    const std::string tag = "outer.h" + std::to_string(i);
    ps.emplace_back(tag + ".w", l.w);
    if (l.b) ps.emplace_back(tag + ".b", l.b);
    if (l.ln_gain) ps.emplace_back(tag + ".ln_gain", l.ln_gain);
    if (l.ln_bias) ps.emplace_back(tag + ".ln_bias", l.ln_bias);
  }
  ps.emplace_back("outer.out.w", out_w);
  ps.emplace_back("outer.out.b", out_b);
  return ps;
}

std::uint64_t OuterNet::outer_digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : outer_parameters()) h = digest_doubles(p->data, h);
  return h;
}

}  // namespace nargact
