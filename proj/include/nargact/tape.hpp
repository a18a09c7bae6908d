#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nargact/tensor.hpp"

namespace nargact {

// Reverse-mode tape. Ops append nodes in execution order (inputs always
// precede their consumers); backward() replays the list strictly in reverse.
// Gradients accumulate additively, so fan-out just works and callers must
// zero_grad() between optimizer steps.
class Tape {
 public:
  struct Node {
    std::string op;
    std::vector<TensorPtr> inputs;
    TensorPtr output;
    std::function<void()> backward;
  };

  TensorPtr record(std::string op, std::vector<TensorPtr> inputs, TensorPtr output,
                   std::function<void()> backward) {
    check_finite(op, *output);
    nodes_.push_back(Node{std::move(op), std::move(inputs), output, std::move(backward)});
    return output;
  }

  // Seeds d(loss)/d(loss) = 1 and walks the recorded ops in reverse.
  void backward(const TensorPtr& loss) {
    if (nodes_.empty()) fail("contract", "backward on an empty graph");
    if (loss->numel() != 1) fail("contract", "backward requires a scalar loss, got shape " + shape_str(loss->shape));
    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if (it->backward) it->backward();
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  void clear() { nodes_.clear(); }

  static void check_finite(const std::string& op, const Tensor& t) {
    for (double v : t.data) {
      if (!std::isfinite(v)) fail("numeric", "non-finite value in output of op '" + op + "'");
    }
  }

 private:
  std::vector<Node> nodes_;
};

}  // namespace nargact
