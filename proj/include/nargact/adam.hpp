#pragma once

#include <vector>

#include "nargact/tensor.hpp"

namespace nargact {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected ADAM over a fixed parameter list. Moments are owned here,
// shape-congruent with their parameter; step() consumes Tensor::grad.
class Adam {
 public:
  Adam(std::vector<TensorPtr> params, AdamConfig cfg = {});

  void step();
  long long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<TensorPtr>& params() const { return params_; }

  // Flat views for checkpointing; order matches the parameter list.
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void restore(long long t, std::vector<std::vector<double>> m, std::vector<std::vector<double>> v);

 private:
  std::vector<TensorPtr> params_;
  AdamConfig cfg_;
  long long t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace nargact
