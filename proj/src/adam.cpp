#include "nargact/adam.hpp"

#include <cmath>

namespace nargact {

Adam::Adam(std::vector<TensorPtr> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p->data.size(), 0.0);
    v_.emplace_back(p->data.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = *params_[pi];
    if (!p.has_grad()) p.ensure_grad();  // zero grad == no movement either way
    auto& m = m_[pi];
    auto& v = v_[pi];
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double g = p.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::restore(long long t, std::vector<std::vector<double>> m,
                   std::vector<std::vector<double>> v) {
  if (m.size() != params_.size() || v.size() != params_.size())
    fail("contract", "Adam::restore: moment list length mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (m[i].size() != params_[i]->data.size() || v[i].size() != params_[i]->data.size())
      fail("shape", "Adam::restore: moment shape mismatch at param " + std::to_string(i));
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace nargact
