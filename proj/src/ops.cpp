#include "nargact/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace nargact::ops {

namespace detail {

void matmul_nn(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate) {
#pragma omp parallel for schedule(static) if (m * k * n > 65536)
  for (std::int64_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * k;
    for (std::int64_t kk = 0; kk < k; ++kk) {
      const double av = ai[kk];
      if (av == 0.0) continue;
      const double* bk = b + kk * n;
      for (std::int64_t j = 0; j < n; ++j) ci[j] += av * bk[j];
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate) {
#pragma omp parallel for schedule(static) if (m * k * n > 65536)
  for (std::int64_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::int64_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (std::int64_t kk = 0; kk < k; ++kk) s += ai[kk] * bj[kk];
      if (accumulate)
        ci[j] += s;
      else
        ci[j] = s;
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate) {
  // c[m,n] += sum_kk a[kk,m] * b[kk,n]; per-row ownership keeps it exact.
#pragma omp parallel for schedule(static) if (m * k * n > 65536)
  for (std::int64_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    for (std::int64_t kk = 0; kk < k; ++kk) {
      const double av = a[kk * m + i];
      if (av == 0.0) continue;
      const double* bk = b + kk * n;
      for (std::int64_t j = 0; j < n; ++j) ci[j] += av * bk[j];
    }
  }
}

}  // namespace detail

namespace {

void ensure(const TensorPtr& t) { t->ensure_grad(); }

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

}  // namespace

TensorPtr matmul(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  if (a->ndim() != 2 || b->ndim() != 2)
    fail("shape", "matmul expects 2-D tensors, got " + shape_str(a->shape) + " and " + shape_str(b->shape));
  const std::int64_t m = a->dim(0), k = a->dim(1), n = b->dim(1);
  if (b->dim(0) != k)
    fail("shape", "matmul inner extents differ: " + shape_str(a->shape) + " vs " + shape_str(b->shape));
  auto out = make_tensor({m, n});
  detail::matmul_nn(a->data.data(), b->data.data(), out->data.data(), m, k, n, false);
  return tape.record("matmul", {a, b}, out, [a, b, out, m, k, n] {
    if (!out->has_grad()) return;
    ensure(a);
    ensure(b);
    detail::matmul_nt(out->grad.data(), b->data.data(), a->grad.data(), m, n, k, true);
    detail::matmul_tn(a->data.data(), out->grad.data(), b->grad.data(), k, m, n, true);
  });
}

TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  auto out = make_tensor(a->shape);
  if (same_shape(*a, *b)) {
    for (std::int64_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] + b->data[i];
    return tape.record("add", {a, b}, out, [a, b, out] {
      if (!out->has_grad()) return;
      ensure(a);
      ensure(b);
      for (std::int64_t i = 0; i < out->numel(); ++i) {
        a->grad[i] += out->grad[i];
        b->grad[i] += out->grad[i];
      }
    });
  }
  // bias broadcast along dim 1
  std::int64_t rows = 0, feat = 0, spatial = 1;
  if (a->ndim() == 2 && b->ndim() == 1 && b->dim(0) == a->dim(1)) {
    rows = a->dim(0);
    feat = a->dim(1);
  } else if (a->ndim() == 4 && b->ndim() == 1 && b->dim(0) == a->dim(1)) {
    rows = a->dim(0);
    feat = a->dim(1);
    spatial = a->dim(2) * a->dim(3);
  } else {
    fail("shape", "add: incompatible shapes " + shape_str(a->shape) + " and " + shape_str(b->shape));
  }
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t f = 0; f < feat; ++f) {
      const double bv = b->data[f];
      double* dst = out->data.data() + (r * feat + f) * spatial;
      const double* src = a->data.data() + (r * feat + f) * spatial;
      for (std::int64_t s = 0; s < spatial; ++s) dst[s] = src[s] + bv;
    }
  return tape.record("add", {a, b}, out, [a, b, out, rows, feat, spatial] {
    if (!out->has_grad()) return;
    ensure(a);
    ensure(b);
    for (std::int64_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
    for (std::int64_t f = 0; f < feat; ++f) {
      double s = 0.0;
      for (std::int64_t r = 0; r < rows; ++r) {
        const double* g = out->grad.data() + (r * feat + f) * spatial;
        for (std::int64_t k = 0; k < spatial; ++k) s += g[k];
      }
      b->grad[f] += s;
    }
  });
}

TensorPtr mul(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  if (!same_shape(*a, *b))
    fail("shape", "mul: shapes differ: " + shape_str(a->shape) + " vs " + shape_str(b->shape));
  auto out = make_tensor(a->shape);
  for (std::int64_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] * b->data[i];
  return tape.record("mul", {a, b}, out, [a, b, out] {
    if (!out->has_grad()) return;
    ensure(a);
    ensure(b);
    for (std::int64_t i = 0; i < out->numel(); ++i) {
      a->grad[i] += out->grad[i] * b->data[i];
      b->grad[i] += out->grad[i] * a->data[i];
    }
  });
}

TensorPtr mul_scalar(Tape& tape, const TensorPtr& a, double c) {
  auto out = make_tensor(a->shape);
  for (std::int64_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] * c;
  return tape.record("mul_scalar", {a}, out, [a, out, c] {
    if (!out->has_grad()) return;
    ensure(a);
    for (std::int64_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i] * c;
  });
}

TensorPtr relu(Tape& tape, const TensorPtr& x) {
  auto out = make_tensor(x->shape);
  for (std::int64_t i = 0; i < x->numel(); ++i) out->data[i] = x->data[i] > 0.0 ? x->data[i] : 0.0;
  return tape.record("relu", {x}, out, [x, out] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t i = 0; i < out->numel(); ++i)
      if (x->data[i] > 0.0) x->grad[i] += out->grad[i];
  });
}

namespace {

// col is (C*KH*KW, OH*OW) for one example.
void im2col(const double* x, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t KH,
            std::int64_t KW, std::int64_t stride, std::int64_t pad, std::int64_t OH,
            std::int64_t OW, double* col) {
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t kh = 0; kh < KH; ++kh)
      for (std::int64_t kw = 0; kw < KW; ++kw) {
        double* dst = col + ((c * KH + kh) * KW + kw) * (OH * OW);
        for (std::int64_t oy = 0; oy < OH; ++oy) {
          const std::int64_t iy = oy * stride + kh - pad;
          for (std::int64_t ox = 0; ox < OW; ++ox) {
            const std::int64_t ix = ox * stride + kw - pad;
            dst[oy * OW + ox] = (iy >= 0 && iy < H && ix >= 0 && ix < W)
                                    ? x[(c * H + iy) * W + ix]
                                    : 0.0;
          }
        }
      }
}

void col2im_acc(const double* col, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t KH,
                std::int64_t KW, std::int64_t stride, std::int64_t pad, std::int64_t OH,
                std::int64_t OW, double* dx) {
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t kh = 0; kh < KH; ++kh)
      for (std::int64_t kw = 0; kw < KW; ++kw) {
        const double* src = col + ((c * KH + kh) * KW + kw) * (OH * OW);
        for (std::int64_t oy = 0; oy < OH; ++oy) {
          const std::int64_t iy = oy * stride + kh - pad;
          if (iy < 0 || iy >= H) continue;
          for (std::int64_t ox = 0; ox < OW; ++ox) {
            const std::int64_t ix = ox * stride + kw - pad;
            if (ix < 0 || ix >= W) continue;
            dx[(c * H + iy) * W + ix] += src[oy * OW + ox];
          }
        }
      }
}

}  // namespace

TensorPtr conv2d(Tape& tape, const TensorPtr& x, const TensorPtr& kernel, std::int64_t stride,
                 std::int64_t pad) {
  if (x->ndim() != 4 || kernel->ndim() != 4)
    fail("shape", "conv2d expects (B,C,H,W) input and (O,C,KH,KW) kernel");
  if (stride < 1 || pad < 0) fail("contract", "conv2d: stride must be >=1 and pad >=0");
  const std::int64_t B = x->dim(0), C = x->dim(1), H = x->dim(2), W = x->dim(3);
  const std::int64_t O = kernel->dim(0), KH = kernel->dim(2), KW = kernel->dim(3);
  if (kernel->dim(1) != C)
    fail("shape", "conv2d channel mismatch: input " + shape_str(x->shape) + " vs kernel " +
                      shape_str(kernel->shape));
  const std::int64_t OH = (H + 2 * pad - KH) / stride + 1;
  const std::int64_t OW = (W + 2 * pad - KW) / stride + 1;
  if (H + 2 * pad < KH || W + 2 * pad < KW)
    fail("shape", "conv2d kernel larger than padded input");
  auto out = make_tensor({B, O, OH, OW});
  const std::int64_t CK = C * KH * KW, P = OH * OW;
  std::vector<double> col(static_cast<std::size_t>(CK * P));
  for (std::int64_t b = 0; b < B; ++b) {
    im2col(x->data.data() + b * C * H * W, C, H, W, KH, KW, stride, pad, OH, OW, col.data());
    detail::matmul_nn(kernel->data.data(), col.data(), out->data.data() + b * O * P, O, CK, P,
                      false);
  }
  return tape.record(
      "conv2d", {x, kernel}, out, [x, kernel, out, B, C, H, W, O, KH, KW, OH, OW, stride, pad] {
        if (!out->has_grad()) return;
        ensure(x);
        ensure(kernel);
        const std::int64_t CK = C * KH * KW, P = OH * OW;
        std::vector<double> col(static_cast<std::size_t>(CK * P));
        std::vector<double> dcol(static_cast<std::size_t>(CK * P));
        for (std::int64_t b = 0; b < B; ++b) {
          const double* dy = out->grad.data() + b * O * P;
          im2col(x->data.data() + b * C * H * W, C, H, W, KH, KW, stride, pad, OH, OW, col.data());
          // dK[o,ck] += sum_p dy[o,p] col[ck,p]
          detail::matmul_nt(dy, col.data(), kernel->grad.data(), O, P, CK, true);
          // dcol[ck,p] = sum_o K[o,ck] dy[o,p]
          detail::matmul_tn(kernel->data.data(), dy, dcol.data(), CK, O, P, false);
          col2im_acc(dcol.data(), C, H, W, KH, KW, stride, pad, OH, OW,
                     x->grad.data() + b * C * H * W);
        }
      });
}

TensorPtr maxpool2d(Tape& tape, const TensorPtr& x, std::int64_t window, std::int64_t stride) {
  if (x->ndim() != 4) fail("shape", "maxpool2d expects (B,C,H,W)");
  if (window < 1 || stride < 1) fail("contract", "maxpool2d: window and stride must be >=1");
  const std::int64_t B = x->dim(0), C = x->dim(1), H = x->dim(2), W = x->dim(3);
  if (H < window || W < window) fail("shape", "maxpool2d window larger than input");
  const std::int64_t OH = (H - window) / stride + 1;
  const std::int64_t OW = (W - window) / stride + 1;
  auto out = make_tensor({B, C, OH, OW});
  auto argmax = std::make_shared<std::vector<std::int64_t>>(
      static_cast<std::size_t>(B * C * OH * OW));
  for (std::int64_t bc = 0; bc < B * C; ++bc) {
    const double* plane = x->data.data() + bc * H * W;
    for (std::int64_t oy = 0; oy < OH; ++oy)
      for (std::int64_t ox = 0; ox < OW; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        std::int64_t best_idx = -1;
        for (std::int64_t ky = 0; ky < window; ++ky)
          for (std::int64_t kx = 0; kx < window; ++kx) {
            const std::int64_t iy = oy * stride + ky, ix = ox * stride + kx;
            const double v = plane[iy * W + ix];
            if (v > best) {  // strict: ties keep the first row-major hit
              best = v;
              best_idx = iy * W + ix;
            }
          }
        out->data[(bc * OH + oy) * OW + ox] = best;
        (*argmax)[(bc * OH + oy) * OW + ox] = bc * H * W + best_idx;
      }
  }
  return tape.record("maxpool2d", {x}, out, [x, out, argmax] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::size_t i = 0; i < argmax->size(); ++i) x->grad[(*argmax)[i]] += out->grad[i];
  });
}

TensorPtr layernorm(Tape& tape, const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                    double eps) {
  std::int64_t rows = 0, C = 0, S = 1;
  if (x->ndim() == 2) {
    rows = x->dim(0);
    C = x->dim(1);
  } else if (x->ndim() == 4) {
    rows = x->dim(0);
    C = x->dim(1);
    S = x->dim(2) * x->dim(3);
  } else {
    fail("shape", "layernorm expects (B,F) or (B,C,H,W), got " + shape_str(x->shape));
  }
  if (gain->numel() != C || bias->numel() != C)
    fail("shape", "layernorm gain/bias must have extent " + std::to_string(C));
  auto out = make_tensor(x->shape);
  auto mu = std::make_shared<std::vector<double>>(static_cast<std::size_t>(rows * S));
  auto inv = std::make_shared<std::vector<double>>(static_cast<std::size_t>(rows * S));
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t s = 0; s < S; ++s) {
      const double* xv = x->data.data() + r * C * S + s;
      double m = 0.0;
      for (std::int64_t c = 0; c < C; ++c) m += xv[c * S];
      m /= static_cast<double>(C);
      double var = 0.0;
      for (std::int64_t c = 0; c < C; ++c) {
        const double d = xv[c * S] - m;
        var += d * d;
      }
      var /= static_cast<double>(C);
      const double iv = 1.0 / std::sqrt(var + eps);
      (*mu)[r * S + s] = m;
      (*inv)[r * S + s] = iv;
      double* yv = out->data.data() + r * C * S + s;
      for (std::int64_t c = 0; c < C; ++c)
        yv[c * S] = gain->data[c] * (xv[c * S] - m) * iv + bias->data[c];
    }
  return tape.record("layernorm", {x, gain, bias}, out, [x, gain, bias, out, mu, inv, rows, C, S] {
    if (!out->has_grad()) return;
    ensure(x);
    ensure(gain);
    ensure(bias);
    std::vector<double> xhat(static_cast<std::size_t>(C));
    std::vector<double> t(static_cast<std::size_t>(C));
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t s = 0; s < S; ++s) {
        const double m = (*mu)[r * S + s], iv = (*inv)[r * S + s];
        const double* xv = x->data.data() + r * C * S + s;
        const double* gy = out->grad.data() + r * C * S + s;
        double m1 = 0.0, m2 = 0.0;
        for (std::int64_t c = 0; c < C; ++c) {
          xhat[c] = (xv[c * S] - m) * iv;
          t[c] = gy[c * S] * gain->data[c];
          m1 += t[c];
          m2 += t[c] * xhat[c];
          gain->grad[c] += gy[c * S] * xhat[c];
          bias->grad[c] += gy[c * S];
        }
        m1 /= static_cast<double>(C);
        m2 /= static_cast<double>(C);
        double* gx = x->grad.data() + r * C * S + s;
        for (std::int64_t c = 0; c < C; ++c) gx[c * S] += (t[c] - m1 - xhat[c] * m2) * iv;
      }
  });
}

TensorPtr dropout(Tape& tape, const TensorPtr& x, double p, Rng& rng, bool training) {
  if (p < 0.0 || p >= 1.0) fail("contract", "dropout requires 0 <= p < 1, got " + std::to_string(p));
  if (!training || p == 0.0) {
    auto out = make_tensor(x->shape, x->data);
    return tape.record("dropout", {x}, out, [x, out] {
      if (!out->has_grad()) return;
      ensure(x);
      for (std::int64_t i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i];
    });
  }
  const double keep = 1.0 - p;
  auto mask = std::make_shared<std::vector<double>>(static_cast<std::size_t>(x->numel()));
  auto out = make_tensor(x->shape);
  for (std::int64_t i = 0; i < x->numel(); ++i) {
    const double m = rng.uniform() < p ? 0.0 : 1.0 / keep;
    (*mask)[i] = m;
    out->data[i] = x->data[i] * m;
  }
  return tape.record("dropout", {x}, out, [x, out, mask] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i] * (*mask)[i];
  });
}

TensorPtr softmax_cross_entropy(Tape& tape, const TensorPtr& logits,
                                const std::vector<int>& labels) {
  if (logits->ndim() != 2) fail("shape", "softmax_cross_entropy expects (B,C) logits");
  const std::int64_t B = logits->dim(0), C = logits->dim(1);
  if (static_cast<std::int64_t>(labels.size()) != B)
    fail("shape", "labels length != batch size");
  for (int l : labels)
    if (l < 0 || l >= C) fail("contract", "label out of range [0," + std::to_string(C) + ")");
  auto probs = std::make_shared<std::vector<double>>(static_cast<std::size_t>(B * C));
  double loss = 0.0;
  for (std::int64_t b = 0; b < B; ++b) {
    const double* z = logits->data.data() + b * C;
    double mx = z[0];
    for (std::int64_t c = 1; c < C; ++c) mx = std::max(mx, z[c]);
    double denom = 0.0;
    for (std::int64_t c = 0; c < C; ++c) denom += std::exp(z[c] - mx);
    const double logdenom = std::log(denom);
    for (std::int64_t c = 0; c < C; ++c) (*probs)[b * C + c] = std::exp(z[c] - mx) / denom;
    loss -= (z[labels[b]] - mx - logdenom);
  }
  loss /= static_cast<double>(B);
  auto out = make_scalar(loss);
  auto labels_copy = std::make_shared<std::vector<int>>(labels);
  return tape.record("softmax_cross_entropy", {logits}, out, [logits, out, probs, labels_copy, B, C] {
    if (!out->has_grad()) return;
    ensure(logits);
    const double g = out->grad[0] / static_cast<double>(B);
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t c = 0; c < C; ++c) {
        const double onehot = (c == (*labels_copy)[b]) ? 1.0 : 0.0;
        logits->grad[b * C + c] += g * ((*probs)[b * C + c] - onehot);
      }
  });
}

TensorPtr mse(Tape& tape, const TensorPtr& pred, const TensorPtr& target) {
  if (!same_shape(*pred, *target))
    fail("shape", "mse: shapes differ: " + shape_str(pred->shape) + " vs " + shape_str(target->shape));
  const std::int64_t N = pred->numel();
  if (N == 0) fail("contract", "mse on empty tensors");
  double loss = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    const double d = pred->data[i] - target->data[i];
    loss += d * d;
  }
  loss /= static_cast<double>(N);
  auto out = make_scalar(loss);
  return tape.record("mse", {pred, target}, out, [pred, target, out, N] {
    if (!out->has_grad()) return;
    ensure(pred);
    ensure(target);
    const double g = out->grad[0] * 2.0 / static_cast<double>(N);
    for (std::int64_t i = 0; i < N; ++i) {
      const double d = pred->data[i] - target->data[i];
      pred->grad[i] += g * d;
      target->grad[i] -= g * d;
    }
  });
}

TensorPtr slice_channels(Tape& tape, const TensorPtr& x, std::int64_t from, std::int64_t to) {
  if (x->ndim() != 2 && x->ndim() != 4) fail("shape", "slice_channels expects 2-D or 4-D input");
  const std::int64_t B = x->dim(0), C = x->dim(1);
  const std::int64_t S = x->ndim() == 4 ? x->dim(2) * x->dim(3) : 1;
  if (from < 0 || to > C || from >= to)
    fail("contract", "slice_channels: bad range [" + std::to_string(from) + "," + std::to_string(to) +
                         ") for " + std::to_string(C) + " channels");
  Shape os = x->shape;
  os[1] = to - from;
  auto out = make_tensor(os);
  const std::int64_t OC = to - from;
  for (std::int64_t b = 0; b < B; ++b)
    std::memcpy(out->data.data() + b * OC * S, x->data.data() + (b * C + from) * S,
                static_cast<std::size_t>(OC * S) * sizeof(double));
  return tape.record("slice_channels", {x}, out, [x, out, B, C, S, from, OC] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t b = 0; b < B; ++b) {
      const double* g = out->grad.data() + b * OC * S;
      double* gx = x->grad.data() + (b * C + from) * S;
      for (std::int64_t i = 0; i < OC * S; ++i) gx[i] += g[i];
    }
  });
}

TensorPtr concat_channels(Tape& tape, const std::vector<TensorPtr>& xs) {
  if (xs.empty()) fail("contract", "concat_channels of zero tensors");
  const auto& first = *xs.front();
  if (first.ndim() != 2 && first.ndim() != 4) fail("shape", "concat_channels expects 2-D or 4-D inputs");
  const std::int64_t B = first.dim(0);
  const std::int64_t S = first.ndim() == 4 ? first.dim(2) * first.dim(3) : 1;
  std::int64_t C = 0;
  for (const auto& x : xs) {
    if (x->ndim() != first.ndim() || x->dim(0) != B ||
        (x->ndim() == 4 && (x->dim(2) != first.dim(2) || x->dim(3) != first.dim(3))))
      fail("shape", "concat_channels: incompatible input " + shape_str(x->shape));
    C += x->dim(1);
  }
  Shape os = first.shape;
  os[1] = C;
  auto out = make_tensor(os);
  std::int64_t off = 0;
  for (const auto& x : xs) {
    const std::int64_t xc = x->dim(1);
    for (std::int64_t b = 0; b < B; ++b)
      std::memcpy(out->data.data() + (b * C + off) * S, x->data.data() + b * xc * S,
                  static_cast<std::size_t>(xc * S) * sizeof(double));
    off += xc;
  }
  auto inputs = xs;
  return tape.record("concat_channels", inputs, out, [inputs, out, B, C, S] {
    if (!out->has_grad()) return;
    std::int64_t off = 0;
    for (const auto& x : inputs) {
      ensure(x);
      const std::int64_t xc = x->dim(1);
      for (std::int64_t b = 0; b < B; ++b) {
        const double* g = out->grad.data() + (b * C + off) * S;
        double* gx = x->grad.data() + b * xc * S;
        for (std::int64_t i = 0; i < xc * S; ++i) gx[i] += g[i];
      }
      off += xc;
    }
  });
}

TensorPtr reshape(Tape& tape, const TensorPtr& x, Shape new_shape) {
  if (shape_numel(new_shape) != x->numel())
    fail("shape", "reshape: numel mismatch " + shape_str(x->shape) + " -> " + shape_str(new_shape));
  auto out = make_tensor(std::move(new_shape), x->data);
  return tape.record("reshape", {x}, out, [x, out] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i];
  });
}

TensorPtr transpose(Tape& tape, const TensorPtr& x) {
  if (x->ndim() != 2) fail("shape", "transpose expects a 2-D tensor");
  const std::int64_t m = x->dim(0), n = x->dim(1);
  auto out = make_tensor({n, m});
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j) out->data[j * m + i] = x->data[i * n + j];
  return tape.record("transpose", {x}, out, [x, out, m, n] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) x->grad[i * n + j] += out->grad[j * m + i];
  });
}

TensorPtr sum(Tape& tape, const TensorPtr& x) {
  double s = 0.0;
  for (double v : x->data) s += v;
  auto out = make_scalar(s);
  return tape.record("sum", {x}, out, [x, out] {
    if (!out->has_grad()) return;
    ensure(x);
    for (std::int64_t i = 0; i < x->numel(); ++i) x->grad[i] += out->grad[0];
  });
}

}  // namespace nargact::ops
