#pragma once

#include <vector>

#include "nargact/rng.hpp"
#include "nargact/tape.hpp"
#include "nargact/tensor.hpp"

// Forward ops of the differentiation engine. Every op records an exact
// vector-Jacobian-product backward rule on the tape and rejects non-finite
// outputs. Weight matrices use (in, out) layout so forward passes are plain
// row-major matmuls.
namespace nargact::ops {

TensorPtr matmul(Tape& tape, const TensorPtr& a, const TensorPtr& b);

// add supports identical shapes plus the two bias broadcasts:
// (B,F)+(F) and (B,C,H,W)+(C).
TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b);

TensorPtr mul(Tape& tape, const TensorPtr& a, const TensorPtr& b);  // elementwise
TensorPtr mul_scalar(Tape& tape, const TensorPtr& a, double c);

TensorPtr relu(Tape& tape, const TensorPtr& x);

// x (B,C,H,W), kernel (O,C,KH,KW), zero padding `pad` on all sides.
TensorPtr conv2d(Tape& tape, const TensorPtr& x, const TensorPtr& kernel, std::int64_t stride,
                 std::int64_t pad);

// Ties route the gradient to the first maximum in row-major window order.
TensorPtr maxpool2d(Tape& tape, const TensorPtr& x, std::int64_t window, std::int64_t stride);

// Normalizes across features (dim 1) per example for (B,F), and across
// channels per spatial position for (B,C,H,W). gain/bias have extent = dim 1.
TensorPtr layernorm(Tape& tape, const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                    double eps = 1e-5);

// Inverted dropout: survivors scale by 1/(1-p); identity when !training.
TensorPtr dropout(Tape& tape, const TensorPtr& x, double p, Rng& rng, bool training);

// logits (B,C), labels in [0,C). Returns the scalar mean cross entropy.
TensorPtr softmax_cross_entropy(Tape& tape, const TensorPtr& logits,
                                const std::vector<int>& labels);

TensorPtr mse(Tape& tape, const TensorPtr& pred, const TensorPtr& target);

// Channel/feature slice [from, to) along dim 1 of a 2-D or 4-D tensor.
TensorPtr slice_channels(Tape& tape, const TensorPtr& x, std::int64_t from, std::int64_t to);
TensorPtr concat_channels(Tape& tape, const std::vector<TensorPtr>& xs);

TensorPtr reshape(Tape& tape, const TensorPtr& x, Shape new_shape);
TensorPtr transpose(Tape& tape, const TensorPtr& x);  // 2-D only
TensorPtr sum(Tape& tape, const TensorPtr& x);

// Dense kernels shared with the fused inner-net op. C (+)= A op B with the
// noted transpositions; fixed accumulation order per output element, rows
// split across threads, so results are bit-reproducible at any thread count.
namespace detail {
void matmul_nn(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate);
void matmul_nt(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate);  // c[m,n] = a[m,k] * b[n,k]^T
void matmul_tn(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
               std::int64_t n, bool accumulate);  // c[m,n] = a[k,m]^T * b[k,n]
}  // namespace detail

}  // namespace nargact::ops
