#include "nargact/inner_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "nargact/init.hpp"

namespace nargact {

InnerNet::InnerNet(int arity, Rng& rng) : arity_(arity) {
  if (arity < 1 || arity > 3) fail("contract", "inner net arity must be 1, 2 or 3");
  w1 = init_xavier({arity, kHidden}, rng);
  b1 = make_tensor({kHidden});
  w2 = init_xavier({kHidden, kHidden}, rng);
  b2 = make_tensor({kHidden});
  w3 = init_xavier({kHidden, 1}, rng);
  b3 = make_tensor({1});
  for (auto& p : parameters()) p->requires_grad = true;
}

std::vector<std::pair<std::string, TensorPtr>> InnerNet::named_parameters() const {
  return {{"inner.w1", w1}, {"inner.b1", b1}, {"inner.w2", w2},
          {"inner.b2", b2}, {"inner.w3", w3}, {"inner.b3", b3}};
}

std::int64_t InnerNet::param_count() const {
  std::int64_t n = 0;
  for (const auto& p : parameters()) n += p->numel();
  return n;
}

std::uint64_t InnerNet::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : parameters()) h = digest_doubles(p->data, h);
  return h;
}

double InnerNet::eval(const double* args) const {
  double h1[kHidden], h2[kHidden];
  for (std::int64_t j = 0; j < kHidden; ++j) {
    double s = b1->data[j];
    for (int i = 0; i < arity_; ++i) s += args[i] * w1->data[i * kHidden + j];
    h1[j] = s > 0.0 ? s : 0.0;
  }
  for (std::int64_t j = 0; j < kHidden; ++j) {
    double s = b2->data[j];
    for (std::int64_t i = 0; i < kHidden; ++i) s += h1[i] * w2->data[i * kHidden + j];
    h2[j] = s > 0.0 ? s : 0.0;
  }
  double y = b3->data[0];
  for (std::int64_t i = 0; i < kHidden; ++i) y += h2[i] * w3->data[i];
  return y;
}

std::function<double(const std::vector<double>&)> InnerNet::as_function() const {
  return [this](const std::vector<double>& x) { return eval(x.data()); };
}

namespace {

constexpr std::int64_t kChunkRows = 8192;

struct SiteLayout {
  std::int64_t rows = 0;     // total application sites
  std::int64_t units = 0;    // h = blocks per example
  std::int64_t spatial = 1;  // H*W for 4-D inputs
  std::int64_t batch = 0;
};

SiteLayout site_layout(const Tensor& x, int n) {
  if (x.ndim() != 2 && x.ndim() != 4)
    fail("shape", "apply_activation expects a 2-D or 4-D preactivation tensor");
  const std::int64_t C = x.dim(1);
  if (C % n != 0)
    fail("shape", "feature size " + std::to_string(C) + " not divisible by arity " + std::to_string(n));
  SiteLayout L;
  L.batch = x.dim(0);
  L.units = C / n;
  L.spatial = x.ndim() == 4 ? x.dim(2) * x.dim(3) : 1;
  L.rows = L.batch * L.units * L.spatial;
  return L;
}

// Gather rows [r0, r1) of the (rows, n) site matrix from the preactivation
// layout. Row index r = ((b*units + u)*spatial + s); argument j lives at
// channel u*n + j. For 2-D inputs this is a straight copy.
void gather_rows(const double* x, const SiteLayout& L, int n, std::int64_t r0, std::int64_t r1,
                 double* dst) {
  if (L.spatial == 1) {
    std::memcpy(dst, x + r0 * n, static_cast<std::size_t>((r1 - r0) * n) * sizeof(double));
    return;
  }
  const std::int64_t C = L.units * n;
  for (std::int64_t r = r0; r < r1; ++r) {
    const std::int64_t s = r % L.spatial;
    const std::int64_t bu = r / L.spatial;
    const std::int64_t u = bu % L.units;
    const std::int64_t b = bu / L.units;
    const double* src = x + (b * C + u * n) * L.spatial + s;
    double* d = dst + (r - r0) * n;
    for (int j = 0; j < n; ++j) d[j] = src[j * L.spatial];
  }
}

void scatter_rows_acc(const double* src, const SiteLayout& L, int n, std::int64_t r0,
                      std::int64_t r1, double* gx) {
  if (L.spatial == 1) {
    for (std::int64_t i = 0; i < (r1 - r0) * n; ++i) gx[r0 * n + i] += src[i];
    return;
  }
  const std::int64_t C = L.units * n;
  for (std::int64_t r = r0; r < r1; ++r) {
    const std::int64_t s = r % L.spatial;
    const std::int64_t bu = r / L.spatial;
    const std::int64_t u = bu % L.units;
    const std::int64_t b = bu / L.units;
    double* dst = gx + (b * C + u * n) * L.spatial + s;
    const double* d = src + (r - r0) * n;
    for (int j = 0; j < n; ++j) dst[j * L.spatial] += d[j];
  }
}

void add_bias_relu(double* m, std::int64_t rows, std::int64_t cols, const double* bias) {
  for (std::int64_t r = 0; r < rows; ++r) {
    double* row = m + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) {
      const double v = row[c] + bias[c];
      row[c] = v > 0.0 ? v : 0.0;
    }
  }
}

}  // namespace

TensorPtr apply_activation(Tape& tape, const InnerNetPtr& net, const TensorPtr& preact,
                           TapSink* tap) {
  const int n = net->arity();
  const SiteLayout L = site_layout(*preact, n);
  constexpr std::int64_t H = InnerNet::kHidden;

  Shape out_shape = preact->ndim() == 2
                        ? Shape{L.batch, L.units}
                        : Shape{L.batch, L.units, preact->dim(2), preact->dim(3)};
  auto out = make_tensor(std::move(out_shape));

  if (tap) {
    if (tap->arity == 0) tap->arity = n;
    if (tap->arity != n) fail("contract", "tap sink arity mismatch");
    tap->rows.reserve(tap->rows.size() + static_cast<std::size_t>(L.rows * n));
  }

  std::vector<double> X(static_cast<std::size_t>(std::min(kChunkRows, L.rows) * n));
  std::vector<double> H1(static_cast<std::size_t>(std::min(kChunkRows, L.rows) * H));
  std::vector<double> H2(H1.size());
  for (std::int64_t r0 = 0; r0 < L.rows; r0 += kChunkRows) {
    const std::int64_t r1 = std::min(r0 + kChunkRows, L.rows);
    const std::int64_t R = r1 - r0;
    gather_rows(preact->data.data(), L, n, r0, r1, X.data());
    if (tap) tap->rows.insert(tap->rows.end(), X.begin(), X.begin() + R * n);
    ops::detail::matmul_nn(X.data(), net->w1->data.data(), H1.data(), R, n, H, false);
    add_bias_relu(H1.data(), R, H, net->b1->data.data());
    ops::detail::matmul_nn(H1.data(), net->w2->data.data(), H2.data(), R, H, H, false);
    add_bias_relu(H2.data(), R, H, net->b2->data.data());
    // output rows land exactly at out->data[r]: the row order matches the
    // output tensor layout for both the 2-D and 4-D cases.
    ops::detail::matmul_nn(H2.data(), net->w3->data.data(), out->data.data() + r0, R, H, 1, false);
    const double b3v = net->b3->data[0];
    for (std::int64_t r = 0; r < R; ++r) out->data[r0 + r] += b3v;
  }
  if (tap) tap->layer_ends.push_back(tap->count());

  auto netp = net;
  auto x = preact;
  return tape.record("apply_activation", {preact, net->w1, net->b1, net->w2, net->b2, net->w3, net->b3},
                     out, [netp, x, out, L, n] {
    if (!out->has_grad()) return;
    constexpr std::int64_t H = InnerNet::kHidden;
    x->ensure_grad();
    for (auto& p : netp->parameters()) p->ensure_grad();
    std::vector<double> X(static_cast<std::size_t>(std::min(kChunkRows, L.rows) * n));
    std::vector<double> H1(static_cast<std::size_t>(std::min(kChunkRows, L.rows) * H));
    std::vector<double> H2(H1.size());
    std::vector<double> D2(H1.size());
    std::vector<double> D1(H1.size());
    std::vector<double> DX(X.size());
    for (std::int64_t r0 = 0; r0 < L.rows; r0 += kChunkRows) {
      const std::int64_t r1 = std::min(r0 + kChunkRows, L.rows);
      const std::int64_t R = r1 - r0;
      gather_rows(x->data.data(), L, n, r0, r1, X.data());
      ops::detail::matmul_nn(X.data(), netp->w1->data.data(), H1.data(), R, n, H, false);
      add_bias_relu(H1.data(), R, H, netp->b1->data.data());
      ops::detail::matmul_nn(H1.data(), netp->w2->data.data(), H2.data(), R, H, H, false);
      add_bias_relu(H2.data(), R, H, netp->b2->data.data());
      const double* dy = out->grad.data() + r0;
      // dH2 = dy * w3^T, masked by the relu
      ops::detail::matmul_nt(dy, netp->w3->data.data(), D2.data(), R, 1, H, false);
      for (std::int64_t i = 0; i < R * H; ++i)
        if (H2[i] <= 0.0) D2[i] = 0.0;
      // dw3 += H2^T * dy ; db3 += sum dy
      ops::detail::matmul_tn(H2.data(), dy, netp->w3->grad.data(), H, R, 1, true);
      double s3 = 0.0;
      for (std::int64_t r = 0; r < R; ++r) s3 += dy[r];
      netp->b3->grad[0] += s3;
      // dH1 = dH2 * w2^T, masked
      ops::detail::matmul_nt(D2.data(), netp->w2->data.data(), D1.data(), R, H, H, false);
      for (std::int64_t i = 0; i < R * H; ++i)
        if (H1[i] <= 0.0) D1[i] = 0.0;
      ops::detail::matmul_tn(H1.data(), D2.data(), netp->w2->grad.data(), H, R, H, true);
      for (std::int64_t c = 0; c < H; ++c) {
        double s = 0.0;
        for (std::int64_t r = 0; r < R; ++r) s += D2[r * H + c];
        netp->b2->grad[c] += s;
      }
      ops::detail::matmul_tn(X.data(), D1.data(), netp->w1->grad.data(), n, R, H, true);
      for (std::int64_t c = 0; c < H; ++c) {
        double s = 0.0;
        for (std::int64_t r = 0; r < R; ++r) s += D1[r * H + c];
        netp->b1->grad[c] += s;
      }
      ops::detail::matmul_nt(D1.data(), netp->w1->data.data(), DX.data(), R, H, n, false);
      scatter_rows_acc(DX.data(), L, n, r0, r1, x->grad.data());
    }
  });
}

TensorPtr apply_activation_conv(Tape& tape, const InnerNetPtr& net, const TensorPtr& preact) {
  if (preact->ndim() != 4) fail("shape", "apply_activation_conv expects (B,C,H,W)");
  const int n = net->arity();
  const SiteLayout L = site_layout(*preact, n);
  constexpr std::int64_t H = InnerNet::kHidden;
  // 1x1 conv kernels are the transposed weight matrices
  auto k1 = ops::reshape(tape, ops::transpose(tape, net->w1), {H, n, 1, 1});
  auto k2 = ops::reshape(tape, ops::transpose(tape, net->w2), {H, H, 1, 1});
  auto k3 = ops::reshape(tape, ops::transpose(tape, net->w3), {1, H, 1, 1});
  std::vector<TensorPtr> outs;
  outs.reserve(static_cast<std::size_t>(L.units));
  for (std::int64_t u = 0; u < L.units; ++u) {
    auto block = ops::slice_channels(tape, preact, u * n, u * n + n);
    auto h1 = ops::relu(tape, ops::add(tape, ops::conv2d(tape, block, k1, 1, 0), net->b1));
    auto h2 = ops::relu(tape, ops::add(tape, ops::conv2d(tape, h1, k2, 1, 0), net->b2));
    outs.push_back(ops::add(tape, ops::conv2d(tape, h2, k3, 1, 0), net->b3));
  }
  return ops::concat_channels(tape, outs);
}

GridEval eval_on_grid(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<GridAxis> axes) {
  if (axes.empty() || axes.size() > 3) fail("contract", "eval_on_grid supports 1 to 3 axes");
  for (auto& a : axes) {
    if (a.lo > a.hi) fail("contract", "eval_on_grid axis has lo > hi");
    if (a.lo == a.hi) a.n = 1;
    if (a.n < 1) fail("contract", "eval_on_grid resolution must be >= 1");
  }
  GridEval g;
  g.axes = axes;
  std::int64_t total = 1;
  for (const auto& a : axes) total *= a.n;
  g.values.resize(static_cast<std::size_t>(total));
  std::vector<double> point(axes.size());
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rem = idx;
    for (std::size_t d = axes.size(); d-- > 0;) {
      const std::int64_t i = rem % axes[d].n;
      rem /= axes[d].n;
      const auto& a = axes[d];
      point[d] = a.n == 1 ? 0.5 * (a.lo + a.hi)
                          : a.lo + (static_cast<double>(i) + 0.5) * (a.hi - a.lo) / static_cast<double>(a.n);
    }
    g.values[static_cast<std::size_t>(idx)] = f(point);
  }
  return g;
}

GridEval eval_on_grid(const InnerNet& net, std::vector<GridAxis> axes) {
  if (static_cast<int>(axes.size()) != net.arity())
    fail("contract", "eval_on_grid axis count must equal the net arity");
  return eval_on_grid([&net](const std::vector<double>& x) { return net.eval(x.data()); },
                      std::move(axes));
}

}  // namespace nargact
