#include "nargact/target_map.hpp"

#include <algorithm>
#include <cmath>

#include "nargact/adam.hpp"
#include "nargact/ops.hpp"

namespace nargact {

std::int64_t TargetMap::field_size() const {
  std::int64_t n = 1;
  for (int d = 0; d < arity; ++d) n *= grid;
  return n;
}

double TargetMap::lookup(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != arity) fail("contract", "lookup point has wrong arity");
  // continuous grid coordinate: u == i at the center of cell i, clamped so
  // queries at or beyond the boundary extrapolate flat
  std::int64_t i0[3];
  double frac[3];
  for (int d = 0; d < arity; ++d) {
    double v = (x[d] + half_width) / (2.0 * half_width) * static_cast<double>(grid) - 0.5;
    v = std::clamp(v, 0.0, static_cast<double>(grid - 1));
    i0[d] = std::min<std::int64_t>(static_cast<std::int64_t>(v), grid - 2);
    frac[d] = v - static_cast<double>(i0[d]);
  }
  double acc = 0.0;
  const int corners = 1 << arity;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::int64_t idx = 0;
    for (int d = 0; d < arity; ++d) {
      const int bit = (c >> d) & 1;
      w *= bit ? frac[d] : (1.0 - frac[d]);
      idx = idx * grid + i0[d] + bit;
    }
    acc += w * field[static_cast<std::size_t>(idx)];
  }
  return acc;
}

std::vector<double> gaussian_blur(const std::vector<double>& field, int arity, std::int64_t grid,
                                  double sigma_px) {
  if (sigma_px <= 0.0) return field;
  const std::int64_t radius = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(4.0 * sigma_px)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double ksum = 0.0;
  for (std::int64_t k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * static_cast<double>(k * k) / (sigma_px * sigma_px));
    kernel[static_cast<std::size_t>(k + radius)] = w;
    ksum += w;
  }
  for (auto& w : kernel) w /= ksum;

  auto reflect = [grid](std::int64_t i) {  // half-sample symmetric: -1 -> 0, G -> G-1
    while (i < 0 || i >= grid) {
      if (i < 0) i = -i - 1;
      if (i >= grid) i = 2 * grid - i - 1;
    }
    return i;
  };

  std::vector<double> cur = field;
  std::vector<double> next(cur.size());
  std::int64_t total = static_cast<std::int64_t>(field.size());
  for (int axis = 0; axis < arity; ++axis) {
    // stride of the axis in the row-major (last axis fastest) layout
    std::int64_t stride = 1;
    for (int d = arity - 1; d > axis; --d) stride *= grid;
    const std::int64_t lines = total / grid;
    for (std::int64_t line = 0; line < lines; ++line) {
      // base offset of this 1-D line
      const std::int64_t outer = line / stride;
      const std::int64_t inner = line % stride;
      const std::int64_t base = outer * stride * grid + inner;
      for (std::int64_t i = 0; i < grid; ++i) {
        double s = 0.0;
        for (std::int64_t k = -radius; k <= radius; ++k)
          s += kernel[static_cast<std::size_t>(k + radius)] * cur[static_cast<std::size_t>(base + reflect(i + k) * stride)];
        next[static_cast<std::size_t>(base + i * stride)] = s;
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

namespace {

TargetMap build_map(int arity, std::vector<double> cells, std::int64_t grid, double sigma_px,
                    double half_width) {
  if (arity < 1 || arity > 3) fail("contract", "target map arity must be 1, 2 or 3");
  if (grid < 5) fail("contract", "target map grid must be at least 5");
  TargetMap m;
  m.arity = arity;
  m.half_width = half_width;
  m.grid = grid;
  m.sigma_px = sigma_px;
  m.cells = std::move(cells);
  // rasterize the piecewise-constant levels at the grid cell centers
  std::vector<double> raw(static_cast<std::size_t>(m.field_size()));
  const double cell_w = 2.0 * half_width / 5.0;
  for (std::int64_t idx = 0; idx < m.field_size(); ++idx) {
    std::int64_t rem = idx, cell_idx = 0;
    for (int d = arity - 1; d >= 0; --d) {
      const std::int64_t gi = rem % grid;
      rem /= grid;
      const double coord = m.center(gi);
      auto ci = static_cast<std::int64_t>((coord + half_width) / cell_w);
      ci = std::clamp<std::int64_t>(ci, 0, 4);
      // accumulate with axis d fastest, matching the cells layout
      std::int64_t mult = 1;
      for (int dd = arity - 1; dd > d; --dd) mult *= 5;
      cell_idx += ci * mult;
    }
    raw[static_cast<std::size_t>(idx)] = m.cells[static_cast<std::size_t>(cell_idx)];
  }
  m.field = gaussian_blur(raw, arity, grid, sigma_px);
  return m;
}

}  // namespace

TargetMap make_target_map(int arity, std::uint64_t seed, std::int64_t grid, double sigma_px,
                          double half_width) {
  if (arity < 1 || arity > 3) fail("contract", "target map arity must be 1, 2 or 3");
  Rng rng(seed);
  std::int64_t ncells = 1;
  for (int d = 0; d < arity; ++d) ncells *= 5;
  std::vector<double> cells(static_cast<std::size_t>(ncells));
  for (auto& c : cells) c = rng.uniform(-1.0, 1.0);
  return build_map(arity, std::move(cells), grid, sigma_px, half_width);
}

TargetMap make_target_map_from_cells(int arity, std::vector<double> cells, std::int64_t grid,
                                     double sigma_px, double half_width) {
  std::int64_t ncells = 1;
  for (int d = 0; d < arity; ++d) ncells *= 5;
  if (static_cast<std::int64_t>(cells.size()) != ncells)
    fail("contract", "expected " + std::to_string(ncells) + " cell levels");
  return build_map(arity, std::move(cells), grid, sigma_px, half_width);
}

PretrainResult pretrain_inner(const InnerNetPtr& net_ptr, const TargetMap& map, std::int64_t steps,
                              std::int64_t batch, double lr, Rng& rng) {
  InnerNet& net = *net_ptr;
  if (net.arity() != map.arity) fail("contract", "net arity != target map arity");
  const int n = net.arity();
  AdamConfig acfg;
  acfg.lr = lr;
  Adam adam(net.parameters(), acfg);

  PretrainResult res;
  res.steps = steps;
  std::vector<double> point(static_cast<std::size_t>(n));
  for (std::int64_t step = 0; step < steps; ++step) {
    auto x = make_tensor({batch, n});
    auto y = make_tensor({batch, 1});
    for (std::int64_t b = 0; b < batch; ++b) {
      for (int d = 0; d < n; ++d) {
        point[static_cast<std::size_t>(d)] = rng.uniform(-map.half_width, map.half_width);
        x->data[b * n + d] = point[static_cast<std::size_t>(d)];
      }
      y->data[b] = map.lookup(point);
    }
    Tape tape;
    TensorPtr loss;
    try {
      auto pred = apply_activation(tape, net_ptr, x);  // (batch, 1)
      loss = ops::mse(tape, pred, y);
      for (auto& p : net.parameters()) p->zero_grad();
      tape.backward(loss);
    } catch (const Error& e) {
      fail("numeric", "pretraining diverged at step " + std::to_string(step) + ": " + e.what());
    }
    adam.step();
    res.final_loss = loss->data[0];
  }

  // RMSE and a Lipschitz estimate over the map's own cell-center grid
  double se = 0.0;
  const std::int64_t total = map.field_size();
  std::vector<double> pred(static_cast<std::size_t>(total));
  std::vector<double> pt(static_cast<std::size_t>(n));
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      pt[static_cast<std::size_t>(d)] = map.center(rem % map.grid);
      rem /= map.grid;
    }
    pred[static_cast<std::size_t>(idx)] = net.eval(pt.data());
    const double diff = pred[static_cast<std::size_t>(idx)] - map.field[static_cast<std::size_t>(idx)];
    se += diff * diff;
  }
  res.rmse = std::sqrt(se / static_cast<double>(total));

  const double h = 2.0 * map.half_width / static_cast<double>(map.grid);
  double max_slope = 0.0;
  std::int64_t stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const std::int64_t pos = (idx / stride) % map.grid;
      if (pos + 1 < map.grid)
        max_slope = std::max(max_slope,
                             std::abs(pred[static_cast<std::size_t>(idx + stride)] -
                                      pred[static_cast<std::size_t>(idx)]) / h);
    }
    stride *= map.grid;
  }
  res.lipschitz_estimate = max_slope;
  return res;
}

}  // namespace nargact
