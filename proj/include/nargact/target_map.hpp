#pragma once

#include <cstdint>
#include <vector>

#include "nargact/inner_net.hpp"
#include "nargact/rng.hpp"

namespace nargact {

// Random pretraining target: 5^n unit cells with levels ~ U(-1,1) tiling
// [-R,R]^n, discretized on a G^n grid of cell centers and blurred by a
// separable Gaussian (sigma in grid pixels, half-sample reflective
// boundaries). Lookup is multilinear interpolation of the blurred field.
struct TargetMap {
  int arity = 2;
  double half_width = 2.5;
  std::int64_t grid = 50;
  double sigma_px = 3.0;
  std::vector<double> cells;  // 5^n raw levels, row-major
  std::vector<double> field;  // G^n blurred values at cell centers, last axis fastest

  double lookup(const std::vector<double>& x) const;
  // center coordinate of grid index i along one axis
  double center(std::int64_t i) const {
    return -half_width + (static_cast<double>(i) + 0.5) * (2.0 * half_width) / static_cast<double>(grid);
  }
  std::int64_t field_size() const;
};

TargetMap make_target_map(int arity, std::uint64_t seed, std::int64_t grid = 50,
                          double sigma_px = 3.0, double half_width = 2.5);
// Same construction from fixed cell levels (tests plant constants this way).
TargetMap make_target_map_from_cells(int arity, std::vector<double> cells, std::int64_t grid = 50,
                                     double sigma_px = 3.0, double half_width = 2.5);

// Separable Gaussian blur of an n-D field (extent `grid` per axis), sigma in
// pixels, kernel truncated at ceil(4*sigma) and renormalized, half-sample
// symmetric reflection at the edges.
std::vector<double> gaussian_blur(const std::vector<double>& field, int arity, std::int64_t grid,
                                  double sigma_px);

struct PretrainResult {
  double rmse = 0.0;          // over the map's own cell-center grid
  double final_loss = 0.0;    // last minibatch MSE
  std::int64_t steps = 0;
  double lipschitz_estimate = 0.0;  // max |df| / h over the evaluation grid, reported not asserted
};

// Session I: regress the (freshly Xavier-initialized) inner net onto the
// map by sampling points uniformly over the domain. Deterministic given rng.
PretrainResult pretrain_inner(const InnerNetPtr& net, const TargetMap& map, std::int64_t steps,
                              std::int64_t batch, double lr, Rng& rng);

}  // namespace nargact
