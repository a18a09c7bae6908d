#pragma once

#include <string>

#include "nargact/inner_net.hpp"

namespace nargact {

// Text grid format:
//   # axis1 <lo> <hi> <n>
//   # axis2 <lo> <hi> <n>
//   v,v,...,v        (n1 rows of n2 values, row-major, axis2 fastest)
// Values print in shortest round-trip decimal form, so parse/emit is
// lossless. 1-D data uses a degenerate axis1 (0 0 1).
std::string grid_to_text(const GridEval& g);
GridEval grid_from_text(const std::string& text);

void write_grid(const std::string& path, const GridEval& g);
GridEval read_grid(const std::string& path);

}  // namespace nargact
