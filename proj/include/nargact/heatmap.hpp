#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nargact/inner_net.hpp"

namespace nargact {

// Fixed diverging palette, 256 RGB entries. Index 0 is red (178,24,43) for
// the most negative value, indexes 127/128 are white (the zero crossing),
// index 255 is blue (33,102,172) for the most positive. Entry i < 128
// interpolates red->white at t = i/127; entry i >= 128 interpolates
// white->blue at t = (i-128)/127. A value v maps to
// round((v+vmax)/(2*vmax)*255) with vmax = max |in-mask value|.
std::array<std::array<std::uint8_t, 3>, 256> diverging_palette();

// Binary P6 pixmap of a 2-D grid; width = axis2 extent, height = axis1
// extent, rows in axis1 order. Out-of-mask pixels force mid-gray (128,128,128).
// mask, when given, is one byte per cell (nonzero = in mask).
std::vector<std::uint8_t> render_heatmap(const GridEval& g,
                                         const std::vector<std::uint8_t>* mask = nullptr);
void write_heatmap(const std::string& path, const GridEval& g,
                   const std::vector<std::uint8_t>* mask = nullptr);

}  // namespace nargact
