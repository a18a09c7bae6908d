#include "nargact/synth_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nargact/rng.hpp"

namespace nargact {

namespace {

// 5x7 digit glyphs, row-major, '1' = ink
const std::array<std::array<const char*, 7>, 10> kGlyphs = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},  // 0
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},  // 1
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},  // 2
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},  // 3
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},  // 4
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},  // 5
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},  // 6
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},  // 7
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},  // 8
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},  // 9
}};

double glyph_sample(int digit, double gy, double gx) {
  // bilinear over the 5x7 bitmap, zero outside
  const auto& g = kGlyphs[static_cast<std::size_t>(digit)];
  auto at = [&](int r, int c) -> double {
    if (r < 0 || r >= 7 || c < 0 || c >= 5) return 0.0;
    return g[static_cast<std::size_t>(r)][c] == '1' ? 1.0 : 0.0;
  };
  const int r0 = static_cast<int>(std::floor(gy));
  const int c0 = static_cast<int>(std::floor(gx));
  const double fy = gy - r0, fx = gx - c0;
  return at(r0, c0) * (1 - fy) * (1 - fx) + at(r0, c0 + 1) * (1 - fy) * fx +
         at(r0 + 1, c0) * fy * (1 - fx) + at(r0 + 1, c0 + 1) * fy * fx;
}

}  // namespace

LabeledSet make_synth_digits(std::int64_t count, std::uint64_t seed, std::int64_t size) {
  if (size < 8) fail("contract", "synth digit images need size >= 8");
  LabeledSet set;
  set.channels = 1;
  set.height = size;
  set.width = size;
  set.images.resize(static_cast<std::size_t>(count * size * size));
  set.labels.resize(static_cast<std::size_t>(count));
  set.provenance = {{"synth:digits", hex64(splitmix64(seed))}};
  Rng rng(seed);
  const double s2 = static_cast<double>(size);
  for (std::int64_t i = 0; i < count; ++i) {
    const int digit = static_cast<int>(rng.bounded(10));
    set.labels[static_cast<std::size_t>(i)] = digit;
    const double scale = s2 * rng.uniform(0.075, 0.105);  // glyph rows -> ~0.5..0.75 of the image
    const double theta = rng.uniform(-0.22, 0.22);
    const double cy = s2 / 2.0 + rng.uniform(-0.08, 0.08) * s2;
    const double cx = s2 / 2.0 + rng.uniform(-0.08, 0.08) * s2;
    const double amp = rng.uniform(0.75, 1.0);
    const double ct = std::cos(theta), st = std::sin(theta);
    double* img = set.images.data() + i * size * size;
    for (std::int64_t y = 0; y < size; ++y)
      for (std::int64_t x = 0; x < size; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        const double gy = (dy * ct + dx * st) / scale + 3.0;
        const double gx = (-dy * st + dx * ct) / scale + 2.0;
        double v = amp * glyph_sample(digit, gy, gx) + 0.04 * rng.normal();
        img[y * size + x] = std::clamp(v, 0.0, 1.0);
      }
  }
  return set;
}

LabeledSet make_synth_shapes(std::int64_t count, std::uint64_t seed) {
  constexpr std::int64_t S = 32;
  LabeledSet set;
  set.channels = 3;
  set.height = S;
  set.width = S;
  set.images.resize(static_cast<std::size_t>(count * 3 * S * S));
  set.labels.resize(static_cast<std::size_t>(count));
  set.provenance = {{"synth:shapes", hex64(splitmix64(seed ^ 0x5348504553ULL))}};
  Rng rng(seed);
  for (std::int64_t i = 0; i < count; ++i) {
    const int cls = static_cast<int>(rng.bounded(10));
    set.labels[static_cast<std::size_t>(i)] = cls;
    const double cy = 16.0 + rng.uniform(-4.0, 4.0);
    const double cx = 16.0 + rng.uniform(-4.0, 4.0);
    const double r = rng.uniform(6.0, 10.0);
    const double fg[3] = {rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)};
    const double period = rng.uniform(3.0, 5.0);
    double* img = set.images.data() + i * 3 * S * S;
    for (std::int64_t y = 0; y < S; ++y)
      for (std::int64_t x = 0; x < S; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        const double rad = std::sqrt(dy * dy + dx * dx);
        double on = 0.0;
        switch (cls) {
          case 0: on = rad <= r ? 1.0 : 0.0; break;                                  // disc
          case 1: on = (rad <= r && rad >= r - 2.5) ? 1.0 : 0.0; break;              // ring
          case 2: on = (std::abs(dy) <= r * 0.8 && std::abs(dx) <= r * 0.8); break;  // square
          case 3:
            on = (std::max(std::abs(dy), std::abs(dx)) <= r * 0.8 &&
                  std::max(std::abs(dy), std::abs(dx)) >= r * 0.8 - 2.5);
            break;  // frame
          case 4: on = (std::abs(dy) <= 1.8 || std::abs(dx) <= 1.8) && rad <= r * 1.2; break;  // plus
          case 5:
            on = (std::abs(dy - dx) <= 2.2 || std::abs(dy + dx) <= 2.2) && rad <= r * 1.2;
            break;  // X
          case 6: on = std::fmod(std::abs(dy), period * 2.0) < period && rad <= r * 1.3; break;
          case 7: on = std::fmod(std::abs(dx), period * 2.0) < period && rad <= r * 1.3; break;
          case 8:
            on = ((std::fmod(std::abs(dy), period * 2.0) < period) ==
                  (std::fmod(std::abs(dx), period * 2.0) < period)) &&
                 rad <= r * 1.2;
            break;  // checker
          case 9: on = std::abs(rad - r * 0.55) <= 1.6 || rad <= 2.2; break;  // dot-in-ring
          default: break;
        }
        for (int c = 0; c < 3; ++c) {
          double v = 0.12 + 0.05 * rng.normal() + on * fg[c] * 0.85;
          img[(c * S + y) * S + x] = std::clamp(v, 0.0, 1.0);
        }
      }
  }
  return set;
}

}  // namespace nargact
