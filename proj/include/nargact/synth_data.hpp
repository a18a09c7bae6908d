#pragma once

#include "nargact/datasets.hpp"

namespace nargact {

// Procedural 10-class stand-in datasets for desk-scale runs where the real
// corpora are unavailable. Digits: glyphs rendered with random affine
// jitter and pixel noise into single-channel size x size images. Shapes:
// colored geometric patterns on 3x32x32, one pattern family per class.
// Both are pure functions of (count, seed).
LabeledSet make_synth_digits(std::int64_t count, std::uint64_t seed, std::int64_t size = 28);
LabeledSet make_synth_shapes(std::int64_t count, std::uint64_t seed);

}  // namespace nargact
