#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nargact/common.hpp"

namespace nargact {

// Immutable image classification set; pixel values already scaled to [0,1].
struct LabeledSet {
  std::int64_t channels = 1, height = 0, width = 0;
  std::vector<double> images;  // count * C*H*W, row-major
  std::vector<int> labels;
  std::vector<std::pair<std::string, std::string>> provenance;  // (path, fnv64 hex)

  std::int64_t count() const { return static_cast<std::int64_t>(labels.size()); }
  std::int64_t image_numel() const { return channels * height * width; }
  const double* image(std::int64_t i) const { return images.data() + i * image_numel(); }
};

// IDX (big-endian) parsing: magic 0x00000803 for images, 0x00000801 for
// labels, then dimension sizes, then raw bytes scaled by 1/255.
LabeledSet load_mnist_idx(const std::string& images_path, const std::string& labels_path);
void write_mnist_idx(const LabeledSet& set, const std::string& images_path,
                     const std::string& labels_path);

// CIFAR-10 binary batches: 3073 bytes per record, 1 label byte + 3072
// planar R,G,B pixel bytes.
LabeledSet load_cifar10_bin(const std::vector<std::string>& batch_paths);
void write_cifar10_bin(const LabeledSet& set, const std::string& path);

struct SplitResult {
  LabeledSet train, val, test;
  std::vector<std::int64_t> train_idx, val_idx, test_idx;  // indices into the source set
};

// Deterministic seeded shuffle + class-stratified selection. Explicit subset
// sizes win; when all three are 0 the fractions decide (test takes the rest).
SplitResult split_and_subset(const LabeledSet& set, double train_fraction, double val_fraction,
                             std::array<std::int64_t, 3> subset_sizes, std::uint64_t seed);

}  // namespace nargact
