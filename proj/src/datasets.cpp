#include "nargact/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "nargact/rng.hpp"

namespace nargact {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io", "cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

std::string file_digest(const std::vector<unsigned char>& bytes) {
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

}  // namespace

LabeledSet load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img_bytes = read_file(images_path);
  const auto lab_bytes = read_file(labels_path);

  if (img_bytes.size() < 16) fail("format", "idx images file truncated: '" + images_path + "'");
  if (be32(img_bytes.data()) != 0x00000803u)
    fail("format", "idx images magic is not 0x00000803 in '" + images_path + "'");
  const std::int64_t count = be32(img_bytes.data() + 4);
  const std::int64_t rows = be32(img_bytes.data() + 8);
  const std::int64_t cols = be32(img_bytes.data() + 12);
  if (static_cast<std::int64_t>(img_bytes.size()) != 16 + count * rows * cols)
    fail("format", "idx images payload truncated: expected " +
                       std::to_string(16 + count * rows * cols) + " bytes, got " +
                       std::to_string(img_bytes.size()));

  if (lab_bytes.size() < 8) fail("format", "idx labels file truncated: '" + labels_path + "'");
  if (be32(lab_bytes.data()) != 0x00000801u)
    fail("format", "idx labels magic is not 0x00000801 in '" + labels_path + "'");
  const std::int64_t lab_count = be32(lab_bytes.data() + 4);
  if (static_cast<std::int64_t>(lab_bytes.size()) != 8 + lab_count)
    fail("format", "idx labels payload truncated");
  if (lab_count != count)
    fail("format", "idx dimension mismatch: " + std::to_string(count) + " images vs " +
                       std::to_string(lab_count) + " labels");

  LabeledSet set;
  set.channels = 1;
  set.height = rows;
  set.width = cols;
  set.images.resize(static_cast<std::size_t>(count * rows * cols));
  for (std::size_t i = 0; i < set.images.size(); ++i)
    set.images[i] = static_cast<double>(img_bytes[16 + i]) / 255.0;
  set.labels.resize(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) set.labels[i] = lab_bytes[8 + i];
  set.provenance = {{images_path, file_digest(img_bytes)}, {labels_path, file_digest(lab_bytes)}};
  return set;
}

void write_mnist_idx(const LabeledSet& set, const std::string& images_path,
                     const std::string& labels_path) {
  if (set.channels != 1) fail("contract", "idx writer expects single-channel images");
  std::vector<unsigned char> img;
  put_be32(img, 0x00000803u);
  put_be32(img, static_cast<std::uint32_t>(set.count()));
  put_be32(img, static_cast<std::uint32_t>(set.height));
  put_be32(img, static_cast<std::uint32_t>(set.width));
  for (double v : set.images)
    img.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  std::ofstream out(images_path, std::ios::binary);
  if (!out) fail("io", "cannot write '" + images_path + "'");
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));

  std::vector<unsigned char> lab;
  put_be32(lab, 0x00000801u);
  put_be32(lab, static_cast<std::uint32_t>(set.count()));
  for (int l : set.labels) lab.push_back(static_cast<unsigned char>(l));
  std::ofstream lout(labels_path, std::ios::binary);
  if (!lout) fail("io", "cannot write '" + labels_path + "'");
  lout.write(reinterpret_cast<const char*>(lab.data()), static_cast<std::streamsize>(lab.size()));
}

LabeledSet load_cifar10_bin(const std::vector<std::string>& batch_paths) {
  if (batch_paths.empty()) fail("contract", "no cifar batch files given");
  LabeledSet set;
  set.channels = 3;
  set.height = 32;
  set.width = 32;
  constexpr std::int64_t kRecord = 3073;
  for (const auto& path : batch_paths) {
    const auto bytes = read_file(path);
    if (bytes.size() % kRecord != 0)
      fail("format", "cifar batch '" + path + "' length " + std::to_string(bytes.size()) +
                         " is not a multiple of 3073");
    const std::int64_t records = static_cast<std::int64_t>(bytes.size()) / kRecord;
    for (std::int64_t r = 0; r < records; ++r) {
      const unsigned char* rec = bytes.data() + r * kRecord;
      if (rec[0] > 9) fail("format", "cifar label byte " + std::to_string(rec[0]) + " out of range");
      set.labels.push_back(rec[0]);
      for (std::int64_t i = 0; i < 3072; ++i)
        set.images.push_back(static_cast<double>(rec[1 + i]) / 255.0);
    }
    set.provenance.emplace_back(path, file_digest(bytes));
  }
  return set;
}

void write_cifar10_bin(const LabeledSet& set, const std::string& path) {
  if (set.channels != 3 || set.height != 32 || set.width != 32)
    fail("contract", "cifar writer expects 3x32x32 images");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io", "cannot write '" + path + "'");
  for (std::int64_t i = 0; i < set.count(); ++i) {
    unsigned char rec[3073];
    rec[0] = static_cast<unsigned char>(set.labels[i]);
    const double* img = set.image(i);
    for (std::int64_t j = 0; j < 3072; ++j)
      rec[1 + j] = static_cast<unsigned char>(std::lround(std::clamp(img[j], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(rec), 3073);
  }
}

namespace {

LabeledSet take_subset(const LabeledSet& set, const std::vector<std::int64_t>& idx) {
  LabeledSet out;
  out.channels = set.channels;
  out.height = set.height;
  out.width = set.width;
  out.provenance = set.provenance;
  const std::int64_t numel = set.image_numel();
  out.images.reserve(idx.size() * static_cast<std::size_t>(numel));
  out.labels.reserve(idx.size());
  for (auto i : idx) {
    const double* img = set.image(i);
    out.images.insert(out.images.end(), img, img + numel);
    out.labels.push_back(set.labels[i]);
  }
  return out;
}

// per-class quotas: floor shares, remainder by largest fractional part
std::map<int, std::int64_t> quotas(const std::map<int, std::int64_t>& avail, std::int64_t want,
                                   std::int64_t total) {
  std::map<int, std::int64_t> q;
  std::vector<std::pair<double, int>> fracs;
  std::int64_t assigned = 0;
  for (const auto& [cls, n] : avail) {
    const double share = static_cast<double>(want) * static_cast<double>(n) / static_cast<double>(total);
    q[cls] = static_cast<std::int64_t>(std::floor(share));
    assigned += q[cls];
    fracs.emplace_back(share - std::floor(share), cls);
  }
  std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < want && i < fracs.size(); ++i, ++assigned) ++q[fracs[i].second];
  return q;
}

}  // namespace

SplitResult split_and_subset(const LabeledSet& set, double train_fraction, double val_fraction,
                             std::array<std::int64_t, 3> subset_sizes, std::uint64_t seed) {
  const std::int64_t total = set.count();
  if (total == 0) fail("contract", "split of an empty set");
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0)
    fail("contract", "split fractions must be nonnegative and sum to at most 1");

  std::int64_t want_train = subset_sizes[0], want_val = subset_sizes[1], want_test = subset_sizes[2];
  if (want_train == 0 && want_val == 0 && want_test == 0) {
    want_train = static_cast<std::int64_t>(std::floor(train_fraction * static_cast<double>(total)));
    want_val = static_cast<std::int64_t>(std::floor(val_fraction * static_cast<double>(total)));
    want_test = total - want_train - want_val;
  }
  if (want_train + want_val + want_test > total)
    fail("contract", "requested subsets (" + std::to_string(want_train + want_val + want_test) +
                         ") exceed available " + std::to_string(total));

  std::vector<std::int64_t> order(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::map<int, std::vector<std::int64_t>> pools;  // shuffled order preserved per class
  std::map<int, std::int64_t> avail;
  for (auto i : order) {
    pools[set.labels[i]].push_back(i);
    ++avail[set.labels[i]];
  }
  std::map<int, std::int64_t> cursor;
  for (const auto& [cls, _] : pools) cursor[cls] = 0;

  SplitResult res;
  auto draw = [&](std::int64_t want, std::vector<std::int64_t>& out_idx) {
    const auto q = quotas(avail, want, total);
    for (const auto& [cls, k] : q) {
      auto& pool = pools[cls];
      auto& cur = cursor[cls];
      if (cur + k > static_cast<std::int64_t>(pool.size()))
        fail("contract", "class " + std::to_string(cls) + " exhausted while drawing subsets");
      for (std::int64_t j = 0; j < k; ++j) out_idx.push_back(pool[cur + j]);
      cur += k;
    }
  };
  draw(want_train, res.train_idx);
  draw(want_val, res.val_idx);
  draw(want_test, res.test_idx);
  res.train = take_subset(set, res.train_idx);
  res.val = take_subset(set, res.val_idx);
  res.test = take_subset(set, res.test_idx);
  return res;
}

}  // namespace nargact
