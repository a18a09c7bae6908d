#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nargact {

// All recoverable failures surface as Error with a machine-parseable
// "category: message" what() string. Categories in use: shape, numeric,
// contract, format, config, io.
class Error : public std::runtime_error {
 public:
  Error(const std::string& category, const std::string& message)
      : std::runtime_error(category + ": " + message), category_(category) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

// FNV-1a, 64-bit. Used for config digests, parameter digests and file
// provenance. Not cryptographic, just stable and portable.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

inline std::uint64_t digest_doubles(const std::vector<double>& v,
                                    std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(v.data(), v.size() * sizeof(double), seed);
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Shortest decimal form that round-trips a double (%.17g always does; try
// shorter first so grid/CSV files stay readable).
inline std::string format_double(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = std::strtod(buf, nullptr);
    if (back == x) return std::string(buf);
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace nargact
