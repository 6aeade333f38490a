#include "core/common.hpp"

#include <cstdlib>

namespace skmac {

std::size_t memory_budget_entries() {
  static const std::size_t budget = [] {
    const char* env = std::getenv("SKMAC_MEMORY_BUDGET");
    if (env != nullptr) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1) << 26;
  }();
  return budget;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5 percentile
  const double z2 = z * z;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double denom = 1.0 + z2 / nn;
  const double center = p + z2 / (2.0 * nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  double lo = (center - half) / denom;
  double hi = (center + half) / denom;
  if (lo < 0.0 || k == 0) lo = 0.0;
  if (hi > 1.0 || k == n) hi = 1.0;
  return {lo, hi};
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace skmac
