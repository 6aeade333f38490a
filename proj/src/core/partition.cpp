#include "core/partition.hpp"

#include <cmath>

namespace skmac {

bool FractionalPartition::valid(double tol) const {
  if (m < 2 || weights.size() != (static_cast<std::size_t>(1) << m)) return false;
  std::uint32_t full = (1u << m) - 1;
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    double w = weights[mask];
    if (mask == 0 || mask == full) {
      if (w != 0.0) return false;
      continue;
    }
    if (w < -tol || w > 1.0 + tol) return false;
  }
  for (int i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::uint32_t mask = 1; mask < full; ++mask)
      if (mask & (1u << i)) sum += weights[mask];
    if (std::fabs(sum - 1.0) > tol) return false;
  }
  return true;
}

bool Partition::valid() const {
  if (m < 2 || blocks.size() < 2) return false;
  std::uint32_t seen = 0;
  for (std::uint32_t b : blocks) {
    if (b == 0) return false;
    if (b & seen) return false;
    seen |= b;
  }
  return seen == ((1u << m) - 1);
}

FractionalPartition partition_to_fractional(const Partition& p) {
  if (!p.valid()) throw InvalidArgumentError("partition_to_fractional: invalid partition (need k >= 2)");
  FractionalPartition fp;
  fp.m = p.m;
  fp.weights.assign(static_cast<std::size_t>(1) << p.m, 0.0);
  std::uint32_t full = (1u << p.m) - 1;
  double k = static_cast<double>(p.blocks.size());
  for (std::uint32_t b : p.blocks) fp.weights[full ^ b] += 1.0 / (k - 1.0);
  if (!fp.valid()) throw InternalError("partition_to_fractional: covering constraint violated");
  return fp;
}

namespace {

void partitions_rec(int m, int next, std::vector<std::uint32_t>& blocks, std::vector<Partition>& out) {
  if (next == m) {
    if (blocks.size() >= 2) {
      Partition p;
      p.m = m;
      p.blocks = blocks;
      out.push_back(p);
    }
    return;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i] |= (1u << next);
    partitions_rec(m, next + 1, blocks, out);
    blocks[i] &= ~(1u << next);
  }
  blocks.push_back(1u << next);
  partitions_rec(m, next + 1, blocks, out);
  blocks.pop_back();
}

}  // namespace

std::vector<Partition> enumerate_partitions(int m) {
  if (m < 2) throw InvalidArgumentError("enumerate_partitions: m must be >= 2");
  std::vector<Partition> out;
  std::vector<std::uint32_t> blocks;
  partitions_rec(m, 0, blocks, out);
  return out;
}

FractionalPartition random_fractional_partition(int m, Rng& rng) {
  auto parts = enumerate_partitions(m);
  std::vector<double> w(parts.size());
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - rng.uniform01());
    sum += v;
  }
  FractionalPartition fp;
  fp.m = m;
  fp.weights.assign(static_cast<std::size_t>(1) << m, 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    FractionalPartition base = partition_to_fractional(parts[i]);
    for (std::size_t mask = 0; mask < fp.weights.size(); ++mask)
      fp.weights[mask] += (w[i] / sum) * base.weights[mask];
  }
  if (!fp.valid()) throw InternalError("random_fractional_partition: invalid sample");
  return fp;
}

}  // namespace skmac
