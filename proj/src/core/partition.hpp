#ifndef SKMAC_PARTITION_HPP
#define SKMAC_PARTITION_HPP

#include <cstdint>
#include <vector>

#include "core/common.hpp"

namespace skmac {

// Subsets of {0..m-1} are bitmasks; proper nonempty subsets range over
// 1 .. (1<<m)-2.

// Weights over proper nonempty subsets with sum_{B owns i} lambda_B = 1.
struct FractionalPartition {
  int m = 0;
  std::vector<double> weights;  // indexed by mask, size 1<<m (entries 0 and full unused)

  double weight(std::uint32_t mask) const { return weights[mask]; }
  bool valid(double tol = 1e-8) const;
};

// Ordinary set partition with at least 2 blocks.
struct Partition {
  int m = 0;
  std::vector<std::uint32_t> blocks;

  bool valid() const;
};

// lambda^pi of the paper: 1/(k-1) on each complement of a block.
FractionalPartition partition_to_fractional(const Partition& p);

// All partitions of {0..m-1} with >= 2 blocks.
std::vector<Partition> enumerate_partitions(int m);

// Random point of the fractional-partition polytope: convex combination of
// partition-induced vertices with Dirichlet-ish weights.
FractionalPartition random_fractional_partition(int m, Rng& rng);

}  // namespace skmac

#endif
