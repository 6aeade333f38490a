#ifndef SKMAC_HASHEXT_HPP
#define SKMAC_HASHEXT_HPP

#include "core/gf2.hpp"

namespace skmac {

// Systematic Toeplitz family: K = x_A xor T x_B with x = (x_A, x_B),
// |x_A| = out_len and T a seeded Toeplitz matrix. 2-universal: distinct
// inputs collide with probability exactly 2^-out_len over the seed.
class HashExtractor {
 public:
  HashExtractor(int n_in, int out_len, std::uint64_t seed);

  int input_bits() const { return n_in_; }
  int output_bits() const { return len_; }
  std::uint64_t seed() const { return seed_; }

  BitVec apply(const BitVec& x) const;

  // First nbits output bits only (cheap sketches of long keys).
  BitVec apply_prefix(const BitVec& x, int nbits) const;

  // Dense [I | T] matrix, for the exact linear security computation.
  BitMat as_matrix() const;

 private:
  // column j of T = seed bits [m-1-j, m-1-j+len)
  void xor_window(int offset, BitVec& acc) const;

  int n_in_, len_, m_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> sbits_;  // len + m - 1 packed seed bits
};

}  // namespace skmac

#endif
