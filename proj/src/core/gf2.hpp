#ifndef SKMAC_GF2_HPP
#define SKMAC_GF2_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "core/common.hpp"

namespace skmac {

// Packed bit vector over GF(2).
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(int nbits) : n_(nbits), w_((nbits + 63) / 64, 0) {}

  int size() const { return n_; }
  bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(int i, bool v) {
    std::uint64_t m = 1ull << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }
  void flip(int i) { w_[i >> 6] ^= 1ull << (i & 63); }

  void operator^=(const BitVec& o) {
    for (std::size_t j = 0; j < w_.size(); ++j) w_[j] ^= o.w_[j];
  }
  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }

  const std::vector<std::uint64_t>& words() const { return w_; }
  std::vector<std::uint64_t>& words() { return w_; }

  static BitVec random(int nbits, Rng& rng) {
    BitVec v(nbits);
    for (auto& w : v.w_) w = rng.next_u64();
    v.trim();
    return v;
  }

  // keep bits past size() zeroed
  void trim() {
    if (n_ % 64 != 0 && !w_.empty()) w_.back() &= (~0ull) >> (64 - n_ % 64);
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Dense GF(2) matrix, rows packed.
class BitMat {
 public:
  BitMat() = default;
  BitMat(int rows, int cols)
      : r_(rows), c_(cols), wpr_((cols + 63) / 64), data_(static_cast<std::size_t>(rows) * wpr_, 0) {}

  int rows() const { return r_; }
  int cols() const { return c_; }

  bool get(int i, int j) const { return (row(i)[j >> 6] >> (j & 63)) & 1; }
  void set(int i, int j, bool v) {
    std::uint64_t m = 1ull << (j & 63);
    if (v)
      row(i)[j >> 6] |= m;
    else
      row(i)[j >> 6] &= ~m;
  }

  const std::uint64_t* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * wpr_; }
  std::uint64_t* row(int i) { return data_.data() + static_cast<std::size_t>(i) * wpr_; }
  int words_per_row() const { return wpr_; }

  BitVec mul(const BitVec& x) const;      // rows-bit result, x has cols bits
  BitMat mul(const BitMat& o) const;      // this (r x c) * o (c x k)
  int rank() const;

  static BitMat identity(int n);
  static BitMat random(int rows, int cols, Rng& rng);

 private:
  int r_ = 0, c_ = 0, wpr_ = 0;
  std::vector<std::uint64_t> data_;
};

// Row-reduces A once; solves A x = b for many right-hand sides.
class Gf2Solver {
 public:
  explicit Gf2Solver(const BitMat& a);

  int rank() const { return rank_; }
  bool unique() const { return rank_ == cols_; }

  enum class Status { kUnique, kMultiple, kInconsistent };

  // On kUnique/kMultiple fills x (free variables zero).
  Status solve(const BitVec& b, BitVec& x) const;

 private:
  int rows_, cols_, rank_;
  BitMat red_;                 // reduced A
  BitMat xform_;               // xform_ * A = red_
  std::vector<int> pivot_col_; // per pivot row
};

// Parity (XOR) of bitwise AND of two packed vectors of equal word count.
bool dot_parity(const std::uint64_t* a, const std::uint64_t* b, int words);

// Basis of the right nullspace of a.
std::vector<BitVec> nullspace_basis(const BitMat& a);

}  // namespace skmac

#endif
