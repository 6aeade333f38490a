#include "core/gf2.hpp"

#include <bit>

namespace skmac {

bool dot_parity(const std::uint64_t* a, const std::uint64_t* b, int words) {
  std::uint64_t acc = 0;
  for (int i = 0; i < words; ++i) acc ^= a[i] & b[i];
  return (std::popcount(acc) & 1) != 0;
}

BitVec BitMat::mul(const BitVec& x) const {
  if (x.size() != c_) throw InvalidArgumentError("BitMat::mul: size mismatch");
  BitVec out(r_);
  for (int i = 0; i < r_; ++i)
    if (dot_parity(row(i), x.words().data(), wpr_)) out.set(i, true);
  return out;
}

BitMat BitMat::mul(const BitMat& o) const {
  if (c_ != o.rows()) throw InvalidArgumentError("BitMat::mul: shape mismatch");
  BitMat out(r_, o.cols());
  for (int i = 0; i < r_; ++i) {
    std::uint64_t* orow = out.row(i);
    const std::uint64_t* arow = row(i);
    for (int j = 0; j < c_; ++j) {
      if ((arow[j >> 6] >> (j & 63)) & 1) {
        const std::uint64_t* brow = o.row(j);
        for (int w = 0; w < out.wpr_; ++w) orow[w] ^= brow[w];
      }
    }
  }
  return out;
}

int BitMat::rank() const {
  BitMat a = *this;
  int rank = 0;
  for (int col = 0; col < c_ && rank < r_; ++col) {
    int piv = -1;
    for (int i = rank; i < r_; ++i)
      if (a.get(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int w = 0; w < wpr_; ++w) std::swap(a.row(piv)[w], a.row(rank)[w]);
    for (int i = 0; i < r_; ++i) {
      if (i != rank && a.get(i, col)) {
        const std::uint64_t* src = a.row(rank);
        std::uint64_t* dst = a.row(i);
        for (int w = 0; w < wpr_; ++w) dst[w] ^= src[w];
      }
    }
    ++rank;
  }
  return rank;
}

BitMat BitMat::identity(int n) {
  BitMat m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMat BitMat::random(int rows, int cols, Rng& rng) {
  BitMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    std::uint64_t* r = m.row(i);
    for (int w = 0; w < m.wpr_; ++w) r[w] = rng.next_u64();
    if (cols % 64 != 0) r[m.wpr_ - 1] &= (~0ull) >> (64 - cols % 64);
  }
  return m;
}

Gf2Solver::Gf2Solver(const BitMat& a)
    : rows_(a.rows()), cols_(a.cols()), rank_(0), red_(a), xform_(BitMat::identity(a.rows())) {
  for (int col = 0; col < cols_ && rank_ < rows_; ++col) {
    int piv = -1;
    for (int i = rank_; i < rows_; ++i)
      if (red_.get(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank_) {
      for (int w = 0; w < red_.words_per_row(); ++w) std::swap(red_.row(piv)[w], red_.row(rank_)[w]);
      for (int w = 0; w < xform_.words_per_row(); ++w) std::swap(xform_.row(piv)[w], xform_.row(rank_)[w]);
    }
    for (int i = 0; i < rows_; ++i) {
      if (i != rank_ && red_.get(i, col)) {
        for (int w = 0; w < red_.words_per_row(); ++w) red_.row(i)[w] ^= red_.row(rank_)[w];
        for (int w = 0; w < xform_.words_per_row(); ++w) xform_.row(i)[w] ^= xform_.row(rank_)[w];
      }
    }
    pivot_col_.push_back(col);
    ++rank_;
  }
}

std::vector<BitVec> nullspace_basis(const BitMat& a) {
  const int rows = a.rows(), cols = a.cols();
  BitMat red = a;
  std::vector<int> pivot_of_col(cols, -1);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (red.get(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int w = 0; w < red.words_per_row(); ++w) std::swap(red.row(piv)[w], red.row(rank)[w]);
    for (int i = 0; i < rows; ++i)
      if (i != rank && red.get(i, col))
        for (int w = 0; w < red.words_per_row(); ++w) red.row(i)[w] ^= red.row(rank)[w];
    pivot_of_col[col] = rank;
    ++rank;
  }
  std::vector<BitVec> basis;
  for (int col = 0; col < cols; ++col) {
    if (pivot_of_col[col] >= 0) continue;
    BitVec v(cols);
    v.set(col, true);
    for (int c = 0; c < cols; ++c)
      if (pivot_of_col[c] >= 0 && red.get(pivot_of_col[c], col)) v.set(c, true);
    basis.push_back(std::move(v));
  }
  return basis;
}

Gf2Solver::Status Gf2Solver::solve(const BitVec& b, BitVec& x) const {
  if (b.size() != rows_) throw InvalidArgumentError("Gf2Solver::solve: rhs size mismatch");
  BitVec bb = xform_.mul(b);
  // consistency: zero rows of red_ must have zero rhs
  for (int i = rank_; i < rows_; ++i)
    if (bb.get(i)) return Status::kInconsistent;
  x = BitVec(cols_);
  for (int i = 0; i < rank_; ++i)
    if (bb.get(i)) x.set(pivot_col_[i], true);
  return rank_ == cols_ ? Status::kUnique : Status::kMultiple;
}

}  // namespace skmac
