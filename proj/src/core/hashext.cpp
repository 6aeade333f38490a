#include "core/hashext.hpp"

namespace skmac {

HashExtractor::HashExtractor(int n_in, int out_len, std::uint64_t seed)
    : n_in_(n_in), len_(out_len), m_(n_in - out_len), seed_(seed) {
  if (n_in < 0 || out_len < 0 || out_len > n_in)
    throw InvalidArgumentError("HashExtractor: need 0 <= out_len <= n_in");
  int nbits = len_ + m_ - 1;
  if (nbits < 0) nbits = 0;
  sbits_.assign((nbits + 63) / 64, 0);
  Rng rng(seed, 0x7031);
  for (auto& w : sbits_) w = rng.next_u64();
  if (nbits % 64 != 0 && !sbits_.empty()) sbits_.back() &= (~0ull) >> (64 - nbits % 64);
}

void HashExtractor::xor_window(int offset, BitVec& acc) const {
  // acc ^= seed bits [offset, offset + len_)
  std::size_t word = static_cast<std::size_t>(offset >> 6);
  int shift = offset & 63;
  auto& aw = acc.words();
  for (std::size_t i = 0; i < aw.size(); ++i) {
    std::uint64_t lo = sbits_[word + i] >> shift;
    std::uint64_t hi = (shift && word + i + 1 < sbits_.size()) ? sbits_[word + i + 1] << (64 - shift) : 0;
    aw[i] ^= lo | hi;
  }
  acc.trim();
}

BitVec HashExtractor::apply(const BitVec& x) const {
  if (x.size() != n_in_) throw InvalidArgumentError("HashExtractor::apply: input size mismatch");
  BitVec out(len_);
  if (len_ == 0) return out;
  for (int i = 0; i < len_; ++i)
    if (x.get(i)) out.flip(i);
  for (int j = 0; j < m_; ++j)
    if (x.get(len_ + j)) xor_window(m_ - 1 - j, out);
  return out;
}

BitVec HashExtractor::apply_prefix(const BitVec& x, int nbits) const {
  if (x.size() != n_in_) throw InvalidArgumentError("HashExtractor::apply_prefix: input size mismatch");
  if (nbits < 0 || nbits > len_) throw InvalidArgumentError("HashExtractor::apply_prefix: bad length");
  BitVec out(nbits);
  for (int i = 0; i < nbits; ++i) {
    bool b = x.get(i);
    // K_i = x_A[i] xor sum_j s[i - j + m - 1] x_B[j]
    for (int j = 0; j < m_; ++j) {
      int p = i - j + m_ - 1;
      if (x.get(len_ + j) && ((sbits_[p >> 6] >> (p & 63)) & 1)) b = !b;
    }
    out.set(i, b);
  }
  return out;
}

BitMat HashExtractor::as_matrix() const {
  if (static_cast<std::size_t>(len_) * n_in_ > memory_budget_entries())
    throw BudgetError("HashExtractor::as_matrix: exceeds memory budget");
  BitMat g(len_, n_in_);
  for (int i = 0; i < len_; ++i) g.set(i, i, true);
  for (int j = 0; j < m_; ++j) {
    int off = m_ - 1 - j;
    for (int i = 0; i < len_; ++i) {
      int b = off + i;
      if ((sbits_[b >> 6] >> (b & 63)) & 1) g.set(i, len_ + j, true);
    }
  }
  return g;
}

}  // namespace skmac
