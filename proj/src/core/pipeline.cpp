#include "core/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <thread>

#include "core/hashext.hpp"
#include "core/swcode.hpp"

namespace skmac {

namespace {

bool is_binary_adder(const MacChannel& ch) {
  if (ch.in1_size() != 2 || ch.in2_size() != 2 || ch.out_size() != 3) return false;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 3; ++x3)
        if (std::fabs(ch.w(x1, x2, x3) - (x3 == x1 + x2 ? 1.0 : 0.0)) > 1e-12) return false;
  return true;
}

std::string bits_prefix_hex(const BitVec& v, int nbits) {
  // big-endian bit string: bit 0 is the most significant of the first nibble
  int take = std::min(nbits, v.size());
  std::string out;
  for (int base = 0; base < take; base += 4) {
    int nib = 0;
    for (int i = 0; i < 4 && base + i < take; ++i)
      if (v.get(base + i)) nib |= 8 >> i;
    char c = nib < 10 ? static_cast<char>('0' + nib) : static_cast<char>('a' + nib - 10);
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// source emulation
// ---------------------------------------------------------------------------

struct ChainSchedule {
  int n, k, d;  // user 1 sends bits at slots [0,k), user 2 at [d, d+k), d = n-k
};

// terminal 3 resolves the overlapped uncoded schedule from y and f = m1^m2
bool chain_decode(const ChainSchedule& cs, const std::vector<int>& y, const Bits& f, Bits& m1, Bits& m2) {
  m1.assign(cs.k, 0);
  m2.assign(cs.k, 0);
  for (int j = 0; j < cs.k; ++j) {
    int slot = j;
    bool have = false;
    int bit = 0;
    if (slot < cs.d) {
      bit = y[slot];  // user 1 alone
      have = true;
    } else {
      int yv = y[slot];  // overlap of m1[j] and m2[j-d]
      if (yv != 1) {
        bit = yv / 2;
        have = true;
      } else {
        // m1[j] = 1 xor m2[j-d], m2[j-d] = f[j-d] xor m1[j-d]
        bit = 1 ^ (f[j - cs.d] ^ m1[j - cs.d]);
        have = true;
      }
    }
    if (!have) return false;
    m1[j] = static_cast<std::uint8_t>(bit);
    m2[j] = static_cast<std::uint8_t>(f[j] ^ m1[j]);
  }
  return true;
}

SeSchemeReport se_adder_chain(const MacChannel& ch, int n, int k, std::uint64_t seed, std::uint64_t trials) {
  (void)ch;
  ChainSchedule cs{n, k, n - k};
  SeSchemeReport rep;
  rep.scheme = "adder-chain";
  rep.n = n;
  rep.key_bits = k;
  rep.key_rate = static_cast<double>(k) / n;
  rep.rate1 = rep.rate2 = rep.key_rate;
  rep.comm_rate = static_cast<double>(k) / n;

  auto transmit = [&](const Bits& m1, const Bits& m2, std::vector<int>& y) {
    y.assign(n, 0);
    for (int t = 0; t < n; ++t) {
      int x1 = (t < cs.k) ? m1[t] : 0;
      int x2 = (t >= cs.d && t - cs.d < cs.k) ? m2[t - cs.d] : 0;
      y[t] = x1 + x2;
    }
  };

  if (2 * k <= 20) {
    // exhaustive: the chained schedule decodes without error
    std::uint64_t total = 1ull << (2 * k), good = 0;
    Bits m1(k), m2(k), f(k), d1, d2;
    std::vector<int> y;
    for (std::uint64_t code = 0; code < total; ++code) {
      for (int i = 0; i < k; ++i) {
        m1[i] = (code >> i) & 1;
        m2[i] = (code >> (k + i)) & 1;
        f[i] = m1[i] ^ m2[i];
      }
      transmit(m1, m2, y);
      if (chain_decode(cs, y, f, d1, d2) && d1 == m1 && d2 == m2) ++good;
    }
    rep.agreement = static_cast<double>(good) / total;
    rep.agreement_exact = true;
    rep.samples = total;
  } else {
    Bits m1(k), m2(k), f(k), d1, d2;
    std::vector<int> y;
    std::uint64_t good = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      Rng rng(derive_seed(seed, i), 0x5e);
      for (int j = 0; j < k; ++j) {
        m1[j] = rng.bit();
        m2[j] = rng.bit();
        f[j] = m1[j] ^ m2[j];
      }
      transmit(m1, m2, y);
      if (chain_decode(cs, y, f, d1, d2) && d1 == m1 && d2 == m2) ++good;
    }
    rep.agreement = trials ? static_cast<double>(good) / trials : 1.0;
    rep.agreement_exact = false;
    rep.samples = trials;
  }
  // K = M1 is uniform and independent of F = M1 xor M2
  rep.s_in = 0.0;
  rep.s_in_exact = true;
  return rep;
}

SeSchemeReport se_random_coding(const MacChannel& ch, int n, int k1, int k2, std::uint64_t seed,
                                std::uint64_t trials) {
  if (k1 > 16 || k2 > 16) throw BudgetError("source_emulation_sk: codebook too large (k > 16)");
  if (k1 < 1 || k2 < 1) throw InvalidArgumentError("source_emulation_sk: requested rate gives empty message");
  Rng cb_rng(derive_seed(seed, 0xc0de), 2);
  std::size_t s1 = static_cast<std::size_t>(1) << k1, s2 = static_cast<std::size_t>(1) << k2;
  std::vector<std::vector<int>> x1(s1, std::vector<int>(n)), x2(s2, std::vector<int>(n));
  for (auto& row : x1)
    for (auto& v : row) v = static_cast<int>(cb_rng.below(ch.in1_size()));
  for (auto& row : x2)
    for (auto& v : row) v = static_cast<int>(cb_rng.below(ch.in2_size()));

  const int fl = std::max(k1, k2);
  auto decode_m1 = [&](const std::vector<int>& y, std::uint64_t f) -> std::uint64_t {
    double best = -1.0;
    std::uint64_t best_m1 = 0;
    for (std::uint64_t m1 = 0; m1 < s1; ++m1) {
      std::uint64_t m2p = f ^ m1;
      if (k2 < fl && (m2p >> k2) != 0) continue;  // inconsistent with the zero padding
      double p = 1.0;
      for (int t = 0; t < n && p > 0.0; ++t) p *= ch.w(x1[m1][t], x2[m2p][t], y[t]);
      if (p > best) {  // ties keep the lowest message index
        best = p;
        best_m1 = m1;
      }
    }
    return best_m1;
  };

  SeSchemeReport rep;
  rep.scheme = "random-coding";
  rep.n = n;
  rep.key_bits = k1;
  rep.key_rate = static_cast<double>(k1) / n;
  rep.rate1 = static_cast<double>(k1) / n;
  rep.rate2 = static_cast<double>(k2) / n;
  rep.comm_rate = static_cast<double>(fl) / n;
  std::uint64_t good = 0;
  std::vector<int> y(n);
  for (std::uint64_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, i), 0x5f);
    std::uint64_t m1 = rng.below(s1);
    std::uint64_t m2 = rng.below(s2);
    for (int t = 0; t < n; ++t) y[t] = ch.sample_output(x1[m1][t], x2[m2][t], rng);
    if (decode_m1(y, m1 ^ m2) == m1) ++good;
  }
  rep.agreement = trials ? static_cast<double>(good) / trials : 0.0;
  rep.agreement_exact = false;
  rep.samples = trials;
  rep.s_in = std::max(0, k1 - k2);  // padded xor reveals the unpadded tail of M1
  rep.s_in_exact = true;
  return rep;
}

}  // namespace

SeSchemeReport source_emulation_sk(const MacChannel& ch, int n, std::pair<double, double> rate_pair,
                                   std::uint64_t seed, std::uint64_t trials) {
  if (n < 2) throw InvalidArgumentError("source_emulation_sk: n must be >= 2");
  if (rate_pair.first < 0.0 || rate_pair.second < 0.0)
    throw InvalidArgumentError("source_emulation_sk: negative rate");
  int k1 = static_cast<int>(std::floor(n * rate_pair.first + 0.5));
  int k2 = static_cast<int>(std::floor(n * rate_pair.second + 0.5));
  if (k1 < 1 || k2 < 1) throw InvalidArgumentError("source_emulation_sk: requested rate gives empty message");
  if (is_binary_adder(ch) && k1 == k2 && k1 < n) return se_adder_chain(ch, n, k1, seed, trials);
  return se_random_coding(ch, n, k1, k2, seed, trials);
}

// ---------------------------------------------------------------------------
// feedback pipeline, adder fast path
// ---------------------------------------------------------------------------

namespace {

struct SketchCounter {
  int bits;
  std::vector<std::uint64_t> counts;  // [sk * 2^bits + sf]
  std::uint64_t total = 0;

  explicit SketchCounter(int b) : bits(b), counts(static_cast<std::size_t>(1) << (2 * b), 0) {}

  void add(std::uint64_t sk, std::uint64_t sf) {
    std::uint64_t mask = (1ull << bits) - 1;
    counts[((sk & mask) << bits) | (sf & mask)]++;
    ++total;
  }

  // plug-in estimate of log2|sketch| - H(sketchK | sketchF)
  double estimate() const {
    if (total == 0) return 0.0;
    std::size_t m = static_cast<std::size_t>(1) << bits;
    double h_kf = 0.0, h_f = 0.0;
    std::vector<double> pf(m, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      double p = static_cast<double>(counts[i]) / static_cast<double>(total);
      h_kf -= xlog2x(p);
      pf[i & (m - 1)] += p;
    }
    for (double p : pf) h_f -= xlog2x(p);
    double s = bits - (h_kf - h_f);
    return s > 0.0 ? s : 0.0;
  }
};

struct AdderRun {
  // per block, k bits each
  std::vector<Bits> mh1, mt1, mh2, mt2;
  std::vector<BitVec> bins;       // per phase-1 slot
  BitVec pa_true;                 // true (mh1, mt1) content
  std::uint64_t f_sketch_acc = 0;
};

class AdderPipeline {
 public:
  AdderPipeline(const AdderFeedbackCode& code, const PipelineParams& pr)
      : code_(code), pr_(pr), k_(code.phase1_length()), n2_(code.phase2_length()), nc_(k_ + n2_), n_(pr.blocks) {
    // bin matrices and their factorizations are independent across slots
    sw_.resize(k_);
    int workers = std::max(1, std::min(pr.threads, 64));
    if (workers == 1 || k_ < 8) {
      for (int t = 0; t < k_; ++t)
        sw_[t] = std::make_unique<SwSlotCode>(2, n_, 2.0, pr_.dsw,
                                              derive_seed(pr_.seed, 1000 + static_cast<std::uint64_t>(t)));
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (int t = next.fetch_add(1); t < k_; t = next.fetch_add(1))
            sw_[t] = std::make_unique<SwSlotCode>(
                2, n_, 2.0, pr_.dsw, derive_seed(pr_.seed, 1000 + static_cast<std::uint64_t>(t)));
        });
      for (auto& th : pool) th.join();
    }
    mi2_ = 2.0 * adder_code_mi_bits(k_, code.slack_c());
    target_per_slot_ = mi2_ / nc_;
    double raw = static_cast<double>(nc_) * n_ * (target_per_slot_ - pr_.dpa);
    ell_ = std::max<long long>(0, static_cast<long long>(std::floor(raw)));
    ell_ = std::min<long long>(ell_, 2ll * k_ * n_);
    ext_ = std::make_unique<HashExtractor>(2 * k_ * n_, static_cast<int>(ell_), derive_seed(pr_.seed, 7));
  }

  int paired_slots() const { return nc_; }
  long long key_bits() const { return ell_; }
  double target_per_slot() const { return target_per_slot_; }
  double mi2() const { return mi2_; }
  double comm_bits_per_block() const {
    double s = 0.0;
    for (const auto& sw : sw_) s += sw->rows();
    return s / n_;
  }
  double leak_bits_per_block() const {
    double s = 0.0;
    for (const auto& sw : sw_) s += sw->leak_rank();
    return s / n_;
  }

  void simulate(std::uint64_t run_seed, AdderRun& run) const {
    Rng rng(run_seed, 0xfb);
    auto draw = [&](std::vector<Bits>& dst) {
      dst.assign(n_, Bits(k_));
      for (auto& blk : dst)
        for (auto& b : blk) b = rng.bit() ? 1 : 0;
    };
    draw(run.mh1);
    draw(run.mh2);
    draw(run.mt1);
    draw(run.mt2);
    process(run);
  }

  // bins and key content from already-set messages
  void process(AdderRun& run) const {
    run.bins.clear();
    run.bins.reserve(k_);
    run.f_sketch_acc = 0xa5a5a5a5ull;
    BitVec stats(2 * n_);
    for (int t = 0; t < k_; ++t) {
      for (int b = 0; b < n_; ++b) {
        stats.set(2 * b, (run.mh1[b][t] ^ run.mh2[b][t]) != 0);
        stats.set(2 * b + 1, (run.mt1[b][t] ^ run.mt2[b][t]) != 0);
      }
      BitVec f = sw_[t]->bin(stats);
      run.f_sketch_acc = fnv1a64(f.words().data(), f.words().size() * 8, run.f_sketch_acc);
      run.bins.push_back(std::move(f));
    }

    run.pa_true = pa_input(run.mh1, run.mt1);
  }

  BitVec pa_input(const std::vector<Bits>& mh1, const std::vector<Bits>& mt1) const {
    BitVec x(2 * k_ * n_);
    for (int b = 0; b < n_; ++b) {
      for (int t = 0; t < k_; ++t) {
        if (mh1[b][t]) x.set(b * 2 * k_ + t, true);
        if (mt1[b][t]) x.set(b * 2 * k_ + k_ + t, true);
      }
    }
    return x;
  }

  struct Recon {
    bool ok = true;
    BitVec pa;
  };

  // Input-terminal reconstruction. Decoding recovers the other user's bits;
  // terminal 1's key content is its own messages, terminal 2's is the
  // reconstruction of user 1's.
  Recon reconstruct(const AdderRun& run, int terminal, std::uint64_t& sw_failures) const {
    const auto& own_h = terminal == 1 ? run.mh1 : run.mh2;
    const auto& own_t = terminal == 1 ? run.mt1 : run.mt2;
    Recon rc;
    std::vector<Bits> oh(n_, Bits(k_)), ot(n_, Bits(k_));
    BitVec offset(2 * n_), u;
    for (int t = 0; t < k_; ++t) {
      for (int b = 0; b < n_; ++b) {
        offset.set(2 * b, own_h[b][t] != 0);
        offset.set(2 * b + 1, own_t[b][t] != 0);
      }
      auto outcome = sw_[t]->decode_offset(run.bins[t], offset, u);
      if (outcome != SwSlotCode::Outcome::kOk) {
        ++sw_failures;
        rc.ok = false;
      }
      for (int b = 0; b < n_; ++b) {
        oh[b][t] = u.get(2 * b) ? 1 : 0;
        ot[b][t] = u.get(2 * b + 1) ? 1 : 0;
      }
    }
    rc.pa = terminal == 1 ? pa_input(run.mh1, run.mt1) : pa_input(oh, ot);
    return rc;
  }

  // output-terminal decode from the channel outputs alone
  bool decode3(const AdderRun& run, BitVec& pa, std::uint64_t& overflows) const {
    std::vector<Bits> dh1(n_), dt1(n_);
    bool ok = true;
    for (int b = 0; b < n_; ++b) {
      // hat sub-block: phase-2 carries mh1's ambiguous bits
      ok &= decode_sub(run.mh1[b], run.mh2[b], dh1[b], overflows);
      // tilde sub-block runs with roles interchanged: phase-2 carries mt2's
      // ambiguous bits, and mt1 = y - mt2
      Bits dt2;
      ok &= decode_sub(run.mt2[b], run.mt1[b], dt2, overflows);
      dt1[b].assign(k_, 0);
      for (int t = 0; t < k_; ++t) {
        int y = run.mt1[b][t] + run.mt2[b][t];
        int v = y - dt2[t];
        dt1[b][t] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 1 ? 1 : v));
      }
    }
    pa = pa_input(dh1, dt1);
    return ok;
  }

 private:
  // decode the base-role-1 message of one sub-block from its outputs,
  // emulated directly from the true messages (the channel is deterministic)
  bool decode_sub(const Bits& role1, const Bits& role2, Bits& out, std::uint64_t& overflows) const {
    out.assign(k_, 0);
    Bits amb;
    std::vector<int> amb_pos;
    for (int t = 0; t < k_; ++t) {
      int y = role1[t] + role2[t];
      if (y == 1) {
        amb_pos.push_back(t);
        amb.push_back(role1[t]);
      } else {
        out[t] = static_cast<std::uint8_t>(y / 2);
      }
    }
    bool ok = true;
    if (static_cast<int>(amb.size()) > code_.capacity_bits()) {
      ++overflows;
      ok = false;
    }
    std::vector<int> trits = code_.pack_trits(amb);
    Bits rec;
    int j_use = std::min<int>(static_cast<int>(amb.size()), code_.capacity_bits());
    if (!code_.unpack_trits(trits, j_use, rec)) {
      rec.assign(j_use, 0);
      ok = false;
    }
    for (std::size_t i = 0; i < amb_pos.size(); ++i)
      out[amb_pos[i]] = i < rec.size() ? rec[i] : 0;
    return ok;
  }

 public:
  const AdderFeedbackCode& code_;
  PipelineParams pr_;
  int k_, n2_, nc_, n_;
  std::vector<std::unique_ptr<SwSlotCode>> sw_;
  double mi2_ = 0.0, target_per_slot_ = 0.0;
  long long ell_ = 0;
  std::unique_ptr<HashExtractor> ext_;
};

// message-bit column layout: per block [mh1(k), mt1(k), mh2(k), mt2(k)]
int msg_col_of(int k, int block, int cat, int t) { return block * 4 * k + cat * k + t; }

BitMat build_f_map(const AdderPipeline& pl) {
  const int k = pl.k_, n = pl.n_;
  int f_rows = 0;
  for (const auto& sw : pl.sw_) f_rows += sw->rows();
  BitMat fmap(f_rows, 4 * k * n);
  int row0 = 0;
  for (int t = 0; t < k; ++t) {
    const BitMat& a = pl.sw_[t]->matrix();
    for (int r = 0; r < a.rows(); ++r) {
      for (int c = 0; c < a.cols(); ++c) {
        if (!a.get(r, c)) continue;
        int b = c / 2;
        if (c % 2 == 0) {  // hat parity: mh1[t] xor mh2[t]
          fmap.set(row0 + r, msg_col_of(k, b, 0, t), true);
          fmap.set(row0 + r, msg_col_of(k, b, 2, t), true);
        } else {  // tilde parity
          fmap.set(row0 + r, msg_col_of(k, b, 1, t), true);
          fmap.set(row0 + r, msg_col_of(k, b, 3, t), true);
        }
      }
    }
    row0 += a.rows();
  }
  return fmap;
}

BitMat build_k_map(const AdderPipeline& pl) {
  const int k = pl.k_, n = pl.n_;
  BitMat g = pl.ext_->as_matrix();  // ell x 2kN over the pa input
  BitMat km(static_cast<int>(pl.ell_), 4 * k * n);
  for (int i = 0; i < static_cast<int>(pl.ell_); ++i) {
    for (int j = 0; j < 2 * k * n; ++j) {
      if (!g.get(i, j)) continue;
      int b = j / (2 * k), r = j % (2 * k);
      km.set(i, msg_col_of(k, b, r < k ? 0 : 1, r % k), true);
    }
  }
  return km;
}

// exact s_in for the linear (message bits -> K, F) maps via rank arithmetic:
// given F = f the messages are uniform on a coset of ker(F), so
// H(K | F = f) = rank of the key map restricted to that kernel.
double adder_exact_s_in(const AdderPipeline& pl) {
  BitMat fmap = build_f_map(pl);
  std::vector<BitVec> kernel = nullspace_basis(fmap);
  if (kernel.empty()) return static_cast<double>(pl.ell_);
  BitMat km = build_k_map(pl);
  BitMat gb(static_cast<int>(pl.ell_), static_cast<int>(kernel.size()));
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    BitVec img = km.mul(kernel[j]);
    for (int i = 0; i < static_cast<int>(pl.ell_); ++i)
      if (img.get(i)) gb.set(i, static_cast<int>(j), true);
  }
  return static_cast<double>(pl.ell_) - gb.rank();
}

PipelineReport run_adder_pipeline(const AdderFeedbackCode& code, const PipelineParams& pr) {
  AdderPipeline pl(code, pr);
  PipelineReport rep;
  rep.code = "symmetrized(" + code.name() + ")";
  rep.paired_slots = pl.nc_;
  rep.channel_uses_per_block = 2 * pl.nc_;
  rep.blocks = pr.blocks;
  rep.key_bits = pl.key_bits();
  rep.target_rate_per_slot = pl.target_per_slot();
  rep.analytic_key_rate = pl.mi2() / (2.0 * pl.nc_);
  rep.key_rate = static_cast<double>(pl.key_bits()) / (2.0 * pl.nc_ * pr.blocks);
  rep.comm_bits_per_block = pl.comm_bits_per_block();
  rep.comm_rate = rep.comm_bits_per_block / (2.0 * pl.nc_);

  std::uint64_t sw_failures = 0, overflows = 0, key_mismatch = 0;
  std::uint64_t agree = 0;
  std::string key_prefix;
  auto agreement_trial = [&pl](int trial, std::uint64_t seed, std::uint64_t& fails, std::uint64_t& ovfl,
                               std::string* prefix) {
    AdderRun run;
    pl.simulate(derive_seed(seed, 50000 + static_cast<std::uint64_t>(trial)), run);
    BitVec k_ref = pl.ext_->apply(run.pa_true);
    if (prefix != nullptr) *prefix = bits_prefix_hex(k_ref, 64);
    auto r1 = pl.reconstruct(run, 1, fails);
    auto r2 = pl.reconstruct(run, 2, fails);
    // with a failed SW decode a user selects wrong phase-2 inputs; count the
    // whole trial as disagreement rather than modeling the divergence
    if (!r1.ok || !r2.ok) return false;
    BitVec pa3;
    pl.decode3(run, pa3, ovfl);
    BitVec k1 = pl.ext_->apply(r1.pa);
    BitVec k2 = pl.ext_->apply(r2.pa);
    BitVec k3 = pl.ext_->apply(pa3);
    return k1 == k_ref && k2 == k_ref && k3 == k_ref;
  };
  int workers = std::max(1, std::min(pr.threads, 16));
  if (workers == 1 || pr.agreement_trials < 4) {
    for (int trial = 0; trial < pr.agreement_trials; ++trial) {
      bool ok = agreement_trial(trial, pr.seed, sw_failures, overflows, trial == 0 ? &key_prefix : nullptr);
      ok ? ++agree : ++key_mismatch;
    }
  } else {
    std::vector<std::uint64_t> fails(workers, 0), ovfl(workers, 0), ag(workers, 0), mis(workers, 0);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int trial = next.fetch_add(1); trial < pr.agreement_trials; trial = next.fetch_add(1)) {
          bool ok = agreement_trial(trial, pr.seed, fails[w], ovfl[w], trial == 0 ? &key_prefix : nullptr);
          ok ? ++ag[w] : ++mis[w];
        }
      });
    for (auto& th : pool) th.join();
    for (int w = 0; w < workers; ++w) {
      sw_failures += fails[w];
      overflows += ovfl[w];
      agree += ag[w];
      key_mismatch += mis[w];
    }
  }
  rep.key_prefix_hex = key_prefix;
  rep.agreement = pr.agreement_trials ? static_cast<double>(agree) / pr.agreement_trials : 0.0;
  rep.agreement_samples = pr.agreement_trials;

  const long long total_uses = 2ll * pl.nc_ * pr.blocks;
  if (4ll * pl.k_ * pr.blocks <= static_cast<long long>(pr.exact_linear_bit_limit)) {
    rep.s_in_total = adder_exact_s_in(pl);
    rep.s_in_mode = "exact";
  } else {
    // entropy budget: H(Y) per block is exact for this code and the bins of
    // uniform statistics leak exactly their rank
    double h_block = pl.mi2() + 2.0 * pl.k_;
    double leak_total = 0.0;
    for (const auto& sw : pl.sw_) leak_total += sw->leak_rank();
    double budget = static_cast<double>(pl.key_bits()) - (pr.blocks * h_block - leak_total);
    if (budget < 0.0) budget = 0.0;

    SketchCounter sk(pr.sketch_bits);
    auto sketch_trial = [&pl, &pr](int i, SketchCounter& dest) {
      AdderRun run;
      pl.simulate(derive_seed(pr.seed, 90000 + static_cast<std::uint64_t>(i)), run);
      BitVec pref =
          pl.ext_->apply_prefix(run.pa_true, std::min<int>(pr.sketch_bits, static_cast<int>(pl.ell_)));
      std::uint64_t skv = 0;
      for (int b = 0; b < pref.size(); ++b) skv = (skv << 1) | (pref.get(b) ? 1 : 0);
      dest.add(skv, run.f_sketch_acc);
    };
    if (workers == 1 || pr.sin_sketch_trials < 8) {
      for (int i = 0; i < pr.sin_sketch_trials; ++i) sketch_trial(i, sk);
    } else {
      std::vector<SketchCounter> parts(workers, SketchCounter(pr.sketch_bits));
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (int i = next.fetch_add(1); i < pr.sin_sketch_trials; i = next.fetch_add(1))
            sketch_trial(i, parts[w]);
        });
      for (auto& th : pool) th.join();
      for (const auto& part : parts) {
        for (std::size_t c = 0; c < part.counts.size(); ++c) sk.counts[c] += part.counts[c];
        sk.total += part.total;
      }
    }
    rep.s_in_total = std::max(budget, sk.estimate());
    rep.s_in_mode = "estimate";
  }
  rep.s_in_per_symbol = total_uses ? rep.s_in_total / static_cast<double>(total_uses) : 0.0;

  std::uint64_t sw_attempts = 2ull * pl.k_ * pr.agreement_trials;
  rep.stage_errors.push_back({"sw_decode", sw_failures, sw_attempts});
  rep.stage_errors.push_back({"phase2_overflow", overflows, 2ull * pr.blocks * pr.agreement_trials});
  rep.stage_errors.push_back({"key_mismatch", key_mismatch, static_cast<std::uint64_t>(pr.agreement_trials)});
  return rep;
}

// ---------------------------------------------------------------------------
// feedback pipeline, generic enumerable-code path
// ---------------------------------------------------------------------------

using CandList = std::vector<std::pair<double, std::vector<int>>>;

struct GenericModel {
  int nc = 0;        // paired slots
  int bps = 0;       // bits per output symbol
  int stat_bits = 0; // per block
  double h_y = 0.0;  // per-block output entropy
  std::vector<double> h_slot;   // H(Y_t | M1, Y^{t-1})
  std::vector<int> uncond_dim;  // affine dimension of the slot's output support
  // conditional candidates per slot: key = (terminal, message bits, y prefix)
  std::vector<std::map<std::string, CandList>> cond;
  // per terminal: shared direction space of every conditional support of the
  // slot, when the supports are uniform affine sets (enables the linear
  // decoder); indexed [slot][terminal-1]
  std::vector<std::array<std::optional<BitMat>, 2>> affine_dirs;
  double symmetry_gap = 0.0;
};

std::string cond_key(int terminal, const Bits& m, const std::vector<int>& y, int upto) {
  std::string k;
  k.push_back(static_cast<char>('0' + terminal));
  k.append(m.begin(), m.end());
  k.push_back('|');
  for (int i = 0; i < upto; ++i) k.push_back(static_cast<char>(1 + y[i]));
  return k;
}

BitVec stat_of_pair(int bps, const std::vector<int>& pair) {
  BitVec s(2 * bps);
  for (int half = 0; half < 2; ++half)
    for (int b = 0; b < bps; ++b)
      if ((pair[half] >> b) & 1) s.set(half * bps + b, true);
  return s;
}

// If every candidate list is a uniform affine set with one common direction
// space, return its basis as columns.
std::optional<BitMat> detect_affine(int stat_bits, const std::vector<const CandList*>& lists) {
  std::vector<BitVec> basis;  // greedy xor basis over all difference vectors
  auto reduce = [&](BitVec v) {
    for (const auto& b : basis) {
      int top = -1;
      for (int i = b.size() - 1; i >= 0; --i)
        if (b.get(i)) {
          top = i;
          break;
        }
      if (top >= 0 && v.get(top)) v ^= b;
    }
    return v;
  };
  for (const CandList* lst : lists) {
    std::size_t sz = lst->size();
    if (sz == 0 || (sz & (sz - 1)) != 0) return std::nullopt;  // need a power of two
    double p0 = (*lst)[0].first;
    for (const auto& [p, pair] : *lst)
      if (std::fabs(p - p0) > 1e-9) return std::nullopt;  // need uniform probabilities
  }
  for (const CandList* lst : lists) {
    // bps recovered from stat_bits
    int bps = stat_bits / 2;
    BitVec base = stat_of_pair(bps, (*lst)[0].second);
    for (std::size_t i = 1; i < lst->size(); ++i) {
      BitVec d = stat_of_pair(bps, (*lst)[i].second);
      d ^= base;
      BitVec r = reduce(d);
      if (r.any()) basis.push_back(std::move(r));
    }
  }
  // every list must be a full coset of the common span
  std::size_t span = static_cast<std::size_t>(1) << basis.size();
  for (const CandList* lst : lists) {
    if (lst->size() > span) return std::nullopt;
  }
  // lists may be cosets of subspaces of the span only if all lists have the
  // span's size; otherwise the linear decoder could not pin the solution
  for (const CandList* lst : lists)
    if (lst->size() != span) return std::nullopt;
  BitMat dirs(stat_bits, static_cast<int>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (int i = 0; i < stat_bits; ++i)
      if (basis[j].get(i)) dirs.set(i, static_cast<int>(j), true);
  return dirs;
}

GenericModel build_generic_model(const MacChannel& ch, const FeedbackCode& sym) {
  GenericModel gm;
  if (sym.block_length() % 2 != 0) throw InternalError("generic pipeline: odd symmetrized length");
  gm.nc = sym.block_length() / 2;
  gm.bps = 1;
  while ((1 << gm.bps) < ch.out_size()) ++gm.bps;
  gm.stat_bits = 2 * gm.bps;

  auto paths = enumerate_code_paths(ch, sym, 1 << 18);
  EntropyProfile prof = conditional_entropy_profile(paths, 2);
  gm.h_slot = prof.given_m1;
  for (std::size_t t = 0; t < prof.given_m1.size(); ++t)
    gm.symmetry_gap = std::max(gm.symmetry_gap, std::fabs(prof.given_m1[t] - prof.given_m2[t]));
  if (gm.symmetry_gap > 1e-6)
    throw InternalError("generic pipeline: symmetrized code entropy identity violated");

  std::map<std::string, double> ydist;
  for (const auto& p : paths) {
    std::string yk(p.y.begin(), p.y.end());
    ydist[yk] += p.prob;
  }
  for (auto& [k, v] : ydist) gm.h_y -= xlog2x(v);

  gm.cond.resize(gm.nc);
  std::vector<std::map<std::string, double>> uncond(gm.nc);
  std::map<std::string, std::map<std::string, double>> acc;
  for (const auto& p : paths) {
    for (int t = 0; t < gm.nc; ++t) {
      std::vector<int> pair{p.y[2 * t], p.y[2 * t + 1]};
      std::string pk(pair.begin(), pair.end());
      acc[std::to_string(t) + "#" + cond_key(1, p.m1, p.y, 2 * t)][pk] += p.prob;
      acc[std::to_string(t) + "#" + cond_key(2, p.m2, p.y, 2 * t)][pk] += p.prob;
      uncond[t][pk] += p.prob;
    }
  }
  for (auto& [key, dist] : acc) {
    std::size_t hash_pos = key.find('#');
    int t = std::stoi(key.substr(0, hash_pos));
    double tot = 0.0;
    for (auto& [pk, v] : dist) tot += v;
    auto& lst = gm.cond[t][key.substr(hash_pos + 1)];
    for (auto& [pk, v] : dist)
      lst.emplace_back(v / tot, std::vector<int>{static_cast<int>(pk[0]), static_cast<int>(pk[1])});
  }

  gm.affine_dirs.resize(gm.nc);
  gm.uncond_dim.resize(gm.nc);
  for (int t = 0; t < gm.nc; ++t) {
    for (int terminal = 1; terminal <= 2; ++terminal) {
      std::vector<const CandList*> lists;
      for (const auto& [key, lst] : gm.cond[t])
        if (key[0] == static_cast<char>('0' + terminal)) lists.push_back(&lst);
      gm.affine_dirs[t][terminal - 1] = detect_affine(gm.stat_bits, lists);
    }
    // affine dimension of the unconditional support, used to cap the leak
    CandList ulist;
    for (auto& [pk, v] : uncond[t])
      ulist.emplace_back(1.0, std::vector<int>{static_cast<int>(pk[0]), static_cast<int>(pk[1])});
    std::vector<const CandList*> ulists{&ulist};
    auto udirs = detect_affine(gm.stat_bits, ulists);
    gm.uncond_dim[t] = udirs.has_value() ? udirs->cols() : gm.stat_bits;
  }
  return gm;
}

PipelineReport run_generic_pipeline(const MacChannel& ch, const FeedbackCode& base,
                                    std::shared_ptr<const FeedbackCode> sym, const PipelineParams& pr) {
  (void)base;
  GenericModel gm = build_generic_model(ch, *sym);
  const int n = pr.blocks;
  const int kb = sym->message_bits();

  std::vector<SwSlotCode> sw;
  sw.reserve(gm.nc);
  for (int t = 0; t < gm.nc; ++t)
    sw.emplace_back(gm.stat_bits, n, gm.h_slot[t], pr.dsw,
                    derive_seed(pr.seed, 1000 + static_cast<std::uint64_t>(t)));

  // linear decoders over the per-slot, per-terminal direction spaces
  std::vector<std::array<std::unique_ptr<Gf2Solver>, 2>> slot_solver(gm.nc);
  std::vector<std::array<BitMat, 2>> slot_dirs(gm.nc);
  for (int t = 0; t < gm.nc; ++t) {
    if (sw[t].rows() == 0) continue;
    for (int side = 0; side < 2; ++side) {
      if (!gm.affine_dirs[t][side].has_value()) continue;
      const BitMat& dirs = *gm.affine_dirs[t][side];
      if (dirs.cols() == 0) continue;  // deterministic given side info
      BitMat big(gm.stat_bits * n, dirs.cols() * n);
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < gm.stat_bits; ++i)
          for (int j = 0; j < dirs.cols(); ++j)
            if (dirs.get(i, j)) big.set(b * gm.stat_bits + i, b * dirs.cols() + j, true);
      slot_dirs[t][side] = big;
      slot_solver[t][side] = std::make_unique<Gf2Solver>(sw[t].matrix().mul(big));
    }
  }

  double h_y_given_m1 = 0.0;
  for (double h : gm.h_slot) h_y_given_m1 += h;
  double mi = gm.h_y - h_y_given_m1;
  double target = mi / gm.nc;
  long long ell = std::max<long long>(
      0, static_cast<long long>(std::floor(static_cast<double>(gm.nc) * n * (target - pr.dpa))));
  const int pa_bits = gm.stat_bits * gm.nc * n;
  ell = std::min<long long>(ell, pa_bits);
  HashExtractor ext(pa_bits, static_cast<int>(ell), derive_seed(pr.seed, 7));

  PipelineReport rep;
  rep.code = sym->name();
  rep.paired_slots = gm.nc;
  rep.channel_uses_per_block = 2 * gm.nc;
  rep.blocks = n;
  rep.key_bits = ell;
  rep.target_rate_per_slot = target;
  rep.analytic_key_rate = mi / (2.0 * gm.nc);
  rep.key_rate = static_cast<double>(ell) / (2.0 * gm.nc * n);
  double comm_bits = 0.0;
  for (const auto& s : sw) comm_bits += s.rows();
  rep.comm_bits_per_block = comm_bits / n;
  rep.comm_rate = comm_bits / (2.0 * gm.nc * n);

  std::uint64_t sw_failures = 0, cond_misses = 0, agree = 0;
  SketchCounter sketch(pr.sketch_bits);

  auto pa_encode = [&](const std::vector<std::vector<int>>& ys) {
    BitVec x(pa_bits);
    for (int b = 0; b < n; ++b)
      for (int t = 0; t < gm.nc; ++t)
        for (int half = 0; half < 2; ++half)
          for (int bit = 0; bit < gm.bps; ++bit)
            if ((ys[b][2 * t + half] >> bit) & 1)
              x.set((b * gm.nc + t) * gm.stat_bits + half * gm.bps + bit, true);
    return x;
  };

  int total_trials = pr.agreement_trials + pr.sin_sketch_trials;
  for (int trial = 0; trial < total_trials; ++trial) {
    bool full = trial < pr.agreement_trials;
    Rng rng(derive_seed(pr.seed, 70000 + static_cast<std::uint64_t>(trial)), 0x6e);
    std::vector<Bits> m1(n, Bits(kb)), m2(n, Bits(kb));
    std::vector<std::vector<int>> ys(n, std::vector<int>(2 * gm.nc));
    for (int b = 0; b < n; ++b) {
      for (auto& v : m1[b]) v = rng.bit() ? 1 : 0;
      for (auto& v : m2[b]) v = rng.bit() ? 1 : 0;
      auto e1 = sym->make_encoder(1, m1[b]);
      auto e2 = sym->make_encoder(2, m2[b]);
      std::vector<int> y;
      for (int t = 0; t < 2 * gm.nc; ++t) {
        int x1 = e1->next_input(y);
        int x2 = e2->next_input(y);
        y.push_back(ch.sample_output(x1, x2, rng));
      }
      ys[b] = y;
    }

    // bins from the true outputs
    std::vector<BitVec> bins;
    std::uint64_t facc = 0xa5a5a5a5ull;
    BitVec stats(gm.stat_bits * n);
    for (int t = 0; t < gm.nc; ++t) {
      for (int b = 0; b < n; ++b) {
        BitVec s = stat_of_pair(gm.bps, {ys[b][2 * t], ys[b][2 * t + 1]});
        for (int i = 0; i < gm.stat_bits; ++i) stats.set(b * gm.stat_bits + i, s.get(i));
      }
      BitVec f = sw[t].bin(stats);
      facc = fnv1a64(f.words().data(), f.words().size() * 8, facc);
      bins.push_back(std::move(f));
    }

    BitVec pa_true = pa_encode(ys);
    if (!full) {
      BitVec pref = ext.apply_prefix(pa_true, std::min<int>(pr.sketch_bits, static_cast<int>(ell)));
      std::uint64_t skv = 0;
      for (int b = 0; b < pref.size(); ++b) skv = (skv << 1) | (pref.get(b) ? 1 : 0);
      sketch.add(skv, facc);
      continue;
    }

    // input-terminal reconstructions, slot by slot
    auto reconstruct = [&](int terminal) {
      std::vector<std::vector<int>> rec(n, std::vector<int>(2 * gm.nc, 0));
      for (int t = 0; t < gm.nc; ++t) {
        std::vector<const CandList*> block_cands(n, nullptr);
        for (int b = 0; b < n; ++b) {
          const Bits& m = terminal == 1 ? m1[b] : m2[b];
          auto it = gm.cond[t].find(cond_key(terminal, m, rec[b], 2 * t));
          if (it == gm.cond[t].end())
            ++cond_misses;  // reconstruction drifted off-support
          else
            block_cands[b] = &it->second;
        }

        auto take_pair = [&](int b, const std::vector<int>& pair) {
          rec[b][2 * t] = pair[0];
          rec[b][2 * t + 1] = pair[1];
        };

        bool decoded = false;
        if (slot_solver[t][terminal - 1] != nullptr) {
          bool have_all = true;
          for (int b = 0; b < n; ++b) have_all = have_all && block_cands[b] != nullptr;
          bool solved = false;
          if (have_all) {
            // base point per block, then solve for the affine coordinates
            BitVec bases(gm.stat_bits * n);
            for (int b = 0; b < n; ++b) {
              BitVec s0 = stat_of_pair(gm.bps, (*block_cands[b])[0].second);
              for (int i = 0; i < gm.stat_bits; ++i) bases.set(b * gm.stat_bits + i, s0.get(i));
            }
            BitVec rhs = bins[t];
            rhs ^= sw[t].matrix().mul(bases);
            BitVec u;
            if (slot_solver[t][terminal - 1]->solve(rhs, u) == Gf2Solver::Status::kUnique) {
              BitVec stats_rec = slot_dirs[t][terminal - 1].mul(u);
              stats_rec ^= bases;
              bool all_found = true;
              for (int b = 0; b < n && all_found; ++b) {
                bool found = false;
                for (const auto& [p, pair] : *block_cands[b]) {
                  BitVec s = stat_of_pair(gm.bps, pair);
                  bool eq = true;
                  for (int i = 0; i < gm.stat_bits && eq; ++i)
                    eq = s.get(i) == stats_rec.get(b * gm.stat_bits + i);
                  if (eq) {
                    take_pair(b, pair);
                    found = true;
                    break;
                  }
                }
                all_found = found;
              }
              solved = all_found;
            }
          }
          if (!solved) {
            ++sw_failures;
            for (int b = 0; b < n; ++b)
              if (block_cands[b] != nullptr) take_pair(b, (*block_cands[b])[0].second);
          }
          decoded = true;
        }
        if (!decoded) {
          std::vector<std::vector<std::pair<double, BitVec>>> cands(n);
          for (int b = 0; b < n; ++b) {
            if (block_cands[b] == nullptr) {
              cands[b].emplace_back(1.0, BitVec(gm.stat_bits));
              continue;
            }
            for (const auto& [p, pair] : *block_cands[b])
              cands[b].emplace_back(p, stat_of_pair(gm.bps, pair));
          }
          auto pick = sw[t].decode_exhaustive(bins[t], cands);
          if (!pick.has_value()) {
            ++sw_failures;
            pick = std::vector<int>(n, 0);
          }
          for (int b = 0; b < n; ++b) {
            if (block_cands[b] == nullptr) continue;
            take_pair(b, (*block_cands[b])[std::min<std::size_t>((*pick)[b],
                                                                 block_cands[b]->size() - 1)]
                             .second);
          }
        }
      }
      return pa_encode(rec);
    };

    BitVec k_ref = ext.apply(pa_true);
    BitVec k1 = ext.apply(reconstruct(1));
    BitVec k2 = ext.apply(reconstruct(2));
    // terminal 3 observes the outputs directly and holds the reference key
    if (k1 == k_ref && k2 == k_ref) ++agree;
    if (trial == 0) rep.key_prefix_hex = bits_prefix_hex(k_ref, 64);
  }

  rep.agreement = pr.agreement_trials ? static_cast<double>(agree) / pr.agreement_trials : 0.0;
  rep.agreement_samples = pr.agreement_trials;

  // entropy budget with the leak capped by each slot's affine content
  double leak_total = 0.0;
  for (int t = 0; t < gm.nc; ++t)
    leak_total += std::min<double>(sw[t].rows(), static_cast<double>(gm.uncond_dim[t]) * n);
  double budget = static_cast<double>(ell) - (static_cast<double>(n) * gm.h_y - leak_total);
  if (budget < 0.0) budget = 0.0;
  rep.s_in_total = std::max(budget, sketch.estimate());
  rep.s_in_mode = "estimate";
  rep.s_in_per_symbol = rep.s_in_total / (2.0 * gm.nc * n);

  rep.stage_errors.push_back({"sw_decode", sw_failures, 2ull * gm.nc * pr.agreement_trials});
  rep.stage_errors.push_back({"cond_support_miss", cond_misses, 0});
  return rep;
}

}  // namespace

PipelineReport feedback_sk_scheme(const MacChannel& ch, std::shared_ptr<const FeedbackCode> base,
                                  const PipelineParams& params) {
  if (params.blocks < 1) throw InvalidArgumentError("feedback_sk_scheme: blocks must be >= 1");
  if (params.dsw < 0.0 || params.dpa < 0.0) throw InvalidArgumentError("feedback_sk_scheme: negative slack");
  std::shared_ptr<const FeedbackCode> sym = symmetrize_code(ch, base);
  if (auto adder = dynamic_cast<const AdderFeedbackCode*>(base.get())) {
    if (!is_binary_adder(ch))
      throw InvalidArgumentError("feedback_sk_scheme: adder code requires the binary adder MAC");
    return run_adder_pipeline(*adder, params);
  }
  return run_generic_pipeline(ch, *base, sym, params);
}

double symmetry_entropy_gap(const MacChannel& ch, const FeedbackCode& symmetrized) {
  auto paths = enumerate_code_paths(ch, symmetrized, 1 << 18);
  EntropyProfile prof = conditional_entropy_profile(paths, 2);
  double gap = 0.0;
  for (std::size_t t = 0; t < prof.given_m1.size(); ++t)
    gap = std::max(gap, std::fabs(prof.given_m1[t] - prof.given_m2[t]));
  return gap;
}

AdderPipelineProbe adder_pipeline_probe(const AdderFeedbackCode& code, const PipelineParams& params) {
  AdderPipeline pl(code, params);
  AdderPipelineProbe probe;
  probe.f_map = build_f_map(pl);
  probe.k_map = build_k_map(pl);
  probe.msg_bits = 4 * pl.k_ * pl.n_;
  probe.key_bits = pl.ell_;
  return probe;
}

std::pair<BitVec, BitVec> adder_pipeline_forward(const AdderFeedbackCode& code,
                                                 const PipelineParams& params, const BitVec& msg) {
  AdderPipeline pl(code, params);
  const int k = pl.k_, n = pl.n_;
  if (msg.size() != 4 * k * n) throw InvalidArgumentError("adder_pipeline_forward: message size mismatch");
  AdderRun run;
  auto fill = [&](std::vector<Bits>& dst, int cat) {
    dst.assign(n, Bits(k));
    for (int b = 0; b < n; ++b)
      for (int t = 0; t < k; ++t) dst[b][t] = msg.get(msg_col_of(k, b, cat, t)) ? 1 : 0;
  };
  fill(run.mh1, 0);
  fill(run.mt1, 1);
  fill(run.mh2, 2);
  fill(run.mt2, 3);
  pl.process(run);
  int f_rows = 0;
  for (const auto& sw : pl.sw_) f_rows += sw->rows();
  BitVec f_all(f_rows);
  int at = 0;
  for (const auto& bin : run.bins) {
    for (int i = 0; i < bin.size(); ++i)
      if (bin.get(i)) f_all.set(at + i, true);
    at += bin.size();
  }
  return {f_all, pl.ext_->apply(run.pa_true)};
}

}  // namespace skmac
