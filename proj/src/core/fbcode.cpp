#include "core/fbcode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace skmac {

namespace {

const double kLog2_3 = std::log2(3.0);

// little-endian 32-bit limb big integer, just enough for base conversion
struct BigUint {
  std::vector<std::uint32_t> limb;

  void from_bits_msb(const Bits& s) {
    limb.assign(s.size() / 32 + 1, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      // s[0] is the most significant bit
      std::size_t pos = s.size() - 1 - i;
      if (s[i]) limb[pos >> 5] |= (1u << (pos & 31));
    }
  }
  std::uint32_t div3() {  // returns remainder
    std::uint64_t rem = 0;
    for (std::size_t i = limb.size(); i-- > 0;) {
      std::uint64_t cur = (rem << 32) | limb[i];
      limb[i] = static_cast<std::uint32_t>(cur / 3);
      rem = cur % 3;
    }
    return static_cast<std::uint32_t>(rem);
  }
  void mul3_add(std::uint32_t d) {
    std::uint64_t carry = d;
    for (auto& l : limb) {
      std::uint64_t cur = static_cast<std::uint64_t>(l) * 3 + carry;
      l = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) limb.push_back(static_cast<std::uint32_t>(carry));
  }
  bool bit(std::size_t i) const {
    std::size_t w = i >> 5;
    return w < limb.size() && ((limb[w] >> (i & 31)) & 1);
  }
  bool fits_bits(std::size_t nbits) const {
    for (std::size_t w = 0; w < limb.size(); ++w) {
      if (limb[w] == 0) continue;
      for (int b = 31; b >= 0; --b)
        if ((limb[w] >> b) & 1) {
          std::size_t top = (w << 5) + static_cast<std::size_t>(b);
          if (top >= nbits) return false;
          b = -1;  // only the top bit of this limb matters once found
        }
    }
    return true;
  }
};

}  // namespace

int adder_phase2_uses(int k, double slack_c) {
  if (k < 1) throw InvalidArgumentError("adder code: k must be >= 1");
  if (slack_c < 0.0) throw InvalidArgumentError("adder code: slack must be >= 0");
  double budget_bits = std::ceil(k / 2.0 + slack_c * std::sqrt(static_cast<double>(k)));
  return static_cast<int>(std::ceil(budget_bits / kLog2_3 - 1e-12));
}

double adder_rate_analytic(int k, double slack_c) {
  return static_cast<double>(k) / (k + adder_phase2_uses(k, slack_c));
}

double adder_code_mi_bits(int k, double slack_c) {
  int n2 = adder_phase2_uses(k, slack_c);
  int j_max = static_cast<int>(std::floor(n2 * kLog2_3 + 1e-9));
  // I = H(Y) - H(Y|M1) = 0.5 k + E[min(J, j_max)] with J ~ Bin(k, 1/2)
  double tail = 0.0;  // E[(J - j_max)^+]
  if (j_max < k) {
    double log_half_k = -static_cast<double>(k) * std::log(2.0);
    for (int j = j_max + 1; j <= k; ++j) {
      double logp = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) + log_half_k;
      tail += std::exp(logp) * (j - j_max);
    }
  }
  return 0.5 * k + (0.5 * k - tail);
}

double adder_overflow_bound(double slack_c) { return 2.0 * std::exp(-2.0 * slack_c * slack_c); }

long long adder_k0_above_rstar(double slack_c, long long k_limit) {
  long long k0 = -1;
  for (long long k = k_limit; k >= 1; --k) {
    if (adder_rate_analytic(static_cast<int>(k), slack_c) > 0.75)
      k0 = k;
    else
      break;
  }
  return k0;
}

AdderFeedbackCode::AdderFeedbackCode(int k, double slack_c) : k_(k), slack_c_(slack_c) {
  n2_ = adder_phase2_uses(k, slack_c);
  j_max_ = static_cast<int>(std::floor(n2_ * kLog2_3 + 1e-9));
}

std::vector<int> AdderFeedbackCode::pack_trits(const Bits& s) const {
  Bits use = s;
  if (static_cast<int>(use.size()) > j_max_) use.resize(j_max_);  // overflow truncation
  BigUint v;
  v.from_bits_msb(use);
  std::vector<int> trits(n2_);
  for (int j = 0; j < n2_; ++j) trits[j] = static_cast<int>(v.div3());
  return trits;
}

bool AdderFeedbackCode::unpack_trits(const std::vector<int>& trits, int j, Bits& out) const {
  BigUint v;
  v.limb.assign(1, 0);
  for (std::size_t i = trits.size(); i-- > 0;) {
    if (trits[i] < 0 || trits[i] > 2) return false;
    v.mul3_add(static_cast<std::uint32_t>(trits[i]));
  }
  if (!v.fits_bits(static_cast<std::size_t>(j))) return false;
  out.assign(j, 0);
  for (int i = 0; i < j; ++i) out[i] = v.bit(static_cast<std::size_t>(j - 1 - i)) ? 1 : 0;
  return true;
}

namespace {

class AdderEncoder : public UserEncoder {
 public:
  AdderEncoder(const AdderFeedbackCode& code, int user, Bits msg)
      : code_(code), user_(user), msg_(std::move(msg)) {}

  int next_input(const std::vector<int>& y) override {
    int t = static_cast<int>(y.size());
    int k = code_.phase1_length();
    if (t < k) return msg_[t];
    if (trits_.empty()) prepare(y);
    int d = trits_[t - k];
    return user_ == 1 ? (d == 2 ? 1 : 0) : (d >= 1 ? 1 : 0);
  }

 private:
  void prepare(const std::vector<int>& y) {
    int k = code_.phase1_length();
    Bits s;
    for (int t = 0; t < k; ++t) {
      if (y[t] == 1) {
        int other = y[t] - msg_[t];
        int m1_bit = (user_ == 1) ? msg_[t] : other;
        s.push_back(static_cast<std::uint8_t>(m1_bit));
      }
    }
    trits_ = code_.pack_trits(s);
  }

  const AdderFeedbackCode& code_;
  int user_;
  Bits msg_;
  std::vector<int> trits_;
};

}  // namespace

std::unique_ptr<UserEncoder> AdderFeedbackCode::make_encoder(int user, const Bits& msg) const {
  if (user != 1 && user != 2) throw InvalidArgumentError("make_encoder: user must be 1 or 2");
  if (static_cast<int>(msg.size()) != k_) throw InvalidArgumentError("make_encoder: message size mismatch");
  return std::make_unique<AdderEncoder>(*this, user, msg);
}

DecodedPair AdderFeedbackCode::decode(const std::vector<int>& y) const {
  if (static_cast<int>(y.size()) != block_length()) throw InvalidArgumentError("decode: length mismatch");
  DecodedPair out;
  out.m1.assign(k_, 0);
  out.m2.assign(k_, 0);
  std::vector<int> ambiguous;
  for (int t = 0; t < k_; ++t) {
    if (y[t] == 0) {
      out.m1[t] = out.m2[t] = 0;
    } else if (y[t] == 2) {
      out.m1[t] = out.m2[t] = 1;
    } else {
      ambiguous.push_back(t);
    }
  }
  int j = static_cast<int>(ambiguous.size());
  int j_use = std::min(j, j_max_);
  if (j > j_max_) out.declared_failure = true;
  std::vector<int> trits(y.begin() + k_, y.end());
  Bits s;
  if (!unpack_trits(trits, j_use, s)) {
    out.declared_failure = true;
    s.assign(j_use, 0);
  }
  for (int i = 0; i < j; ++i) {
    int bit = (i < j_use) ? s[i] : 0;
    out.m1[ambiguous[i]] = static_cast<std::uint8_t>(bit);
    out.m2[ambiguous[i]] = static_cast<std::uint8_t>(1 - bit);
  }
  return out;
}

TdmaIdentityCode::TdmaIdentityCode(int k, int out_alphabet) : k_(k), out_(out_alphabet) {
  if (k < 1) throw InvalidArgumentError("TdmaIdentityCode: k must be >= 1");
  if (out_ < 2) throw InvalidArgumentError("TdmaIdentityCode: output alphabet too small");
}

namespace {

class TdmaEncoder : public UserEncoder {
 public:
  TdmaEncoder(int k, int user, Bits msg) : k_(k), user_(user), msg_(std::move(msg)) {}
  int next_input(const std::vector<int>& y) override {
    int t = static_cast<int>(y.size());
    if (user_ == 1) return t < k_ ? msg_[t] : 0;
    return t < k_ ? 0 : msg_[t - k_];
  }

 private:
  int k_, user_;
  Bits msg_;
};

}  // namespace

std::unique_ptr<UserEncoder> TdmaIdentityCode::make_encoder(int user, const Bits& msg) const {
  if (user != 1 && user != 2) throw InvalidArgumentError("make_encoder: user must be 1 or 2");
  if (static_cast<int>(msg.size()) != k_) throw InvalidArgumentError("make_encoder: message size mismatch");
  return std::make_unique<TdmaEncoder>(k_, user, msg);
}

DecodedPair TdmaIdentityCode::decode(const std::vector<int>& y) const {
  if (static_cast<int>(y.size()) != 2 * k_) throw InvalidArgumentError("decode: length mismatch");
  DecodedPair out;
  out.m1.resize(k_);
  out.m2.resize(k_);
  for (int t = 0; t < k_; ++t) {
    out.m1[t] = static_cast<std::uint8_t>(y[t] != 0);
    out.m2[t] = static_cast<std::uint8_t>(y[k_ + t] != 0);
  }
  return out;
}

namespace {

class SymmetrizedCode : public FeedbackCode {
 public:
  SymmetrizedCode(std::shared_ptr<const FeedbackCode> base) : base_(std::move(base)) {}

  int block_length() const override { return 2 * base_->block_length(); }
  int message_bits() const override { return 2 * base_->message_bits(); }
  int in1_alphabet() const override { return base_->in1_alphabet(); }
  int in2_alphabet() const override { return base_->in2_alphabet(); }
  int out_alphabet() const override { return base_->out_alphabet(); }
  std::string name() const override { return "symmetrized(" + base_->name() + ")"; }

  std::unique_ptr<UserEncoder> make_encoder(int user, const Bits& msg) const override;
  DecodedPair decode(const std::vector<int>& y) const override;

  const FeedbackCode& base() const { return *base_; }

 private:
  std::shared_ptr<const FeedbackCode> base_;
};

class SymmetrizedEncoder : public UserEncoder {
 public:
  SymmetrizedEncoder(std::unique_ptr<UserEncoder> hat, std::unique_ptr<UserEncoder> til)
      : hat_(std::move(hat)), til_(std::move(til)) {}

  int next_input(const std::vector<int>& y) override {
    int t = static_cast<int>(y.size());
    std::vector<int> sub;
    sub.reserve((t + 1) / 2);
    // odd instances (even 0-based) carry the hat stream
    for (int i = (t % 2 == 0) ? 0 : 1; i < t; i += 2) sub.push_back(y[i]);
    return (t % 2 == 0) ? hat_->next_input(sub) : til_->next_input(sub);
  }

 private:
  std::unique_ptr<UserEncoder> hat_, til_;
};

std::unique_ptr<UserEncoder> SymmetrizedCode::make_encoder(int user, const Bits& msg) const {
  if (static_cast<int>(msg.size()) != message_bits())
    throw InvalidArgumentError("make_encoder: message size mismatch");
  int k = base_->message_bits();
  Bits hat(msg.begin(), msg.begin() + k), til(msg.begin() + k, msg.end());
  // even instances run the base code with encoder roles interchanged
  return std::make_unique<SymmetrizedEncoder>(base_->make_encoder(user, hat),
                                              base_->make_encoder(user == 1 ? 2 : 1, til));
}

DecodedPair SymmetrizedCode::decode(const std::vector<int>& y) const {
  if (static_cast<int>(y.size()) != block_length()) throw InvalidArgumentError("decode: length mismatch");
  std::vector<int> odd, even;
  for (std::size_t i = 0; i < y.size(); ++i) (i % 2 == 0 ? odd : even).push_back(y[i]);
  DecodedPair dh = base_->decode(odd);
  DecodedPair dt = base_->decode(even);  // roles swapped: role 1 carried user 2's tilde message
  DecodedPair out;
  out.m1 = dh.m1;
  out.m1.insert(out.m1.end(), dt.m2.begin(), dt.m2.end());
  out.m2 = dh.m2;
  out.m2.insert(out.m2.end(), dt.m1.begin(), dt.m1.end());
  out.declared_failure = dh.declared_failure || dt.declared_failure;
  return out;
}

}  // namespace

std::shared_ptr<FeedbackCode> symmetrize_code(const MacChannel& ch, std::shared_ptr<const FeedbackCode> base) {
  if (!ch.symmetric()) throw InvalidArgumentError("symmetrize_code: channel is not symmetric");
  if (base->in1_alphabet() != base->in2_alphabet())
    throw InvalidArgumentError("symmetrize_code: role interchange needs equal input alphabets");
  if (ch.in1_size() != base->in1_alphabet() || ch.in2_size() != base->in2_alphabet() ||
      ch.out_size() != base->out_alphabet())
    throw InvalidArgumentError("symmetrize_code: code alphabets do not match channel");
  return std::make_shared<SymmetrizedCode>(std::move(base));
}

SimulationResult simulate_code(const MacChannel& ch, const FeedbackCode& code, std::uint64_t trials,
                               std::uint64_t seed, int threads) {
  if (ch.in1_size() != code.in1_alphabet() || ch.in2_size() != code.in2_alphabet() ||
      ch.out_size() != code.out_alphabet())
    throw InvalidArgumentError("simulate_code: code alphabets do not match channel");

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t& errors, std::uint64_t& failures) {
    const int n = code.block_length();
    const int kb = code.message_bits();
    Bits m1(kb), m2(kb);
    std::vector<int> y;
    for (std::uint64_t i = lo; i < hi; ++i) {
      Rng rng(derive_seed(seed, i), 17);
      for (auto& b : m1) b = rng.bit() ? 1 : 0;
      for (auto& b : m2) b = rng.bit() ? 1 : 0;
      auto e1 = code.make_encoder(1, m1);
      auto e2 = code.make_encoder(2, m2);
      y.clear();
      for (int t = 0; t < n; ++t) {
        int x1 = e1->next_input(y);
        int x2 = e2->next_input(y);
        y.push_back(ch.sample_output(x1, x2, rng));
      }
      DecodedPair d = code.decode(y);
      if (d.declared_failure) ++failures;
      if (d.declared_failure || d.m1 != m1 || d.m2 != m2) ++errors;
    }
  };

  SimulationResult res;
  res.trials = trials;
  if (threads <= 1 || trials < 256) {
    run_range(0, trials, res.errors, res.declared_failures);
  } else {
    int nt = std::min<int>(threads, 64);
    std::vector<std::uint64_t> errs(nt, 0), fails(nt, 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
      std::uint64_t lo = trials * w / nt, hi = trials * (w + 1) / nt;
      pool.emplace_back([&, w, lo, hi] { run_range(lo, hi, errs[w], fails[w]); });
    }
    for (auto& th : pool) th.join();
    for (int w = 0; w < nt; ++w) {
      res.errors += errs[w];
      res.declared_failures += fails[w];
    }
  }
  res.error_prob = trials ? static_cast<double>(res.errors) / trials : 0.0;
  auto [lo, hi] = wilson_interval(res.errors, res.trials);
  res.ci_low = lo;
  res.ci_high = hi;
  return res;
}

std::vector<CodePath> enumerate_code_paths(const MacChannel& ch, const FeedbackCode& code,
                                           std::size_t max_paths) {
  const int kb = code.message_bits();
  const int n = code.block_length();
  if (kb > 20) throw BudgetError("enumerate_code_paths: message space too large");
  std::size_t pairs = static_cast<std::size_t>(1) << (2 * kb);
  if (pairs > max_paths) throw BudgetError("enumerate_code_paths: message space too large");

  std::vector<CodePath> out;
  Bits m1(kb), m2(kb);
  double pm = 1.0 / static_cast<double>(pairs);
  for (std::size_t a = 0; a < (static_cast<std::size_t>(1) << kb); ++a) {
    for (int i = 0; i < kb; ++i) m1[i] = (a >> i) & 1;
    for (std::size_t b = 0; b < (static_cast<std::size_t>(1) << kb); ++b) {
      for (int i = 0; i < kb; ++i) m2[i] = (b >> i) & 1;
      // depth-first branch over channel outputs with positive probability
      struct Frame {
        std::vector<int> y;
        double p;
      };
      std::vector<Frame> stack{{{}, pm}};
      while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (static_cast<int>(f.y.size()) == n) {
          out.push_back({f.p, m1, m2, std::move(f.y)});
          if (out.size() > max_paths) throw BudgetError("enumerate_code_paths: too many paths");
          continue;
        }
        // encoders are deterministic; replay to this prefix
        auto e1 = code.make_encoder(1, m1);
        auto e2 = code.make_encoder(2, m2);
        std::vector<int> prefix;
        int x1 = 0, x2 = 0;
        for (std::size_t t = 0; t <= f.y.size(); ++t) {
          x1 = e1->next_input(prefix);
          x2 = e2->next_input(prefix);
          if (t < f.y.size()) prefix.push_back(f.y[t]);
        }
        for (int x3 = ch.out_size() - 1; x3 >= 0; --x3) {
          double w = ch.w(x1, x2, x3);
          if (w <= 0.0) continue;
          Frame nf;
          nf.y = f.y;
          nf.y.push_back(x3);
          nf.p = f.p * w;
          stack.push_back(std::move(nf));
        }
      }
    }
  }
  return out;
}

EntropyProfile conditional_entropy_profile(const std::vector<CodePath>& paths, int group_size) {
  if (paths.empty()) throw InvalidArgumentError("conditional_entropy_profile: no paths");
  int n = static_cast<int>(paths[0].y.size());
  if (n % group_size != 0) throw InvalidArgumentError("conditional_entropy_profile: group size mismatch");
  int slots = n / group_size;
  EntropyProfile prof;
  auto key_of = [&](const Bits& m, const std::vector<int>& y, int upto) {
    std::string k(m.begin(), m.end());
    k.push_back('|');
    for (int i = 0; i < upto; ++i) k.push_back(static_cast<char>(1 + y[i]));
    return k;
  };
  for (int which = 0; which < 2; ++which) {
    auto& dest = which == 0 ? prof.given_m1 : prof.given_m2;
    for (int t = 0; t < slots; ++t) {
      std::map<std::string, double> joint, prior;
      for (const auto& p : paths) {
        const Bits& m = which == 0 ? p.m1 : p.m2;
        joint[key_of(m, p.y, (t + 1) * group_size)] += p.prob;
        prior[key_of(m, p.y, t * group_size)] += p.prob;
      }
      double hj = 0.0, hp = 0.0;
      for (auto& [k, v] : joint) hj -= xlog2x(v);
      for (auto& [k, v] : prior) hp -= xlog2x(v);
      dest.push_back(hj - hp);
    }
  }
  return prof;
}

}  // namespace skmac
