#ifndef SKMAC_VERIFY_HPP
#define SKMAC_VERIFY_HPP

#include <string>
#include <vector>

#include "core/common.hpp"

namespace skmac {

struct VerifyOptions {
  bool full = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct BatteryResult {
  std::string name;
  bool pass = false;
  std::uint64_t cases = 0;
  std::string detail;  // failing seeds / margins
};

struct VerifyReport {
  bool pass = false;
  std::vector<BatteryResult> batteries;
  double seconds = 0.0;
};

VerifyReport run_verify(const VerifyOptions& opt);

}  // namespace skmac

#endif
