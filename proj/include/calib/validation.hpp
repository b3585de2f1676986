#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace calib {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst observed discrepancy, or failure description
};

// The built-in self-check suite:
//   - reduction identities: every controlled-model variance formula must
//     collapse to its usual-model counterpart at sigma_delta_sq = 0;
//   - Fisher-inverse identities: the (x0,x0) entry of the inverted
//     information matrix must equal the corresponding variance formula;
//   - Fisher vs Monte Carlo Hessian: the closed-form information matrices
//     must match the MC mean of the negative numeric log-likelihood Hessian;
//   - bias/variance expansion check: empirical moments of x0_hat at a
//     small-k design must match the closed-form bias and v2 formulas.
// `fast` skips the two Monte Carlo checks.
std::vector<CheckResult> run_validation(bool fast, std::uint64_t seed = 17);

}  // namespace calib
