#ifndef CGL_SELFTEST_HPP
#define CGL_SELFTEST_HPP

#include <string>
#include <vector>

namespace cgl {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the closed-form example suite (each case well under a second).
std::vector<SelftestResult> run_selftest();

}  // namespace cgl

#endif  // CGL_SELFTEST_HPP
