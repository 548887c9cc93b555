#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace superpos::selftest {

struct SuiteResult {
  std::string name;
  double worst = 0;      // largest residual seen
  double threshold = 0;  // pass means worst < threshold
  int cases = 0;
  bool pass = false;
  double seconds = 0;
  std::string detail;    // exception text when the suite threw
};

// Invariant suites of every module: Hecke relations, functional equations,
// winding integrality, eta multiplicativity, oddness of the H transform,
// Petersson, the Selberg identity, mollifier representations and V symmetry.
// Randomized suites draw from seed. Suites run on up to `threads` threads.
std::vector<SuiteResult> run_all(std::uint64_t seed = 1, int threads = 4);

}  // namespace superpos::selftest
