// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <chrono>
#include <iostream>

#include "checks.hpp"

int main() {
  using namespace kstab::checks;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 psd-stability of the 2x2 determinantal example", psd_determinantal_certified},
      {"2 identity psd pencil against itself, unique C", identity_pencil_unique_choi},
      {"3 Lorentz-determinant instance: unknown with dual rays, no counterexample", [] { return lorentz_alt_pencil_unknown(); }},
      {"4 scaling factor of the rotated pencils", rotated_scaling_factor},
      {"5 Lorentz-type determinantal representation identity", lorentz_representation_identity},
      {"6 witnesses for the three non-stable examples", non_stable_witnesses},
      {"7 type II imaginary projection vs brute force", [] { return type_ii_cross_check(); }},
      {"8 property suites", property_suites},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << " [" << fmt(secs) << " s]: " << o.detail
              << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
