#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "properties.hpp"

int main() {
  const std::vector<std::function<props::Outcome()>> suites = {
      [] { return props::order_invariance(); }, [] { return props::dominance(); },
      [] { return props::boundary_residuals(); }, [] { return props::identity_adaptation(); },
      [] { return props::tower_property(); },   [] { return props::no_adaptation(); },
  };
  int failed = 0;
  for (const auto& run : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    const props::Outcome o = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", o.name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
