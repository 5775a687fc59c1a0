// Acceptance gate: runs the numbered criteria and prints one line each.
// Exits nonzero when any criterion fails.

#include <cstdio>

#include "ccg/selftest.hpp"

int main() {
  int failed = 0;
  double total = 0.0;
  for (const auto& c : ccg::selftest::all_cases()) {
    if (c.criterion == 0) continue;
    ccg::selftest::Outcome o = ccg::selftest::run_case(c, 1, c.time_limit);
    total += o.seconds;
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", o.criterion,
                o.name.c_str(), o.seconds, o.message.empty() ? "" : " -- ", o.message.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%s: %d criterion failure(s), %.1fs total\n", failed == 0 ? "OK" : "FAILED", failed,
              total);
  return failed == 0 ? 0 : 1;
}
