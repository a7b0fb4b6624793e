// Acceptance gate: runs the ten pinned verification criteria and prints one
// pass/fail line per criterion.  Exits nonzero if any criterion fails.
#include <qsphere/report.hpp>

#include <chrono>
#include <cstdio>
#include <exception>

int main() {
  bool all_pass = true;
  for (int k = 1; k <= 10; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string name, detail;
    try {
      qsphere::SuiteResult r = qsphere::run_criterion(k);
      pass = r.pass;
      name = r.name;
      if (!pass) {
        for (const qsphere::CheckReport& c : r.reports)
          if (!c.pass) {
            detail = "  first failure: " + c.name;
            break;
          }
      }
    } catch (const std::exception& e) {
      pass = false;
      name = "criterion crashed";
      detail = std::string("  exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("criterion %2d [%s]: %s (%.1fs)\n", k,
                pass ? "pass" : "FAIL", name.c_str(), secs);
    if (!detail.empty()) std::printf("%s\n", detail.c_str());
    all_pass = all_pass && pass;
  }
  std::printf("acceptance: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? 0 : 1;
}
