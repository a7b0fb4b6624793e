#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace qsphere {

// Accumulating pass/fail report for a named verification.
struct CheckReport {
  std::string name;
  bool pass = true;
  double max_residual = 0.0;
  std::vector<std::string> lines;

  explicit CheckReport(std::string n = "") : name(std::move(n)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void check_num(double resid, double tol, const std::string& what) {
    resid = std::abs(resid);
    if (resid > max_residual) max_residual = resid;
    bool ok = resid <= tol && std::isfinite(resid);
    if (!ok) pass = false;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what +
                    "  residual=" + std::to_string(resid));
  }
  void note(const std::string& what) { lines.push_back("note  " + what); }
  std::string str() const {
    std::string out = name;
    for (const auto& l : lines) {
      out += "\n  ";
      out += l;
    }
    return out;
  }
  void merge(const CheckReport& o) {
    pass = pass && o.pass;
    max_residual = std::max(max_residual, o.max_residual);
    for (const auto& l : o.lines) lines.push_back(o.name.empty() ? l : o.name + ": " + l);
  }
};

}  // namespace qsphere
