// Verification-suite drivers and machine-readable reporting shared by the
// command-line tool and the acceptance gate: named suites over one parameter
// point, the ten-part acceptance run over its pinned parameter grids, and
// deterministic JSON/CSV/Markdown emitters (floats at 17 significant digits).
#pragma once

#include <qsphere/repnum.hpp>

#include <string>
#include <vector>

namespace qsphere {

// thrown for configuration errors the exit-code contract maps to status 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Rational q = Rational(1, 2);
  RMode r = RMode::finite(Rational(1));
  int j2 = 0;          // signed doubled half-integer label
  bool j_given = false;
  int branch = 1;      // +1 / -1
  int L2 = -1;         // doubled truncation spin; -1 = per-suite default
  int l2 = 1;          // doubled spin for spin-l module builds
  int N = 10, M = 10;  // grid truncations
  double tol = 1e-9;
  double perturb = 0.0;
  std::string out;     // output path; empty = stdout
  std::string format = "json";
  int threads = 1;

  ParamContext ctx() const;
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  double max_residual = 0.0;
  std::vector<CheckReport> reports;
  void add(const std::string& title, CheckReport r);
};

// suite ids accepted by run_suite / the verify command
const std::vector<std::string>& suite_names();

// runs one named suite at the config's parameter point; "all" runs every
// suite.  Throws UsageError for bad configuration.
std::vector<SuiteResult> run_suite(const std::string& suite, const RunConfig& cfg);

// the ten acceptance criteria over their pinned parameter grids;
// k in 1..10.  Criterion 10 re-runs reduced suites with a perturbed
// coefficient and passes iff every one of them fails.
SuiteResult run_criterion(int k);

// deterministic emitters
std::string render_results(const std::vector<SuiteResult>& results,
                           const RunConfig& cfg, const std::string& format);
std::string export_rep(const TruncatedRep& rep, const std::string& format);
std::string render_coeff_tables(const RunConfig& cfg, const std::string& format);

// writes to cfg.out or stdout
void emit(const std::string& text, const std::string& out_path);

}  // namespace qsphere
