// Command-line interface: verification suites, matrix builds, and
// coefficient tables.  Exit codes: 0 all checks pass, 1 a check failed,
// 2 usage or configuration error.
#include <CLI11.hpp>

#include <qsphere/report.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

using namespace qsphere;

namespace {

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      Rational num(text.substr(0, slash));
      Rational den(text.substr(slash + 1));
      if (den == 0) throw UsageError("zero denominator: " + text);
      return num / den;
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      Rational den(1);
      for (size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(digits) / den;
    }
    return Rational(text);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("cannot parse number: " + text);
  }
}

RMode parse_rmode(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo")
    return RMode::infinite();
  return RMode::finite(parse_rational(text));
}

// half-integer ("3/2", "-1", "0.5") as a doubled integer
int parse_half(const std::string& text) {
  Rational v = parse_rational(text) * 2;
  if (boost::multiprecision::denominator(v) != 1)
    throw UsageError("not a half-integer: " + text);
  Rational n = boost::multiprecision::numerator(v);
  if (n > 1000 || n < -1000) throw UsageError("label out of range: " + text);
  return static_cast<int>(n);
}

struct RawOpts {
  std::string q = "1/2";
  std::string r = "1";
  std::string j;
  std::string l = "1/2";
  std::string branch = "+";
  std::string L;
  int N = 10, M = 10;
  double tol = 1e-9;
  double perturb = 0.0;
  double H = 0.0;   // 0 = default q^{-1/2}
  double y0 = 0.0;  // 0 = default lambda_+ q
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* sub, RawOpts& o) {
  sub->add_option("--q", o.q, "deformation parameter in (0,1), e.g. 1/2 or 0.3");
  sub->add_option("--r", o.r, "sphere parameter: rational >= 0 or 'inf'");
  sub->add_option("--j", o.j, "signed half-integer label, e.g. -1/2");
  sub->add_option("--branch", o.branch, "eigenvalue branch: + or -")
      ->check(CLI::IsMember({"+", "-"}));
  sub->add_option("--L", o.L, "truncation spin (half-integer)");
  sub->add_option("--N", o.N, "grid truncation")->check(CLI::NonNegativeNumber);
  sub->add_option("--M", o.M, "second grid truncation")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", o.tol, "numeric tolerance for relation checks");
  sub->add_option("--perturb", o.perturb,
                  "negative-control coefficient perturbation");
  sub->add_option("--out", o.out, "output file (default: stdout)");
  sub->add_option("--format", o.format, "json, csv, or md")
      ->check(CLI::IsMember({"json", "csv", "md"}));
}

RunConfig make_config(const RawOpts& o) {
  RunConfig cfg;
  cfg.q = parse_rational(o.q);
  if (!(cfg.q > 0 && cfg.q < 1)) throw UsageError("need 0 < q < 1");
  cfg.r = parse_rmode(o.r);
  if (cfg.r.kind == RMode::Finite && cfg.r.r < 0)
    throw UsageError("need r >= 0");
  if (!o.j.empty()) {
    cfg.j2 = parse_half(o.j);
    cfg.j_given = true;
  }
  cfg.branch = o.branch == "-" ? -1 : 1;
  if (!o.L.empty()) {
    cfg.L2 = parse_half(o.L);
    if (cfg.L2 < 0) throw UsageError("need L >= 0");
  }
  cfg.l2 = parse_half(o.l);
  if (cfg.l2 < 0) throw UsageError("need l >= 0");
  cfg.N = o.N;
  cfg.M = o.M;
  cfg.tol = o.tol;
  cfg.perturb = o.perturb;
  cfg.out = o.out;
  cfg.format = o.format;
  if (const char* t = std::getenv("QSPHERE_THREADS")) {
    cfg.threads = std::max(1, std::atoi(t));
  }
  return cfg;
}

TruncatedRep build_requested(const std::string& what, const RunConfig& cfg,
                             const RawOpts& o) {
  ParamContext ctx = cfg.ctx();
  int L2 = cfg.L2 >= 0 ? cfg.L2 : std::abs(cfg.j2) + 12;
  if (what == "Tl") return build_Tl(cfg.l2, ctx);
  if (what == "pi") {
    if (L2 < std::abs(cfg.j2) || (L2 - std::abs(cfg.j2)) % 2 != 0)
      throw UsageError("pi: need L >= |j| with L - |j| an integer");
    return build_pi_j(cfg.j2, L2, ctx);
  }
  if (what == "sigma") return build_sigma_pm(cfg.branch, cfg.N, ctx);
  if (what == "yr") {
    double y0 = o.y0 != 0.0
                    ? o.y0
                    : (ctx.r_infinite() ? 1.0 : ctx.lambda_plus_d() * ctx.qd());
    return build_Yr_rep(y0, cfg.N, ctx);
  }
  if (what == "I") {
    double H = o.H != 0.0 ? o.H : 1.0 / ctx.sd();
    return build_I_pm(cfg.branch, H, cfg.N, cfg.M, ctx);
  }
  if (what == "rho") return build_rho_chart(cfg.j2, cfg.branch, cfg.N, cfg.M, ctx);
  throw UsageError("unknown build target: " + what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-layer engine for representations of the cross product "
               "algebras of the quantum 2-spheres"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value config file merged under flags");

  RawOpts o;
  std::string suite, what;
  add_common(&app, o);
  app.add_option("--l", o.l, "spin of the finite module (half-integer)");
  app.add_option("--H", o.H, "scale parameter of the double-grid family");
  app.add_option("--y0", o.y0, "top diagonal value of the shift model");

  CLI::App* verify = app.add_subcommand(
      "verify", "run a named verification suite and report pass/fail");
  verify->add_option("suite", suite, "one of: presentations, hopf, bundle, "
                                     "classify, tensor, decouple, charts, "
                                     "state, adjoint, all")
      ->required();

  CLI::App* build = app.add_subcommand(
      "build", "build one numeric model and export its matrices");
  build->add_option("what", what, "one of: Tl, pi, sigma, yr, I, rho")
      ->required()
      ->check(CLI::IsMember({"Tl", "pi", "sigma", "yr", "I", "rho"}));

  app.add_subcommand(
      "tables", "export the ladder-coefficient tables for one |j|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      RunConfig cfg = make_config(o);
      bool known = false;
      for (const std::string& s : suite_names()) known = known || s == suite;
      if (!known) throw UsageError("unknown suite: " + suite);
      std::vector<SuiteResult> results = run_suite(suite, cfg);
      emit(render_results(results, cfg, cfg.format), cfg.out);
      for (const SuiteResult& s : results)
        if (!s.pass) return 1;
      return 0;
    }
    if (build->parsed()) {
      RunConfig cfg = make_config(o);
      TruncatedRep rep = build_requested(what, cfg, o);
      if (rep.dim() > 5000)
        throw UsageError("dense export capped at dimension 5000; lower the "
                         "truncation");
      emit(export_rep(rep, cfg.format), cfg.out);
      return 0;
    }
    RunConfig cfg = make_config(o);
    emit(render_coeff_tables(cfg, cfg.format), cfg.out);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
