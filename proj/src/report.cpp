#include <qsphere/report.hpp>

#include <qsphere/bundle.hpp>
#include <qsphere/haar.hpp>
#include <qsphere/hopf.hpp>
#include <qsphere/ncpoly.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace qsphere {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string rational_str(const Rational& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string rmode_str(const RMode& m) {
  return m.kind == RMode::Inf ? "inf" : rational_str(m.r);
}

// doubled half-integer as a human label: 3 -> "3/2", 4 -> "2"
std::string half_label(int t2) {
  if (t2 % 2 == 0) return std::to_string(t2 / 2);
  return std::to_string(t2) + "/2";
}

double qp(const ParamContext& c, int t2) { return std::pow(c.sd(), t2); }
double br(const ParamContext& c, int n) { return c.bracket_d(n); }

// ---------------------------------------------------------------------------
// suites

using SuiteFn = std::function<SuiteResult(const RunConfig&)>;

std::vector<int> label_set(const RunConfig& cfg, std::vector<int> dflt) {
  if (cfg.j_given) return {cfg.j2};
  return dflt;
}

const std::vector<std::string>& presentation_ids() {
  static const std::vector<std::string> ids = {
      "Uq_su2",     "Uq_su2_hat",          "O_SUq2",
      "O_S2qr",     "O_S2qr_localized",    "cross_EFK",
      "cross_efk",  "cross_decoupled_XY",  "cross_decoupled_XK",
      "Yr"};
  return ids;
}

SuiteResult suite_presentations(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "presentations";
  ParamContext ctx = cfg.ctx();
  for (const std::string& id : presentation_ids()) {
    Presentation p = make_presentation(id, ctx);
    out.add(id + ": confluence", check_confluence(p, 6));
    out.add(id + ": involution", check_involution(p));
  }
  return out;
}

SuiteResult suite_hopf(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "hopf";
  ParamContext ctx = cfg.ctx();
  Hopf h(ctx);
  out.add("hopf axioms", check_hopf_axioms(h));
  out.add("sphere invariance", check_sphere_invariance(h));
  Bundle b(ctx);
  out.add("mu spectrum", b.check_mu_spectrum({-3, -2, -1, 0, 1, 2, 3}));
  return out;
}

SuiteResult suite_bundle(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "bundle";
  Bundle b(cfg.ctx());
  for (int j2 : {1, -1, 2, -2}) {
    out.add("projector, label " + half_label(j2),
            b.check_projector(b.build_projector(j2)));
    out.add("chart-map isometry, label " + half_label(j2),
            b.psi_isometry_check(j2, 2));
  }
  out.add("cross-module orthogonality", b.check_orthogonality(2));
  return out;
}

SuiteResult suite_classify(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "classify";
  ParamContext ctx = cfg.ctx();
  for (int j2s : label_set(cfg, {0, 1, -1, 2, -2})) {
    int j2 = std::abs(j2s);
    int L2 = cfg.L2 >= 0 ? cfg.L2 : j2 + 12;
    if (L2 < j2 + 2)
      throw UsageError("classify: need truncation spin L >= |j| + 1");
    TruncatedRep pi = build_pi_j(j2s, L2, ctx);
    out.add("series relations, label " + half_label(j2s),
            verify_relations(pi, cfg.tol));
    int branch = j2s < 0 ? -1 : (j2s > 0 ? 1 : cfg.branch);
    CoeffTable ct = build_coeffs(j2, branch, L2, ctx);
    CheckReport flag("coefficient tables, label " + half_label(j2s));
    flag.merge(ct.report);
    flag.check(!ct.crosscheck_flagged,
               "closed-form cross check of alpha+ within 1e-10");
    out.add("", std::move(flag));
  }
  return out;
}

// resolved components of `rep` must be exactly `labels`, each multiplicity 1
CheckReport expect_components(const TruncatedRep& rep, std::vector<int> labels,
                              const std::string& what) {
  CheckReport rep_out(what);
  std::vector<Component> cs = decompose(rep);
  std::vector<int> got;
  bool mult_ok = true;
  for (const Component& c : cs)
    if (c.resolved) {
      mult_ok = mult_ok && c.mult == 1;
      got.push_back(c.j2);
    }
  std::sort(got.begin(), got.end());
  std::sort(labels.begin(), labels.end());
  std::string found = "found {";
  for (int g : got) found += " " + half_label(g);
  found += " }";
  rep_out.check(got == labels, what + ": component labels, " + found);
  rep_out.check(mult_ok, what + ": every resolved multiplicity is 1");
  return rep_out;
}

// the lowered top vector of pi_j (x) T_{1/2} is highest-weight and its x0
// expectation takes the predicted bottom value of the neighbouring label
CheckReport lowered_top_vector_check(const TruncatedRep& pi, int j2s,
                                     const ParamContext& ctx) {
  CheckReport out("lowered top vector, label " + half_label(j2s));
  int j2 = std::abs(j2s);
  int L2 = 0;
  // recover the truncation spin from the basis size
  {
    int n = pi.dim(), acc = 0;
    for (int l2 = j2;; l2 += 2) {
      acc += l2 + 1;
      if (acc == n) {
        L2 = l2;
        break;
      }
    }
  }
  std::map<std::pair<int, int>, int> idx;
  int i = 0;
  for (int l2 = j2; l2 <= L2; l2 += 2)
    for (int k2 = -l2; k2 <= l2; k2 += 2) idx[{l2, k2}] = i++;

  TruncatedRep tp = tensor_rep(pi, 1);
  Eigen::VectorXd vec = Eigen::VectorXd::Zero(tp.dim());
  int top = idx.at({j2, j2}), sub = idx.at({j2, j2 - 2});
  vec(top * 2 + 0) = qp(ctx, 1) * std::sqrt(br(ctx, j2));
  vec(sub * 2 + 1) = -qp(ctx, -j2);
  double nrm = vec.norm();
  out.check_num((tp.matrix("E") * vec).norm() / nrm, 1e-12,
                "lowered top vector is highest-weight");
  double expect = vec.dot(tp.matrix("x0") * vec) / (nrm * nrm);
  ParamContext clean = ctx;
  clean.perturb = 0.0;
  double pred = br(ctx, j2 + 2) * br(ctx, j2 - 1) /
                (br(ctx, j2 + 1) * br(ctx, j2)) *
                build_coeffs(j2, j2s < 0 ? -1 : 1, j2 + 4, clean).beta0(j2);
  out.check_num(std::abs(expect - pred), 1e-8,
                "x0 expectation matches the neighbouring bottom value");
  return out;
}

SuiteResult suite_tensor(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "tensor";
  ParamContext ctx = cfg.ctx();
  for (int j2s : label_set(cfg, {0, 1, -1, 2, -2})) {
    int L2 = std::abs(j2s) + 12;
    TruncatedRep pi = build_pi_j(j2s, L2, ctx);
    std::vector<int> want = j2s == 0 ? std::vector<int>{-1, 1}
                                     : std::vector<int>{j2s - 1, j2s + 1};
    out.add("", expect_components(tensor_rep(pi, 1), want,
                                  "pi_" + half_label(j2s) + " (x) T_{1/2}"));
    if (j2s == 0)
      out.add("", expect_components(tensor_rep(pi, 2), {-2, 0, 2},
                                    "pi_0 (x) T_1"));
    if (j2s != 0) out.add("", lowered_top_vector_check(pi, j2s, ctx));
  }
  return out;
}

SuiteResult suite_decouple(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "decouple";
  ParamContext ctx = cfg.ctx();
  out.add("commutant of the decoupled generators", check_commutant(ctx));
  out.add("decoupling identities", check_decoupling_identities(ctx));
  double Y0 = ctx.r_infinite() ? 1.0 : ctx.lambda_plus_d() * ctx.qd();
  out.add("shift-model relations",
          verify_relations(build_Yr_rep(Y0, 10, ctx), 1e-12));
  out.add("structural invariants", check_rep_invariants(ctx));
  if (!ctx.r_infinite()) {
    double H = 1.0 / ctx.sd();
    for (int sign : {1, -1}) {
      if (sign < 0 && ctx.rd() == 0) continue;
      out.add(std::string("double-grid relations, sign ") +
                  (sign > 0 ? "+" : "-"),
              verify_relations(build_I_pm(sign, H, cfg.N, cfg.M, ctx), 1e-9));
    }
  } else {
    CheckReport skip("double-grid family");
    skip.note("not defined in the infinite-r regime; skipped");
    out.add("", std::move(skip));
  }
  return out;
}

// the chart realization factorizes as (sphere shift) tensor (decoupled shift)
CheckReport chart_factorization(int j2s, int sign, const ParamContext& ctx) {
  CheckReport out("chart factorization, label " + half_label(j2s) +
                  ", sign " + (sign > 0 ? std::string("+") : std::string("-")));
  const int N = 8, M = 8;
  TruncatedRep rep = build_rho_chart(j2s, sign, N, M, ctx);
  out.merge(verify_relations(rep, 1e-10));
  double ls = ctx.r_infinite()
                  ? double(sign)
                  : (sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d());
  double Y0 = std::pow(ctx.sd(), 2 * sign * j2s + 2) * ls;
  TruncatedRep s = build_sigma_pm(sign, N, ctx);
  TruncatedRep y = build_Yr_rep(Y0, M, ctx);
  double worst = 0.0;
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k <= M; ++k) {
      if (n > 0)
        worst = std::max(worst, std::abs(rep.matrix("B")((n - 1) * (M + 1) + k,
                                                         n * (M + 1) + k) -
                                         s.matrix("B")(n - 1, n)));
      if (k < M)
        worst = std::max(worst,
                         std::abs(rep.matrix("X")(n * (M + 1) + k + 1,
                                                  n * (M + 1) + k) -
                                  y.matrix("X")(k + 1, k)));
    }
  out.check_num(worst, 1e-12, "coefficient-by-coefficient factorization");
  return out;
}

SuiteResult suite_charts(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "charts";
  ParamContext ctx = cfg.ctx();
  Bundle b(ctx);
  out.add("frame identities", b.chart_identities(3));
  for (int j2 : {0, 1, 2, 3})
    out.add("chart matrices, label " + half_label(j2), b.chart_matrices(j2));
  bool minus_ok = ctx.r_infinite() || ctx.rd() > 0;
  for (int j2s : label_set(cfg, {0, 1, -1, 2}))
    for (int sign : {1, -1}) {
      if (sign < 0 && !minus_ok) continue;
      out.add("", chart_factorization(j2s, sign, ctx));
    }
  return out;
}

SuiteResult suite_state(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "state";
  ParamContext ctx = cfg.ctx();
  out.add("Haar pairing table", check_haar_table(ctx, 8));
  out.add("difference-operator actions", check_operator_actions(ctx));
  out.add("state invariance and counterexample", check_state_properties(ctx));
  out.add("series and trace realizations", check_state_realizations(ctx));
  return out;
}

SuiteResult suite_adjoint(const RunConfig& cfg) {
  SuiteResult out;
  out.name = "adjoint";
  ParamContext ctx = cfg.ctx();
  for (int j2s : label_set(cfg, {0, 1, -2}))
    out.add("adjoint reconstruction, label " + half_label(j2s),
            adjoint_reconstruction_check(j2s, std::abs(j2s) + 20, ctx));
  return out;
}

const std::map<std::string, SuiteFn>& suite_table() {
  static const std::map<std::string, SuiteFn> table = {
      {"presentations", suite_presentations},
      {"hopf", suite_hopf},
      {"bundle", suite_bundle},
      {"classify", suite_classify},
      {"tensor", suite_tensor},
      {"decouple", suite_decouple},
      {"charts", suite_charts},
      {"state", suite_state},
      {"adjoint", suite_adjoint},
  };
  return table;
}

// ---------------------------------------------------------------------------
// acceptance criteria

RunConfig point(const Rational& q, const RMode& r) {
  RunConfig cfg;
  cfg.q = q;
  cfg.r = r;
  return cfg;
}

void fold(SuiteResult& acc, const SuiteResult& s, const std::string& prefix) {
  for (CheckReport r : s.reports) {
    r.name = prefix + r.name;
    acc.add("", std::move(r));
  }
}

std::string point_tag(const RunConfig& cfg) {
  return "[q=" + rational_str(cfg.q) + ", r=" + rmode_str(cfg.r) + "] ";
}

SuiteResult criterion_grid(const std::string& name, const std::string& suite,
                           const std::vector<RunConfig>& points) {
  SuiteResult out;
  out.name = name;
  for (const RunConfig& cfg : points)
    fold(out, suite_table().at(suite)(cfg), point_tag(cfg));
  return out;
}

std::vector<RunConfig> regime_points(const Rational& q,
                                     const std::vector<RMode>& rs) {
  std::vector<RunConfig> out;
  for (const RMode& r : rs) out.push_back(point(q, r));
  return out;
}

SuiteResult criterion_equivalence() {
  SuiteResult out;
  out.name = "equivalence";
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(2)));
  for (int j2s : {0, 1, -1, 2, -2})
    out.add("Haar-side matrix elements, label " + half_label(j2s),
            equivalence_pi_vs_bundle(j2s, std::abs(j2s) + 2, ctx));
  return out;
}

SuiteResult criterion_controls() {
  SuiteResult out;
  out.name = "negative controls";
  ParamContext pctx(Rational(1, 2), RMode::finite(Rational(2)));
  pctx.perturb = 1e-3;
  RunConfig pcfg = point(pctx.q, pctx.r);
  pcfg.perturb = 1e-3;

  auto expect_fail = [&](const std::string& what,
                         const std::function<CheckReport()>& run) {
    bool failed;
    std::string detail;
    try {
      CheckReport r = run();
      failed = !r.pass;
      detail = failed ? "detected (failing check)" : "NOT detected";
    } catch (const std::exception& e) {
      failed = true;
      detail = std::string("detected (") + e.what() + ")";
    }
    CheckReport rep("control: " + what);
    rep.check(failed, what + " rejects the perturbed coefficient: " + detail);
    out.add("", std::move(rep));
  };

  expect_fail("presentations", [&] {
    return check_confluence(make_presentation("cross_EFK", pctx), 5);
  });
  expect_fail("hopf", [&] { return check_sphere_invariance(Hopf(pctx)); });
  expect_fail("bundle", [&] {
    Bundle b(pctx);
    return b.check_projector(b.build_projector(1));
  });
  expect_fail("classify",
              [&] { return verify_relations(build_pi_j(1, 9, pctx), 1e-9); });
  expect_fail("tensor", [&] {
    decompose(tensor_rep(build_pi_j(1, 13, pctx), 1));
    CheckReport r("tensor");
    r.check(false, "perturbed decomposition unexpectedly matched candidates");
    return r;
  });
  expect_fail("decouple", [&] { return check_commutant(pctx); });
  expect_fail("charts", [&] {
    double Y0 = pctx.lambda_plus_d() * pctx.qd();
    return verify_relations(build_Yr_rep(Y0, 8, pctx), 1e-12);
  });
  expect_fail("state", [&] { return check_operator_actions(pctx); });
  expect_fail("adjoint",
              [&] { return adjoint_reconstruction_check(1, 9, pctx); });
  expect_fail("equivalence",
              [&] { return equivalence_pi_vs_bundle(1, 3, pctx); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ParamContext RunConfig::ctx() const {
  ParamContext c(q, r);
  c.perturb = perturb;
  return c;
}

void SuiteResult::add(const std::string& title, CheckReport r) {
  if (!title.empty()) r.name = title;
  pass = pass && r.pass;
  max_residual = std::max(max_residual, r.max_residual);
  reports.push_back(std::move(r));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "presentations", "hopf",   "bundle", "classify", "tensor",
      "decouple",      "charts", "state",  "adjoint",  "all"};
  return names;
}

std::vector<SuiteResult> run_suite(const std::string& suite,
                                   const RunConfig& cfg) {
  std::vector<SuiteResult> out;
  if (suite == "all") {
    for (const auto& [name, fn] : suite_table()) out.push_back(fn(cfg));
    return out;
  }
  auto it = suite_table().find(suite);
  if (it == suite_table().end()) throw UsageError("unknown suite: " + suite);
  out.push_back(it->second(cfg));
  return out;
}

SuiteResult run_criterion(int k) {
  const Rational half(1, 2);
  const std::vector<RMode> regimes = {RMode::finite(Rational(0)),
                                      RMode::finite(Rational(2)),
                                      RMode::infinite()};
  switch (k) {
    case 1:
      return criterion_grid("presentations exact across regimes",
                            "presentations", regime_points(half, regimes));
    case 2:
      return criterion_grid("Hopf structure and sphere invariance", "hopf",
                            regime_points(half, regimes));
    case 3:
      return criterion_grid("projector identities", "bundle",
                            {point(half, RMode::finite(Rational(2)))});
    case 4: {
      std::vector<RunConfig> pts;
      for (const Rational& q :
           {Rational(3, 10), Rational(1, 2), Rational(7, 10)})
        for (const RMode& r : {RMode::finite(Rational(0)),
                               RMode::finite(Rational(1)), RMode::infinite()})
          pts.push_back(point(q, r));
      return criterion_grid("classified series over the parameter grid",
                            "classify", pts);
    }
    case 5:
      return criterion_grid("tensor decompositions", "tensor",
                            {point(half, RMode::finite(Rational(2)))});
    case 6: {
      std::vector<RunConfig> pts =
          regime_points(half, {RMode::finite(Rational(0)),
                               RMode::finite(Rational(1)),
                               RMode::finite(Rational(2)), RMode::infinite()});
      return criterion_grid("decoupling and shift models", "decouple", pts);
    }
    case 7:
      return criterion_grid(
          "Haar state realizations", "state",
          regime_points(half, {RMode::finite(Rational(1)),
                               RMode::finite(Rational(2))}));
    case 8: {
      SuiteResult out;
  out.name = "chart realizations and adjoint reconstruction";
      fold(out, suite_charts(point(half, RMode::finite(Rational(2)))),
           point_tag(point(half, RMode::finite(Rational(2)))));
      for (const RunConfig& cfg :
           {point(half, RMode::finite(Rational(2))),
            point(half, RMode::finite(Rational(0))),
            point(Rational(2, 5), RMode::infinite())})
        fold(out, suite_adjoint(cfg), point_tag(cfg));
      return out;
    }
    case 9: {
      SuiteResult out = criterion_equivalence();
      out.name = "Haar-side equivalence";
      return out;
    }
    case 10:
      return criterion_controls();
    default:
      throw UsageError("criterion index must be 1..10");
  }
}

// ---------------------------------------------------------------------------
// emitters

namespace {

std::string config_json(const RunConfig& cfg) {
  std::ostringstream os;
  os << "{\"q\": \"" << rational_str(cfg.q) << "\", \"r\": \""
     << rmode_str(cfg.r) << "\", \"tol\": " << fmt17(cfg.tol)
     << ", \"perturb\": " << fmt17(cfg.perturb) << ", \"L2\": " << cfg.L2
     << ", \"N\": " << cfg.N << ", \"M\": " << cfg.M << "}";
  return os.str();
}

std::string config_md(const RunConfig& cfg) {
  std::ostringstream os;
  os << "q = " << rational_str(cfg.q) << ", r = " << rmode_str(cfg.r)
     << ", tol = " << fmt17(cfg.tol);
  if (cfg.perturb != 0) os << ", perturb = " << fmt17(cfg.perturb);
  os << ", L2 = " << cfg.L2 << ", N = " << cfg.N << ", M = " << cfg.M;
  return os.str();
}

}  // namespace

std::string render_results(const std::vector<SuiteResult>& results,
                           const RunConfig& cfg, const std::string& format) {
  bool all_pass = true;
  double worst = 0.0;
  for (const SuiteResult& s : results) {
    all_pass = all_pass && s.pass;
    worst = std::max(worst, s.max_residual);
  }
  std::ostringstream os;
  if (format == "json") {
    os << "{\n  \"config\": " << config_json(cfg) << ",\n";
    os << "  \"pass\": " << (all_pass ? "true" : "false") << ",\n";
    os << "  \"max_residual\": " << fmt17(worst) << ",\n";
    os << "  \"suites\": [";
    bool first_s = true;
    for (const SuiteResult& s : results) {
      os << (first_s ? "\n" : ",\n");
      first_s = false;
      os << "    {\"name\": \"" << json_escape(s.name) << "\", \"pass\": "
         << (s.pass ? "true" : "false")
         << ", \"max_residual\": " << fmt17(s.max_residual)
         << ", \"checks\": [";
      bool first_c = true;
      for (const CheckReport& r : s.reports) {
        os << (first_c ? "\n" : ",\n");
        first_c = false;
        os << "      {\"name\": \"" << json_escape(r.name) << "\", \"pass\": "
           << (r.pass ? "true" : "false")
           << ", \"max_residual\": " << fmt17(r.max_residual)
           << ", \"lines\": [";
        bool first_l = true;
        for (const std::string& l : r.lines) {
          os << (first_l ? "" : ", ") << "\"" << json_escape(l) << "\"";
          first_l = false;
        }
        os << "]}";
      }
      os << "\n    ]}";
    }
    os << "\n  ]\n}\n";
  } else if (format == "csv") {
    os << "suite,check,pass,max_residual\n";
    for (const SuiteResult& s : results)
      for (const CheckReport& r : s.reports) {
        std::string name = r.name;
        std::replace(name.begin(), name.end(), ',', ';');
        os << s.name << "," << name << "," << (r.pass ? "pass" : "FAIL")
           << "," << fmt17(r.max_residual) << "\n";
      }
  } else if (format == "md") {
    os << "# Verification report\n\n" << config_md(cfg) << "\n\n";
    os << "Overall: " << (all_pass ? "PASS" : "FAIL")
       << ", max residual " << fmt17(worst) << "\n";
    for (const SuiteResult& s : results) {
      os << "\n## " << s.name << " — " << (s.pass ? "PASS" : "FAIL") << "\n\n";
      os << "| check | status | max residual |\n|---|---|---|\n";
      for (const CheckReport& r : s.reports)
        os << "| " << r.name << " | " << (r.pass ? "pass" : "FAIL") << " | "
           << fmt17(r.max_residual) << " |\n";
    }
  } else {
    throw UsageError("unknown format: " + format);
  }
  return os.str();
}

std::string export_rep(const TruncatedRep& rep, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << "{\n  \"presentation\": \"" << json_escape(rep.presentation_id)
       << "\",\n  \"basis\": [";
    for (int i = 0; i < rep.dim(); ++i)
      os << (i ? ", " : "") << "\"" << json_escape(rep.labels[i]) << "\"";
    os << "],\n  \"generators\": {";
    bool first_g = true;
    for (const auto& [name, m] : rep.mats) {
      os << (first_g ? "\n" : ",\n");
      first_g = false;
      os << "    \"" << json_escape(name) << "\": {\"rows\": " << m.rows()
         << ", \"cols\": " << m.cols() << ", \"triplets\": [";
      bool first_t = true;
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (m(i, j) != 0.0) {
            os << (first_t ? "" : ", ") << "[" << i << ", " << j << ", "
               << fmt17(m(i, j)) << "]";
            first_t = false;
          }
      os << "]}";
    }
    os << "\n  }\n}\n";
  } else if (format == "csv") {
    os << "generator,row,col,value\n";
    for (const auto& [name, m] : rep.mats)
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (m(i, j) != 0.0)
            os << name << "," << i << "," << j << "," << fmt17(m(i, j))
               << "\n";
  } else if (format == "md") {
    os << "# Matrices (" << rep.presentation_id << ")\n\nBasis:";
    for (const std::string& l : rep.labels) os << " `" << l << "`";
    os << "\n";
    for (const auto& [name, m] : rep.mats) {
      os << "\n## " << name << " (" << m.rows() << " x " << m.cols()
         << ")\n\n| row | col | value |\n|---|---|---|\n";
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (m(i, j) != 0.0)
            os << "| " << i << " | " << j << " | " << fmt17(m(i, j))
               << " |\n";
    }
  } else {
    throw UsageError("unknown format: " + format);
  }
  return os.str();
}

std::string render_coeff_tables(const RunConfig& cfg,
                                const std::string& format) {
  ParamContext ctx = cfg.ctx();
  int j2 = std::abs(cfg.j2);
  int L2 = cfg.L2 >= 0 ? cfg.L2 : j2 + 12;
  if (L2 < j2) throw UsageError("tables: need L >= |j|");

  struct Row {
    int branch, l2;
    double beta0, alphap, direct;
  };
  std::vector<Row> rows;
  for (int branch : {1, -1}) {
    CoeffTable ct = build_coeffs(j2, branch, L2, ctx);
    for (int l2 = j2; l2 <= L2; l2 += 2)
      rows.push_back({branch, l2, ct.beta0(l2), ct.alphap(l2),
                      ct.alphap_direct.count(l2) ? ct.alphap_direct.at(l2)
                                                 : 0.0});
  }

  std::ostringstream os;
  if (format == "json") {
    os << "{\n  \"config\": " << config_json(cfg)
       << ",\n  \"j\": \"" << half_label(j2) << "\",\n  \"rows\": [";
    bool first = true;
    for (const Row& r : rows) {
      os << (first ? "\n" : ",\n");
      first = false;
      os << "    {\"branch\": \"" << (r.branch > 0 ? "+" : "-")
         << "\", \"l\": \"" << half_label(r.l2)
         << "\", \"beta0\": " << fmt17(r.beta0)
         << ", \"alphap\": " << fmt17(r.alphap)
         << ", \"alphap_closed_form\": " << fmt17(r.direct)
         << ", \"crosscheck\": " << fmt17(std::abs(r.alphap - r.direct))
         << "}";
    }
    os << "\n  ]\n}\n";
  } else if (format == "csv") {
    os << "branch,l,beta0,alphap,alphap_closed_form,crosscheck\n";
    for (const Row& r : rows)
      os << (r.branch > 0 ? "+" : "-") << "," << half_label(r.l2) << ","
         << fmt17(r.beta0) << "," << fmt17(r.alphap) << "," << fmt17(r.direct)
         << "," << fmt17(std::abs(r.alphap - r.direct)) << "\n";
  } else if (format == "md") {
    os << "# Ladder coefficients, |j| = " << half_label(j2) << "\n\n"
       << config_md(cfg) << "\n\n"
       << "| branch | l | beta0(l,l) | alpha+(l,l) | closed form | "
          "crosscheck |\n|---|---|---|---|---|---|\n";
    for (const Row& r : rows)
      os << "| " << (r.branch > 0 ? "+" : "-") << " | " << half_label(r.l2)
         << " | " << fmt17(r.beta0) << " | " << fmt17(r.alphap) << " | "
         << fmt17(r.direct) << " | " << fmt17(std::abs(r.alphap - r.direct))
         << " |\n";
  } else {
    throw UsageError("unknown format: " + format);
  }
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
}

}  // namespace qsphere
