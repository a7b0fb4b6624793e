#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsphere/repnum.hpp>

#include <cmath>

using namespace qsphere;

namespace {
ParamContext ctx_fin() { return {Rational(1, 2), RMode::finite(Rational(2))}; }
ParamContext ctx_one() { return {Rational(1, 2), RMode::finite(Rational(1))}; }
ParamContext ctx_zero() { return {Rational(1, 2), RMode::finite(Rational(0))}; }
ParamContext ctx_inf() { return {Rational(2, 5), RMode::infinite()}; }

double qd(const ParamContext& c) { return c.qd(); }
}  // namespace

TEST_CASE("spin-l modules: small cases and relation residuals") {
  ParamContext ctx = ctx_fin();
  double q = qd(ctx);

  TruncatedRep t0 = build_Tl(0, ctx);
  CHECK(t0.dim() == 1);
  CHECK(t0.matrix("E").norm() == 0.0);
  CHECK(t0.matrix("F").norm() == 0.0);
  CHECK(t0.matrix("K")(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  TruncatedRep th = build_Tl(1, ctx);
  CHECK(th.dim() == 2);
  CHECK(th.matrix("K")(0, 0) == doctest::Approx(1.0 / std::sqrt(q)).epsilon(1e-15));
  CHECK(th.matrix("K")(1, 1) == doctest::Approx(std::sqrt(q)).epsilon(1e-15));
  CHECK(th.matrix("E")(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(th.matrix("E")(0, 1) == 0.0);

  TruncatedRep t1 = build_Tl(2, ctx);
  // lowering from the top vector carries [l-j+1]^{1/2}[l+j]^{1/2} = [2]^{1/2}
  CHECK(t1.matrix("F")(1, 2) ==
        doctest::Approx(std::sqrt(ctx.bracket_d(2))).epsilon(1e-14));

  for (int l2 : {0, 1, 2, 3, 4, 5}) {
    TruncatedRep t = build_Tl(l2, ctx);
    CheckReport r = verify_relations(t, 1e-13);
    INFO(r.str());
    CHECK(r.pass);
    // Casimir-type combination EF - FE - (K^2 - K^-2)/(q - q^-1)
    Eigen::MatrixXd cas =
        t.matrix("E") * t.matrix("F") - t.matrix("F") * t.matrix("E") -
        (t.matrix("K") * t.matrix("K") - t.matrix("Kinv") * t.matrix("Kinv")) /
            (q - 1.0 / q);
    CHECK(cas.norm() <= 1e-13);
  }
}

TEST_CASE("coefficient tables: closed forms and defining identities") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_one(), ctx_zero(), ctx_inf()}) {
    double q = qd(ctx);
    bool inf = ctx.r_infinite();

    // bottom value at the half-spin label
    for (int branch : {1, -1}) {
      if (!inf && ctx.rd() == 0.0 && branch < 0) {
        // at r = 0 the minus eigenvalue still exists formally (lam_- = 0)
      }
      CoeffTable t = build_coeffs(1, branch, 13, ctx);
      double lamb = branch > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d();
      double lamo = branch > 0 ? ctx.lambda_minus_d() : ctx.lambda_plus_d();
      double expect = inf ? branch * ctx.bracket_d(2) / (q * ctx.bracket_d(3))
                          : (lamb / (q * q) - lamo) / ctx.bracket_d(3);
      CHECK(t.beta0(1) == doctest::Approx(expect).epsilon(1e-13));
      INFO(t.report.str());
      CHECK(t.report.pass);
      CHECK(!t.crosscheck_flagged);
    }

    // the zero-label chain starts at zero and has one branch
    CoeffTable z0 = build_coeffs(0, 1, 12, ctx);
    CoeffTable z1 = build_coeffs(0, -1, 12, ctx);
    CHECK(z0.beta0(0) == 0.0);
    for (int l2 = 0; l2 <= 12; l2 += 2) {
      CHECK(z0.beta0(l2) == doctest::Approx(z1.beta0(l2)).epsilon(1e-14));
      CHECK(z0.alphap(l2) == doctest::Approx(z1.alphap(l2)).epsilon(1e-14));
    }
    CHECK(z0.alphap(-2) == 0.0);
  }

  // r = infinity closed form across labels and levels
  ParamContext ci = ctx_inf();
  double q = qd(ci);
  for (int j2 : {1, 2, 3})
    for (int branch : {1, -1}) {
      CoeffTable t = build_coeffs(j2, branch, j2 + 10, ci);
      for (int l2 = j2; l2 <= j2 + 10; l2 += 2)
        CHECK(t.beta0(l2) ==
              doctest::Approx(branch * ci.bracket_d(2) * ci.bracket_d(j2) /
                              (q * ci.bracket_d(l2 + 2)))
                  .epsilon(1e-13));
    }
}

TEST_CASE("classified series: relations, expectations, ladder cross-check") {
  for (const ParamContext& ctx : {ctx_one(), ctx_zero()}) {
    for (int j2s : {0, 1, -1, 2, -2}) {
      int j2 = std::abs(j2s);
      int L2 = j2 + 12;  // L = |j| + 6
      TruncatedRep pi = build_pi_j(j2s, L2, ctx);
      CheckReport r = verify_relations(pi, 1e-9);
      INFO("label ", j2s, ": ", r.str());
      CHECK(r.pass);

      // bottom-level diagonal expectation equals the branch eigenvalue
      CoeffTable cf = build_coeffs(j2, j2s < 0 ? -1 : 1, L2, ctx);
      int bottom_top = j2;  // index of v[|j|, |j|] is the last of the first block
      CHECK(pi.matrix("x0")(bottom_top, bottom_top) ==
            doctest::Approx(cf.beta0(j2)).epsilon(1e-13));
    }

    // j=0: <v00, x0 v00> = 0 matches the vanishing state value
    TruncatedRep p0 = build_pi_j(0, 12, ctx);
    CHECK(std::abs(p0.matrix("x0")(0, 0)) <= 1e-15);
  }

  // lowering generator agrees with its direct closed formula
  ParamContext ctx = ctx_fin();
  int j2 = 1, L2 = 13;
  TruncatedRep pi = build_pi_j(j2, L2, ctx);
  CoeffTable cf = build_coeffs(j2, 1, L2, ctx);
  auto br = [&](int n) { return ctx.bracket_d(n); };
  auto qp = [&](int t2) { return std::pow(ctx.sd(), t2); };
  auto safe = [&](std::initializer_list<int> args) {
    double p = 1.0;
    for (int n : args) {
      if (br(n) == 0.0) return 0.0;
      p *= br(n);
    }
    return std::sqrt(p);
  };
  std::map<std::pair<int, int>, int> idx;
  {
    int i = 0;
    for (int a = j2; a <= L2; a += 2)
      for (int k = -a; k <= a; k += 2) idx[{a, k}] = i++;
  }
  Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(pi.dim(), pi.dim());
  for (int l2 = j2; l2 <= L2; l2 += 2)
    for (int k2 = -l2; k2 <= l2; k2 += 2) {
      int col = idx.at({l2, k2});
      if (l2 + 2 <= L2)
        direct(idx.at({l2 + 2, k2 - 2}), col) =
            qp(l2 + k2) * safe({(l2 - k2) / 2 + 1, (l2 - k2) / 2 + 2}) /
            safe({l2 + 1, l2 + 2}) * cf.alphap(l2);
      if (k2 - 2 >= -l2 && br(l2) != 0.0) {
        double num = safe({(l2 - k2) / 2 + 1, (l2 + k2) / 2, 2});
        if (num != 0.0)
          direct(idx.at({l2, k2 - 2}), col) = qp(k2) * num / br(l2) * cf.beta0(l2);
      }
      if (l2 - 2 >= j2 && k2 - 2 >= -(l2 - 2))
        direct(idx.at({l2 - 2, k2 - 2}), col) =
            -qp(-l2 + k2 - 2) * safe({(l2 + k2) / 2 - 1, (l2 + k2) / 2}) /
            safe({l2 - 1, l2}) * cf.alphap(l2 - 2);
    }
  CHECK((pi.matrix("xm1") - direct).norm() <= 1e-13);
}

TEST_CASE("sphere shift models") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_one(), ctx_inf()}) {
    for (int sign : {1, -1}) {
      TruncatedRep s = build_sigma_pm(sign, 12, ctx);
      CheckReport r = verify_relations(s, 1e-12);
      INFO(r.str());
      CHECK(r.pass);
      // the bottom is exact: B kills eta_0 because c(0) = 0
      CHECK(s.matrix("B").col(0).norm() == 0.0);
      double q = qd(ctx);
      if (ctx.r_infinite()) {
        CHECK(s.matrix("A")(3, 3) ==
              doctest::Approx(sign * std::pow(q, 6)).epsilon(1e-15));
        CHECK(s.matrix("B")(2, 3) ==
              doctest::Approx(std::sqrt(1.0 - std::pow(q, 12))).epsilon(1e-14));
      } else {
        double ls = sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d();
        CHECK(s.matrix("A")(3, 3) == doctest::Approx(ls * std::pow(q, 6)).epsilon(1e-15));
      }
    }
  }
  CHECK_THROWS(build_sigma_pm(-1, 8, ctx_zero()));
  CHECK_NOTHROW(build_sigma_pm(1, 8, ctx_zero()));
}

TEST_CASE("decoupled shift model") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    double q = qd(ctx);
    double rr = ctx.r_infinite() ? 1.0 : ctx.rd();
    double Y0 = 0.7;
    TruncatedRep y = build_Yr_rep(Y0, 12, ctx);
    CheckReport r = verify_relations(y, 1e-12);
    INFO(r.str());
    CHECK(r.pass);
    // Wold pure shift: the adjoint kills the bottom vector
    CHECK(y.matrix("Xst").col(0).norm() == 0.0);
    CHECK(y.matrix("Y")(4, 4) == doctest::Approx(std::pow(q, 8) * Y0).epsilon(1e-15));
    // squared-modulus eigenvalues
    Eigen::MatrixXd X2 = y.matrix("Xst") * y.matrix("X");
    for (int n = 0; n <= 10; ++n) {
      double lamn1 = ctx.lambda_n_d(n + 1);
      CHECK(X2(n, n) == doctest::Approx(lamn1 * lamn1 *
                                        (std::pow(q, 2 * n) * Y0 * Y0 + rr))
                            .epsilon(1e-13));
    }
  }
  CHECK_THROWS(build_Yr_rep(0.0, 8, ctx_fin()));
}

TEST_CASE("double-grid family") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_one()}) {
    double q = qd(ctx);
    double H = 1.0 / std::sqrt(q);
    for (int sign : {1, -1}) {
      TruncatedRep rep = build_I_pm(sign, H, 9, 9, ctx);
      CheckReport r = verify_relations(rep, 1e-9);
      INFO(r.str());
      CHECK(r.pass);
      CHECK(rep.matrix("K")(0, 0) == doctest::Approx(H).epsilon(1e-15));
      // A-spectrum independent of the second index
      double ls = sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d();
      for (int m = 0; m <= 9; ++m)
        CHECK(rep.matrix("A")(2 * 10 + m, 2 * 10 + m) ==
              doctest::Approx(ls * std::pow(q, 4)).epsilon(1e-15));
      // restriction to the sphere generators is the shift model at each m
      TruncatedRep s = build_sigma_pm(sign, 9, ctx);
      double worst = 0.0;
      for (int n = 0; n < 10; ++n)
        for (int n2 = 0; n2 < 10; ++n2)
          for (int m = 0; m <= 9; ++m)
            worst = std::max(worst, std::abs(rep.matrix("B")(n * 10 + m, n2 * 10 + m) -
                                             s.matrix("B")(n, n2)));
      CHECK(worst == 0.0);
      CHECK((rep.matrix("F") - rep.matrix("E").transpose()).norm() == 0.0);
    }
  }
  CHECK_THROWS(build_I_pm(-1, 1.0, 6, 6, ctx_zero()));
  CHECK_THROWS(build_I_pm(1, 1.0, 6, 6, ctx_inf()));
  CHECK_THROWS(build_I_pm(1, 0.0, 6, 6, ctx_fin()));
}

TEST_CASE("chart realizations on the double grid") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_one(), ctx_inf()}) {
    double q = qd(ctx);
    for (int j2s : {0, 1, -1, 2}) {
      for (int sign : {1, -1}) {
        TruncatedRep rep = build_rho_chart(j2s, sign, 8, 8, ctx);
        CheckReport r = verify_relations(rep, 1e-10);
        INFO(r.str());
        CHECK(r.pass);
        double ls = ctx.r_infinite()
                        ? double(sign)
                        : (sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d());
        double Y0 = std::pow(ctx.sd(), 2 * sign * j2s + 2) * ls;
        CHECK(rep.matrix("Y")(0, 0) == doctest::Approx(Y0).epsilon(1e-14));
        CHECK(rep.matrix("Y")(3, 3) == doctest::Approx(std::pow(q, 6) * Y0).epsilon(1e-14));

        // the rep factorizes as (sphere shift) tensor (decoupled shift)
        TruncatedRep s = build_sigma_pm(sign, 8, ctx);
        TruncatedRep y = build_Yr_rep(Y0, 8, ctx);
        double worst = 0.0;
        for (int n = 0; n <= 8; ++n) {
          for (int k = 0; k <= 8; ++k) {
            if (n > 0)
              worst = std::max(worst, std::abs(rep.matrix("B")((n - 1) * 9 + k, n * 9 + k) -
                                               s.matrix("B")(n - 1, n)));
            if (k < 8)
              worst = std::max(worst, std::abs(rep.matrix("X")(n * 9 + k + 1, n * 9 + k) -
                                               y.matrix("X")(k + 1, k)));
          }
        }
        CHECK(worst <= 1e-12);
      }
      // j=0: the decoupled raising weights coincide with the sphere shift
      // weights, which is the right-multiplication model of the flat chart
      if (j2s == 0) {
        for (int sign : {1, -1}) {
          TruncatedRep rep = build_rho_chart(0, sign, 8, 8, ctx);
          double worst = 0.0;
          for (int k = 0; k < 8; ++k) {
            double cw = 0.0;
            if (ctx.r_infinite())
              cw = ctx.lambda_n_d(2 * (k + 1));
            else {
              double ls = sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d();
              double t = std::pow(q, 2 * (k + 1));
              cw = std::sqrt(std::max(ctx.rd() + ls * t - ls * ls * t * t, 0.0));
            }
            worst = std::max(worst, std::abs(rep.matrix("X")(k + 1, k) - cw));
          }
          CHECK(worst <= 1e-13);
        }
      }
    }
  }
  CHECK_THROWS(build_rho_chart(1, -1, 6, 6, ctx_zero()));
}

TEST_CASE("tensor products and decomposition") {
  ParamContext ctx = ctx_fin();

  // pi (x) T_0 = pi
  TruncatedRep p0 = build_pi_j(0, 12, ctx);
  TruncatedRep triv = tensor_rep(p0, 0);
  CHECK((triv.matrix("x0") - p0.matrix("x0")).norm() == 0.0);
  CHECK((triv.matrix("K") - p0.matrix("K")).norm() == 0.0);

  auto expect = [&](const std::vector<Component>& cs, std::vector<int> labels) {
    std::vector<int> got;
    for (const Component& c : cs)
      if (c.resolved) {
        CHECK(c.mult == 1);
        got.push_back(c.j2);
      }
    std::sort(got.begin(), got.end());
    std::sort(labels.begin(), labels.end());
    CHECK(got == labels);
  };

  expect(decompose(tensor_rep(p0, 1)), {-1, 1});
  expect(decompose(tensor_rep(p0, 2)), {-2, 0, 2});
  expect(decompose(tensor_rep(build_pi_j(1, 13, ctx), 1)), {0, 2});
  expect(decompose(tensor_rep(build_pi_j(-1, 13, ctx), 1)), {-2, 0});
  expect(decompose(tensor_rep(build_pi_j(2, 14, ctx), 1)), {1, 3});
  expect(decompose(tensor_rep(build_pi_j(-2, 14, ctx), 1)), {-3, -1});
  expect(decompose(tensor_rep(build_pi_j(1, 15, ctx), 2)), {-1, 1, 3});

  // tensor relations still hold
  CheckReport r = verify_relations(tensor_rep(build_pi_j(1, 11, ctx), 1), 1e-9);
  INFO(r.str());
  CHECK(r.pass);

  // restriction multiplicities: two components, each containing every spin
  auto su2 = decompose_su2(tensor_rep(p0, 1));
  for (auto& [s2, m] : su2) {
    CHECK(s2 % 2 == 1);
    CHECK(m == 2);
  }
  CHECK(su2.size() >= 4);
}

TEST_CASE("Haar-side equivalence and highest-weight expectations") {
  ParamContext ctx = ctx_fin();
  for (int j2s : {0, 1, -1, 2, -2}) {
    CheckReport r = equivalence_pi_vs_bundle(j2s, std::abs(j2s) + 2, ctx);
    INFO("label ", j2s, ": ", r.str());
    CHECK(r.pass);
  }
}

TEST_CASE("adjoint reconstruction and chart grids") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    for (int j2s : {0, 1, -2}) {
      CheckReport r = adjoint_reconstruction_check(j2s, std::abs(j2s) + 20, ctx);
      INFO("label ", j2s, ": ", r.str());
      CHECK(r.pass);
    }
  }
}

TEST_CASE("structural invariants") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_one(), ctx_zero(), ctx_inf()}) {
    CheckReport r = check_rep_invariants(ctx);
    INFO(r.str());
    CHECK(r.pass);
  }
}

TEST_CASE("perturbation controls: contaminated builds must fail") {
  ParamContext bad = ctx_one();
  bad.perturb = 1e-3;

  TruncatedRep pi = build_pi_j(1, 13, bad);
  CheckReport r = verify_relations(pi, 1e-9);
  CHECK(!r.pass);
  CHECK(r.max_residual > 1e-3);

  CHECK_THROWS(decompose(tensor_rep(pi, 1)));

  CoeffTable t = build_coeffs(1, 1, 13, bad);
  CHECK(!t.report.pass);
  CHECK(t.crosscheck_flagged);
}

TEST_CASE("precondition violations") {
  CHECK_THROWS(build_pi_j(1, 2, ctx_fin()));   // parity mismatch
  CHECK_THROWS(build_pi_j(3, 1, ctx_fin()));   // truncation below the label
  CHECK_THROWS(build_coeffs(-1, 1, 5, ctx_fin()));
  CHECK_THROWS(build_coeffs(1, 0, 5, ctx_fin()));
  CHECK_THROWS(build_Tl(-1, ctx_fin()));
}
