#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <qsphere/haar.hpp>

using namespace qsphere;

namespace {
ParamContext ctx_fin() { return ParamContext(Rational(1, 2), RMode::finite(Rational(2))); }
ParamContext ctx_zero() { return ParamContext(Rational(1, 2), RMode::finite(Rational(0))); }
ParamContext ctx_inf() { return ParamContext(Rational(2, 5), RMode::infinite()); }
}  // namespace

TEST_CASE("invariant state table: closed form, uniqueness and invariance") {
  for (const auto& ctx : {ctx_fin(), ParamContext(Rational(2, 3), RMode::finite(Rational(1)))}) {
    CheckReport rep = check_haar_table(ctx, 8);
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("invariant state values at q = 1/2") {
  ParamContext ctx = ctx_fin();
  HaarTable h(ctx, 6);
  // h(bc) = -q(1-q^2)/(1-q^4) = -q/(1+q^2) = -2/5
  CHECK(h.balanced_values()[1] == Rational(-2, 5));
  // h((bc)^2) = q^2 (1-q^2)/(1-q^6) = 4/21
  CHECK(h.balanced_values()[2] == Rational(4, 21));
  const Presentation& A = h.algebra();
  // h(ad) = h(1 + q bc) = 1 + q h(bc)
  Scalar had = h.haar(A.mul(A.gen("a"), A.gen("d")));
  Scalar expect = (Scalar::one() + Scalar::q_pow(1) * Scalar(Rational(-2, 5))).reduce_q(ctx.q);
  CHECK(had == expect);
  // inner(a, a) = h(a* a) = h(da) = 1 + q^{-1} h(bc)
  Scalar iaa = h.inner(A.gen("a"), A.gen("a"));
  Scalar expect2 = (Scalar::one() + Scalar::q_pow(-1) * Scalar(Rational(-2, 5))).reduce_q(ctx.q);
  CHECK(iaa == expect2);
}

TEST_CASE("function-calculus algebra relations") {
  for (const auto& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    FuncAlgebra fa(ctx);
    const double q = ctx.qd();
    const int N = 30;
    const bool minus_sector = !(ctx.r.kind == RMode::Finite && ctx.r.r == 0);
    for (int sign : {+1, -1}) {
      if (sign < 0 && !minus_sector) continue;
      auto A = fa.materialize(fa.gen_A(), sign, N);
      auto B = fa.materialize(fa.gen_B(), sign, N);
      auto Bst = fa.materialize(fa.gen_Bst(), sign, N);
      // BA = q^2 AB
      auto BA = fa.materialize(fa.mul(fa.gen_B(), fa.gen_A()), sign, N);
      auto AB = fa.materialize(fa.mul(fa.gen_A(), fa.gen_B()), sign, N);
      double worst = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) worst = std::max(worst, std::abs(BA[i][j] - q * q * AB[i][j]));
      CHECK(worst < 1e-12);
      // B^* B = (lam_+ - A)(A - lam_-) as functions of A
      auto BstB = fa.materialize(fa.mul(fa.gen_Bst(), fa.gen_B()), sign, N);
      double worst2 = 0;
      for (int n = 1; n < N; ++n) {
        double a = fa.a_eig(sign, n);
        worst2 = std::max(worst2, std::abs(BstB[n][n] - fa.p_r(a)));
      }
      CHECK(worst2 < 1e-12);
      // star is the adjoint: mat(star(x)) = mat(x)^T on a sample
      FuncElement x = fa.mul(fa.gen_B(), fa.gen_A());
      auto X = fa.materialize(x, sign, N);
      auto Xs = fa.materialize(fa.star(x), sign, N);
      double worst3 = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) worst3 = std::max(worst3, std::abs(Xs[i][j] - X[j][i]));
      CHECK(worst3 < 1e-12);
    }
  }
}

TEST_CASE("difference-operator actions match commutator forms") {
  for (const auto& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    CheckReport rep = check_operator_actions(ctx);
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("action on generators matches the cross-relation coefficients") {
  ParamContext ctx = ctx_fin();
  FuncAlgebra fa(ctx);
  const double q = ctx.qd();
  const int N = 20;
  // E.A = q^{-1/2} B^*, F.A = -q^{-3/2} B, K.A = A
  auto close = [&](const FuncElement& u, const FuncElement& v) {
    auto U = fa.materialize(u, +1, N);
    auto V = fa.materialize(v, +1, N);
    double worst = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) worst = std::max(worst, std::abs(U[i][j] - V[i][j]));
    return worst;
  };
  CHECK(close(fa.act("E", fa.gen_A()), fa.scale(1 / std::sqrt(q), fa.gen_Bst())) < 1e-12);
  CHECK(close(fa.act("F", fa.gen_A()), fa.scale(-std::pow(q, -1.5), fa.gen_B())) < 1e-12);
  CHECK(close(fa.act("K", fa.gen_A()), fa.gen_A()) < 1e-12);
  // E.B = -q^{1/2}(1+q^2) A + q^{1/2}
  FuncElement eb = fa.add(fa.scale(-std::sqrt(q) * (1 + q * q), fa.gen_A()),
                          fa.scale(std::sqrt(q), FuncElement::one()));
  CHECK(close(fa.act("E", fa.gen_B()), eb) < 1e-12);
  // F.B^* = q^{-1/2}(1+q^2) A - q^{-1/2}
  FuncElement fbst = fa.add(fa.scale((1 + q * q) / std::sqrt(q), fa.gen_A()),
                            fa.scale(-1 / std::sqrt(q), FuncElement::one()));
  CHECK(close(fa.act("F", fa.gen_Bst()), fbst) < 1e-12);
  // E.B^* = 0, F.B = 0
  CHECK(close(fa.act("E", fa.gen_Bst()), FuncElement::zero()) < 1e-12);
  CHECK(close(fa.act("F", fa.gen_B()), FuncElement::zero()) < 1e-12);
  // K.B = q^{-1} B
  CHECK(close(fa.act("K", fa.gen_B()), fa.scale(1 / q, fa.gen_B())) < 1e-12);
}

TEST_CASE("state properties: invariance, counterexample, twisted trace") {
  for (const auto& ctx : {ctx_fin(), ctx_zero(), ctx_inf(),
                          ParamContext(Rational(1, 2), RMode::finite(Rational(1)))}) {
    CheckReport rep = check_state_properties(ctx);
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("series and trace realizations agree") {
  for (const auto& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    CheckReport rep = check_state_realizations(ctx);
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("perturbation knob breaks state invariance") {
  ParamContext ctx = ctx_fin();
  ctx.perturb = 1e-3;
  FuncAlgebra fa(ctx);
  FuncElement x = fa.mul(fa.gen_B(), fa.mul(fa.gen_A(), fa.gen_A()));
  double v = fa.sphere_state_series(fa.act("E", x), 1e-13);
  CHECK(std::abs(v) > 1e-7);
}
