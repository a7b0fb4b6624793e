#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsphere/bundle.hpp>
#include <qsphere/haar.hpp>

using namespace qsphere;

namespace {
ParamContext ctx_fin() { return {Rational(1, 2), RMode::finite(Rational(2))}; }
ParamContext ctx_zero() { return {Rational(1, 2), RMode::finite(Rational(0))}; }
ParamContext ctx_inf() { return {Rational(2, 5), RMode::infinite()}; }
}  // namespace

TEST_CASE("closed-form state values agree with the solved table") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    Bundle bun(ctx);
    HaarTable tab(ctx, 8);
    const Presentation& A = bun.A();
    std::vector<NCPoly> samples = {
        A.unit(),
        A.poly({"b", "c"}),
        A.poly({"b", "b", "c", "c"}),
        A.poly({"a", "d"}),
        A.normal_form(A.mul(A.poly({"a", "b"}), A.poly({"c", "d"}))),
        A.add(A.poly({"b", "c", "b", "c"}, Scalar(3)), A.gen("a", Scalar(Rational(1, 2)))),
    };
    for (const NCPoly& x : samples)
      CHECK((bun.haar_su2(x) - tab.haar(x)).reduce_q(ctx.q).is_zero());
  }
}

TEST_CASE("ladder seeds are X_r eigenvectors with distinct eigenvalues") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    Bundle bun(ctx);
    CheckReport rep = bun.check_mu_spectrum({-3, -2, -1, 0, 1, 2, 3});
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("module basis invariants (j2 = 1, 0, -1)") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_inf()}) {
    Bundle bun(ctx);
    for (int j2 : {1, 0, -1}) {
      CheckReport rep("basis");
      bun.build_basis(j2, j2 == 0 ? 4 : std::abs(j2) + 4, &rep);
      INFO(rep.str());
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("projector identities (j2 = +-1, +-2)") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    Bundle bun(ctx);
    for (int j2 : {1, -1, 2, -2, 0}) {
      CheckReport rep = bun.check_projector(bun.build_projector(j2));
      INFO(rep.str());
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("isometry of the module chart map") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_inf()}) {
    Bundle bun(ctx);
    for (int j2 : {1, -1, 2}) {
      CheckReport rep = bun.psi_isometry_check(j2, 2);
      INFO(rep.str());
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("chart factorization and frame identities") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    Bundle bun(ctx);
    CheckReport rep = bun.chart_identities(3);
    INFO(rep.str());
    CHECK(rep.pass);
  }
}

TEST_CASE("chart matrices satisfy the commutation relations") {
  for (const ParamContext& ctx : {ctx_fin(), ctx_zero(), ctx_inf()}) {
    Bundle bun(ctx);
    for (int j2 : {0, 1, 2, 3}) {
      CheckReport rep = bun.chart_matrices(j2);
      INFO(rep.str());
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("cross-module orthogonality and completeness") {
  Bundle bun(ctx_fin());
  CheckReport rep = bun.check_orthogonality(2);
  INFO(rep.str());
  CHECK(rep.pass);
}

TEST_CASE("perturbation knob breaks the exact layer") {
  ParamContext ctx = ctx_fin();
  ctx.perturb = 1e-3;
  Bundle bun(ctx);
  // the nudged rewrite rule breaks the exact chart factorizations
  CheckReport rep = bun.chart_identities(1);
  CHECK_FALSE(rep.pass);
}
