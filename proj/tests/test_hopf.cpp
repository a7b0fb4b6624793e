#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsphere/hopf.hpp>

using namespace qsphere;

TEST_CASE("left action on generators matches the pairing table") {
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(2)));
  Hopf h(ctx);
  const Presentation& A = h.A();
  const Presentation& U = h.U();
  // E |> a = b, E |> c = d, E kills b and d
  CHECK(A.nf_equal(h.act_left(U.gen("E"), A.gen("a")), A.gen("b")));
  CHECK(A.nf_equal(h.act_left(U.gen("E"), A.gen("c")), A.gen("d")));
  CHECK(h.act_left(U.gen("E"), A.gen("b")).is_zero());
  CHECK(h.act_left(U.gen("E"), A.gen("d")).is_zero());
  // F |> b = a, F |> d = c
  CHECK(A.nf_equal(h.act_left(U.gen("F"), A.gen("b")), A.gen("a")));
  CHECK(A.nf_equal(h.act_left(U.gen("F"), A.gen("d")), A.gen("c")));
  // K scales by the weight
  CHECK(A.nf_equal(h.act_left(U.gen("K"), A.gen("d")),
                   A.gen("d", Scalar::s_pow(1))));
  CHECK(A.nf_equal(h.act_left(U.gen("K"), A.gen("a")),
                   A.gen("a", Scalar::s_pow(-1))));
  // 1 <| X_r has the counit value 0
  CHECK(h.act_right(A.unit(), h.Xr()).is_zero());
}

TEST_CASE("hopf axioms across regimes") {
  for (auto rm : {RMode::finite(Rational(0)), RMode::finite(Rational(2)),
                  RMode::infinite()}) {
    ParamContext ctx(Rational(1, 2), rm);
    Hopf h(ctx);
    CheckReport rep = check_hopf_axioms(h);
    INFO([&] {
      std::string s;
      for (auto& l : rep.lines) s += l + "\n";
      return s;
    }());
    CHECK(rep.pass);
  }
}

TEST_CASE("embedded sphere generators are right X_r-invariant") {
  for (auto rm : {RMode::finite(Rational(0)), RMode::finite(Rational(2)),
                  RMode::infinite()}) {
    ParamContext ctx(Rational(1, 2), rm);
    Hopf h(ctx);
    CheckReport rep = check_sphere_invariance(h);
    INFO([&] {
      std::string s;
      for (auto& l : rep.lines) s += l + "\n";
      return s;
    }());
    CHECK(rep.pass);
  }
}

TEST_CASE("theta on generators") {
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(1)));
  Hopf h(ctx);
  const Presentation& A = h.A();
  CHECK(A.nf_equal(h.theta(A.gen("b")), A.gen("c", -Scalar::q_pow(1))));
  CHECK(A.nf_equal(h.theta(A.gen("c")), A.gen("b", -Scalar::q_pow(-1))));
  CHECK(A.nf_equal(h.theta(A.mul(A.gen("a"), A.gen("b"))),
                   A.scale(-Scalar::q_pow(1), A.mul(A.gen("a"), A.gen("c")))));
}
