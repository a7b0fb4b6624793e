#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsphere/ncpoly.hpp>

using namespace qsphere;

static const std::vector<std::string> kAllIds = {
    "Uq_su2",    "Uq_su2_hat",        "O_SUq2",
    "O_S2qr",    "O_S2qr_localized",  "cross_EFK",
    "cross_efk", "cross_decoupled_XY", "cross_decoupled_XK",
    "Yr"};

TEST_CASE("normal form basics") {
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(2)));
  Presentation p = make_presentation("Uq_su2", ctx);
  // KE = qEK means the word K E is already normal and E K reduces
  NCPoly ek = p.normal_form(p.poly({"E", "K"}));
  CHECK(ek.terms.size() == 1);
  CHECK(ek.terms.count({"K", "E"}) == 1);
  CHECK((ek.terms.at({"K", "E"}) - Scalar::q_pow(-1).reduce_q(ctx.q)).is_zero());
  // and the relation itself: KE - qEK normal-forms to zero
  CHECK(p.nf_is_zero(p.sub(p.poly({"K", "E"}),
                           p.poly({"E", "K"}, Scalar::q_pow(1)))));

  Presentation sp = make_presentation("O_S2qr_localized", ctx);
  CHECK(sp.nf_equal(sp.poly({"A", "Ainv"}), sp.unit()));
  CHECK(sp.nf_equal(sp.poly({"Ainv", "A"}), sp.unit()));
  // B*B - BB* = (1-q^2)A - (1-q^4)A^2
  NCPoly lhs = sp.sub(sp.poly({"Bst", "B"}), sp.poly({"B", "Bst"}));
  NCPoly rhs = sp.add(sp.gen("A", Scalar(1) - Scalar::q_pow(2)),
                      sp.poly({"A", "A"}, Scalar::q_pow(4) - Scalar(1)));
  CHECK(sp.nf_equal(lhs, rhs));
}

TEST_CASE("confluence and involution for every presentation, r in {0, 2, inf}") {
  for (auto rm : {RMode::finite(Rational(0)), RMode::finite(Rational(2)),
                  RMode::infinite()}) {
    ParamContext ctx(Rational(1, 2), rm);
    for (const auto& id : kAllIds) {
      Presentation p = make_presentation(id, ctx);
      CheckReport conf = check_confluence(p, 6);
      INFO(id, " confluence:\n", [&] {
        std::string s;
        for (auto& l : conf.lines) s += l + "\n";
        return s;
      }());
      CHECK(conf.pass);
      CheckReport inv = check_involution(p);
      INFO(id, " involution");
      CHECK(inv.pass);
    }
  }
}

TEST_CASE("commutant of the decoupled generators") {
  for (auto rm : {RMode::finite(Rational(0)), RMode::finite(Rational(2)),
                  RMode::infinite()}) {
    ParamContext ctx(Rational(1, 2), rm);
    CheckReport rep = check_commutant(ctx);
    INFO([&] {
      std::string s;
      for (auto& l : rep.lines) s += l + "\n";
      return s;
    }());
    CHECK(rep.pass);
  }
}

TEST_CASE("decoupling identities") {
  for (auto rm : {RMode::finite(Rational(0)), RMode::finite(Rational(1)),
                  RMode::finite(Rational(2)), RMode::infinite()}) {
    ParamContext ctx(Rational(1, 2), rm);
    CheckReport rep = check_decoupling_identities(ctx);
    INFO([&] {
      std::string s;
      for (auto& l : rep.lines) s += l + "\n";
      return s;
    }());
    CHECK(rep.pass);
  }
}

TEST_CASE("negative control: perturbed rules break the checks") {
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(2)));
  ctx.perturb = 1e-3;
  Presentation p = make_presentation("cross_EFK", ctx);
  bool conf_ok = check_confluence(p, 4).pass;
  bool dec_ok = check_decoupling_identities(ctx).pass;
  CHECK_FALSE((conf_ok && dec_ok));
  CHECK_FALSE(check_commutant(ctx).pass);
}

TEST_CASE("element parser") {
  ParamContext ctx(Rational(1, 2), RMode::finite(Rational(2)));
  Presentation p = make_presentation("O_SUq2", ctx);
  NCPoly x = parse_element(p, "a d - q b c");
  CHECK(p.nf_equal(x, p.unit()));
  NCPoly y = parse_element(p, "q^(1/2) a^2 + 3/4 (b c - c b)");
  NCPoly expect = p.poly({"a", "a"}, Scalar::s_pow(1));
  CHECK(p.nf_equal(y, expect));
  CHECK_THROWS(parse_element(p, "a +"));
  CHECK_THROWS(parse_element(p, "zqz"));
}
