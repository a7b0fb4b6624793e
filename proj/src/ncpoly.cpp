#include <qsphere/ncpoly.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <stdexcept>

namespace qsphere {

NCPoly Presentation::star(const NCPoly& a) const {
  NCPoly out;
  for (const auto& [w, c] : a.terms) {
    Scalar coef = c.conj();
    Word img;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      auto st = star_table.find(*it);
      if (st == star_table.end())
        throw std::runtime_error(name + ": no involution entry for " + *it);
      coef = coef * st->second.first;
      img.insert(img.end(), st->second.second.begin(), st->second.second.end());
    }
    out = add(out, poly(img, coef));
  }
  return out;
}

namespace {
constexpr size_t kStepGuard = 4'000'000;
}

NCPoly Presentation::normal_form(const NCPoly& x) const {
  NCPoly out;
  std::vector<std::pair<Word, Scalar>> work(x.terms.begin(), x.terms.end());
  size_t steps = 0;
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    c = red(c);
    if (c.is_zero()) continue;
    size_t pos = w.size();
    const NCPoly* rhs = nullptr;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      auto it = rules.find({w[i], w[i + 1]});
      if (it != rules.end()) {
        pos = i;
        rhs = &it->second;
        break;
      }
    }
    if (!rhs) {
      add_term(out, w, c);
      continue;
    }
    if (++steps > kStepGuard)
      throw std::runtime_error(name + ": normal_form step guard exceeded");
    for (const auto& [rw, rc] : rhs->terms) {
      Word nw(w.begin(), w.begin() + pos);
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), w.begin() + pos + 2, w.end());
      work.emplace_back(std::move(nw), c * rc);
    }
  }
  return out;
}

namespace {

// Convenience builder for rule sets.
struct Builder {
  Presentation p;
  Rational q;

  explicit Builder(const std::string& name, const ParamContext& ctx) {
    p.name = name;
    p.q = ctx.q;
    p.rmode = ctx.r;
    q = ctx.q;
  }
  Scalar qs(int half_exp) const { return Scalar::s_pow(half_exp); }  // q^{half_exp/2}
  void sym(const Sym& g, const Scalar& star_c, const Word& star_w) {
    p.alphabet.push_back(g);
    p.star_table[g] = {star_c, star_w};
  }
  void sym_sa(const Sym& g) { sym(g, Scalar(1), {g}); }  // self-adjoint
  void rule(const Sym& x, const Sym& y, const NCPoly& rhs) {
    p.rules[{x, y}] = p.normal_form(rhs);  // pre-normalize against earlier rules
  }
  // x y -> q^{k/2} y x
  void qcomm(const Sym& x, const Sym& y, int k) {
    rule(x, y, p.poly({y, x}, qs(k)));
  }
  void unit_pair(const Sym& u, const Sym& uinv) {
    rule(u, uinv, p.unit());
    rule(uinv, u, p.unit());
  }
  NCPoly w(std::initializer_list<Sym> syms, const Scalar& c = Scalar(1)) {
    return p.poly(Word(syms), c);
  }
};

void add_uq_rules(Builder& b, const Scalar& linv) {
  // PBW order F^a K^b E^c
  b.unit_pair("K", "Kinv");
  b.qcomm("E", "K", -2);
  b.qcomm("E", "Kinv", 2);
  b.qcomm("K", "F", -2);
  b.qcomm("Kinv", "F", 2);
  b.rule("E", "F",
         b.p.add(b.w({"F", "E"}),
                 b.p.sub(b.w({"K", "K"}, linv), b.w({"Kinv", "Kinv"}, linv))));
}

void add_sphere_rules(Builder& b, bool localized) {
  const bool inf = b.p.rmode.kind == RMode::Inf;
  Scalar r = Scalar::r_value(b.p.rmode);  // r, or 1 in the infinite regime
  // normal monomials A^m B^n and A^m Bst^n (A-part leftmost so B and Bst
  // always meet; m ranges over Z when localized)
  b.qcomm("B", "A", 4);
  b.qcomm("Bst", "A", -4);
  {
    NCPoly rhs = b.p.sub(b.p.unit(r), b.w({"A", "A"}));
    if (!inf) rhs = b.p.add(rhs, b.w({"A"}));
    b.rule("Bst", "B", rhs);
  }
  {
    NCPoly rhs = b.p.sub(b.p.unit(r), b.w({"A", "A"}, b.qs(8)));
    if (!inf) rhs = b.p.add(rhs, b.w({"A"}, b.qs(4)));
    b.rule("B", "Bst", rhs);
  }
  if (localized) {
    b.unit_pair("A", "Ainv");
    b.qcomm("B", "Ainv", -4);
    b.qcomm("Bst", "Ainv", 4);
  }
}

// enveloping-past-coordinate moves of the EFK cross product
void add_cross_rules(Builder& b, bool localized) {
  const bool inf = b.p.rmode.kind == RMode::Inf;
  const Rational eps = b.p.q * 0;  // zero; placeholder for clarity
  (void)eps;
  Scalar one(1);
  Scalar bracket2 = Scalar(1) + Scalar::q_pow(2);  // 1 + q^2
  // K and Kinv
  b.qcomm("K", "A", 0);
  b.qcomm("Kinv", "A", 0);
  b.qcomm("K", "B", -2);
  b.qcomm("Kinv", "B", 2);
  b.qcomm("K", "Bst", 2);
  b.qcomm("Kinv", "Bst", -2);
  // E
  b.rule("E", "A", b.p.add(b.w({"A", "E"}), b.w({"Bst", "K"}, b.qs(-1))));
  {
    NCPoly rhs = b.p.sub(b.w({"B", "E"}, b.qs(2)),
                         b.p.mul(b.w({"A", "K"}, b.qs(1)), b.p.unit(bracket2)));
    if (!inf) rhs = b.p.add(rhs, b.w({"K"}, b.qs(1)));
    b.rule("E", "B", rhs);
  }
  b.qcomm("E", "Bst", -2);
  // F
  b.rule("F", "A", b.p.sub(b.w({"A", "F"}), b.w({"B", "K"}, b.qs(-3))));
  b.qcomm("F", "B", 2);
  {
    NCPoly rhs = b.p.add(b.w({"Bst", "F"}, b.qs(-2)),
                         b.p.mul(b.w({"A", "K"}, b.qs(-1)), b.p.unit(bracket2)));
    if (!inf) rhs = b.p.sub(rhs, b.w({"K"}, b.qs(-1)));
    b.rule("F", "Bst", rhs);
  }
  if (localized) {
    b.qcomm("K", "Ainv", 0);
    b.qcomm("Kinv", "Ainv", 0);
    b.rule("E", "Ainv",
           b.p.sub(b.w({"Ainv", "E"}), b.w({"Bst", "Ainv", "Ainv", "K"}, b.qs(-5))));
    b.rule("F", "Ainv",
           b.p.add(b.w({"Ainv", "F"}), b.w({"B", "Ainv", "Ainv", "K"}, b.qs(1))));
  }
  (void)one;
}

}  // namespace

Presentation make_presentation(const std::string& id, const ParamContext& ctx) {
  Builder b(id, ctx);
  Scalar linv = qlambda_const_inv(ctx.q);
  const bool inf = ctx.r_infinite();
  Scalar r = ctx.r.kind == RMode::Any ? Scalar(0) : Scalar::r_value(ctx.r);
  Scalar bracket2 = Scalar(1) + Scalar::q_pow(2);

  if (id == "Uq_su2") {
    b.sym("F", Scalar(1), {"E"});
    b.sym_sa("Kinv");
    b.sym_sa("K");
    b.sym("E", Scalar(1), {"F"});
    add_uq_rules(b, linv);
  } else if (id == "Uq_su2_hat") {
    // e = EK, f = K^{-1}F, k = K^2; so e* = k f and f* = e k^{-1}
    b.sym("f", Scalar(1), {"e", "kinv"});
    b.sym_sa("kinv");
    b.sym_sa("k");
    b.sym("e", Scalar(1), {"k", "f"});
    b.unit_pair("k", "kinv");
    b.qcomm("e", "k", -4);
    b.qcomm("e", "kinv", 4);
    b.qcomm("k", "f", -4);
    b.qcomm("kinv", "f", 4);
    b.rule("e", "f",
           b.p.add(b.w({"f", "e"}),
                   b.p.sub(b.w({"k"}, linv), b.w({"kinv"}, linv))));
  } else if (id == "O_SUq2") {
    b.sym("a", Scalar(1), {"d"});
    b.sym("b", -Scalar::q_pow(1), {"c"});
    b.sym("c", -Scalar::q_pow(-1), {"b"});
    b.sym("d", Scalar(1), {"a"});
    // normal monomials b^j c^k d^i and b^j c^k a^m (a pushed rightmost and
    // d leftward so that every a...d pair meets and cancels)
    b.qcomm("a", "b", 2);
    b.qcomm("a", "c", 2);
    b.qcomm("d", "b", -2);
    b.qcomm("d", "c", -2);
    b.qcomm("c", "b", 0);
    b.rule("a", "d", b.p.add(b.p.unit(), b.w({"b", "c"}, b.qs(2))));
    b.rule("d", "a", b.p.add(b.p.unit(), b.w({"b", "c"}, b.qs(-2))));
  } else if (id == "O_S2qr" || id == "O_S2qr_localized") {
    bool loc = id == "O_S2qr_localized";
    b.sym("B", Scalar(1), {"Bst"});
    b.sym_sa("A");
    if (loc) b.sym_sa("Ainv");
    b.sym("Bst", Scalar(1), {"B"});
    add_sphere_rules(b, loc);
  } else if (id == "cross_EFK") {
    b.sym("B", Scalar(1), {"Bst"});
    b.sym_sa("A");
    b.sym_sa("Ainv");
    b.sym("Bst", Scalar(1), {"B"});
    b.sym("F", Scalar(1), {"E"});
    b.sym_sa("Kinv");
    b.sym_sa("K");
    b.sym("E", Scalar(1), {"F"});
    add_sphere_rules(b, /*localized=*/true);
    add_uq_rules(b, linv);
    add_cross_rules(b, /*localized=*/true);
  } else if (id == "cross_efk") {
    b.sym("B", Scalar(1), {"Bst"});
    b.sym_sa("A");
    b.sym_sa("Ainv");
    b.sym("Bst", Scalar(1), {"B"});
    b.sym("f", Scalar(1), {"e", "kinv"});
    b.sym_sa("kinv");
    b.sym_sa("k");
    b.sym("e", Scalar(1), {"k", "f"});
    add_sphere_rules(b, /*localized=*/true);
    b.unit_pair("k", "kinv");
    b.qcomm("e", "k", -4);
    b.qcomm("e", "kinv", 4);
    b.qcomm("k", "f", -4);
    b.qcomm("kinv", "f", 4);
    b.rule("e", "f",
           b.p.add(b.w({"f", "e"}),
                   b.p.sub(b.w({"k"}, linv), b.w({"kinv"}, linv))));
    // cross moves, derived from the EFK list via e = EK, f = K^{-1}F, k = K^2
    b.qcomm("k", "A", 0);
    b.qcomm("kinv", "A", 0);
    b.qcomm("k", "Ainv", 0);
    b.qcomm("kinv", "Ainv", 0);
    b.qcomm("k", "B", -4);
    b.qcomm("kinv", "B", 4);
    b.qcomm("k", "Bst", 4);
    b.qcomm("kinv", "Bst", -4);
    b.rule("e", "A", b.p.add(b.w({"A", "e"}), b.w({"Bst", "k"}, b.qs(-1))));
    b.rule("e", "Ainv",
           b.p.sub(b.w({"Ainv", "e"}), b.w({"Bst", "Ainv", "Ainv", "k"}, b.qs(-5))));
    {
      NCPoly rhs = b.p.sub(b.w({"B", "e"}),
                           b.p.mul(b.w({"A", "k"}, b.qs(-1)), b.p.unit(bracket2)));
      if (!inf) rhs = b.p.add(rhs, b.w({"k"}, b.qs(-1)));
      b.rule("e", "B", rhs);
    }
    b.qcomm("e", "Bst", 0);
    b.rule("f", "A", b.p.sub(b.w({"A", "f"}), b.w({"B"}, b.qs(-1))));
    b.rule("f", "Ainv",
           b.p.add(b.w({"Ainv", "f"}), b.w({"B", "Ainv", "Ainv"}, b.qs(3))));
    b.qcomm("f", "B", 4);
    {
      NCPoly rhs = b.p.add(b.w({"Bst", "f"}, b.qs(-4)),
                           b.p.mul(b.w({"A"}, b.qs(-1)), b.p.unit(bracket2)));
      if (!inf) rhs = b.p.sub(rhs, b.p.unit(b.qs(-1)));
      b.rule("f", "Bst", rhs);
    }
  } else if (id == "cross_decoupled_XY" || id == "Yr") {
    bool with_sphere = id != "Yr";
    if (with_sphere) {
      b.sym("B", Scalar(1), {"Bst"});
      b.sym_sa("A");
      b.sym_sa("Ainv");
      b.sym("Bst", Scalar(1), {"B"});
    }
    b.sym("X", Scalar(1), {"Xst"});
    b.sym_sa("Y");
    b.sym_sa("Yinv");
    b.sym("Xst", Scalar(1), {"X"});
    if (with_sphere) add_sphere_rules(b, /*localized=*/true);
    b.unit_pair("Y", "Yinv");
    b.qcomm("Y", "X", 4);
    b.qcomm("Yinv", "X", -4);
    b.qcomm("Xst", "Y", 4);
    b.qcomm("Xst", "Yinv", -4);
    {
      Scalar c = Scalar(1) - Scalar::q_pow(2);
      b.rule("Xst", "X",
             b.p.add(b.w({"X", "Xst"}, b.qs(4)),
                     b.p.add(b.w({"Y", "Y"}, c), b.p.unit(c * r))));
    }
    if (with_sphere)
      for (Sym u : {"X", "Xst", "Y", "Yinv"})
        for (Sym s : {"B", "A", "Ainv", "Bst"}) b.qcomm(u, s, 0);
  } else if (id == "cross_decoupled_XK") {
    b.sym("B", Scalar(1), {"Bst"});
    b.sym_sa("A");
    b.sym_sa("Ainv");
    b.sym("Bst", Scalar(1), {"B"});
    b.sym("X", Scalar(1), {"Xst"});
    b.sym_sa("Kinv");
    b.sym_sa("K");
    b.sym("Xst", Scalar(1), {"X"});
    add_sphere_rules(b, /*localized=*/true);
    b.unit_pair("K", "Kinv");
    // K relations with the sphere part (BK = qKB etc.)
    b.qcomm("K", "A", 0);
    b.qcomm("Kinv", "A", 0);
    b.qcomm("K", "Ainv", 0);
    b.qcomm("Kinv", "Ainv", 0);
    b.qcomm("K", "B", -2);
    b.qcomm("Kinv", "B", 2);
    b.qcomm("K", "Bst", 2);
    b.qcomm("Kinv", "Bst", -2);
    // X, X* commute with the sphere part
    for (Sym u : {"X", "Xst"})
      for (Sym s : {"B", "A", "Ainv", "Bst"}) b.qcomm(u, s, 0);
    // XK = qKX and its adjoint (derived inside the EFK cross product and
    // verified there; needed here to order words)
    b.qcomm("K", "X", -2);
    b.qcomm("Kinv", "X", 2);
    b.qcomm("K", "Xst", 2);
    b.qcomm("Kinv", "Xst", -2);
    {
      Scalar c = Scalar(1) - Scalar::q_pow(2);
      NCPoly quart = b.p.poly({"A", "A", "Kinv", "Kinv", "Kinv", "Kinv"}, c * Scalar::q_pow(2));
      b.rule("Xst", "X", b.p.add(b.w({"X", "Xst"}, b.qs(4)),
                                 b.p.add(quart, b.p.unit(c * r))));
    }
  } else {
    throw std::runtime_error("make_presentation: unknown id " + id);
  }

  // negative-control knob for the exact presentation suite: nudge the
  // E B (resp. e B / Xst X) rule by 1/1000
  if (ctx.perturb != 0.0) {
    for (auto key : {std::pair<Sym, Sym>{"E", "B"}, {"e", "B"}, {"a", "d"},
                     {"Xst", "X"}, {"Bst", "B"}, {"E", "F"}}) {
      auto it = b.p.rules.find(key);
      if (it != b.p.rules.end() && !it->second.terms.empty()) {
        Scalar& c0 = it->second.terms.begin()->second;
        c0 = b.p.red(c0 * (Scalar(1) + Scalar(Rational(1, 1000))));
        break;
      }
    }
  }
  return b.p;
}

namespace {

// enumerate all words over the alphabet of the given length
void enum_words(const std::vector<Sym>& alpha, size_t len, Word& cur,
                const std::function<void(const Word&)>& fn) {
  if (cur.size() == len) {
    fn(cur);
    return;
  }
  for (const auto& g : alpha) {
    cur.push_back(g);
    enum_words(alpha, len, cur, fn);
    cur.pop_back();
  }
}

// normal form with rightmost-first reduction, as an independent strategy
NCPoly normal_form_rightmost(const Presentation& p, const NCPoly& x) {
  NCPoly out;
  std::vector<std::pair<Word, Scalar>> work(x.terms.begin(), x.terms.end());
  size_t steps = 0;
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    c = c.reduce_q(p.q);
    if (c.is_zero()) continue;
    size_t pos = w.size();
    const NCPoly* rhs = nullptr;
    for (size_t i = w.size(); i-- > 1;) {
      auto it = p.rules.find({w[i - 1], w[i]});
      if (it != p.rules.end()) {
        pos = i - 1;
        rhs = &it->second;
        break;
      }
    }
    if (!rhs) {
      NCPoly t;
      t.terms[w] = c;
      out = p.add(out, t);
      continue;
    }
    if (++steps > 4'000'000)
      throw std::runtime_error("normal_form_rightmost: step guard");
    for (const auto& [rw, rc] : rhs->terms) {
      Word nw(w.begin(), w.begin() + pos);
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), w.begin() + pos + 2, w.end());
      work.emplace_back(std::move(nw), c * rc);
    }
  }
  return out;
}

}  // namespace

CheckReport check_confluence(const Presentation& p, int max_degree) {
  CheckReport rep("confluence[" + p.name + "]");
  // 1) all two-rule overlaps x y z: reduce (x y) z first vs x (y z) first
  int overlaps = 0, bad = 0;
  for (const auto& [lhs1, rhs1] : p.rules)
    for (const auto& [lhs2, rhs2] : p.rules) {
      if (lhs1.second != lhs2.first) continue;
      ++overlaps;
      Word w = {lhs1.first, lhs1.second, lhs2.second};
      NCPoly left = p.mul(rhs1, p.gen(lhs2.second));
      NCPoly right = p.mul(p.gen(lhs1.first), rhs2);
      if (!p.nf_equal(left, right)) {
        ++bad;
        rep.check(false, "overlap " + word_str(w) + " not confluent");
      }
    }
  rep.check(bad == 0, std::to_string(overlaps) + " overlaps resolved consistently");
  // 2) leftmost vs rightmost reduction agree on all short words, and on
  //    random words up to max_degree
  int mismatches = 0;
  size_t tested = 0;
  int exhaustive_len = p.alphabet.size() > 6 ? 3 : 4;
  for (int len = 2; len <= exhaustive_len; ++len) {
    Word cur;
    enum_words(p.alphabet, len, cur, [&](const Word& w) {
      ++tested;
      NCPoly x = p.poly(w);
      if (!(p.normal_form(x).terms == normal_form_rightmost(p, x).terms)) ++mismatches;
    });
  }
  std::mt19937 rng(12345);
  std::uniform_int_distribution<size_t> pick(0, p.alphabet.size() - 1);
  for (int t = 0; t < 300; ++t) {
    size_t len = 2 + rng() % static_cast<size_t>(std::max(1, max_degree - 1));
    Word w;
    for (size_t i = 0; i < len; ++i) w.push_back(p.alphabet[pick(rng)]);
    ++tested;
    NCPoly x = p.poly(w);
    if (!(p.normal_form(x).terms == normal_form_rightmost(p, x).terms)) ++mismatches;
  }
  rep.check(mismatches == 0, "strategy independence on " + std::to_string(tested) +
                                 " words up to degree " + std::to_string(max_degree));
  return rep;
}

CheckReport check_involution(const Presentation& p, unsigned seed) {
  CheckReport rep("involution[" + p.name + "]");
  std::mt19937 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, p.alphabet.size() - 1);
  auto random_elem = [&](int max_deg) {
    NCPoly out;
    int nterms = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nterms; ++t) {
      Word w;
      size_t len = 1 + rng() % static_cast<size_t>(max_deg);
      for (size_t i = 0; i < len; ++i) w.push_back(p.alphabet[pick(rng)]);
      int num = 1 + static_cast<int>(rng() % 5);
      int den = 1 + static_cast<int>(rng() % 5);
      out = p.add(out, p.poly(w, Scalar(Rational(num, den))));
    }
    return out;
  };
  // x** = x on generators
  bool invol_ok = true;
  for (const auto& g : p.alphabet)
    invol_ok = invol_ok && p.nf_equal(p.star(p.star(p.gen(g))), p.gen(g));
  rep.check(invol_ok, "star is an involution on generators");
  // (xy)* = y* x* after normalization, and star commutes with normal_form
  int fails = 0;
  for (int t = 0; t < 20; ++t) {
    NCPoly x = random_elem(3), y = random_elem(3);
    if (!p.nf_equal(p.star(p.mul(x, y)), p.mul(p.star(y), p.star(x)))) ++fails;
    if (!p.nf_equal(p.star(p.normal_form(x)), p.star(x))) ++fails;
  }
  rep.check(fails == 0, "(xy)* = y*x* and star/normal_form compatibility, 20 samples");
  return rep;
}

namespace {

struct Decoupled {
  NCPoly X, Xst, Y, Yinv, lam;  // lam = q - q^{-1} as a 0-degree element
};

Decoupled build_xy(const Presentation& p) {
  Decoupled d;
  Scalar lam = qlambda_const();
  d.X = p.add(p.poly({"F", "Kinv", "A"}, Scalar::s_pow(3) * lam),
              p.poly({"B"}, Scalar::q_pow(1)));
  d.Xst = p.add(p.poly({"A", "Kinv", "E"}, Scalar::s_pow(3) * lam),
                p.poly({"Bst"}, Scalar::q_pow(1)));
  d.Y = p.poly({"Kinv", "Kinv", "A"}, Scalar::q_pow(1));
  d.Yinv = p.poly({"K", "K", "Ainv"}, Scalar::q_pow(-1));
  return d;
}

}  // namespace

CheckReport check_commutant(const ParamContext& ctx) {
  CheckReport rep("commutant");
  Presentation p = make_presentation("cross_EFK", ctx);
  Decoupled d = build_xy(p);
  const bool bad = ctx.perturb != 0.0;
  std::vector<std::pair<std::string, NCPoly>> elems = {
      {"X", bad ? p.gen("E") : d.X}, {"X*", d.Xst}, {"Y", d.Y}, {"Yinv", d.Yinv}};
  for (const auto& [nm, u] : elems)
    for (Sym s : {"A", "B", "Bst"})
      rep.check(p.nf_is_zero(p.commutator(u, p.gen(s))),
                "[" + nm + ", " + s + "] = 0");
  // the deliberate non-example: E never commutes with B
  if (!bad)
    rep.check(!p.nf_is_zero(p.commutator(p.gen("E"), p.gen("B"))),
              "[E, B] != 0 (control)");
  return rep;
}

CheckReport check_decoupling_identities(const ParamContext& ctx) {
  CheckReport rep("decoupling");
  Presentation p = make_presentation("cross_EFK", ctx);
  Scalar lam = qlambda_const();
  Scalar linv = qlambda_const_inv(ctx.q);
  Decoupled d = build_xy(p);
  // both stated orderings of X and X* agree
  NCPoly X2 = p.add(p.poly({"A", "F", "Kinv"}, Scalar::s_pow(3) * lam),
                    p.poly({"B"}, Scalar::q_pow(-1)));
  NCPoly Xst2 = p.add(p.poly({"Kinv", "E", "A"}, Scalar::s_pow(3) * lam),
                      p.poly({"Bst"}, Scalar::q_pow(-1)));
  rep.check(p.nf_equal(d.X, X2), "two orderings of X agree");
  rep.check(p.nf_equal(d.Xst, Xst2), "two orderings of X* agree");
  rep.check(p.nf_equal(p.star(d.X), d.Xst), "X* is the involute of X");
  rep.check(p.nf_equal(p.star(d.Y), d.Y), "Y self-adjoint");
  // unit pair for Y
  rep.check(p.nf_equal(p.mul(d.Y, d.Yinv), p.unit()), "Y Yinv = 1");
  // XY commutation relations
  rep.check(p.nf_is_zero(p.sub(p.mul(d.Y, d.X), p.scale(Scalar::q_pow(2), p.mul(d.X, d.Y)))),
            "YX = q^2 XY");
  rep.check(p.nf_is_zero(p.sub(p.mul(d.Y, d.Xst),
                               p.scale(Scalar::q_pow(-2), p.mul(d.Xst, d.Y)))),
            "YX* = q^-2 X*Y");
  {
    Scalar r = Scalar::r_value(ctx.r);
    Scalar c = Scalar(1) - Scalar::q_pow(2);
    NCPoly lhs = p.sub(p.mul(d.Xst, d.X), p.scale(Scalar::q_pow(2), p.mul(d.X, d.Xst)));
    NCPoly rhs = p.add(p.scale(c, p.mul(d.Y, d.Y)), p.unit(c * r));
    rep.check(p.nf_equal(lhs, rhs), "X*X - q^2 XX* = (1-q^2)(Y^2 + r)");
  }
  // k = q Y^{-1} A recovers K^2
  rep.check(p.nf_equal(p.scale(Scalar::q_pow(1), p.mul(d.Yinv, p.gen("A"))),
                       p.poly({"K", "K"})),
            "q Yinv A = K^2");
  // f = q^{-1/2} lam^{-1} (X - qB) A^{-1} recovers K^{-1}F
  {
    NCPoly f = p.scale(Scalar::s_pow(-1) * linv,
                       p.mul(p.sub(d.X, p.poly({"B"}, Scalar::q_pow(1))), p.gen("Ainv")));
    rep.check(p.nf_equal(f, p.poly({"F", "Kinv"}, Scalar::q_pow(1))),
              "f formula recovers K^-1 F");
  }
  // e = q^{1/2} lam^{-1} (X* - q^{-1}B*) Y^{-1} recovers EK
  {
    NCPoly e = p.scale(Scalar::s_pow(1) * linv,
                       p.mul(p.sub(d.Xst, p.poly({"Bst"}, Scalar::q_pow(-1))), d.Yinv));
    rep.check(p.nf_equal(e, p.poly({"K", "E"}, Scalar::q_pow(-1))), "e formula recovers EK");
  }
  // F and E reconstructions
  {
    NCPoly F = p.scale(Scalar::s_pow(-3) * linv,
                       p.mul({p.sub(d.X, p.poly({"B"}, Scalar::q_pow(1))), p.gen("K"),
                              p.gen("Ainv")}));
    rep.check(p.nf_equal(F, p.gen("F")), "F = q^-3/2 lam^-1 (X - qB) K A^-1");
    NCPoly E = p.scale(Scalar::s_pow(-3) * linv,
                       p.mul({p.gen("Ainv"), p.gen("K"),
                              p.sub(d.Xst, p.poly({"Bst"}, Scalar::q_pow(1)))}));
    rep.check(p.nf_equal(E, p.gen("E")), "E = q^-3/2 lam^-1 A^-1 K (X* - qB*)");
  }
  // q-commutation with K, commutation of Y with K, and the K-variant of the
  // third relation
  rep.check(p.nf_is_zero(p.sub(p.mul(d.X, p.gen("K")),
                               p.scale(Scalar::q_pow(1), p.mul(p.gen("K"), d.X)))),
            "XK = qKX");
  rep.check(p.nf_is_zero(p.commutator(d.Y, p.gen("K"))), "YK = KY");
  {
    Scalar r = Scalar::r_value(ctx.r);
    Scalar c = Scalar(1) - Scalar::q_pow(2);
    NCPoly lhs = p.sub(p.mul(d.Xst, d.X), p.scale(Scalar::q_pow(2), p.mul(d.X, d.Xst)));
    NCPoly rhs = p.add(
        p.poly({"A", "A", "Kinv", "Kinv", "Kinv", "Kinv"}, c * Scalar::q_pow(2)),
        p.unit(c * r));
    rep.check(p.nf_equal(lhs, rhs), "X*X - q^2 XX* = (1-q^2)(q^2 K^-4 A^2 + r)");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// element parser

namespace {

struct Parser {
  const Presentation& p;
  std::string s;
  size_t i = 0;

  explicit Parser(const Presentation& pres, std::string text)
      : p(pres), s(std::move(text)) {}

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("parse error at position " + std::to_string(i) + ": " + msg);
  }

  NCPoly parse() {
    NCPoly out = expr();
    skip();
    if (i != s.size()) fail("trailing input");
    return out;
  }
  NCPoly expr() {
    NCPoly out = eat('-') ? p.scale(Scalar(-1), term()) : term();
    for (;;) {
      skip();
      if (eat('+'))
        out = p.add(out, term());
      else if (eat('-'))
        out = p.sub(out, term());
      else
        return out;
    }
  }
  NCPoly term() {
    NCPoly out = factor();
    for (;;) {
      skip();
      if (i >= s.size() || s[i] == '+' || s[i] == '-' || s[i] == ')') return out;
      if (eat('*')) {
        out = p.mul(out, factor());
        continue;
      }
      out = p.mul(out, factor());
    }
  }
  int parse_int() {
    skip();
    bool neg = eat('-');
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected integer");
    int v = std::stoi(s.substr(start, i - start));
    return neg ? -v : v;
  }
  NCPoly factor() {
    skip();
    if (i >= s.size()) fail("expected factor");
    if (eat('(')) {
      NCPoly inner = expr();
      if (!eat(')')) fail("expected )");
      return maybe_power(inner);
    }
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      int num = parse_int();
      if (eat('/')) {
        int den = parse_int();
        return p.unit(Scalar(Rational(num, den)));
      }
      return p.unit(Scalar(num));
    }
    // q^(p/2) literal or q^k
    if (s[i] == 'q' && (i + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1])))) {
      ++i;
      if (eat('^')) {
        if (eat('(')) {
          int num = parse_int();
          int den = eat('/') ? parse_int() : 1;
          if (!eat(')')) fail("expected ) in q exponent");
          if (den != 1 && den != 2) fail("q exponent denominator must be 1 or 2");
          return p.unit(den == 1 ? Scalar::s_pow(2 * num) : Scalar::s_pow(num));
        }
        return p.unit(Scalar::q_pow(parse_int()));
      }
      return p.unit(Scalar::q_pow(1));
    }
    // generator name: longest match against the alphabet
    size_t best = 0;
    Sym found;
    for (const auto& g : p.alphabet)
      if (g.size() > best && s.compare(i, g.size(), g) == 0) {
        best = g.size();
        found = g;
      }
    if (best == 0) fail("unknown symbol");
    i += best;
    return maybe_power(p.gen(found));
  }
  NCPoly maybe_power(const NCPoly& base) {
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      int n = parse_int();
      if (n < 0) fail("negative powers not supported; use the inverse generator");
      return p.pow(base, n);
    }
    return base;
  }
};

}  // namespace

NCPoly parse_element(const Presentation& p, const std::string& text) {
  return Parser(p, text).parse();
}

}  // namespace qsphere
