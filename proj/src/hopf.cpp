#include <qsphere/hopf.hpp>

#include <functional>
#include <random>
#include <stdexcept>
#include <tuple>

namespace qsphere {

namespace {

Scalar counit_letter(const Sym& g, bool in_U) {
  if (in_U) {
    if (g == "K" || g == "Kinv") return Scalar(1);
    if (g == "E" || g == "F") return Scalar(0);
  } else {
    if (g == "a" || g == "d") return Scalar(1);
    if (g == "b" || g == "c") return Scalar(0);
  }
  throw std::runtime_error("counit: unknown generator " + g);
}

}  // namespace

Hopf::Hopf(const ParamContext& ctx)
    : ctx_(ctx),
      U_(make_presentation("Uq_su2", ctx)),
      A_(make_presentation("O_SUq2", ctx)) {
  auto tp = [&](const Presentation& p,
                std::initializer_list<std::pair<Word, Word>> legs,
                std::initializer_list<Scalar> coeffs) {
    TensorPoly out;
    auto c = coeffs.begin();
    for (const auto& [l, r] : legs) tp_add(out, l, r, *c++, p);
    return out;
  };
  gen_cop_U_["E"] = tp(U_, {{{"E"}, {"K"}}, {{"Kinv"}, {"E"}}}, {Scalar(1), Scalar(1)});
  gen_cop_U_["F"] = tp(U_, {{{"F"}, {"K"}}, {{"Kinv"}, {"F"}}}, {Scalar(1), Scalar(1)});
  gen_cop_U_["K"] = tp(U_, {{{"K"}, {"K"}}}, {Scalar(1)});
  gen_cop_U_["Kinv"] = tp(U_, {{{"Kinv"}, {"Kinv"}}}, {Scalar(1)});
  gen_cop_A_["a"] = tp(A_, {{{"a"}, {"a"}}, {{"b"}, {"c"}}}, {Scalar(1), Scalar(1)});
  gen_cop_A_["b"] = tp(A_, {{{"a"}, {"b"}}, {{"b"}, {"d"}}}, {Scalar(1), Scalar(1)});
  gen_cop_A_["c"] = tp(A_, {{{"c"}, {"a"}}, {{"d"}, {"c"}}}, {Scalar(1), Scalar(1)});
  gen_cop_A_["d"] = tp(A_, {{{"c"}, {"b"}}, {{"d"}, {"d"}}}, {Scalar(1), Scalar(1)});
}

void Hopf::tp_add(TensorPoly& a, const Word& l, const Word& r, const Scalar& c,
                  const Presentation& p) const {
  NCPoly ln = p.normal_form(p.poly(l, c));
  NCPoly rn = p.normal_form(p.poly(r));
  for (const auto& [lw, lc] : ln.terms)
    for (const auto& [rw, rc] : rn.terms) {
      auto key = std::make_pair(lw, rw);
      auto it = a.terms.find(key);
      Scalar add = p.red(lc * rc);
      if (it == a.terms.end()) {
        if (!add.is_zero()) a.terms[key] = add;
      } else {
        it->second = p.red(it->second + add);
        if (it->second.is_zero()) a.terms.erase(it);
      }
    }
}

TensorPoly Hopf::tp_mul(const TensorPoly& a, const TensorPoly& b,
                        const Presentation& p) const {
  TensorPoly out;
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      Word l = ka.first, r = ka.second;
      l.insert(l.end(), kb.first.begin(), kb.first.end());
      r.insert(r.end(), kb.second.begin(), kb.second.end());
      tp_add(out, l, r, ca * cb, p);
    }
  return out;
}

TensorPoly Hopf::cop_word(const Word& w, bool in_U) const {
  const Presentation& p = in_U ? U_ : A_;
  auto& cache = in_U ? cop_cache_U_ : cop_cache_A_;
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
  }
  TensorPoly out;
  if (w.empty()) {
    tp_add(out, {}, {}, Scalar(1), p);
  } else {
    const auto& gc = in_U ? gen_cop_U_ : gen_cop_A_;
    auto it = gc.find(w[0]);
    if (it == gc.end()) throw std::runtime_error("coproduct: unknown generator " + w[0]);
    out = tp_mul(it->second, cop_word(Word(w.begin() + 1, w.end()), in_U), p);
  }
  std::lock_guard<std::mutex> lk(mu_);
  cache.emplace(w, out);
  return out;
}

TensorPoly Hopf::coproduct(const NCPoly& x, const std::string& alg) const {
  bool in_U = alg == "Uq_su2";
  if (!in_U && alg != "O_SUq2")
    throw std::runtime_error("coproduct: unsupported algebra " + alg);
  const Presentation& p = in_U ? U_ : A_;
  TensorPoly out;
  for (const auto& [w, c] : x.terms) {
    TensorPoly dw = cop_word(w, in_U);
    for (const auto& [k, ck] : dw.terms) tp_add(out, k.first, k.second, c * ck, p);
  }
  return out;
}

Scalar Hopf::counit(const NCPoly& x, const std::string& alg) const {
  bool in_U = alg == "Uq_su2";
  if (!in_U && alg != "O_SUq2")
    throw std::runtime_error("counit: unsupported algebra " + alg);
  Scalar out(0);
  for (const auto& [w, c] : x.terms) {
    Scalar t = c;
    for (const auto& g : w) t = t * counit_letter(g, in_U);
    out = out + t;
  }
  return out.reduce_q(ctx_.q);
}

NCPoly Hopf::antipode_U(const NCPoly& f) const {
  NCPoly out;
  for (const auto& [w, c] : f.terms) {
    Scalar coef = c;
    Word img;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      if (*it == "K")
        img.push_back("Kinv");
      else if (*it == "Kinv")
        img.push_back("K");
      else if (*it == "E") {
        img.push_back("E");
        coef = coef * (-Scalar::q_pow(1));
      } else if (*it == "F") {
        img.push_back("F");
        coef = coef * (-Scalar::q_pow(-1));
      } else {
        throw std::runtime_error("antipode: unknown generator " + *it);
      }
    }
    out = U_.add(out, U_.poly(img, coef));
  }
  return U_.normal_form(out);
}

Scalar Hopf::pair_words(const Word& f, const Word& x) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = pair_cache_.find({f, x});
    if (it != pair_cache_.end()) return it->second;
  }
  Scalar out(0);
  if (f.empty()) {
    out = Scalar(1);
    for (const auto& g : x) out = out * counit_letter(g, false);
  } else if (x.empty()) {
    out = Scalar(1);
    for (const auto& g : f) out = out * counit_letter(g, true);
  } else if (f.size() == 1) {
    const Sym& g = f[0];
    if (x.size() == 1) {
      const Sym& y = x[0];
      if (g == "K")
        out = y == "a" ? Scalar::s_pow(-1) : y == "d" ? Scalar::s_pow(1) : Scalar(0);
      else if (g == "Kinv")
        out = y == "a" ? Scalar::s_pow(1) : y == "d" ? Scalar::s_pow(-1) : Scalar(0);
      else if (g == "E")
        out = y == "c" ? Scalar(1) : Scalar(0);
      else if (g == "F")
        out = y == "b" ? Scalar(1) : Scalar(0);
      else
        throw std::runtime_error("pairing: unknown generator " + g);
    } else {
      // <g, y z> = sum <g_(1), y><g_(2), z>
      const TensorPoly& dg = gen_cop_U_.at(g);
      Word y = {x[0]}, z(x.begin() + 1, x.end());
      for (const auto& [k, c] : dg.terms)
        out = out + c * pair_words(k.first, y) * pair_words(k.second, z);
    }
  } else {
    // <g h, x> = sum <g, x_(1)><h, x_(2)>
    Word g = {f[0]}, h(f.begin() + 1, f.end());
    TensorPoly dx = cop_word(x, false);
    for (const auto& [k, c] : dx.terms)
      out = out + c * pair_words(g, k.first) * pair_words(h, k.second);
  }
  out = out.reduce_q(ctx_.q);
  std::lock_guard<std::mutex> lk(mu_);
  pair_cache_.emplace(std::make_pair(f, x), out);
  return out;
}

Scalar Hopf::pairing(const NCPoly& f, const NCPoly& x) const {
  Scalar out(0);
  for (const auto& [wf, cf] : f.terms)
    for (const auto& [wx, cx] : x.terms) out = out + cf * cx * pair_words(wf, wx);
  return out.reduce_q(ctx_.q);
}

NCPoly Hopf::act_left(const NCPoly& f, const NCPoly& x) const {
  NCPoly out;
  for (const auto& [wx, cx] : x.terms) {
    TensorPoly dx = cop_word(wx, false);
    for (const auto& [k, ck] : dx.terms) {
      Scalar val(0);
      for (const auto& [wf, cf] : f.terms) val = val + cf * pair_words(wf, k.second);
      out = A_.add(out, A_.poly(k.first, cx * ck * val));
    }
  }
  return A_.normal_form(out);
}

NCPoly Hopf::act_right(const NCPoly& x, const NCPoly& f) const {
  NCPoly out;
  for (const auto& [wx, cx] : x.terms) {
    TensorPoly dx = cop_word(wx, false);
    for (const auto& [k, ck] : dx.terms) {
      Scalar val(0);
      for (const auto& [wf, cf] : f.terms) val = val + cf * pair_words(wf, k.first);
      out = A_.add(out, A_.poly(k.second, cx * ck * val));
    }
  }
  return A_.normal_form(out);
}

NCPoly Hopf::Xr() const {
  NCPoly k2 = U_.poly({"K", "K"});
  if (ctx_.r.kind == RMode::Finite && ctx_.r.r == 0)
    return U_.sub(U_.unit(), k2);  // 1 - K^2
  NCPoly ek = U_.normal_form(U_.poly({"E", "K"}));
  NCPoly fk = U_.normal_form(U_.poly({"F", "K"}, Scalar::q_pow(1)));
  NCPoly shift = U_.add(ek, fk);
  if (ctx_.r_infinite()) return shift;
  // q^{1/2}(q^{-1}-q)^{-1} r^{-1/2} (1 - K^2) + EK + qFK
  Scalar linv = qlambda_const_inv(ctx_.q);
  Scalar rinv_sqrt = Scalar::sqrt_r(ctx_.r) * Scalar(Rational(1) / ctx_.r.r);
  Scalar pre = Scalar::s_pow(1) * (-linv) * rinv_sqrt;
  return U_.add(U_.scale(pre, U_.sub(U_.unit(), k2)), shift);
}

Hopf::SphereGens Hopf::embed_sphere_generators() const {
  SphereGens g;
  double qd = ctx_.qd();
  g.radical_factor = std::sqrt(1.0 + 1.0 / (qd * qd));
  Scalar q2 = Scalar::q_pow(2), qm2 = Scalar::q_pow(-2);
  if (ctx_.r_infinite()) {
    // x_{-1} ~ a^2 - q c^2, x_0 = (1+q^-2)(ab - q^2 dc), x_1 ~ b^2 - q d^2
    g.xm1 = A_.sub(A_.poly({"a", "a"}), A_.poly({"c", "c"}, Scalar::q_pow(1)));
    g.x0 = A_.scale(Scalar(1) + qm2,
                    A_.sub(A_.poly({"a", "b"}), A_.poly({"d", "c"}, q2)));
    g.x1 = A_.sub(A_.poly({"b", "b"}), A_.poly({"d", "d"}, Scalar::q_pow(1)));
  } else {
    Scalar rr = Scalar::sqrt_r(ctx_.r);
    g.xm1 = A_.add(A_.poly({"a", "a"}, rr),
                   A_.sub(A_.poly({"a", "c"}), A_.poly({"c", "c"}, rr * Scalar::q_pow(1))));
    g.x0 = A_.add(
        A_.add(A_.poly({"a", "b"}, (Scalar(1) + qm2) * rr), A_.unit()),
        A_.sub(A_.poly({"b", "c"}, Scalar::q_pow(1) + Scalar::q_pow(-1)),
               A_.poly({"d", "c"}, (Scalar(1) + q2) * rr)));
    g.x1 = A_.add(A_.poly({"b", "b"}, rr),
                  A_.sub(A_.poly({"b", "d"}), A_.poly({"d", "d"}, rr * Scalar::q_pow(1))));
  }
  g.xm1 = A_.normal_form(g.xm1);
  g.x0 = A_.normal_form(g.x0);
  g.x1 = A_.normal_form(g.x1);
  return g;
}

NCPoly Hopf::theta(const NCPoly& x) const {
  NCPoly out;
  for (const auto& [w, c] : x.terms) {
    Scalar coef = c;
    Word img;
    for (const auto& g : w) {
      if (g == "a" || g == "d") {
        img.push_back(g);
      } else if (g == "b") {
        img.push_back("c");
        coef = coef * (-Scalar::q_pow(1));
      } else if (g == "c") {
        img.push_back("b");
        coef = coef * (-Scalar::q_pow(-1));
      } else {
        throw std::runtime_error("theta: unknown generator " + g);
      }
    }
    out = A_.add(out, A_.poly(img, coef));
  }
  return A_.normal_form(out);
}

Scalar Hopf::mu_j(int j2) const {
  if (ctx_.r.kind == RMode::Finite && ctx_.r.r == 0)
    return Scalar(1) - Scalar::s_pow(2 * j2);  // 1 - q^{2j}
  Scalar linv = qlambda_const_inv(ctx_.q);
  Scalar pre = Scalar::s_pow(1) * (-linv);  // q^{1/2}(q^{-1}-q)^{-1}
  if (ctx_.r_infinite())
    return pre * (Scalar::s_pow(-2 * j2) - Scalar::s_pow(2 * j2));
  Scalar rinv_sqrt = Scalar::sqrt_r(ctx_.r) * Scalar(Rational(1) / ctx_.r.r);
  Scalar lp = Scalar::lambda_plus(ctx_.r), lm = Scalar::lambda_minus(ctx_.r);
  return pre * rinv_sqrt *
         (Scalar(1) - Scalar::s_pow(-2 * j2) * lm - Scalar::s_pow(2 * j2) * lp);
}

CheckReport check_hopf_axioms(const Hopf& h, unsigned seed) {
  CheckReport rep("hopf");
  const Presentation& U = h.U();
  const Presentation& A = h.A();
  const Rational& q = h.ctx().q;
  std::mt19937 rng(seed);

  auto random_elem = [&](const Presentation& p, int max_deg) {
    std::uniform_int_distribution<size_t> pick(0, p.alphabet.size() - 1);
    NCPoly out;
    int nterms = 1 + static_cast<int>(rng() % 2);
    for (int t = 0; t < nterms; ++t) {
      Word w;
      size_t len = 1 + rng() % static_cast<size_t>(max_deg);
      for (size_t i = 0; i < len; ++i) w.push_back(p.alphabet[pick(rng)]);
      out = p.add(out, p.poly(w, Scalar(Rational(1 + static_cast<int>(rng() % 4),
                                                 1 + static_cast<int>(rng() % 3)))));
    }
    return p.normal_form(out);
  };

  // triple coproduct of x computed both ways, keyed on (w1,w2,w3)
  auto coassoc_ok = [&](const NCPoly& x, const std::string& alg) {
    bool in_U = alg == "Uq_su2";
    const Presentation& p = in_U ? U : A;
    TensorPoly d = h.coproduct(x, alg);
    std::map<std::tuple<Word, Word, Word>, Scalar> lhs, rhs;
    auto put = [&](auto& m, const Word& w1, const Word& w2, const Word& w3, Scalar c) {
      auto key = std::make_tuple(w1, w2, w3);
      auto it = m.find(key);
      if (it == m.end())
        m[key] = c.reduce_q(q);
      else
        it->second = (it->second + c).reduce_q(q);
    };
    for (const auto& [k, c] : d.terms) {
      TensorPoly dl = h.coproduct(p.poly(k.first), alg);
      for (const auto& [kl, cl] : dl.terms) put(lhs, kl.first, kl.second, k.second, c * cl);
      TensorPoly dr = h.coproduct(p.poly(k.second), alg);
      for (const auto& [kr, cr] : dr.terms) put(rhs, k.first, kr.first, kr.second, c * cr);
    }
    for (const auto& [k, c] : lhs) {
      auto it = rhs.find(k);
      Scalar diff = it == rhs.end() ? c : (c - it->second).reduce_q(q);
      if (!diff.is_zero()) return false;
    }
    for (const auto& [k, c] : rhs)
      if (!lhs.count(k) && !c.is_zero()) return false;
    return true;
  };
  auto counit_laws_ok = [&](const NCPoly& x, const std::string& alg) {
    const Presentation& p = alg == "Uq_su2" ? U : A;
    TensorPoly d = h.coproduct(x, alg);
    NCPoly left, right;
    for (const auto& [k, c] : d.terms) {
      left = p.add(left, p.poly(k.second, c * h.counit(p.poly(k.first), alg)));
      right = p.add(right, p.poly(k.first, c * h.counit(p.poly(k.second), alg)));
    }
    return p.nf_equal(left, x) && p.nf_equal(right, x);
  };

  bool co_ok = true, cu_ok = true;
  for (const auto& g : U.alphabet) {
    co_ok = co_ok && coassoc_ok(U.gen(g), "Uq_su2");
    cu_ok = cu_ok && counit_laws_ok(U.gen(g), "Uq_su2");
  }
  for (const auto& g : A.alphabet) {
    co_ok = co_ok && coassoc_ok(A.gen(g), "O_SUq2");
    cu_ok = cu_ok && counit_laws_ok(A.gen(g), "O_SUq2");
  }
  for (int t = 0; t < 5; ++t) {
    co_ok = co_ok && coassoc_ok(random_elem(U, 3), "Uq_su2") &&
            coassoc_ok(random_elem(A, 3), "O_SUq2");
    cu_ok = cu_ok && counit_laws_ok(random_elem(U, 3), "Uq_su2") &&
            counit_laws_ok(random_elem(A, 3), "O_SUq2");
  }
  rep.check(co_ok, "coassociativity on generators and random elements");
  rep.check(cu_ok, "counit laws on generators and random elements");

  // pairing respects the U relations: <EF - FE - lam^-1(K^2-K^-2), x> = 0
  {
    Scalar linv = qlambda_const_inv(q);
    NCPoly rel = U.sub(U.sub(U.poly({"E", "F"}), U.poly({"F", "E"})),
                       U.scale(linv, U.sub(U.poly({"K", "K"}), U.poly({"Kinv", "Kinv"}))));
    bool ok = true;
    Word cur;
    std::function<void(size_t)> walk = [&](size_t len) {
      if (cur.size() == len) {
        ok = ok && h.pairing(rel, A.poly(cur)).is_zero();
        return;
      }
      for (const auto& g : A.alphabet) {
        cur.push_back(g);
        walk(len);
        cur.pop_back();
      }
    };
    for (size_t len = 0; len <= 3 && ok; ++len) walk(len);
    rep.check(ok, "pairing kills the EF relation on all degree <= 3 monomials");
  }
  // pairing factors through A relations: <f, x> = <f, nf(x)>
  {
    bool ok = true;
    for (int t = 0; t < 6; ++t) {
      std::uniform_int_distribution<size_t> pick(0, A.alphabet.size() - 1);
      Word w;
      for (int i = 0; i < 4; ++i) w.push_back(A.alphabet[pick(rng)]);
      NCPoly raw = A.poly(w);
      NCPoly f = random_elem(U, 3);
      Scalar d = h.pairing(f, raw) - h.pairing(f, A.normal_form(raw));
      ok = ok && d.reduce_q(q).is_zero();
    }
    rep.check(ok, "pairing factors through coordinate relations");
  }
  // sample pairing values
  rep.check((h.pairing(U.gen("K"), A.gen("a")) - Scalar::s_pow(-1).reduce_q(q)).is_zero(),
            "<K, a> = q^-1/2");
  rep.check(h.pairing(U.gen("E"), A.gen("b")).is_zero(), "<E, b> = 0");

  // module-algebra law for f in {E,F,K}
  {
    bool ok = true;
    std::map<Sym, std::vector<std::tuple<Sym, Sym, Scalar>>> legs = {
        {"E", {{"E", "K", Scalar(1)}, {"Kinv", "E", Scalar(1)}}},
        {"F", {{"F", "K", Scalar(1)}, {"Kinv", "F", Scalar(1)}}},
        {"K", {{"K", "K", Scalar(1)}}}};
    for (int t = 0; t < 6; ++t) {
      NCPoly x = random_elem(A, 3), y = random_elem(A, 3);
      for (const auto& [g, lg] : legs) {
        NCPoly lhs = h.act_left(U.gen(g), A.mul(x, y));
        NCPoly rhs;
        for (const auto& [g1, g2, c] : lg)
          rhs = A.add(rhs, A.scale(c, A.mul(h.act_left(U.gen(g1), x),
                                            h.act_left(U.gen(g2), y))));
        ok = ok && A.nf_equal(lhs, rhs);
      }
    }
    rep.check(ok, "module-algebra law f |> (xy) = (f1 |> x)(f2 |> y)");
  }
  // unit actions and the star- compatibility (f |> x)* = S(f)* |> x*
  {
    bool ok = true;
    for (int t = 0; t < 4; ++t) {
      NCPoly x = random_elem(A, 3);
      ok = ok && A.nf_equal(h.act_left(U.unit(), x), x);
      for (const auto& g : {"E", "F", "K"}) {
        NCPoly f = U.gen(g);
        NCPoly lhs = A.star(h.act_left(f, x));
        NCPoly rhs = h.act_left(U.star(h.antipode_U(f)), A.star(x));
        ok = ok && A.nf_equal(lhs, rhs);
      }
    }
    rep.check(ok, "unit action and (f |> x)* = S(f)* |> x*");
  }
  // skew-primitivity of X_r
  {
    NCPoly X = h.Xr();
    TensorPoly d = h.coproduct(X, "Uq_su2");
    // expected: 1 (x) X_r + X_r (x) K^2
    TensorPoly manual;
    auto addkey = [&](const Word& l, const Word& r, const Scalar& cc) {
      auto key = std::make_pair(l, r);
      auto it = manual.terms.find(key);
      if (it == manual.terms.end()) {
        manual.terms[key] = cc.reduce_q(q);
      } else {
        it->second = (it->second + cc).reduce_q(q);
        if (it->second.is_zero()) manual.terms.erase(it);
      }
    };
    for (const auto& [w, c] : X.terms) {
      addkey({}, w, c);
      addkey(w, {"K", "K"}, c);
    }
    bool ok = true;
    for (const auto& [k, c] : d.terms) {
      auto it = manual.terms.find(k);
      Scalar diff = it == manual.terms.end() ? c : (c - it->second).reduce_q(q);
      if (!diff.is_zero()) ok = false;
    }
    for (const auto& [k, c] : manual.terms)
      if (!d.terms.count(k) && !c.is_zero()) ok = false;
    rep.check(ok, "Delta(X_r) = 1 (x) X_r + X_r (x) K^2");
  }
  // theta is an involutive *-automorphism
  {
    bool ok = true;
    for (int t = 0; t < 4; ++t) {
      NCPoly x = random_elem(A, 3), y = random_elem(A, 3);
      ok = ok && A.nf_equal(h.theta(h.theta(x)), x);
      ok = ok && A.nf_equal(h.theta(A.mul(x, y)), A.mul(h.theta(x), h.theta(y)));
      ok = ok && A.nf_equal(h.theta(A.star(x)), A.star(h.theta(x)));
    }
    rep.check(ok, "theta: involutive *-automorphism");
  }
  return rep;
}

CheckReport check_sphere_invariance(const Hopf& h) {
  CheckReport rep("sphere-invariance");
  const Presentation& A = h.A();
  auto g = h.embed_sphere_generators();
  NCPoly X = h.Xr();
  rep.check(A.nf_is_zero(h.act_right(g.xm1, X)), "x_{-1} <| X_r = 0");
  rep.check(A.nf_is_zero(h.act_right(g.x0, X)), "x_0 <| X_r = 0");
  rep.check(A.nf_is_zero(h.act_right(g.x1, X)), "x_1 <| X_r = 0");
  rep.check(A.nf_is_zero(h.act_right(A.unit(), X)), "1 <| X_r = 0");
  if (!h.ctx().r_infinite())
    rep.check((h.counit(g.x0, "O_SUq2") - Scalar(1)).reduce_q(h.ctx().q).is_zero(),
              "counit(x_0) = 1");
  // the embedded elements satisfy the sphere presentation: with
  // B = x_{-1}', B* = -q^{-1} x_1', A = (1 - x_0)/(1+q^2) (resp. -x_0/(1+q^2))
  {
    Scalar inv1q2 = (Scalar(1) + Scalar::q_pow(2)).reduce_q(h.ctx().q).inverse_at(h.ctx().q);
    NCPoly Bm = g.xm1;
    NCPoly Bs = A.scale(-Scalar::q_pow(-1), g.x1);
    NCPoly Am = h.ctx().r_infinite()
                    ? A.scale(-inv1q2, g.x0)
                    : A.scale(inv1q2, A.sub(A.unit(), g.x0));
    rep.check(A.nf_equal(A.star(Bm), Bs), "embedded B* is the involute of embedded B");
    rep.check(A.nf_equal(A.star(Am), Am), "embedded A self-adjoint");
    rep.check(A.nf_is_zero(A.sub(A.mul(Am, Bm), A.scale(Scalar::q_pow(-2), A.mul(Bm, Am)))),
              "embedded AB = q^-2 BA");
    Scalar r = Scalar::r_value(h.ctx().r);
    bool inf = h.ctx().r_infinite();
    NCPoly rhs1 = A.add(A.sub(A.unit(r), A.mul(Am, Am)), inf ? NCPoly() : Am);
    rep.check(A.nf_equal(A.mul(Bs, Bm), rhs1), "embedded B*B relation");
    NCPoly rhs2 = A.add(A.sub(A.unit(r), A.scale(Scalar::q_pow(4), A.mul(Am, Am))),
                        inf ? NCPoly() : A.scale(Scalar::q_pow(2), Am));
    rep.check(A.nf_equal(A.mul(Bm, Bs), rhs2), "embedded BB* relation");
  }
  return rep;
}

}  // namespace qsphere
