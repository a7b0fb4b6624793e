#include <qsphere/bundle.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qsphere {

namespace {

// index k if w == b^k c^k (no a, d); -1 otherwise
int balanced_index(const Word& w) {
  size_t nb = 0, nc = 0;
  for (const auto& g : w) {
    if (g == "b" && nc == 0) {
      ++nb;
    } else if (g == "c") {
      ++nc;
    } else {
      return -1;
    }
  }
  return nb == nc ? static_cast<int>(nb) : -1;
}

}  // namespace

const BasisVector& HopfModuleBasis::at(int l2, int k2) const {
  for (const auto& v : vectors)
    if (v.l2 == l2 && v.k2 == k2) return v;
  throw std::runtime_error("HopfModuleBasis::at: no such (l2, k2)");
}

Bundle::Bundle(const ParamContext& ctx) : ctx_(ctx), hopf_(ctx) {}

Rational Bundle::t_balanced(int k) const {
  // t_k = (-1)^k q^k (1 - q^2) / (1 - q^{2k+2})
  const Rational& q = ctx_.q;
  Rational num = Scalar::pow_rat(q, k) * (Rational(1) - q * q);
  Rational den = Rational(1) - Scalar::pow_rat(q, 2 * k + 2);
  Rational t = num / den;
  return k % 2 == 0 ? t : -t;
}

Scalar Bundle::haar_su2(const NCPoly& x) const {
  NCPoly nf = hopf_.A().normal_form(x);
  Scalar out;
  for (const auto& [w, c] : nf.terms) {
    int k = balanced_index(w);
    if (k < 0) continue;
    out += c * Scalar(t_balanced(k));
  }
  return out.reduce_q(ctx_.q);
}

Scalar Bundle::inner(const NCPoly& a, const NCPoly& b) const {
  const Presentation& A = hopf_.A();
  return haar_su2(A.mul(A.star(b), a));
}

NCPoly Bundle::u_plus(int j2) const {
  if (j2 < 0) throw std::runtime_error("u_plus: need j2 >= 0");
  const Presentation& A = hopf_.A();
  Scalar s = Scalar::s_param(ctx_.r);
  NCPoly out = A.unit();
  for (int i = 1; i <= j2; ++i)
    out = A.mul(out, A.add(A.gen("d"), A.gen("b", Scalar::q_pow(-i) * s)));
  return A.normal_form(out);
}

NCPoly Bundle::w_plus(int j2) const {
  if (j2 < 0) throw std::runtime_error("w_plus: need j2 >= 0");
  const Presentation& A = hopf_.A();
  Scalar s = Scalar::s_param(ctx_.r);
  NCPoly out = A.unit();
  for (int i = 1; i <= j2; ++i)
    out = A.mul(out, A.sub(A.gen("a"), A.gen("c", Scalar::q_pow(i) * s)));
  return A.normal_form(out);
}

NCPoly Bundle::u_vec(int j2) const {
  if (j2 >= 0) return u_plus(j2);
  NCPoly epow = hopf_.U().poly(Word(static_cast<size_t>(-j2), "E"));
  return hopf_.act_left(epow, w_plus(-j2));
}

NCPoly Bundle::x1_embedded() const { return hopf_.embed_sphere_generators().x1; }

HopfModuleBasis Bundle::build_basis(int j2, int L2, CheckReport* rep) const {
  const Presentation& A = hopf_.A();
  const Presentation& U = hopf_.U();
  int a2 = std::abs(j2);
  if (L2 < a2 || (L2 - a2) % 2 != 0)
    throw std::runtime_error("build_basis: need L2 = |j2| + 2p");
  if (L2 > a2 + 8) throw std::runtime_error("build_basis: L2 too large");

  HopfModuleBasis out;
  out.j2 = j2;
  out.L2 = L2;

  NCPoly x1 = x1_embedded();
  NCPoly X = hopf_.Xr();
  Scalar mu = hopf_.mu_j(j2).reduce_q(ctx_.q);
  NCPoly fgen = U.gen("F"), kgen = U.gen("K"), egen = U.gen("E");

  auto eq = [&](const Scalar& x, const Scalar& y) {
    return (x - y).reduce_q(ctx_.q).is_zero();
  };

  NCPoly top = u_vec(j2);
  for (int l2 = a2; l2 <= L2; l2 += 2) {
    if (l2 > a2) top = A.normal_form(A.mul(x1, top));
    if (rep)
      rep->check(A.nf_is_zero(hopf_.act_left(egen, top)),
                 "highest-weight vector killed by E (l2=" + std::to_string(l2) +
                     ", j2=" + std::to_string(j2) + ")");
    NCPoly vec = top;
    for (int k2 = l2; k2 >= -l2; k2 -= 2) {
      BasisVector bv;
      bv.l2 = l2;
      bv.k2 = k2;
      bv.vec = vec;
      bv.norm2 = haar_su2(A.mul(A.star(vec), vec));
      bv.norm2_d = bv.norm2.eval(ctx_);
      if (rep) {
        std::string tag = " (l2=" + std::to_string(l2) + ", k2=" + std::to_string(k2) + ")";
        rep->check(!bv.norm2.is_zero() && bv.norm2_d > 0, "positive squared norm" + tag);
        rep->check(A.nf_equal(hopf_.act_left(kgen, vec), A.scale(Scalar::s_pow(k2), vec)),
                   "K-weight q^k" + tag);
        rep->check(A.nf_equal(hopf_.act_right(vec, X), A.scale(mu, vec)),
                   "right X_r eigenvalue mu_j" + tag);
        if (k2 < l2) {
          // ||F . v_k||^2 = [l-k+1][l+k] ||v_k||^2 (ladder coefficients)
          const BasisVector& up = out.at(l2, k2 + 2);
          Scalar lad = qbracket((l2 - k2) / 2) * qbracket((l2 + k2) / 2 + 1) * up.norm2;
          rep->check(eq(bv.norm2, lad), "ladder norm recursion" + tag);
        }
      }
      out.vectors.push_back(std::move(bv));
      if (k2 > -l2) vec = hopf_.act_left(fgen, vec);
    }
  }

  if (rep) {
    // numeric Gram identity: normalized vectors with equal weight but
    // different l are orthogonal (different weights are orthogonal exactly,
    // by the balanced-monomial support of the state)
    double worst = 0;
    for (size_t i = 0; i < out.vectors.size(); ++i)
      for (size_t j = i + 1; j < out.vectors.size(); ++j) {
        const BasisVector &x = out.vectors[i], &y = out.vectors[j];
        if (x.k2 != y.k2 || x.l2 == y.l2) continue;
        double g = inner(x.vec, y.vec).eval(ctx_) / std::sqrt(x.norm2_d * y.norm2_d);
        worst = std::max(worst, std::abs(g));
      }
    rep->check_num(worst, 1e-9, "Gram matrix of normalized basis = identity");
  }
  return out;
}

CheckReport Bundle::check_mu_spectrum(const std::vector<int>& j2s) const {
  CheckReport rep("bundle.mu_spectrum");
  const Presentation& A = hopf_.A();
  NCPoly X = hopf_.Xr();
  for (int j2 : j2s) {
    NCPoly u = u_vec(j2);
    Scalar mu = hopf_.mu_j(j2).reduce_q(ctx_.q);
    rep.check(A.nf_equal(hopf_.act_right(u, X), A.scale(mu, u)),
              "u_j <| X_r = mu_j u_j (j2=" + std::to_string(j2) + ")");
    if (j2 > 0) {
      NCPoly w = w_plus(j2);
      Scalar mum = hopf_.mu_j(-j2).reduce_q(ctx_.q);
      rep.check(A.nf_equal(hopf_.act_right(w, X), A.scale(mum, w)),
                "w_j <| X_r = mu_{-j} w_j (j2=" + std::to_string(j2) + ")");
    }
  }
  for (size_t i = 0; i < j2s.size(); ++i)
    for (size_t j = i + 1; j < j2s.size(); ++j) {
      Scalar d = (hopf_.mu_j(j2s[i]) - hopf_.mu_j(j2s[j])).reduce_q(ctx_.q);
      bool distinct = !d.is_zero() && std::abs(d.eval(ctx_)) > 1e-12;
      rep.check(distinct, "mu_" + std::to_string(j2s[i]) + " != mu_" +
                              std::to_string(j2s[j]));
    }
  return rep;
}

ProjectorMatrix Bundle::build_projector(int j2) const {
  int a2 = std::abs(j2);
  if (a2 > 3) throw std::runtime_error("build_projector: need |j2| <= 3");
  HopfModuleBasis basis = build_basis(j2, a2, nullptr);
  ProjectorMatrix P;
  P.j2 = j2;
  for (int k2 = -a2; k2 <= a2; k2 += 2) {
    const BasisVector& bv = basis.at(a2, k2);
    P.v.push_back(bv.vec);
    P.norm2.push_back(bv.norm2);
  }
  return P;
}

CheckReport Bundle::check_projector(const ProjectorMatrix& P) const {
  CheckReport rep("bundle.projector(j2=" + std::to_string(P.j2) + ")");
  const Presentation& A = hopf_.A();
  const Presentation& U = hopf_.U();
  const Rational& q = ctx_.q;
  int a2 = std::abs(P.j2);
  int n = P.size();

  // weighted column identity: sum_k q^{-2k} [2|j|+1]^{-1} N_k^2 v_k* v_k = 1
  Scalar br_inv = qbracket(a2 + 1).reduce_q(q).inverse_at(q);
  NCPoly colsum;
  for (int i = 0; i < n; ++i) {
    int k2 = -a2 + 2 * i;
    Scalar w = Scalar::q_pow(-k2) * br_inv * P.norm2[i].reduce_q(q).inverse_at(q);
    colsum = A.add(colsum, A.scale(w, A.mul(A.star(P.v[i]), P.v[i])));
  }
  rep.check(A.nf_equal(colsum, A.unit()), "weighted column identity v* v = 1");
  rep.check(A.nf_is_zero(hopf_.act_left(U.gen("F"), colsum)), "F . (v* v) = 0");
  rep.check(A.nf_is_zero(hopf_.act_left(U.gen("E"), colsum)), "E . (v* v) = 0");

  NCPoly X = hopf_.Xr();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      NCPoly e = A.normal_form(A.mul(P.v[i], A.star(P.v[j])));
      std::string tag = " entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
      rep.check(A.nf_is_zero(hopf_.act_right(e, X)),
                "right X_r-invariance (sphere membership)" + tag);
      int k2i = -a2 + 2 * i, k2j = -a2 + 2 * j;
      rep.check(A.nf_equal(hopf_.act_left(U.gen("K"), e),
                           A.scale(Scalar::s_pow(k2i - k2j), e)),
                "homogeneous K-weight" + tag);
      if (j < i) {
        NCPoly et = A.normal_form(A.mul(P.v[j], A.star(P.v[i])));
        rep.check(A.nf_equal(A.star(e), et), "hermitian symmetry" + tag);
      }
    }
  rep.note("invariance + homogeneous weight certify entries of the form "
           "B^{#(m-n)} p(A); idempotence follows from the column identity");
  return rep;
}

CheckReport Bundle::psi_isometry_check(int j2, int nsamples) const {
  CheckReport rep("bundle.psi_isometry(j2=" + std::to_string(j2) + ")");
  const Presentation& A = hopf_.A();
  const Rational& q = ctx_.q;
  double qd = ctx_.qd();
  int a2 = std::abs(j2);
  int n = a2 + 1;  // 2|j| + 1 entries, but stored count below
  ProjectorMatrix P = build_projector(j2);
  n = P.size();

  // c_j = h(v_top v_top*)^{-1} for the normalized top vector
  NCPoly vt = P.v[n - 1];
  Scalar w_rev = haar_su2(A.mul(vt, A.star(vt)));
  double cj = P.norm2[n - 1].eval(ctx_) / w_rev.eval(ctx_);
  double brv = ctx_.bracket_d(a2 + 1);
  std::vector<double> N(n), kk(n);
  for (int i = 0; i < n; ++i) {
    N[i] = 1.0 / std::sqrt(P.norm2[i].eval(ctx_));
    kk[i] = (-a2 + 2 * i) / 2.0;  // half-integer weight k
  }

  std::mt19937 rng(4242u + static_cast<unsigned>(j2 + 16));
  auto rnd_poly = [&]() {
    static const char* gens[4] = {"a", "b", "c", "d"};
    NCPoly out;
    int terms = 1 + static_cast<int>(rng() % 2);
    for (int t = 0; t < terms; ++t) {
      Word w;
      size_t len = rng() % 3;  // degree <= 2
      for (size_t i = 0; i < len; ++i) w.push_back(gens[rng() % 4]);
      Rational c(1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
      out = A.add(out, A.poly(w, Scalar(rng() % 2 ? c : -c)));
    }
    return A.normal_form(out);
  };

  using NumElem = std::vector<std::pair<double, NCPoly>>;
  auto h_pair = [&](const NumElem& x, const NumElem& y) {
    // h(star(x) y)
    double out = 0;
    for (const auto& [cx, px] : x)
      for (const auto& [cy, py] : y)
        out += cx * cy * haar_su2(A.mul(A.star(px), py)).eval(ctx_);
    return out;
  };

  double worst = 0, scale_ref = 1;
  for (int s = 0; s < nsamples; ++s) {
    std::vector<NCPoly> y(n), z(n);
    for (int i = 0; i < n; ++i) {
      y[i] = rnd_poly();
      z[i] = rnd_poly();
    }
    // rows Y = y P, Z = z P and their images under Psi
    auto make_row = [&](const std::vector<NCPoly>& src) {
      std::vector<NumElem> row(n);
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) {
          double c = std::pow(qd, -(kk[i] + kk[m])) / brv * N[i] * N[m];
          NCPoly p = A.normal_form(A.mul(A.mul(src[i], P.v[i]), A.star(P.v[m])));
          row[m].emplace_back(c, std::move(p));
        }
      return row;
    };
    auto make_psi = [&](const std::vector<NumElem>& row) {
      NumElem out;
      for (int m = 0; m < n; ++m)
        for (const auto& [c, p] : row[m]) {
          double cc = c * std::pow(qd, -kk[m]) * N[m] / std::sqrt(brv);
          out.emplace_back(cc, A.normal_form(A.mul(p, P.v[m])));
        }
      return out;
    };
    std::vector<NumElem> Y = make_row(y), Z = make_row(z);
    double lhs = h_pair(make_psi(Z), make_psi(Y));
    double rhs = 0;
    for (int m = 0; m < n; ++m)
      rhs += cj * std::pow(qd, a2) * std::pow(qd, -2 * kk[m]) * h_pair(Z[m], Y[m]);
    scale_ref = std::max({scale_ref, std::abs(lhs), std::abs(rhs)});
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  rep.check_num(worst / scale_ref, 1e-9, "isometry of Psi on sampled rows");

  // twisted cyclicity, exact: with ct = nu_top * h(vt vt*)^{-1},
  //   h(v_k* x v_l) * 1 = ct q^{2|j|-2k} h(x v_l v_k*)
  Scalar ct = P.norm2[n - 1].reduce_q(q) * w_rev.reduce_q(q).inverse_at(q);
  Scalar sp = Scalar::s_param(ctx_.r);
  NCPoly xi0 = A.add(A.sub(A.poly({"b", "c"}, (sp * sp - Scalar(1)) * Scalar::q_pow(1)),
                           A.poly({"a", "b"}, sp)),
                     A.poly({"d", "c"}, sp * Scalar::q_pow(2)));
  NCPoly Aemb = A.scale(Scalar::q_pow(-2) * Scalar::lambda_plus(ctx_.r),
                        A.normal_form(xi0));
  std::vector<NCPoly> xs = {A.unit(), Aemb, A.normal_form(A.mul(Aemb, Aemb))};
  bool tw = true;
  for (int k = 0; k < n && tw; ++k)
    for (int l = 0; l < n && tw; ++l)
      for (const NCPoly& x : xs) {
        int k2 = -a2 + 2 * k;
        Scalar lhs = haar_su2(A.mul(A.mul(A.star(P.v[k]), x), P.v[l]));
        Scalar rhs = ct * Scalar::q_pow(a2 - k2) *
                     haar_su2(A.mul(A.mul(x, P.v[l]), A.star(P.v[k])));
        if (!(lhs - rhs).reduce_q(q).is_zero()) {
          tw = false;
          break;
        }
      }
  rep.check(tw, "twisted cyclicity h(v_k* x v_l) = c_j q^{2|j|-2k} h(x v_l v_k*)");
  return rep;
}

CheckReport Bundle::chart_identities(int j2max) const {
  CheckReport rep("bundle.chart_identities");
  const Presentation& A = hopf_.A();
  const Presentation& U = hopf_.U();
  const Rational& q = ctx_.q;

  auto xi = [&](const Scalar& sv) {
    // xi(s) = -s ab + (s^2 - 1) q bc + s q^2 dc
    return A.normal_form(
        A.add(A.sub(A.poly({"b", "c"}, (sv * sv - Scalar(1)) * Scalar::q_pow(1)),
                    A.poly({"a", "b"}, sv)),
              A.poly({"d", "c"}, sv * Scalar::q_pow(2))));
  };
  auto lin = [&](const char* g1, const Scalar& c1, const char* g2, const Scalar& c2) {
    return A.add(A.gen(g1, c1), A.gen(g2, c2));
  };

  Scalar one(1), qm1 = Scalar::q_pow(-1), q1 = Scalar::q_pow(1), q2 = Scalar::q_pow(2);
  std::vector<Scalar> svals = {Scalar(1), Scalar(2), Scalar(Rational(-1)),
                               Scalar::s_param(ctx_.r)};
  for (size_t t = 0; t < svals.size(); ++t) {
    const Scalar& sv = svals[t];
    std::string tag = " (parameter value " + std::to_string(t) + ")";
    NCPoly xs = xi(sv), xqs = xi(sv * q1), xqm = xi(sv * qm1);
    // factorization identities
    rep.check(A.nf_equal(A.mul(lin("a", one, "c", -q1 * sv), lin("d", one, "b", sv)),
                         A.sub(A.unit(), xs)),
              "(a - qsc)(d + sb) = 1 - xi(s)" + tag);
    rep.check(A.nf_equal(A.mul(lin("d", one, "b", qm1 * sv), lin("a", one, "c", -sv)),
                         A.sub(A.unit(), A.scale(Scalar::q_pow(-2), xs))),
              "(d + q^-1 sb)(a - sc) = 1 - q^-2 xi(s)" + tag);
    rep.check(A.nf_equal(A.mul(lin("b", one, "d", -q1 * sv), lin("c", -q1, "a", -q1 * sv)),
                         A.add(A.unit(q2 * sv * sv), xs)),
              "(b - qsd)(-qc - qsa) = q^2 s^2 + xi(s)" + tag);
    rep.check(A.nf_equal(A.mul(lin("c", q1, "a", sv), lin("b", -one, "d", sv)),
                         A.add(A.unit(sv * sv), xs)),
              "(qc + sa)(-b + sd) = s^2 + xi(s)" + tag);
    // commutation identities
    rep.check(A.nf_equal(A.mul(lin("a", one, "c", -q1 * sv), xqs),
                         A.mul(A.scale(q2, xs), lin("a", one, "c", -q1 * sv))),
              "(a - qsc) xi(qs) = q^2 xi(s)(a - qsc)" + tag);
    rep.check(A.nf_equal(A.mul(lin("d", one, "b", qm1 * sv), xqm),
                         A.mul(A.scale(Scalar::q_pow(-2), xs), lin("d", one, "b", qm1 * sv))),
              "(d + q^-1 sb) xi(q^-1 s) = q^-2 xi(s)(d + q^-1 sb)" + tag);
    rep.check(A.nf_equal(A.mul(lin("b", one, "d", -q1 * sv), xqs),
                         A.mul(xs, lin("b", one, "d", -q1 * sv))),
              "(b - qsd) xi(qs) = xi(s)(b - qsd)" + tag);
    rep.check(A.nf_equal(A.mul(lin("c", one, "a", qm1 * sv), xqm),
                         A.mul(xs, lin("c", one, "a", qm1 * sv))),
              "(c + q^-1 sa) xi(q^-1 s) = xi(s)(c + q^-1 sa)" + tag);
  }

  // B_emb xi(s) = q^2 xi(s) B_emb with B_emb the lowering sphere generator
  {
    NCPoly xm1 = hopf_.embed_sphere_generators().xm1;
    NCPoly xs = xi(Scalar::s_param(ctx_.r));
    rep.check(A.nf_equal(A.mul(xm1, xs), A.scale(q2, A.mul(xs, xm1))),
              "lowering generator q-commutes with xi(s)");
  }

  // products of normalized top/bottom row vectors against the spectral
  // factorizations, with the proportionality constants computed and reported
  NCPoly Aemb = A.scale(Scalar::q_pow(-2) * Scalar::lambda_plus(ctx_.r),
                        xi(Scalar::s_param(ctx_.r)));
  Scalar lp = Scalar::lambda_plus(ctx_.r), lm = Scalar::lambda_minus(ctx_.r);
  auto prod_factors = [&](bool plus_form, const std::vector<int>& qexp) {
    NCPoly out = A.unit();
    for (int e : qexp) {
      NCPoly f = plus_form
                     ? A.sub(A.unit(lp), A.scale(Scalar::q_pow(e), Aemb))
                     : A.sub(A.scale(Scalar::q_pow(e), Aemb), A.unit(lm));
      out = A.normal_form(A.mul(out, f));
    }
    return out;
  };
  auto match = [&](const NCPoly& lhs, const NCPoly& rhs, const std::string& what) {
    if (rhs.is_zero() || lhs.is_zero()) {
      rep.check(false, what + " (degenerate)");
      return;
    }
    const Word& w0 = rhs.terms.begin()->first;
    auto it = lhs.terms.find(w0);
    if (it == lhs.terms.end()) {
      rep.check(false, what + " (support mismatch)");
      return;
    }
    Scalar gamma = it->second.reduce_q(q) * rhs.terms.begin()->second.reduce_q(q).inverse_at(q);
    rep.check(A.nf_equal(lhs, A.scale(gamma, rhs)), what);
    rep.note(what + ": constant = " + std::to_string(gamma.eval(ctx_)));
  };
  for (int a2 = 1; a2 <= std::min(3, j2max); ++a2) {
    for (int sgn : {+1, -1}) {
      ProjectorMatrix P = build_projector(sgn * a2);
      int n = P.size();
      auto row_prod = [&](int i) {
        Scalar ninv = P.norm2[i].reduce_q(q).inverse_at(q);
        return A.normal_form(A.scale(ninv, A.mul(P.v[i], A.star(P.v[i]))));
      };
      std::vector<int> e_top, e_bot;
      if (sgn > 0) {
        for (int i = 0; i < a2; ++i) e_top.push_back(-2 * i);     // lam_+ - q^{-2i}A
        for (int i = 1; i <= a2; ++i) e_bot.push_back(2 * i);     // q^{2i}A - lam_-
        match(row_prod(n - 1), prod_factors(true, e_top),
              "top row spectral product (j2=" + std::to_string(a2) + ")");
        match(row_prod(0), prod_factors(false, e_bot),
              "bottom row spectral product (j2=" + std::to_string(a2) + ")");
      } else {
        for (int i = 1; i <= a2; ++i) e_bot.push_back(2 * i);     // lam_+ - q^{2i}A
        for (int i = 0; i < a2; ++i) e_top.push_back(-2 * i);     // q^{-2i}A - lam_-
        match(row_prod(0), prod_factors(true, e_bot),
              "bottom row spectral product (j2=" + std::to_string(-a2) + ")");
        match(row_prod(n - 1), prod_factors(false, e_top),
              "top row spectral product (j2=" + std::to_string(-a2) + ")");
      }
    }
  }

  // two-term frame relations at level l (scale-invariant unnormalized form)
  Scalar sp = Scalar::s_param(ctx_.r);
  for (int l2 = 1; l2 <= std::min(3, j2max); ++l2) {
    std::string tag = " (l2=" + std::to_string(l2) + ")";
    NCPoly u = u_plus(l2);
    NCPoly fu = hopf_.act_left(U.gen("F"), u);
    NCPoly ep = lin("d", one, "b", Scalar::q_pow(-(l2 + 1)) * sp);
    NCPoly em = hopf_.act_left(U.gen("F"), ep);
    NCPoly rel1 = A.sub(A.scale(Scalar::s_pow(1) * qbracket(l2), A.mul(u, em)),
                        A.scale(Scalar::s_pow(-l2), A.mul(fu, ep)));
    rep.check(A.nf_is_zero(rel1), "descending frame relation" + tag);

    // the ascending frame element continues the w-product by one factor
    NCPoly w = w_plus(l2);
    NCPoly ew = hopf_.act_left(U.gen("E"), w);
    NCPoly fm = lin("a", one, "c", -Scalar::q_pow(l2 + 1) * sp);
    NCPoly fp = hopf_.act_left(U.gen("E"), fm);
    NCPoly rel2 = A.sub(A.scale(Scalar::s_pow(-1) * qbracket(l2), A.mul(w, fp)),
                        A.scale(Scalar::s_pow(l2), A.mul(ew, fm)));
    rep.check(A.nf_is_zero(rel2), "ascending frame relation" + tag);

    // F . u_l = q^{l-1/2} [2l] u_{l-1/2} (c + q^{-2l} s a)
    NCPoly rhs = A.scale(Scalar::s_pow(l2 - 1) * qbracket(l2),
                         A.mul(u_plus(l2 - 1), lin("c", one, "a", Scalar::q_pow(-l2) * sp)));
    rep.check(A.nf_equal(fu, rhs), "F-image of the ladder seed" + tag);
  }
  return rep;
}

CheckReport Bundle::chart_matrices(int j2) const {
  CheckReport rep("bundle.chart_matrices(j2=" + std::to_string(j2) + ")");
  FuncAlgebra fa(ctx_);
  int a2 = std::abs(j2);
  int n = a2 + 1;
  double qd = ctx_.qd();
  double lam = qd - 1.0 / qd;
  double rterm = ctx_.r_infinite() ? 1.0 : ctx_.rd();

  using Mat = std::vector<std::vector<FuncElement>>;
  Mat m(n, std::vector<FuncElement>(n)), md = m, nm = m;
  auto kval = [&](int i) { return (-a2 + 2.0 * i) / 2.0; };
  auto bk = [&](int i) {
    // sqrt([|j|-k+1][|j|+k]) at column/row half-integer index k = kval(i)
    int k2 = -a2 + 2 * i;
    return std::sqrt(ctx_.bracket_d((a2 - k2) / 2 + 1) * ctx_.bracket_d((a2 + k2) / 2));
  };
  for (int i = 0; i < n; ++i) {
    double k = kval(i);
    m[i][i] = fa.scale(1.0 / qd, fa.gen_B());
    md[i][i] = fa.scale(qd, fa.gen_Bst());
    nm[i][i] = fa.scale(std::pow(qd, -2.0 * k + 1.0), fa.gen_A());
    if (i > 0) {
      m[i][i - 1] = fa.scale(std::pow(qd, 0.5 - k) * lam * bk(i), fa.gen_A());
      md[i - 1][i] = fa.scale(std::pow(qd, 2.5 - k) * lam * bk(i), fa.gen_A());
    }
  }

  auto mmul = [&](const Mat& x, const Mat& y) {
    Mat out(n, std::vector<FuncElement>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int t = 0; t < n; ++t)
          out[i][j] = fa.add(out[i][j], fa.mul(x[i][t], y[t][j]));
    return out;
  };
  auto msub = [&](const Mat& x, const Mat& y) {
    Mat out(n, std::vector<FuncElement>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i][j] = fa.add(x[i][j], fa.scale(-1.0, y[i][j]));
    return out;
  };
  auto resid = [&](const Mat& x) {
    double worst = 0;
    const int N = 30;
    for (int sign : {+1, -1}) {
      if (sign < 0 && !ctx_.r_infinite() && ctx_.rd() == 0.0) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto M = fa.materialize(x[i][j], sign, N);
          for (const auto& row : M)
            for (double v : row) worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
  };

  rep.check_num(resid(msub(mmul(nm, md), [&] {
                  Mat y = mmul(md, nm);
                  for (auto& r : y)
                    for (auto& e : r) e = fa.scale(qd * qd, e);
                  return y;
                }())),
                1e-10, "n m^dag = q^2 m^dag n");
  rep.check_num(resid(msub(mmul(nm, m), [&] {
                  Mat y = mmul(m, nm);
                  for (auto& r : y)
                    for (auto& e : r) e = fa.scale(1.0 / (qd * qd), e);
                  return y;
                }())),
                1e-10, "n m = q^-2 m n");
  {
    Mat lhs = mmul(m, md), q2md = mmul(md, m);
    for (auto& r : q2md)
      for (auto& e : r) e = fa.scale(qd * qd, e);
    Mat rhs = mmul(nm, nm);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) rhs[i][j] = fa.scale(1.0 - qd * qd, rhs[i][j]);
      rhs[i][i] = fa.add(rhs[i][i],
                         fa.scale((1.0 - qd * qd) * rterm, FuncElement::one()));
    }
    rep.check_num(resid(msub(msub(lhs, q2md), rhs)), 1e-10,
                  "m m^dag - q^2 m^dag m = (1-q^2)(n^2 + r)");
  }
  if (j2 == 0)
    rep.note("1x1 case: matrices reduce to (q^-1 B), (q B*), (q A)");
  return rep;
}

CheckReport Bundle::check_orthogonality(int l2max) const {
  CheckReport rep("bundle.orthogonality");
  // For fixed l, the top-weight vectors v^l_{l,i} of the modules i = -l..l
  // (parity matching l) are mutually orthogonal across distinct i only after
  // summing weights; here we check Haar-orthogonality at equal (l, k) across
  // distinct module labels, and completeness: their Gram matrix has full
  // rank 2l+1 (positive definite).
  for (int l2 = 1; l2 <= l2max; ++l2) {
    std::vector<NCPoly> tops;
    std::vector<double> norms;
    for (int i2 = -l2; i2 <= l2; i2 += 2) {
      HopfModuleBasis b = build_basis(i2, l2, nullptr);
      const BasisVector& bv = b.at(l2, l2);
      tops.push_back(bv.vec);
      norms.push_back(bv.norm2_d);
    }
    int n = static_cast<int>(tops.size());
    std::vector<std::vector<double>> G(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        G[i][j] = inner(tops[i], tops[j]).eval(ctx_) / std::sqrt(norms[i] * norms[j]);
    double offdiag = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(G[i][j]));
    rep.check_num(offdiag, 1e-9, "cross-module orthogonality at level l2=" +
                                     std::to_string(l2));
    // positive definiteness via Cholesky => rank 2l+1
    bool posdef = true;
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n && posdef; ++i) {
      for (int j = 0; j <= i; ++j) {
        double sum = G[i][j];
        for (int t = 0; t < j; ++t) sum -= L[i][t] * L[j][t];
        if (i == j) {
          if (sum <= 1e-12) {
            posdef = false;
            break;
          }
          L[i][i] = std::sqrt(sum);
        } else {
          L[i][j] = sum / L[j][j];
        }
      }
    }
    rep.check(posdef, "completeness: Gram rank " + std::to_string(n) +
                          " at level l2=" + std::to_string(l2));
    rep.check(n == l2 + 1, "weight-space dimension at level l2=" + std::to_string(l2));
  }
  return rep;
}

}  // namespace qsphere
