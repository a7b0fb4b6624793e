// Free *-algebras over the exact scalar ring, with rewrite-rule normal forms
// for the algebra presentations used throughout the engine.
#pragma once

#include <qsphere/check.hpp>
#include <qsphere/scalar.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qsphere {

using Sym = std::string;
using Word = std::vector<Sym>;

inline std::string word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += " ";
    out += w[i];
  }
  return out;
}

struct NCPoly {
  std::map<Word, Scalar> terms;

  bool is_zero() const { return terms.empty(); }
  size_t degree() const {
    size_t d = 0;
    for (const auto& [w, c] : terms) d = std::max(d, w.size());
    return d;
  }
  std::string str() const {
    if (terms.empty()) return "0";
    std::string out;
    for (const auto& [w, c] : terms) {
      if (!out.empty()) out += "  +  ";
      out += "(" + c.str() + ") " + word_str(w);
    }
    return out;
  }
};

// An algebra presentation: alphabet in PBW order, involution table,
// and rewrite rules with two-letter left-hand sides.  All coefficient
// arithmetic is reduced at the fixed rational q so that exact zero tests
// are decidable.
class Presentation {
 public:
  std::string name;
  Rational q;
  RMode rmode;
  std::vector<Sym> alphabet;
  // g* = scalar * word  (word may have length != 1, e.g. e* = k f)
  std::map<Sym, std::pair<Scalar, Word>> star_table;
  std::map<std::pair<Sym, Sym>, NCPoly> rules;

  Scalar red(const Scalar& c) const { return c.reduce_q(q); }

  NCPoly poly(const Word& w, const Scalar& c = Scalar(1)) const {
    NCPoly out;
    Scalar cr = red(c);
    if (!cr.is_zero()) out.terms[w] = cr;
    return out;
  }
  NCPoly gen(const Sym& g, const Scalar& c = Scalar(1)) const { return poly({g}, c); }
  NCPoly unit(const Scalar& c = Scalar(1)) const { return poly({}, c); }

  NCPoly add(NCPoly a, const NCPoly& b) const {
    for (const auto& [w, c] : b.terms) add_term(a, w, c);
    return a;
  }
  NCPoly sub(NCPoly a, const NCPoly& b) const {
    for (const auto& [w, c] : b.terms) add_term(a, w, -c);
    return a;
  }
  NCPoly scale(const Scalar& s, const NCPoly& a) const {
    NCPoly out;
    for (const auto& [w, c] : a.terms) add_term(out, w, s * c);
    return out;
  }
  NCPoly mul(const NCPoly& a, const NCPoly& b) const {
    NCPoly out;
    for (const auto& [wa, ca] : a.terms)
      for (const auto& [wb, cb] : b.terms) {
        Word w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        add_term(out, w, ca * cb);
      }
    return out;
  }
  NCPoly mul(std::initializer_list<NCPoly> factors) const {
    NCPoly out = unit();
    for (const auto& f : factors) out = mul(out, f);
    return out;
  }
  NCPoly pow(const NCPoly& a, int n) const {
    NCPoly out = unit();
    for (int i = 0; i < n; ++i) out = mul(out, a);
    return out;
  }
  NCPoly commutator(const NCPoly& a, const NCPoly& b) const {
    return sub(mul(a, b), mul(b, a));
  }
  NCPoly star(const NCPoly& a) const;

  // Rewrites every word to its PBW expansion; throws if the step guard
  // trips (which signals a broken rule set, not a user error).
  NCPoly normal_form(const NCPoly& x) const;

  bool nf_is_zero(const NCPoly& x) const { return normal_form(x).is_zero(); }
  bool nf_equal(const NCPoly& a, const NCPoly& b) const { return nf_is_zero(sub(a, b)); }

 private:
  void add_term(NCPoly& p, const Word& w, const Scalar& c) const {
    auto it = p.terms.find(w);
    if (it == p.terms.end()) {
      Scalar cr = red(c);
      if (!cr.is_zero()) p.terms[w] = cr;
      return;
    }
    it->second = red(it->second + c);
    if (it->second.is_zero()) p.terms.erase(it);
  }
};

// Known presentation ids:
//   Uq_su2, Uq_su2_hat, O_SUq2, O_S2qr, O_S2qr_localized,
//   cross_EFK, cross_efk, cross_decoupled_XY, cross_decoupled_XK, Yr
// The r-regime of ctx selects the finite/infinite variants.  ctx.perturb != 0
// nudges one designated rule coefficient by 1/1000 (negative-control mode).
Presentation make_presentation(const std::string& id, const ParamContext& ctx);

// All two-rule overlaps x y z resolved both ways, plus normal forms of
// every word up to max_degree computed with two reduction strategies.
CheckReport check_confluence(const Presentation& p, int max_degree);

// normal_form((xy)*) == normal_form(y* x*) on sampled low-degree elements.
CheckReport check_involution(const Presentation& p, unsigned seed = 7);

// Inside the localized EFK cross product: X, X*, Y, Y^{-1} built from the
// decoupling definitions commute with A, B, B*; includes a deliberate
// non-commuting control (E in place of X).
CheckReport check_commutant(const ParamContext& ctx);

// The decoupling identities: both orderings of X and X* agree, k = q Y^{-1}A
// recovers K^2, the e/f closed forms recover EK and K^{-1}F, the E/F
// reconstructions hold, and X q-commutes with K (Y commutes).
CheckReport check_decoupling_identities(const ParamContext& ctx);

// Parses the CLI element syntax: generator names, juxtaposition, ^ powers,
// rational scalars, q^(p/2) literals, + - * and parentheses.
NCPoly parse_element(const Presentation& p, const std::string& text);

}  // namespace qsphere
