// Exact scalar arithmetic for the q-sphere engine.
//
// Scalars are Laurent polynomials in s (s^2 = q formally) with coefficients
// in the quadratic extension Q[lam, rho] / (lam^2 - lam - r, rho^2 - r) for a
// fixed rational r >= 0.  lam evaluates to the larger root lam_plus of
// t^2 = t + r, rho to sqrt(r).  The r = infinity regime never needs the
// extension (lam_pm = +-1 there), so infinite-mode scalars stay rational.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsphere {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return static_cast<double>(x); }

// Parameter regime for r: a plain rational, or the r = infinity model.
// "Any" marks scalars with no extension part; they are valid in every regime.
struct RMode {
  enum Kind : std::uint8_t { Any, Finite, Inf } kind = Any;
  Rational r;  // meaningful only for Finite

  static RMode any() { return RMode{}; }
  static RMode finite(const Rational& r) { return RMode{Finite, r}; }
  static RMode infinite() { return RMode{Inf, Rational(0)}; }

  bool operator==(const RMode& o) const {
    return kind == o.kind && (kind != Finite || r == o.r);
  }
};

inline RMode unify(const RMode& a, const RMode& b) {
  if (a.kind == RMode::Any) return b;
  if (b.kind == RMode::Any) return a;
  if (!(a == b)) throw std::runtime_error("scalar: mixing incompatible r-modes");
  return a;
}

// c0 + cl*lam + cr*rho + clr*lam*rho
struct ExtCoeff {
  Rational c0, cl, cr, clr;

  bool is_zero() const { return c0 == 0 && cl == 0 && cr == 0 && clr == 0; }
  bool is_rational() const { return cl == 0 && cr == 0 && clr == 0; }

  ExtCoeff operator+(const ExtCoeff& o) const {
    return {c0 + o.c0, cl + o.cl, cr + o.cr, clr + o.clr};
  }
  ExtCoeff operator-(const ExtCoeff& o) const {
    return {c0 - o.c0, cl - o.cl, cr - o.cr, clr - o.clr};
  }
  ExtCoeff operator-() const { return {-c0, -cl, -cr, -clr}; }

  // product modulo lam^2 = lam + r, rho^2 = r
  ExtCoeff mul(const ExtCoeff& b, const Rational& r) const {
    ExtCoeff out;
    out.c0 = c0 * b.c0 + r * (cl * b.cl + cr * b.cr) + r * r * clr * b.clr;
    out.cl = c0 * b.cl + cl * b.c0 + cl * b.cl + r * (cr * b.clr + clr * b.cr) +
             r * clr * b.clr;
    out.cr = c0 * b.cr + cr * b.c0 + r * (cl * b.clr + clr * b.cl);
    out.clr = c0 * b.clr + clr * b.c0 + cl * b.cr + cr * b.cl + cl * b.clr +
              clr * b.cl;
    return out;
  }
};

struct ParamContext;

class Scalar {
 public:
  Scalar() = default;
  /*implicit*/ Scalar(int v) { set_term(0, ExtCoeff{Rational(v), 0, 0, 0}); }
  /*implicit*/ Scalar(const Rational& v) { set_term(0, ExtCoeff{v, 0, 0, 0}); }

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return Scalar(1); }
  // c * s^k  (s = q^{1/2}; exponent lattice (1/2)Z realized as Z in s)
  static Scalar s_pow(int k, const Rational& c = Rational(1)) {
    Scalar x;
    x.set_term(k, ExtCoeff{c, 0, 0, 0});
    return x;
  }
  // q^k as a scalar
  static Scalar q_pow(int k, const Rational& c = Rational(1)) { return s_pow(2 * k, c); }

  // lam_plus for finite rational r; collapses to 1 at r = 0, to +1 at r = inf.
  static Scalar lambda_plus(const RMode& m) {
    if (m.kind == RMode::Inf) return Scalar(1);
    if (m.kind != RMode::Finite) throw std::runtime_error("lambda_plus: need r");
    if (m.r == 0) return Scalar(1);
    Scalar x;
    x.mode_ = m;
    x.set_term(0, ExtCoeff{0, 1, 0, 0});
    return x;
  }
  static Scalar lambda_minus(const RMode& m) {
    if (m.kind == RMode::Inf) return Scalar(-1);
    return Scalar(1) - lambda_plus(m);  // lam_+ + lam_- = 1
  }
  // rho = r^{1/2} for finite rational r (0 at r = 0)
  static Scalar sqrt_r(const RMode& m) {
    if (m.kind != RMode::Finite) throw std::runtime_error("sqrt_r: need finite r");
    if (m.r == 0) return Scalar();
    Scalar x;
    x.mode_ = m;
    x.set_term(0, ExtCoeff{0, 0, 1, 0});
    return x;
  }
  // 1/lam_+ = (lam_+ - 1)/r + 1  ... derived from lam^2 = lam + r:
  // lam(lam - 1) = r  =>  lam^{-1} = (lam - 1)/r
  static Scalar lambda_plus_inv(const RMode& m) {
    if (m.kind == RMode::Inf) return Scalar(1);
    if (m.kind != RMode::Finite) throw std::runtime_error("lambda_plus_inv: need r");
    if (m.r == 0) return Scalar(1);
    Scalar x;
    x.mode_ = m;
    x.set_term(0, ExtCoeff{Rational(-1) / m.r, Rational(1) / m.r, 0, 0});
    return x;
  }
  // the sphere deformation parameter s_r = r^{1/2} lam_+^{-1}
  // (0 for r = 0, 1 for r = inf)
  static Scalar s_param(const RMode& m) {
    if (m.kind == RMode::Inf) return Scalar(1);
    return sqrt_r(m) * lambda_plus_inv(m);
  }
  // plain r as a scalar; in the infinite regime the defining relations
  // substitute r = 1 (third relations of the decoupled presentations).
  static Scalar r_value(const RMode& m) {
    if (m.kind == RMode::Inf) return Scalar(1);
    if (m.kind != RMode::Finite) throw std::runtime_error("r_value: need r");
    return Scalar(m.r);
  }

  bool is_zero() const { return terms_.empty(); }
  const std::map<int, ExtCoeff>& terms() const { return terms_; }
  const RMode& mode() const { return mode_; }

  Scalar operator+(const Scalar& o) const {
    Scalar out = *this;
    out.mode_ = unify(mode_, o.mode_);
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
  }
  Scalar operator-(const Scalar& o) const { return *this + (-o); }
  Scalar operator-() const {
    Scalar out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }
  Scalar operator*(const Scalar& o) const {
    Scalar out;
    out.mode_ = unify(mode_, o.mode_);
    Rational r = out.mode_.kind == RMode::Finite ? out.mode_.r : Rational(0);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) out.add_term(e1 + e2, c1.mul(c2, r));
    return out;
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const { return (*this - o).is_zero(); }

  // complex conjugation: identity (the ring is real)
  Scalar conj() const { return *this; }

  // Substitute s^2 = q (q a fixed rational), leaving only s-exponents 0 and 1.
  Scalar reduce_q(const Rational& q) const {
    Scalar out;
    out.mode_ = mode_;
    for (const auto& [e, c] : terms_) {
      int k = e >= 0 ? e / 2 : -((-e + 1) / 2);  // floor(e/2)
      int rem = e - 2 * k;                       // 0 or 1
      Rational f = pow_rat(q, k);
      out.add_term(rem, ExtCoeff{c.c0 * f, c.cl * f, c.cr * f, c.clr * f});
    }
    return out;
  }

  // Exact multiplicative inverse in Q[s,lam,rho]/(s^2-q, lam^2-lam-r, rho^2-r).
  // The scalar must already be reduced at q (call reduce_q first).
  Scalar inverse_at(const Rational& q) const;

  double eval(const ParamContext& ctx) const;

  std::string str(const std::vector<const char*>& names = {"1", "L", "R", "LR"}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      const Rational* parts[4] = {&c.c0, &c.cl, &c.cr, &c.clr};
      for (int i = 0; i < 4; ++i) {
        if (*parts[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << *parts[i];
        if (i > 0) os << "*" << names[i];
        if (e != 0) os << "*s^" << e;
      }
    }
    return os.str();
  }

  static Rational pow_rat(const Rational& q, int k) {
    Rational out(1), b = k >= 0 ? q : Rational(1) / q;
    for (int i = 0; i < std::abs(k); ++i) out *= b;
    return out;
  }

 private:
  void set_term(int e, const ExtCoeff& c) {
    if (!c.is_zero()) terms_[e] = c;
  }
  void add_term(int e, const ExtCoeff& c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      set_term(e, c);
      return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  std::map<int, ExtCoeff> terms_;
  RMode mode_;
};

// q is a fixed rational in (0,1); r is a mode (rational >= 0 or infinity).
struct ParamContext {
  Rational q = Rational(1, 2);
  RMode r = RMode::finite(Rational(0));
  // numeric perturbation knob for negative-control runs; 0 in normal use
  double perturb = 0.0;

  ParamContext() = default;
  ParamContext(const Rational& q_, const RMode& r_) : q(q_), r(r_) {
    if (!(q > 0 && q < 1)) throw std::runtime_error("ParamContext: need 0 < q < 1");
    if (r.kind == RMode::Finite && r.r < 0)
      throw std::runtime_error("ParamContext: need r >= 0");
  }

  bool r_infinite() const { return r.kind == RMode::Inf; }
  double qd() const { return to_double(q); }
  double sd() const { return std::sqrt(qd()); }
  double rd() const {
    if (r_infinite()) throw std::runtime_error("rd(): r is infinite");
    return to_double(r.r);
  }
  double lambda_plus_d() const {
    return r_infinite() ? 1.0 : 0.5 + std::sqrt(rd() + 0.25);
  }
  double lambda_minus_d() const {
    return r_infinite() ? -1.0 : 0.5 - std::sqrt(rd() + 0.25);
  }
  // sphere parameter s_r = r^{1/2}/lam_+ (0 at r=0, 1 at r=inf)
  double s_param_d() const {
    return r_infinite() ? 1.0 : std::sqrt(rd()) / lambda_plus_d();
  }
  double gamma_plus_d() const {
    return (1 - qd() * qd()) * lambda_plus_d() / (lambda_plus_d() - lambda_minus_d());
  }
  double gamma_minus_d() const {
    return (1 - qd() * qd()) * lambda_minus_d() / (lambda_minus_d() - lambda_plus_d());
  }
  // [n] = (q^n - q^{-n})/(q - q^{-1})
  double bracket_d(int n) const {
    double q2 = qd();
    return (std::pow(q2, n) - std::pow(q2, -n)) / (q2 - 1.0 / q2);
  }
  // lam_n = (1 - q^{2n})^{1/2}, numeric only
  double lambda_n_d(int n) const {
    if (n < 0) throw std::runtime_error("lambda_n: need n >= 0");
    return std::sqrt(1.0 - std::pow(qd(), 2 * n));
  }
  // rho-abbreviation 1 + [2]^2 r (finite r) resp. (q + q^{-1})^2 (r = inf)
  double rho_abbrev_d() const {
    double b2 = bracket_d(2);
    return r_infinite() ? b2 * b2 : 1.0 + b2 * b2 * rd();
  }
};

inline double Scalar::eval(const ParamContext& ctx) const {
  if (mode_.kind == RMode::Finite && ctx.r.kind == RMode::Finite &&
      mode_.r != ctx.r.r)
    throw std::runtime_error("Scalar::eval: r mismatch");
  if (mode_.kind == RMode::Finite && ctx.r.kind == RMode::Inf)
    throw std::runtime_error("Scalar::eval: finite-r scalar in infinite regime");
  double s = ctx.sd();
  double lp = ctx.r_infinite() ? 1.0 : ctx.lambda_plus_d();
  double rr = ctx.r_infinite() ? 0.0 : std::sqrt(ctx.rd());
  double out = 0;
  for (const auto& [e, c] : terms_)
    out += std::pow(s, e) * (to_double(c.c0) + to_double(c.cl) * lp +
                             to_double(c.cr) * rr + to_double(c.clr) * lp * rr);
  return out;
}

inline Scalar Scalar::inverse_at(const Rational& q) const {
  if (is_zero()) throw std::runtime_error("inverse_at: zero scalar");
  Rational r = mode_.kind == RMode::Finite ? mode_.r : Rational(0);
  // basis 1, s, lam, s*lam, rho, s*rho, lam*rho, s*lam*rho
  auto idx = [](int e, int part) { return 2 * part + e; };
  auto comp = [&](const Scalar& x, int e, int part) -> Rational {
    auto it = x.terms_.find(e);
    if (it == x.terms_.end()) return Rational(0);
    const ExtCoeff& c = it->second;
    switch (part) {
      case 0: return c.c0;
      case 1: return c.cl;
      case 2: return c.cr;
      default: return c.clr;
    }
  };
  // columns: this * basis_element, reduced at q
  std::vector<std::vector<Rational>> M(8, std::vector<Rational>(9, Rational(0)));
  for (int part = 0; part < 4; ++part)
    for (int e = 0; e < 2; ++e) {
      Scalar b;
      b.mode_ = mode_;
      ExtCoeff c{0, 0, 0, 0};
      (part == 0 ? c.c0 : part == 1 ? c.cl : part == 2 ? c.cr : c.clr) = 1;
      b.set_term(e, c);
      Scalar col = (*this * b).reduce_q(q);
      for (int p2 = 0; p2 < 4; ++p2)
        for (int e2 = 0; e2 < 2; ++e2) M[idx(e2, p2)][idx(e, part)] = comp(col, e2, p2);
    }
  M[0][8] = 1;  // solve (this)*(y) = 1
  // Gaussian elimination
  for (int col = 0, row = 0; col < 8 && row < 8; ++col) {
    int piv = -1;
    for (int i = row; i < 8; ++i)
      if (M[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[piv], M[row]);
    Rational d = M[row][col];
    for (auto& x : M[row]) x /= d;
    for (int i = 0; i < 8; ++i) {
      if (i == row || M[i][col] == 0) continue;
      Rational f = M[i][col];
      for (int k = col; k <= 8; ++k) M[i][k] -= f * M[row][k];
    }
    ++row;
  }
  // consistency: every row must be solved (matrix is square; rank defect
  // means the element is a zero divisor, e.g. rho at r = 0)
  for (int i = 0; i < 8; ++i) {
    bool allz = true;
    for (int k = 0; k < 8; ++k) allz = allz && M[i][k] == 0;
    if (allz && M[i][8] != 0) throw std::runtime_error("inverse_at: not invertible");
  }
  Scalar out;
  out.mode_ = mode_;
  for (int part = 0; part < 4; ++part)
    for (int e = 0; e < 2; ++e) {
      // find the row whose pivot is this column
      for (int i = 0; i < 8; ++i) {
        bool pivot_here = M[i][idx(e, part)] == 1;
        for (int k = 0; k < idx(e, part) && pivot_here; ++k)
          pivot_here = M[i][k] == 0;
        if (pivot_here) {
          ExtCoeff c{0, 0, 0, 0};
          (part == 0 ? c.c0 : part == 1 ? c.cl : part == 2 ? c.cr : c.clr) = M[i][8];
          out.add_term(e, c);
          break;
        }
      }
    }
  if (((*this * out).reduce_q(q) - Scalar(1)).reduce_q(q).is_zero()) return out;
  throw std::runtime_error("inverse_at: verification failed");
}

// q-integer [n] = (q^n - q^{-n})/(q - q^{-1}) = q^{n-1} + q^{n-3} + ... + q^{-(n-1)}
inline Scalar qbracket(int n) {
  Scalar out;
  int sign = n < 0 ? -1 : 1;
  n = std::abs(n);
  for (int i = 0; i < n; ++i) out += Scalar::q_pow(n - 1 - 2 * i, Rational(sign));
  return out;
}

// lam = q - q^{-1} (the deformation constant in EF - FE = lam^{-1}(K^2 - K^{-2}))
inline Scalar qlambda_const() { return Scalar::q_pow(1) - Scalar::q_pow(-1); }

// lam^{-1} is not a Laurent polynomial; presentations that need it carry a
// fixed rational q, so we invert numerically-exactly via reduce_q.
inline Scalar qlambda_const_inv(const Rational& q) {
  return qlambda_const().reduce_q(q).inverse_at(q);
}

}  // namespace qsphere
