#include <qsphere/haar.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qsphere {

// ---------------------------------------------------------------------------
// exact invariant state
// ---------------------------------------------------------------------------

namespace {

// If w is b^k c^k, return k; otherwise -1.
int balanced_index(const Word& w) {
  size_t i = 0;
  while (i < w.size() && w[i] == "b") ++i;
  size_t nb = i;
  while (i < w.size() && w[i] == "c") ++i;
  if (i != w.size()) return -1;
  size_t nc = i - nb;
  return nb == nc ? static_cast<int>(nb) : -1;
}

Word balanced_word(int mult_b, int mult_c, const Sym& tail) {
  Word w;
  for (int i = 0; i < mult_b; ++i) w.push_back("b");
  for (int i = 0; i < mult_c; ++i) w.push_back("c");
  if (!tail.empty()) w.push_back(tail);
  return w;
}

}  // namespace

HaarTable::HaarTable(const ParamContext& ctx, int max_degree)
    : ctx_(ctx), hopf_(ctx), max_degree_(max_degree) {
  if (max_degree < 0 || max_degree > 12)
    throw std::runtime_error("HaarTable: max_degree must be in [0, 12]");
  const int K = max_degree / 2;  // unknowns t_0 .. t_K
  const Presentation& A = hopf_.A();
  const Presentation& U = hopf_.U();

  // rows of the linear system: K+1 unknown coefficients followed by the rhs
  std::vector<std::vector<Rational>> rows;
  {
    std::vector<Rational> norm(K + 2, Rational(0));
    norm[0] = 1;
    norm[K + 1] = 1;  // t_0 = 1
    rows.push_back(norm);
  }

  // h(E.x) = 0 resp. h(F.x) = 0 contributes one row per half-integer power
  // of q appearing in the balanced coefficients of the normal form.
  auto add_constraint = [&](const NCPoly& y) {
    std::vector<Rational> row0(K + 2, Rational(0)), row1(K + 2, Rational(0));
    NCPoly ynf = A.normal_form(y);
    for (const auto& [w, c] : ynf.terms) {
      int k = balanced_index(w);
      if (k < 0) continue;
      if (k > K) throw std::runtime_error("HaarTable: constraint exceeds bound");
      Scalar cr = c.reduce_q(ctx_.q);
      for (const auto& [e, ec] : cr.terms()) {
        if (!ec.is_rational())
          throw std::runtime_error("HaarTable: non-rational constraint entry");
        if (e == 0)
          row0[k] += ec.c0;
        else if (e == 1)
          row1[k] += ec.c0;
        else
          throw std::runtime_error("HaarTable: unreduced scalar");
      }
    }
    auto nonzero = [&](const std::vector<Rational>& r) {
      return std::any_of(r.begin(), r.end(), [](const Rational& v) { return v != 0; });
    };
    if (nonzero(row0)) rows.push_back(row0);
    if (nonzero(row1)) rows.push_back(row1);
  };

  NCPoly E = U.gen("E"), F = U.gen("F");
  // E acting on b^j c^{j+1} a lands in the balanced span (degree 2j+2)
  for (int j = 0; j + 1 <= K; ++j)
    add_constraint(hopf_.act_left(E, A.poly(balanced_word(j, j + 1, "a"))));
  // F acting on b^j c^{j-1} d lands in the balanced span (degree 2j)
  for (int j = 1; j <= K; ++j)
    add_constraint(hopf_.act_left(F, A.poly(balanced_word(j, j - 1, "d"))));
  equations_ = static_cast<int>(rows.size());

  // exact Gauss-Jordan elimination
  int rank = 0;
  for (int col = 0; col <= K && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int i = rank; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    Rational d = rows[rank][col];
    for (auto& v : rows[rank]) v /= d;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == rank || rows[i][col] == 0) continue;
      Rational f = rows[i][col];
      for (int j2 = 0; j2 <= K + 1; ++j2) rows[i][j2] -= f * rows[rank][j2];
    }
    ++rank;
  }
  rank_ = rank;
  for (int i = rank; i < static_cast<int>(rows.size()); ++i)
    if (rows[i][K + 1] != 0)
      throw std::runtime_error("HaarTable: inconsistent invariance system");
  if (rank != K + 1)
    throw std::runtime_error("HaarTable: invariant state not unique at this degree");

  t_.assign(K + 1, Rational(0));
  for (int i = 0; i < rank; ++i) {
    int col = 0;
    while (col <= K && rows[i][col] == 0) ++col;
    t_[col] = rows[i][K + 1];
  }
}

Scalar HaarTable::haar(const NCPoly& x) const {
  NCPoly xnf = hopf_.A().normal_form(x);
  Scalar out;
  for (const auto& [w, c] : xnf.terms) {
    int k = balanced_index(w);
    if (k < 0) continue;
    if (k >= static_cast<int>(t_.size()))
      throw std::runtime_error("HaarTable: element degree exceeds table bound");
    out = out + c * Scalar(t_[k]);
  }
  return out.reduce_q(ctx_.q);
}

Scalar HaarTable::inner(const NCPoly& a_, const NCPoly& b_) const {
  const Presentation& A = hopf_.A();
  return haar(A.mul(A.star(b_), a_));
}

CheckReport check_haar_table(const ParamContext& ctx, int max_degree) {
  CheckReport rep{"haar_table"};
  HaarTable h(ctx, max_degree);
  const Presentation& A = h.algebra();
  const Presentation& U = h.hopf().U();
  const int K = max_degree / 2;

  rep.check(h.rank() == h.unknowns(), "invariance system has full rank (unique state)");
  {
    std::ostringstream os;
    os << "unknowns=" << h.unknowns() << " equations=" << h.equations()
       << " rank=" << h.rank();
    rep.note(os.str());
  }
  rep.check(h.haar(A.unit()) == Scalar::one(), "h(1) = 1");

  // closed form h((bc)^n) = (-1)^n q^n (1-q^2) / (1-q^{2n+2}), exact
  for (int n = 0; n <= K; ++n) {
    Rational qn = Scalar::pow_rat(ctx.q, n);
    Rational q2 = Scalar::pow_rat(ctx.q, 2);
    Rational expect = qn * (1 - q2) / (1 - Scalar::pow_rat(ctx.q, 2 * n + 2));
    if (n % 2 == 1) expect = -expect;
    rep.check(h.balanced_values()[n] == expect,
              "h((bc)^" + std::to_string(n) + ") matches closed form");
  }

  // vanishing off the balanced span
  for (const Sym& g : {std::string("a"), std::string("b"), std::string("c"), std::string("d")})
    rep.check(h.haar(A.gen(g)) == Scalar::zero(), "h(" + g + ") = 0");
  rep.check(h.haar(A.mul(A.gen("a"), A.gen("b"))) == Scalar::zero(), "h(ab) = 0");

  // exact two-sided invariance on random elements of bounded degree
  std::mt19937 rng(2026);
  std::uniform_int_distribution<int> pick(0, 3), coef(-3, 3), len(0, std::max(0, max_degree - 2));
  const std::vector<Sym> letters = {"a", "b", "c", "d"};
  bool inv_ok = true;
  for (int trial = 0; trial < 12; ++trial) {
    NCPoly x;
    for (int t = 0; t < 3; ++t) {
      Word w;
      int L = len(rng);
      for (int i = 0; i < L; ++i) w.push_back(letters[pick(rng)]);
      x = A.add(x, A.poly(w, Scalar(Rational(coef(rng)))));
    }
    for (const Sym& gname : {std::string("E"), std::string("F")}) {
      NCPoly f = U.gen(gname);
      if (!(h.haar(h.hopf().act_left(f, x)) == Scalar::zero())) inv_ok = false;
      if (!(h.haar(h.hopf().act_right(x, f)) == Scalar::zero())) inv_ok = false;
    }
    // K-invariance: h(K.x) = h(x)
    NCPoly kx = h.hopf().act_left(U.gen("K"), x);
    if (!(h.haar(kx) == h.haar(x))) inv_ok = false;
  }
  rep.check(inv_ok, "h(E.x) = h(F.x) = h(x.E) = h(x.F) = 0 and h(K.x) = h(x) on samples");

  // positivity probe: h(x* x) > 0 numerically on a small sample
  bool pos_ok = true;
  for (int trial = 0; trial < 4; ++trial) {
    NCPoly x;
    for (int t = 0; t < 2; ++t) {
      Word w;
      int L = std::min(len(rng), max_degree / 2);
      for (int i = 0; i < L; ++i) w.push_back(letters[pick(rng)]);
      x = A.add(x, A.poly(w, Scalar(Rational(coef(rng)))));
    }
    double v = h.inner(x, x).eval(ctx);
    if (v < -1e-12) pos_ok = false;
    if (A.normal_form(x).is_zero() == false && v <= 0) pos_ok = false;
  }
  rep.check(pos_ok, "h(x* x) > 0 on nonzero samples");
  return rep;
}

// ---------------------------------------------------------------------------
// numeric function calculus
// ---------------------------------------------------------------------------

namespace {

void add_term(FuncElement& x, int k, RealFn f) {
  auto it = x.terms.find(k);
  if (it == x.terms.end()) {
    x.terms[k] = std::move(f);
  } else {
    RealFn old = it->second;
    it->second = [old, f](double a) { return old(a) + f(a); };
  }
}

}  // namespace

FuncAlgebra::FuncAlgebra(const ParamContext& ctx) : ctx_(ctx) {}

double FuncAlgebra::p_r(double a) const {
  return (ctx_.lambda_plus_d() - a) * (a - ctx_.lambda_minus_d());
}

double FuncAlgebra::a_eig(int sign, int n) const {
  double lam = sign >= 0 ? ctx_.lambda_plus_d() : ctx_.lambda_minus_d();
  return lam * std::pow(ctx_.qd(), 2 * n);
}

double FuncAlgebra::c_weight(int sign, int n) const {
  if (n <= 0) return 0.0;
  double v = p_r(a_eig(sign, n));
  return v > 0 ? std::sqrt(v) : 0.0;
}

FuncElement FuncAlgebra::add(const FuncElement& x, const FuncElement& y) const {
  FuncElement out = x;
  for (const auto& [k, f] : y.terms) add_term(out, k, f);
  return out;
}

FuncElement FuncAlgebra::scale(double c, const FuncElement& x) const {
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    RealFn g = f;
    out.terms[k] = [c, g](double a) { return c * g(a); };
  }
  return out;
}

FuncElement FuncAlgebra::mul(const FuncElement& x, const FuncElement& y) const {
  const double q = ctx_.qd();
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    for (const auto& [l, g] : y.terms) {
      // f(A) B^{#k} g(A) B^{#l} = f(A) g(q^{2k} A) B^{#k} B^{#l}
      double q2k = std::pow(q, 2 * k);
      RealFn ff = f, gg = g;
      RealFn h0 = [ff, gg, q2k](double a) { return ff(a) * gg(q2k * a); };
      if (k >= 0 && l >= 0) {
        add_term(out, k + l, h0);
      } else if (k <= 0 && l <= 0) {
        add_term(out, k + l, h0);
      } else if (k > 0) {  // l < 0: contract B^k (B^*)^m via B B^* = p_r(q^2 A)
        int m = -l, t = std::min(k, m);
        FuncAlgebra self = *this;
        int lo = k - t + 1, hi = k;
        RealFn h1 = [self, h0, q, lo, hi](double a) {
          double v = h0(a);
          for (int i = lo; i <= hi; ++i) v *= self.p_r(std::pow(q, 2 * i) * a);
          return v;
        };
        add_term(out, k + l, h1);
      } else {  // k < 0, l > 0: contract (B^*)^m B^l via B^* B = p_r(A)
        int m = -k, t = std::min(m, l);
        FuncAlgebra self = *this;
        int lo = m - t, hi = m - 1;
        RealFn h1 = [self, h0, q, lo, hi](double a) {
          double v = h0(a);
          for (int i = lo; i <= hi; ++i) v *= self.p_r(std::pow(q, -2 * i) * a);
          return v;
        };
        add_term(out, k + l, h1);
      }
    }
  }
  return out;
}

FuncElement FuncAlgebra::star(const FuncElement& x) const {
  const double q = ctx_.qd();
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    double sc = std::pow(q, -2 * k);
    RealFn ff = f;
    add_term(out, -k, [ff, sc](double a) { return ff(sc * a); });
  }
  return out;
}

FuncElement FuncAlgebra::gen_A() const {
  return FuncElement::make([](double a) { return a; });
}
FuncElement FuncAlgebra::gen_B() const { return FuncElement::make([](double) { return 1.0; }, 1); }
FuncElement FuncAlgebra::gen_Bst() const {
  return FuncElement::make([](double) { return 1.0; }, -1);
}

RealFn FuncAlgebra::chi_plus() const {
  return [](double a) { return a > 0 ? 1.0 : 0.0; };
}
RealFn FuncAlgebra::chi_minus() const {
  return [](double a) { return a < 0 ? 1.0 : 0.0; };
}
RealFn FuncAlgebra::chi_point(int sign, int n) const {
  double pt = a_eig(sign, n);
  double eps = std::abs(pt) * (1 - ctx_.qd() * ctx_.qd()) / 4;
  return [pt, eps](double a) { return std::abs(a - pt) < eps ? 1.0 : 0.0; };
}

FuncElement FuncAlgebra::act_K(const FuncElement& x, int dir) const {
  const double q = ctx_.qd();
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    double sc = std::pow(q, -dir * k);
    RealFn ff = f;
    out.terms[k] = [sc, ff](double a) { return sc * ff(a); };
  }
  return out;
}

FuncElement FuncAlgebra::act_E(const FuncElement& x) const {
  const double q = ctx_.qd();
  const double sq = std::sqrt(q);
  // negative-control knob: scales the [2]-coefficient of the difference
  // operator, breaking invariance of the state at order perturb
  const double two_q = (1 + q * q) * (1 + ctx_.perturb);
  // the constant term of the E-B cross relation is absent at r = infinity,
  // and with it the [k]-ladder piece of the difference operator
  const double eps = ctx_.r_infinite() ? 0.0 : 1.0;
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    RealFn ff = f;
    if (k >= 0) {
      // term = B^k g(A), g(a) = f(q^{-2k} a)
      double qm2k = std::pow(q, -2 * k);
      RealFn g = [ff, qm2k](double a) { return ff(qm2k * a); };
      if (k >= 1) {
        double brk = eps * (std::pow(q, -k) - std::pow(q, k)) / (1 / q - q);
        double c3 = (std::pow(q, -3 * k) - std::pow(q, k)) / (std::pow(q, -3) - q);
        double q2k1 = std::pow(q, 2 * (k - 1));
        add_term(out, k - 1,
                 [g, q2k1, sq, brk](double a) { return sq * brk * g(q2k1 * a); });
        add_term(out, k - 1, [g, q2k1, sq, c3, two_q](double a) {
          return -sq * two_q * c3 * q2k1 * a * g(q2k1 * a);
        });
      }
      double q2 = q * q;
      RealFn dg = [g, q2](double a) { return (g(a) - g(q2 * a)) / ((1 - q2) * a); };
      // B^k B^* dg(A) = B^k dg(q^{-2} A) B^*
      double qm2 = 1 / q2;
      FuncElement tail = mul(FuncElement::make([](double) { return 1.0; }, k),
                             FuncElement::make([dg, qm2](double a) { return dg(qm2 * a); }, -1));
      double c = std::pow(q, k) / sq;
      for (const auto& [kk, hf] : tail.terms) {
        RealFn hh = hf;
        add_term(out, kk, [c, hh](double a) { return c * hh(a); });
      }
    } else {
      // term = f(A) (B^*)^m
      int m = -k;
      double qm2 = 1 / (q * q);
      RealFn nf = [ff, qm2](double a) { return (ff(qm2 * a) - ff(a)) / ((qm2 - 1) * a); };
      double c = std::pow(q, m) / sq;
      add_term(out, -(m + 1), [c, nf](double a) { return c * nf(a); });
    }
  }
  return out;
}

FuncElement FuncAlgebra::act_F(const FuncElement& x) const {
  const double q = ctx_.qd();
  const double sq = std::sqrt(q);
  const double two_q = (1 + q * q) * (1 + ctx_.perturb);
  const double eps = ctx_.r_infinite() ? 0.0 : 1.0;
  FuncElement out;
  for (const auto& [k, f] : x.terms) {
    RealFn ff = f;
    if (k >= 0) {
      // term = B^k g(A): F.(B^k g(A)) = -q^{k-3/2} B^{k+1} grad(g)(A)
      double qm2k = std::pow(q, -2 * k);
      RealFn g = [ff, qm2k](double a) { return ff(qm2k * a); };
      double qm2 = 1 / (q * q);
      RealFn ng = [g, qm2](double a) { return (g(qm2 * a) - g(a)) / ((qm2 - 1) * a); };
      double c = -std::pow(q, k) / (q * sq);
      double q2k1 = std::pow(q, 2 * (k + 1));
      add_term(out, k + 1, [c, ng, q2k1](double a) { return c * ng(q2k1 * a); });
    } else {
      int m = -k;
      double q2 = q * q;
      RealFn df = [ff, q2](double a) { return (ff(a) - ff(q2 * a)) / ((1 - q2) * a); };
      // -q^{m-3/2} df(A) B (B^*)^m
      FuncElement head = mul(FuncElement::make(df, 1),
                             FuncElement::make([](double) { return 1.0; }, -m));
      double c = -std::pow(q, m) / (q * sq);
      for (const auto& [kk, hf] : head.terms) {
        RealFn hh = hf;
        add_term(out, kk, [c, hh](double a) { return c * hh(a); });
      }
      double brm = eps * (std::pow(q, -m) - std::pow(q, m)) / (1 / q - q);
      double c3 = (std::pow(q, -3 * m) - std::pow(q, m)) / (std::pow(q, -3) - q);
      double c1 = -brm / sq;
      double c2 = two_q * c3 / sq;
      add_term(out, -(m - 1), [c1, ff](double a) { return c1 * ff(a); });
      add_term(out, -(m - 1), [c2, ff](double a) { return c2 * a * ff(a); });
    }
  }
  return out;
}

FuncElement FuncAlgebra::act(const std::string& gen, const FuncElement& x) const {
  if (gen == "E") return act_E(x);
  if (gen == "F") return act_F(x);
  if (gen == "K") return act_K(x, +1);
  if (gen == "Kinv") return act_K(x, -1);
  throw std::runtime_error("FuncAlgebra::act: unknown generator " + gen);
}

double FuncAlgebra::sphere_state_series(const FuncElement& x, double tail_bound,
                                        std::string* tail_note) const {
  const double q = ctx_.qd();
  auto it = x.terms.find(0);
  if (it == x.terms.end()) {
    if (tail_note) *tail_note = "no diagonal part; state value 0";
    return 0.0;
  }
  const RealFn& f = it->second;
  const bool minus_sector = !(ctx_.r.kind == RMode::Finite && ctx_.r.r == 0);
  double gp = ctx_.gamma_plus_d(), gm = minus_sector ? ctx_.gamma_minus_d() : 0.0;
  // bound |f| on the first stretch of the spectrum (f is assumed bounded)
  double M = 1e-300;
  for (int n = 0; n < 64; ++n) {
    M = std::max(M, std::abs(f(a_eig(+1, n))));
    if (minus_sector) M = std::max(M, std::abs(f(a_eig(-1, n))));
  }
  double coef = (std::abs(gp) + std::abs(gm)) * M / (1 - q * q);
  int N = 64;
  if (coef > tail_bound)
    N = std::max(N, static_cast<int>(std::ceil(std::log(tail_bound / coef) / (2 * std::log(q)))) + 2);
  // never cross into subnormal spectrum values (difference quotients inside
  // f would hit 0/0 there); the tail at this cutoff is < 1e-240 regardless
  int n_underflow = static_cast<int>(240 * std::log(10.0) / (-2 * std::log(q)));
  N = std::min(N, std::max(64, n_underflow));
  double out = 0;
  for (int n = N - 1; n >= 0; --n) {
    double w = std::pow(q, 2 * n);
    out += gp * f(a_eig(+1, n)) * w;
    if (minus_sector) out += gm * f(a_eig(-1, n)) * w;
  }
  if (tail_note) {
    std::ostringstream os;
    os << "truncated at N=" << N << "; geometric tail below " << coef * std::pow(q, 2 * N)
       << " (requested " << tail_bound << ")";
    *tail_note = os.str();
  }
  return out;
}

std::vector<std::vector<double>> FuncAlgebra::materialize(const FuncElement& x, int sign,
                                                          int N) const {
  std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
  for (const auto& [k, f] : x.terms) {
    if (k >= 0) {
      // f(A) B^k lowers the index by k
      for (int j = k; j < N; ++j) {
        double w = 1;
        for (int i = 0; i < k; ++i) w *= c_weight(sign, j - i);
        M[j - k][j] += f(a_eig(sign, j - k)) * w;
      }
    } else {
      int m = -k;
      for (int j = 0; j + m < N; ++j) {
        double w = 1;
        for (int i = 1; i <= m; ++i) w *= c_weight(sign, j + i);
        M[j + m][j] += f(a_eig(sign, j + m)) * w;
      }
    }
  }
  return M;
}

double FuncAlgebra::sphere_state_trace(const FuncElement& x, int N) const {
  const bool minus_sector = !(ctx_.r.kind == RMode::Finite && ctx_.r.r == 0);
  double tr = 0;
  for (int sign : {+1, -1}) {
    if (sign < 0 && !minus_sector) continue;
    auto M = materialize(x, sign, N);
    for (int n = 0; n < N; ++n) tr += std::abs(a_eig(sign, n)) * M[n][n];
  }
  return tr * (1 - ctx_.qd() * ctx_.qd()) / (ctx_.lambda_plus_d() - ctx_.lambda_minus_d());
}

// ---------------------------------------------------------------------------
// numeric-layer checks
// ---------------------------------------------------------------------------

namespace {

using Mat = std::vector<std::vector<double>>;

Mat mat_mul(const Mat& a, const Mat& b) {
  int n = static_cast<int>(a.size());
  Mat c(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (int j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

Mat mat_sub(const Mat& a, const Mat& b) {
  Mat c = a;
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) c[i][j] -= b[i][j];
  return c;
}

Mat mat_scale(double s, Mat a) {
  for (auto& row : a)
    for (auto& v : row) v *= s;
  return a;
}

// max |entry| over the top-left block of size n - margin
double block_norm(const Mat& a, int margin) {
  int n = static_cast<int>(a.size()) - margin;
  double out = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out = std::max(out, std::abs(a[i][j]));
  return out;
}

Mat diag_fn(const FuncAlgebra& fa, int sign, int N, const RealFn& f) {
  Mat d(N, std::vector<double>(N, 0.0));
  for (int n = 0; n < N; ++n) d[n][n] = f(fa.a_eig(sign, n));
  return d;
}

// deterministic sample elements: polynomial coefficients times B^{#k}
std::vector<FuncElement> sample_elements(std::mt19937& rng, int count, int max_k, int max_deg) {
  std::uniform_int_distribution<int> kd(-max_k, max_k), dd(0, max_deg), cd(-3, 3);
  std::vector<FuncElement> out;
  for (int s = 0; s < count; ++s) {
    FuncElement x;
    int nterms = 1 + (s % 3);
    for (int t = 0; t < nterms; ++t) {
      int k = kd(rng), deg = dd(rng);
      std::vector<double> coefs(deg + 1);
      for (auto& c : coefs) c = cd(rng);
      add_term(x, k, [coefs](double a) {
        double v = 0;
        for (int i = static_cast<int>(coefs.size()) - 1; i >= 0; --i) v = v * a + coefs[i];
        return v;
      });
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

CheckReport check_operator_actions(const ParamContext& ctx) {
  CheckReport rep{"operator_actions"};
  FuncAlgebra fa(ctx);
  const double q = ctx.qd();
  const double lam = q - 1 / q;
  const int N = 40, margin = 8;
  const bool minus_sector = !(ctx.r.kind == RMode::Finite && ctx.r.r == 0);

  std::mt19937 rng(71);
  auto samples = sample_elements(rng, 8, 2, 3);
  samples.push_back(fa.gen_A());
  samples.push_back(fa.gen_B());
  samples.push_back(fa.gen_Bst());

  // All identities are compared in division-free arrangements (multiplied
  // through by |A|^{1/2} resp. A): the raw forms contain |A|^{-1/2} weights
  // which amplify double-precision cancellation at the tail of the spectrum
  // without adding mathematical content.
  double worst = 0, worst_mod = 0;
  for (int sign : {+1, -1}) {
    if (sign < 0 && !minus_sector) continue;
    Mat B = fa.materialize(fa.gen_B(), sign, N);
    Mat Bst = fa.materialize(fa.gen_Bst(), sign, N);
    Mat Adiag = fa.materialize(fa.gen_A(), sign, N);
    Mat absA_h = diag_fn(fa, sign, N, [](double a) { return std::sqrt(std::abs(a)); });
    Mat sgnA = diag_fn(fa, sign, N, [](double a) { return a >= 0 ? 1.0 : -1.0; });

    for (const auto& x : samples) {
      Mat X = fa.materialize(x, sign, N);

      // |A|^{1/2} (E.x) |A|^{1/2} = -q^{-1/2} lam^{-1} sgn(A) [B^*, x]
      Mat commE = mat_sub(mat_mul(Bst, X), mat_mul(X, Bst));
      Mat rhsE = mat_scale(-1 / (std::sqrt(q) * lam), mat_mul(sgnA, commE));
      Mat lhsE = mat_mul(absA_h, mat_mul(fa.materialize(fa.act("E", x), sign, N), absA_h));
      worst = std::max(worst, block_norm(mat_sub(lhsE, rhsE), margin));

      // |A|^{1/2} (F.x) |A|^{1/2} = -q^{-3/2} lam^{-1} sgn(A) [B, x]
      Mat commF = mat_sub(mat_mul(B, X), mat_mul(X, B));
      Mat rhsF = mat_scale(-1 / (q * std::sqrt(q) * lam), mat_mul(sgnA, commF));
      Mat lhsF = mat_mul(absA_h, mat_mul(fa.materialize(fa.act("F", x), sign, N), absA_h));
      worst = std::max(worst, block_norm(mat_sub(lhsF, rhsF), margin));

      // (K.x) |A|^{1/2} = |A|^{1/2} x
      Mat lhsK = mat_mul(fa.materialize(fa.act("K", x), sign, N), absA_h);
      worst = std::max(worst, block_norm(mat_sub(lhsK, mat_mul(absA_h, X)), margin));

      // A x = (K^2 . x) A
      Mat k2x = fa.materialize(fa.act("K", fa.act("K", x)), sign, N);
      worst = std::max(worst,
                       block_norm(mat_sub(mat_mul(Adiag, X), mat_mul(k2x, Adiag)), margin));

      // [B^*, x] = -q^{1/2} lam A (K^{-1}E . x)
      Mat keX = fa.materialize(fa.act("Kinv", fa.act("E", x)), sign, N);
      worst = std::max(
          worst, block_norm(mat_sub(commE, mat_scale(-std::sqrt(q) * lam, mat_mul(Adiag, keX))),
                            margin));

      // [B, x] = -q^{3/2} lam A (K^{-1}F . x)
      Mat kfX = fa.materialize(fa.act("Kinv", fa.act("F", x)), sign, N);
      worst = std::max(
          worst,
          block_norm(mat_sub(commF, mat_scale(-q * std::sqrt(q) * lam, mat_mul(Adiag, kfX))),
                     margin));
    }

    // module-algebra rule E.(xy) = (E.x)(K.y) + (K^{-1}.x)(E.y), compared
    // with |A|^{1/2} weights for the same stability reason as above
    for (size_t i = 0; i + 1 < samples.size(); i += 2) {
      const auto& x = samples[i];
      const auto& y = samples[i + 1];
      FuncElement lhs = fa.act("E", fa.mul(x, y));
      FuncElement rhs = fa.add(fa.mul(fa.act("E", x), fa.act("K", y)),
                               fa.mul(fa.act("Kinv", x), fa.act("E", y)));
      Mat d = mat_sub(fa.materialize(lhs, sign, N), fa.materialize(rhs, sign, N));
      worst_mod = std::max(worst_mod, block_norm(mat_mul(absA_h, mat_mul(d, absA_h)), margin));
      FuncElement lhsF = fa.act("F", fa.mul(x, y));
      FuncElement rhsF = fa.add(fa.mul(fa.act("F", x), fa.act("K", y)),
                                fa.mul(fa.act("Kinv", x), fa.act("F", y)));
      Mat dF = mat_sub(fa.materialize(lhsF, sign, N), fa.materialize(rhsF, sign, N));
      worst_mod = std::max(worst_mod, block_norm(mat_mul(absA_h, mat_mul(dF, absA_h)), margin));
    }
  }
  rep.check_num(worst, 1e-10, "difference-operator actions match commutator forms");
  // products of sampled polynomials reach values ~1e10 before cancellation,
  // so the composed module-algebra comparison carries a larger rounding floor
  rep.check_num(worst_mod, 1e-8, "actions satisfy the module-algebra rule on products");
  return rep;
}

CheckReport check_state_properties(const ParamContext& ctx) {
  CheckReport rep{"state_properties"};
  FuncAlgebra fa(ctx);
  const double q = ctx.qd();
  const double tail = 1e-13;

  // invariance h(E.x) = h(F.x) = 0 on polynomial elements
  std::mt19937 rng(313);
  auto samples = sample_elements(rng, 10, 2, 4);
  double worst_inv = 0;
  for (const auto& x : samples) {
    worst_inv = std::max(worst_inv, std::abs(fa.sphere_state_series(fa.act("E", x), tail)));
    worst_inv = std::max(worst_inv, std::abs(fa.sphere_state_series(fa.act("F", x), tail)));
  }
  rep.check_num(worst_inv, 1e-9, "h(E.x) = h(F.x) = 0 on polynomial samples");

  // discontinuous counterexample: h(E.(B chi_+(A))) = q^{1/2} gam_+ lam_- / (1-q^2)
  {
    FuncElement x = FuncElement::make(fa.chi_plus(), 1);
    double got = fa.sphere_state_series(fa.act("E", x), tail);
    double expect = std::sqrt(q) * ctx.gamma_plus_d() * ctx.lambda_minus_d() / (1 - q * q);
    if (ctx.r.kind == RMode::Finite && ctx.r.r == 0) expect = 0;
    rep.check_num(std::abs(got - expect), 1e-10,
                  "h(E.(B chi_+(A))) takes its nonzero closed-form value");
    FuncElement y = fa.mul(FuncElement::make(fa.chi_plus(), 1), fa.gen_A());
    rep.check_num(std::abs(fa.sphere_state_series(fa.act("E", y), tail)), 1e-10,
                  "h(E.(B A chi_+(A))) = 0");
  }

  // twisted trace: h(y g(A)) = h(g(A) y), h(y B) = q^2 h(B y), h(y B^*) = q^{-2} h(B^* y)
  double worst_tw = 0;
  auto tw = sample_elements(rng, 6, 2, 3);
  FuncElement gA = FuncElement::make([](double a) { return 1 + a - 2 * a * a; });
  for (const auto& y : tw) {
    double d1 = fa.sphere_state_series(fa.mul(y, gA), tail) -
                fa.sphere_state_series(fa.mul(gA, y), tail);
    double d2 = fa.sphere_state_series(fa.mul(y, fa.gen_B()), tail) -
                q * q * fa.sphere_state_series(fa.mul(fa.gen_B(), y), tail);
    double d3 = fa.sphere_state_series(fa.mul(y, fa.gen_Bst()), tail) -
                fa.sphere_state_series(fa.mul(fa.gen_Bst(), y), tail) / (q * q);
    worst_tw = std::max({worst_tw, std::abs(d1), std::abs(d2), std::abs(d3)});
  }
  rep.check_num(worst_tw, 1e-10, "twisted-trace relations");

  // q-difference equation of the state:
  // h(g(A)) = q^2 h(g(q^2 A)) + gam_+ g(lam_+) + gam_- g(lam_-)
  {
    const bool minus_sector = !(ctx.r.kind == RMode::Finite && ctx.r.r == 0);
    double worst_qf = 0;
    for (int s = 0; s < 4; ++s) {
      double c1 = 1 + s, c2 = 2 - s;
      RealFn g = [c1, c2](double a) { return c1 + c2 * a + a * a * a; };
      double q2 = q * q;
      RealFn gq = [g, q2](double a) { return g(q2 * a); };
      double lhs = fa.sphere_state_series(FuncElement::make(g), tail);
      double rhs = q2 * fa.sphere_state_series(FuncElement::make(gq), tail) +
                   ctx.gamma_plus_d() * g(ctx.lambda_plus_d());
      if (minus_sector) rhs += ctx.gamma_minus_d() * g(ctx.lambda_minus_d());
      worst_qf = std::max(worst_qf, std::abs(lhs - rhs));
    }
    rep.check_num(worst_qf, 1e-10, "q-difference equation of the state");
  }

  // normalization h(1) = 1 and h(A - (1+q^2) A^2) weighting identity:
  // (1-q^2) Tr |A| = lam_+ - lam_-
  {
    double h1 = fa.sphere_state_series(FuncElement::one(), tail);
    rep.check_num(std::abs(h1 - 1.0), 1e-10, "h(1) = 1");
  }
  return rep;
}

CheckReport check_state_realizations(const ParamContext& ctx) {
  CheckReport rep{"state_realizations"};
  FuncAlgebra fa(ctx);
  const double q = ctx.qd();
  int N = static_cast<int>(std::ceil(18 * std::log(10.0) / (-2 * std::log(q)))) + 8;
  N = std::min(N, 4000);
  std::mt19937 rng(977);
  auto samples = sample_elements(rng, 20, 2, 4);
  double worst = 0;
  for (const auto& x : samples) {
    double a = fa.sphere_state_series(x, 1e-13);
    double b = fa.sphere_state_trace(x, N);
    worst = std::max(worst, std::abs(a - b));
  }
  rep.check_num(worst, 1e-10, "series and trace state realizations agree on 20 samples");
  return rep;
}

}  // namespace qsphere
