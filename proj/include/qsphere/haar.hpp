#pragma once
// Invariant state on the quantum-SU(2) coordinate algebra (exact layer) and
// the function-calculus model of the quantum sphere with its two state
// realizations (numeric layer).

#include <functional>
#include <map>
#include <vector>

#include <qsphere/check.hpp>
#include <qsphere/hopf.hpp>

namespace qsphere {

// ---------------------------------------------------------------------------
// Exact layer: the unique invariant state h on the coordinate algebra of
// quantum SU(2).  h vanishes on every monomial except powers of bc, and the
// values t_k = h((bc)^k) are determined by t_0 = 1 together with the
// invariance equations h(E . x) = 0 = h(F . x).  The table is obtained by
// exact Gaussian elimination of those equations over the rationals; the
// system rank is kept as evidence that the solution is unique.
// ---------------------------------------------------------------------------
class HaarTable {
 public:
  // max_degree bounds the total degree of monomials the state can evaluate;
  // values t_0 .. t_{max_degree/2} are solved for.  max_degree <= 12.
  HaarTable(const ParamContext& ctx, int max_degree);

  // h(x) for x in the quantum-SU(2) coordinate algebra.  Exact.  Throws if
  // the normal form of x contains a balanced monomial beyond the table bound.
  Scalar haar(const NCPoly& x) const;

  // <a_, b_> = h(star(b_) * a_).
  Scalar inner(const NCPoly& a_, const NCPoly& b_) const;

  double haar_d(const NCPoly& x) const { return haar(x).eval(ctx_); }

  int max_degree() const { return max_degree_; }
  int unknowns() const { return static_cast<int>(t_.size()); }
  // rank of the solved linear system; equals unknowns() iff the invariant
  // state of this degree is unique.
  int rank() const { return rank_; }
  int equations() const { return equations_; }
  const std::vector<Rational>& balanced_values() const { return t_; }
  const Hopf& hopf() const { return hopf_; }
  const Presentation& algebra() const { return hopf_.A(); }

 private:
  ParamContext ctx_;
  Hopf hopf_;
  int max_degree_;
  int rank_ = 0;
  int equations_ = 0;
  std::vector<Rational> t_;  // t_[k] = h((bc)^k)
};

// Internal consistency of the table: normalization, vanishing on non-balanced
// monomials, invariance h(E . x) = h(F . x) = 0 on random elements, the
// closed-form values h((bc)^n) = (-1)^n q^n (1-q^2)/(1-q^{2n+2}), and
// uniqueness evidence (full rank).
CheckReport check_haar_table(const ParamContext& ctx, int max_degree);

// ---------------------------------------------------------------------------
// Numeric layer: elements of the quantum-sphere function algebra in the form
//   x = sum_k f_k(A) B^{#k},   B^{#k} := B^k (k >= 0), (B^*)^{-k} (k < 0),
// with f_k real-valued functions on the spectrum of A.
// ---------------------------------------------------------------------------
using RealFn = std::function<double(double)>;

struct FuncElement {
  std::map<int, RealFn> terms;  // k -> f_k

  static FuncElement zero() { return {}; }
  // f(A) B^{#k}
  static FuncElement make(RealFn f, int k = 0) {
    FuncElement x;
    x.terms[k] = std::move(f);
    return x;
  }
  static FuncElement one() {
    return make([](double) { return 1.0; });
  }
};

// Arithmetic, star, module actions, and states for FuncElements at fixed
// parameters.  Products use B^{#m} g(A) = g(q^{2m} A) B^{#m} together with
// B^*B = (lam_+ - A)(A - lam_-) (resp. 1 - A^2 at r = infinity).
class FuncAlgebra {
 public:
  explicit FuncAlgebra(const ParamContext& ctx);

  const ParamContext& ctx() const { return ctx_; }

  FuncElement add(const FuncElement& x, const FuncElement& y) const;
  FuncElement scale(double c, const FuncElement& x) const;
  FuncElement mul(const FuncElement& x, const FuncElement& y) const;
  FuncElement star(const FuncElement& x) const;

  // gen in {"E", "F", "K", "Kinv"}: left module-algebra action on functions
  // by q-difference operators.
  FuncElement act(const std::string& gen, const FuncElement& x) const;

  // Generators as FuncElements.
  FuncElement gen_A() const;
  FuncElement gen_B() const;
  FuncElement gen_Bst() const;

  // characteristic functions of the positive / negative part of spec(A)
  RealFn chi_plus() const;
  RealFn chi_minus() const;
  // characteristic function of the single spectral point lam_sign q^{2n}
  RealFn chi_point(int sign, int n) const;

  // quadratic spectral factor p_r(a) = (lam_+ - a)(a - lam_-)
  double p_r(double a) const;
  // eigenvalue of A on basis vector n of the sign-sector shift representation
  double a_eig(int sign, int n) const;
  // B lowering weight c_sign(n) = ((q^{2n} lam - lam_-)(lam_+ - q^{2n} lam))^{1/2}
  double c_weight(int sign, int n) const;

  // Invariant state, series form:
  //   h(x) = gam_+ sum_n f_0(lam_+ q^{2n}) q^{2n}
  //        + gam_- sum_n f_0(lam_- q^{2n}) q^{2n},
  // truncated so the geometric tail is below tail_bound (bound recorded in
  // *tail_note if given).
  double sphere_state_series(const FuncElement& x, double tail_bound,
                             std::string* tail_note = nullptr) const;

  // Invariant state, trace form: h(x) = (1-q^2)/(lam_+ - lam_-) Tr(|A| x)
  // over the shift representation(s) materialized as dense N x N matrices.
  double sphere_state_trace(const FuncElement& x, int N) const;

  // Dense matrix of x on basis vectors 0..N-1 of the sign-sector shift
  // representation (row-major, entry [i][j] = <eta_i, x eta_j>).
  std::vector<std::vector<double>> materialize(const FuncElement& x, int sign,
                                               int N) const;

 private:
  ParamContext ctx_;
  FuncElement act_E(const FuncElement& x) const;
  FuncElement act_F(const FuncElement& x) const;
  FuncElement act_K(const FuncElement& x, int dir) const;
};

// q-difference actions agree with the commutator form
//   E . T = -q^{-1/2} (q - q^{-1})^{-1} sgn(A) |A|^{-1/2} [B^*, T] |A|^{-1/2}
// (and its F / K analogues) on materialized operators, and A x = (K^2 . x) A,
// [B^*, x] = -q^{1/2}(q - q^{-1}) A (K^{-1}E . x) hold as operator identities.
CheckReport check_operator_actions(const ParamContext& ctx);

// h(E . x) = 0 = h(F . x) on smooth elements, the non-vanishing value
// h(E . (B chi_+(A))) = q^{1/2} (1-q^2)^{-1} gam_+ lam_- on the
// discontinuous element, h(E . (B A chi_+(A))) = 0, and twisted-trace
// relations h(y g(A)) = h(g(A) y), h(y B) = q^2 h(B y).
CheckReport check_state_properties(const ParamContext& ctx);

// series and trace realizations agree on a sample of elements
CheckReport check_state_realizations(const ParamContext& ctx);

}  // namespace qsphere
