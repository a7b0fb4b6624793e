// Coalgebra structure on U_q(su2) and O(SU_q(2)), the dual pairing, the
// induced left/right actions, the skew-primitive element X_r, and the
// embedded sphere generators.
#pragma once

#include <qsphere/check.hpp>
#include <qsphere/ncpoly.hpp>

#include <map>
#include <mutex>

namespace qsphere {

// element of A (x) A or U (x) U, legs kept in normal form
struct TensorPoly {
  std::map<std::pair<Word, Word>, Scalar> terms;
  bool is_zero() const { return terms.empty(); }
};

class Hopf {
 public:
  explicit Hopf(const ParamContext& ctx);

  const ParamContext& ctx() const { return ctx_; }
  const Presentation& U() const { return U_; }
  const Presentation& A() const { return A_; }

  // coproducts, extended multiplicatively, legs normal-formed; alg selects
  // the owning algebra by presentation name (Uq_su2 or O_SUq2)
  TensorPoly coproduct(const NCPoly& x, const std::string& alg) const;
  Scalar counit(const NCPoly& x, const std::string& alg) const;
  NCPoly antipode_U(const NCPoly& f) const;  // S(K)=K^-1, S(E)=-qE, S(F)=-q^-1 F

  // dual pairing <f, x>, f in U, x in A
  Scalar pairing(const NCPoly& f, const NCPoly& x) const;

  // f |> x = x_(1) <f, x_(2)>     x <| f = <f, x_(1)> x_(2)
  NCPoly act_left(const NCPoly& f, const NCPoly& x) const;
  NCPoly act_right(const NCPoly& x, const NCPoly& f) const;

  // X_r in U: q^{1/2}(q^{-1}-q)^{-1} r^{-1/2}(1-K^2) + EK + qFK for finite
  // r > 0; 1 - K^2 at r = 0; EK + qFK at r = infinity.
  NCPoly Xr() const;

  // Embedded sphere generators inside O(SU_q(2)).  The (1+q^{-2})^{1/2}
  // normalization of x_{-1}, x_1 is irrational and therefore deferred to the
  // numeric layer; the returned elements omit it (x_0 is exact as stated).
  struct SphereGens {
    NCPoly xm1, x0, x1;
    double radical_factor;  // (1+q^{-2})^{1/2}, to reinstate numerically
  };
  SphereGens embed_sphere_generators() const;

  // *-automorphism theta: a,d fixed, b -> -qc, c -> -q^{-1}b
  NCPoly theta(const NCPoly& x) const;

  // X_r right-eigenvalue of u_j (doubled half-integer j2 = 2j)
  Scalar mu_j(int j2) const;

 private:
  ParamContext ctx_;
  Presentation U_, A_;
  std::map<Sym, TensorPoly> gen_cop_U_, gen_cop_A_;
  mutable std::map<Word, TensorPoly> cop_cache_U_, cop_cache_A_;
  mutable std::map<std::pair<Word, Word>, Scalar> pair_cache_;
  mutable std::mutex mu_;

  TensorPoly cop_word(const Word& w, bool in_U) const;
  Scalar pair_words(const Word& f, const Word& x) const;
  TensorPoly tp_mul(const TensorPoly& a, const TensorPoly& b, const Presentation& p) const;
  void tp_add(TensorPoly& a, const Word& l, const Word& r, const Scalar& c,
              const Presentation& p) const;
};

// Hopf-layer verification: coassociativity/counit laws, module-algebra law,
// pairing-respects-relations, skew-primitivity, actions vs relations.
CheckReport check_hopf_axioms(const Hopf& h, unsigned seed = 11);

// x_i <| X_r = 0 for the embedded generators; counit value of x0.
CheckReport check_sphere_invariance(const Hopf& h);

}  // namespace qsphere
