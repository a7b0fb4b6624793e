#pragma once
// Line-bundle data over the quantum sphere inside quantum SU(2): the ladder
// vectors u_j, w_j, v^l_{kj}, their X_r-eigenvalues mu_j, the projector
// matrices P_j, the map Psi_j, and the chart matrices.
//
// Half-integers are passed doubled throughout: j2 = 2j, l2 = 2l, k2 = 2k.

#include <optional>
#include <vector>

#include <qsphere/check.hpp>
#include <qsphere/haar.hpp>
#include <qsphere/hopf.hpp>

namespace qsphere {

struct BasisVector {
  int l2 = 0, k2 = 0;
  NCPoly vec;      // unnormalized: F^{l-k} . (x1^{l-|j|} u_j)
  Scalar norm2;    // exact h(vec* vec); the normalization constant is norm2^{-1/2}
  double norm2_d = 0.0;
};

struct HopfModuleBasis {
  int j2 = 0;  // signed
  int L2 = 0;
  std::vector<BasisVector> vectors;  // ordered by (l2, k2), k2 descending from l2
  const BasisVector& at(int l2, int k2) const;
};

struct ProjectorMatrix {
  int j2 = 0;                 // signed; matrix size 2|j|+1
  std::vector<NCPoly> v;      // unnormalized ladder vectors, k2 = -|j2|, ..., |j2|
  std::vector<Scalar> norm2;  // exact squared norms; N_k^2 = norm2[k]^{-1}
  int size() const { return static_cast<int>(v.size()); }
};

class Bundle {
 public:
  explicit Bundle(const ParamContext& ctx);

  const ParamContext& ctx() const { return ctx_; }
  const Hopf& hopf() const { return hopf_; }
  const Presentation& A() const { return hopf_.A(); }

  // Invariant state on quantum SU(2) via the closed-form balanced values
  // t_k = (-1)^k q^k (1-q^2)/(1-q^{2k+2}) (cross-checked against the solved
  // linear system in HaarTable for low degrees); valid in any degree.
  Scalar haar_su2(const NCPoly& x) const;
  double haar_su2_d(const NCPoly& x) const { return haar_su2(x).eval(ctx_); }
  Scalar inner(const NCPoly& a, const NCPoly& b) const;

  // ladder seeds: u_j (j2 >= 0), w_j (j2 >= 0), and the signed seed
  // u_j for j >= 0 resp. E^{2|j|} . w_{|j|} for j < 0
  NCPoly u_plus(int j2) const;
  NCPoly w_plus(int j2) const;
  NCPoly u_vec(int j2) const;

  // spin-1 sphere generators embedded in quantum SU(2) (radical-free scaling)
  NCPoly x1_embedded() const;

  // vectors v^l_{kj} for l = |j| .. L, with exact norms; checks the weight,
  // highest-weight, X_r-eigenvalue and ladder invariants exactly and the
  // Gram identity numerically.  L2 <= |j2| + 8.
  HopfModuleBasis build_basis(int j2, int L2, CheckReport* rep = nullptr) const;

  // u_j <| X_r = mu_j u_j and w_j <| X_r = mu_{-j} w_j exactly, plus pairwise
  // distinctness of the eigenvalues over the given range.
  CheckReport check_mu_spectrum(const std::vector<int>& j2s) const;

  ProjectorMatrix build_projector(int j2) const;  // |j2| <= 3

  // exact identities: weighted column identity v_j* v_j = 1, entries
  // annihilated by <| X_r, homogeneous left K-weight (certifying the
  // B^{#(m-n)} p(A) shape), hermiticity, F . (v_j* v_j) = 0.
  CheckReport check_projector(const ProjectorMatrix& P) const;

  // <Psi(y P_j), Psi(z P_j)>_h equals the weighted inner product
  // c_j q^{2|j|} sum_k q^{-2k} h(z_k* y_k) of the rows, with
  // c_j = h(v_{|j|,j} v*_{|j|,j})^{-1} computed from the state; plus the
  // twisted-cyclicity relation of Lemma-type h(v*_k x v_l) =
  // c_j q^{2|j|-2k} h(x v_l v*_k) checked exactly on samples.
  CheckReport psi_isometry_check(int j2, int nsamples) const;

  // xi(s)-factorization and commutation identities (free parameter s),
  // the proportionality v v* ~ products of (lam_+ - q^{2i}A) resp.
  // (q^{2i}A - lam_-) with computed constants, and the two-term frame
  // relations, all exact, for 2|j|, 2l <= j2max.
  CheckReport chart_identities(int j2max) const;

  // tridiagonal chart matrices m_j, m_j^dagger, n_j with numeric bracket
  // square roots; checks the commutation relations entrywise under the
  // shift representations.
  CheckReport chart_matrices(int j2) const;

  // Haar-orthogonality of v^l_{k,i} across distinct i at fixed (l, k), and
  // completeness (Gram rank 2l+1) for l2 <= l2max.
  CheckReport check_orthogonality(int l2max) const;

 private:
  ParamContext ctx_;
  Hopf hopf_;
  Rational t_balanced(int k) const;  // closed-form h((bc)^k)
};

}  // namespace qsphere
