// Numeric construction of the representation families on truncated spaces:
// the spin-l representations, the classified irreducible series pi_j^+-,
// the shift models sigma^+-, the decoupled-generator shift model, the
// double-grid family (I)_{+-,H}, and the chart realizations rho_{j,+-};
// plus the relation-verification harness, tensor products with spin-l
// representations, numeric decomposition, and the cross checks against the
// exact Haar-state layer.
//
// Half-integer labels are carried doubled throughout (j2 = 2j, l2 = 2l, ...).
#pragma once

#include <Eigen/Dense>
#include <qsphere/bundle.hpp>
#include <qsphere/check.hpp>
#include <qsphere/ncpoly.hpp>

#include <map>
#include <string>
#include <vector>

namespace qsphere {

// A representation truncated to a finite basis.  All generator matrices are
// real; the involution is the transpose.  `interior` marks basis vectors far
// enough from the truncation boundary that degree-2 relation checks are
// exact there (edge effects are truncation artifacts, not errors).
struct TruncatedRep {
  std::string presentation_id;  // id understood by make_presentation
  ParamContext ctx;
  std::vector<std::string> labels;
  std::vector<char> interior;
  std::map<std::string, Eigen::MatrixXd> mats;
  // per-basis-vector doubled weight (K-eigenvalue exponent); used by the
  // decomposition machinery.  Empty when not weight-graded.
  std::vector<int> weight2;
  // largest doubled spin whose multiplicity data survives truncation intact
  int max_resolved_spin2 = -1;

  int dim() const { return static_cast<int>(labels.size()); }
  bool has(const std::string& g) const { return mats.count(g) != 0; }
  const Eigen::MatrixXd& matrix(const std::string& g) const;
};

// Ladder coefficients of the classified series for one (|j|, branch) pair:
// the eigenvalues beta0(l,l) and alpha+(l,l) on the branch eigenspace, for
// l = |j| .. L.  `report` records the defining-identity cross checks.
struct CoeffTable {
  int j2 = 0;      // doubled |j| >= 0
  int branch = 1;  // +1 or -1
  int L2 = 0;
  ParamContext ctx;
  std::map<int, double> beta0_ll;   // key: l2
  std::map<int, double> alphap_ll;  // key: l2
  // the independent closed form of alpha+(l,l), kept for table export
  std::map<int, double> alphap_direct;
  CheckReport report;
  bool crosscheck_flagged = false;

  double beta0(int l2) const;
  // alpha+(l,l); vanishes by convention below the bottom level
  double alphap(int l2) const;
};

// Spin-l representation of the enveloping algebra: K v_j = q^j v_j,
// E v_j = [l-j]^{1/2}[l+j+1]^{1/2} v_{j+1}, F = E^T.
TruncatedRep build_Tl(int l2, const ParamContext& ctx);

// beta0(l,l) from its closed form (infinite-r variant when applicable),
// alpha+(l,l) from the quadratic ladder identity; cross-checked against the
// independent closed form (discrepancies beyond 1e-10 are flagged) and the
// eliminated-variable identity.  Throws if |alpha+|^2 turns negative.
CoeffTable build_coeffs(int j2, int branch, int L2, const ParamContext& ctx);

// The irreducible series member labelled by the signed half-integer j
// (branch = sign, magnitude = |j|), truncated at spin L.  Generators
// A, B, Bst, E, F, K, Kinv plus the sphere vector operators x1, x0, xm1.
TruncatedRep build_pi_j(int j2_signed, int L2, const ParamContext& ctx);

// Weighted-shift model of the sphere algebra on the sign sector
// (A diag lam_s q^{2n}, B lowering with weight c_s(n)); basis n = 0..N.
TruncatedRep build_sigma_pm(int sign, int N, const ParamContext& ctx);

// Shift model of the decoupled generators: Y diag q^{2n} Y0, X raising with
// weight lam_{n+1}(q^{2n} Y0^2 + r)^{1/2}; basis n = 0..N.  Y0 must be
// nonzero (trivial kernel of Y).
TruncatedRep build_Yr_rep(double Y0, int N, const ParamContext& ctx);

// Double-grid family on (n,m), n = 0..N, m = 0..M: the sphere generators act
// on the n-leg as the sign-sector shift, K = q^{n-m} H, and E/F mix the two
// legs.  Requires finite r (sign=+ only at r=0) and H > 0.
TruncatedRep build_I_pm(int sign, double H, int N, int M, const ParamContext& ctx);

// Chart realization on the zeta^{sign}_{nk} grid (n = 0..N, k = 0..M):
// sphere generators on the n-leg, decoupled generators on the k-leg with
// Y0 = q^{sign 2j+1} lam_sign.  sign=- requires r > 0.
TruncatedRep build_rho_chart(int j2_signed, int sign, int N, int M,
                             const ParamContext& ctx);

// For every rewrite rule of the representation's presentation whose symbols
// all have matrices, reports max over interior basis vectors of the residual
// column norm of matrix(lhs) - matrix(rhs); also checks adjointness against
// the involution table and positivity of the diagonal K where present.
CheckReport verify_relations(const TruncatedRep& rep, double tol);

// (pi (x) T_l)(x) = pi(x) (x) 1 for coordinate generators; E, F, K act
// through the coproduct legs.
TruncatedRep tensor_rep(const TruncatedRep& pi, int l2);

struct Component {
  int j2 = 0;        // signed label of the matched irreducible
  int mult = 0;
  double value = 0;  // measured lowest-level x0 expectation
  double margin = 0; // gap to the nearest competing candidate value
  bool resolved = true;
};

// Highest-weight vectors per weight space (numeric kernel of E), then the
// compression of x0 on each highest-weight eigenspace matched against the
// candidate bottom-level eigenvalues to identify components.  Components
// above the truncation margin are marked unresolved.  Throws when an
// eigenvalue matches no candidate within tolerance.
std::vector<Component> decompose(const TruncatedRep& rep);

// Multiplicities of the spin-l summands of the restriction to the
// enveloping algebra (kernel-of-E dimension per weight), resolved part only.
std::vector<std::pair<int, int>> decompose_su2(const TruncatedRep& rep);

// Matrix elements of x0 and x1 in the orthonormalized Haar-side basis
// (exact-state inner products of normal forms) against the closed-formula
// matrices of build_pi_j; includes the sign-branch identification and the
// E-annihilation of the lowered highest-weight vector in pi_j (x) T_{1/2}.
CheckReport equivalence_pi_vs_bundle(int j2_signed, int L2, const ParamContext& ctx);

// Inside a built pi_j: the decoupled generators formed from the matrices
// satisfy their commutation relations and commute with the sphere part; the
// two orderings of the defining combinations agree; K is reconstructed from
// |Y|, |A| blockwise; the Y-spectrum (truncation-converged eigenvalues) and
// the joint (A, Y) spectrum match the two-chart grids.
CheckReport adjoint_reconstruction_check(int j2_signed, int L2, const ParamContext& ctx);

// sigma^+- positivity split, weight grading of x1, and the transported
// shift-model identity |X|^2 v^n = v^n (q^{2n}|X|^2 + (1-q^{2n})(q^{2n+2}Y^2 + r)).
CheckReport check_rep_invariants(const ParamContext& ctx, int nmax = 8);

}  // namespace qsphere
