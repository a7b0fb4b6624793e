#include <qsphere/repnum.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsphere {

namespace {

// q^{t2/2}: powers on the half-integer lattice, exponents doubled
double qp(const ParamContext& c, int t2) { return std::pow(c.sd(), t2); }
double br(const ParamContext& c, int n) { return c.bracket_d(n); }

std::string half_str(int t2) {
  if (t2 % 2 == 0) return std::to_string(t2 / 2);
  return std::to_string(t2) + "/2";
}

// product of square roots of brackets with the vanishing convention:
// a zero factor kills the whole coefficient before any division
double sqrt_br_prod(const ParamContext& c, std::initializer_list<int> args) {
  double p = 1.0;
  for (int n : args) {
    double b = br(c, n);
    if (b == 0.0) return 0.0;
    p *= b;
  }
  return std::sqrt(p);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double lam_sector(const ParamContext& ctx, int sign) {
  return sign > 0 ? ctx.lambda_plus_d() : ctx.lambda_minus_d();
}

// sphere shift weight c_s(n) = (r + lam_s q^{2n} - (lam_s q^{2n})^2)^{1/2}
double c_weight_d(const ParamContext& ctx, int sign, int n) {
  double q2n = std::pow(ctx.qd(), 2 * n);
  if (ctx.r_infinite()) return ctx.lambda_n_d(2 * n);  // (1 - q^{4n})^{1/2}
  double ls = lam_sector(ctx, sign);
  double arg = ctx.rd() + ls * q2n - ls * ls * q2n * q2n;
  return std::sqrt(std::max(arg, 0.0));
}

}  // namespace

const Eigen::MatrixXd& TruncatedRep::matrix(const std::string& g) const {
  auto it = mats.find(g);
  if (it == mats.end())
    throw std::runtime_error("TruncatedRep: no matrix for generator " + g);
  return it->second;
}

double CoeffTable::beta0(int l2) const {
  auto it = beta0_ll.find(l2);
  if (it == beta0_ll.end()) throw std::runtime_error("CoeffTable::beta0: level out of range");
  return it->second;
}

double CoeffTable::alphap(int l2) const {
  if (l2 < j2) return 0.0;
  auto it = alphap_ll.find(l2);
  if (it == alphap_ll.end())
    throw std::runtime_error("CoeffTable::alphap: level out of range");
  return it->second;
}

TruncatedRep build_Tl(int l2, const ParamContext& ctx) {
  if (l2 < 0) throw std::runtime_error("build_Tl: need l >= 0");
  TruncatedRep rep;
  rep.presentation_id = "Uq_su2";
  rep.ctx = ctx;
  int n = l2 + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), Kinv = K, E = K;
  for (int i = 0; i < n; ++i) {
    int j2 = -l2 + 2 * i;
    rep.labels.push_back("v[" + half_str(l2) + "," + half_str(j2) + "]");
    rep.interior.push_back(1);
    rep.weight2.push_back(j2);
    K(i, i) = qp(ctx, j2);
    Kinv(i, i) = qp(ctx, -j2);
    if (i + 1 < n)
      E(i + 1, i) = sqrt_br_prod(ctx, {(l2 - j2) / 2, (l2 + j2) / 2 + 1});
  }
  rep.mats["K"] = K;
  rep.mats["Kinv"] = Kinv;
  rep.mats["E"] = E;
  rep.mats["F"] = E.transpose();
  rep.max_resolved_spin2 = l2;
  return rep;
}

CoeffTable build_coeffs(int j2, int branch, int L2, const ParamContext& ctx) {
  if (j2 < 0) throw std::runtime_error("build_coeffs: need |j| label >= 0");
  if (branch != 1 && branch != -1) throw std::runtime_error("build_coeffs: branch is +-1");
  if (L2 < j2 || (L2 - j2) % 2 != 0)
    throw std::runtime_error("build_coeffs: top level must be j + integer");
  CoeffTable t;
  t.j2 = j2;
  t.branch = branch;
  t.L2 = L2;
  t.ctx = ctx;

  double q = ctx.qd();
  double qm2 = 1.0 / (q * q);
  double rho = ctx.rho_abbrev_d();
  bool inf = ctx.r_infinite();
  double lamb = lam_sector(ctx, branch);
  double lamo = lam_sector(ctx, -branch);

  for (int l2 = j2; l2 <= L2; l2 += 2) {
    double beta;
    if (inf) {
      beta = branch * (1.0 / q) * br(ctx, 2) * br(ctx, j2) / br(ctx, l2 + 2);
    } else {
      beta = (br(ctx, j2) * (qm2 * lamb - lamo) -
              (1.0 - qm2) * br(ctx, (l2 - j2) / 2) * br(ctx, (l2 + j2) / 2 + 1)) /
             br(ctx, l2 + 2);
    }
    // designated numeric-layer contamination point for negative-control runs
    if (ctx.perturb != 0.0) beta *= 1.0 + ctx.perturb;
    t.beta0_ll[l2] = beta;

    double quad = inf ? rho - q * q * beta * beta
                      : rho - (1.0 - q * q) * beta - q * q * beta * beta;
    double a2 = br(ctx, l2 + 2) / br(ctx, l2 + 3) * quad / br(ctx, 2);
    if (a2 < -1e-12)
      throw std::runtime_error("build_coeffs: negative squared raising coefficient");
    double alpha = std::sqrt(std::max(a2, 0.0));
    t.alphap_ll[l2] = alpha;

    // independent closed form for the raising coefficient
    double direct;
    if (inf) {
      direct = sqrt_br_prod(ctx, {2, l2 + j2 + 2, l2 - j2 + 2}) /
               sqrt_br_prod(ctx, {l2 + 2, l2 + 3});
    } else {
      double c = ctx.rd();
      double inner = (1.0 / q - q) * br(ctx, (l2 - j2) / 2 + 1) *
                         br(ctx, (l2 + j2) / 2 + 1) / 2.0 +
                     branch * br(ctx, j2) * std::sqrt(c + 0.25);
      double b2 = br(ctx, l2 + 2);
      double arg = b2 * b2 * (c + 0.25) - inner * inner;
      direct = std::sqrt(br(ctx, 2) / (b2 * br(ctx, l2 + 3))) *
               std::sqrt(std::max(arg, 0.0));
    }
    t.alphap_direct[l2] = direct;
    double resid = std::abs(direct - alpha);
    t.report.check_num(resid, 1e-10,
                       "raising coefficient closed form, level " + half_str(l2));
    if (resid > 1e-10) t.crosscheck_flagged = true;
  }

  // eliminated-variable identity relating consecutive levels
  for (int l2 = j2; l2 <= L2; l2 += 2) {
    if (l2 == 0) continue;  // the 1/[2l] factor degenerates at the bottom spin
    double beta = t.beta0_ll.at(l2);
    double ap = t.alphap(l2 - 2);
    double lhs = br(ctx, 2) * br(ctx, l2 + 1) * ap * ap;
    double t1 = br(ctx, l2) * rho;
    double t2 = br(ctx, l2 + 2) * br(ctx, l2 + 2) * q * q * beta * beta / br(ctx, l2);
    double t3 = inf ? 0.0 : (1.0 - q * q) * br(ctx, l2 + 2) * beta;
    double rhs = t1 - t2 + t3;
    // normalize by the term magnitudes: the identity cancels several orders
    // of magnitude at high levels, which is conditioning, not error
    double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
    t.report.check_num(std::abs(lhs - rhs) / scale, 1e-12,
                       "level-elimination identity, level " + half_str(l2));
  }

  // induction chain for the diagonal eigenvalue
  for (int l2 = j2; l2 + 2 <= L2; l2 += 2) {
    double ratio = br(ctx, l2 + 2) / br(ctx, l2 + 4);
    double pred = inf ? ratio * t.beta0_ll.at(l2)
                      : ratio * (t.beta0_ll.at(l2) + qm2 - 1.0);
    t.report.check_num(std::abs(pred - t.beta0_ll.at(l2 + 2)), 1e-13,
                       "diagonal chain recursion, level " + half_str(l2 + 2));
  }
  return t;
}

TruncatedRep build_pi_j(int j2_signed, int L2, const ParamContext& ctx) {
  int j2 = std::abs(j2_signed);
  int branch = j2_signed < 0 ? -1 : 1;
  if (L2 < j2 || (L2 - j2) % 2 != 0)
    throw std::runtime_error("build_pi_j: truncation spin must be |j| + integer");
  CoeffTable cf = build_coeffs(j2, branch, L2, ctx);

  TruncatedRep rep;
  rep.presentation_id = "cross_EFK";
  rep.ctx = ctx;
  std::map<std::pair<int, int>, int> idx;
  for (int l2 = j2; l2 <= L2; l2 += 2)
    for (int k2 = -l2; k2 <= l2; k2 += 2) {
      idx[{l2, k2}] = rep.dim();
      rep.labels.push_back("v[" + half_str(l2) + "," + half_str(k2) + "]");
      rep.interior.push_back(l2 <= L2 - 4 ? 1 : 0);
      rep.weight2.push_back(k2);
    }
  int n = rep.dim();
  double q = ctx.qd();
  double b2 = br(ctx, 2);

  Eigen::MatrixXd x1 = Eigen::MatrixXd::Zero(n, n), x0 = x1;
  Eigen::MatrixXd K = x1, Kinv = x1, E = x1;
  for (int l2 = j2; l2 <= L2; l2 += 2) {
    double beta = cf.beta0(l2), ap = cf.alphap(l2);
    for (int k2 = -l2; k2 <= l2; k2 += 2) {
      int col = idx.at({l2, k2});
      K(col, col) = qp(ctx, k2);
      Kinv(col, col) = qp(ctx, -k2);
      if (k2 + 2 <= l2)
        E(idx.at({l2, k2 + 2}), col) =
            sqrt_br_prod(ctx, {(l2 - k2) / 2, (l2 + k2) / 2 + 1});

      // x1: raising, diagonal-spin and (implicitly, via transpose) lowering
      if (l2 + 2 <= L2)
        x1(idx.at({l2 + 2, k2 + 2}), col) =
            qp(ctx, -l2 + k2) *
            sqrt_br_prod(ctx, {(l2 + k2) / 2 + 1, (l2 + k2) / 2 + 2}) /
            sqrt_br_prod(ctx, {l2 + 1, l2 + 2}) * ap;
      if (k2 + 2 <= l2) {
        double num = sqrt_br_prod(ctx, {(l2 - k2) / 2, (l2 + k2) / 2 + 1, 2});
        if (num != 0.0)
          x1(idx.at({l2, k2 + 2}), col) = -qp(ctx, k2 + 4) * num / br(ctx, l2) * beta;
      }
      if (l2 - 2 >= j2 && k2 + 2 <= l2 - 2)
        x1(idx.at({l2 - 2, k2 + 2}), col) =
            -qp(ctx, l2 + k2 + 2) *
            sqrt_br_prod(ctx, {(l2 - k2) / 2 - 1, (l2 - k2) / 2}) /
            sqrt_br_prod(ctx, {l2 - 1, l2}) * cf.alphap(l2 - 2);

      // x0: fill the raising entry and its mirror from the same value,
      // so the matrix is symmetric in exact floating point
      if (l2 + 2 <= L2) {
        double c0p = qp(ctx, k2) *
                     sqrt_br_prod(ctx, {(l2 - k2) / 2 + 1, (l2 + k2) / 2 + 1, 2}) /
                     sqrt_br_prod(ctx, {l2 + 1, l2 + 2}) * ap;
        x0(idx.at({l2 + 2, k2}), col) = c0p;
        x0(col, idx.at({l2 + 2, k2})) = c0p;
      }
      double frac = br(ctx, (l2 - k2) / 2);
      double diag = frac == 0.0
                        ? beta
                        : (1.0 - qp(ctx, l2 + k2 + 2) * frac * b2 / br(ctx, l2)) * beta;
      x0(col, col) = diag;
    }
  }

  // the generators: B* is a rescaled x1, B its transpose, and the remaining
  // sphere elements are exact rational combinations of these
  double rad = std::sqrt(1.0 + q * q);
  Eigen::MatrixXd Bst = -(1.0 / rad) * x1;
  Eigen::MatrixXd B = Bst.transpose();
  Eigen::MatrixXd xm1 = (rad / q) * B;
  Eigen::MatrixXd A =
      ctx.r_infinite()
          ? Eigen::MatrixXd((-1.0 / (1.0 + q * q)) * x0)
          : Eigen::MatrixXd((Eigen::MatrixXd::Identity(n, n) - x0) / (1.0 + q * q));

  rep.mats["A"] = A;
  rep.mats["B"] = B;
  rep.mats["Bst"] = Bst;
  rep.mats["E"] = E;
  rep.mats["F"] = E.transpose();
  rep.mats["K"] = K;
  rep.mats["Kinv"] = Kinv;
  rep.mats["x1"] = x1;
  rep.mats["x0"] = x0;
  rep.mats["xm1"] = xm1;
  rep.max_resolved_spin2 = L2;
  return rep;
}

TruncatedRep build_sigma_pm(int sign, int N, const ParamContext& ctx) {
  if (sign != 1 && sign != -1) throw std::runtime_error("build_sigma_pm: sign is +-1");
  if (!ctx.r_infinite() && ctx.rd() == 0.0 && sign < 0)
    throw std::runtime_error("build_sigma_pm: no minus sector at r = 0");
  TruncatedRep rep;
  rep.presentation_id = "O_S2qr";
  rep.ctx = ctx;
  int n = N + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = A;
  for (int k = 0; k < n; ++k) {
    rep.labels.push_back("eta[" + std::to_string(k) + "]");
    rep.interior.push_back(k <= N - 2 ? 1 : 0);
    double q2k = std::pow(ctx.qd(), 2 * k);
    A(k, k) = ctx.r_infinite() ? sign * q2k : lam_sector(ctx, sign) * q2k;
    if (k > 0) B(k - 1, k) = c_weight_d(ctx, sign, k);
  }
  rep.mats["A"] = A;
  rep.mats["B"] = B;
  rep.mats["Bst"] = B.transpose();
  return rep;
}

TruncatedRep build_Yr_rep(double Y0, int N, const ParamContext& ctx) {
  if (Y0 == 0.0)
    throw std::runtime_error("build_Yr_rep: the diagonal seed must be nonzero");
  TruncatedRep rep;
  rep.presentation_id = "Yr";
  rep.ctx = ctx;
  double rr = ctx.r_infinite() ? 1.0 : ctx.rd();
  int n = N + 1;
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n), Yinv = Y, X = Y;
  for (int k = 0; k < n; ++k) {
    rep.labels.push_back("zeta[" + std::to_string(k) + "]");
    rep.interior.push_back(k <= N - 2 ? 1 : 0);
    double q2k = std::pow(ctx.qd(), 2 * k);
    Y(k, k) = q2k * Y0;
    Yinv(k, k) = 1.0 / Y(k, k);
    if (k + 1 < n)
      X(k + 1, k) = ctx.lambda_n_d(k + 1) * std::sqrt(q2k * Y0 * Y0 + rr);
  }
  rep.mats["X"] = X;
  rep.mats["Xst"] = X.transpose();
  rep.mats["Y"] = Y;
  rep.mats["Yinv"] = Yinv;
  return rep;
}

TruncatedRep build_I_pm(int sign, double H, int N, int M, const ParamContext& ctx) {
  if (sign != 1 && sign != -1) throw std::runtime_error("build_I_pm: sign is +-1");
  if (ctx.r_infinite())
    throw std::runtime_error("build_I_pm: finite r required");
  if (ctx.rd() == 0.0 && sign < 0)
    throw std::runtime_error("build_I_pm: no minus sector at r = 0");
  if (!(H > 0.0)) throw std::runtime_error("build_I_pm: need H > 0");

  TruncatedRep rep;
  rep.presentation_id = "cross_EFK";
  rep.ctx = ctx;
  double q = ctx.qd();
  double r = ctx.rd();
  double ls = lam_sector(ctx, sign);
  double lam = q - 1.0 / q;
  double pref = std::pow(q, -0.5) / lam;
  int nn = N + 1, mm = M + 1, dim = nn * mm;
  auto id = [&](int nI, int mI) { return nI * mm + mI; };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim), B = A, K = A, Kinv = A, E = A;
  for (int nI = 0; nI <= N; ++nI)
    for (int mI = 0; mI <= M; ++mI) {
      int col = id(nI, mI);
      rep.labels.push_back("eta[" + std::to_string(nI) + "," + std::to_string(mI) + "]");
      rep.interior.push_back((nI <= N - 2 && mI <= M - 2) ? 1 : 0);
      double q2n = std::pow(q, 2 * nI);
      A(col, col) = ls * q2n;
      if (nI > 0) B(id(nI - 1, mI), col) = c_weight_d(ctx, sign, nI);
      K(col, col) = std::pow(q, nI - mI) * H;
      Kinv(col, col) = 1.0 / K(col, col);
      if (mI > 0)
        E(id(nI, mI - 1), col) =
            pref * std::pow(q, -nI) * ctx.lambda_n_d(mI) *
            std::sqrt(std::pow(q, -2 * mI) * r / (ls * ls) + std::pow(H, -4)) * H;
      if (nI + 1 <= N)
        E(id(nI + 1, mI), col) =
            -pref * std::pow(q, -mI) *
            (c_weight_d(ctx, sign, nI + 1) / (ls * std::pow(q, nI + 1))) * H;
    }
  rep.mats["A"] = A;
  rep.mats["B"] = B;
  rep.mats["Bst"] = B.transpose();
  rep.mats["K"] = K;
  rep.mats["Kinv"] = Kinv;
  rep.mats["E"] = E;
  rep.mats["F"] = E.transpose();
  return rep;
}

TruncatedRep build_rho_chart(int j2_signed, int sign, int N, int M,
                             const ParamContext& ctx) {
  if (sign != 1 && sign != -1) throw std::runtime_error("build_rho_chart: sign is +-1");
  if (!ctx.r_infinite() && ctx.rd() == 0.0 && sign < 0)
    throw std::runtime_error("build_rho_chart: no minus sector at r = 0");

  TruncatedRep rep;
  rep.presentation_id = "cross_decoupled_XY";
  rep.ctx = ctx;
  double q = ctx.qd();
  double rr = ctx.r_infinite() ? 1.0 : ctx.rd();
  double ls = ctx.r_infinite() ? double(sign) : lam_sector(ctx, sign);
  double Y0 = qp(ctx, 2 * sign * j2_signed + 2) * ls;

  int nn = N + 1, mm = M + 1, dim = nn * mm;
  auto id = [&](int nI, int kI) { return nI * mm + kI; };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim), Ainv = A, B = A;
  Eigen::MatrixXd Y = A, Yinv = A, X = A;
  for (int nI = 0; nI <= N; ++nI)
    for (int kI = 0; kI <= M; ++kI) {
      int col = id(nI, kI);
      rep.labels.push_back("zeta[" + std::to_string(nI) + "," + std::to_string(kI) + "]");
      rep.interior.push_back((nI <= N - 2 && kI <= M - 2) ? 1 : 0);
      double q2n = std::pow(q, 2 * nI);
      A(col, col) = ls * q2n;
      Ainv(col, col) = 1.0 / A(col, col);
      if (nI > 0) B(id(nI - 1, kI), col) = c_weight_d(ctx, sign, nI);
      double q2k = std::pow(q, 2 * kI);
      Y(col, col) = q2k * Y0;
      Yinv(col, col) = 1.0 / Y(col, col);
      if (kI + 1 <= M)
        X(id(nI, kI + 1), col) =
            ctx.lambda_n_d(kI + 1) * std::sqrt(q2k * Y0 * Y0 + rr);
    }
  rep.mats["A"] = A;
  rep.mats["Ainv"] = Ainv;
  rep.mats["B"] = B;
  rep.mats["Bst"] = B.transpose();
  rep.mats["X"] = X;
  rep.mats["Xst"] = X.transpose();
  rep.mats["Y"] = Y;
  rep.mats["Yinv"] = Yinv;
  return rep;
}

CheckReport verify_relations(const TruncatedRep& rep, double tol) {
  CheckReport out;
  Presentation p = make_presentation(rep.presentation_id, rep.ctx);
  int n = rep.dim();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  auto word_matrix = [&](const Word& w) {
    Eigen::MatrixXd m = I;
    for (const Sym& s : w) m = m * rep.matrix(s);
    return m;
  };
  auto covered = [&](const Word& w) {
    for (const Sym& s : w)
      if (!rep.has(s)) return false;
    return true;
  };

  for (const auto& [lhs, rhs] : p.rules) {
    bool ok = rep.has(lhs.first) && rep.has(lhs.second);
    for (const auto& [w, c] : rhs.terms) ok = ok && covered(w);
    std::string what = "rule " + lhs.first + " " + lhs.second;
    if (!ok) {
      out.note("skipped (generator without matrix): " + what);
      continue;
    }
    Eigen::MatrixXd L = rep.matrix(lhs.first) * rep.matrix(lhs.second);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [w, c] : rhs.terms) R += c.eval(rep.ctx) * word_matrix(w);
    double worst = 0.0;
    for (int col = 0; col < n; ++col) {
      if (!rep.interior[col]) continue;
      double scale = std::max({1.0, L.col(col).norm(), R.col(col).norm()});
      worst = std::max(worst, (L - R).col(col).norm() / scale);
    }
    out.check_num(worst, tol, what);
  }

  // involution: g^T must equal the matrix of g*
  for (const auto& [g, st] : p.star_table) {
    if (!rep.has(g) || !covered(st.second)) continue;
    Eigen::MatrixXd lhs = rep.matrix(g).transpose();
    Eigen::MatrixXd rhs = st.first.eval(rep.ctx) * word_matrix(st.second);
    double scale = std::max(1.0, rhs.norm());
    out.check_num((lhs - rhs).norm() / scale, tol, "involution of " + g);
  }

  if (rep.has("K")) {
    const Eigen::MatrixXd& K = rep.matrix("K");
    out.check(K.diagonal().minCoeff() > 0.0 &&
                  (K - Eigen::MatrixXd(K.diagonal().asDiagonal())).norm() == 0.0,
              "K positive diagonal");
  }
  return out;
}

TruncatedRep tensor_rep(const TruncatedRep& pi, int l2) {
  for (const char* g : {"E", "F", "K", "Kinv"})
    if (!pi.has(g))
      throw std::runtime_error("tensor_rep: factor lacks the enveloping action");
  TruncatedRep T = build_Tl(l2, pi.ctx);
  int nt = T.dim();
  Eigen::MatrixXd It = Eigen::MatrixXd::Identity(nt, nt);

  TruncatedRep rep;
  rep.presentation_id = pi.presentation_id;
  rep.ctx = pi.ctx;
  for (int i = 0; i < pi.dim(); ++i)
    for (int j = 0; j < nt; ++j) {
      rep.labels.push_back(pi.labels[i] + " (x) " + T.labels[j]);
      rep.interior.push_back(pi.interior[i]);
      if (!pi.weight2.empty()) rep.weight2.push_back(pi.weight2[i] + T.weight2[j]);
    }
  for (const auto& [g, m] : pi.mats) {
    if (g == "E" || g == "F" || g == "K" || g == "Kinv") continue;
    rep.mats[g] = kron(m, It);
  }
  rep.mats["K"] = kron(pi.matrix("K"), T.matrix("K"));
  rep.mats["Kinv"] = kron(pi.matrix("Kinv"), T.matrix("Kinv"));
  rep.mats["E"] =
      kron(pi.matrix("E"), T.matrix("K")) + kron(pi.matrix("Kinv"), T.matrix("E"));
  rep.mats["F"] =
      kron(pi.matrix("F"), T.matrix("K")) + kron(pi.matrix("Kinv"), T.matrix("F"));
  rep.max_resolved_spin2 = pi.max_resolved_spin2 - l2 - 2;
  return rep;
}

namespace {

// columns of the numeric kernel of E restricted to a weight subspace,
// embedded back into the full space
Eigen::MatrixXd weight_kernel(const TruncatedRep& rep, int w2) {
  std::vector<int> cols;
  for (int i = 0; i < rep.dim(); ++i)
    if (rep.weight2[i] == w2) cols.push_back(i);
  if (cols.empty()) return Eigen::MatrixXd::Zero(rep.dim(), 0);
  const Eigen::MatrixXd& E = rep.matrix("E");
  Eigen::MatrixXd Ew(rep.dim(), static_cast<int>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) Ew.col(c) = E.col(cols[c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ew, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  double thresh = 1e-8 * std::max(1.0, smax);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++rank;
  int kdim = static_cast<int>(cols.size()) - rank;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rep.dim(), kdim);
  for (int k = 0; k < kdim; ++k)
    for (size_t c = 0; c < cols.size(); ++c)
      out(cols[c], k) = svd.matrixV()(c, rank + k);
  return out;
}

double candidate_beta(int j2c, int branch, int w2, const ParamContext& clean) {
  return build_coeffs(j2c, branch, w2, clean).beta0(w2);
}

}  // namespace

std::vector<Component> decompose(const TruncatedRep& rep) {
  if (rep.weight2.empty() || !rep.has("E") || !rep.has("x0"))
    throw std::runtime_error("decompose: need weights, E, and x0");
  ParamContext clean = rep.ctx;
  clean.perturb = 0.0;  // candidates are the unperturbed theory values

  std::vector<int> weights;
  for (int w : rep.weight2)
    if (w >= 0 && std::find(weights.begin(), weights.end(), w) == weights.end())
      weights.push_back(w);
  std::sort(weights.begin(), weights.end());

  const Eigen::MatrixXd& x0 = rep.matrix("x0");
  std::vector<Component> found;
  for (int w2 : weights) {
    if (w2 > rep.max_resolved_spin2) {
      Component c;
      c.j2 = w2;
      c.resolved = false;
      found.push_back(c);
      break;
    }
    Eigen::MatrixXd V = weight_kernel(rep, w2);
    if (V.cols() == 0) continue;
    Eigen::MatrixXd C = V.transpose() * x0 * V;
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    std::vector<double> eigs(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());

    // peel off the eigenvalues owed to components found at lower weights
    for (const Component& c : found) {
      if (!c.resolved) continue;
      for (int m = 0; m < c.mult; ++m) {
        if (std::abs(c.j2) > w2 || (w2 - std::abs(c.j2)) % 2 != 0) break;
        double pred =
            candidate_beta(std::abs(c.j2), c.j2 < 0 ? -1 : 1, w2, clean);
        auto it = std::min_element(eigs.begin(), eigs.end(), [&](double a, double b) {
          return std::abs(a - pred) < std::abs(b - pred);
        });
        if (it == eigs.end() ||
            std::abs(*it - pred) > 1e-6 * std::max(1.0, std::abs(pred)))
          throw std::runtime_error("decompose: missing eigenvalue of known component");
        eigs.erase(it);
      }
    }

    // what survives belongs to components whose bottom level is this weight
    double cp = candidate_beta(w2, 1, w2, clean);
    double cm = candidate_beta(w2, -1, w2, clean);
    for (double v : eigs) {
      double dp = std::abs(v - cp), dm = std::abs(v - cm);
      int branch = (w2 == 0 || dp <= dm) ? 1 : -1;
      double cand = branch > 0 ? cp : cm, other = branch > 0 ? cm : cp;
      if (std::abs(v - cand) > 1e-6 * std::max(1.0, std::abs(cand)))
        throw std::runtime_error("decompose: eigenvalue matches no candidate");
      int j2s = branch > 0 ? w2 : -w2;
      auto it = std::find_if(found.begin(), found.end(),
                             [&](const Component& c) { return c.j2 == j2s && c.resolved; });
      if (it != found.end()) {
        ++it->mult;
      } else {
        Component c;
        c.j2 = j2s;
        c.mult = 1;
        c.value = v;
        c.margin = w2 == 0 ? std::abs(v - cand) : std::abs(v - other);
        found.push_back(c);
      }
    }
  }
  return found;
}

std::vector<std::pair<int, int>> decompose_su2(const TruncatedRep& rep) {
  if (rep.weight2.empty() || !rep.has("E"))
    throw std::runtime_error("decompose_su2: need weights and E");
  std::vector<int> weights;
  for (int w : rep.weight2)
    if (w >= 0 && std::find(weights.begin(), weights.end(), w) == weights.end())
      weights.push_back(w);
  std::sort(weights.begin(), weights.end());
  std::vector<std::pair<int, int>> out;
  for (int w2 : weights) {
    if (w2 > rep.max_resolved_spin2) break;
    int k = static_cast<int>(weight_kernel(rep, w2).cols());
    if (k > 0) out.push_back({w2, k});
  }
  return out;
}

CheckReport equivalence_pi_vs_bundle(int j2_signed, int L2, const ParamContext& ctx) {
  CheckReport out;
  int j2 = std::abs(j2_signed);
  if (L2 < j2 || (L2 - j2) % 2 != 0)
    throw std::runtime_error("equivalence_pi_vs_bundle: bad truncation spin");

  Bundle b(ctx);
  HopfModuleBasis basis = b.build_basis(j2_signed, L2);
  Hopf::SphereGens gens = b.hopf().embed_sphere_generators();
  TruncatedRep pi = build_pi_j(j2_signed, L2 + 4, ctx);
  std::map<std::pair<int, int>, int> idx;
  {
    int i = 0;
    for (int l2 = j2; l2 <= L2 + 4; l2 += 2)
      for (int k2 = -l2; k2 <= l2; k2 += 2) idx[{l2, k2}] = i++;
  }
  const Presentation& A = b.A();

  // matrix elements <x . v, v'> / (|v||v'|) of x0 and x1 against the closed
  // formulas; rows with spin beyond the basis are dropped on both sides
  for (const char* which : {"x0", "x1"}) {
    const Eigen::MatrixXd& m = pi.matrix(which);
    double worst = 0.0;
    for (const BasisVector& v : basis.vectors) {
      NCPoly moved = A.mul(std::string(which) == "x0" ? gens.x0 : gens.x1, v.vec);
      for (const BasisVector& w : basis.vectors) {
        double elem = b.inner(moved, w.vec).eval(ctx) /
                      std::sqrt(v.norm2_d * w.norm2_d);
        if (std::string(which) == "x1") elem *= gens.radical_factor;
        double target = m(idx.at({w.l2, w.k2}), idx.at({v.l2, v.k2}));
        worst = std::max(worst, std::abs(elem - target));
      }
    }
    out.check_num(worst, 1e-8, std::string("matrix elements of ") + which +
                                   ", label " + half_str(j2_signed));
  }

  // the lowered top vector of the product with the spin-1/2 module is a
  // highest-weight vector, and its diagonal expectation takes the predicted
  // bottom value of the neighbouring label
  if (j2 > 0) {
    TruncatedRep tp = tensor_rep(pi, 1);
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(tp.dim());
    int top = idx.at({j2, j2}), sub = idx.at({j2, j2 - 2});
    vec(top * 2 + 0) = qp(tp.ctx, 1) * std::sqrt(br(ctx, j2));  // (x) v^{1/2}_{-1/2}
    vec(sub * 2 + 1) = -qp(tp.ctx, -j2);                        // (x) v^{1/2}_{+1/2}
    double nrm = vec.norm();
    out.check_num((tp.matrix("E") * vec).norm() / nrm, 1e-12,
                  "lowered top vector is highest-weight");
    double expect = vec.dot(tp.matrix("x0") * vec) / (nrm * nrm);
    ParamContext clean = ctx;
    clean.perturb = 0.0;
    double pred = br(ctx, j2 + 2) * br(ctx, j2 - 1) /
                  (br(ctx, j2 + 1) * br(ctx, j2)) *
                  candidate_beta(j2, j2_signed < 0 ? -1 : 1, j2, clean);
    out.check_num(std::abs(expect - pred), 1e-8,
                  "diagonal expectation on the lowered top vector");
  }
  return out;
}

CheckReport adjoint_reconstruction_check(int j2_signed, int L2, const ParamContext& ctx) {
  CheckReport out;
  TruncatedRep pi = build_pi_j(j2_signed, L2, ctx);
  int n = pi.dim();
  double q = ctx.qd();
  double lam = q - 1.0 / q;
  double q32 = qp(ctx, 3);
  const Eigen::MatrixXd &A = pi.matrix("A"), &B = pi.matrix("B"),
                        &Bst = pi.matrix("Bst"), &E = pi.matrix("E"),
                        &F = pi.matrix("F"), &Kinv = pi.matrix("Kinv");

  Eigen::MatrixXd X = q32 * lam * F * Kinv * A + q * B;
  Eigen::MatrixXd X2 = q32 * lam * A * F * Kinv + (1.0 / q) * B;
  Eigen::MatrixXd Xst = q32 * lam * A * Kinv * E + q * Bst;
  Eigen::MatrixXd Xst2 = q32 * lam * Kinv * E * A + (1.0 / q) * Bst;
  Eigen::MatrixXd Y = q * Kinv * Kinv * A;

  auto interior_diff = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (int c = 0; c < n; ++c) {
      if (!pi.interior[c]) continue;
      double scale = std::max({1.0, a.col(c).norm(), b.col(c).norm()});
      worst = std::max(worst, (a - b).col(c).norm() / scale);
    }
    return worst;
  };
  out.check_num(interior_diff(X, X2), 1e-9, "two orderings of the X combination");
  out.check_num(interior_diff(Xst, Xst2), 1e-9, "two orderings of the X* combination");
  out.check_num(interior_diff(Xst, X.transpose()), 1e-9, "X* is the transpose of X");

  TruncatedRep dec;
  dec.presentation_id = "cross_decoupled_XY";
  dec.ctx = ctx;
  dec.labels = pi.labels;
  dec.interior = pi.interior;
  dec.weight2 = pi.weight2;
  dec.mats["A"] = A;
  dec.mats["B"] = B;
  dec.mats["Bst"] = Bst;
  dec.mats["X"] = X;
  dec.mats["Xst"] = Xst;
  dec.mats["Y"] = Y;
  out.merge(verify_relations(dec, 1e-9));

  // blockwise spectral reconstruction of K from |Y| and |A|
  double worst_prop = 0.0, worst_k = 0.0;
  std::vector<int> wvals;
  for (int w : pi.weight2)
    if (std::find(wvals.begin(), wvals.end(), w) == wvals.end()) wvals.push_back(w);
  for (int w2 : wvals) {
    std::vector<int> ids;
    for (int i = 0; i < n; ++i)
      if (pi.weight2[i] == w2) ids.push_back(i);
    int m = static_cast<int>(ids.size());
    Eigen::MatrixXd Ab(m, m), Yb(m, m);
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c) {
        Ab(a, c) = A(ids[a], ids[c]);
        Yb(a, c) = Y(ids[a], ids[c]);
      }
    double fac = qp(ctx, 2 - 2 * w2);  // Y = q K^{-2} A is scalar on the block
    worst_prop = std::max(worst_prop,
                          (Yb - fac * Ab).norm() / std::max(1.0, Ab.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ab + Ab.transpose()));
    Eigen::MatrixXd Vb = es.eigenvectors();
    double kval = qp(ctx, w2);
    double cutoff = 1e-8 * std::max(1.0, Ab.norm());
    for (int a = 0; a < m; ++a) {
      // the functional calculus is only sampled away from the (truncation-
      // induced) near-kernel of A
      double av = es.eigenvalues()(a);
      if (std::abs(av) < cutoff) continue;
      double yv = Vb.col(a).dot(Yb * Vb.col(a));
      double krec = std::sqrt(q) * std::sqrt(std::abs(av) / std::abs(yv));
      worst_k = std::max(worst_k, std::abs(krec - kval) / kval);
    }
  }
  out.check_num(worst_prop, 1e-13, "Y proportional to A on each weight block");
  out.check_num(worst_k, 1e-9, "K reconstructed from |Y| and |A| blockwise");

  // converged joint (A, Y) spectrum against the two chart grids
  double lp = ctx.r_infinite() ? 1.0 : ctx.lambda_plus_d();
  double lm = ctx.r_infinite() ? -1.0 : ctx.lambda_minus_d();
  bool has_minus = ctx.r_infinite() || ctx.rd() > 0.0;
  int converged = 0, matched = 0;
  for (int w2 : wvals) {
    std::vector<int> ids;
    for (int i = 0; i < n; ++i)
      if (pi.weight2[i] == w2) ids.push_back(i);
    int m = static_cast<int>(ids.size());
    Eigen::MatrixXd Ab(m, m);
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c) Ab(a, c) = A(ids[a], ids[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ab + Ab.transpose()));
    for (int a = 0; a < m; ++a) {
      double mass = 0.0;
      for (int c = 0; c < m; ++c)
        if (!pi.interior[ids[c]]) mass += es.eigenvectors()(c, a) * es.eigenvectors()(c, a);
      if (mass > 1e-10) continue;
      ++converged;
      double av = es.eigenvalues()(a);
      double yv = qp(ctx, 2 - 2 * w2) * av;
      bool ok = false;
      for (int s : {1, -1}) {
        if (s < 0 && !has_minus) continue;
        double ls = s > 0 ? lp : lm;
        double Y0 = qp(ctx, 2 * s * j2_signed + 2) * ls;
        // A on grid lam_s q^{2 nk}, Y on grid q^{2 k} Y0, same sector
        double ta = av / ls, ty = yv / Y0;
        if (ta <= 0.0 || ty <= 0.0) continue;
        int na = static_cast<int>(std::lround(std::log(ta) / std::log(q * q)));
        int ka = static_cast<int>(std::lround(std::log(ty) / std::log(q * q)));
        if (na < 0 || ka < 0) continue;
        if (std::abs(av - ls * std::pow(q, 2 * na)) <= 1e-8 &&
            std::abs(yv - Y0 * std::pow(q, 2 * ka)) <= 1e-8)
          ok = true;
      }
      if (ok) ++matched;
    }
  }
  out.check(converged > 0 && matched == converged,
            "joint (A, Y) spectrum sits on the two chart grids (" +
                std::to_string(matched) + "/" + std::to_string(converged) +
                " converged pairs), label " + half_str(j2_signed));
  return out;
}

CheckReport check_rep_invariants(const ParamContext& ctx, int nmax) {
  CheckReport out;
  double q = ctx.qd();

  // sign split of the sphere diagonal in the two shift sectors
  bool have_minus = ctx.r_infinite() || ctx.rd() > 0.0;
  {
    TruncatedRep sp = build_sigma_pm(1, 8, ctx);
    out.check(sp.matrix("A").diagonal().minCoeff() > 0.0, "plus sector: A > 0");
    if (have_minus) {
      TruncatedRep sm = build_sigma_pm(-1, 8, ctx);
      out.check(sm.matrix("A").diagonal().maxCoeff() < 0.0, "minus sector: A < 0");
    }
  }

  // weight grading of the raising sphere generator in a classified module
  {
    TruncatedRep pi = build_pi_j(1, 9, ctx);
    const Eigen::MatrixXd &K = pi.matrix("K"), &x1 = pi.matrix("x1");
    out.check_num((K * x1 - q * x1 * K).norm(), 1e-12, "K x1 = q x1 K");
  }

  // transported modulus identity on the decoupled shift model
  {
    int N = nmax + 4;
    double Y0 = ctx.r_infinite() ? 1.0 : ctx.lambda_plus_d() * q;
    TruncatedRep yr = build_Yr_rep(Y0, N, ctx);
    double rr = ctx.r_infinite() ? 1.0 : ctx.rd();
    int dim = yr.dim();
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) V(k + 1, k) = 1.0;
    Eigen::MatrixXd X2 = yr.matrix("Xst") * yr.matrix("X");
    Eigen::MatrixXd Ysq = yr.matrix("Y") * yr.matrix("Y");
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
    double worst = 0.0;
    Eigen::MatrixXd Vn = I;
    for (int nI = 1; nI <= nmax; ++nI) {
      Vn = V * Vn;
      double q2n = std::pow(q, 2 * nI);
      Eigen::MatrixXd lhs = X2 * Vn;
      Eigen::MatrixXd rhs =
          Vn * (q2n * X2 + (1.0 - q2n) * (q2n * q * q * Ysq + rr * I));
      for (int col = 0; col + nmax + 2 < dim; ++col)
        worst = std::max(worst, (lhs - rhs).col(col).norm());
    }
    out.check_num(worst, 1e-12, "shifted modulus identity on the decoupled model");
  }
  return out;
}

}  // namespace qsphere
