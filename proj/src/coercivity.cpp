#include "nlsmode/coercivity.hpp"

#include <lapacke.h>

#include <cblas.h>

#include <cmath>
#include <cstring>

namespace nlsmode {

double mu_d(int d, Sector sector) {
  if (d == 2) {
    const bool radial = sector.index == 0;
    return radial ? 1.1 : 1.0;  // vanishing-average override on l >= 1
  }
  return 1.0;
}

namespace {

// constraint profiles for the sector, in node values (active part)
std::vector<std::vector<double>> constraints_for(const GroundStatePack& gs, CoercOp op,
                                                 Sector sector) {
  std::vector<std::vector<double>> cs;
  const bool acts_on_u = (op == CoercOp::Lplus || op == CoercOp::L1);
  if (sector.index == 0) {
    if (acts_on_u) {
      cs.push_back(gs.q);
      cs.push_back(gs.q1);
    } else {
      cs.push_back(gs.q1);
      cs.push_back(gs.q2);
    }
  } else if (sector.index == 1 || (gs.d == 1 && sector.index % 2 == 1)) {
    if (acts_on_u)
      cs.push_back(gs.xq);
    else
      cs.push_back(gs.dq);
  }
  return cs;
}

ScalarOp operator_for(const OperatorSet0& set, CoercOp op) {
  switch (op) {
    case CoercOp::Lplus: return set.Lp;
    case CoercOp::Lminus: return set.Lm;
    case CoercOp::L1: return set.L1;
    case CoercOp::L2: return set.L2;
  }
  throw std::logic_error("operator_for");
}

struct Pencil {
  int n = 0;
  std::vector<double> A, B;   // column-major dense, y-coordinates
  std::vector<double> Wdiag;  // weight <r>^{-mu} (y-coordinates are plain)
  std::vector<double> Chat;   // raw constraints, y-coordinates (k columns)
  int k = 0;
};

Pencil build_pencil(const GroundStatePack& gs, const CoercivitySpec& spec,
                    const RadialGrid& grid) {
  Pencil P;
  OperatorSet0 set = assemble_H0(gs, spec.sector);
  ScalarOp op = operator_for(set, spec.op);
  P.n = op.A.n;
  P.A = sym_dense(op);

  ScalarOp lap = laplacian(set.grid());
  ScalarOp neg(lap);
  neg.A = lap.A;
  for (auto& v : neg.A.data) v = -v;
  P.B = sym_dense(neg);
  P.Wdiag.assign(P.n, 0.0);
  for (int i = 0; i < P.n; ++i) {
    const double r = set.grid().nodes[i];
    P.Wdiag[i] = std::pow(1.0 + r * r, -0.5 * spec.mu);
  }
  for (int i = 0; i < P.n; ++i) {
    const double w = (spec.norm == CoercNorm::H1) ? 1.0 : P.Wdiag[i] * P.Wdiag[i];
    P.B[static_cast<size_t>(i) * P.n + i] += w;
  }

  auto cs = constraints_for(gs, spec.op, spec.sector);
  P.k = static_cast<int>(cs.size());
  const auto s = sqrt_mass(set.grid());
  P.Chat.assign(static_cast<size_t>(P.n) * P.k, 0.0);
  for (int c = 0; c < P.k; ++c)
    for (int i = 0; i < P.n; ++i) P.Chat[static_cast<size_t>(c) * P.n + i] = s[i] * cs[c][i];
  (void)grid;
  return P;
}

// dense symmetric lowest eigenpair of (A, B) projected on the complement of
// the constraint span; Householder reflectors applied in place (dormqr), no
// explicit complement basis
void projected_min(const Pencil& P, bool diagnostics, double& lambda_min,
                   std::vector<double>& minimizer, double& lambda_unconstrained,
                   double& b_min_eig, double& kkt) {
  const int n = P.n, k = P.k;

  lambda_unconstrained = 0.0;
  b_min_eig = 1.0;
  if (diagnostics) {
    std::vector<double> a = P.A, b = P.B, ev;
    sym_gen_eig(a, b, n, ev);
    lambda_unconstrained = ev[0];
    std::vector<double> b2 = P.B, ev2;
    sym_eig(b2, n, ev2);
    b_min_eig = ev2[0];
    if (b_min_eig <= 0.0)
      throw std::runtime_error("constrained_min: norm Gram is not positive definite");
  }
  if (k == 0) {
    std::vector<double> a = P.A, b = P.B, ev;
    sym_gen_eig(a, b, n, ev);
    lambda_min = ev[0];
    minimizer.assign(a.begin(), a.begin() + n);
    kkt = 0.0;
    return;
  }

  std::vector<double> qr = P.Chat;
  std::vector<double> tau(k);
  LAPACKE_dgeqrf(LAPACK_COL_MAJOR, n, k, qr.data(), n, tau.data());
  const int m = n - k;

  auto project = [&](const std::vector<double>& M) {
    std::vector<double> T = M;  // Q^T M Q, then take the trailing m x m block
    LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', n, n, k, qr.data(), n, tau.data(), T.data(), n);
    LAPACKE_dormqr(LAPACK_COL_MAJOR, 'R', 'N', n, n, k, qr.data(), n, tau.data(), T.data(), n);
    std::vector<double> out(static_cast<size_t>(m) * m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        out[static_cast<size_t>(j) * m + i] = T[static_cast<size_t>(k + j) * n + (k + i)];
    return out;
  };
  auto Az = project(P.A);
  auto Bz = project(P.B);
  std::vector<double> ev;
  sym_gen_eig(Az, Bz, m, ev);
  lambda_min = ev[0];
  // lift: y = Q [0; x]
  minimizer.assign(n, 0.0);
  for (int i = 0; i < m; ++i) minimizer[k + i] = Az[static_cast<size_t>(0) * m + i];
  LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'N', n, 1, k, qr.data(), n, tau.data(), minimizer.data(),
                 n);

  // KKT: (A - lambda B) y must lie in the constraint span
  std::vector<double> r(n, 0.0);
  cblas_dgemv(CblasColMajor, CblasNoTrans, n, n, 1.0, P.A.data(), n, minimizer.data(), 1, 0.0,
              r.data(), 1);
  double an = 0.0;
  for (double v : r) an += v * v;
  cblas_dgemv(CblasColMajor, CblasNoTrans, n, n, -lambda_min, P.B.data(), n, minimizer.data(), 1,
              1.0, r.data(), 1);
  LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', n, 1, k, qr.data(), n, tau.data(), r.data(), n);
  double zn = 0.0;
  for (int i = k; i < n; ++i) zn += r[i] * r[i];
  kkt = std::sqrt(zn) / (std::sqrt(an) + 1e-300);
}

}  // namespace

MinReport constrained_min(const GroundStatePack& gs, const CoercivitySpec& spec,
                          bool diagnostics) {
  if (!gs.has_profiles()) throw std::invalid_argument("constrained_min: derive_profiles first");
  MinReport rep;
  rep.spec = spec;
  Pencil P = build_pencil(gs, spec, gs.grid);
  rep.n_constraints = P.k;
  projected_min(P, diagnostics, rep.lambda_min, rep.minimizer, rep.lambda_min_unconstrained,
                rep.b_min_eig, rep.kkt_residual);
  return rep;
}

double robustness_margin(const GroundStatePack& gs, const CoercivitySpec& spec,
                         const MinReport& hard) {
  if (!(hard.lambda_min > 0.0))
    throw std::invalid_argument("robustness_margin: base lambda_min must be positive");
  Pencil P = build_pencil(gs, spec, gs.grid);
  const int n = P.n, k = P.k;
  if (k == 0) return 1.0;

  // QR of the raw constraints: Chat = Qc R
  std::vector<double> qr = P.Chat;
  std::vector<double> tau(k);
  LAPACKE_dgeqrf(LAPACK_COL_MAJOR, n, k, qr.data(), n, tau.data());
  double sigma_min_R = 1e300;
  for (int c = 0; c < k; ++c) sigma_min_R = std::min(sigma_min_R, std::abs(qr[c * n + c]));
  std::vector<double> Qc(static_cast<size_t>(n) * k);
  std::memcpy(Qc.data(), qr.data(), sizeof(double) * qr.size());
  LAPACKE_dorgqr(LAPACK_COL_MAJOR, n, k, k, Qc.data(), n, tau.data());

  // norms entering the rank-k perturbation bound
  auto mat_cols = [&](const std::vector<double>& M) {  // M * Qc -> n x k
    std::vector<double> out(static_cast<size_t>(n) * k);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, k, n, 1.0, M.data(), n, Qc.data(),
                n, 0.0, out.data(), n);
    return out;
  };
  auto AQ = mat_cols(P.A);
  auto BQ = mat_cols(P.B);
  auto block_norms = [&](const std::vector<double>& MQ, double& full, double& corner) {
    // full = ||M Qc||_2 (bounds both the P-part and the corner)
    std::vector<double> rowmaj(static_cast<size_t>(k) * n);
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < n; ++i) rowmaj[static_cast<size_t>(i) * k + c] = MQ[c * n + i];
    full = spectral_norm(rowmaj, n, k);
    std::vector<double> QMQ(static_cast<size_t>(k) * k);
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, k, k, n, 1.0, Qc.data(), n, MQ.data(), n,
                0.0, QMQ.data(), k);
    corner = spectral_norm(QMQ, k, k);
  };
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  block_norms(AQ, a1, a2);
  block_norms(BQ, b1, b2);
  const double lamB = hard.b_min_eig;
  const double lam_h = hard.lambda_min;

  auto bound_ok = [&](double delta) {
    const double sbar = std::sqrt(static_cast<double>(k)) * delta / sigma_min_R;
    const double reach = 1.0 / std::sqrt(lamB) + sbar;
    const double eps1 = 2.0 * a1 * sbar * reach + a2 * sbar * sbar;
    const double eps2 = 2.0 * b1 * sbar * reach + b2 * sbar * sbar;
    if (eps2 >= 1.0) return false;
    return lam_h * (1.0 - eps2) - eps1 >= 0.5 * lam_h;
  };
  if (!bound_ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (bound_ok(hi) && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bound_ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<SweepRow> coercivity_sweep(const std::vector<int>& d_list, const SweepOptions& opt) {
  std::vector<SweepRow> rows;
  for (int d : d_list) {
    const bool in_scope = (d >= 1 && d <= 10);
    for (double h : {opt.h}) {
      auto g = make_grid(d, Sector::radial(), h, opt.r_max);
      auto gs = solve_ground_state(d, 1.0 + 4.0 / d, g, 1e-10);
      derive_profiles(gs);
      auto g2 = make_grid(d, Sector::radial(), 0.5 * h, opt.r_max);
      auto gs2 = solve_ground_state(d, 1.0 + 4.0 / d, g2, 1e-10);
      derive_profiles(gs2);
      for (CoercOp op : {CoercOp::L1, CoercOp::L2}) {
        for (int sec : opt.sectors) {
          if (d == 1 && sec >= 2) continue;  // parity sectors only
          CoercivitySpec spec;
          spec.op = op;
          spec.d = d;
          spec.sector = Sector::ell(sec);
          spec.norm = CoercNorm::H1dotWeighted;
          spec.mu = mu_d(d, spec.sector);
          auto r1 = constrained_min(gs, spec, /*diagnostics=*/false);
          auto r2 = constrained_min(gs2, spec, /*diagnostics=*/false);
          SweepRow row;
          row.d = d;
          row.op = op;
          row.sector = sec;
          row.lambda_min = r1.lambda_min;
          row.lambda_half = r2.lambda_min;
          row.drift = std::abs(r1.lambda_min - r2.lambda_min) /
                      std::max(1e-300, std::abs(r2.lambda_min));
          row.pass = in_scope && r1.lambda_min > 0.0 && r2.lambda_min > 0.0 &&
                     row.drift <= opt.drift_tol;
          row.in_scope = in_scope;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

}  // namespace nlsmode
