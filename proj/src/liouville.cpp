#include "nlsmode/liouville.hpp"

#include <cmath>

namespace nlsmode {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_d(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

uint64_t splitmix(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
double unit(uint64_t& s) { return (splitmix(s) >> 11) * 0x1.0p-53; }

}  // namespace

double chi_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 1.5) return 0.0;
  const double t = 3.0 - 2.0 * s;  // 1 at s=1, 0 at s=1.5
  const double e1 = bump(t), e2 = bump(1.0 - t);
  return e1 / (e1 + e2);
}

double chi_profile_deriv(double s) {
  if (s <= 1.0 || s >= 1.5) return 0.0;
  const double t = 3.0 - 2.0 * s;
  const double e1 = bump(t), e2 = bump(1.0 - t);
  const double d1 = bump_d(t), d2 = bump_d(1.0 - t);
  const double dstep = (d1 * e2 + e1 * d2) / ((e1 + e2) * (e1 + e2));
  return -2.0 * dstep;
}

double psi_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double u = s - 1.0;
  const double I = std::pow(u, 5) / 5.0 - 2.0 * std::pow(u, 6) / 3.0 + 6.0 * std::pow(u, 7) / 7.0 -
                   std::pow(u, 8) / 2.0 + std::pow(u, 9) / 9.0;
  return 1.0 - 630.0 * I;
}

double psi_profile_deriv(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return -630.0 * std::pow(u, 4) * std::pow(1.0 - u, 4);
}

double psi_profile_deriv2(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return -2520.0 * std::pow(u, 3) * std::pow(1.0 - u, 3) * (1.0 - 2.0 * u);
}

CutoffSet build_cutoffs(double b, const RadialGrid& grid, double R_chi) {
  if (!(b > 0.0)) throw std::invalid_argument("build_cutoffs: b must be positive");
  CutoffSet cut;
  cut.grid_ptr = std::make_shared<const RadialGrid>(grid);
  cut.R_chi = R_chi;
  cut.b = b;
  cut.R_psi = 1.0 / (b * b);
  const RadialGrid& g = cut.grid();
  const int n = g.n();
  cut.chi.resize(n);
  cut.dchi.resize(n);
  cut.rho_w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = g.nodes[i];
    cut.chi[i] = chi_profile(r / R_chi);
    cut.dchi[i] = chi_profile_deriv(r / R_chi) / R_chi;
    cut.rho_w[i] = std::pow(1.0 + r * r * r * r, -0.25);
  }
  // Lambda_R = chi Lambda0 + (1/2) r chi' (the divergence-form average)
  ScalarOp lam = lambda0(g);
  cut.LambdaR.grid = lam.grid;
  cut.LambdaR.A = Banded<double>(lam.A.n, 1);
  for (int i = 0; i < lam.A.n; ++i) {
    for (int j = std::max(0, i - 1); j <= std::min(lam.A.n - 1, i + 1); ++j)
      cut.LambdaR.A.at(i, j) = cut.chi[i] * lam.A.get(i, j);
    cut.LambdaR.A.at(i, i) += 0.5 * g.nodes[i] * cut.dchi[i];
  }

  // psi_b on its own mesh: the band needs r up to 2 b^{-2} regardless of the
  // PDE grid (the checks on psi are 1D function inequalities)
  const int m = 4000;
  const double rmax = 2.2 * cut.R_psi;
  cut.psi_r.resize(m);
  cut.psi.resize(m);
  cut.dpsi.resize(m);
  cut.d2psi.resize(m);
  cut.psi_tilde.resize(m);
  for (int i = 0; i < m; ++i) {
    const double r = rmax * (i + 1) / m;
    const double s = r / cut.R_psi;
    cut.psi_r[i] = r;
    cut.psi[i] = psi_profile(s);
    cut.dpsi[i] = psi_profile_deriv(s) / cut.R_psi;
    cut.d2psi[i] = psi_profile_deriv2(s) / (cut.R_psi * cut.R_psi);
    cut.psi_tilde[i] = -r * cut.dpsi[i];
  }
  return cut;
}

PsiCheckReport psi_inequality_check(const std::vector<double>& b_list) {
  // For this cutoff the validity constant sup |d2 psi_b| / (b^{7/5}(psi~_b +
  // r^{-11/5})) decays like b^{7/5} (the bound is slack and tightest near the
  // inner edge of the band).  Uniformity in b is gated on the b-normalized
  // constant, which is flat to a couple of percent; the raw validity constant
  // is reported alongside and is itself bounded by its largest-b value.
  PsiCheckReport rep;
  double cmin = 1e300, cmax = 0.0;
  for (double b : b_list) {
    const double R = 1.0 / (b * b);
    const double b75 = std::pow(b, 7.0 / 5.0);
    PsiCheckRow row;
    row.b = b;
    const int m = 100000;
    double sup = 0.0, arg = 1.0;
    for (int i = 0; i < m; ++i) {
      const double s2 = 1.0 + (i + 0.5) / m;
      const double r = s2 * R;
      const double num = std::abs(psi_profile_deriv2(s2)) / (R * R);
      if (num == 0.0) continue;
      const double tilde = -r * psi_profile_deriv(s2) / R;
      const double ratio = num / (b75 * (tilde + std::pow(r, -11.0 / 5.0)));
      if (ratio > sup) {
        sup = ratio;
        arg = s2;
      }
    }
    row.validity = sup;
    row.constant = sup / b75;  // b-normalized (gated) constant
    row.r_argmax = arg * R;
    const double tilde_arg = -arg * R * psi_profile_deriv(arg) / R;
    row.edge_dominated = std::pow(arg * R, -11.0 / 5.0) >= tilde_arg;
    cmin = std::min(cmin, row.constant);
    cmax = std::max(cmax, row.constant);
    rep.rows.push_back(row);
  }
  rep.band_ratio = cmax / std::max(cmin, 1e-300);
  rep.pass = rep.band_ratio <= 2.0;
  return rep;
}

double energy_conservation_residual(const OperatorSet0& set0, const std::vector<cplx>& u,
                                    const std::vector<cplx>& w, bool break_symmetry) {
  ScalarOp Lp = set0.Lp;
  if (break_symmetry) {
    // de-symmetrize the first-derivative closure: forward instead of central
    const double h = set0.grid().h;
    for (int i = 1; i + 1 < Lp.A.n; ++i) {
      Lp.A.at(i, i) += 0.3 / h;
      Lp.A.at(i, i + 1) -= 0.3 / h;
    }
  }
  const RadialGrid& g = set0.grid();
  auto du = set0.Lm.apply(w);   // du/dt = L- w
  std::vector<cplx> dw = Lp.apply(u);
  for (auto& z : dw) z = -z;    // dw/dt = -L+ u

  const cplx t1 = inner_m(g, Lp.apply(du), u);
  const cplx t2 = inner_m(g, Lp.apply(u), du);
  const cplx t3 = inner_m(g, set0.Lm.apply(dw), w);
  const cplx t4 = inner_m(g, set0.Lm.apply(w), dw);
  return std::abs(t1 + t2 + t3 + t4);
}

VirialRecord virial_derivative_identity(const OperatorSet0& set0, const CutoffSet& cut,
                                        const std::vector<cplx>& u, const std::vector<cplx>& w) {
  const RadialGrid& g = set0.grid();
  VirialRecord rec;

  auto du = set0.Lm.apply(w);
  std::vector<cplx> dw = set0.Lp.apply(u);
  for (auto& z : dw) z = -z;

  // LHS: d/dt [ -2 Re(Lambda_R u, w) ]
  const cplx a1 = inner_m(g, cut.LambdaR.apply(du), w);
  const cplx a2 = inner_m(g, cut.LambdaR.apply(u), dw);
  rec.lhs = -2.0 * (a1 + a2).real();

  // line 1: 2 Re(chi L1 u, u) + 2 Re(chi L2 w, w)
  auto l1u = set0.L1.apply(u);
  auto l2w = set0.L2.apply(w);
  for (int i = 0; i < g.n(); ++i) {
    l1u[i] *= cut.chi[i];
    l2w[i] *= cut.chi[i];
  }
  rec.line1 = 2.0 * (inner_m(g, l1u, u) + inner_m(g, l2w, w)).real();

  // line 2: kinetic boundary commutator B = [-Delta, Lambda_R] + 2 chi Delta
  ScalarOp lap = laplacian(g);
  auto Bquad = [&](const std::vector<cplx>& f) {
    auto t1v = cut.LambdaR.apply(f);
    auto t1 = lap.apply(t1v);
    for (auto& z : t1) z = -z;  // -Delta Lambda_R f
    auto t2v = lap.apply(f);
    auto t2 = cut.LambdaR.apply(t2v);  // Lambda_R Delta f
    std::vector<cplx> Bf(g.n(), cplx(0));
    for (int i = 0; i < g.n(); ++i) Bf[i] = t1[i] + t2[i] + 2.0 * cut.chi[i] * t2v[i];
    return inner_m(g, Bf, f).real();
  };
  const double b_u = Bquad(u);
  const double b_w = Bquad(w);
  rec.line2 = b_u + b_w;
  rec.boundary_mag = std::abs(b_u) + std::abs(b_w);
  rec.residual = rec.lhs - rec.line1 - rec.line2;
  return rec;
}

EbReport eb_form(const OperatorSetB& setb, const std::vector<cplx>& u,
                 const std::vector<cplx>& w, double slack) {
  const RadialGrid& g = setb.grid();
  EbReport rep;
  const cplx e1 = inner_m(g, setb.Lpb.apply(u), u);
  const cplx e2 = inner_m(g, setb.Lmb.apply(w), w);
  std::vector<cplx> nu(g.n());
  for (int i = 0; i < g.n(); ++i) nu[i] = setb.nb[i] * u[i];
  const cplx e3 = inner_m(g, nu, w);
  rep.value = e1.real() + e2.real() - 2.0 * e3.real();

  ScalarOp lap = laplacian(g);
  auto h1 = [&](const std::vector<cplx>& f) {
    double s = -inner_m(g, lap.apply(f), f).real();
    for (int i = 0; i < g.n(); ++i) s += g.cell_mass[i] * std::norm(f[i]);
    return s;
  };
  rep.u_h1 = h1(u);
  rep.w_h1 = h1(w);
  rep.nonneg_within_slack = rep.value >= -slack * (rep.u_h1 + rep.w_h1);
  return rep;
}

double ebmu_assembly(const OperatorSetB& setb, const CutoffSet& cut, double mu,
                     const std::vector<cplx>& u, const std::vector<cplx>& w,
                     bool* regime_warning) {
  const RadialGrid& g = setb.grid();
  if (regime_warning)
    *regime_warning = std::abs(mu) > 2.0 * std::pow(setb.b, 3.0 + setb.d);

  // psi_b sampled on the PDE grid (1 beyond the dedicated mesh never occurs:
  // psi = 1 for r <= b^-2 and the mesh covers the band)
  std::vector<double> psi(g.n());
  for (int i = 0; i < g.n(); ++i) psi[i] = psi_profile(g.nodes[i] / cut.R_psi);

  std::vector<cplx> ru(g.n()), rw(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double wgt = std::pow(cut.rho_w[i], mu);
    ru[i] = wgt * u[i];
    rw[i] = wgt * w[i];
  }
  ScalarOp lap = laplacian(g);
  auto tilde_quad = [&](const std::vector<double>& pot_w, const std::vector<cplx>& f) {
    auto lf = lap.apply(f);
    cplx s = 0.0;
    for (int i = 0; i < g.n(); ++i)
      s += g.cell_mass[i] * std::conj(f[i]) *
           (-lf[i] + (1.0 - pot_w[i]) * psi[i] * f[i]);
    return s.real();
  };
  const double e1 = tilde_quad(setb.pots.wpb, ru);
  const double e2 = tilde_quad(setb.pots.wmb, rw);
  cplx cross = 0.0;
  for (int i = 0; i < g.n(); ++i)
    cross += g.cell_mass[i] * (setb.nb[i] * psi[i] * ru[i]) * std::conj(rw[i]);
  return e1 + e2 - 2.0 * cross.real();
}

std::vector<cplx> smooth_random_field(const RadialGrid& g, uint64_t seed) {
  uint64_t s = seed * 0x9e3779b97f4a7c15ull + 0x1234u;
  std::vector<cplx> f(g.n(), cplx(0));
  for (int k = 0; k < 6; ++k) {
    const double amp_re = 2.0 * unit(s) - 1.0;
    const double amp_im = 2.0 * unit(s) - 1.0;
    const double c = 0.5 + (0.55 * g.r_max - 0.5) * unit(s);
    const double gam = 0.25 + 1.5 * unit(s);
    for (int i = 0; i < g.n(); ++i) {
      const double r = g.nodes[i];
      const double e = std::exp(-gam * (r - c) * (r - c));
      f[i] += cplx(amp_re * e, amp_im * e);
    }
  }
  return f;
}

void project_out(const RadialGrid& g, std::vector<cplx>& u,
                 const std::vector<const std::vector<double>*>& constraints) {
  // Gram-Schmidt in the cell-mass pairing against real profiles
  std::vector<std::vector<double>> basis;
  for (auto* c : constraints) {
    std::vector<double> v(*c);
    for (auto& b : basis) {
      const double ip = inner_m(g, v, b);
      for (size_t i = 0; i < v.size(); ++i) v[i] -= ip * b[i];
    }
    const double nn = norm_m(g, v);
    if (nn < 1e-13) continue;
    for (auto& x : v) x /= nn;
    basis.push_back(std::move(v));
  }
  for (auto& b : basis) {
    cplx ip = 0.0;
    for (size_t i = 0; i < u.size(); ++i) ip += g.cell_mass[i] * u[i] * b[i];
    for (size_t i = 0; i < u.size(); ++i) u[i] -= ip * b[i];
  }
}

}  // namespace nlsmode
