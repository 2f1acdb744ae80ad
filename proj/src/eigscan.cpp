#include "nlsmode/eigscan.hpp"

#include <algorithm>
#include <cmath>

namespace nlsmode {

namespace {

uint64_t splitmix(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double block_norm_est(const BlockOp& H) {
  const int n = H.a11.n;
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j)
      s += std::abs(H.a11.get(i, j)) + std::abs(H.a12.get(i, j)) + std::abs(H.a21.get(i, j)) +
           std::abs(H.a22.get(i, j));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

std::vector<cplx> block_spectrum(const OperatorSetB& setb, int dense_limit) {
  if (setb.grid().n_active() > dense_limit)
    throw std::invalid_argument("block_spectrum: size exceeds the dense limit");
  auto K = realified_dense(setb);
  const int N = 2 * setb.grid().n_active();
  auto kappa = real_eigvals(K, N);
  std::vector<cplx> out(kappa.size());
  for (size_t i = 0; i < kappa.size(); ++i) out[i] = cplx(0, -1) * kappa[i];
  return out;
}

std::vector<cplx> block_spectrum_h0(const OperatorSet0& set0, int dense_limit) {
  if (set0.grid().n_active() > dense_limit)
    throw std::invalid_argument("block_spectrum_h0: size exceeds the dense limit");
  auto K = realified_dense_h0(set0);
  const int N = 2 * set0.grid().n_active();
  auto kappa = real_eigvals(K, N);
  std::vector<cplx> out(kappa.size());
  for (size_t i = 0; i < kappa.size(); ++i) out[i] = cplx(0, -1) * kappa[i];
  return out;
}

std::vector<double> scalar_spectrum(const ScalarOp& op, int dense_limit) {
  if (op.A.n > dense_limit)
    throw std::invalid_argument("scalar_spectrum: size exceeds the dense limit");
  if (!op.hermitian) throw std::invalid_argument("scalar_spectrum: operator is not hermitian");
  auto a = sym_dense(op);
  std::vector<double> ev;
  sym_eig(a, op.A.n, ev);
  return ev;
}

RefineOut refine_eigenpair(const BlockOp& H, cplx lambda0, unsigned seed, int max_iter) {
  const int na = H.a11.n;
  const int N = 2 * na;
  const auto& m = H.grid->cell_mass;
  RefineOut out;
  out.lambda = lambda0;

  std::vector<cplx> v(N);
  uint64_t s = 0x5eed0000u + seed;
  for (auto& z : v) z = cplx((splitmix(s) % 1000) / 1000.0 - 0.5,
                             (splitmix(s) % 1000) / 1000.0 - 0.5);
  auto normalize = [&](std::vector<cplx>& x) {
    double nn = 0.0;
    for (int i = 0; i < na; ++i) nn += m[i] * (std::norm(x[2 * i]) + std::norm(x[2 * i + 1]));
    nn = std::sqrt(nn) + 1e-300;
    for (auto& z : x) z /= nn;
    return nn;
  };
  normalize(v);

  const double hnorm = block_norm_est(H);
  cplx lambda = lambda0;
  double resid = 1e300;
  std::vector<cplx> Hv(N);
  auto apply = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
    for (int i = 0; i < na; ++i) {
      cplx t(0), bq(0);
      for (int j = std::max(0, i - 1); j <= std::min(na - 1, i + 1); ++j) {
        t += H.a11.get(i, j) * x[2 * j] + H.a12.get(i, j) * x[2 * j + 1];
        bq += H.a21.get(i, j) * x[2 * j] + H.a22.get(i, j) * x[2 * j + 1];
      }
      y[2 * i] = t;
      y[2 * i + 1] = bq;
    }
  };

  for (int it = 0; it < max_iter; ++it) {
    auto Z = interleaved_shifted(H, lambda);
    std::vector<cplx> w;
    try {
      w = band_solve(Z, v);
    } catch (const std::exception&) {
      // shift numerically singular: nudge and retry once
      auto Z2 = interleaved_shifted(H, lambda + cplx(0, 1e-12 * (1.0 + std::abs(lambda))));
      w = band_solve(Z2, v);
    }
    normalize(w);
    v = std::move(w);
    // Rayleigh quotient in the mass pairing
    apply(v, Hv);
    cplx num = 0.0;
    double den = 0.0;
    for (int i = 0; i < na; ++i) {
      num += m[i] * (Hv[2 * i] * std::conj(v[2 * i]) + Hv[2 * i + 1] * std::conj(v[2 * i + 1]));
      den += m[i] * (std::norm(v[2 * i]) + std::norm(v[2 * i + 1]));
    }
    const cplx lam_new = num / den;
    double rn = 0.0;
    for (int i = 0; i < na; ++i) {
      rn += m[i] * (std::norm(Hv[2 * i] - lam_new * v[2 * i]) +
                    std::norm(Hv[2 * i + 1] - lam_new * v[2 * i + 1]));
    }
    resid = std::sqrt(rn) / hnorm;
    lambda = lam_new;
    if (resid <= 1e-10) break;
  }
  out.lambda = lambda;
  out.residual = resid;
  out.converged = resid <= 1e-8;
  const int nfull = static_cast<int>(H.grid->nodes.size());
  out.top.assign(nfull, cplx(0));
  out.bot.assign(nfull, cplx(0));
  for (int i = 0; i < na; ++i) {
    out.top[i] = v[2 * i];
    out.bot[i] = v[2 * i + 1];
  }
  return out;
}

EigClass classify_pair(double loc, double tail_mass, double drift_h, double drift_domain,
                       cplx lambda, const ClassifyThresholds& t) {
  const double dtol = t.drift * (1.0 + std::abs(lambda));
  if (loc >= t.loc && drift_h <= dtol && drift_domain <= dtol) return EigClass::Localized;
  if (tail_mass >= t.boundary) return EigClass::BoundaryArtifact;
  return EigClass::ContinuumArtifact;
}

namespace {

struct RungData {
  std::vector<cplx> spectrum;
  std::vector<EigPair> refined;  // in-box refined eigenpairs (unclassified)
  double b_scan = 0.0;
};

double nearest(const std::vector<cplx>& spec, cplx z) {
  double best = 1e300;
  for (auto& w : spec) best = std::min(best, std::abs(w - z));
  return best;
}

double nearest_refined(const RungData& rung, cplx z) {
  double best = 1e300;
  for (auto& e : rung.refined) best = std::min(best, std::abs(e.lambda - z));
  // fall back to the raw spectrum when the box missed it
  return std::min(best, nearest(rung.spectrum, z));
}

// refine + measure all in-box eigenvalues of one assembled operator
template <class MakeBlock>
RungData scan_rung(const std::vector<cplx>& spectrum, const ScanWindow& win,
                   const RadialGrid& grid, MakeBlock&& make_block, unsigned seed) {
  RungData out;
  out.spectrum = spectrum;
  const BlockOp& H = make_block();
  // dedupe refinement shifts: conjugate-pair symmetry produces both lambda
  // and -conj(lambda); both may land in the box
  std::vector<cplx> shifts;
  for (auto& z : spectrum)
    if (win.in_box(z)) shifts.push_back(z);
  std::sort(shifts.begin(), shifts.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  unsigned k = 0;
  for (auto& z : shifts) {
    auto ref = refine_eigenpair(H, z, seed + 31 * (k++));
    EigPair e;
    e.lambda = ref.lambda;
    e.residual = ref.residual;
    // localization scores from the mass distribution of the eigenvector
    const auto& g = grid;
    double inner = 0.0, outer = 0.0, total = 0.0;
    for (int i = 0; i < g.n(); ++i) {
      const double mass = g.cell_mass[i] * (std::norm(ref.top[i]) + std::norm(ref.bot[i]));
      total += mass;
      if (g.nodes[i] <= 0.5 * g.r_max) inner += mass;
      if (g.nodes[i] >= 0.9 * g.r_max) outer += mass;
    }
    e.loc = inner / (total + 1e-300);
    e.tail_mass = outer / (total + 1e-300);
    // tail decay of |v|
    RadialFunction av(g, true);
    for (int i = 0; i < g.n(); ++i)
      av.values[i] = std::sqrt(std::norm(ref.top[i]) + std::norm(ref.bot[i])) + 1e-300;
    try {
      auto fit = fit_tail_window(av, 0.55 * g.r_max, 0.85 * g.r_max);
      e.tail_kappa = fit.kappa;
      e.tail_beta = fit.beta;
    } catch (const std::exception&) {
      e.tail_kappa = 0.0;
      e.tail_beta = 0.0;
    }
    out.refined.push_back(e);
  }
  return out;
}

}  // namespace

H0ScanResult h0_mode_stability(int d, const ScanConfig& cfg, double inject_well_depth) {
  H0ScanResult res;
  res.d = d;
  res.window = ScanWindow::for_h0(cfg.delta, cfg.M);

  int violations_base = 0, violations_fine = 0;
  for (int sec : cfg.sectors) {
    if (d == 1 && sec >= 2) continue;
    SectorScan ss;
    ss.sector = Sector::ell(sec);

    struct Rung {
      double h, R;
    };
    const Rung rungs[4] = {{cfg.h, cfg.r_max},
                           {0.5 * cfg.h, cfg.r_max},
                           {cfg.h, 1.5 * cfg.r_max},
                           {0.5 * cfg.h, 1.5 * cfg.r_max}};
    RungData data[4];
    for (int rix = 0; rix < 4; ++rix) {
      auto g = make_grid(d, Sector::radial(), rungs[rix].h, rungs[rix].R);
      auto gs = solve_ground_state(d, 1.0 + 4.0 / d, g, 1e-10, /*second_order_polish=*/true);
      auto set0 = assemble_H0(gs, Sector::ell(sec));
      if (inject_well_depth != 0.0) {
        const int na = set0.grid().n_active();
        for (int i = 0; i < na; ++i) {
          const double r = set0.grid().nodes[i];
          const double well = inject_well_depth * std::exp(-r * r);
          set0.w1[i] += well;
          set0.Lp.A.at(i, i) -= well;
          set0.Lm.A.at(i, i) -= well;
          set0.H0.a11.at(i, i) += well;
          set0.H0.a22.at(i, i) += -well;
        }
      }
      auto spec = block_spectrum_h0(set0, cfg.dense_limit);
      data[rix] = scan_rung(spec, res.window, set0.grid(), [&]() -> const BlockOp& {
        return set0.H0;
      }, cfg.seed + 1000 * sec + rix);
    }

    auto classify_rung = [&](int base, int cmp_h, int cmp_R) {
      std::vector<EigPair> out = data[base].refined;
      for (auto& e : out) {
        e.drift_h = nearest_refined(data[cmp_h], e.lambda);
        e.drift_domain = nearest_refined(data[cmp_R], e.lambda);
        e.cls = classify_pair(e.loc, e.tail_mass, e.drift_h, e.drift_domain, e.lambda,
                              cfg.thresholds);
      }
      return out;
    };
    ss.spectrum = data[0].spectrum;
    ss.candidates = classify_rung(0, 1, 2);
    ss.fine_candidates = classify_rung(3, 2, 1);

    auto judge = [&](const std::vector<EigPair>& cands, bool record) {
      int bad = 0;
      int gap = 0;
      for (auto& e : cands) {
        if (e.cls != EigClass::Localized) continue;
        if (std::abs(e.lambda) > 1e-3) ++bad;
        if (std::abs(e.lambda.real()) < 1.0 && std::abs(e.lambda) > 1e-3) ++gap;
        if (record && std::abs(e.lambda.real()) >= 1.0) res.embedded_candidates.push_back(e.lambda);
      }
      if (record) {
        for (auto& e : cands) {
          const double dist_edge = std::abs(std::abs(e.lambda.real()) - 1.0);
          if (dist_edge <= cfg.thresholds.resonance_band && std::abs(e.lambda.imag()) < 0.1 &&
              e.loc >= 0.5 && e.tail_kappa <= cfg.thresholds.resonance_kappa)
            res.resonance_candidates.push_back(e.lambda);
        }
      }
      return std::pair<int, int>(bad, gap);
    };
    auto [bad0, gap0] = judge(ss.candidates, true);
    auto [bad1, gap1] = judge(ss.fine_candidates, false);
    violations_base += bad0;
    violations_fine += bad1;
    res.gap_count += gap0;
    (void)gap1;
    res.sectors.push_back(std::move(ss));
  }
  res.localized_violations = violations_base;
  res.pass = violations_base == 0;
  res.pass_fine = violations_fine == 0;
  res.verdict_stable = (res.pass == res.pass_fine);
  return res;
}

HbScanResult hb_mode_stability(const ProfileB& prof, const ScanConfig& cfg,
                               double sigma_minus_sc) {
  HbScanResult res;
  res.d = prof.d;
  res.s_c = prof.s_c;
  if (sigma_minus_sc < 0.0) sigma_minus_sc = std::pow(prof.b, prof.d + 4.0);

  int violations_base = 0, violations_fine = 0;
  for (int sec : cfg.sectors) {
    if (prof.d == 1 && sec >= 2) continue;
    SectorScan ss;
    ss.sector = Sector::ell(sec);
    struct Rung {
      double h, R;
    };
    const Rung rungs[4] = {{cfg.h, cfg.r_max},
                           {0.5 * cfg.h, cfg.r_max},
                           {cfg.h, 1.5 * cfg.r_max},
                           {0.5 * cfg.h, 1.5 * cfg.r_max}};
    RungData data[4];
    double b_scan0 = prof.b;
    for (int rix = 0; rix < 4; ++rix) {
      auto g = make_grid(prof.d, Sector::radial(), rungs[rix].h, rungs[rix].R);
      ProfileB pg = transport_profile(prof, g);
      polish_profile_on_grid(pg, 1e-12);
      if (rix == 0) b_scan0 = pg.b;
      auto dirich = assemble_Hb(pg, Sector::ell(sec), /*robin_tail=*/false);
      auto robin = assemble_Hb(pg, Sector::ell(sec), /*robin_tail=*/true);
      auto spec = block_spectrum(dirich, cfg.dense_limit);
      if (rix == 0) res.window = ScanWindow::for_hb(pg.b, prof.d, cfg.delta, cfg.M, sigma_minus_sc);
      data[rix] = scan_rung(spec, res.window, robin.grid(), [&]() -> const BlockOp& {
        return robin.Hb;
      }, cfg.seed + 1000 * sec + rix);
      data[rix].b_scan = pg.b;
    }
    ss.b_scan = b_scan0;
    res.b = b_scan0;

    auto classify_rung = [&](int base, int cmp_h, int cmp_R) {
      std::vector<EigPair> out = data[base].refined;
      for (auto& e : out) {
        e.drift_h = nearest_refined(data[cmp_h], e.lambda);
        e.drift_domain = nearest_refined(data[cmp_R], e.lambda);
        e.cls = classify_pair(e.loc, e.tail_mass, e.drift_h, e.drift_domain, e.lambda,
                              cfg.thresholds);
      }
      return out;
    };
    ss.spectrum = data[0].spectrum;
    ss.candidates = classify_rung(0, 1, 2);
    ss.fine_candidates = classify_rung(3, 2, 1);

    auto judge = [&](const std::vector<EigPair>& cands, double bsc, bool record) {
      // symmetry eigenvalues exempted by matching against the scan-grid b
      std::vector<cplx> targets;
      if (sec == 0) targets = {cplx(0, 0), cplx(0, -2.0 * bsc)};
      if (sec == 1) targets = {cplx(0, -bsc)};
      int bad = 0;
      for (auto& e : cands) {
        if (e.cls != EigClass::Localized) continue;
        if (!(e.lambda.imag() < res.window.sigma_gap)) continue;
        if (std::abs(e.lambda) < res.window.delta) continue;
        double dist = 1e300;
        for (auto& t : targets) dist = std::min(dist, std::abs(e.lambda - t));
        if (dist <= 1e-2 * std::max(bsc, 0.1)) continue;  // symmetry mode
        ++bad;
      }
      return bad;
    };
    violations_base += judge(ss.candidates, data[0].b_scan, false);
    violations_fine += judge(ss.fine_candidates, data[3].b_scan, false);

    // near-origin localized set: distances to the symmetry eigenvalues,
    // Richardson-extrapolated across the h-ladder (the refined eigenvalues
    // carry an O(h^2) stencil displacement)
    auto nearest_loc = [&](const RungData& rung, cplx target) {
      cplx best = cplx(1e300, 0.0);
      double bd = 1e300;
      for (auto& e : rung.refined) {
        const double dd = std::abs(e.lambda - target);
        if (e.loc >= cfg.thresholds.loc && dd < bd) {
          bd = dd;
          best = e.lambda;
        }
      }
      return best;
    };
    auto dist_extrap = [&](cplx target0, cplx target1) {
      const cplx l0 = nearest_loc(data[0], target0);
      const cplx l1 = nearest_loc(data[1], target1);
      if (std::abs(l0) > 1e299 || std::abs(l1) > 1e299) return 1e300;
      const cplx ex = (4.0 * l1 - l0) / 3.0;
      const cplx tex = (4.0 * target1 - target0) / 3.0;
      return std::abs(ex - tex);
    };
    const double b0 = data[0].b_scan, b1 = data[1].b_scan;
    if (sec == 0) {
      res.dist_zero = std::min(res.dist_zero, dist_extrap(cplx(0, 0), cplx(0, 0)));
      res.dist_m2bi =
          std::min(res.dist_m2bi, dist_extrap(cplx(0, -2.0 * b0), cplx(0, -2.0 * b1)));
    } else if (sec == 1) {
      res.dist_mbi = std::min(res.dist_mbi, dist_extrap(cplx(0, -b0), cplx(0, -b1)));
    }
    res.sectors.push_back(std::move(ss));
  }
  res.localized_violations = violations_base;
  res.pass = violations_base == 0;
  res.pass_fine = violations_fine == 0;
  res.verdict_stable = (res.pass == res.pass_fine);
  return res;
}

}  // namespace nlsmode
