#include <doctest.h>

#include <cmath>

#include "nlsmode/liouville.hpp"

using namespace nlsmode;

namespace {
GroundStatePack& packL() {
  static GroundStatePack p = [] {
    auto g = make_grid(1, Sector::even(), 0.01, 30.0);
    auto pk = solve_ground_state(1, 5.0, g, 1e-10);
    derive_profiles(pk);
    return pk;
  }();
  return p;
}
}  // namespace

TEST_CASE("cutoff shapes: chi plateau, psi monotone, weight values") {
  auto& gs = packL();
  auto cut = build_cutoffs(0.3, gs.grid, 8.0);
  // chi_R(R) = 1, chi_R(3R/2) = 0
  CHECK(chi_profile(1.0) == 1.0);
  CHECK(chi_profile(1.5) == 0.0);
  CHECK(chi_profile(1.2) > 0.0);
  CHECK(chi_profile(1.2) < 1.0);
  // psi' <= 0, psi~ >= 0, C3 seams
  for (double s : {1.0, 1.1, 1.5, 1.9, 2.0}) CHECK(psi_profile_deriv(s) <= 0.0);
  for (size_t i = 0; i < cut.psi.size(); ++i) CHECK(cut.psi_tilde[i] >= -1e-15);
  CHECK(psi_profile(1.0) == 1.0);
  CHECK(psi_profile(2.0) == 0.0);
  // third difference of psi bounded across the seams (C3)
  const double dd = 1e-4;
  for (double s : {1.0, 2.0}) {
    const double d3 = (psi_profile_deriv2(s + dd) - psi_profile_deriv2(s - dd)) / (2 * dd);
    CHECK(std::abs(d3) < 1e4);
  }
  // rho(1) = 2^{-1/4}, rho(0) -> 1, rho ~ 1/r at infinity
  int i1 = static_cast<int>(std::llround(1.0 / gs.grid.h)) - 1;
  CHECK(cut.rho_w[i1] == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-10));
  const int last = gs.grid.n() - 1;
  CHECK(cut.rho_w[last] * gs.grid.nodes[last] == doctest::Approx(1.0).epsilon(1e-3));

  // Lambda_R antisymmetry defect O(h^2) for compactly supported smooth input
  std::vector<double> f(gs.grid.n(), 0.0);
  for (int i = 0; i < gs.grid.n(); ++i) {
    const double r = gs.grid.nodes[i];
    f[i] = std::exp(-2.0 * (r - 3.0) * (r - 3.0));
  }
  CHECK(std::abs(inner_m(gs.grid, cut.LambdaR.apply(f), f)) < 1e-6);
}

TEST_CASE("psi inequality constants uniform across b") {
  auto rep = psi_inequality_check({0.1, 0.2, 0.3});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.pass);
  CHECK(rep.band_ratio <= 2.0);
  for (auto& row : rep.rows) {
    CHECK(row.constant > 0.0);
    // the argmax sits in the transition band
    const double R = 1.0 / (row.b * row.b);
    CHECK(row.r_argmax >= R);
    CHECK(row.r_argmax <= 2.0 * R);
  }
}

TEST_CASE("energy conservation: machine-zero residual; broken symmetry shows") {
  auto& gs = packL();
  auto set0 = assemble_H0(gs, Sector::radial());
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    auto u = smooth_random_field(gs.grid, seed);
    auto w = smooth_random_field(gs.grid, seed + 1000);
    double nu = 0, nw = 0;
    for (int i = 0; i < gs.grid.n(); ++i) {
      nu += gs.grid.cell_mass[i] * std::norm(u[i]);
      nw += gs.grid.cell_mass[i] * std::norm(w[i]);
    }
    const double scale = std::pow(std::sqrt(nu) + std::sqrt(nw), 2);
    CHECK(energy_conservation_residual(set0, u, w) <= 1e-12 * scale / (gs.grid.h * gs.grid.h));
    CHECK(energy_conservation_residual(set0, u, w) <= 1e-9);
    CHECK(energy_conservation_residual(set0, u, w, /*break_symmetry=*/true) > 1e-6);
  }
  // special case u = Q1, w = Q
  std::vector<cplx> u(gs.grid.n()), w(gs.grid.n());
  for (int i = 0; i < gs.grid.n(); ++i) {
    u[i] = gs.q1[i];
    w[i] = gs.q[i];
  }
  CHECK(energy_conservation_residual(set0, u, w) <= 1e-9);
}

TEST_CASE("virial derivative identity at second order") {
  std::vector<double> resids;
  for (double h : {0.02, 0.01}) {
    auto g = make_grid(1, Sector::even(), h, 30.0);
    auto gs = solve_ground_state(1, 5.0, g, 1e-10);
    derive_profiles(gs);
    auto set0 = assemble_H0(gs, Sector::radial());
    auto cut = build_cutoffs(0.3, gs.grid, 8.0);
    // smooth decaying test vectors
    std::vector<cplx> u(g.n()), w(g.n());
    for (int i = 0; i < g.n(); ++i) {
      const double r = g.nodes[i];
      u[i] = cplx(std::exp(-0.5 * (r - 2.0) * (r - 2.0)), 0.3 * std::exp(-0.3 * r * r));
      w[i] = cplx(0.7 * std::exp(-0.4 * (r - 3.0) * (r - 3.0)), -0.2 * std::exp(-0.6 * r * r));
    }
    auto rec = virial_derivative_identity(set0, cut, u, w);
    resids.push_back(std::abs(rec.residual));
  }
  CHECK(resids[0] < 1e-2);
  const double order = std::log2(resids[0] / resids[1]);
  CHECK(order >= 1.7);

  // inputs supported inside r <= R: boundary terms negligible, residual tiny
  auto& gs = packL();
  auto set0 = assemble_H0(gs, Sector::radial());
  auto cut = build_cutoffs(0.3, gs.grid, 12.0);
  std::vector<cplx> u(gs.grid.n(), cplx(0)), w(gs.grid.n(), cplx(0));
  for (int i = 0; i < gs.grid.n(); ++i) {
    const double r = gs.grid.nodes[i];
    u[i] = std::exp(-2.0 * (r - 2.0) * (r - 2.0));
    w[i] = std::exp(-2.0 * (r - 2.5) * (r - 2.5));
  }
  auto rec = virial_derivative_identity(set0, cut, u, w);
  // chi == 1 on the support: untruncated Virial, residual pure O(h^2)
  CHECK(std::abs(rec.residual) < 5e-3);
  CHECK(std::abs(rec.line2) < 5e-3);

  // boundary-commutator magnitude decreases as R grows with fixed support
  auto cut2 = build_cutoffs(0.3, gs.grid, 16.0);
  auto rec2 = virial_derivative_identity(set0, cut2, u, w);
  CHECK(rec2.boundary_mag <= rec.boundary_mag + 1e-12);
}

TEST_CASE("I(t) invariant under simultaneous phase rotation") {
  auto& gs = packL();
  auto cut = build_cutoffs(0.3, gs.grid, 8.0);
  auto u = smooth_random_field(gs.grid, 11);
  auto w = smooth_random_field(gs.grid, 12);
  auto I_of = [&](const std::vector<cplx>& uu, const std::vector<cplx>& ww) {
    return -2.0 * inner_m(gs.grid, cut.LambdaR.apply(uu), ww).real();
  };
  const double i0 = I_of(u, w);
  const cplx ph = std::exp(cplx(0.0, 0.77));
  auto u2 = u;
  auto w2 = w;
  for (auto& z : u2) z *= ph;
  for (auto& z : w2) z *= ph;
  CHECK(I_of(u2, w2) == doctest::Approx(i0).epsilon(1e-12));
}

TEST_CASE("E_b: degeneration, zero input, polarization consistency") {
  auto gb = make_grid(1, Sector::even(), 0.01, 16.0);
  auto prof0 = solve_profile(1, 5.0, 0.3, 1.3, gb, 1e-9);  // b = 0
  auto setb = assemble_Hb(prof0, Sector::radial());
  auto gs = solve_ground_state(1, 5.0, gb, 1e-10);
  auto set0 = assemble_H0(gs, Sector::radial());

  std::vector<cplx> z(gb.n(), cplx(0));
  CHECK(eb_form(setb, z, z).value == 0.0);

  auto u = smooth_random_field(gb, 21);
  auto w = smooth_random_field(gb, 22);
  // b = 0: E_b = E exactly (N_0 = 0, L_{+-,0} = L_+-)
  const double eb = eb_form(setb, u, w).value;
  const double e0 = (inner_m(gb, set0.Lp.apply(u), u) + inner_m(gb, set0.Lm.apply(w), w)).real();
  CHECK(eb == doctest::Approx(e0).epsilon(1e-9));

  // quadratic scaling and polarization consistency
  auto u2 = u;
  for (auto& zz : u2) zz *= 2.0;
  auto w2 = w;
  for (auto& zz : w2) zz *= 2.0;
  CHECK(eb_form(setb, u2, w2).value == doctest::Approx(4.0 * eb).epsilon(1e-12));
}

TEST_CASE("E_{b,mu}: weight-1 region equals E_b; quadratic scaling; real") {
  auto gb = make_grid(1, Sector::even(), 5e-4, 24.0);
  auto prof = solve_profile(1, 5.2, 0.7, 1.4, gb, 1e-10);
  auto ge = make_grid(1, Sector::even(), 0.02, 24.0);
  auto profe = transport_profile(prof, ge);
  auto setb = assemble_Hb(profe, Sector::radial());
  auto cut = build_cutoffs(profe.b, ge, 8.0);

  // supports inside the psi = 1 plateau (r <= b^{-2} ~ 2.57)
  std::vector<cplx> u(ge.n(), cplx(0)), w(ge.n(), cplx(0));
  for (int i = 0; i < ge.n(); ++i) {
    const double r = ge.nodes[i];
    if (r < 2.2) {
      u[i] = cplx(std::exp(-30.0 * (r - 1.0) * (r - 1.0)), 0.0);
      w[i] = cplx(0.0, std::exp(-30.0 * (r - 1.2) * (r - 1.2)));
    }
  }
  bool warned = false;
  const double emu0 = ebmu_assembly(setb, cut, 0.0, u, w, &warned);
  CHECK(warned == false);
  const double eb = eb_form(setb, u, w).value;
  CHECK(emu0 == doctest::Approx(eb).epsilon(1e-6));

  const double mu = 1.5 * std::pow(profe.b, 4.0);
  auto u2 = u;
  auto w2 = w;
  for (auto& zz : u2) zz *= cplx(0.0, 3.0);
  for (auto& zz : w2) zz *= cplx(0.0, 3.0);
  CHECK(ebmu_assembly(setb, cut, mu, u2, w2) ==
        doctest::Approx(9.0 * ebmu_assembly(setb, cut, mu, u, w)).epsilon(1e-10));

  bool warn2 = false;
  ebmu_assembly(setb, cut, 10.0 * std::pow(profe.b, 4.0), u, w, &warn2);
  CHECK(warn2);
}

TEST_CASE("constrained sampling: E_b bounded below at b ~ 0.3-0.6") {
  auto gb = make_grid(1, Sector::even(), 5e-4, 24.0);
  auto prof = solve_profile(1, 5.2, 0.7, 1.4, gb, 1e-10);
  auto ge = make_grid(1, Sector::even(), 0.01, 24.0);
  auto profe = transport_profile(prof, ge);
  auto setb = assemble_Hb(profe, Sector::radial());
  auto gs = solve_ground_state(1, 5.0, ge, 1e-10);
  derive_profiles(gs);

  int fails = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto u = smooth_random_field(ge, 300 + seed);
    auto w = smooth_random_field(ge, 900 + seed);
    project_out(ge, u, {&gs.q, &gs.q1});
    project_out(ge, w, {&gs.q1, &gs.q2});
    auto rep = eb_form(setb, u, w, 1e-2);
    if (!rep.nonneg_within_slack) ++fails;
  }
  CHECK(fails == 0);
}
