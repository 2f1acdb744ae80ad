#include <doctest.h>

#include <cmath>

#include "nlsmode/ground_state.hpp"
#include "nlsmode/operators_core.hpp"

using namespace nlsmode;

TEST_CASE("1D quintic ground state: closed form 3^{1/4} sech^{1/2}(2x)") {
  auto g = make_grid(1, Sector::even(), 2e-3, 16.0);
  auto pack = solve_ground_state(1, 5.0, g, 1e-10);

  CHECK(pack.shoot_value == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-7));

  double sup = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double r = g.nodes[i];
    if (r > 12.0) break;
    const double exact = std::pow(3.0, 0.25) / std::sqrt(std::cosh(2 * r));
    sup = std::max(sup, std::abs(pack.q[i] - exact));
  }
  CHECK(sup <= 1e-6);

  // positivity and monotone decay
  for (int i = 0; i < g.n_active(); ++i) CHECK(pack.q[i] > 0.0);
  for (int i = 1; i < g.n() / 2; ++i) CHECK(pack.q[i] <= pack.q[i - 1] + 1e-14);
}

TEST_CASE("Townes profile d=2 p=3: frozen shooting-oracle value") {
  auto sr = shoot_ground_state(2, 3.0, 30.0);
  CHECK(sr.a == doctest::Approx(2.2062).epsilon(5e-4));
}

TEST_CASE("residual is truncation-dominated: factor-4 drop under h-halving") {
  auto g1 = make_grid(1, Sector::even(), 4e-3, 16.0);
  auto g2 = make_grid(1, Sector::even(), 2e-3, 16.0);
  auto p1 = solve_ground_state(1, 5.0, g1, 1e-10);
  auto p2 = solve_ground_state(1, 5.0, g2, 1e-10);
  CHECK(p1.residual2 / p2.residual2 == doctest::Approx(4.0).epsilon(0.13));
  CHECK(p2.residual2 < 1e-5);
}

TEST_CASE("derived profiles and the rho / xQ identity") {
  for (int d : {1, 2, 3}) {
    auto g = make_grid(d, Sector::radial(), 2e-3, 34.0);
    auto pack = solve_ground_state(d, 1.0 + 4.0 / d, g, 1e-10);
    derive_profiles(pack);

    // (Q1, Q) = 0 within O(h^2) (it is exactly 0 in the mass pairing)
    const double q1q = inner_m(g, pack.q1, pack.q);
    CHECK(std::abs(q1q) <= 20.0 * g.h * g.h * inner_m(g, pack.q, pack.q));

    // (rho, Q) = 0.5 ||xQ||^2, relative 1e-6
    const double rhoq = inner_w(pack.grid, pack.rho, pack.q);
    double xq2 = inner_w(pack.grid_l1, pack.xq, pack.xq);
    CHECK(std::abs(rhoq - 0.5 * xq2) / xq2 <= 4e-6);

    // || L_+ Q1 + 2 Q || / ||Q|| = O(h^2)
    ScalarOp lap = laplacian(pack.grid);
    auto w1 = potential_w1(pack);
    auto w2 = potential_w2(pack);
    auto lpq1 = lap.apply(pack.q1);
    std::vector<double> res(g.n(), 0.0);
    for (int i = 0; i < g.n_active(); ++i)
      res[i] = -lpq1[i] + pack.q1[i] - (w1[i] + w2[i]) * pack.q1[i] + 2.0 * pack.q[i];
    CHECK(norm_m(g, res) / norm_m(g, pack.q) < 5e-5);
  }
}

TEST_CASE("identity (2.2) converges at second order") {
  const int d = 2;
  std::vector<double> errs;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    auto g = make_grid(d, Sector::radial(), h, 34.0);
    auto pack = solve_ground_state(d, 1.0 + 4.0 / d, g, 1e-10);
    derive_profiles(pack);
    const double rhoq = inner_w(pack.grid, pack.rho, pack.q);
    const double xq2 = inner_w(pack.grid_l1, pack.xq, pack.xq);
    errs.push_back(std::abs(rhoq - 0.5 * xq2) / xq2);
  }
  const double order = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
  CHECK(order2 > 1.7);
  CHECK(order2 < 2.3);
}

TEST_CASE("tail fit of Q matches <x>^{-(d-1)/2} e^{-|x|}") {
  auto g = make_grid(3, Sector::radial(), 2e-3, 16.0);
  auto pack = solve_ground_state(3, 1.0 + 4.0 / 3.0, g, 1e-10);
  CHECK(pack.tail.kappa == doctest::Approx(1.0).epsilon(0.05));
  CHECK(pack.tail.beta == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("rho decay rate: kappa >= 4/5 - 0.05 in d = 1") {
  auto g = make_grid(1, Sector::even(), 2e-3, 16.0);
  auto pack = solve_ground_state(1, 5.0, g, 1e-10);
  derive_profiles(pack);
  auto t = fit_tail_window(pack.fn(pack.rho), 0.6 * (g.r_max - 3.0), 0.9 * (g.r_max - 3.0));
  CHECK(t.kappa >= 0.8 - 0.05);
}

TEST_CASE("Pohozaev sanity: two routes to ||grad Q||^2 agree") {
  auto g = make_grid(2, Sector::radial(), 2e-3, 16.0);
  auto pack = solve_ground_state(2, 3.0, g, 1e-10);
  ScalarOp lap = laplacian(g);
  const double via_form = -quad_form(lap, pack.q);
  // gradient quadrature via centered differences
  ScalarOp D = radial_derivative(g);
  auto dq = D.apply(pack.q);
  std::vector<double> dq2(g.n());
  for (int i = 0; i < g.n(); ++i) dq2[i] = dq[i] * dq[i];
  const double via_grad = quadrature(g, dq2);
  CHECK(via_form == doctest::Approx(via_grad).epsilon(5e-5));
}

TEST_CASE("pack JSON round trip") {
  auto g = make_grid(1, Sector::even(), 0.01, 12.0);
  auto pack = solve_ground_state(1, 5.0, g, 1e-10);
  derive_profiles(pack);
  auto text = pack_to_json(pack);
  auto back = pack_from_json(text);
  CHECK(back.d == pack.d);
  CHECK(back.shoot_value == pack.shoot_value);
  REQUIRE(back.q.size() == pack.q.size());
  for (size_t i = 0; i < pack.q.size(); ++i) CHECK(back.q[i] == pack.q[i]);
}

TEST_CASE("solver input validation") {
  auto g = make_grid(1, Sector::even(), 0.01, 12.0);
  CHECK_THROWS(solve_ground_state(1, 0.5, g, 1e-10));
  CHECK_THROWS(solve_ground_state(1, 5.0, g, 1e-13));
  auto godd = make_grid(1, Sector::odd(), 0.01, 12.0);
  CHECK_THROWS(solve_ground_state(1, 5.0, godd, 1e-10));
}
