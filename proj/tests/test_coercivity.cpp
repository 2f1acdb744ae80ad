#include <doctest.h>

#include <cmath>

#include "nlsmode/coercivity.hpp"

using namespace nlsmode;

namespace {
GroundStatePack& pack1() {
  static GroundStatePack p = [] {
    auto g = make_grid(1, Sector::radial(), 0.02, 15.0);
    auto pk = solve_ground_state(1, 5.0, g, 1e-10);
    derive_profiles(pk);
    return pk;
  }();
  return p;
}
}  // namespace

TEST_CASE("constrained minimum: positivity, monotonicity, KKT") {
  auto& gs = pack1();
  CoercivitySpec spec;
  spec.op = CoercOp::L1;
  spec.d = 1;
  spec.sector = Sector::radial();
  spec.mu = mu_d(1, spec.sector);
  auto rep = constrained_min(gs, spec);

  CHECK(rep.lambda_min > 0.0);
  CHECK(rep.n_constraints == 2);
  // minimization over a larger set: unconstrained <= constrained
  CHECK(rep.lambda_min_unconstrained <= rep.lambda_min);
  CHECK(rep.lambda_min_unconstrained < 0.0);  // L1 is indefinite without constraints
  CHECK(rep.b_min_eig > 0.0);
  CHECK(rep.kkt_residual <= 1e-8);

  // L+ with the H1 norm under the (2.5)-type constraints
  CoercivitySpec sp;
  sp.op = CoercOp::Lplus;
  sp.d = 1;
  sp.sector = Sector::radial();
  sp.norm = CoercNorm::H1;
  auto rp = constrained_min(gs, sp);
  CHECK(rp.lambda_min > 0.0);
}

TEST_CASE("robustness margin: positive, and zero slack recovers the base value") {
  auto& gs = pack1();
  CoercivitySpec spec;
  spec.op = CoercOp::L1;
  spec.d = 1;
  spec.sector = Sector::radial();
  spec.mu = mu_d(1, spec.sector);
  auto rep = constrained_min(gs, spec);
  const double delta = robustness_margin(gs, spec, rep);
  CHECK(delta > 0.0);
  CHECK_THROWS(robustness_margin(gs, spec, [&] {
    auto bad = rep;
    bad.lambda_min = -1.0;
    return bad;
  }()));
}

TEST_CASE("weight exponents follow the dimension table") {
  CHECK(mu_d(1, Sector::radial()) == 1.0);
  CHECK(mu_d(3, Sector::radial()) == 1.0);
  CHECK(mu_d(10, Sector::ell(1)) == 1.0);
  CHECK(mu_d(2, Sector::radial()) == doctest::Approx(1.1));
  CHECK(mu_d(2, Sector::ell(1)) == 1.0);  // vanishing-average override
  CHECK(mu_d(2, Sector::ell(2)) == 1.0);
}

TEST_CASE("small sweep row semantics") {
  SweepOptions opt;
  opt.h = 0.05;
  opt.r_max = 12.0;
  opt.sectors = {0, 1};
  auto rows = coercivity_sweep({1}, opt);
  REQUIRE(rows.size() == 4);
  for (auto& r : rows) {
    CHECK(r.in_scope);
    CHECK(r.lambda_min > 0.0);
    CHECK(r.pass);
  }
}
