#pragma once

#include "nlsmode/operators_core.hpp"
#include "nlsmode/radial.hpp"

namespace nlsmode {

/// The mass-critical ground state and the derived profiles entering the
/// orthogonality conditions and eigenmodes.
///
/// Values are fourth-order accurate (shooting plus a collocation polish with
/// a high-order defect); the stored residuals are the second-order stencil
/// defects, which stay truncation-dominated and shrink by 4 under h -> h/2.
struct GroundStatePack {
  int d = 1;
  double p = 5.0;  // nonlinearity; the paper's operators use p0 = 1 + 4/d
  RadialGrid grid;     // radial sector
  RadialGrid grid_l1;  // l = 1 sector on the same mesh

  std::vector<double> q;    // Q
  std::vector<double> q1;   // Lambda0 Q
  std::vector<double> q2;   // Lambda0^2 Q
  std::vector<double> xq;   // radial part of x Q (l = 1)
  std::vector<double> x2q;  // |x|^2 Q
  std::vector<double> rho;  // L_+^{-1} (|x|^2 Q)
  std::vector<double> dq;   // radial part of grad Q (l = 1)

  double shoot_value = 0.0;    // Q(0) from the shooting bisection
  double residual2 = 0.0;      // ||D2 Q - Q + Q^p||_M / ||Q||_M
  double solver_defect = 0.0;  // high-order collocation defect at convergence
  double rho_rcond = 0.0;      // condition estimate of the rho solve
  TailFit tail;

  bool has_profiles() const { return !rho.empty(); }

  RadialFunction fn(const std::vector<double>& v, bool l1 = false) const {
    RadialFunction f(l1 ? grid_l1 : grid);
    for (size_t i = 0; i < v.size(); ++i) f.values[i] = v[i];
    return f;
  }
  double p0() const { return 1.0 + 4.0 / d; }
};

struct ShootResult {
  double a = 0.0;          // converged shooting parameter Q(0)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

/// Bisection shooting for the positive decaying solution of
/// Q'' + (d-1)/r Q' - Q + Q^p = 0.  Grid-independent.
ShootResult shoot_ground_state(int d, double p, double r_end, double a_lo = 1.0 + 1e-9,
                               double a_hi = 4.0);

/// Shooting plus collocation polish on the grid.  `tol` bounds the
/// collocation defect at convergence (relative, mass norm).
/// Shooting plus collocation polish.  Default: deferred-correction on an
/// internal refined mesh (pack values fourth-order accurate, second-order
/// residuals truncation-dominated).  With `second_order_polish` the plain
/// second-order system is solved on the given grid instead, so the discrete
/// equation holds to solver precision (exact assembled kernels, for scans).
GroundStatePack solve_ground_state(int d, double p, const RadialGrid& grid, double tol = 1e-10,
                                   bool second_order_polish = false);

/// Fill q1, q2, xq, x2q and solve L_+ rho = r^2 Q.  The rho system is solved
/// on a half-spacing mesh and restricted, so the pack-grid residual of the
/// defining equation stays truncation-dominated.
void derive_profiles(GroundStatePack& pack);

/// Potentials of the critical linearized operators at p0 = 1 + 4/d.
std::vector<double> potential_w1(const GroundStatePack& pack);
std::vector<double> potential_w2(const GroundStatePack& pack);

/// Fourth-order first derivative / scaling generator with parity ghosts;
/// used to build pack profiles with smooth high-order-accurate values.
std::vector<double> radial_derivative_ho(const RadialGrid& g, const std::vector<double>& f);
std::vector<double> apply_lambda0_ho(const RadialGrid& g, const std::vector<double>& f);

std::string pack_to_json(const GroundStatePack& pack);
GroundStatePack pack_from_json(const std::string& text);

}  // namespace nlsmode
