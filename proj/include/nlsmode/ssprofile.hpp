#pragma once

#include "nlsmode/ground_state.hpp"
#include "nlsmode/operators_core.hpp"
#include "nlsmode/radial.hpp"

namespace nlsmode {

struct ProfileTraceEntry {
  double a0 = 0.0, b = 0.0;
  double fmatch = 0.0;  // normalized matching-functional magnitude
};

/// Converged self-similar profile Q_b with gauge Q_b(0) = a0 > 0, Q_b'(0) = 0.
///
/// `residual` is the solver defect: the admissible-branch matching functional
/// at convergence (grid-free) combined with the collocation defect.
/// `residual2` is the second-order stencil defect of the stored values on the
/// solve grid; it is pure truncation O(h^2) and is re-evaluated on whatever
/// grid the profile is transported to (see eq12_residual2).
struct ProfileB {
  int d = 1;
  double p = 5.2;
  double s_c = 0.0;  // d/2 - 2/(p-1)
  double b = 0.0;    // collocation value on the solve grid
  double b_shoot = 0.0;
  double a0 = 0.0;
  RadialGrid grid;     // radial sector
  RadialGrid grid_l1;  // l = 1 sector, same mesh

  std::vector<cplx> qb;   // profile samples
  std::vector<cplx> dqb;  // fourth-order derivative samples
  std::vector<cplx> lqb;  // Lambda Q_b = (Lambda0 - s_c) Q_b, fourth-order

  double residual = 0.0;
  double residual2 = 0.0;
  double solver_defect = 0.0;
  TailFit tail;  // power fit of |Q_b| (kappa fixed to 0)
  std::vector<ProfileTraceEntry> trace;

  RadialFunction fn() const {
    RadialFunction f(grid, false);
    f.values = qb;
    return f;
  }
};

/// Potentials entering L_{+-,b} and N_b.
struct PotentialSetB {
  std::vector<double> w1b;    // (p+1)/2 |Q_b|^{p-1}
  std::vector<cplx> w2b;      // (p-1)/2 |Q_b|^{p-3} Q_b^2
  std::vector<double> wpb;    // W_{1,b} + Re W_{2,b}
  std::vector<double> wmb;    // W_{1,b} - Re W_{2,b}
  std::vector<double> nb;     // Im W_{2,b}
};

/// WKB envelope S_b(r) = int_{min(r, 2/b)}^{2/b} sqrt(1 - b^2 s^2 / 4) ds,
/// in closed form.
double wkb_envelope(double b, double r);

struct ProfileOptions {
  double tol = 1e-9;          // matching-functional tolerance
  double colloc_tol = 1e-9;   // collocation defect tolerance (per mass norm)
  double r_match_factor = 6.0;  // r_match = factor / b
  int series_terms = 8;
  bool coarse_scan = true;    // widen the Newton basin with a seed scan
};

ProfileB solve_profile(int d, double p, double b_guess, double a0_guess, const RadialGrid& grid,
                       double tol);
ProfileB solve_profile_opt(int d, double p, double b_guess, double a0_guess,
                           const RadialGrid& grid, const ProfileOptions& opt);

PotentialSetB potentials_b(const ProfileB& prof);

/// Transport a converged profile onto another mesh (cubic resample of the
/// fourth-order values; derivative fields rebuilt).
ProfileB transport_profile(const ProfileB& prof, const RadialGrid& target);

/// Second-order discrete Eq. (1.2) defect of the profile samples on their
/// grid, using the same flux stencils as the H_b assembly.
double eq12_residual2(const ProfileB& prof);

/// Re-polish a transported profile by plain second-order collocation with a
/// phase gauge; b floats (bordered solve).  Afterwards the discrete profile
/// equation holds to solver precision on this grid, so H_b xi0_b = 0 exactly.
void polish_profile_on_grid(ProfileB& prof, double tol = 1e-12);

struct ScalingLawRow {
  double p = 0.0, s_c = 0.0, b = 0.0, a0 = 0.0;
  double law_constant = 0.0;  // log s_c + pi/b + log b
};
struct ScalingLawReport {
  std::vector<ScalingLawRow> rows;
  double spread = 0.0;  // max - min of law_constant
  bool b_monotone_in_sc = false;
};
ScalingLawReport scaling_law_check(int d, const std::vector<double>& p_list,
                                   const RadialGrid& grid, double tol = 1e-9);

struct PotentialDiffReport {
  double c1 = 0.0, c2 = 0.0;  // sup_{r <= b^{-1/3}} |W_{j,b} - W_j| / (b^{1/3} |Q_b|^{p-1})
  double r_window = 0.0;
};
PotentialDiffReport compare_potentials(const ProfileB& prof, const GroundStatePack& gs);

std::string profile_to_json(const ProfileB& prof);
ProfileB profile_from_json(const std::string& text);

}  // namespace nlsmode
