#pragma once

#include "nlsmode/operators.hpp"

namespace nlsmode {

/// Smooth cutoff chi_R, truncated scaling generator Lambda_R, the C^3
/// piecewise-quartic-derivative cutoff psi_b on its own 1D mesh, and the
/// weight (1 + r^4)^{-1/4}.
struct CutoffSet {
  std::shared_ptr<const RadialGrid> grid_ptr;
  double R_chi = 0.0;
  std::vector<double> chi, dchi;  // chi_R and chi_R' at the nodes
  std::vector<double> rho_w;      // (1 + r^4)^{-1/4}
  ScalarOp LambdaR;               // chi Lambda0 + (1/2) r chi'

  double b = 0.0;
  double R_psi = 0.0;  // b^{-2}
  std::vector<double> psi_r, psi, dpsi, d2psi, psi_tilde;  // dedicated psi mesh

  const RadialGrid& grid() const { return *grid_ptr; }
};

/// chi profile (1 for s <= 1, 0 for s >= 3/2, C-infinity) and derivative.
double chi_profile(double s);
double chi_profile_deriv(double s);

/// psi profile on [1, 2]: psi' = -630 (s-1)^4 (2-s)^4, C^3 at both seams.
double psi_profile(double s);
double psi_profile_deriv(double s);
double psi_profile_deriv2(double s);

CutoffSet build_cutoffs(double b, const RadialGrid& grid, double R_chi);

struct PsiCheckRow {
  double b = 0.0;
  double validity = 0.0;   // sup of |psi_b''| / (b^{7/5} (psi~_b + r^{-11/5}))
  double constant = 0.0;   // validity / b^{7/5}: the b-normalized constant
  double r_argmax = 0.0;
  bool edge_dominated = false;  // r^{-11/5} >= psi~_b at the argmax
};
struct PsiCheckReport {
  std::vector<PsiCheckRow> rows;
  double band_ratio = 0.0;  // max constant / min constant
  bool pass = false;        // within a factor 2
};
PsiCheckReport psi_inequality_check(const std::vector<double>& b_list);

/// Time derivative of E = (L+ u, u) + (L- w, w) under the linearized flow,
/// evaluated through the four-term expansion.  Exact cancellation at matrix
/// level; `break_symmetry` de-symmetrizes L+ to exercise the failure mode.
double energy_conservation_residual(const OperatorSet0& set0, const std::vector<cplx>& u,
                                    const std::vector<cplx>& w, bool break_symmetry = false);

struct VirialRecord {
  double lhs = 0.0;       // d/dt of -2 Re(Lambda_R u, w) under the flow
  double line1 = 0.0;     // 2 Re(chi L1 u, u) + 2 Re(chi L2 w, w)
  double line2 = 0.0;     // kinetic boundary-commutator quadratic forms
  double residual = 0.0;  // lhs - line1 - line2
  double boundary_mag = 0.0;  // |line2 terms| magnitude
};
VirialRecord virial_derivative_identity(const OperatorSet0& set0, const CutoffSet& cut,
                                        const std::vector<cplx>& u, const std::vector<cplx>& w);

struct EbReport {
  double value = 0.0;
  double u_h1 = 0.0, w_h1 = 0.0;  // squared H1 norms of the inputs
  bool nonneg_within_slack = false;
};
EbReport eb_form(const OperatorSetB& setb, const std::vector<cplx>& u,
                 const std::vector<cplx>& w, double slack = 1e-2);

/// Truncated weighted energy E_{b,mu}; diagnostic only.  Sets `regime_warning`
/// when |mu| exceeds 2 b^{3+d}.
double ebmu_assembly(const OperatorSetB& setb, const CutoffSet& cut, double mu,
                     const std::vector<cplx>& u, const std::vector<cplx>& w,
                     bool* regime_warning = nullptr);

/// Deterministic smooth random field (sum of Gaussians with seeded params).
std::vector<cplx> smooth_random_field(const RadialGrid& g, uint64_t seed);

/// Project out the given profiles in the cell-mass pairing.
void project_out(const RadialGrid& g, std::vector<cplx>& u,
                 const std::vector<const std::vector<double>*>& constraints);

}  // namespace nlsmode
