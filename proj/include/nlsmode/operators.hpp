#pragma once

#include "nlsmode/ground_state.hpp"
#include "nlsmode/operators_core.hpp"
#include "nlsmode/ssprofile.hpp"

#include <memory>

namespace nlsmode {

/// Discretized operators of the critical linearization on one sector.
/// The sector grid is shared-owned so the banded operators' grid pointers
/// stay valid across copies and moves.
struct OperatorSet0 {
  int d = 1;
  Sector sector;
  std::shared_ptr<const RadialGrid> grid_ptr;
  std::vector<double> w1, w2;  // W_1 = (p0+1)/2 Q^{p0-1}, W_2 = (p0-1)/2 Q^{p0-1}
  ScalarOp Lp, Lm;             // L_+- = -Delta + 1 - W_1 -+ W_2
  ScalarOp L1, L2;             // Virial commutators from the explicit potentials
  BlockOp H0;
  const RadialGrid& grid() const { return *grid_ptr; }
};

/// Discretized operators of the self-similar linearization on one sector.
struct OperatorSetB {
  int d = 1;
  Sector sector;
  double b = 0.0, s_c = 0.0, p = 0.0;
  std::shared_ptr<const RadialGrid> grid_ptr;
  PotentialSetB pots;
  ScalarOp Lpb, Lmb;  // L_{+-,b} = -Delta + 1 - W_{+-,b}
  std::vector<double> nb;
  BlockOp Hb;
  bool robin_closure = false;  // admissible-tail ghost row at r_max
  const RadialGrid& grid() const { return *grid_ptr; }
};

/// Eigenmodes of the generalized nullspaces, as two-component vectors.
struct EigenmodeSet {
  Mode xi0, xi1, xi2, xi3;   // radial sector
  Mode zeta0, zeta1;         // l = 1 sector
};

struct EigenmodeSetB {
  Mode xi0b, xi1b, xi2b, eta_b;  // radial
  Mode zeta0b, zeta1b;           // l = 1
};

/// Assemble L_+-, L_1, L_2 and the block H_0 on a sector grid with the same
/// mesh as the pack's.  L_1, L_2 use the explicit potential form
/// -Delta + (2/d)(4/d+1) r Q' Q^{4/d-1} (resp. (2/d)); the commutator route
/// [L_+, Lambda_0] = 2 L_1 is kept as a test-side cross-check only.
OperatorSet0 assemble_H0(const GroundStatePack& gs, Sector sector);

/// Assemble L_{+-,b}, N_b and the block H_b on a sector grid carried by the
/// profile.  With `robin_tail`, the outer row uses the admissible-branch
/// ghost (needed for the scan to hold the symmetry eigenvalues); otherwise
/// Dirichlet, which keeps the sigma3-adjoint identity exact at matrix level.
OperatorSetB assemble_Hb(const ProfileB& prof, Sector sector, bool robin_tail = false);

EigenmodeSet make_eigenmodes(const GroundStatePack& gs);
EigenmodeSetB make_eigenmodes_b(const ProfileB& prof);

struct ChainResidualRow {
  std::string name;
  double residual = 0.0;   // two-component mass norm of the relation defect
  double mode_norm = 0.0;  // normalization (see below)
  double relative = 0.0;
  double paper_display = 0.0;  // residual of the display variant H0 xi_k = -i xi_k
};

/// Jordan-chain residual table for H_0.  Kernel relations are normalized by
/// the mode's own norm; link relations H0 xi_k = -i xi_{k-1} by the target
/// mode norm ||xi_{k-1}|| (backward error of the equation).
std::vector<ChainResidualRow> jordan_chain_residuals(const OperatorSet0& radial,
                                                     const OperatorSet0& ell1,
                                                     const EigenmodeSet& modes);

struct HbRelationRow {
  std::string name;
  double residual = 0.0;
  double mode_norm = 0.0;
  double relative = 0.0;
};

/// Residuals of the five H_b eigenmode relations plus the scalar forms of the
/// first two (the profile-equation pair and the Lambda-differentiated pair).
std::vector<HbRelationRow> hb_mode_residuals(const OperatorSetB& radial, const OperatorSetB& ell1,
                                             const EigenmodeSetB& modes, const ProfileB& prof);

/// sigma3-adjoint defect max |M(H*) - M(sigma3 (H + shift) sigma3)| relative,
/// computed entrywise on the banded blocks.
double sigma3_adjoint_defect(const BlockOp& H, cplx shift);

/// Realified (u, w) form of a block operator: the real matrix K with
/// T H T^{-1} = -i K, so spec(H) = -i spec(K).  Dense column-major, size
/// 2 n_active; y-coordinates (similarity by sqrt cell mass).
std::vector<double> realified_dense(const OperatorSetB& setb);
std::vector<double> realified_dense_h0(const OperatorSet0& set0);

/// Banded complex block operator shifted by -lambda, interleaved ordering
/// (top_i, bot_i), for inverse iteration.
Banded<cplx> interleaved_shifted(const BlockOp& H, cplx lambda);

/// Text export of a banded complex block operator (header: d sector n bw,
/// then one row per line).
std::string export_matrix_text(const OperatorSetB& setb);
std::string export_matrix_text(const OperatorSet0& set0);

}  // namespace nlsmode
