#pragma once

#include "nlsmode/linalg.hpp"
#include "nlsmode/radial.hpp"

namespace nlsmode {

/// Real banded operator on the active nodes of a sector grid.
///
/// `hermitian` / `antisymmetric` mean exact symmetry in the cell-mass inner
/// product (they hold to roundoff by construction, not just O(h^2)).
struct ScalarOp {
  const RadialGrid* grid = nullptr;
  Banded<double> A;
  bool hermitian = false;
  bool antisymmetric = false;

  int n_active() const { return A.n; }
  int bandwidth() const { return A.bw; }

  /// Apply to full-length node values; Dirichlet output value at r_max is 0.
  std::vector<double> apply(const std::vector<double>& f) const;
  std::vector<cplx> apply(const std::vector<cplx>& f) const;
};

/// 2x2-block complex banded operator (the matrix operators H_0, H_b).
struct BlockOp {
  const RadialGrid* grid = nullptr;
  Banded<cplx> a11, a12, a21, a22;
  cplx sigma3_shift = 0.0;  // H* = sigma3 (H + shift) sigma3 at matrix level

  int n_active() const { return a11.n; }
  void apply(const std::vector<cplx>& top, const std::vector<cplx>& bot, std::vector<cplx>& out_top,
             std::vector<cplx>& out_bot) const;
};

/// Two-component vector (eigenmode) on a sector grid.
struct Mode {
  const RadialGrid* grid = nullptr;
  std::vector<cplx> top, bot;

  Mode() = default;
  Mode(const RadialGrid& g)
      : grid(&g), top(g.nodes.size(), cplx(0)), bot(g.nodes.size(), cplx(0)) {}
  double norm() const;
};

/// Sector-reduced Laplacian with flux-form closure: exactly symmetric in the
/// cell-mass inner product, Dirichlet at r_max by default (Robin when the
/// grid requests it; the Robin row trades exact symmetry for consistency).
ScalarOp laplacian(const RadialGrid& g);

/// Scaling generator d/2 + r d/dr in divergence form, exactly antisymmetric
/// in the cell-mass inner product (zero diagonal, face coefficients r^d/2).
ScalarOp lambda0(const RadialGrid& g);

/// Diagonal multiplication operator from node samples.
ScalarOp multiplication(const RadialGrid& g, const std::vector<double>& v);

/// Central first derivative (consistency helper, not mass-symmetric).
ScalarOp radial_derivative(const RadialGrid& g);

/// Max entrywise defect of M A - (M A)^T relative to max |M A|.
double hermitian_defect(const ScalarOp& op);
/// Max entrywise defect of M A + (M A)^T relative to max |M A|.
double antisymmetry_defect(const ScalarOp& op);

/// Dense symmetrized form in y = sqrt(m) x coordinates: (Ã + Ã^T)/2 with
/// Ã = D A D^{-1}.  Column-major n_active^2.
std::vector<double> sym_dense(const ScalarOp& op);
/// Dense similarity transform D A D^{-1} without symmetrization.
std::vector<double> y_dense(const ScalarOp& op);

std::vector<double> sqrt_mass(const RadialGrid& g);

/// Quadratic form <A f, f>_M evaluated through the banded operator.
double quad_form(const ScalarOp& op, const std::vector<double>& f);
cplx quad_form(const ScalarOp& op, const std::vector<cplx>& f);

}  // namespace nlsmode
