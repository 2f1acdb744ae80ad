#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsmode {

using cplx = std::complex<double>;

/// Angular sector of the spherical-harmonic decomposition.
///
/// For d >= 2 this is the harmonic index l >= 0.  For d = 1 the half-line
/// carries two parity sectors: index 0 = even (Neumann ghost at the origin),
/// index 1 = odd (Dirichlet ghost).  Indices >= 2 in d = 1 alias to their
/// parity.
struct Sector {
  int index = 0;

  static Sector radial() { return {0}; }
  static Sector ell(int l) { return {l}; }
  static Sector even() { return {0}; }
  static Sector odd() { return {1}; }

  bool operator==(const Sector&) const = default;
};

enum class OuterBC { Dirichlet, Robin };

/// Uniform radial mesh with nodes r_i = i*h, i = 1..n, r_n = r_max.
///
/// Two weight vectors are carried.  `weights` is a composite-quadratic rule
/// with exact r^{d-1} moments per panel: it integrates r^k, k <= 2, against
/// r^{d-1} dr to roundoff and smooth functions at fourth order.  `cell_mass`
/// is the finite-volume cell measure used as the discrete L^2(r^{d-1} dr)
/// inner product in which the stencil operators are exactly symmetric.
struct RadialGrid {
  int d = 1;
  Sector sector;
  double h = 0.0;
  double r_max = 0.0;
  OuterBC bc = OuterBC::Dirichlet;
  double robin_kappa = 0.0;

  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> cell_mass;

  int n() const { return static_cast<int>(nodes.size()); }
  /// Number of unconstrained nodes: Dirichlet pins the value at r_max.
  int n_active() const { return bc == OuterBC::Dirichlet ? n() - 1 : n(); }

  /// Even-type origin closure (zero flux through r = 0)?
  bool even_origin() const { return d == 1 ? sector.index % 2 == 0 : sector.index == 0; }
  /// Centrifugal coefficient l(l+d-2); 0 in d = 1.
  double centrifugal() const {
    if (d == 1) return 0.0;
    double l = sector.index;
    return l * (l + d - 2);
  }
  bool same_mesh(const RadialGrid& o) const {
    return d == o.d && nodes.size() == o.nodes.size() && h == o.h && r_max == o.r_max;
  }
};

struct TailFit {
  double kappa = 0.0;   // exponential rate in log|f| = c - kappa*r - beta*log r
  double beta = 0.0;    // power exponent
  double c = 0.0;
  double residual = 0.0;  // rms misfit over the window
};

/// Samples of a radial function on a grid, optionally with a fitted tail.
struct RadialFunction {
  const RadialGrid* grid = nullptr;
  std::vector<cplx> values;
  bool real_flag = true;
  std::optional<TailFit> tail;

  RadialFunction() = default;
  RadialFunction(const RadialGrid& g, bool real = true)
      : grid(&g), values(g.nodes.size(), cplx(0.0)), real_flag(real) {}

  double real_at(int i) const { return values[i].real(); }
  std::vector<double> real_values() const;
};

RadialGrid make_grid(int d, Sector sector, double h, double r_max,
                     OuterBC bc = OuterBC::Dirichlet, double robin_kappa = 0.0);

/// \int f r^{d-1} dr over [0, r_max] with the high-order rule.
double quadrature(const RadialGrid& g, const std::vector<double>& f);
cplx quadrature(const RadialGrid& g, const std::vector<cplx>& f);

/// Weighted inner products (quadrature rule / cell-mass rule).
double inner_w(const RadialGrid& g, const std::vector<double>& f, const std::vector<double>& gvals);
double inner_m(const RadialGrid& g, const std::vector<double>& f, const std::vector<double>& gvals);
cplx inner_m(const RadialGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& gvals);
double norm_m(const RadialGrid& g, const std::vector<double>& f);
double norm_m(const RadialGrid& g, const std::vector<cplx>& f);

/// Cubic (4-point Lagrange) interpolation onto a new grid.  Ghost values
/// across the origin follow the sector parity.  Throws on extrapolation.
RadialFunction resample(const RadialFunction& f, const RadialGrid& target);

/// Least-squares fit of log|f| = c - kappa*r - beta*log r over nodes
/// [i_lo, i_hi].  Requires >= 10 nodes and no sign changes of |f|.
/// `fix_kappa_zero` drops the exponential column (pure power fit).
TailFit fit_tail(const RadialFunction& f, int i_lo, int i_hi, bool fix_kappa_zero = false);
TailFit fit_tail_window(const RadialFunction& f, double r_lo, double r_hi,
                        bool fix_kappa_zero = false);

}  // namespace nlsmode
