#include "nlsmode/radial.hpp"

#include <algorithm>
#include <cmath>

namespace nlsmode {

std::vector<double> RadialFunction::real_values() const {
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

namespace {

// 6-point Gauss-Legendre nodes/weights on [-1, 1]; exact to degree 11,
// enough for t^2 * r^{d-1} with d <= 10.
constexpr double kGL6x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                             0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double kGL6w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                             0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// Accumulate \int_a^b l_k(t(r)) r^{d-1} dr onto w[j0..j0+2], where t is the
// local coordinate centered on node j0+1 and l_k the quadratic Lagrange basis
// on t = -1, 0, 1.
void add_panel(std::vector<double>& w, int j0, double x1, double h, double a, double b, int d) {
  double mu[3] = {0.0, 0.0, 0.0};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int q = 0; q < 6; ++q) {
    const double r = mid + half * kGL6x[q];
    const double t = (r - x1) / h;
    double rp = 1.0;
    for (int k = 0; k < d - 1; ++k) rp *= r;
    const double base = kGL6w[q] * half * rp;
    mu[0] += base;
    mu[1] += base * t;
    mu[2] += base * t * t;
  }
  // l_{-1} = t(t-1)/2, l_0 = 1-t^2, l_{+1} = t(t+1)/2
  w[j0] += 0.5 * (mu[2] - mu[1]);
  w[j0 + 1] += mu[0] - mu[2];
  w[j0 + 2] += 0.5 * (mu[2] + mu[1]);
}

double shell_volume(double a, double b, int d) {
  // \int_a^b r^{d-1} dr, computed stably.
  return (std::pow(b, d) - std::pow(a, d)) / d;
}

}  // namespace

RadialGrid make_grid(int d, Sector sector, double h, double r_max, OuterBC bc, double robin_kappa) {
  if (d < 1 || d > 12) throw std::invalid_argument("make_grid: d must be in [1, 12]");
  if (!(h > 0.0)) throw std::invalid_argument("make_grid: h must be positive");
  if (!(r_max >= 10.0 * h)) throw std::invalid_argument("make_grid: r_max must be >= 10*h");
  if (sector.index < 0) throw std::invalid_argument("make_grid: sector index must be >= 0");

  RadialGrid g;
  g.d = d;
  g.sector = sector;
  g.bc = bc;
  g.robin_kappa = robin_kappa;

  const int n = static_cast<int>(std::llround(r_max / h));
  g.h = h;
  g.r_max = n * h;  // snap so that r_n = r_max exactly up to roundoff
  g.nodes.resize(n);
  for (int i = 0; i < n; ++i) g.nodes[i] = (i + 1) * h;

  // High-order quadrature weights: panels of two cells, quadratic basis with
  // exact r^{d-1} moments.  First panel covers [0, 2h] using nodes 1..3.
  g.weights.assign(n, 0.0);
  if (n < 3) throw std::invalid_argument("make_grid: need at least 3 nodes");
  add_panel(g.weights, 0, 2.0 * h, h, 0.0, 2.0 * h, d);
  int j = 2;  // leftmost node (0-based) of the next panel start r = (j)* ... nodes[j-1]
  while (j + 2 < n + 1) {
    // panel [r_j, r_{j+2}] with nodes j, j+1, j+2 (1-based) -> 0-based j-1
    if (j + 2 <= n) {
      add_panel(g.weights, j - 1, (j + 1) * h, h, j * h, (j + 2) * h, d);
      j += 2;
    } else {
      break;
    }
  }
  if (j < n) {
    // one trailing cell [r_{n-1}, r_n]; use the last three nodes
    add_panel(g.weights, n - 3, (n - 1) * h, h, (n - 1) * h, n * h, d);
  }

  // Finite-volume cell masses.
  g.cell_mass.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double a = g.nodes[i] - 0.5 * h;
    double b = g.nodes[i] + 0.5 * h;
    if (i == 0 && g.even_origin()) a = 0.0;
    if (i == 0 && !g.even_origin()) a = 0.5 * h;
    if (i == n - 1) b = g.r_max;
    g.cell_mass[i] = shell_volume(a, b, d);
  }
  return g;
}

double quadrature(const RadialGrid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.weights[i] * f[i];
  return s;
}

cplx quadrature(const RadialGrid& g, const std::vector<cplx>& f) {
  cplx s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.weights[i] * f[i];
  return s;
}

double inner_w(const RadialGrid& g, const std::vector<double>& f, const std::vector<double>& gv) {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.weights[i] * f[i] * gv[i];
  return s;
}

double inner_m(const RadialGrid& g, const std::vector<double>& f, const std::vector<double>& gv) {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.cell_mass[i] * f[i] * gv[i];
  return s;
}

cplx inner_m(const RadialGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& gv) {
  cplx s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.cell_mass[i] * std::conj(gv[i]) * f[i];
  return s;
}

double norm_m(const RadialGrid& g, const std::vector<double>& f) {
  return std::sqrt(inner_m(g, f, f));
}

double norm_m(const RadialGrid& g, const std::vector<cplx>& f) {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.cell_mass[i] * std::norm(f[i]);
  return std::sqrt(s);
}

RadialFunction resample(const RadialFunction& f, const RadialGrid& target) {
  const RadialGrid& src = *f.grid;
  const double eps = 1e-12 * src.r_max;
  if (target.r_max > src.r_max + eps)
    throw std::invalid_argument("resample: target domain exceeds source domain");

  const int ns = src.n();
  const double h = src.h;

  RadialFunction out(target, f.real_flag);
  for (int k = 0; k < target.n(); ++k) {
    const double r = target.nodes[k];
    // Bitwise pass-through when the node coincides with a source node.
    const double pos = r / h;
    int nearest = static_cast<int>(std::llround(pos));
    if (nearest >= 1 && nearest <= ns && std::abs(pos - nearest) < 1e-9) {
      out.values[k] = f.values[nearest - 1];
      continue;
    }
    int i0 = static_cast<int>(std::floor(pos));  // r in [r_{i0}, r_{i0+1})
    int lo = std::clamp(i0 - 1, 1, ns - 3);      // one-sided at both edges
    cplx acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      const int ia = lo + a;
      double w = 1.0;
      const double ra = ia * h;
      for (int bq = 0; bq < 4; ++bq) {
        if (bq == a) continue;
        const double rb = (lo + bq) * h;
        w *= (r - rb) / (ra - rb);
      }
      acc += w * f.values[ia - 1];
    }
    out.values[k] = f.real_flag ? cplx(acc.real(), 0.0) : acc;
  }
  return out;
}

TailFit fit_tail(const RadialFunction& f, int i_lo, int i_hi, bool fix_kappa_zero) {
  const RadialGrid& g = *f.grid;
  if (i_hi - i_lo + 1 < 10) throw std::invalid_argument("fit_tail: window shorter than 10 nodes");
  const int m = i_hi - i_lo + 1;
  // reject sign changes (real data) and vanishing magnitudes
  for (int i = i_lo; i <= i_hi; ++i) {
    if (std::abs(f.values[i]) == 0.0) throw std::invalid_argument("fit_tail: zero value in window");
    if (f.real_flag && i > i_lo && f.values[i].real() * f.values[i - 1].real() < 0.0)
      throw std::invalid_argument("fit_tail: sign change in window");
  }
  // design: log|f| = c - kappa r - beta log r
  const int p = fix_kappa_zero ? 2 : 3;
  std::vector<double> ata(9, 0.0), atb(3, 0.0);
  auto col = [&](int j, int i) -> double {
    const double r = g.nodes[i];
    if (fix_kappa_zero) return j == 0 ? 1.0 : -std::log(r);
    return j == 0 ? 1.0 : (j == 1 ? -r : -std::log(r));
  };
  for (int i = i_lo; i <= i_hi; ++i) {
    const double y = std::log(std::abs(f.values[i]));
    for (int a = 0; a < p; ++a) {
      atb[a] += col(a, i) * y;
      for (int b = 0; b < p; ++b) ata[a * 3 + b] += col(a, i) * col(b, i);
    }
  }
  // tiny normal-equations solve by Gaussian elimination
  double A[3][4];
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) A[a][b] = ata[a * 3 + b];
    A[a][p] = atb[a];
  }
  for (int cpiv = 0; cpiv < p; ++cpiv) {
    int piv = cpiv;
    for (int rst = cpiv + 1; rst < p; ++rst)
      if (std::abs(A[rst][cpiv]) > std::abs(A[piv][cpiv])) piv = rst;
    std::swap(A[cpiv], A[piv]);
    for (int rst = 0; rst < p; ++rst) {
      if (rst == cpiv) continue;
      const double fct = A[rst][cpiv] / A[cpiv][cpiv];
      for (int cc = cpiv; cc <= p; ++cc) A[rst][cc] -= fct * A[cpiv][cc];
    }
  }
  TailFit out;
  out.c = A[0][p] / A[0][0];
  if (fix_kappa_zero) {
    out.kappa = 0.0;
    out.beta = A[1][p] / A[1][1];
  } else {
    out.kappa = A[1][p] / A[1][1];
    out.beta = A[2][p] / A[2][2];
  }
  double ss = 0.0;
  for (int i = i_lo; i <= i_hi; ++i) {
    const double r = g.nodes[i];
    const double model = out.c - out.kappa * r - out.beta * std::log(r);
    const double dlt = std::log(std::abs(f.values[i])) - model;
    ss += dlt * dlt;
  }
  out.residual = std::sqrt(ss / m);
  return out;
}

TailFit fit_tail_window(const RadialFunction& f, double r_lo, double r_hi, bool fix_kappa_zero) {
  const RadialGrid& g = *f.grid;
  int i_lo = std::max(0, static_cast<int>(std::ceil(r_lo / g.h)) - 1);
  int i_hi = std::min(g.n() - 1, static_cast<int>(std::floor(r_hi / g.h)) - 1);
  return fit_tail(f, i_lo, i_hi, fix_kappa_zero);
}

}  // namespace nlsmode
