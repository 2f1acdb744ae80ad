#include "nlsmode/operators_core.hpp"

#include <cmath>

namespace nlsmode {

namespace {

template <class T>
std::vector<T> apply_active(const Banded<double>& A, const RadialGrid& g,
                            const std::vector<T>& f) {
  const int na = A.n;
  std::vector<T> out(g.nodes.size(), T(0));
  for (int i = 0; i < na; ++i) {
    T s(0);
    const int j0 = std::max(0, i - A.bw), j1 = std::min(na - 1, i + A.bw);
    for (int j = j0; j <= j1; ++j) s += A.get(i, j) * f[j];
    out[i] = s;
  }
  return out;
}

}  // namespace

std::vector<double> ScalarOp::apply(const std::vector<double>& f) const {
  return apply_active(A, *grid, f);
}
std::vector<cplx> ScalarOp::apply(const std::vector<cplx>& f) const {
  return apply_active(A, *grid, f);
}

void BlockOp::apply(const std::vector<cplx>& top, const std::vector<cplx>& bot,
                    std::vector<cplx>& out_top, std::vector<cplx>& out_bot) const {
  const int na = n_active();
  out_top.assign(grid->nodes.size(), cplx(0));
  out_bot.assign(grid->nodes.size(), cplx(0));
  for (int i = 0; i < na; ++i) {
    cplx s1(0), s2(0);
    const int j0 = std::max(0, i - a11.bw), j1 = std::min(na - 1, i + a11.bw);
    for (int j = j0; j <= j1; ++j) {
      s1 += a11.get(i, j) * top[j] + a12.get(i, j) * bot[j];
      s2 += a21.get(i, j) * top[j] + a22.get(i, j) * bot[j];
    }
    out_top[i] = s1;
    out_bot[i] = s2;
  }
}

double Mode::norm() const {
  double s = 0.0;
  for (size_t i = 0; i < top.size(); ++i)
    s += grid->cell_mass[i] * (std::norm(top[i]) + std::norm(bot[i]));
  return std::sqrt(s);
}

ScalarOp laplacian(const RadialGrid& g) {
  const int n = g.n_active();
  const double h = g.h;
  const int d = g.d;
  ScalarOp op;
  op.grid = &g;
  op.A = Banded<double>(n, 1);
  op.hermitian = (g.bc != OuterBC::Robin);

  auto face = [&](double r) { return std::pow(r, d - 1); };
  const double cl = g.centrifugal();

  for (int i = 0; i < n; ++i) {
    const double r = g.nodes[i];
    const double m = g.cell_mass[i];
    double a_in = face(r - 0.5 * h);
    const double a_out = face(r + 0.5 * h);

    if (i == 0) {
      if (g.even_origin()) {
        // zero flux through r = 0; first cell spans [0, 3h/2]
        op.A.at(0, 0) = -a_out / (m * h);
        if (n > 1) op.A.at(0, 1) = a_out / (m * h);
      } else {
        // value at the origin vanishes (r^l regularity / odd parity)
        op.A.at(0, 0) = -(a_in + a_out) / (m * h);
        if (n > 1) op.A.at(0, 1) = a_out / (m * h);
      }
    } else if (i == n - 1 && g.bc == OuterBC::Robin) {
      // flux at r_max from u' = -kappa u
      op.A.at(i, i - 1) = a_in / (m * h);
      op.A.at(i, i) = -(a_in / h + face(g.r_max) * g.robin_kappa) / m;
    } else {
      // interior (Dirichlet at r_max handled by the pinned node n+1 value 0)
      op.A.at(i, i - 1) = a_in / (m * h);
      op.A.at(i, i) = -(a_in + a_out) / (m * h);
      if (i + 1 < n) op.A.at(i, i + 1) = a_out / (m * h);
    }
    if (cl != 0.0) op.A.at(i, i) -= cl / (r * r);
  }
  return op;
}

ScalarOp lambda0(const RadialGrid& g) {
  const int n = g.n_active();
  const int d = g.d;
  ScalarOp op;
  op.grid = &g;
  op.A = Banded<double>(n, 1);
  op.antisymmetric = (g.bc != OuterBC::Robin);

  auto c = [&](double r) { return 0.5 * std::pow(r, d); };  // face coefficient r^d / 2

  for (int i = 0; i < n; ++i) {
    const double r = g.nodes[i];
    const double m = g.cell_mass[i];
    const double c_in = c(r - 0.5 * g.h);
    const double c_out = c(r + 0.5 * g.h);
    if (i > 0) op.A.at(i, i - 1) = -c_in / m;
    if (i + 1 < n) op.A.at(i, i + 1) = c_out / m;
    if (i == n - 1 && g.bc == OuterBC::Robin) {
      // one-sided closure: d/2 + r d/dr with the Robin ghost
      op.A.at(i, i) = 0.5 * d - g.r_max * g.robin_kappa;
      op.A.at(i, i - 1) = 0.0;
      op.antisymmetric = false;
    }
  }
  // The f_i coefficient (c_out - c_in)/m equals d/2 exactly through the
  // neighbour-average split; no diagonal term is needed.
  return op;
}

ScalarOp multiplication(const RadialGrid& g, const std::vector<double>& v) {
  const int n = g.n_active();
  ScalarOp op;
  op.grid = &g;
  op.A = Banded<double>(n, 0);
  op.hermitian = true;
  for (int i = 0; i < n; ++i) op.A.at(i, i) = v[i];
  return op;
}

ScalarOp radial_derivative(const RadialGrid& g) {
  const int n = g.n_active();
  const double h = g.h;
  ScalarOp op;
  op.grid = &g;
  op.A = Banded<double>(n, 1);
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      // parity ghost at -h; even -> f(-h) = f(h): derivative (f2 - f0)/2h
      if (g.even_origin()) {
        // f0 := f(0) from even quadratic extrapolation (4 f1 - f2)/3
        op.A.at(0, 0) = -2.0 / (3.0 * h);
        if (n > 1) op.A.at(0, 1) = 2.0 / (3.0 * h);
      } else {
        if (n > 1) op.A.at(0, 1) = 1.0 / (2.0 * h);
      }
    } else if (i == n - 1 && g.bc == OuterBC::Robin) {
      op.A.at(i, i) = -g.robin_kappa;
    } else {
      op.A.at(i, i - 1) = -1.0 / (2.0 * h);
      if (i + 1 < n) op.A.at(i, i + 1) = 1.0 / (2.0 * h);
    }
  }
  return op;
}

double hermitian_defect(const ScalarOp& op) {
  const auto& m = op.grid->cell_mass;
  double scale = 0.0, defect = 0.0;
  const int n = op.A.n;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - op.A.bw); j <= std::min(n - 1, i + op.A.bw); ++j) {
      const double mij = m[i] * op.A.get(i, j);
      scale = std::max(scale, std::abs(mij));
      defect = std::max(defect, std::abs(mij - m[j] * op.A.get(j, i)));
    }
  return scale > 0 ? defect / scale : 0.0;
}

double antisymmetry_defect(const ScalarOp& op) {
  const auto& m = op.grid->cell_mass;
  double scale = 0.0, defect = 0.0;
  const int n = op.A.n;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - op.A.bw); j <= std::min(n - 1, i + op.A.bw); ++j) {
      const double mij = m[i] * op.A.get(i, j);
      scale = std::max(scale, std::abs(mij));
      defect = std::max(defect, std::abs(mij + m[j] * op.A.get(j, i)));
    }
  return scale > 0 ? defect / scale : 0.0;
}

std::vector<double> sqrt_mass(const RadialGrid& g) {
  std::vector<double> s(g.cell_mass.size());
  for (size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(g.cell_mass[i]);
  return s;
}

std::vector<double> y_dense(const ScalarOp& op) {
  const int n = op.A.n;
  const auto s = sqrt_mass(*op.grid);
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - op.A.bw); j <= std::min(n - 1, i + op.A.bw); ++j)
      out[static_cast<size_t>(j) * n + i] = s[i] * op.A.get(i, j) / s[j];
  return out;
}

std::vector<double> sym_dense(const ScalarOp& op) {
  const int n = op.A.n;
  auto a = y_dense(op);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (a[static_cast<size_t>(j) * n + i] + a[static_cast<size_t>(i) * n + j]);
      a[static_cast<size_t>(j) * n + i] = v;
      a[static_cast<size_t>(i) * n + j] = v;
    }
  return a;
}

double quad_form(const ScalarOp& op, const std::vector<double>& f) {
  auto af = op.apply(f);
  return inner_m(*op.grid, af, f);
}

cplx quad_form(const ScalarOp& op, const std::vector<cplx>& f) {
  auto af = op.apply(f);
  return inner_m(*op.grid, af, f);
}

}  // namespace nlsmode
